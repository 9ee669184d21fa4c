//! Internal unit system.
//!
//! Lengths are in µm, times in fs, angular frequencies in rad/fs and wave
//! numbers in rad/µm. Conversions to and from lab units live here.

use std::f64::consts::PI;

/// Speed of light in vacuum, µm/fs.
pub const SPEED_OF_LIGHT: f64 = 0.299_792_458;

/// Angular frequency (rad/fs) of light with vacuum wavelength `lambda_um`.
#[inline]
pub fn omega_from_wavelength_um(lambda_um: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / lambda_um
}

/// Vacuum wavelength (µm) of light with angular frequency `omega`.
#[inline]
pub fn wavelength_um_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

#[inline]
pub fn omega_from_wavelength_nm(lambda_nm: f64) -> f64 {
    omega_from_wavelength_um(lambda_nm * 1e-3)
}

#[inline]
pub fn wavelength_nm_from_omega(omega: f64) -> f64 {
    wavelength_um_from_omega(omega) * 1e3
}

/// Converts a wavelength width `delta_nm` around `center_nm` into an
/// angular-frequency width, to first order: Δω = 2πc Δλ / λ².
#[inline]
pub fn omega_width_from_nm(delta_nm: f64, center_nm: f64) -> f64 {
    let center_um = center_nm * 1e-3;
    2.0 * PI * SPEED_OF_LIGHT * (delta_nm * 1e-3) / (center_um * center_um)
}

/// Inverse of [`omega_width_from_nm`].
#[inline]
pub fn nm_width_from_omega(delta_omega: f64, center_nm: f64) -> f64 {
    let center_um = center_nm * 1e-3;
    delta_omega * center_um * center_um / (2.0 * PI * SPEED_OF_LIGHT) * 1e3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_round_trip() {
        for lambda in [400.0, 800.0, 1064.0] {
            let w = omega_from_wavelength_nm(lambda);
            assert!((wavelength_nm_from_omega(w) - lambda).abs() < 1e-10);
        }
        assert!((omega_from_wavelength_nm(800.0) - 2.354_564_459_136_066).abs() < 1e-12);
    }

    #[test]
    fn width_conversion_inverts() {
        let dw = omega_width_from_nm(20.0, 800.0);
        assert!((nm_width_from_omega(dw, 800.0) - 20.0).abs() < 1e-12);
    }
}
