//! Refractive indices, longitudinal wave numbers and the phase mismatch of
//! a type-I process in a negative uniaxial crystal.
//!
//! The pump travels as an extraordinary wave, signal and idler as ordinary
//! waves. The optic axis lies in the xz-plane at `cut_angle` from z; the
//! collection geometry is confined to the same plane.

use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{wavelength_um_from_omega, SPEED_OF_LIGHT};

/// Nonlinear crystal material.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Material {
    /// β-barium borate.
    #[serde(rename = "BBO", alias = "bbo")]
    Bbo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Ordinary,
    /// Principal extraordinary index, i.e. propagation normal to the optic axis.
    Extraordinary,
}

/// Two-pole Sellmeier form `n² = a + b / (λ² − c) − d λ²`, λ in µm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sellmeier {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sellmeier {
    #[inline]
    pub fn index_squared(&self, lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        self.a + self.b / (l2 - self.c) - self.d * l2
    }
}

// K. Kato, IEEE J. Quantum Electron. QE-22, 1013 (1986).
const BBO_ORDINARY: Sellmeier = Sellmeier {
    a: 2.7359,
    b: 0.01878,
    c: 0.01822,
    d: 0.01354,
};
const BBO_EXTRAORDINARY: Sellmeier = Sellmeier {
    a: 2.3753,
    b: 0.01224,
    c: 0.01667,
    d: 0.01516,
};

impl Material {
    pub fn sellmeier(self, pol: Polarization) -> &'static Sellmeier {
        match (self, pol) {
            (Material::Bbo, Polarization::Ordinary) => &BBO_ORDINARY,
            (Material::Bbo, Polarization::Extraordinary) => &BBO_EXTRAORDINARY,
        }
    }

    /// Wavelength window (µm) over which the Sellmeier fit is declared valid.
    pub fn transparency_window_um(self) -> (f64, f64) {
        match self {
            Material::Bbo => (0.22, 1.06),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Material::Bbo => "BBO",
        }
    }
}

/// Refractive index at vacuum wavelength `wavelength_um`.
pub fn refractive_index(material: Material, pol: Polarization, wavelength_um: f64) -> Result<f64> {
    let (lo, hi) = material.transparency_window_um();
    if !(wavelength_um >= lo && wavelength_um <= hi) {
        return Err(Error::Domain(format!(
            "wavelength {:.4} µm outside the {} Sellmeier window [{lo}, {hi}] µm",
            wavelength_um,
            material.name()
        )));
    }
    Ok(material.sellmeier(pol).index_squared(wavelength_um).sqrt())
}

/// Refractive index at angular frequency `omega` (rad/fs).
#[inline]
pub fn refractive_index_at(material: Material, pol: Polarization, omega: f64) -> Result<f64> {
    refractive_index(material, pol, wavelength_um_from_omega(omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrystalConfig {
    pub material: Material,
    /// Crystal length along z, µm.
    pub length_um: f64,
    /// Angle between the optic axis and z, rad.
    pub cut_angle_rad: f64,
}

impl CrystalConfig {
    pub fn new(material: Material, length_um: f64, cut_angle_rad: f64) -> Result<Self> {
        if !(length_um > 0.0 && length_um.is_finite()) {
            return Err(Error::config("crystal.length", "must be positive"));
        }
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&cut_angle_rad) {
            return Err(Error::config("crystal.cut_angle", "must lie in [0°, 90°]"));
        }
        Ok(Self {
            material,
            length_um,
            cut_angle_rad,
        })
    }
}

/// Transverse wave vector (kx, ky) in rad/µm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TransverseK {
    pub kx: f64,
    pub ky: f64,
}

impl TransverseK {
    pub const ZERO: TransverseK = TransverseK { kx: 0.0, ky: 0.0 };

    #[inline]
    pub const fn new(kx: f64, ky: f64) -> Self {
        Self { kx, ky }
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.kx * self.kx + self.ky * self.ky
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.kx * s, self.ky * s)
    }

    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.kx * other.kx + self.ky * other.ky
    }
}

impl Add for TransverseK {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.kx + o.kx, self.ky + o.ky)
    }
}

impl Sub for TransverseK {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.kx - o.kx, self.ky - o.ky)
    }
}

impl Neg for TransverseK {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.kx, -self.ky)
    }
}

/// Side of the xz-plane towards which the signal photon is emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalSide {
    #[default]
    PlusX,
    MinusX,
}

impl SignalSide {
    fn sign(self) -> f64 {
        match self {
            SignalSide::PlusX => 1.0,
            SignalSide::MinusX => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leg {
    Signal,
    Idler,
}

/// Emission geometry: in-crystal observation angle and degenerate frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub alpha_rad: f64,
    /// Degenerate daughter frequency ω₀ (half the pump center), rad/fs.
    pub omega0: f64,
    #[serde(default)]
    pub signal_side: SignalSide,
}

impl GeometryConfig {
    pub fn new(alpha_rad: f64, omega0: f64) -> Result<Self> {
        if !(alpha_rad.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(Error::config("collection.alpha", "|alpha| must be below 90°"));
        }
        if !(omega0 > 0.0 && omega0.is_finite()) {
            return Err(Error::config("pump.center", "degenerate frequency must be positive"));
        }
        Ok(Self {
            alpha_rad,
            omega0,
            signal_side: SignalSide::PlusX,
        })
    }
}

/// Longitudinal wave number of an ordinary wave, +z root.
pub fn kz_ordinary(material: Material, k_perp: TransverseK, omega: f64) -> Result<f64> {
    let k = refractive_index_at(material, Polarization::Ordinary, omega)? * omega / SPEED_OF_LIGHT;
    let radicand = k * k - k_perp.norm_sqr();
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "evanescent ordinary wave: |k⊥| = {:.6} exceeds k = {:.6} rad/µm",
            k_perp.norm_sqr().sqrt(),
            k
        )));
    }
    Ok(radicand.sqrt())
}

/// Longitudinal wave number of an extraordinary wave with the optic axis at
/// `theta_c` from z in the xz-plane.
///
/// Solves `(k·ĉ)²/n_o² + |k − (k·ĉ)ĉ|²/n_e² = (ω/c)²` for k_z and returns the
/// forward root.
pub fn kz_extraordinary(material: Material, k_perp: TransverseK, omega: f64, theta_c: f64) -> Result<f64> {
    let n_o = refractive_index_at(material, Polarization::Ordinary, omega)?;
    let n_e = refractive_index_at(material, Polarization::Extraordinary, omega)?;
    let k0 = omega / SPEED_OF_LIGHT;
    let (s, c) = theta_c.sin_cos();
    let inv_o = 1.0 / (n_o * n_o);
    let inv_e = 1.0 / (n_e * n_e);
    let a = inv_o - inv_e;
    // quadratic A kz² + B kz + C = 0
    let qa = a * c * c + inv_e;
    let qb = 2.0 * a * k_perp.kx * s * c;
    let qc = a * k_perp.kx * k_perp.kx * s * s + inv_e * k_perp.norm_sqr() - k0 * k0;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Err(Error::Domain(format!(
            "no real extraordinary root for k⊥ = ({:.6}, {:.6}) rad/µm at ω = {:.6} rad/fs",
            k_perp.kx, k_perp.ky, omega
        )));
    }
    let root = (-qb + disc.sqrt()) / (2.0 * qa);
    if root <= 0.0 {
        return Err(Error::Domain(format!(
            "extraordinary wave does not propagate forward for k⊥ = ({:.6}, {:.6}) rad/µm",
            k_perp.kx, k_perp.ky
        )));
    }
    Ok(root)
}

/// Phase-matched transverse wave vector of one daughter photon.
///
/// The collection direction is a fixed in-crystal angle, so the magnitude
/// is `n_o(ω) ω sin α / c`; the signal points along the configured side and
/// the idler opposite to it.
pub fn central_transverse_k(material: Material, omega: f64, geometry: &GeometryConfig, leg: Leg) -> Result<TransverseK> {
    let n_o = refractive_index_at(material, Polarization::Ordinary, omega)?;
    let side = geometry.signal_side.sign();
    let sign = match leg {
        Leg::Signal => side,
        Leg::Idler => -side,
    };
    Ok(TransverseK::new(
        sign * n_o * omega * geometry.alpha_rad.sin() / SPEED_OF_LIGHT,
        0.0,
    ))
}

/// Exact phase mismatch `k_pz(k_s + k_i, ω_s + ω_i) − k_sz(k_s, ω_s) − k_iz(k_i, ω_i)`.
pub fn delta_kz(crystal: &CrystalConfig, k_s: TransverseK, omega_s: f64, k_i: TransverseK, omega_i: f64) -> Result<f64> {
    let m = crystal.material;
    let kp = kz_extraordinary(m, k_s + k_i, omega_s + omega_i, crystal.cut_angle_rad)?;
    let ks = kz_ordinary(m, k_s, omega_s)?;
    let ki = kz_ordinary(m, k_i, omega_i)?;
    Ok(kp - ks - ki)
}

/// Phase mismatch at the central transverse vectors for the given frequencies.
pub fn delta_kz_central(crystal: &CrystalConfig, geometry: &GeometryConfig, omega_s: f64, omega_i: f64) -> Result<f64> {
    let ks0 = central_transverse_k(crystal.material, omega_s, geometry, Leg::Signal)?;
    let ki0 = central_transverse_k(crystal.material, omega_i, geometry, Leg::Idler)?;
    delta_kz(crystal, ks0, omega_s, ki0, omega_i)
}

const ANGLE_SCAN_STEP_DEG: f64 = 0.01;
const ANGLE_SCAN_MAX_DEG: f64 = 10.0;

/// Observation angle α (rad) at which degenerate photons of frequency
/// `omega0` are perfectly phase matched.
///
/// Pre-scans (0°, 10°] in 0.01° steps for the first sign change of Δk_z and
/// refines it by bisection.
pub fn solve_phase_matching_angle(crystal: &CrystalConfig, omega0: f64) -> Result<f64> {
    let mismatch = |alpha: f64| -> Result<f64> {
        let geometry = GeometryConfig {
            alpha_rad: alpha,
            omega0,
            signal_side: SignalSide::PlusX,
        };
        delta_kz_central(crystal, &geometry, omega0, omega0)
    };
    let steps = (ANGLE_SCAN_MAX_DEG / ANGLE_SCAN_STEP_DEG).round() as usize;
    let mut lo = ANGLE_SCAN_STEP_DEG.to_radians();
    let mut f_lo = mismatch(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    for k in 2..=steps {
        let hi = (k as f64 * ANGLE_SCAN_STEP_DEG).to_radians();
        let f_hi = mismatch(hi)?;
        if f_hi == 0.0 {
            return Ok(hi);
        }
        if f_lo.signum() != f_hi.signum() {
            let (mut a, mut b, mut fa) = (lo, hi, f_lo);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = mismatch(mid)?;
                if fm == 0.0 || (b - a) < 1e-15 {
                    return Ok(mid);
                }
                if fm.signum() == fa.signum() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        lo = hi;
        f_lo = f_hi;
    }
    Err(Error::NoBracket(format!(
        "Δk_z has no sign change for α in ({ANGLE_SCAN_STEP_DEG}°, {ANGLE_SCAN_MAX_DEG}°] \
         ({} θ_c = {:.3}°, λ₀ = {:.2} nm)",
        crystal.material.name(),
        crystal.cut_angle_rad.to_degrees(),
        wavelength_um_from_omega(omega0) * 1e3
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::omega_from_wavelength_nm;

    fn bbo30() -> CrystalConfig {
        CrystalConfig::new(Material::Bbo, 1000.0, 30f64.to_radians()).unwrap()
    }

    #[test]
    fn sellmeier_reference_values() {
        // Hand evaluation of the Kato polynomials.
        let n_o = refractive_index(Material::Bbo, Polarization::Ordinary, 0.8).unwrap();
        let n_e = refractive_index(Material::Bbo, Polarization::Extraordinary, 0.4).unwrap();
        assert!((n_o - 1.660_553_524_880_645).abs() < 1e-12);
        assert!((n_e - 1.567_887_666_518_791).abs() < 1e-12);
        assert!((n_o - 1.6614).abs() < 1e-3);
        assert!((n_e - 1.5679).abs() < 1e-3);
        let n_o_uv = refractive_index(Material::Bbo, Polarization::Ordinary, 0.4).unwrap();
        assert!((n_o_uv - 1.692_983_265_980_866).abs() < 1e-12);
        assert!(n_o_uv > n_o);
    }

    #[test]
    fn out_of_window_is_rejected() {
        let err = refractive_index(Material::Bbo, Polarization::Ordinary, 2.0).unwrap_err();
        match err {
            Error::Domain(msg) => assert!(msg.contains("[0.22, 1.06]"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ordinary_kz_closed_forms() {
        let w = omega_from_wavelength_nm(800.0);
        let k = refractive_index_at(Material::Bbo, Polarization::Ordinary, w).unwrap() * w / SPEED_OF_LIGHT;
        let on_axis = kz_ordinary(Material::Bbo, TransverseK::ZERO, w).unwrap();
        assert!((on_axis - k).abs() < 1e-12 * k);
        let grazing = kz_ordinary(Material::Bbo, TransverseK::new(k, 0.0), w).unwrap();
        assert!(grazing.abs() < 1e-6);
        let half = kz_ordinary(Material::Bbo, TransverseK::new(k / 2f64.sqrt(), 0.0), w).unwrap();
        assert!((half - k / 2f64.sqrt()).abs() < 1e-12 * k);
        assert!(kz_ordinary(Material::Bbo, TransverseK::new(k * 1.001, 0.0), w).is_err());
    }

    #[test]
    fn extraordinary_kz_limits() {
        let w = omega_from_wavelength_nm(400.0);
        let n_o = refractive_index_at(Material::Bbo, Polarization::Ordinary, w).unwrap();
        let n_e = refractive_index_at(Material::Bbo, Polarization::Extraordinary, w).unwrap();
        let k0 = w / SPEED_OF_LIGHT;
        let along = kz_extraordinary(Material::Bbo, TransverseK::ZERO, w, 0.0).unwrap();
        assert!((along - n_o * k0).abs() < 1e-12 * along);
        let normal = kz_extraordinary(Material::Bbo, TransverseK::ZERO, w, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((normal - n_e * k0).abs() < 1e-12 * normal);
        // index ellipsoid at 30°, evaluated by hand: n(30°, 400 nm) = 1.658923127845143
        let tilted = kz_extraordinary(Material::Bbo, TransverseK::ZERO, w, 30f64.to_radians()).unwrap();
        assert!((tilted / k0 - 1.658_923_127_845_143).abs() < 1e-12);
    }

    #[test]
    fn extraordinary_matches_brute_force_dispersion_relation() {
        let w = omega_from_wavelength_nm(400.0);
        let theta: f64 = 30f64.to_radians();
        let kp = TransverseK::new(0.3, -0.2);
        let kz = kz_extraordinary(Material::Bbo, kp, w, theta).unwrap();
        let n_o = refractive_index_at(Material::Bbo, Polarization::Ordinary, w).unwrap();
        let n_e = refractive_index_at(Material::Bbo, Polarization::Extraordinary, w).unwrap();
        let axis = [theta.sin(), 0.0, theta.cos()];
        let k = [kp.kx, kp.ky, kz];
        let kc = k[0] * axis[0] + k[2] * axis[2];
        let perp2 = k.iter().map(|x| x * x).sum::<f64>() - kc * kc;
        let lhs = kc * kc / (n_o * n_o) + perp2 / (n_e * n_e);
        let rhs = (w / SPEED_OF_LIGHT).powi(2);
        assert!((lhs - rhs).abs() < 1e-12 * rhs);
    }

    #[test]
    fn central_vectors() {
        let w = omega_from_wavelength_nm(800.0);
        let collinear = GeometryConfig::new(0.0, w).unwrap();
        let ki = central_transverse_k(Material::Bbo, w, &collinear, Leg::Idler).unwrap();
        assert_eq!(ki.norm_sqr(), 0.0);
        let g = GeometryConfig::new(3f64.to_radians(), w).unwrap();
        let ks = central_transverse_k(Material::Bbo, w, &g, Leg::Signal).unwrap();
        let ki = central_transverse_k(Material::Bbo, w, &g, Leg::Idler).unwrap();
        assert_eq!(ks.ky, 0.0);
        assert!(ki.kx < 0.0 && ks.kx > 0.0);
        assert_eq!((ks + ki).norm_sqr(), 0.0);
        let n_o = refractive_index_at(Material::Bbo, Polarization::Ordinary, w).unwrap();
        assert!((ki.kx + n_o * w * 3f64.to_radians().sin() / SPEED_OF_LIGHT).abs() < 1e-14);
    }

    #[test]
    fn phase_matching_angle_bbo() {
        let w0 = omega_from_wavelength_nm(800.0);
        let alpha = solve_phase_matching_angle(&bbo30(), w0).unwrap();
        // arccos(n(30°, 400 nm) / n_o(800 nm)) by hand
        assert!((alpha.to_degrees() - 2.539_179_596_555).abs() < 1e-9);
        assert!((alpha.to_degrees() - 2.2).abs() <= 0.5);
        let g = GeometryConfig::new(alpha, w0).unwrap();
        assert!(delta_kz_central(&bbo30(), &g, w0, w0).unwrap().abs() < 1e-9);
    }

    #[test]
    fn detuned_mismatch_matches_hand_sum() {
        let w0 = omega_from_wavelength_nm(800.0);
        let alpha = solve_phase_matching_angle(&bbo30(), w0).unwrap() + 1f64.to_radians();
        let g = GeometryConfig::new(alpha, w0).unwrap();
        let got = delta_kz_central(&bbo30(), &g, w0, w0).unwrap();
        // k_p − 2 √(k_o² − k_o² sin²α), computed independently
        assert!((got - 0.024_136_520_740_203).abs() < 1e-10, "{got}");
    }

    #[test]
    fn no_bracket_reports_interval() {
        let crystal = CrystalConfig::new(Material::Bbo, 1000.0, 20f64.to_radians()).unwrap();
        let err = solve_phase_matching_angle(&crystal, omega_from_wavelength_nm(800.0)).unwrap_err();
        match err {
            Error::NoBracket(msg) => assert!(msg.contains("10°"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(CrystalConfig::new(Material::Bbo, 0.0, 0.5).is_err());
        assert!(CrystalConfig::new(Material::Bbo, 10.0, 2.0).is_err());
        assert!(GeometryConfig::new(2.0, 1.0).is_err());
        assert!(GeometryConfig::new(0.1, -1.0).is_err());
    }
}
