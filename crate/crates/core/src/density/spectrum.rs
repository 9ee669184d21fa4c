//! Pump spectral amplitude and the Gaussian interference-filter model.

use std::f64::consts::{LN_2, PI};
use std::io::Read;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{omega_from_wavelength_nm, omega_width_from_nm};

/// Sampled complex pump amplitude, linearly interpolated in ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedSpectrum {
    /// Strictly ascending angular frequencies, rad/fs.
    omegas: Vec<f64>,
    amplitudes: Vec<Complex64>,
}

impl TabulatedSpectrum {
    pub fn new(mut samples: Vec<(f64, Complex64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::config("pump.spectrum_file", "need at least two samples"));
        }
        if samples.iter().any(|(w, a)| !w.is_finite() || !a.is_finite()) {
            return Err(Error::config("pump.spectrum_file", "non-finite sample"));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        if samples.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(Error::config("pump.spectrum_file", "duplicate wavelength"));
        }
        let (omegas, amplitudes) = samples.into_iter().unzip();
        Ok(Self { omegas, amplitudes })
    }

    /// Reads CSV with header `wavelength_nm,re_amplitude,im_amplitude`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::config("pump.spectrum_file", e.to_string()))?
            .clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::config("pump.spectrum_file", format!("missing column `{name}`")))
        };
        let (cl, cr, ci) = (col("wavelength_nm")?, col("re_amplitude")?, col("im_amplitude")?);
        let mut samples = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::config("pump.spectrum_file", e.to_string()))?;
            let num = |c: usize| -> Result<f64> {
                rec.get(c)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::config("pump.spectrum_file", format!("bad number on data row {}", line + 1)))
            };
            let lambda = num(cl)?;
            if !(lambda > 0.0) {
                return Err(Error::config("pump.spectrum_file", "wavelengths must be positive"));
            }
            samples.push((omega_from_wavelength_nm(lambda), Complex64::new(num(cr)?, num(ci)?)));
        }
        Self::new(samples)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::config("pump.spectrum_file", format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(f)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.omegas[0], *self.omegas.last().expect("non-empty"))
    }

    pub fn amplitude(&self, omega: f64) -> Result<Complex64> {
        let (lo, hi) = self.support();
        if !(omega >= lo && omega <= hi) {
            return Err(Error::Domain(format!(
                "ω = {omega:.6} rad/fs outside tabulated pump support [{lo:.6}, {hi:.6}]"
            )));
        }
        let idx = self.omegas.partition_point(|&w| w <= omega).clamp(1, self.omegas.len() - 1);
        let (w0, w1) = (self.omegas[idx - 1], self.omegas[idx]);
        let t = (omega - w0) / (w1 - w0);
        Ok(self.amplitudes[idx - 1] * (1.0 - t) + self.amplitudes[idx] * t)
    }

    /// Power-weighted mean frequency.
    pub fn centroid(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 1..self.omegas.len() {
            let dw = self.omegas[k] - self.omegas[k - 1];
            let p0 = self.amplitudes[k - 1].norm_sqr();
            let p1 = self.amplitudes[k].norm_sqr();
            num += 0.5 * dw * (p0 * self.omegas[k - 1] + p1 * self.omegas[k]);
            den += 0.5 * dw * (p0 + p1);
        }
        if den > 0.0 {
            num / den
        } else {
            0.5 * (self.omegas[0] + self.omegas[self.omegas.len() - 1])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PumpSpectrum {
    /// Transform-limited Gaussian pulse of duration `duration_fs` centered at
    /// `omega_center` (= 2ω₀).
    Gaussian { duration_fs: f64, omega_center: f64 },
    Tabulated(TabulatedSpectrum),
}

impl PumpSpectrum {
    pub fn gaussian(duration_fs: f64, omega_center: f64) -> Result<Self> {
        if !(duration_fs > 0.0 && duration_fs.is_finite()) {
            return Err(Error::config("pump.duration_fs", "must be positive"));
        }
        if !(omega_center > 0.0 && omega_center.is_finite()) {
            return Err(Error::config("pump.center_nm", "must be positive"));
        }
        Ok(PumpSpectrum::Gaussian {
            duration_fs,
            omega_center,
        })
    }

    pub fn center(&self) -> f64 {
        match self {
            PumpSpectrum::Gaussian { omega_center, .. } => *omega_center,
            PumpSpectrum::Tabulated(t) => t.centroid(),
        }
    }

    /// True when every amplitude is real, so the density matrix is real too.
    pub fn is_real(&self) -> bool {
        match self {
            PumpSpectrum::Gaussian { .. } => true,
            PumpSpectrum::Tabulated(t) => t.amplitudes.iter().all(|a| a.im == 0.0),
        }
    }
}

/// Pump spectral amplitude `A_sp(ω)`.
///
/// The Gaussian branch is `(√τ/π^¼) exp(−τ²(ω − 2ω₀)²/2)`, normalized so
/// that ∫|A_sp|² dω = 1.
pub fn pump_amplitude(spectrum: &PumpSpectrum, omega: f64) -> Result<Complex64> {
    match spectrum {
        PumpSpectrum::Gaussian {
            duration_fs,
            omega_center,
        } => {
            let d = omega - omega_center;
            let peak = duration_fs.sqrt() / PI.powf(0.25);
            Ok(Complex64::new(peak * (-0.5 * duration_fs * duration_fs * d * d).exp(), 0.0))
        }
        PumpSpectrum::Tabulated(t) => t.amplitude(omega),
    }
}

/// Gaussian amplitude transmission `Λ(ω) = exp(−2 ln2 (ω − ω_c)²/σ²)`;
/// `σ` is the FWHM of the intensity transmission |Λ|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralFilter {
    /// Intensity FWHM, rad/fs.
    pub fwhm: f64,
    pub omega_center: f64,
}

impl SpectralFilter {
    pub fn new(fwhm: f64, omega_center: f64) -> Result<Self> {
        if !(fwhm > 0.0 && fwhm.is_finite()) {
            return Err(Error::config("filter.fwhm_nm", "must be positive"));
        }
        if !(omega_center > 0.0 && omega_center.is_finite()) {
            return Err(Error::config("filter.center_nm", "must be positive"));
        }
        Ok(Self { fwhm, omega_center })
    }

    /// Filter specified in wavelength; the width is converted at the center.
    pub fn from_nm(fwhm_nm: f64, center_nm: f64) -> Result<Self> {
        if !(center_nm > 0.0) {
            return Err(Error::config("filter.center_nm", "must be positive"));
        }
        Self::new(omega_width_from_nm(fwhm_nm, center_nm), omega_from_wavelength_nm(center_nm))
    }

    #[inline]
    pub fn transmission(&self, omega: f64) -> f64 {
        let d = omega - self.omega_center;
        (-2.0 * LN_2 * d * d / (self.fwhm * self.fwhm)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre_on;

    #[test]
    fn gaussian_peak_and_width() {
        let tau = 100.0;
        let wc = 4.7;
        let p = PumpSpectrum::gaussian(tau, wc).unwrap();
        let peak = pump_amplitude(&p, wc).unwrap();
        assert_eq!(peak.re, tau.sqrt() / PI.powf(0.25));
        for s in [-1.0, 1.0] {
            let a = pump_amplitude(&p, wc + s / tau).unwrap();
            assert!((a.re - peak.re * (-0.5f64).exp()).abs() < 1e-12 * peak.re);
        }
    }

    #[test]
    fn gaussian_is_power_normalized() {
        let tau = 100.0;
        let wc = 4.7;
        let p = PumpSpectrum::gaussian(tau, wc).unwrap();
        let rule = gauss_legendre_on(200, wc - 12.0 / tau, wc + 12.0 / tau);
        let total: f64 = rule.iter().map(|(w, wt)| wt * pump_amplitude(&p, w).unwrap().norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn tabulated_interpolates_and_rejects_outside() {
        let csv = "wavelength_nm,re_amplitude,im_amplitude\n399,0.0,0.0\n400,1.0,0.5\n401,0.0,0.0\n";
        let t = TabulatedSpectrum::from_csv_reader(csv.as_bytes()).unwrap();
        let w400 = omega_from_wavelength_nm(400.0);
        let a = t.amplitude(w400).unwrap();
        assert!((a - Complex64::new(1.0, 0.5)).norm() < 1e-12);
        let (lo, hi) = t.support();
        let mid = 0.5 * (w400 + hi);
        assert!((t.amplitude(mid).unwrap() - Complex64::new(0.5, 0.25)).norm() < 1e-12);
        assert!(t.amplitude(lo - 1e-6).is_err());
        assert!(!PumpSpectrum::Tabulated(t).is_real());
    }

    #[test]
    fn tabulated_missing_column() {
        let csv = "wavelength_nm,re\n400,1\n401,2\n";
        assert!(matches!(
            TabulatedSpectrum::from_csv_reader(csv.as_bytes()),
            Err(Error::InvalidConfig { .. })
        ));
    }

    #[test]
    fn filter_center_and_half_power_points() {
        let f = SpectralFilter::from_nm(20.0, 800.0).unwrap();
        assert_eq!(f.transmission(f.omega_center), 1.0);
        for s in [-0.5, 0.5] {
            let t = f.transmission(f.omega_center + s * f.fwhm);
            assert!((t * t - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn filter_composition() {
        let f = SpectralFilter::new(0.06, 2.35).unwrap();
        let g = SpectralFilter::new(0.06 / 2f64.sqrt(), 2.35).unwrap();
        for k in -20..=20 {
            let w = 2.35 + 0.01 * k as f64;
            let lhs = f.transmission(w) * f.transmission(w);
            assert!((lhs - g.transmission(w)).abs() < 1e-12);
        }
    }
}
