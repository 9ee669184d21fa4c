//! Sampled spectral density matrices and their diagnostics.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{omega_from_wavelength_nm, wavelength_nm_from_omega};

/// Idler-frequency sample points with quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub omegas: Vec<f64>,
    pub weights: Vec<f64>,
}

impl FrequencyGrid {
    /// `points` samples equally spaced in ω between the frequencies of
    /// `lambda_max_nm` and `lambda_min_nm`, ascending in ω.
    pub fn from_wavelength_range(lambda_min_nm: f64, lambda_max_nm: f64, points: usize) -> Result<Self> {
        if !(lambda_min_nm > 0.0 && lambda_max_nm > lambda_min_nm) {
            return Err(Error::config("grid", "need 0 < lambda_min_nm < lambda_max_nm"));
        }
        if points < 1 {
            return Err(Error::config("grid.points", "must be at least 1"));
        }
        let lo = omega_from_wavelength_nm(lambda_max_nm);
        let hi = omega_from_wavelength_nm(lambda_min_nm);
        Ok(Self::uniform(lo, hi, points))
    }

    pub fn uniform(lo: f64, hi: f64, points: usize) -> Self {
        if points == 1 {
            return Self {
                omegas: vec![0.5 * (lo + hi)],
                weights: vec![1.0],
            };
        }
        let step = (hi - lo) / (points - 1) as f64;
        Self {
            omegas: (0..points).map(|j| lo + step * j as f64).collect(),
            weights: vec![step; points],
        }
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn wavelengths_nm(&self) -> Vec<f64> {
        self.omegas.iter().map(|&w| wavelength_nm_from_omega(w)).collect()
    }
}

/// ρ[j, k] = ρ(ω_j, ω_k) on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub grid: FrequencyGrid,
    pub values: DMatrix<Complex64>,
    pub normalized: bool,
}

/// Eigen-decomposition of ρ as an integral operator on the grid.
#[derive(Debug, Clone)]
pub struct Eigenmodes {
    /// Descending.
    pub values: Vec<f64>,
    /// Column k is mode k sampled on the grid, with Σ_j w_j |φ_j|² = 1.
    pub modes: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(grid: FrequencyGrid, values: DMatrix<Complex64>) -> Result<Self> {
        let n = grid.len();
        if values.nrows() != n || values.ncols() != n {
            return Err(Error::GridMismatch(format!(
                "matrix is {}×{} but grid has {n} points",
                values.nrows(),
                values.ncols()
            )));
        }
        Ok(Self {
            grid,
            values,
            normalized: false,
        })
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    /// Quadrature-weighted diagonal sum.
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.grid.weights[j] * self.values[(j, j)].re).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.map(|v| v * factor),
            normalized: false,
        }
    }

    /// Rescales to unit trace.
    pub fn normalize(&self) -> Result<Self> {
        let t = self.trace();
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidState(format!("cannot normalize: trace = {t}")));
        }
        let mut out = self.scaled(1.0 / t);
        out.normalized = true;
        Ok(out)
    }

    /// Tr ρ² under the grid weights.
    pub fn purity(&self) -> Result<f64> {
        if !self.normalized {
            return Err(Error::Contract("purity needs a normalized density matrix".into()));
        }
        let n = self.dim();
        let w = &self.grid.weights;
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                acc += w[j] * w[k] * (self.values[(j, k)] * self.values[(k, j)]).re;
            }
        }
        Ok(acc)
    }

    /// Eigenvalues and modes of the weighted operator `W^½ ρ W^½`.
    pub fn eigenmodes(&self) -> Eigenmodes {
        let n = self.dim();
        let sw: Vec<f64> = self.grid.weights.iter().map(|w| w.sqrt()).collect();
        let b = DMatrix::from_fn(n, n, |j, k| {
            let avg = 0.5 * (self.values[(j, k)] + self.values[(k, j)].conj());
            avg * (sw[j] * sw[k])
        });
        let eig = SymmetricEigen::new(b);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let modes = DMatrix::from_fn(n, n, |j, c| eig.eigenvectors[(j, order[c])] / sw[j]);
        Eigenmodes { values, modes }
    }

    /// Diagonal of ρ.
    pub fn marginal_spectrum(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.values[(j, j)].re).collect()
    }

    /// `max |ρ_jk − conj ρ_kj| / max |ρ_jk|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((self.values[(j, k)] - self.values[(k, j)].conj()).norm());
            }
        }
        worst / self.max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// `max |Im ρ| / max |Re ρ|`.
    pub fn imaginary_ratio(&self) -> f64 {
        let im = self.values.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
        let re = self.values.iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
        im / re
    }

    /// Frobenius norm with the grid weights (`√Σ w_j w_k |ρ_jk|²`).
    pub fn weighted_frobenius(&self) -> f64 {
        let w = &self.grid.weights;
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for k in 0..n {
                acc += w[j] * w[k] * self.values[(j, k)].norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Intensity FWHM of the marginal spectrum in nm, from linear
    /// interpolation of the half-maximum crossings around the peak. `None`
    /// when the spectrum does not fall below half maximum on both sides.
    pub fn marginal_fwhm_nm(&self) -> Option<f64> {
        let s = self.marginal_spectrum();
        let w = &self.grid.omegas;
        let (peak_idx, peak) = s.iter().copied().enumerate().max_by(|a, b| a.1.total_cmp(&b.1))?;
        if !(peak > 0.0) {
            return None;
        }
        let half = 0.5 * peak;
        let cross = |a: usize, b: usize| w[a] + (half - s[a]) / (s[b] - s[a]) * (w[b] - w[a]);
        let mut left = None;
        for j in (0..peak_idx).rev() {
            if s[j] < half {
                left = Some(cross(j, j + 1));
                break;
            }
        }
        let mut right = None;
        for j in (peak_idx + 1)..s.len() {
            if s[j] < half {
                right = Some(cross(j - 1, j));
                break;
            }
        }
        let (l, r) = (left?, right?);
        Some((wavelength_nm_from_omega(l) - wavelength_nm_from_omega(r)).abs())
    }

    /// Marginal-weighted mean wavelength, nm.
    pub fn marginal_center_nm(&self) -> f64 {
        let s = self.marginal_spectrum();
        let lam = self.grid.wavelengths_nm();
        let total: f64 = s.iter().zip(&self.grid.weights).map(|(a, w)| a * w).sum();
        s.iter()
            .zip(&self.grid.weights)
            .zip(&lam)
            .map(|((a, w), l)| a * w * l)
            .sum::<f64>()
            / total
    }

    /// Sub-matrix on every `stride`-th grid node.
    pub fn restrict(&self, stride: usize) -> Self {
        let idx: Vec<usize> = (0..self.dim()).step_by(stride.max(1)).collect();
        let grid = FrequencyGrid {
            omegas: idx.iter().map(|&j| self.grid.omegas[j]).collect(),
            weights: idx.iter().map(|&j| self.grid.weights[j] * stride as f64).collect(),
        };
        let values = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.values[(idx[a], idx[b])]);
        Self {
            grid,
            values,
            normalized: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> FrequencyGrid {
        FrequencyGrid::uniform(2.2, 2.5, n)
    }

    #[test]
    fn grid_from_wavelengths_is_ascending_in_omega() {
        let g = FrequencyGrid::from_wavelength_range(770.0, 830.0, 5).unwrap();
        assert!(g.omegas.windows(2).all(|p| p[0] < p[1]));
        let lam = g.wavelengths_nm();
        assert!((lam[0] - 830.0).abs() < 1e-9 && (lam[4] - 770.0).abs() < 1e-9);
        assert!(FrequencyGrid::from_wavelength_range(830.0, 770.0, 5).is_err());
    }

    #[test]
    fn pure_state_has_unit_purity() {
        let g = grid(16);
        let phi: Vec<Complex64> = g
            .omegas
            .iter()
            .map(|w| Complex64::from_polar((-((w - 2.35) / 0.05).powi(2)).exp(), 7.0 * w))
            .collect();
        let values = DMatrix::from_fn(16, 16, |j, k| phi[j] * phi[k].conj());
        let rho = DensityMatrix::new(g, values).unwrap().normalize().unwrap();
        assert!((rho.purity().unwrap() - 1.0).abs() < 1e-10);
        let modes = rho.eigenmodes();
        assert!((modes.values[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn maximally_mixed_purity() {
        let n = 10;
        let g = FrequencyGrid {
            omegas: (0..n).map(|j| j as f64).collect(),
            weights: vec![1.0; n],
        };
        let values = DMatrix::from_fn(n, n, |j, k| if j == k { Complex64::new(1.0 / n as f64, 0.0) } else { Complex64::new(0.0, 0.0) });
        let rho = DensityMatrix::new(g, values).unwrap().normalize().unwrap();
        assert!((rho.purity().unwrap() - 0.1).abs() < 1e-14);
    }

    #[test]
    fn purity_requires_normalization() {
        let rho = DensityMatrix::new(grid(2), DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(rho.purity(), Err(Error::Contract(_))));
    }

    #[test]
    fn normalize_is_idempotent_and_scale_free() {
        let g = grid(4);
        let values = DMatrix::from_fn(4, 4, |j, k| Complex64::new(1.0 / (1.0 + (j as f64 - k as f64).abs()), 0.0));
        let rho = DensityMatrix::new(g, values).unwrap();
        let a = rho.normalize().unwrap();
        let b = a.normalize().unwrap();
        let c = rho.scaled(7.0).normalize().unwrap();
        assert!((a.trace() - 1.0).abs() < 1e-12);
        assert!((&a.values - &b.values).norm() < 1e-14);
        assert!((&a.values - &c.values).norm() < 1e-14);
        assert!(rho.scaled(0.0).normalize().is_err());
        assert!(rho.scaled(-1.0).normalize().is_err());
    }

    #[test]
    fn eigenmodes_reconstruct() {
        let g = grid(12);
        let values = DMatrix::from_fn(12, 12, |j, k| {
            let d = j as f64 - k as f64;
            Complex64::from_polar((-(d * d) / 8.0).exp(), 0.1 * d)
        });
        let rho = DensityMatrix::new(g.clone(), values).unwrap().normalize().unwrap();
        let e = rho.eigenmodes();
        assert!(e.values.windows(2).all(|p| p[0] >= p[1]));
        let sum: f64 = e.values.iter().sum();
        assert!((sum - rho.trace()).abs() < 1e-12);
        let n = 12;
        let mut rec = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for (m, lam) in e.values.iter().enumerate() {
            for j in 0..n {
                for k in 0..n {
                    rec[(j, k)] += e.modes[(j, m)] * e.modes[(k, m)].conj() * *lam;
                }
            }
        }
        assert!((&rec - &rho.values).norm() / rho.values.norm() < 1e-10);
    }

    #[test]
    fn marginal_fwhm_of_gaussian() {
        // |ψ|² Gaussian in ω with FWHM 0.05 rad/fs
        let g = FrequencyGrid::uniform(2.2, 2.5, 601);
        let c = 2.35;
        let fw = 0.05;
        let values = DMatrix::from_fn(601, 601, |j, k| {
            if j == k {
                Complex64::new((-4.0 * std::f64::consts::LN_2 * ((g.omegas[j] - c) / fw).powi(2)).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let rho = DensityMatrix::new(g, values).unwrap();
        let expected = wavelength_nm_from_omega(c - fw / 2.0) - wavelength_nm_from_omega(c + fw / 2.0);
        assert!((rho.marginal_fwhm_nm().unwrap() - expected).abs() < 1e-2);
    }
}
