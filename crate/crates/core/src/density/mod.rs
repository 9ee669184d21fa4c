//! Outer quadratures of the reduced density matrix over the signal
//! frequency and the two crystal positions, plus filtering and
//! normalization.
//!
//! ```text
//! ρ(ω_i, ω_i′) = ∫dω_s A*(ω_s+ω_i) A(ω_s+ω_i′) ∫∫dz dz′ G(ω_s, ω_i, ω_i′, z, z′)
//! ```
//!
//! where G is the transverse Gaussian integral from [`crate::kernel`].
//! Each matrix entry is an independent fixed-order sum, so the result does
//! not depend on how entries are scheduled across threads.

mod matrix;
mod spectrum;

pub use matrix::{DensityMatrix, Eigenmodes, FrequencyGrid};
pub use spectrum::{pump_amplitude, PumpSpectrum, SpectralFilter, TabulatedSpectrum};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{assemble_m, gaussian_integral_with, RealPart};
use crate::paraxial::{expand_delta_kz, ParaxialExpansion};
use crate::quadrature::{gauss_legendre_on, Rule};
use crate::source::SourceConfig;

/// Half-width, in units of 1/τ_p, needed to hold 99.99 % of the power of the
/// Gaussian pump product |A(ω_s+ω_i) A(ω_s+ω_i′)|.
pub const MIN_WINDOW: f64 = 2.76;

/// Node counts for the z, z′ and ω_s integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub n_z: usize,
    pub n_z_prime: usize,
    pub n_omega_s: usize,
    /// ω_s half-window in units of 1/τ_p (Gaussian pump only).
    pub window: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            n_z: 24,
            n_z_prime: 24,
            n_omega_s: 24,
            window: 5.0,
        }
    }
}

impl QuadratureSpec {
    pub fn new(n_z: usize, n_z_prime: usize, n_omega_s: usize) -> Result<Self> {
        let q = Self {
            n_z,
            n_z_prime,
            n_omega_s,
            window: 5.0,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("quadrature.nz", self.n_z), ("quadrature.nzp", self.n_z_prime), ("quadrature.nws", self.n_omega_s)] {
            if n < 4 {
                return Err(Error::config(name, "node counts must be at least 4"));
            }
        }
        if !(self.window >= MIN_WINDOW) {
            return Err(Error::config(
                "quadrature.window",
                format!("ω_s window must be at least {MIN_WINDOW}/τ_p to cover 99.99% of the pump power"),
            ));
        }
        Ok(())
    }

    /// Every node count doubled.
    pub fn doubled(&self) -> Self {
        Self {
            n_z: 2 * self.n_z,
            n_z_prime: 2 * self.n_z_prime,
            n_omega_s: 2 * self.n_omega_s,
            window: self.window,
        }
    }
}

/// Gauss–Legendre nodes for the ω_s integral of entry (ω_i, ω_i′).
///
/// For a Gaussian pump the window is centered where the product
/// A*(ω_s+ω_i) A(ω_s+ω_i′) peaks, `ω_p − (ω_i+ω_i′)/2`. For a tabulated
/// pump it is the range over which both factors are inside the support;
/// `None` if that range is empty.
pub fn omega_s_rule(pump: &PumpSpectrum, omega_i: f64, omega_i_prime: f64, quad: &QuadratureSpec) -> Option<Rule> {
    match pump {
        PumpSpectrum::Gaussian {
            duration_fs,
            omega_center,
        } => {
            let c = omega_center - 0.5 * (omega_i + omega_i_prime);
            let half = quad.window / duration_fs;
            Some(gauss_legendre_on(quad.n_omega_s, c - half, c + half))
        }
        PumpSpectrum::Tabulated(t) => {
            let (lo, hi) = t.support();
            let a = (lo - omega_i).max(lo - omega_i_prime);
            let b = (hi - omega_i).min(hi - omega_i_prime);
            (b > a).then(|| gauss_legendre_on(quad.n_omega_s, a, b))
        }
    }
}

/// Shared, read-only state for evaluating matrix entries.
pub struct EntryEvaluator<'a> {
    config: &'a SourceConfig,
    quad: QuadratureSpec,
    real: RealPart,
    z_rule: Rule,
    zp_rule: Rule,
}

impl<'a> EntryEvaluator<'a> {
    pub fn new(config: &'a SourceConfig, quad: &QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        let real = RealPart::of(&config.beams.geometric_matrix()).ok_or_else(|| Error::Integrability {
            node: "all nodes".into(),
            reason: "geometric matrix is not positive definite".into(),
        })?;
        let half = 0.5 * config.crystal.length_um;
        Ok(Self {
            config,
            quad: *quad,
            real,
            z_rule: gauss_legendre_on(quad.n_z, -half, half),
            zp_rule: gauss_legendre_on(quad.n_z_prime, -half, half),
        })
    }

    /// ρ(ω_i, ω_i′) before filtering and normalization.
    pub fn entry(&self, omega_i: f64, omega_i_prime: f64) -> Result<Complex64> {
        let cfg = self.config;
        let Some(ws_rule) = omega_s_rule(&cfg.pump, omega_i, omega_i_prime, &self.quad) else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        // Expansions depend only on the frequencies, so they are computed
        // once per ω_s node and reused across all (z, z′) nodes.
        let mut expansions: Vec<(f64, Complex64, ParaxialExpansion, ParaxialExpansion)> = Vec::with_capacity(ws_rule.len());
        for (ws, wt) in ws_rule.iter() {
            let amp = pump_amplitude(&cfg.pump, ws + omega_i)?.conj() * pump_amplitude(&cfg.pump, ws + omega_i_prime)?;
            if amp == Complex64::new(0.0, 0.0) {
                continue;
            }
            let e = expand_delta_kz(ws, omega_i, &cfg.crystal, &cfg.geometry)?;
            let ep = if omega_i_prime == omega_i {
                e.clone()
            } else {
                expand_delta_kz(ws, omega_i_prime, &cfg.crystal, &cfg.geometry)?
            };
            expansions.push((wt, amp, e, ep));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (wt, amp, e, ep) in &expansions {
            let mut inner = Complex64::new(0.0, 0.0);
            for (z, wz) in self.z_rule.iter() {
                let mut row = Complex64::new(0.0, 0.0);
                for (zp, wzp) in self.zp_rule.iter() {
                    let m = assemble_m(e, ep, z, zp, &cfg.beams)?;
                    row += gaussian_integral_with(&m, &self.real)? * wzp;
                }
                inner += row * wz;
            }
            total += inner * amp * *wt;
        }
        Ok(total)
    }
}

/// Unnormalized, unfiltered ρ on `grid`.
///
/// Only the upper triangle is evaluated; the lower one is its conjugate
/// mirror. Entries are distributed over the current rayon pool.
pub fn compute_density_matrix(config: &SourceConfig, grid: &FrequencyGrid, quad: &QuadratureSpec) -> Result<DensityMatrix> {
    let eval = EntryEvaluator::new(config, quad)?;
    let n = grid.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let values: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(j, k)| eval.entry(grid.omegas[j], grid.omegas[k]))
        .collect::<Result<_>>()?;
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (&(j, k), v) in pairs.iter().zip(values) {
        if j == k {
            m[(j, j)] = Complex64::new(v.re, 0.0);
        } else {
            m[(j, k)] = v;
            m[(k, j)] = v.conj();
        }
    }
    DensityMatrix::new(grid.clone(), m)
}

/// `ρ(ω, ω′) → Λ(ω) Λ(ω′) ρ(ω, ω′)`; the result is marked unnormalized.
pub fn apply_filter(rho: &DensityMatrix, filter: &SpectralFilter) -> DensityMatrix {
    let t: Vec<f64> = rho.grid.omegas.iter().map(|&w| filter.transmission(w)).collect();
    let n = rho.dim();
    DensityMatrix {
        grid: rho.grid.clone(),
        values: DMatrix::from_fn(n, n, |j, k| rho.values[(j, k)] * (t[j] * t[k])),
        normalized: false,
    }
}

/// Scalar diagnostics of one pipeline run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Weighted trace after filtering, before normalization.
    pub raw_trace: f64,
    pub purity: f64,
    pub marginal_fwhm_nm: Option<f64>,
    pub marginal_center_nm: f64,
    pub largest_eigenvalue: f64,
    pub smallest_eigenvalue: f64,
    pub hermiticity_residual: f64,
    pub imaginary_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Unfiltered, unnormalized.
    pub raw: DensityMatrix,
    /// Filtered (when configured) and normalized.
    pub rho: DensityMatrix,
    pub diagnostics: Diagnostics,
}

/// compute → filter → normalize, with diagnostics.
pub fn run_pipeline(config: &SourceConfig, grid: &FrequencyGrid, quad: &QuadratureSpec) -> Result<PipelineOutput> {
    let raw = compute_density_matrix(config, grid, quad)?;
    let filtered = match &config.filter {
        Some(f) => apply_filter(&raw, f),
        None => raw.clone(),
    };
    let raw_trace = filtered.trace();
    let rho = filtered.normalize()?;
    let diagnostics = diagnose(&rho, raw_trace)?;
    Ok(PipelineOutput { raw, rho, diagnostics })
}

pub fn diagnose(rho: &DensityMatrix, raw_trace: f64) -> Result<Diagnostics> {
    let modes = rho.eigenmodes();
    Ok(Diagnostics {
        raw_trace,
        purity: rho.purity()?,
        marginal_fwhm_nm: rho.marginal_fwhm_nm(),
        marginal_center_nm: rho.marginal_center_nm(),
        largest_eigenvalue: modes.values[0],
        smallest_eigenvalue: *modes.values.last().expect("non-empty grid"),
        hermiticity_residual: rho.hermiticity_residual(),
        imaginary_ratio: rho.imaginary_ratio(),
    })
}
