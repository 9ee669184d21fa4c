//! Brute-force reference integrators.
//!
//! Here the transverse integrals are done by tensor Gauss–Hermite quadrature
//! and the z integral in closed form, instead of the analytic Gaussian
//! reduction of [`crate::kernel`]. With [`PhaseModel::Quadratic`] the
//! integrand is exactly the one the kernel integrates, so any disagreement
//! is quadrature error. With [`PhaseModel::Exact`] the full dispersion
//! relation is used and the disagreement measures the paraxial expansion.
//!
//! The idler amplitude is
//!
//! ```text
//! Ψ_i(k_s) = A(ω_s+ω_i) ∫d²k_i u_i*(k_i) u_p(k_s+k_i) L sinc(Δk_z L/2)
//! ```
//!
//! with `u_p(k) = (w_p/√π) exp(−w_p² k²/2)` and
//! `u_i(k) = (w_f/√π) exp(−w_f² (k−k_i0)²/2)`.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{omega_s_rule, pump_amplitude, DensityMatrix, FrequencyGrid, QuadratureSpec};
use crate::dispersion::{central_transverse_k, delta_kz, Leg, TransverseK};
use crate::error::{Error, Result};
use crate::paraxial::{expand_delta_kz, ParaxialExpansion};
use crate::quadrature::{gauss_hermite, Rule};
use crate::source::SourceConfig;

/// Largest output grid accepted with the exact phase.
pub const MAX_EXACT_GRID: usize = 8;
/// Largest output grid accepted with the quadratic phase.
pub const MAX_QUADRATIC_GRID: usize = 5;

/// How Δk_z is evaluated inside the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseModel {
    /// Full dispersion relation.
    Exact,
    /// Second-order expansion around the central directions.
    Quadratic,
    /// Δk_z ≡ 0; test hook.
    Matched,
}

/// Gauss–Hermite node counts per transverse dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransverseNodes {
    pub signal: usize,
    pub idler: usize,
}

impl TransverseNodes {
    pub fn uniform(n: usize) -> Self {
        Self { signal: n, idler: n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub rel_frobenius_error: f64,
    pub max_abs_entry_error: f64,
    pub transverse_nodes: Option<TransverseNodes>,
    pub n_omega_s: Option<usize>,
    pub runtime_s: f64,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `∫_{−L/2}^{L/2} exp(i Δ z) dz`, which is real.
pub fn z_integral(delta: f64, length_um: f64) -> f64 {
    length_um * sinc(0.5 * delta * length_um)
}

/// Per-(ω_s, ω_i) data shared by all transverse nodes.
struct Leg1<'a> {
    config: &'a SourceConfig,
    omega_s: f64,
    omega_i: f64,
    k_i0: TransverseK,
    model: PhaseModel,
    expansion: Option<ParaxialExpansion>,
    idler_rule: Rule,
    /// Gaussian precision of the k_i integrand, (w_p² + w_f²)/2.
    precision: f64,
}

impl<'a> Leg1<'a> {
    fn new(config: &'a SourceConfig, omega_s: f64, omega_i: f64, model: PhaseModel, idler_rule: Rule) -> Result<Self> {
        let k_i0 = central_transverse_k(config.crystal.material, omega_i, &config.geometry, Leg::Idler)?;
        let expansion = match model {
            PhaseModel::Quadratic => Some(expand_delta_kz(omega_s, omega_i, &config.crystal, &config.geometry)?),
            _ => None,
        };
        let wp2 = config.beams.pump_waist_um.powi(2);
        let wf2 = config.beams.fiber_waist_um.powi(2);
        Ok(Self {
            config,
            omega_s,
            omega_i,
            k_i0,
            model,
            expansion,
            idler_rule,
            precision: 0.5 * (wp2 + wf2),
        })
    }

    fn delta(&self, k_s: TransverseK, k_i: TransverseK) -> Result<f64> {
        match self.model {
            PhaseModel::Exact => delta_kz(&self.config.crystal, k_s, self.omega_s, k_i, self.omega_i),
            PhaseModel::Quadratic => {
                let e = self.expansion.as_ref().expect("quadratic model carries an expansion");
                let qs = k_s - e.k_s0;
                let qi = k_i - e.k_i0;
                Ok(e.evaluate([qs.kx, qs.ky, qi.kx, qi.ky]))
            }
            PhaseModel::Matched => Ok(0.0),
        }
    }

    /// `Ψ_i / A(ω_s+ω_i)` with the factor `exp(−W_c |k_s + k_i0|²)` removed.
    fn reduced_psi(&self, k_s: TransverseK) -> Result<f64> {
        let wp2 = self.config.beams.pump_waist_um.powi(2);
        let wf2 = self.config.beams.fiber_waist_um.powi(2);
        let scale = 1.0 / self.precision.sqrt();
        // center of the k_i − k_i0 Gaussian
        let c = (k_s + self.k_i0).scale(-wp2 / (wp2 + wf2));
        let mut acc = 0.0;
        for (x, wx) in self.idler_rule.iter() {
            let mut row = 0.0;
            for (y, wy) in self.idler_rule.iter() {
                let k_i = self.k_i0 + c + TransverseK { kx: x * scale, ky: y * scale };
                row += wy * z_integral(self.delta(k_s, k_i)?, self.config.crystal.length_um);
            }
            acc += wx * row;
        }
        let prefactor = self.config.beams.pump_waist_um * self.config.beams.fiber_waist_um / std::f64::consts::PI;
        Ok(prefactor * acc / self.precision)
    }
}

fn envelope_weight(config: &SourceConfig) -> f64 {
    let wp2 = config.beams.pump_waist_um.powi(2);
    let wf2 = config.beams.fiber_waist_um.powi(2);
    wp2 * wf2 / (2.0 * (wp2 + wf2))
}

/// Idler amplitude at one signal transverse wave vector, from a direct
/// `n_idler × n_idler` Gauss–Hermite quadrature over k_i.
pub fn psi_i_direct(
    k_s: TransverseK,
    omega_s: f64,
    omega_i: f64,
    config: &SourceConfig,
    model: PhaseModel,
    n_idler: usize,
) -> Result<Complex64> {
    if n_idler < 4 {
        return Err(Error::Contract("need at least 4 Gauss–Hermite nodes per dimension".into()));
    }
    let leg = Leg1::new(config, omega_s, omega_i, model, gauss_hermite(n_idler))?;
    let envelope = (-envelope_weight(config) * (k_s + leg.k_i0).norm_sqr()).exp();
    Ok(pump_amplitude(&config.pump, omega_s + omega_i)? * (envelope * leg.reduced_psi(k_s)?))
}

fn direct_entry(
    config: &SourceConfig,
    omega_i: f64,
    omega_ip: f64,
    model: PhaseModel,
    nodes: TransverseNodes,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    let Some(ws_rule) = omega_s_rule(&config.pump, omega_i, omega_ip, quad) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let wc = envelope_weight(config);
    let signal_rule = gauss_hermite(nodes.signal);
    let idler_rule = gauss_hermite(nodes.idler);
    let mut total = Complex64::new(0.0, 0.0);
    for (ws, wt) in ws_rule.iter() {
        let amp = pump_amplitude(&config.pump, ws + omega_i)?.conj() * pump_amplitude(&config.pump, ws + omega_ip)?;
        let a = Leg1::new(config, ws, omega_i, model, idler_rule.clone())?;
        let b = Leg1::new(config, ws, omega_ip, model, idler_rule.clone())?;
        // |Ψ|² envelopes combine into one Gaussian of precision 2W_c
        let center = (a.k_i0 + b.k_i0).scale(-0.5);
        let scale = 1.0 / (2.0 * wc).sqrt();
        let mut acc = 0.0;
        for (x, wx) in signal_rule.iter() {
            for (y, wy) in signal_rule.iter() {
                let k_s = center + TransverseK { kx: x * scale, ky: y * scale };
                let pa = a.reduced_psi(k_s)?;
                let pb = if omega_ip == omega_i { pa } else { b.reduced_psi(k_s)? };
                acc += wx * wy * pa * pb;
            }
        }
        let cross = (-0.5 * wc * (a.k_i0 - b.k_i0).norm_sqr()).exp();
        total += amp * (wt * cross * acc / (2.0 * wc));
    }
    Ok(total)
}

fn direct_matrix(
    config: &SourceConfig,
    grid: &FrequencyGrid,
    model: PhaseModel,
    nodes: TransverseNodes,
    quad: &QuadratureSpec,
) -> Result<DensityMatrix> {
    quad.validate()?;
    if nodes.signal < 4 || nodes.idler < 4 {
        return Err(Error::Contract("need at least 4 Gauss–Hermite nodes per dimension".into()));
    }
    let n = grid.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |k| (j, k))).collect();
    let values: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(j, k)| direct_entry(config, grid.omegas[j], grid.omegas[k], model, nodes, quad))
        .collect::<Result<_>>()?;
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (&(j, k), v) in pairs.iter().zip(values) {
        m[(j, k)] = v;
        m[(k, j)] = v.conj();
    }
    DensityMatrix::new(grid.clone(), m)
}

/// Reference ρ using the exact dispersion relation throughout.
pub fn density_matrix_direct(
    config: &SourceConfig,
    grid: &FrequencyGrid,
    nodes: TransverseNodes,
    quad: &QuadratureSpec,
) -> Result<DensityMatrix> {
    if grid.len() > MAX_EXACT_GRID {
        return Err(Error::Contract(format!("exact oracle grid limited to {MAX_EXACT_GRID} points")));
    }
    direct_matrix(config, grid, PhaseModel::Exact, nodes, quad)
}

/// Reference ρ with the quadratic phase, i.e. the kernel's own integrand.
pub fn density_matrix_quadratic_direct(
    config: &SourceConfig,
    grid: &FrequencyGrid,
    nodes: TransverseNodes,
    quad: &QuadratureSpec,
) -> Result<DensityMatrix> {
    if grid.len() > MAX_QUADRATIC_GRID {
        return Err(Error::Contract(format!("quadratic oracle grid limited to {MAX_QUADRATIC_GRID} points")));
    }
    direct_matrix(config, grid, PhaseModel::Quadratic, nodes, quad)
}

/// Any phase model, without the grid-size guard.
pub fn density_matrix_with_model(
    config: &SourceConfig,
    grid: &FrequencyGrid,
    model: PhaseModel,
    nodes: TransverseNodes,
    quad: &QuadratureSpec,
) -> Result<DensityMatrix> {
    direct_matrix(config, grid, model, nodes, quad)
}

/// Errors of `a` relative to the reference `b`, both normalized first.
pub fn compare(a: &DensityMatrix, b: &DensityMatrix) -> Result<OracleReport> {
    let start = Instant::now();
    if a.grid != b.grid {
        return Err(Error::GridMismatch("compared matrices live on different grids".into()));
    }
    let a = a.normalize()?;
    let b = b.normalize()?;
    let diff = &a.values - &b.values;
    let rel = diff.norm() / b.values.norm();
    let max_abs = diff.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(OracleReport {
        rel_frobenius_error: rel,
        max_abs_entry_error: max_abs,
        transverse_nodes: None,
        n_omega_s: None,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}
