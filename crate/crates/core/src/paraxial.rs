//! Second-order expansion of the phase mismatch in transverse wave-vector
//! deviations around the phase-matched directions.
//!
//! The deviation vector is ordered `κ = (q_sx, q_sy, q_ix, q_iy)` with
//! `q_s = k_s − k_s0(ω_s)` and `q_i = k_i − k_i0(ω_i)`. Frequencies are not
//! expanded: every (ω_s, ω_i) pair gets its own coefficients.

use serde::{Deserialize, Serialize};

use crate::dispersion::{central_transverse_k, delta_kz, CrystalConfig, GeometryConfig, Leg, TransverseK};
use crate::error::{Error, Result};

/// Finite-difference step in rad/µm.
///
/// Second derivatives are ~1/k ≈ 0.08 µm; this step keeps the round-off of
/// the second difference near 1e-9 relative while the truncation error,
/// after one Richardson refinement, is far smaller.
pub const DEFAULT_FD_STEP: f64 = 2e-3;

/// Δk_z ≈ dkz0 + D1·κ + κᵀ D2 κ around `(k_s0, ω_s; k_i0, ω_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParaxialExpansion {
    pub omega_s: f64,
    pub omega_i: f64,
    pub k_s0: TransverseK,
    pub k_i0: TransverseK,
    pub dkz0: f64,
    /// Gradient `(d_s, d_i)`.
    pub d1: [f64; 4],
    /// Full Hessian of Δk_z; `D2` is half of it.
    pub hessian: [[f64; 4]; 4],
}

impl ParaxialExpansion {
    /// `D2 = ½ [[d_ss, d_si], [d_is, d_ii]]`.
    pub fn d2(&self) -> [[f64; 4]; 4] {
        let mut out = self.hessian;
        out.iter_mut().flatten().for_each(|x| *x *= 0.5);
        out
    }

    pub fn d_s(&self) -> [f64; 2] {
        [self.d1[0], self.d1[1]]
    }

    pub fn d_i(&self) -> [f64; 2] {
        [self.d1[2], self.d1[3]]
    }

    pub fn d_ss(&self) -> [[f64; 2]; 2] {
        self.block(0, 0)
    }

    pub fn d_si(&self) -> [[f64; 2]; 2] {
        self.block(0, 2)
    }

    pub fn d_is(&self) -> [[f64; 2]; 2] {
        self.block(2, 0)
    }

    pub fn d_ii(&self) -> [[f64; 2]; 2] {
        self.block(2, 2)
    }

    fn block(&self, r: usize, c: usize) -> [[f64; 2]; 2] {
        let h = &self.hessian;
        [[h[r][c], h[r][c + 1]], [h[r + 1][c], h[r + 1][c + 1]]]
    }

    /// Quadratic model at deviation `kappa`.
    pub fn evaluate(&self, kappa: [f64; 4]) -> f64 {
        let mut lin = 0.0;
        let mut quad = 0.0;
        for a in 0..4 {
            lin += self.d1[a] * kappa[a];
            for b in 0..4 {
                quad += kappa[a] * self.hessian[a][b] * kappa[b];
            }
        }
        self.dkz0 + lin + 0.5 * quad
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Derivative blocks of Δk_z with respect to the signal and idler transverse
/// wave vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivativeBlocks {
    First {
        d_s: [f64; 2],
        d_i: [f64; 2],
    },
    Second {
        d_ss: [[f64; 2]; 2],
        d_si: [[f64; 2]; 2],
        d_ii: [[f64; 2]; 2],
    },
}

/// Δk_z as a function of the deviation vector around the central directions.
struct Mismatch<'a> {
    crystal: &'a CrystalConfig,
    omega_s: f64,
    omega_i: f64,
    k_s0: TransverseK,
    k_i0: TransverseK,
}

impl Mismatch<'_> {
    fn at(&self, kappa: [f64; 4]) -> Result<f64> {
        delta_kz(
            self.crystal,
            self.k_s0 + TransverseK::new(kappa[0], kappa[1]),
            self.omega_s,
            self.k_i0 + TransverseK::new(kappa[2], kappa[3]),
            self.omega_i,
        )
    }

    fn shifted(&self, moves: &[(usize, f64)]) -> Result<f64> {
        let mut kappa = [0.0; 4];
        for &(axis, d) in moves {
            kappa[axis] += d;
        }
        self.at(kappa)
    }

    fn check_margin(&self, h: f64) -> Result<()> {
        for axis in 0..4 {
            for sign in [-3.0, 3.0] {
                self.shifted(&[(axis, sign * h)]).map_err(|e| {
                    Error::Domain(format!(
                        "expansion point (ω_s = {:.6}, ω_i = {:.6}) within 3h of the k_z domain boundary: {e}",
                        self.omega_s, self.omega_i
                    ))
                })?;
            }
        }
        Ok(())
    }

    fn gradient_step(&self, axis: usize, h: f64) -> Result<f64> {
        Ok((self.shifted(&[(axis, h)])? - self.shifted(&[(axis, -h)])?) / (2.0 * h))
    }

    fn hessian_step(&self, a: usize, b: usize, h: f64, f0: f64) -> Result<f64> {
        if a == b {
            Ok((self.shifted(&[(a, h)])? - 2.0 * f0 + self.shifted(&[(a, -h)])?) / (h * h))
        } else {
            let pp = self.shifted(&[(a, h), (b, h)])?;
            let pm = self.shifted(&[(a, h), (b, -h)])?;
            let mp = self.shifted(&[(a, -h), (b, h)])?;
            let mm = self.shifted(&[(a, -h), (b, -h)])?;
            Ok((pp - pm - mp + mm) / (4.0 * h * h))
        }
    }
}

fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Gradient and Hessian of Δk_z at the central directions by central
/// differences with one Richardson refinement.
fn derivatives(m: &Mismatch<'_>, h: f64) -> Result<(f64, [f64; 4], [[f64; 4]; 4])> {
    m.check_margin(h)?;
    let f0 = m.at([0.0; 4])?;
    let mut grad = [0.0; 4];
    for (axis, g) in grad.iter_mut().enumerate() {
        *g = richardson(m.gradient_step(axis, h)?, m.gradient_step(axis, 0.5 * h)?);
    }
    let mut hess = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let v = richardson(m.hessian_step(a, b, h, f0)?, m.hessian_step(a, b, 0.5 * h, f0)?);
            hess[a][b] = v;
            hess[b][a] = v;
        }
    }
    Ok((f0, grad, hess))
}

fn mismatch<'a>(omega_s: f64, omega_i: f64, crystal: &'a CrystalConfig, geometry: &GeometryConfig) -> Result<Mismatch<'a>> {
    Ok(Mismatch {
        crystal,
        omega_s,
        omega_i,
        k_s0: central_transverse_k(crystal.material, omega_s, geometry, Leg::Signal)?,
        k_i0: central_transverse_k(crystal.material, omega_i, geometry, Leg::Idler)?,
    })
}

/// First- or second-order derivative blocks of Δk_z at the central directions.
pub fn differentiate_delta_kz(
    omega_s: f64,
    omega_i: f64,
    crystal: &CrystalConfig,
    geometry: &GeometryConfig,
    order: DerivativeOrder,
) -> Result<DerivativeBlocks> {
    let e = expand_delta_kz_with_step(omega_s, omega_i, crystal, geometry, DEFAULT_FD_STEP)?;
    Ok(match order {
        DerivativeOrder::First => DerivativeBlocks::First {
            d_s: e.d_s(),
            d_i: e.d_i(),
        },
        DerivativeOrder::Second => DerivativeBlocks::Second {
            d_ss: e.d_ss(),
            d_si: e.d_si(),
            d_ii: e.d_ii(),
        },
    })
}

/// Paraxial expansion of Δk_z at the frequency pair (ω_s, ω_i).
pub fn expand_delta_kz(omega_s: f64, omega_i: f64, crystal: &CrystalConfig, geometry: &GeometryConfig) -> Result<ParaxialExpansion> {
    expand_delta_kz_with_step(omega_s, omega_i, crystal, geometry, DEFAULT_FD_STEP)
}

pub fn expand_delta_kz_with_step(
    omega_s: f64,
    omega_i: f64,
    crystal: &CrystalConfig,
    geometry: &GeometryConfig,
    step: f64,
) -> Result<ParaxialExpansion> {
    let m = mismatch(omega_s, omega_i, crystal, geometry)?;
    let (dkz0, d1, hessian) = derivatives(&m, step)?;
    Ok(ParaxialExpansion {
        omega_s,
        omega_i,
        k_s0: m.k_s0,
        k_i0: m.k_i0,
        dkz0,
        d1,
        hessian,
    })
}

/// Largest deviation of the quadratic model from the exact mismatch over a
/// tensor grid of `points`⁴ deviations with every component in
/// `[-radius, radius]`, together with the spread (max − min) of the exact
/// values over the same grid.
pub fn model_residual(
    expansion: &ParaxialExpansion,
    crystal: &CrystalConfig,
    radius: f64,
    points: usize,
) -> Result<(f64, f64)> {
    let axis: Vec<f64> = (0..points)
        .map(|j| -radius + 2.0 * radius * j as f64 / (points - 1).max(1) as f64)
        .collect();
    let mut worst: f64 = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &a in &axis {
        for &b in &axis {
            for &c in &axis {
                for &d in &axis {
                    let kappa = [a, b, c, d];
                    let exact = delta_kz(
                        crystal,
                        expansion.k_s0 + TransverseK::new(a, b),
                        expansion.omega_s,
                        expansion.k_i0 + TransverseK::new(c, d),
                        expansion.omega_i,
                    )?;
                    worst = worst.max((exact - expansion.evaluate(kappa)).abs());
                    lo = lo.min(exact);
                    hi = hi.max(exact);
                }
            }
        }
    }
    Ok((worst, hi - lo))
}
