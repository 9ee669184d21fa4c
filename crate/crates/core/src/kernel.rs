//! The six-dimensional transverse Gaussian integral at one
//! (ω_s, ω_i, ω_i′, z, z′) node.
//!
//! With `κ̃ = (q_s, q_i, q_i′)` the transverse integrand of the reduced
//! density matrix is `exp(−κ̃ᵀ M2 κ̃ + M1ᵀ κ̃ + M0)`. Integrating it over κ̃
//! gives, up to the constant π³,
//!
//! ```text
//! exp(M0 + ¼ M1ᵀ M2⁻¹ M1) / √det M2
//! ```
//!
//! `M2` is complex symmetric (not Hermitian); its real part is the
//! geometric matrix set by the beam waists and must be positive definite.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dispersion::TransverseK;
use crate::error::{Error, Result};
use crate::linalg::{real_spd_log_det, Lu};
use crate::paraxial::{expand_delta_kz, ParaxialExpansion};
use crate::source::SourceConfig;

pub type Mat6 = [[Complex64; 6]; 6];
pub type Vec6 = [Complex64; 6];

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Smallest waist accepted; below it the paraxial expansion is meaningless.
pub const MIN_WAIST_UM: f64 = 1.0;

/// Pump waist and back-propagated fiber-mode waist at the crystal, µm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamGeometry {
    pub pump_waist_um: f64,
    pub fiber_waist_um: f64,
}

impl BeamGeometry {
    pub fn new(pump_waist_um: f64, fiber_waist_um: f64) -> Result<Self> {
        if !(pump_waist_um >= MIN_WAIST_UM && pump_waist_um.is_finite()) {
            return Err(Error::config("pump.waist_um", format!("must be at least {MIN_WAIST_UM} µm")));
        }
        if !(fiber_waist_um >= MIN_WAIST_UM && fiber_waist_um.is_finite()) {
            return Err(Error::config("collection.waist_um", format!("must be at least {MIN_WAIST_UM} µm")));
        }
        Ok(Self {
            pump_waist_um,
            fiber_waist_um,
        })
    }

    /// Real part of M2: `(w_p²/2)·[[2, 1, 1], [1, 1+r, 0], [1, 0, 1+r]] ⊗ 𝟙₂`
    /// with `r = w_f²/w_p²`.
    pub fn geometric_matrix(&self) -> [[f64; 6]; 6] {
        let wp2 = self.pump_waist_um * self.pump_waist_um;
        let r = self.fiber_waist_um * self.fiber_waist_um / wp2;
        let blocks = [[2.0, 1.0, 1.0], [1.0, 1.0 + r, 0.0], [1.0, 0.0, 1.0 + r]];
        let mut g = [[0.0; 6]; 6];
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, &v) in row.iter().enumerate() {
                g[2 * bi][2 * bj] = 0.5 * wp2 * v;
                g[2 * bi + 1][2 * bj + 1] = 0.5 * wp2 * v;
            }
        }
        g
    }
}

/// Coordinates of one quadrature node, carried for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeContext {
    pub omega_s: f64,
    pub omega_i: f64,
    pub omega_i_prime: f64,
    pub z: f64,
    pub z_prime: f64,
}

impl std::fmt::Display for NodeContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "node (ω_s = {:.6}, ω_i = {:.6}, ω_i' = {:.6} rad/fs, z = {:.3}, z' = {:.3} µm)",
            self.omega_s, self.omega_i, self.omega_i_prime, self.z, self.z_prime
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MMatrices {
    pub m0: Complex64,
    pub m1: Vec6,
    pub m2: Mat6,
    pub context: NodeContext,
}

impl MMatrices {
    pub fn real_part_m2(&self) -> [[f64; 6]; 6] {
        let mut out = [[0.0; 6]; 6];
        for (r, row) in self.m2.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                out[r][c] = v.re;
            }
        }
        out
    }
}

fn put_block(m: &mut Mat6, br: usize, bc: usize, block: [[f64; 2]; 2], coeff: Complex64) {
    for r in 0..2 {
        for c in 0..2 {
            m[2 * br + r][2 * bc + c] += coeff * block[r][c];
        }
    }
}

fn transpose(b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[b[0][0], b[1][0]], [b[0][1], b[1][1]]]
}

/// Builds M0, M1, M2 from the expansions at (ω_s, ω_i) and (ω_s, ω_i′).
pub fn assemble_m(
    unprimed: &ParaxialExpansion,
    primed: &ParaxialExpansion,
    z: f64,
    z_prime: f64,
    beams: &BeamGeometry,
) -> Result<MMatrices> {
    if unprimed.omega_s != primed.omega_s {
        return Err(Error::Contract(format!(
            "expansions taken at different signal frequencies ({} vs {})",
            unprimed.omega_s, primed.omega_s
        )));
    }
    let context = NodeContext {
        omega_s: unprimed.omega_s,
        omega_i: unprimed.omega_i,
        omega_i_prime: primed.omega_i,
        z,
        z_prime,
    };
    let wp2 = beams.pump_waist_um * beams.pump_waist_um;
    let delta0: TransverseK = unprimed.k_s0 + unprimed.k_i0;
    let delta0p: TransverseK = primed.k_s0 + primed.k_i0;

    let mut m2 = [[ZERO; 6]; 6];
    for (r, row) in beams.geometric_matrix().iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            m2[r][c] = Complex64::new(v, 0.0);
        }
    }
    // M2 −= ½ X, X holding the ±iz·d blocks of both phase exponents
    let a = -0.5 * I * z_prime; // −½ · (i z')
    let b = 0.5 * I * z; // −½ · (−i z)
    put_block(&mut m2, 0, 0, primed.d_ss(), a);
    put_block(&mut m2, 0, 0, unprimed.d_ss(), b);
    put_block(&mut m2, 0, 1, unprimed.d_si(), b);
    put_block(&mut m2, 1, 0, transpose(unprimed.d_si()), b);
    put_block(&mut m2, 1, 1, unprimed.d_ii(), b);
    put_block(&mut m2, 0, 2, primed.d_si(), a);
    put_block(&mut m2, 2, 0, transpose(primed.d_si()), a);
    put_block(&mut m2, 2, 2, primed.d_ii(), a);

    let ds = unprimed.d_s();
    let di = unprimed.d_i();
    let dsp = primed.d_s();
    let dip = primed.d_i();
    let sum = [delta0.kx + delta0p.kx, delta0.ky + delta0p.ky];
    let d0 = [delta0.kx, delta0.ky];
    let d0p = [delta0p.kx, delta0p.ky];
    let mut m1 = [ZERO; 6];
    for c in 0..2 {
        m1[c] = -sum[c] * wp2 - I * z * ds[c] + I * z_prime * dsp[c];
        m1[2 + c] = -d0[c] * wp2 - I * z * di[c];
        m1[4 + c] = -d0p[c] * wp2 + I * z_prime * dip[c];
    }

    let m0 = Complex64::new(-0.5 * wp2 * (delta0.norm_sqr() + delta0p.norm_sqr()), 0.0) - I * z * unprimed.dkz0
        + I * z_prime * primed.dkz0;

    Ok(MMatrices { m0, m1, m2, context })
}

/// Spectral data of Re(M2) reused by every node that shares it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealPart {
    pub log_det: f64,
    pub min_eigenvalue: f64,
}

impl RealPart {
    /// `None` if `re` is not positive definite.
    pub fn of(re: &[[f64; 6]; 6]) -> Option<Self> {
        let log_det = real_spd_log_det(re)?;
        let m = nalgebra::Matrix6::from_fn(|r, c| 0.5 * (re[r][c] + re[c][r]));
        let min_eigenvalue = m.symmetric_eigenvalues().min();
        (min_eigenvalue > 0.0).then_some(Self {
            log_det,
            min_eigenvalue,
        })
    }
}

fn integrability_error(m: &MMatrices, reason: &str) -> Error {
    Error::Integrability {
        node: m.context.to_string(),
        reason: reason.to_string(),
    }
}

/// `ln det M2` on the branch continued from the real part.
///
/// Along `A(t) = Re M2 + i t Im M2` the determinant never vanishes, and its
/// phase moves by at most `√6 ‖Im M2‖_F / λ_min(Re M2)` over t ∈ [0, 1]. The
/// path is cut into steps of at most π/4 of phase, and the LU pivot-log sum
/// at each step is unwrapped onto the previous one. Returns the log-det and
/// the LU of M2 itself.
pub fn continued_log_det(m: &MMatrices, real: &RealPart) -> Result<(Complex64, Lu<6>)> {
    let mut frob2 = 0.0;
    for row in &m.m2 {
        for v in row {
            frob2 += v.im * v.im;
        }
    }
    let bound = 6f64.sqrt() * frob2.sqrt() / real.min_eigenvalue;
    let steps = ((bound / std::f64::consts::FRAC_PI_4).ceil() as usize).max(1);
    let mut prev = Complex64::new(real.log_det, 0.0);
    let mut last = None;
    for k in 1..=steps {
        let t = k as f64 / steps as f64;
        let mut a = m.m2;
        if k < steps {
            for row in a.iter_mut() {
                for v in row.iter_mut() {
                    v.im *= t;
                }
            }
        }
        let lu = Lu::factor(&a).ok_or_else(|| integrability_error(m, "M2 is singular"))?;
        let mut ld = lu.log_det();
        let two_pi = 2.0 * std::f64::consts::PI;
        ld.im += two_pi * ((prev.im - ld.im) / two_pi).round();
        prev = ld;
        last = Some(lu);
    }
    Ok((prev, last.expect("at least one continuation step")))
}

/// `exp(M0 + ¼ M1ᵀ M2⁻¹ M1) / √det M2` with the π³ prefactor dropped.
pub fn gaussian_integral(m: &MMatrices) -> Result<Complex64> {
    let real = RealPart::of(&m.real_part_m2()).ok_or_else(|| integrability_error(m, "Re(M2) is not positive definite"))?;
    gaussian_integral_with(m, &real)
}

/// As [`gaussian_integral`], reusing precomputed data of Re(M2). The caller
/// guarantees that `real` describes `Re(m.m2)`.
pub fn gaussian_integral_with(m: &MMatrices, real: &RealPart) -> Result<Complex64> {
    let (log_det, lu) = continued_log_det(m, real)?;
    let x = lu.solve(&m.m1);
    let quad: Complex64 = m.m1.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let value = (m.m0 + 0.25 * quad - 0.5 * log_det).exp();
    if !value.is_finite() {
        return Err(integrability_error(m, "non-finite Gaussian integral"));
    }
    Ok(value)
}

/// Inner double-z integrand of the reduced density matrix at one node.
pub fn integrand(
    omega_s: f64,
    omega_i: f64,
    omega_i_prime: f64,
    z: f64,
    z_prime: f64,
    config: &SourceConfig,
) -> Result<Complex64> {
    let half = 0.5 * config.crystal.length_um;
    if z.abs() > half || z_prime.abs() > half {
        return Err(Error::Contract(format!("z = {z}, z' = {z_prime} outside [−L/2, L/2] = ±{half} µm")));
    }
    let e = expand_delta_kz(omega_s, omega_i, &config.crystal, &config.geometry)?;
    let ep = expand_delta_kz(omega_s, omega_i_prime, &config.crystal, &config.geometry)?;
    let m = assemble_m(&e, &ep, z, z_prime, &config.beams)?;
    gaussian_integral(&m)
}
