#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{Matrix6, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use spdc_core::config::{ResolvedConfig, RunConfig};
use spdc_core::density::FrequencyGrid;
use spdc_core::kernel::{MMatrices, NodeContext};
use spdc_core::quadrature::gauss_hermite;

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn load(name: &str) -> RunConfig {
    RunConfig::from_path(&configs_dir().join(name)).unwrap()
}

pub fn resolve(name: &str) -> ResolvedConfig {
    load(name).resolve().unwrap()
}

pub fn grid(lo_nm: f64, hi_nm: f64, points: usize) -> FrequencyGrid {
    FrequencyGrid::from_wavelength_range(lo_nm, hi_nm, points).unwrap()
}

/// Random exponent data with positive-definite real part.
///
/// Im M2 and M1 are drawn in whitened coordinates, `Im = R^½ S R^½` and
/// `M1 = R^½ u` with R = Re M2, so that the whitened integrand seen by the
/// Gauss–Hermite rule stays within its resolution for every instance.
pub fn random_instance<R: Rng>(rng: &mut R) -> MMatrices {
    let a = Matrix6::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let q = a.qr().q();
    let lam = nalgebra::Vector6::from_fn(|_, _| rng.gen_range(0.6..2.5));
    let re = q * Matrix6::from_diagonal(&lam) * q.transpose();
    let root = q * Matrix6::from_diagonal(&lam.map(f64::sqrt)) * q.transpose();
    let mut s = Matrix6::zeros();
    for r in 0..6 {
        for c in r..6 {
            s[(r, c)] = rng.gen_range(-0.12..0.12);
            s[(c, r)] = s[(r, c)];
        }
    }
    let im = root * s * root;
    let u_re = nalgebra::Vector6::from_fn(|_, _| rng.gen_range(-0.8..0.8));
    let u_im = nalgebra::Vector6::from_fn(|_, _| rng.gen_range(-0.8..0.8));
    let (m1_re, m1_im) = (root * u_re, root * u_im);

    let m2 = std::array::from_fn(|r| std::array::from_fn(|c| Complex64::new(re[(r, c)], 0.5 * (im[(r, c)] + im[(c, r)]))));
    let m1 = std::array::from_fn(|k| Complex64::new(m1_re[k], m1_im[k]));
    MMatrices {
        m0: Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-3.0..3.0)),
        m1,
        m2,
        context: NodeContext {
            omega_s: 0.0,
            omega_i: 0.0,
            omega_i_prime: 0.0,
            z: 0.0,
            z_prime: 0.0,
        },
    }
}

/// `π⁻³ ∫ exp(−xᵀM2x + M1ᵀx + M0) d⁶x` by tensor Gauss–Hermite quadrature
/// after whitening with the real part.
pub fn gauss_hermite_6d(m: &MMatrices, n: usize) -> Complex64 {
    let re = Matrix6::from_fn(|r, c| m.m2[r][c].re);
    let im = Matrix6::from_fn(|r, c| m.m2[r][c].im);
    let eig = SymmetricEigen::new(re);
    // x = T y with T = V Λ^{-1/2}; then xᵀ Re x = |y|²
    let t = eig.eigenvectors * Matrix6::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let jac: f64 = eig.eigenvalues.iter().map(|l| 1.0 / l.sqrt()).product();
    let b = t.transpose() * im * t;
    let beta: [Complex64; 6] = std::array::from_fn(|k| (0..6).map(|r| m.m1[r] * t[(r, k)]).sum());

    let rule = gauss_hermite(n);
    let nodes: Vec<(f64, f64)> = rule.iter().collect();
    let mut total = Complex64::new(0.0, 0.0);
    // odometer over the first five coordinates; the sixth is summed inline
    let mut idx = [0usize; 5];
    loop {
        let y: [f64; 5] = std::array::from_fn(|k| nodes[idx[k]].0);
        let w: f64 = (0..5).map(|k| nodes[idx[k]].1).product();
        let mut quad = 0.0;
        for r in 0..5 {
            for c in 0..5 {
                quad += y[r] * b[(r, c)] * y[c];
            }
        }
        let cross: f64 = (0..5).map(|c| 2.0 * b[(5, c)] * y[c]).sum();
        let lin: Complex64 = (0..5).map(|k| beta[k] * y[k]).sum();
        let mut inner = Complex64::new(0.0, 0.0);
        for &(y5, w5) in &nodes {
            let q = quad + y5 * (cross + b[(5, 5)] * y5);
            inner += w5 * (Complex64::new(0.0, -q) + lin + beta[5] * y5).exp();
        }
        total += w * inner;
        let mut k = 0;
        while k < 5 {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == 5 {
            break;
        }
    }
    total * m.m0.exp() * jac / std::f64::consts::PI.powi(3)
}
