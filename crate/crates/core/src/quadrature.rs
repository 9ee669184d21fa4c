//! Gauss–Legendre and Gauss–Hermite rules.
//!
//! Nodes are found by Newton iteration on the three-term recurrences, which
//! is accurate to machine precision well beyond the node counts used here
//! (a few hundred).

use std::f64::consts::PI;

/// A one-dimensional quadrature rule: nodes and matching weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre rule on [-1, 1], nodes in ascending order.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp;
        loop {
            let (p, q) = legendre_pair(n, z);
            dp = nf * (z * p - q) / (z * z - 1.0);
            let step = p / dp;
            z -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (p, q) = legendre_pair(n, z);
        dp = nf * (z * p - q) / (z * z - 1.0);
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

// (P_n(z), P_{n-1}(z))
fn legendre_pair(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = 1.0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
    }
    (p1, p2)
}

/// Gauss–Legendre rule mapped onto [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Rule {
    let base = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    Rule {
        nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
        weights: base.weights.iter().map(|w| half * w).collect(),
    }
}

/// Gauss–Hermite rule for the weight `exp(-x²)` on the real line, nodes in
/// ascending order.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n > 0, "Gauss-Hermite rule needs at least one node");
    const PIM4: f64 = 0.751_125_544_464_942_5; // π^(-1/4)
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut roots = vec![0.0; m];
    let mut ws = vec![0.0; m];
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let (p1, p2) = hermite_pair(n, z, PIM4);
            pp = (2.0 * nf).sqrt() * p2;
            let step = p1 / pp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                let (_, p2) = hermite_pair(n, z, PIM4);
                pp = (2.0 * nf).sqrt() * p2;
                break;
            }
        }
        roots[i] = z;
        ws[i] = 2.0 / (pp * pp);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..m {
        nodes[i] = -roots[i];
        nodes[n - 1 - i] = roots[i];
        weights[i] = ws[i];
        weights[n - 1 - i] = ws[i];
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

// Orthonormal Hermite recurrence, returns (h_n(z), h_{n-1}(z)).
fn hermite_pair(n: usize, z: f64, h0: f64) -> (f64, f64) {
    let mut p1 = h0;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, p2)
}
