//! Dense LU factorization with partial pivoting for small fixed-size complex
//! matrices.

use num_complex::Complex64;

/// `PA = LU` with unit-diagonal L stored below the diagonal of `lu`.
#[derive(Debug, Clone)]
pub struct Lu<const N: usize> {
    lu: [[Complex64; N]; N],
    perm: [usize; N],
    odd_swaps: bool,
}

impl<const N: usize> Lu<N> {
    /// Factors `a`; `None` when an exactly zero pivot is met.
    pub fn factor(a: &[[Complex64; N]; N]) -> Option<Self> {
        let mut lu = *a;
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        let mut odd_swaps = false;
        for k in 0..N {
            let mut piv = k;
            let mut best = lu[k][k].norm_sqr();
            for r in (k + 1)..N {
                let v = lu[r][k].norm_sqr();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return None;
            }
            if piv != k {
                lu.swap(piv, k);
                perm.swap(piv, k);
                odd_swaps = !odd_swaps;
            }
            let inv = 1.0 / lu[k][k];
            for r in (k + 1)..N {
                let f = lu[r][k] * inv;
                lu[r][k] = f;
                for c in (k + 1)..N {
                    let t = lu[k][c];
                    lu[r][c] -= f * t;
                }
            }
        }
        Some(Self { lu, perm, odd_swaps })
    }

    pub fn pivots(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..N).map(move |k| self.lu[k][k])
    }

    pub fn det(&self) -> Complex64 {
        let p: Complex64 = self.pivots().product();
        if self.odd_swaps {
            -p
        } else {
            p
        }
    }

    /// Sum of principal logarithms of the pivots, plus iπ for an odd
    /// permutation. The imaginary part is defined only modulo 2π.
    pub fn log_det(&self) -> Complex64 {
        let mut acc: Complex64 = self.pivots().map(|p| p.ln()).sum();
        if self.odd_swaps {
            acc.im += std::f64::consts::PI;
        }
        acc
    }

    pub fn solve(&self, b: &[Complex64; N]) -> [Complex64; N] {
        let mut x = [Complex64::new(0.0, 0.0); N];
        for i in 0..N {
            let mut s = b[self.perm[i]];
            for j in 0..i {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..N).rev() {
            let mut s = x[i];
            for j in (i + 1)..N {
                s -= self.lu[i][j] * x[j];
            }
            x[i] = s / self.lu[i][i];
        }
        x
    }
}

/// Cholesky test for positive definiteness of a real symmetric matrix;
/// returns `ln det` on success.
pub fn real_spd_log_det<const N: usize>(a: &[[f64; N]; N]) -> Option<f64> {
    let mut l = [[0.0f64; N]; N];
    let mut log_det = 0.0;
    for j in 0..N {
        let mut d = a[j][j];
        for k in 0..j {
            d -= l[j][k] * l[j][k];
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[j][j] = djj;
        log_det += 2.0 * djj.ln();
        for i in (j + 1)..N {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            l[i][j] = s / djj;
        }
    }
    Some(log_det)
}
