//! One-sided Jacobi SVD for complex matrices.
//!
//! Cyclic column sweeps orthogonalize every column pair with a complex
//! Givens rotation; on convergence the column norms are the singular
//! values and the accumulated rotations form V. Column-major storage
//! keeps every rotation and inner product on contiguous memory, which is
//! what makes the 2Mx2N adjoint solvable at benchmark sizes.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const JACOBI_TOL: f64 = 1e-12;
pub(crate) const MAX_SWEEPS: usize = 60;

/// Column-major complex matrix; `data[c * rows + r]`.
pub(crate) struct ColMajor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl ColMajor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for d in 0..n {
            m.data[d * n + d] = Complex64::new(1.0, 0.0);
        }
        m
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[Complex64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    #[inline]
    fn col_pair_mut(&mut self, i: usize, j: usize) -> (&mut [Complex64], &mut [Complex64]) {
        debug_assert!(i < j);
        let rows = self.rows;
        let (left, right) = self.data.split_at_mut(j * rows);
        (&mut left[i * rows..(i + 1) * rows], &mut right[..rows])
    }

    /// Reorder columns by the given index list.
    fn permuted(&self, order: &[usize]) -> ColMajor {
        let mut out = ColMajor::zeros(self.rows, order.len());
        for (dst, &src) in order.iter().enumerate() {
            let s = src * self.rows;
            let d = dst * self.rows;
            out.data[d..d + self.rows].copy_from_slice(&self.data[s..s + self.rows]);
        }
        out
    }
}

#[inline]
fn dot_conj(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    Complex64::new(re, im)
}

#[inline]
fn norm_sq(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.re * a.re + a.im * a.im).sum()
}

/// Apply the rotation `[ci, cj] <- [ci, p*cj] * [[c, s], [-s, c]]` where
/// `p` is the unit phase that makes the pair's Gram off-diagonal real.
#[inline]
fn rotate_pair(ci: &mut [Complex64], cj: &mut [Complex64], c: f64, s: f64, p: Complex64) {
    for (a, b) in ci.iter_mut().zip(cj.iter_mut()) {
        let y_re = p.re * b.re - p.im * b.im;
        let y_im = p.re * b.im + p.im * b.re;
        let xi_re = a.re;
        let xi_im = a.im;
        a.re = c * xi_re - s * y_re;
        a.im = c * xi_im - s * y_im;
        b.re = s * xi_re + c * y_re;
        b.im = s * xi_im + c * y_im;
    }
}

pub(crate) struct JacobiSvd {
    /// Singular values, descending.
    pub s: Vec<f64>,
    /// Right singular vectors, columns matching `s`.
    pub v: ColMajor,
    /// Sweeps until convergence; diagnostic only.
    #[allow(dead_code)]
    pub sweeps: usize,
}

/// One-sided Jacobi SVD of a tall matrix (`rows >= cols`). `a` is
/// consumed; its columns end up mutually orthogonal.
pub(crate) fn jacobi_svd(mut a: ColMajor) -> Result<JacobiSvd> {
    assert!(a.rows >= a.cols, "jacobi_svd requires rows >= cols");
    let n = a.cols;
    let mut v = ColMajor::identity(n);
    let mut sweeps = 0;
    let mut max_off = 0.0;
    let mut converged = n < 2;

    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        // Fresh norms each sweep; incremental updates are used within it.
        let mut norms: Vec<f64> = (0..n).map(|j| norm_sq(a.col(j))).collect();
        max_off = 0.0;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let alpha = norms[i];
                let beta = norms[j];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot_conj(a.col(i), a.col(j));
                let g_abs = gamma.norm();
                let rel = g_abs / (alpha * beta).sqrt();
                if rel > max_off {
                    max_off = rel;
                }
                if rel <= JACOBI_TOL {
                    continue;
                }
                let phase_conj = Complex64::new(gamma.re / g_abs, -gamma.im / g_abs);
                let tau = (beta - alpha) / (2.0 * g_abs);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                {
                    let (ci, cj) = a.col_pair_mut(i, j);
                    rotate_pair(ci, cj, c, s, phase_conj);
                }
                {
                    let (vi, vj) = v.col_pair_mut(i, j);
                    rotate_pair(vi, vj, c, s, phase_conj);
                }
                norms[i] = (alpha - t * g_abs).max(0.0);
                norms[j] = beta + t * g_abs;
            }
        }
        converged = max_off <= JACOBI_TOL;
    }
    if !converged {
        return Err(Error::Convergence {
            sweeps,
            off_norm: max_off,
        });
    }

    let sigmas: Vec<f64> = (0..n).map(|j| norm_sq(a.col(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&l, &r| sigmas[r].total_cmp(&sigmas[l]));
    let s: Vec<f64> = order.iter().map(|&j| sigmas[j]).collect();
    let v = v.permuted(&order);
    Ok(JacobiSvd { s, v, sweeps })
}
