//! Quaternion SVD computed through the complex adjoint.
//!
//! The adjoint of an MxN quaternion matrix is 2Mx2N complex; its singular
//! values come in exact pairs and each quaternion singular vector
//! corresponds to a 2-dimensional complex subspace closed under the
//! antiunitary map J: [a; b] -> [-conj(b); conj(a)]. We Jacobi-factor the
//! adjoint, collapse paired values, and pick one J-orbit representative
//! per pair. Repeated singular values make the representatives
//! ambiguous, so pairs are grouped into clusters and reduced together
//! with a Gram-Schmidt pass that removes both w and Jw at each step;
//! that keeps the recovered quaternion columns orthonormal even on
//! degenerate spectra (identity, scalar multiples).
//!
//! U is recovered as Q V / sigma; numerically null directions are
//! completed from the standard basis so the thin factor stays
//! orthonormal at any rank.

use num_complex::Complex64;

use crate::adjoint::{to_adjoint, ComplexAdjoint};
use crate::error::{Error, Result};
use crate::jacobi::{jacobi_svd, ColMajor};
use crate::qmatrix::QMatrix;
use crate::quaternion::Quaternion;

/// Adjoint values deviating by more than this (relative to the largest
/// value) cannot be matched into pairs.
const PAIRING_REL_TOL: f64 = 1e-8;
/// Adjacent pairs closer than this (relative) are treated as one
/// degenerate cluster and reduced jointly.
const CLUSTER_REL_TOL: f64 = 1e-10;
/// Gram-Schmidt residuals below this are directions already consumed by
/// a J-orbit; genuine survivors sit many orders of magnitude higher.
const GS_DROP_TOL: f64 = 1e-6;

/// Thin SVD of a quaternion matrix: `u` is M x min(M,N), `v` is
/// N x min(M,N), both with orthonormal columns; `s` is descending and
/// nonnegative; `u * diag(s) * v^H` reconstructs the input.
pub struct Qsvd {
    pub u: QMatrix,
    pub s: Vec<f64>,
    pub v: QMatrix,
}

impl Qsvd {
    pub fn reconstruct(&self) -> QMatrix {
        let mut us = self.u.clone();
        for (i, &sig) in self.s.iter().enumerate() {
            us.scale_column(i, sig);
        }
        us.matmul(&self.v.conj_transpose())
            .expect("factor shapes agree by construction")
    }
}

/// Default rank cutoff: max(M,N) * S1 * 2^-52 * 16.
fn auto_tol(m: usize, n: usize, s1: f64) -> f64 {
    m.max(n) as f64 * s1 * f64::EPSILON * 16.0
}

pub fn qsvd(q: &QMatrix) -> Result<Qsvd> {
    let (m, n) = q.shape();
    if m < n {
        let t = qsvd(&q.conj_transpose())?;
        return Ok(Qsvd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }

    let jac = jacobi_svd(colmajor(&to_adjoint(q)))?;
    let scale = jac.s.first().copied().unwrap_or(0.0);

    let mut s = Vec::with_capacity(n);
    for p in 0..n {
        let hi = jac.s[2 * p];
        let lo = jac.s[2 * p + 1];
        if hi - lo > PAIRING_REL_TOL * scale {
            return Err(Error::Pairing {
                index: p,
                gap: hi - lo,
                tolerance: PAIRING_REL_TOL * scale,
            });
        }
        s.push(0.5 * (hi + lo));
    }

    let mut v = QMatrix::zeros(n, n);
    let mut start = 0;
    for p in 1..=n {
        let split = p == n || jac.s[2 * p - 1] - jac.s[2 * p] > CLUSTER_REL_TOL * scale;
        if !split {
            continue;
        }
        let cols: Vec<Vec<Complex64>> = (2 * start..2 * p).map(|c| jac.v.col(c).to_vec()).collect();
        let reps = symplectic_reduce(cols, start)?;
        for (k, w) in reps.iter().enumerate() {
            set_column_from_complex(&mut v, start + k, w);
        }
        start = p;
    }

    let rank_tol = auto_tol(m, n, s.first().copied().unwrap_or(0.0));
    let mut u = q.matmul(&v)?;
    let mut null_cols = Vec::new();
    for (i, &sig) in s.iter().enumerate() {
        if sig > rank_tol {
            u.scale_column(i, 1.0 / sig);
        } else {
            null_cols.push(i);
        }
    }
    complete_orthonormal(&mut u, &null_cols)?;

    Ok(Qsvd { u, s, v })
}

/// Best rank-r approximation: U[:, ..r] diag(S[..r]) V[:, ..r]^H.
pub fn truncated_qsvd(q: &QMatrix, r: usize) -> Result<QMatrix> {
    let min_dim = q.rows().min(q.cols());
    if r == 0 || r > min_dim {
        return Err(Error::RankOutOfRange { r, min_dim });
    }
    let d = qsvd(q)?;
    let mut u_r = d.u.take_columns(r);
    for (i, &sig) in d.s.iter().take(r).enumerate() {
        u_r.scale_column(i, sig);
    }
    u_r.matmul(&d.v.take_columns(r).conj_transpose())
}

/// Number of singular values above `tol` (or the auto cutoff).
pub fn quaternion_rank(q: &QMatrix, tol: Option<f64>) -> Result<usize> {
    let d = qsvd(q)?;
    let s1 = d.s.first().copied().unwrap_or(0.0);
    let cut = tol.unwrap_or_else(|| auto_tol(q.rows(), q.cols(), s1));
    Ok(d.s.iter().filter(|&&sig| sig > cut).count())
}

fn colmajor(adj: &ComplexAdjoint) -> ColMajor {
    let rows = adj.rows();
    let cols = adj.cols();
    let mut out = ColMajor::zeros(rows, cols);
    for c in 0..cols {
        for r in 0..rows {
            out.data[c * rows + r] = adj.entries[(r, c)];
        }
    }
    out
}

fn cdot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

fn cnorm(x: &[Complex64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn cscale(x: &mut [Complex64], f: f64) {
    for a in x.iter_mut() {
        *a *= f;
    }
}

/// c -= b * <b, c> for unit b.
fn project_out(c: &mut [Complex64], b: &[Complex64]) {
    let g = cdot(b, c);
    for (ck, bk) in c.iter_mut().zip(b.iter()) {
        *ck -= g * bk;
    }
}

/// The antiunitary pairing map on adjoint-shaped vectors.
fn apply_j(w: &[Complex64]) -> Vec<Complex64> {
    let (top, bot) = w.split_at(w.len() / 2);
    bot.iter()
        .map(|c| -c.conj())
        .chain(top.iter().map(|c| c.conj()))
        .collect()
}

/// From `2k` orthonormal complex columns spanning a J-invariant
/// subspace, select `k` representatives whose J-orbits tile it. Each
/// round takes the leading column, removes its orbit {w, Jw} from the
/// rest, and re-orthonormalizes; exactly one direction per round
/// collapses to numerical zero and is dropped.
fn symplectic_reduce(cols: Vec<Vec<Complex64>>, base: usize) -> Result<Vec<Vec<Complex64>>> {
    let target = cols.len() / 2;
    let mut working = cols;
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(target);
    for round in 0..target {
        if working.is_empty() {
            return Err(Error::Pairing {
                index: base + round,
                gap: 0.0,
                tolerance: GS_DROP_TOL,
            });
        }
        let mut w = working.remove(0);
        let scale = 1.0 / cnorm(&w);
        cscale(&mut w, scale);
        let jw = apply_j(&w);
        let drained = std::mem::take(&mut working);
        for mut c in drained {
            // Two passes: classical MGS refresh keeps the cluster basis
            // orthonormal to machine precision.
            for _ in 0..2 {
                project_out(&mut c, &w);
                project_out(&mut c, &jw);
                for b in &working {
                    project_out(&mut c, b);
                }
            }
            let nrm = cnorm(&c);
            if nrm > GS_DROP_TOL {
                cscale(&mut c, 1.0 / nrm);
                working.push(c);
            }
        }
        out.push(w);
    }
    Ok(out)
}

/// Inverse embedding for a single column: w = [a; -conj(b)] maps to the
/// quaternion vector a + b j.
fn set_column_from_complex(v: &mut QMatrix, col: usize, w: &[Complex64]) {
    let n = v.rows();
    debug_assert_eq!(w.len(), 2 * n);
    for k in 0..n {
        let a = w[k];
        let bot = w[n + k];
        v.set(k, col, Quaternion::new(a.re, a.im, -bot.re, bot.im));
    }
}

fn qdot(x: &[Quaternion], y: &[Quaternion]) -> Quaternion {
    let mut acc = Quaternion::zero();
    for (a, b) in x.iter().zip(y.iter()) {
        acc += a.conjugate() * *b;
    }
    acc
}

fn qnorm(x: &[Quaternion]) -> f64 {
    x.iter().map(|q| q.modulus_sq()).sum::<f64>().sqrt()
}

/// Fill the listed columns with unit vectors orthonormal to every other
/// column. Candidates are standard basis vectors; the best residual is
/// kept, so the result is deterministic.
fn complete_orthonormal(u: &mut QMatrix, null_cols: &[usize]) -> Result<()> {
    if null_cols.is_empty() {
        return Ok(());
    }
    let m = u.rows();
    let n = u.cols();
    let mut fixed: Vec<Vec<Quaternion>> = (0..n)
        .filter(|c| !null_cols.contains(c))
        .map(|c| u.column(c))
        .collect();
    for &target in null_cols {
        let mut best: Option<(f64, Vec<Quaternion>)> = None;
        for t in 0..m {
            let mut cand = vec![Quaternion::zero(); m];
            cand[t] = Quaternion::one();
            orthogonalize(&mut cand, &fixed);
            let nrm = qnorm(&cand);
            if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
                best = Some((nrm, cand));
            }
        }
        let (nrm, mut cand) = best.expect("m >= 1");
        if nrm <= GS_DROP_TOL {
            return Err(Error::Pairing {
                index: target,
                gap: nrm,
                tolerance: GS_DROP_TOL,
            });
        }
        orthogonalize(&mut cand, &fixed);
        let nrm = qnorm(&cand);
        for q in cand.iter_mut() {
            *q = q.scale(1.0 / nrm);
        }
        u.set_column(target, &cand);
        fixed.push(cand);
    }
    Ok(())
}

fn orthogonalize(cand: &mut [Quaternion], fixed: &[Vec<Quaternion>]) {
    for f in fixed {
        let g = qdot(f, cand);
        for (ck, fk) in cand.iter_mut().zip(f.iter()) {
            *ck -= *fk * g;
        }
    }
}
