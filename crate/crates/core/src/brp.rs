//! Bilateral random projections and the rank-constrained approximation
//! built on them.
//!
//! The sketch is three products with a Gaussian quaternion test matrix:
//! P1 = Y A1 (kept pre-power as A2), P2 = Y^H P1, then P1 = Y P2. The
//! reconstruction P1 (A2^H P1)^{-1} P2^H is exact whenever rank(Y) <= r
//! and costs O(MNr) flops, against the adjoint SVD's O(MN min(M,N)).
//!
//! When rank(A2^H P1) falls short of r the input cannot support rank r:
//! the target rank drops to the measured rank, the test matrix is
//! regenerated from a derived seed, and the sketch restarts. Restarts
//! strictly decrease r, so the loop is bounded; r = 0 means a
//! numerically zero input and yields the zero matrix.

use crate::error::{Error, Result};
use crate::qmatrix::{solve_linear, QMatrix};
use crate::qsvd::quaternion_rank;
use crate::seed::derive_seed;

#[derive(Debug, Clone)]
pub struct BrpConfig {
    /// Target rank; the result satisfies rank <= r.
    pub r: usize,
    /// Iteration budget; each iteration redraws the test matrix and the
    /// best iterate by residual wins. One iteration suffices in practice.
    pub t: usize,
    pub seed: u64,
    /// Cutoff forwarded to the rank check; `None` selects the spectral
    /// auto tolerance.
    pub rank_tol: Option<f64>,
}

impl BrpConfig {
    pub fn new(r: usize, seed: u64) -> Self {
        Self {
            r,
            t: 1,
            seed,
            rank_tol: None,
        }
    }
}

/// Projection triple for one draw of the test matrix. `a2` is the
/// pre-power copy of `p1`; all three share `effective_r` columns.
pub struct BrpSketch {
    pub p1: QMatrix,
    pub p2: QMatrix,
    pub a2: QMatrix,
    pub effective_r: usize,
}

/// Diagnostics from a `clqa_brp_detailed` run.
#[derive(Debug, Clone, Copy)]
pub struct BrpStats {
    /// Rank actually used after any deficiency restarts.
    pub effective_r: usize,
    /// Number of deficiency restarts across all iterations.
    pub restarts: usize,
    /// Frobenius residual of the returned iterate.
    pub residual: f64,
}

/// Draw the test matrix and run the projection and power assignments in
/// order.
pub fn qbrp_sketch(y: &QMatrix, r: usize, seed: u64) -> Result<BrpSketch> {
    let (m, n) = y.shape();
    let min_dim = m.min(n);
    if r == 0 || r > min_dim {
        return Err(Error::RankOutOfRange { r, min_dim });
    }
    let a1 = QMatrix::random_gaussian(n, r, seed);
    let p1 = y.matmul(&a1)?;
    let a2 = p1.clone();
    let p2 = y.conj_transpose().matmul(&p1)?;
    let p1 = y.matmul(&p2)?;
    Ok(BrpSketch {
        p1,
        p2,
        a2,
        effective_r: r,
    })
}

/// P1 (A2^H P1)^{-1} P2^H, with the inverse applied as a linear solve.
pub fn brp_reconstruct(sketch: &BrpSketch) -> Result<QMatrix> {
    let gram = sketch.a2.conj_transpose().matmul(&sketch.p1)?;
    let g = solve_linear(&gram, &sketch.p2.conj_transpose())?;
    sketch.p1.matmul(&g)
}

/// Rank-constrained approximation: best-of-T reconstructions with the
/// deficiency branch. Deterministic given (Y, config).
pub fn clqa_brp(y: &QMatrix, config: &BrpConfig) -> Result<QMatrix> {
    clqa_brp_detailed(y, config).map(|(x, _)| x)
}

pub fn clqa_brp_detailed(y: &QMatrix, config: &BrpConfig) -> Result<(QMatrix, BrpStats)> {
    let (m, n) = y.shape();
    let min_dim = m.min(n);
    if config.r == 0 || config.r > min_dim {
        return Err(Error::RankOutOfRange {
            r: config.r,
            min_dim,
        });
    }
    if config.t == 0 {
        return Err(Error::InvalidConfig(
            "iteration budget T must be at least 1".into(),
        ));
    }

    let mut r = config.r;
    let mut restarts = 0usize;
    let mut best: Option<(QMatrix, f64)> = None;
    for t in 0..config.t {
        let x_t = loop {
            if r == 0 {
                break QMatrix::zeros(m, n);
            }
            let seed = derive_seed(config.seed, t as u64, restarts as u64);
            let sketch = qbrp_sketch(y, r, seed)?;
            let gram = sketch.a2.conj_transpose().matmul(&sketch.p1)?;
            let rank = quaternion_rank(&gram, config.rank_tol)?;
            if rank < r {
                r = rank;
                restarts += 1;
                continue;
            }
            match brp_reconstruct(&sketch) {
                Ok(x) => break x,
                // The solve can flag singularity the rank check rounded
                // over; treat it as one more deficiency event.
                Err(Error::SingularMatrix { .. }) => {
                    r -= 1;
                    restarts += 1;
                }
                Err(e) => return Err(e),
            }
        };
        let residual = y.sub(&x_t).frobenius_norm();
        if best.as_ref().is_none_or(|(_, b)| residual < *b) {
            best = Some((x_t, residual));
        }
    }
    let (x, residual) = best.expect("T >= 1 guarantees an iterate");
    Ok((
        x,
        BrpStats {
            effective_r: r,
            restarts,
            residual,
        },
    ))
}
