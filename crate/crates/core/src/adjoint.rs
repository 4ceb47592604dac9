//! Complex-adjoint embedding of quaternion matrices.
//!
//! A quaternion matrix splits as `Q = A + B·j` with complex parts
//! `A = Q0 + Q1·i` and `B = Q2 + Q3·i`. The embedding
//!
//! ```text
//! χ(Q) = [  A   B ]
//!        [ -B̄   Ā ]
//! ```
//!
//! is an algebra homomorphism: `χ(PQ) = χ(P)·χ(Q)` and `χ(Qᴴ) = χ(Q)ᴴ`,
//! so spectral questions about `Q` reduce to questions about a complex
//! matrix of twice the size. Each quaternion entry's energy appears twice
//! in the embedding, hence `‖χ(Q)‖_F = √2·‖Q‖_F`.

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmatrix::QMatrix;

const ASYMMETRY_TOL: f64 = 1e-8;

/// The 2M×2N complex image of an M×N quaternion matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexAdjoint {
    pub entries: Array2<Complex64>,
}

impl ComplexAdjoint {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Complex matrix product of two adjoints.
    pub fn matmul(&self, rhs: &ComplexAdjoint) -> Result<ComplexAdjoint> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                op: "adjoint matmul",
                left_rows: self.rows(),
                left_cols: self.cols(),
                right_rows: rhs.rows(),
                right_cols: rhs.cols(),
            });
        }
        Ok(ComplexAdjoint {
            entries: self.entries.dot(&rhs.entries),
        })
    }

    pub fn conj_transpose(&self) -> ComplexAdjoint {
        ComplexAdjoint {
            entries: self.entries.t().mapv(|c| c.conj()),
        }
    }
}

/// Embed `Q` as its 2M×2N complex adjoint.
pub fn to_adjoint(q: &QMatrix) -> ComplexAdjoint {
    let (m, n) = q.shape();
    let mut entries = Array2::zeros((2 * m, 2 * n));
    for r in 0..m {
        for c in 0..n {
            let a = Complex64::new(q.w[(r, c)], q.x[(r, c)]);
            let b = Complex64::new(q.y[(r, c)], q.z[(r, c)]);
            entries[(r, c)] = a;
            entries[(r, c + n)] = b;
            entries[(r + m, c)] = -b.conj();
            entries[(r + m, c + n)] = a.conj();
        }
    }
    ComplexAdjoint { entries }
}

/// Invert the embedding. The lower block row is checked against the
/// structure implied by the upper one; a relative deviation above `1e-8`
/// signals a corrupted adjoint.
pub fn from_adjoint(adj: &ComplexAdjoint) -> Result<QMatrix> {
    let rows = adj.rows();
    let cols = adj.cols();
    if !rows.is_multiple_of(2) || !cols.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "adjoint must have even dimensions, got {rows}x{cols}"
        )));
    }
    let (m, n) = (rows / 2, cols / 2);
    let e = &adj.entries;

    let mut deviation_sq = 0.0;
    for r in 0..m {
        for c in 0..n {
            let a = e[(r, c)];
            let b = e[(r, c + n)];
            let d1 = e[(r + m, c)] + b.conj();
            let d2 = e[(r + m, c + n)] - a.conj();
            deviation_sq += d1.norm_sqr() + d2.norm_sqr();
        }
    }
    let scale = adj.frobenius_norm().max(f64::MIN_POSITIVE);
    let deviation = deviation_sq.sqrt() / scale;
    if deviation > ASYMMETRY_TOL {
        return Err(Error::Asymmetry {
            deviation,
            tolerance: ASYMMETRY_TOL,
        });
    }

    let mut q = QMatrix::zeros(m, n);
    for r in 0..m {
        for c in 0..n {
            let a = e[(r, c)];
            let b = e[(r, c + n)];
            q.w[(r, c)] = a.re;
            q.x[(r, c)] = a.im;
            q.y[(r, c)] = b.re;
            q.z[(r, c)] = b.im;
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion;

    fn max_abs_diff(a: &ComplexAdjoint, b: &ComplexAdjoint) -> f64 {
        a.entries
            .iter()
            .zip(b.entries.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn scalar_embedding_block_layout() {
        let mut q = QMatrix::zeros(1, 1);
        q.set(0, 0, Quaternion::new(1.0, 2.0, 3.0, 4.0));
        let adj = to_adjoint(&q);
        assert_eq!(adj.entries[(0, 0)], Complex64::new(1.0, 2.0));
        assert_eq!(adj.entries[(0, 1)], Complex64::new(3.0, 4.0));
        assert_eq!(adj.entries[(1, 0)], Complex64::new(-3.0, 4.0));
        assert_eq!(adj.entries[(1, 1)], Complex64::new(1.0, -2.0));
    }

    #[test]
    fn real_matrix_embeds_block_diagonal() {
        let mut q = QMatrix::zeros(2, 2);
        q.set(0, 0, Quaternion::real(1.0));
        q.set(1, 1, Quaternion::real(-2.5));
        q.set(0, 1, Quaternion::real(0.75));
        let adj = to_adjoint(&q);
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(adj.entries[(r, c + 2)], Complex64::new(0.0, 0.0));
                assert_eq!(adj.entries[(r + 2, c)], Complex64::new(0.0, 0.0));
                assert_eq!(adj.entries[(r, c)], adj.entries[(r + 2, c + 2)]);
            }
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let q = QMatrix::random_gaussian(3, 5, 77);
        let back = from_adjoint(&to_adjoint(&q)).unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn identity_adjoint_recovers_scalar_one() {
        let adj = to_adjoint(&QMatrix::identity(1));
        let q = from_adjoint(&adj).unwrap();
        assert_eq!(q.get(0, 0), Quaternion::one());
    }

    #[test]
    fn multiplicative_homomorphism_on_random_pairs() {
        for seed in 0..10u64 {
            let p = QMatrix::random_gaussian(4, 4, 300 + seed);
            let q = QMatrix::random_gaussian(4, 4, 400 + seed);
            let lhs = to_adjoint(&p.matmul(&q).unwrap());
            let rhs = to_adjoint(&p).matmul(&to_adjoint(&q)).unwrap();
            assert!(max_abs_diff(&lhs, &rhs) <= 1e-12, "seed {seed}");
        }
    }

    #[test]
    fn conj_transpose_commutes_with_embedding() {
        let q = QMatrix::random_gaussian(3, 6, 88);
        let lhs = to_adjoint(&q.conj_transpose());
        let rhs = to_adjoint(&q).conj_transpose();
        assert!(max_abs_diff(&lhs, &rhs) == 0.0);
    }

    #[test]
    fn embedding_doubles_energy() {
        let q = QMatrix::random_gaussian(5, 4, 99);
        let lhs = q.frobenius_norm();
        let rhs = to_adjoint(&q).frobenius_norm() / 2f64.sqrt();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs);
    }

    #[test]
    fn perturbed_lower_block_is_rejected() {
        let q = QMatrix::random_gaussian(3, 3, 123);
        let mut adj = to_adjoint(&q);
        let bump = adj.frobenius_norm() * 1e-4;
        adj.entries[(4, 1)] += Complex64::new(bump, 0.0);
        match from_adjoint(&adj) {
            Err(Error::Asymmetry { deviation, .. }) => assert!(deviation > 1e-8),
            other => panic!("expected Asymmetry, got {other:?}"),
        }
    }
}
