//! Dense quaternion matrices stored as four real component planes.
//!
//! A matrix `Q = Q0 + Q1·i + Q2·j + Q3·k` keeps each component in its own
//! row-major `Array2<f64>`. Keeping the planes separate lets the quaternion
//! matrix product run as sixteen real matrix products, which is where all
//! the throughput of the randomized fast path comes from.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

/// Dense M×N quaternion matrix as four real planes (w, x, y, z).
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    pub w: Array2<f64>,
    pub x: Array2<f64>,
    pub y: Array2<f64>,
    pub z: Array2<f64>,
}

impl QMatrix {
    /// Zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            w: Array2::zeros((rows, cols)),
            x: Array2::zeros((rows, cols)),
            y: Array2::zeros((rows, cols)),
            z: Array2::zeros((rows, cols)),
        }
    }

    /// Identity matrix (real part only).
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for d in 0..n {
            m.w[(d, d)] = 1.0;
        }
        m
    }

    /// Build from four planes. All planes must share one shape.
    pub fn from_planes(w: Array2<f64>, x: Array2<f64>, y: Array2<f64>, z: Array2<f64>) -> Self {
        assert!(
            w.dim() == x.dim() && x.dim() == y.dim() && y.dim() == z.dim(),
            "component planes must share dimensions"
        );
        Self { w, x, y, z }
    }

    /// Build entrywise from a closure.
    pub fn from_fn<F: FnMut(usize, usize) -> Quaternion>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.w.nrows()
    }

    pub fn cols(&self) -> usize {
        self.w.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Quaternion {
        Quaternion::new(self.w[(r, c)], self.x[(r, c)], self.y[(r, c)], self.z[(r, c)])
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, q: Quaternion) {
        self.w[(r, c)] = q.w;
        self.x[(r, c)] = q.x;
        self.y[(r, c)] = q.y;
        self.z[(r, c)] = q.z;
    }

    /// Column `c` as a dense quaternion vector.
    pub fn column(&self, c: usize) -> Vec<Quaternion> {
        (0..self.rows()).map(|r| self.get(r, c)).collect()
    }

    pub fn set_column(&mut self, c: usize, v: &[Quaternion]) {
        assert_eq!(v.len(), self.rows());
        for (r, q) in v.iter().enumerate() {
            self.set(r, c, *q);
        }
    }

    /// Quaternion matrix product; sixteen real plane products.
    pub fn matmul(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.cols() != rhs.rows() {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left_rows: self.rows(),
                left_cols: self.cols(),
                right_rows: rhs.rows(),
                right_cols: rhs.cols(),
            });
        }
        let (aw, ax, ay, az) = (&self.w, &self.x, &self.y, &self.z);
        let (bw, bx, by, bz) = (&rhs.w, &rhs.x, &rhs.y, &rhs.z);

        let mut cw = aw.dot(bw);
        cw -= &ax.dot(bx);
        cw -= &ay.dot(by);
        cw -= &az.dot(bz);

        let mut cx = aw.dot(bx);
        cx += &ax.dot(bw);
        cx += &ay.dot(bz);
        cx -= &az.dot(by);

        let mut cy = aw.dot(by);
        cy -= &ax.dot(bz);
        cy += &ay.dot(bw);
        cy += &az.dot(bx);

        let mut cz = aw.dot(bz);
        cz += &ax.dot(by);
        cz -= &ay.dot(bx);
        cz += &az.dot(bw);

        Ok(QMatrix { w: cw, x: cx, y: cy, z: cz })
    }

    /// Conjugate transpose: `(A^H)(n,m) = conj(A(m,n))`.
    pub fn conj_transpose(&self) -> QMatrix {
        QMatrix {
            w: self.w.t().to_owned(),
            x: self.x.t().mapv(|v| -v),
            y: self.y.t().mapv(|v| -v),
            z: self.z.t().mapv(|v| -v),
        }
    }

    /// Frobenius norm: square root of the sum of squared entry moduli.
    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        let s = |p: &Array2<f64>| p.iter().map(|v| v * v).sum::<f64>();
        s(&self.w) + s(&self.x) + s(&self.y) + s(&self.z)
    }

    /// Largest entry modulus.
    pub fn max_entry_modulus(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                m = m.max(self.get(r, c).modulus());
            }
        }
        m
    }

    pub fn add(&self, rhs: &QMatrix) -> QMatrix {
        QMatrix {
            w: &self.w + &rhs.w,
            x: &self.x + &rhs.x,
            y: &self.y + &rhs.y,
            z: &self.z + &rhs.z,
        }
    }

    pub fn sub(&self, rhs: &QMatrix) -> QMatrix {
        QMatrix {
            w: &self.w - &rhs.w,
            x: &self.x - &rhs.x,
            y: &self.y - &rhs.y,
            z: &self.z - &rhs.z,
        }
    }

    /// Scale every entry by a real factor.
    pub fn scale(&self, s: f64) -> QMatrix {
        QMatrix {
            w: self.w.mapv(|v| v * s),
            x: self.x.mapv(|v| v * s),
            y: self.y.mapv(|v| v * s),
            z: self.z.mapv(|v| v * s),
        }
    }

    /// Scale column `c` by a real factor, in place.
    pub fn scale_column(&mut self, c: usize, s: f64) {
        for r in 0..self.rows() {
            self.w[(r, c)] *= s;
            self.x[(r, c)] *= s;
            self.y[(r, c)] *= s;
            self.z[(r, c)] *= s;
        }
    }

    /// Copy of columns `0..k`.
    pub fn take_columns(&self, k: usize) -> QMatrix {
        assert!(k <= self.cols());
        QMatrix::from_fn(self.rows(), k, |r, c| self.get(r, c))
    }

    /// All four planes filled with i.i.d. standard normal draws from a
    /// seeded generator. Identical seed, identical matrix; the draw order
    /// is plane by plane (w, x, y, z), row-major within a plane.
    pub fn random_gaussian(rows: usize, cols: usize, seed: u64) -> QMatrix {
        assert!(rows >= 1 && cols >= 1, "random matrix needs positive shape");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut plane = || {
            let data: Vec<f64> = (0..rows * cols)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            Array2::from_shape_vec((rows, cols), data).expect("shape matches draw count")
        };
        let w = plane();
        let x = plane();
        let y = plane();
        let z = plane();
        QMatrix { w, x, y, z }
    }
}

/// Solve `A · Z = B` by Gaussian elimination over quaternions with partial
/// pivoting on entry modulus. All eliminations are applied by left
/// multiplication so the non-commutative order is preserved; no explicit
/// inverse is formed.
///
/// Fails with [`Error::SingularMatrix`] when a pivot modulus falls below
/// `1e-12` times the largest initial entry modulus of `A`.
// Index loops mirror the textbook elimination; parallel row mutation rules
// out iterator forms.
#[allow(clippy::needless_range_loop)]
pub fn solve_linear(a: &QMatrix, b: &QMatrix) -> Result<QMatrix> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n {
        return Err(Error::DimensionMismatch {
            op: "solve_linear",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    let ncols = b.cols();
    let threshold = 1e-12 * a.max_entry_modulus();

    // Dense scalar working copies; the solver only ever sees small r×r systems.
    let mut lhs: Vec<Vec<Quaternion>> = (0..n).map(|r| a.row_entries(r)).collect();
    let mut rhs: Vec<Vec<Quaternion>> = (0..n).map(|r| b.row_entries(r)).collect();

    for k in 0..n {
        let (pivot_row, pivot_mod) = (k..n)
            .map(|r| (r, lhs[r][k].modulus()))
            .max_by(|l, r| l.1.total_cmp(&r.1))
            .expect("non-empty pivot range");
        if pivot_mod <= threshold {
            return Err(Error::SingularMatrix {
                pivot: k,
                modulus: pivot_mod,
                threshold,
            });
        }
        lhs.swap(k, pivot_row);
        rhs.swap(k, pivot_row);

        let pivot_inv = lhs[k][k].inverse().expect("pivot modulus above threshold");
        for r in k + 1..n {
            let factor = lhs[r][k] * pivot_inv;
            if factor == Quaternion::zero() {
                continue;
            }
            for c in k..n {
                let t = factor * lhs[k][c];
                lhs[r][c] -= t;
            }
            for c in 0..ncols {
                let t = factor * rhs[k][c];
                rhs[r][c] -= t;
            }
        }
    }

    // Back substitution, pivot inverse applied from the left.
    let mut out = QMatrix::zeros(n, ncols);
    for k in (0..n).rev() {
        let pivot_inv = lhs[k][k].inverse().expect("pivot modulus above threshold");
        for c in 0..ncols {
            let mut acc = rhs[k][c];
            for j in k + 1..n {
                acc -= lhs[k][j] * out.get(j, c);
            }
            out.set(k, c, pivot_inv * acc);
        }
    }
    Ok(out)
}

impl QMatrix {
    fn row_entries(&self, r: usize) -> Vec<Quaternion> {
        (0..self.cols()).map(|c| self.get(r, c)).collect()
    }
}
