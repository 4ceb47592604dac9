//! Color images as pure quaternion matrices.
//!
//! A pixel is 0 + R i + G j + B k; the real plane stays identically
//! zero through every pipeline stage. Channel values are nominally in
//! [0, 255] but intermediates (noisy or blended images) may leave that
//! range; clipping happens once, at the end of a pipeline.

use ndarray::Array2;

use crate::qmatrix::QMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ColorImageQ {
    q: QMatrix,
}

impl ColorImageQ {
    pub fn zeros(height: usize, width: usize) -> Self {
        Self {
            q: QMatrix::zeros(height, width),
        }
    }

    /// Channels map to the i, j, k planes in RGB order.
    pub fn from_channels(r: Array2<f64>, g: Array2<f64>, b: Array2<f64>) -> Self {
        let dim = r.dim();
        Self {
            q: QMatrix::from_planes(Array2::zeros(dim), r, g, b),
        }
    }

    /// Keeps the imaginary planes and discards the real plane, which
    /// low-rank approximation leaves only approximately zero.
    pub fn from_qmatrix(q: QMatrix) -> Self {
        let mut q = q;
        q.w.fill(0.0);
        Self { q }
    }

    pub fn height(&self) -> usize {
        self.q.rows()
    }

    pub fn width(&self) -> usize {
        self.q.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.q.shape()
    }

    pub fn qmatrix(&self) -> &QMatrix {
        &self.q
    }

    pub fn channels(&self) -> (&Array2<f64>, &Array2<f64>, &Array2<f64>) {
        (&self.q.x, &self.q.y, &self.q.z)
    }

    #[inline]
    pub fn pixel(&self, r: usize, c: usize) -> [f64; 3] {
        [self.q.x[(r, c)], self.q.y[(r, c)], self.q.z[(r, c)]]
    }

    #[inline]
    pub fn set_pixel(&mut self, r: usize, c: usize, rgb: [f64; 3]) {
        self.q.x[(r, c)] = rgb[0];
        self.q.y[(r, c)] = rgb[1];
        self.q.z[(r, c)] = rgb[2];
    }

    /// Channels clamped to [0, 255].
    pub fn clipped(&self) -> Self {
        let clamp = |p: &Array2<f64>| p.mapv(|v| v.clamp(0.0, 255.0));
        Self::from_channels(clamp(&self.q.x), clamp(&self.q.y), clamp(&self.q.z))
    }

    pub fn max_channel_diff(&self, other: &ColorImageQ) -> f64 {
        self.q.sub(&other.q).max_entry_modulus()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_plane_stays_zero() {
        let img = ColorImageQ::from_channels(
            Array2::from_elem((3, 4), 10.0),
            Array2::from_elem((3, 4), 20.0),
            Array2::from_elem((3, 4), 300.0),
        );
        assert!(img.qmatrix().w.iter().all(|&v| v == 0.0));
        assert_eq!(img.pixel(1, 2), [10.0, 20.0, 300.0]);
        let clipped = img.clipped();
        assert_eq!(clipped.pixel(0, 0), [10.0, 20.0, 255.0]);
    }

    #[test]
    fn from_qmatrix_discards_real_plane() {
        let mut q = QMatrix::zeros(2, 2);
        q.w.fill(7.0);
        q.x.fill(1.0);
        let img = ColorImageQ::from_qmatrix(q);
        assert!(img.qmatrix().w.iter().all(|&v| v == 0.0));
        assert_eq!(img.pixel(0, 0), [1.0, 0.0, 0.0]);
    }
}
