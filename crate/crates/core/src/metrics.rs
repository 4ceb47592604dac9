//! AWGN synthesis and the two quality indexes, PSNR and SSIM.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::image::ColorImageQ;

#[derive(Debug, Clone, Copy)]
pub struct QualityReport {
    pub psnr: f64,
    pub ssim: f64,
}

/// Add N(0, sigma^2) draws to every channel sample. Draw order is fixed
/// (R plane, then G, then B, row-major) so a seed pins the exact noise
/// field. No clipping: noisy values may leave [0, 255].
pub fn add_awgn(image: &ColorImageQ, sigma: f64, seed: u64) -> ColorImageQ {
    assert!(sigma >= 0.0, "noise level must be nonnegative");
    if sigma == 0.0 {
        return image.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (r, g, b) = image.channels();
    let mut noised = |plane: &Array2<f64>| {
        let mut out = plane.clone();
        for v in out.iter_mut() {
            let n: f64 = StandardNormal.sample(&mut rng);
            *v += sigma * n;
        }
        out
    };
    let r = noised(r);
    let g = noised(g);
    let b = noised(b);
    ColorImageQ::from_channels(r, g, b)
}

fn check_dims(op: &'static str, a: &ColorImageQ, b: &ColorImageQ) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            op,
            left_rows: a.height(),
            left_cols: a.width(),
            right_rows: b.height(),
            right_cols: b.width(),
        });
    }
    Ok(())
}

/// 10 log10(255^2 / MSE) with the MSE taken over all 3MN channel
/// samples. Identical images return +infinity.
pub fn psnr(reference: &ColorImageQ, test: &ColorImageQ) -> Result<f64> {
    check_dims("psnr", reference, test)?;
    let diff = reference.qmatrix().sub(test.qmatrix());
    let samples = (3 * reference.height() * reference.width()) as f64;
    let mse = diff.frobenius_norm_sq() / samples;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = (0.01 * 255.0) * (0.01 * 255.0);
const SSIM_C2: f64 = (0.03 * 255.0) * (0.03 * 255.0);

/// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, L = 255, computed per channel on the interior
/// where the window fits, then averaged over channels.
pub fn ssim(reference: &ColorImageQ, test: &ColorImageQ) -> Result<f64> {
    check_dims("ssim", reference, test)?;
    let side = reference.height().min(reference.width());
    if side < SSIM_WINDOW {
        return Err(Error::TooSmall {
            side,
            min: SSIM_WINDOW,
        });
    }
    let kernel = gaussian_kernel();
    let (r1, g1, b1) = reference.channels();
    let (r2, g2, b2) = test.channels();
    let total = ssim_channel(r1, r2, &kernel)
        + ssim_channel(g1, g2, &kernel)
        + ssim_channel(b1, b2, &kernel);
    Ok(total / 3.0)
}

pub fn quality(reference: &ColorImageQ, test: &ColorImageQ) -> Result<QualityReport> {
    Ok(QualityReport {
        psnr: psnr(reference, test)?,
        ssim: ssim(reference, test)?,
    })
}

fn gaussian_kernel() -> [f64; SSIM_WINDOW] {
    let mut k = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *v;
    }
    for v in k.iter_mut() {
        *v /= sum;
    }
    k
}

/// Separable valid-mode filtering: output is (M-10) x (N-10).
fn filter_valid(img: &Array2<f64>, kernel: &[f64; SSIM_WINDOW]) -> Array2<f64> {
    let (m, n) = img.dim();
    let mut horiz = Array2::zeros((m, n - SSIM_WINDOW + 1));
    for r in 0..m {
        for c in 0..n - SSIM_WINDOW + 1 {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                acc += w * img[(r, c + k)];
            }
            horiz[(r, c)] = acc;
        }
    }
    let (m, n) = horiz.dim();
    let mut out = Array2::zeros((m - SSIM_WINDOW + 1, n));
    for r in 0..m - SSIM_WINDOW + 1 {
        for c in 0..n {
            let mut acc = 0.0;
            for (k, w) in kernel.iter().enumerate() {
                acc += w * horiz[(r + k, c)];
            }
            out[(r, c)] = acc;
        }
    }
    out
}

fn ssim_channel(a: &Array2<f64>, b: &Array2<f64>, kernel: &[f64; SSIM_WINDOW]) -> f64 {
    let mu1 = filter_valid(a, kernel);
    let mu2 = filter_valid(b, kernel);
    let s11 = filter_valid(&(a * a), kernel);
    let s22 = filter_valid(&(b * b), kernel);
    let s12 = filter_valid(&(a * b), kernel);

    let mut sum = 0.0;
    for (((( &m1, &m2), &e11), &e22), &e12) in mu1
        .iter()
        .zip(mu2.iter())
        .zip(s11.iter())
        .zip(s22.iter())
        .zip(s12.iter())
    {
        let var1 = e11 - m1 * m1;
        let var2 = e22 - m2 * m2;
        let cov = e12 - m1 * m2;
        let num = (2.0 * m1 * m2 + SSIM_C1) * (2.0 * cov + SSIM_C2);
        let den = (m1 * m1 + m2 * m2 + SSIM_C1) * (var1 + var2 + SSIM_C2);
        sum += num / den;
    }
    sum / mu1.len() as f64
}
