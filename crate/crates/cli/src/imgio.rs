//! Image loading and saving.
//!
//! 8-bit RGB PNG is the interchange format; a float sidecar (QIMGF1,
//! same path with ".qimgf" appended) preserves unclipped values between
//! pipeline stages. Loading prefers the sidecar when present so the
//! no-intermediate-clipping policy survives process boundaries.

use std::path::{Path, PathBuf};

use image::RgbImage;
use ndarray::Array2;

use clqa_core::ColorImageQ;

use crate::errors::{CliError, CliResult};
use crate::formats;

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".qimgf");
    PathBuf::from(name)
}

pub fn load_png(path: &Path) -> CliResult<ColorImageQ> {
    let decoded = image::open(path).map_err(|e| CliError::io(path, e))?;
    let rgb = decoded.to_rgb8();
    let (width, height) = rgb.dimensions();
    let (m, n) = (height as usize, width as usize);
    let mut r = Array2::zeros((m, n));
    let mut g = Array2::zeros((m, n));
    let mut b = Array2::zeros((m, n));
    for (x, y, px) in rgb.enumerate_pixels() {
        let at = (y as usize, x as usize);
        r[at] = px.0[0] as f64;
        g[at] = px.0[1] as f64;
        b[at] = px.0[2] as f64;
    }
    Ok(ColorImageQ::from_channels(r, g, b))
}

/// Load for pipeline use: the float sidecar wins over the 8-bit file.
/// Returns whether the sidecar was used.
pub fn load_image(path: &Path) -> CliResult<(ColorImageQ, bool)> {
    let sidecar = sidecar_path(path);
    if sidecar.is_file() {
        Ok((formats::read_qimg(&sidecar)?, true))
    } else {
        Ok((load_png(path)?, false))
    }
}

/// Channels clipped and rounded onto the 8-bit grid, still as floats;
/// equals what a save-then-load round trip produces.
pub fn quantize(img: &ColorImageQ) -> ColorImageQ {
    let q = |p: &Array2<f64>| p.mapv(|v| v.clamp(0.0, 255.0).round());
    let (r, g, b) = img.channels();
    ColorImageQ::from_channels(q(r), q(g), q(b))
}

pub fn save_png(path: &Path, img: &ColorImageQ) -> CliResult<()> {
    let (m, n) = img.shape();
    let mut out = RgbImage::new(n as u32, m as u32);
    for r in 0..m {
        for c in 0..n {
            let px = img.pixel(r, c);
            out.put_pixel(
                c as u32,
                r as u32,
                image::Rgb([
                    px[0].clamp(0.0, 255.0).round() as u8,
                    px[1].clamp(0.0, 255.0).round() as u8,
                    px[2].clamp(0.0, 255.0).round() as u8,
                ]),
            );
        }
    }
    out.save(path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clqa_core::synth::sample_scene;

    #[test]
    fn png_round_trip_preserves_in_range_values() {
        let img = quantize(&sample_scene(11, 13, 5));
        let dir = std::env::temp_dir().join("clqa-imgio-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.png");
        save_png(&path, &img).unwrap();
        let (back, used_sidecar) = load_image(&path).unwrap();
        assert!(!used_sidecar);
        assert_eq!(back, img);
    }

    #[test]
    fn sidecar_wins_when_present() {
        let img = sample_scene(8, 8, 6);
        let shifted = {
            let (r, g, b) = img.channels();
            ColorImageQ::from_channels(r + 300.0, g.clone(), b.clone())
        };
        let dir = std::env::temp_dir().join("clqa-imgio-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("s.png");
        save_png(&path, &img).unwrap();
        formats::write_qimg(&sidecar_path(&path), &shifted).unwrap();
        let (back, used_sidecar) = load_image(&path).unwrap();
        assert!(used_sidecar);
        assert_eq!(back, shifted);
    }
}
