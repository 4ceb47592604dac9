//! Deterministic synthetic color scenes for tests and benchmarks.
//!
//! The generator mixes the structures patch-based denoising relies on:
//! smooth shading (low-rank smooth groups), periodic texture (exact
//! nonlocal repeats), plateau cells and a wedge edge (self-similar
//! straight boundaries). Channel values land in [0, 255]; a seed only
//! moves phases and offsets, so scenes are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::image::ColorImageQ;

pub fn sample_scene(height: usize, width: usize, seed: u64) -> ColorImageQ {
    use std::f64::consts::TAU;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phase = || rng.gen::<f64>() * TAU;
    let (p1, p2, p3, p4) = (phase(), phase(), phase(), phase());
    let slope = 0.4 + ChaCha8Rng::seed_from_u64(seed ^ 0x9e37).gen::<f64>() * 0.5;
    let cut = height as f64 * (0.25 + (seed % 5) as f64 * 0.1);

    let mut img = ColorImageQ::zeros(height, width);
    for r in 0..height {
        for c in 0..width {
            let x = c as f64;
            let y = r as f64;
            let shade = 40.0 * (x * TAU / 48.0 + p1).sin() * (y * TAU / 64.0 + p2).cos();
            let tex = 15.0 * ((x * TAU / 8.0 + p3).sin() + (y * TAU / 12.0 + p4).sin());
            let plateau = if (r / 20 + c / 20) % 2 == 0 { 34.0 } else { -34.0 };
            let wedge = if y > slope * x + cut { 28.0 } else { -18.0 };
            let red = 128.0 + shade + 0.8 * tex + plateau;
            let green = 120.0 + 0.9 * shade - plateau + wedge;
            let blue = 135.0 - 0.7 * shade + tex + 0.5 * wedge;
            img.set_pixel(
                r,
                c,
                [
                    red.clamp(0.0, 255.0),
                    green.clamp(0.0, 255.0),
                    blue.clamp(0.0, 255.0),
                ],
            );
        }
    }
    img
}
