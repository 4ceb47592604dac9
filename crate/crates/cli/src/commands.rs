//! Command bodies. The argument parser and manifest replay both call these,
//! so a rerun goes through exactly the code path of the original invocation.
//!
//! Every command that produces a file also writes a `<output>.manifest`
//! recording the resolved parameters and stage wall times; replay skips the
//! manifest write and ignores `time_*` keys, so outputs are reproduced
//! bit-exactly while the original manifest stays untouched.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clqa_core::seed::derive_seed;
use clqa_core::{
    add_awgn, clqa_brp, clqa_brp_detailed, denoise_image, psnr, quality, truncated_qsvd,
    BrpConfig, DenoiseConfig, QMatrix,
};

use crate::errors::{CliError, CliResult};
use crate::formats::{read_qmat, write_qimg, write_qmat};
use crate::imgio::{load_image, quantize, save_png, sidecar_path};
use crate::manifest::Manifest;

pub fn cmd_add_noise(
    input: &Path,
    output: &Path,
    sigma: f64,
    seed: u64,
    write_manifest: bool,
) -> CliResult<()> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(CliError::Validation(format!(
            "sigma must be finite and >= 0, got {sigma}"
        )));
    }
    let started = Instant::now();
    let (clean, _) = load_image(input)?;
    let noisy = add_awgn(&clean, sigma, seed);
    if sigma == 0.0 {
        // Byte-identical copy; the encoder never touches the data.
        fs::copy(input, output).map_err(|e| CliError::io(output, e))?;
    } else {
        save_png(output, &noisy)?;
    }
    // Unclipped values survive for downstream pipeline stages.
    write_qimg(&sidecar_path(output), &noisy)?;
    let db = psnr(&clean, &noisy)?;
    println!("PSNR={db:.4}");
    if write_manifest {
        let mut m = Manifest::new("add-noise");
        m.push("input", input.display());
        m.push("output", output.display());
        m.push("sigma", sigma);
        m.push("seed", seed);
        m.push("time_total", started.elapsed().as_secs_f64());
        m.write_next_to(output)?;
    }
    Ok(())
}

pub fn cmd_denoise(
    input: &Path,
    output: &Path,
    reference: Option<&Path>,
    config: &DenoiseConfig,
    write_manifest: bool,
) -> CliResult<()> {
    let started = Instant::now();
    let (noisy, _) = load_image(input)?;
    let denoise_started = Instant::now();
    let restored = denoise_image(&noisy, config)?;
    let time_denoise = denoise_started.elapsed().as_secs_f64();
    save_png(output, &restored)?;
    if let Some(ref_path) = reference {
        let (reference_img, _) = load_image(ref_path)?;
        // Scored on the quantized output, i.e. exactly what was saved.
        let report = quality(&reference_img, &quantize(&restored))?;
        println!("PSNR={:.4} SSIM={:.6}", report.psnr, report.ssim);
    }
    if write_manifest {
        let mut m = Manifest::new("denoise");
        m.push("input", input.display());
        m.push("output", output.display());
        if let Some(ref_path) = reference {
            m.push("reference", ref_path.display());
        }
        m.push("sigma", config.sigma);
        m.push("patch", config.patch);
        m.push("group", config.group);
        m.push("rank", config.rank);
        m.push("rounds", config.rounds);
        m.push("search_window", config.search_window);
        m.push("stride", config.stride);
        m.push("delta", config.delta);
        m.push("seed", config.seed);
        m.push("time_denoise", time_denoise);
        m.push("time_total", started.elapsed().as_secs_f64());
        m.write_next_to(output)?;
    }
    Ok(())
}

pub fn cmd_approx(
    input: &Path,
    output: &Path,
    r: usize,
    trials: usize,
    seed: u64,
    oracle: bool,
    write_manifest: bool,
) -> CliResult<()> {
    let started = Instant::now();
    let y = read_qmat(input)?;
    let config = BrpConfig {
        r,
        t: trials,
        seed,
        rank_tol: None,
    };
    let brp_started = Instant::now();
    let (x, stats) = clqa_brp_detailed(&y, &config)?;
    let time_brp = brp_started.elapsed().as_secs_f64();
    write_qmat(output, &x)?;
    let scale = y.frobenius_norm();
    let relative = |err: f64| if scale > 0.0 { err / scale } else { 0.0 };
    let brp_error = relative(y.sub(&x).frobenius_norm());
    let mut time_oracle = None;
    let mut oracle_error = None;
    if oracle {
        let oracle_started = Instant::now();
        let best = truncated_qsvd(&y, r)?;
        time_oracle = Some(oracle_started.elapsed().as_secs_f64());
        let mut oracle_path = output.as_os_str().to_owned();
        oracle_path.push(".oracle");
        write_qmat(Path::new(&oracle_path), &best)?;
        oracle_error = Some(relative(y.sub(&best).frobenius_norm()));
    }
    match oracle_error {
        Some(err) => println!("BRP_ERROR={brp_error:.6e} ORACLE_ERROR={err:.6e}"),
        None => println!("BRP_ERROR={brp_error:.6e}"),
    }
    if write_manifest {
        let mut m = Manifest::new("approx");
        m.push("input", input.display());
        m.push("output", output.display());
        m.push("r", r);
        m.push("trials", trials);
        m.push("seed", seed);
        m.push("oracle", oracle);
        m.push("effective_r", stats.effective_r);
        m.push("restarts", stats.restarts);
        m.push("time_brp", time_brp);
        if let Some(t) = time_oracle {
            m.push("time_oracle", t);
        }
        m.push("time_total", started.elapsed().as_secs_f64());
        m.write_next_to(output)?;
    }
    Ok(())
}

/// Size list syntax: comma-separated `S` (square) or `MxN` tokens.
pub fn parse_sizes(text: &str) -> CliResult<Vec<(usize, usize)>> {
    let mut sizes = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        let (m, n) = match token.split_once('x') {
            Some((m, n)) => (m, n),
            None => (token, token),
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| CliError::Validation(format!("size {token:?} is not S or MxN")))
        };
        sizes.push((parse(m)?, parse(n)?));
    }
    Ok(sizes)
}

fn median(times: &mut [f64]) -> f64 {
    times.sort_by(f64::total_cmp);
    let mid = times.len() / 2;
    if times.len() % 2 == 1 {
        times[mid]
    } else {
        0.5 * (times[mid - 1] + times[mid])
    }
}

/// Runs one approximation method `repeats` times; returns (median seconds,
/// relative error). The methods are deterministic, so the error is the same
/// on every repeat.
fn time_method<F>(run: F, repeats: usize, y: &QMatrix, scale: f64) -> CliResult<(f64, f64)>
where
    F: Fn() -> clqa_core::Result<QMatrix>,
{
    let mut times = Vec::with_capacity(repeats);
    let mut error = 0.0;
    for _ in 0..repeats {
        let t0 = Instant::now();
        let x = run()?;
        times.push(t0.elapsed().as_secs_f64());
        error = y.sub(&x).frobenius_norm() / scale;
    }
    Ok((median(&mut times), error))
}

pub fn cmd_bench(
    sizes: &[(usize, usize)],
    r: usize,
    repeats: usize,
    seed: u64,
    output: &Path,
    write_manifest: bool,
) -> CliResult<()> {
    if sizes.is_empty() {
        return Err(CliError::Validation("size list is empty".into()));
    }
    if repeats == 0 {
        return Err(CliError::Validation("repeats must be >= 1".into()));
    }
    let started = Instant::now();
    let mut csv = String::from("M,N,r,method,median_seconds,error\n");
    for (i, &(m, n)) in sizes.iter().enumerate() {
        let y = QMatrix::random_gaussian(m, n, derive_seed(seed, i as u64, 0));
        let scale = y.frobenius_norm();
        let config = BrpConfig {
            r,
            t: 1,
            seed: derive_seed(seed, i as u64, 1),
            rank_tol: None,
        };
        let (secs, error) = time_method(|| clqa_brp(&y, &config), repeats, &y, scale)?;
        csv.push_str(&format!("{m},{n},{r},brp,{secs:.6},{error:.6e}\n"));
        let (secs, error) = time_method(|| truncated_qsvd(&y, r), repeats, &y, scale)?;
        csv.push_str(&format!("{m},{n},{r},qsvd,{secs:.6},{error:.6e}\n"));
    }
    fs::write(output, csv).map_err(|e| CliError::io(output, e))?;
    if write_manifest {
        let sizes_text = sizes
            .iter()
            .map(|&(m, n)| if m == n { m.to_string() } else { format!("{m}x{n}") })
            .collect::<Vec<_>>()
            .join(",");
        let mut m = Manifest::new("bench");
        m.push("sizes", sizes_text);
        m.push("r", r);
        m.push("repeats", repeats);
        m.push("seed", seed);
        m.push("output", output.display());
        m.push("time_total", started.elapsed().as_secs_f64());
        m.write_next_to(output)?;
    }
    Ok(())
}

pub fn cmd_metrics(reference: &Path, test: &Path) -> CliResult<()> {
    let (reference, _) = load_image(reference)?;
    let (test, _) = load_image(test)?;
    let report = quality(&reference, &test)?;
    println!("PSNR={:.4} SSIM={:.6}", report.psnr, report.ssim);
    Ok(())
}

pub fn cmd_rerun(manifest_path: &Path, output_override: Option<&Path>) -> CliResult<()> {
    let m = Manifest::read(manifest_path)?;
    let command = m.require("command")?.to_string();
    let output = match output_override {
        Some(p) => p.to_path_buf(),
        None => PathBuf::from(m.require("output")?),
    };
    match command.as_str() {
        "add-noise" => cmd_add_noise(
            Path::new(m.require("input")?),
            &output,
            m.require_parsed("sigma")?,
            m.require_parsed("seed")?,
            false,
        ),
        "denoise" => {
            let config = DenoiseConfig {
                sigma: m.require_parsed("sigma")?,
                patch: m.require_parsed("patch")?,
                group: m.require_parsed("group")?,
                rank: m.require_parsed("rank")?,
                rounds: m.require_parsed("rounds")?,
                search_window: m.require_parsed("search_window")?,
                stride: m.require_parsed("stride")?,
                delta: m.require_parsed("delta")?,
                seed: m.require_parsed("seed")?,
            };
            let reference = m.get("reference").map(PathBuf::from);
            cmd_denoise(
                Path::new(m.require("input")?),
                &output,
                reference.as_deref(),
                &config,
                false,
            )
        }
        "approx" => cmd_approx(
            Path::new(m.require("input")?),
            &output,
            m.require_parsed("r")?,
            m.require_parsed("trials")?,
            m.require_parsed("seed")?,
            m.require_parsed("oracle")?,
            false,
        ),
        "bench" => cmd_bench(
            &parse_sizes(m.require("sizes")?)?,
            m.require_parsed("r")?,
            m.require_parsed("repeats")?,
            m.require_parsed("seed")?,
            &output,
            false,
        ),
        other => Err(CliError::Validation(format!(
            "manifest {} names unknown command {other:?}",
            manifest_path.display()
        ))),
    }
}
