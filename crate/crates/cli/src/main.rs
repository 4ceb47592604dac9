use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use clqa_cli::commands;
use clqa_cli::config::{self, Overrides};
use clqa_cli::errors::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "clqa",
    version,
    about = "Quaternion low-rank approximation and color image denoising"
)]
struct Cli {
    /// Worker threads for the denoise pipeline; 1 guarantees bit-exact
    /// reproducibility (the default pool already is, this pins it).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Add white Gaussian noise to an RGB image.
    AddNoise {
        input: PathBuf,
        output: PathBuf,
        /// Noise standard deviation on the 0-255 scale.
        #[arg(long, default_value_t = 50.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Denoise an RGB image by grouped low-rank approximation.
    Denoise {
        input: PathBuf,
        output: PathBuf,
        /// Clean reference; when given, prints PSNR/SSIM of the output.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// TOML file with the same keys as the tuning flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Rank-r approximation of a QMAT file via bilateral random projections.
    Approx {
        input: PathBuf,
        output: PathBuf,
        /// Target rank.
        #[arg(short, long)]
        r: usize,
        /// Independent sketch draws; the best by residual wins.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also compute the exact truncated QSVD (written to
        /// `<output>.oracle`) and report both errors.
        #[arg(long)]
        oracle: bool,
    },
    /// Time BRP against the QSVD oracle across matrix sizes; write CSV.
    Bench {
        /// Comma-separated sizes, each S (square) or MxN.
        #[arg(long)]
        sizes: String,
        #[arg(short, long, default_value_t = 15)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print PSNR and SSIM between two equally sized images.
    Metrics { reference: PathBuf, test: PathBuf },
    /// Re-execute a command from its manifest, reproducing its outputs.
    Rerun {
        manifest: PathBuf,
        /// Write outputs here instead of the recorded path.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Denoise tuning flags; unset ones fall back to the config file, then to
/// the sigma-keyed defaults.
#[derive(Args)]
struct Tuning {
    /// Assumed noise standard deviation; also selects the default tier.
    #[arg(long)]
    sigma: Option<f64>,
    /// Patch side in pixels.
    #[arg(long)]
    patch: Option<usize>,
    /// Patches per similarity group.
    #[arg(long)]
    group: Option<usize>,
    /// Target rank of each group approximation.
    #[arg(long)]
    rank: Option<usize>,
    /// Regularization rounds.
    #[arg(long)]
    rounds: Option<usize>,
    /// Candidate search window side in pixels.
    #[arg(long)]
    search_window: Option<usize>,
    /// Reference patch grid step.
    #[arg(long)]
    stride: Option<usize>,
    /// Noise feedback weight per round.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl From<Tuning> for Overrides {
    fn from(t: Tuning) -> Overrides {
        Overrides {
            sigma: t.sigma,
            patch: t.patch,
            group: t.group,
            rank: t.rank,
            rounds: t.rounds,
            search_window: t.search_window,
            stride: t.stride,
            delta: t.delta,
            seed: t.seed,
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(CliError::Validation("workers must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::Validation(format!("worker pool: {e}")))?;
    }
    match cli.command {
        Command::AddNoise {
            input,
            output,
            sigma,
            seed,
        } => commands::cmd_add_noise(&input, &output, sigma, seed, true),
        Command::Denoise {
            input,
            output,
            reference,
            config: config_path,
            tuning,
        } => {
            let file = match &config_path {
                Some(p) => Some(config::load_config_file(p)?),
                None => None,
            };
            let resolved = config::resolve(&tuning.into(), file.as_ref());
            commands::cmd_denoise(&input, &output, reference.as_deref(), &resolved, true)
        }
        Command::Approx {
            input,
            output,
            r,
            trials,
            seed,
            oracle,
        } => commands::cmd_approx(&input, &output, r, trials, seed, oracle, true),
        Command::Bench {
            sizes,
            r,
            repeats,
            seed,
            output,
        } => commands::cmd_bench(&commands::parse_sizes(&sizes)?, r, repeats, seed, &output, true),
        Command::Metrics { reference, test } => commands::cmd_metrics(&reference, &test),
        Command::Rerun { manifest, output } => commands::cmd_rerun(&manifest, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return match kind {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
