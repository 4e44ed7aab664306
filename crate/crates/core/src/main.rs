use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use inflate3d::cli::{apply_overrides, cmd_eval, cmd_mine, cmd_synth, EvalOptions, RunConfig};
use inflate3d::error::Result;
use inflate3d::inflate::OrientationMode;

/// Mine 3D cuboid labels from LiDAR, 2D instance masks and an HD map.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mine cuboids for every frame of a dataset.
    Mine {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Orientation source for every class (`map` or `calipers`).
        #[arg(long)]
        orientation_mode: Option<OrientationMode>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Score predicted labels against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dataset root; its ego poses enable range filtering.
        #[arg(long)]
        dataset: Option<PathBuf>,
        /// Report directory (defaults to --pred).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic dataset with ground truth.
    Synth {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Mine {
            dataset,
            out,
            config,
            orientation_mode,
            jobs,
        } => {
            let mut cfg = RunConfig::load(config.as_deref())?;
            apply_overrides(&mut cfg, orientation_mode, jobs)?;
            let m = cmd_mine(&dataset, &cfg, &out)?;
            let total: usize = m.counts.values().map(|c| c.total).sum();
            println!("mined {total} cuboids from {} frames into {}", m.frames, out.display());
        }
        Cmd::Eval {
            pred,
            gt,
            config,
            dataset,
            out,
        } => {
            let cfg = RunConfig::load(config.as_deref())?;
            let opts = EvalOptions {
                pred: &pred,
                gt: &gt,
                dataset: dataset.as_deref(),
                out: out.as_deref(),
            };
            let report = cmd_eval(&opts, &cfg)?;
            println!("{}", report.summary_line());
        }
        Cmd::Synth {
            config,
            out,
            seed,
            jobs,
        } => {
            let spec = cmd_synth(config.as_deref(), &out, seed, jobs)?;
            println!(
                "wrote {} frames (seed {}) to {}",
                spec.frames,
                spec.rng_seed,
                out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 1 } else { 2 })
        }
        Err(_) => ExitCode::from(2),
    }
}
