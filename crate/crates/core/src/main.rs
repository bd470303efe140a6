use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sct_core::harness::{run_fig5_comparison, run_rd_sweep, run_trial, to_csv, TrialConfig};
use sct_core::source_io::write_image;
use sct_core::Error;

#[derive(Parser)]
#[command(name = "sct", version, about = "Semantic coded transmission simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial and print its report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the reconstruction as PGM.
        #[arg(long)]
        image: Option<PathBuf>,
    },
    /// Rate-distortion sweep over the enabled chains.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.4")]
        rates: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Baseline vs digital chain with and without correction.
    Fig5 {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, seed, image } => {
            let mut cfg = TrialConfig::from_file(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let report = run_trial(&cfg)?;
            print!("{report}");
            if let Some(path) = image {
                write_image(path, &report.image)?;
            }
        }
        Command::Sweep {
            config,
            rates,
            trials,
            out,
        } => {
            let cfg = TrialConfig::from_file(&config)?;
            let sweep = run_rd_sweep(&cfg, &rates, trials)?;
            for w in &sweep.warnings {
                eprintln!("warning: {w}");
            }
            let csv = to_csv(&sweep.rows);
            match out {
                Some(path) => std::fs::write(&path, csv).map_err(|e| Error::Io { path, source: e })?,
                None => print!("{csv}"),
            }
        }
        Command::Fig5 { config, out_dir } => {
            let cfg = TrialConfig::from_file(&config)?;
            let fig = run_fig5_comparison(&cfg, &out_dir)?;
            for (name, r) in [
                ("baseline", &fig.baseline),
                ("digital-no-correction", &fig.sct_uncorrected),
                ("digital-correction", &fig.sct_corrected),
            ] {
                println!("{name}: psnr {:.2} dB, weighted mse {:.2}", r.psnr, r.weighted_mse);
            }
            for f in &fig.files {
                println!("wrote {}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
