use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use chitomo::measurement::read_records_csv;
use chitomo_cli::{artifacts, config::ExperimentConfig, run, write_artifacts, Stage};
use clap::{Args, Parser, Subcommand};

/// Simulated characteristic-function tomography.
///
/// Exit codes: 0 success, 1 pipeline failure, 2 invalid config or usage.
#[derive(Parser)]
#[command(name = "chitomo", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Sample the configured grid and write records.csv.
    Simulate(Common),
    /// Assemble chi, subtract the bias and Fourier transform to W.
    Reconstruct(WithRecords),
    /// Fit the configured model and write fit_result.json.
    Fit(WithRecords),
    /// Run everything and write report.txt with the full bundle.
    Report(WithRecords),
    /// Print the noisy-reconstruction error of the configured state.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// Config file, or `bundled:<name>` (fig2_squeezed, fig2_displaced, fig3_cat, fig4_gkp).
    #[arg(long)]
    config: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    pad_factor: Option<f64>,
}

#[derive(Args)]
struct WithRecords {
    #[command(flatten)]
    common: Common,
    /// Analyse an existing records.csv instead of simulating.
    #[arg(long)]
    records: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.shots {
            cfg.shots = s;
        }
        if let Some(p) = self.pad_factor {
            cfg.pipeline.pad_factor = p;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.to_string_lossy().into_owned();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cfg: &ExperimentConfig, stage: Stage, records: Option<&PathBuf>) -> Result<()> {
    let records = match records {
        Some(p) => {
            let f = std::fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
            Some(read_records_csv(f).with_context(|| format!("reading {}", p.display()))?)
        }
        None => None,
    };
    let bundle = run(cfg, stage, records)?;
    write_artifacts(cfg.output_dir.as_ref(), &artifacts(&bundle, stage)?)?;
    if stage == Stage::Report {
        print!("{}", chitomo_cli::report::render(&bundle));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, stage, records) = match &cli.verb {
        Verb::Simulate(c) => (c, Some(Stage::Simulate), None),
        Verb::Reconstruct(w) => (&w.common, Some(Stage::Reconstruct), w.records.as_ref()),
        Verb::Fit(w) => (&w.common, Some(Stage::Fit), w.records.as_ref()),
        Verb::Report(w) => (&w.common, Some(Stage::Report), w.records.as_ref()),
        Verb::Oracle(c) => (c, None, None),
    };
    let cfg = match common.load() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let outcome = match stage {
        Some(stage) => execute(&cfg, stage, records),
        None => chitomo_cli::pipeline::oracle(&cfg).map(|p| {
            println!("# config_hash: {}", cfg.hash());
            println!("dft oracle {p:.4} % of 4/pi");
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
