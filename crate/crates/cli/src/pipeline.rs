//! Simulate, fit, reconstruct and report, in memory.
//!
//! Every stage is deterministic given the effective config, so the artifact
//! bytes depend only on [`ExperimentConfig::hash`].

use anyhow::{Context, Result};
use chitomo::fit::{compare_calibration, fit, CalibrationReport, FitOptions, FitResult};
use chitomo::measurement::{sample_grid, SpamBias};
use chitomo::phase_space::QuasiKind;
use chitomo::recon::{
    assemble_chi_grid, build_grid, dft_error_oracle, dft_wigner, measurement_plan, parity_from_grid, Header,
};
use chitomo::rng::RNG_ALGORITHM;
use chitomo::states::make_state;
use chitomo::{Chi, Record, Wigner};

use crate::config::ExperimentConfig;

/// How far to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Simulate,
    Fit,
    Reconstruct,
    Report,
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub config: ExperimentConfig,
    pub hash: String,
    pub records: Vec<Record>,
    pub fit: Option<FitResult>,
    pub calibration: Option<CalibrationReport>,
    /// Bias removed before the transform, if any.
    pub subtracted_b: Option<f64>,
    pub chi: Option<Chi>,
    pub wigner: Option<Wigner>,
    pub parity_raw: Option<f64>,
    pub parity_subtracted: Option<f64>,
    pub oracle_percent: Option<f64>,
}

impl Bundle {
    /// `# key: value` lines shared by every artifact.
    pub fn header(&self) -> Header {
        let mut h = Header::new();
        h.insert("experiment".into(), self.config.name.clone());
        h.insert("config_hash".into(), self.hash.clone());
        h.insert("rng".into(), RNG_ALGORITHM.into());
        h
    }
}

/// Samples the configured grid.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<Record>> {
    let state = make_state::<f64>(&cfg.state).context("state")?;
    let points = build_grid::<f64>(&cfg.grid).context("grid")?;
    let bias = SpamBias::new(cfg.bias).context("bias")?;
    sample_grid(&state, &points, &cfg.thetas()?, cfg.shots, bias, cfg.seed).context("simulate")
}

/// Runs up to `stage`, simulating unless `records` are supplied.
pub fn run(cfg: &ExperimentConfig, stage: Stage, records: Option<Vec<Record>>) -> Result<Bundle> {
    let records = match records {
        Some(r) => r,
        None => simulate(cfg)?,
    };
    let mut bundle = Bundle {
        config: cfg.clone(),
        hash: cfg.hash(),
        records,
        fit: None,
        calibration: None,
        subtracted_b: None,
        chi: None,
        wigner: None,
        parity_raw: None,
        parity_subtracted: None,
        oracle_percent: None,
    };
    if stage == Stage::Simulate {
        return Ok(bundle);
    }

    // The fitted bias feeds the subtraction, so the fit runs first.
    let needs_fit = stage != Stage::Reconstruct || cfg.pipeline.subtract_bias;
    if let (Some(fc), true) = (&cfg.pipeline.fit, needs_fit) {
        let model = fc.model()?;
        let mut opts = FitOptions::default();
        if let Some(n) = fc.max_iterations {
            opts.max_iterations = n;
        }
        let result = fit(&bundle.records, &model, &fc.initial, &opts).context("fit")?;
        let report = compare_calibration(&bundle.records, &model, fc.calibrated(), &result).context("fit")?;
        bundle.calibration = Some(report);
        bundle.fit = Some(result);
    }
    if stage == Stage::Fit {
        return Ok(bundle);
    }

    let plan = measurement_plan(cfg.grid.kind).context("reconstruct")?;
    let spacing = cfg.grid.spacing;
    if cfg.pipeline.subtract_bias {
        bundle.subtracted_b = Some(match &bundle.fit {
            Some(f) => f.params["b"],
            None => cfg.bias,
        });
    }
    let raw = assemble_chi_grid(&bundle.records, spacing, &plan, None).context("reconstruct")?;
    bundle.parity_raw = Some(parity_from_grid(&raw).context("parity")?);
    let chi = match bundle.subtracted_b {
        Some(b) => {
            let g = assemble_chi_grid(&bundle.records, spacing, &plan, Some(b)).context("reconstruct")?;
            bundle.parity_subtracted = Some(parity_from_grid(&g).context("parity")?);
            g
        }
        None => raw,
    };
    let w = dft_wigner(&chi, cfg.pipeline.pad_factor, &cfg.pipeline.wigner_grid, QuasiKind::Wigner)
        .context("reconstruct")?;
    bundle.chi = Some(chi);
    bundle.wigner = Some(w);

    if stage == Stage::Report && cfg.pipeline.oracle {
        bundle.oracle_percent = Some(oracle(cfg)?);
    }
    Ok(bundle)
}

/// Mean deviation of a noisy, bias-free reconstruction of the configured
/// state from its analytic W, in percent of `4/π`.
pub fn oracle(cfg: &ExperimentConfig) -> Result<f64> {
    let state = make_state::<f64>(&cfg.state).context("state")?;
    dft_error_oracle(&state, &cfg.grid, &cfg.pipeline.wigner_grid, cfg.shots, cfg.seed, cfg.pipeline.pad_factor)
        .context("oracle")
}
