//! Declarative experiment runner around `chitomo`.
//!
//! A JSON [`ExperimentConfig`] names a state, a sampling grid and the analysis
//! steps; [`run_experiment`] turns it into a bundle of CSV/JSON/text files.

pub mod config;
pub mod pipeline;
pub mod plotdata;
pub mod report;

use std::path::Path;

use anyhow::{Context, Result};
use chitomo::measurement::write_records_csv;
use chitomo::recon::{
    write_chi_grid_csv, write_chi_grid_json, write_header, write_wigner_grid_csv, write_wigner_grid_json,
};
use serde_json::json;

pub use config::ExperimentConfig;
pub use pipeline::{run, Bundle, Stage};
pub use plotdata::{emit_plotdata, DenseMatrix};

/// Named file contents, in write order.
pub type Artifacts = Vec<(String, Vec<u8>)>;

/// Serializes whatever `bundle` holds.
pub fn artifacts(bundle: &Bundle, stage: Stage) -> Result<Artifacts> {
    let header = bundle.header();
    let mut files = Artifacts::new();

    // Same content as the hash input, so the bundle does not depend on where it is written.
    let mut cfg_json = serde_json::to_vec_pretty(&bundle.config.hashed_value())?;
    cfg_json.push(b'\n');
    files.push(("config.json".into(), cfg_json));

    let mut buf = Vec::new();
    write_header(&mut buf, &header)?;
    write_records_csv(&bundle.records, &mut buf)?;
    files.push(("records.csv".into(), buf));

    if let (Some(f), Some(c)) = (&bundle.fit, &bundle.calibration) {
        let doc = json!({ "header": header, "fit": f, "calibration": c });
        let mut v = serde_json::to_vec_pretty(&doc)?;
        v.push(b'\n');
        files.push(("fit_result.json".into(), v));
    }
    if stage == Stage::Fit {
        return Ok(files);
    }

    let mut grid_header = header.clone();
    if let Some(b) = bundle.subtracted_b {
        grid_header.insert("subtracted_b".into(), b.to_string());
    }
    if let Some(chi) = &bundle.chi {
        let mut a = Vec::new();
        write_chi_grid_csv(chi, &grid_header, &mut a)?;
        files.push(("chi_grid.csv".into(), a));
        let mut b = Vec::new();
        write_chi_grid_json(chi, &grid_header, &mut b)?;
        files.push(("chi_grid.json".into(), b));
    }
    if let Some(w) = &bundle.wigner {
        let mut a = Vec::new();
        write_wigner_grid_csv(w, &grid_header, &mut a)?;
        files.push(("wigner_grid.csv".into(), a));
        let mut b = Vec::new();
        write_wigner_grid_json(w, &grid_header, &mut b)?;
        files.push(("wigner_grid.json".into(), b));
    }
    if bundle.chi.is_some() || bundle.wigner.is_some() {
        files.extend(emit_plotdata(bundle)?);
    }
    if stage == Stage::Report {
        files.push(("report.txt".into(), report::render(bundle).into_bytes()));
    }
    Ok(files)
}

/// Writes `files` into `dir`, creating it if needed. Writes are sequential.
pub fn write_artifacts(dir: &Path, files: &Artifacts) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, bytes) in files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Full pipeline: simulate, fit, reconstruct, report, and write the bundle
/// to `config.output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Bundle> {
    config.validate()?;
    let bundle = run(config, Stage::Report, None)?;
    write_artifacts(Path::new(&config.output_dir), &artifacts(&bundle, Stage::Report)?)?;
    Ok(bundle)
}
