//! Experiment configuration: parsing, validation and the canonical hash.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use chitomo::fit::{ModelFamily, ParamMap, StateModel};
use chitomo::measurement::{SpamBias, THETA_IM, THETA_RE};
use chitomo::recon::{measurement_plan, GridKind, GridSpec};
use chitomo::states::StateSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const DEFAULT_SHOTS: u64 = 200;

/// Reference configurations shipped with the binary, addressable as
/// `bundled:<name>`.
pub const BUNDLED: [(&str, &str); 4] = [
    ("fig2_squeezed", include_str!("../configs/fig2_squeezed.json")),
    ("fig2_displaced", include_str!("../configs/fig2_displaced.json")),
    ("fig3_cat", include_str!("../configs/fig3_cat.json")),
    ("fig4_gkp", include_str!("../configs/fig4_gkp.json")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub state: StateSpec,
    /// Where χ is sampled.
    pub grid: GridSpec,
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Quadrature angles; defaults to what the grid kind needs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thetas: Option<Vec<f64>>,
    /// SPAM bias applied when simulating.
    #[serde(default)]
    pub bias: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    /// Excluded from the config hash.
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Subtract the fitted bias (or the simulated one when no fit is
    /// configured) before the Fourier transform.
    #[serde(default = "yes")]
    pub subtract_bias: bool,
    #[serde(default = "one")]
    pub pad_factor: f64,
    /// Output points of the Wigner reconstruction.
    #[serde(default = "default_wigner_grid")]
    pub wigner_grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitConfig>,
    /// Run the noisy-sampling error estimate for the simulated state.
    #[serde(default = "yes")]
    pub oracle: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self { subtract_bias: true, pad_factor: 1.0, wigner_grid: default_wigner_grid(), fit: None, oracle: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub family: ModelFamily,
    pub free: Vec<String>,
    /// Starting values; parameters not in `free` are held at these values.
    #[serde(default)]
    pub initial: ParamMap,
    /// Nominal parameters compared against the fit; defaults to `initial`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrated: Option<ParamMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
}

impl FitConfig {
    pub fn model(&self) -> Result<StateModel> {
        let free: Vec<&str> = self.free.iter().map(String::as_str).collect();
        Ok(StateModel::new(self.family, &free, &self.initial)?)
    }

    pub fn calibrated(&self) -> &ParamMap {
        self.calibrated.as_ref().unwrap_or(&self.initial)
    }
}

fn default_shots() -> u64 {
    DEFAULT_SHOTS
}
fn default_output_dir() -> String {
    "out".into()
}
fn yes() -> bool {
    true
}
fn one() -> f64 {
    1.0
}
fn default_wigner_grid() -> GridSpec {
    GridSpec::new(GridKind::FullSquare, 3.0, 0.1)
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("config does not match the schema")?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a file, or a bundled config when `source` is `bundled:<name>`.
    pub fn load(source: &str) -> Result<Self> {
        if let Some(name) = source.strip_prefix("bundled:") {
            let (_, text) = BUNDLED
                .iter()
                .find(|(n, _)| *n == name)
                .with_context(|| format!("no bundled config named `{name}`"))?;
            return Self::from_json_str(text);
        }
        let text = std::fs::read_to_string(Path::new(source)).with_context(|| format!("reading {source}"))?;
        Self::from_json_str(&text).with_context(|| format!("in {source}"))
    }

    /// Quadratures that are simulated.
    pub fn thetas(&self) -> Result<Vec<f64>> {
        match &self.thetas {
            Some(t) => Ok(t.clone()),
            None => Ok(measurement_plan(self.grid.kind)?.thetas),
        }
    }

    /// Semantic checks beyond the JSON shape.
    pub fn validate(&self) -> Result<()> {
        ensure!(!self.name.is_empty(), "`name` must not be empty");
        ensure!(self.shots >= 1, "`shots` must be at least 1");
        SpamBias::new(self.bias).context("`bias`")?;
        self.grid.validate().context("`grid`")?;
        self.pipeline.wigner_grid.validate().context("`pipeline.wigner_grid`")?;
        ensure!(
            self.pipeline.wigner_grid.kind == GridKind::FullSquare,
            "`pipeline.wigner_grid.kind` must be full_square"
        );
        ensure!(
            self.pipeline.pad_factor >= 1.0 && self.pipeline.pad_factor.is_finite(),
            "`pipeline.pad_factor` must be >= 1"
        );
        chitomo::states::make_state::<f64>(&self.state).context("`state`")?;
        let plan = measurement_plan(self.grid.kind).context("`grid.kind`")?;
        let thetas = self.thetas()?;
        for t in &thetas {
            if ![THETA_RE, THETA_IM].iter().any(|q| (q - t).abs() < 1e-12) {
                bail!("`thetas`: only 0 and pi/2 can be assembled into a chi grid, got {t}");
            }
        }
        for need in &plan.thetas {
            ensure!(
                thetas.iter().any(|t| (t - need).abs() < 1e-12),
                "`thetas`: grid kind {} needs theta = {need}",
                self.grid.kind.name()
            );
        }
        if let Some(fit) = &self.pipeline.fit {
            fit.model().context("`pipeline.fit`")?;
            for k in fit.calibrated().keys() {
                ensure!(
                    fit.family.param_names().contains(&k.as_str()),
                    "`pipeline.fit.calibrated`: `{k}` is not a parameter of {}",
                    fit.family.name()
                );
            }
        }
        Ok(())
    }

    /// The effective config as JSON, without `output_dir`.
    pub fn hashed_value(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("output_dir");
        }
        v
    }

    /// Compact form of [`Self::hashed_value`]. serde_json's default map is
    /// ordered by key, so this is canonical.
    pub fn canonical_json(&self) -> String {
        self.hashed_value().to_string()
    }

    /// SHA-256 of [`Self::canonical_json`], lowercase hex.
    pub fn hash(&self) -> String {
        format!("{:x}", Sha256::digest(self.canonical_json().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_validate() {
        for (name, text) in BUNDLED {
            let cfg = ExperimentConfig::from_json_str(text).unwrap_or_else(|e| panic!("{name}: {e:#}"));
            assert_eq!(cfg.name, name);
        }
    }

    #[test]
    fn hash_ignores_output_dir_and_key_order() {
        let a = ExperimentConfig::from_json_str(
            r#"{"name":"x","state":{"family":"vacuum"},"grid":{"kind":"full_square","extent":1,"spacing":0.5}}"#,
        )
        .unwrap();
        let b = ExperimentConfig::from_json_str(
            r#"{"grid":{"spacing":0.5,"extent":1,"kind":"full_square"},"output_dir":"elsewhere","state":{"family":"vacuum"},"name":"x"}"#,
        )
        .unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.seed = 1;
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn rejects_bad_configs() {
        let base = r#"{"name":"x","state":{"family":"vacuum"},"grid":{"kind":"full_square","extent":1,"spacing":0.5}"#;
        assert!(ExperimentConfig::from_json_str(&format!("{base},\"colour\":1}}")).is_err());
        assert!(ExperimentConfig::from_json_str(&format!("{base},\"shots\":0}}")).is_err());
        assert!(ExperimentConfig::from_json_str(&format!("{base},\"bias\":1.5}}")).is_err());
        assert!(ExperimentConfig::from_json_str(&format!("{base},\"thetas\":[0.3]}}")).is_err());
        assert!(ExperimentConfig::from_json_str(&format!("{base},\"thetas\":[0.0]}}")).is_err());
        assert!(ExperimentConfig::from_json_str(&format!(
            "{base},\"pipeline\":{{\"fit\":{{\"family\":\"cat\",\"free\":[\"l_re\"]}}}}}}"
        ))
        .is_err());
        assert!(ExperimentConfig::from_json_str(&base.replace("full_square", "axis_scan_re")).is_err());
        assert!(ExperimentConfig::from_json_str(&format!("{base}}}")).is_ok());
    }
}
