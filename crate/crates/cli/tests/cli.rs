use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use chitomo_cli::config::ExperimentConfig;
use chitomo_cli::{emit_plotdata, run, Stage};
use serde_json::Value;

const SMALL: &str = r#"{
  "name": "small",
  "state": {"family": "cat", "params": {"alpha_re": 1.5, "r": 0.3}},
  "grid": {"kind": "half_plane", "extent": 2.0, "spacing": 0.25},
  "shots": 100,
  "bias": 0.01,
  "seed": 9,
  "pipeline": {
    "wigner_grid": {"kind": "full_square", "extent": 1.5, "spacing": 0.25},
    "fit": {"family": "cat", "free": ["alpha_re", "r", "b"], "initial": {"alpha_re": 1.4, "r": 0.3}}
  }
}"#;

fn chitomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chitomo")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn report_value(report: &str, key: &str) -> f64 {
    let line = report.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no `{key}` in\n{report}"));
    line[key.len()..].split_whitespace().next().unwrap().parse().unwrap()
}

#[test]
fn malformed_config_exits_with_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        "{not json",
        r#"{"name":"x","state":{"family":"vacuum"},"grid":{"kind":"full_square","extent":1,"spacing":0.5},"shotz":3}"#,
        r#"{"name":"x","state":{"family":"vacuum"},"grid":{"kind":"full_square","extent":-1,"spacing":0.5}}"#,
    ] {
        let cfg = write_config(dir.path(), bad);
        let out = chitomo(&["report", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
    }
    let out = chitomo(&["report", "--config", "bundled:nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = chitomo(&["transmogrify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = chitomo(&["report", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (fa, fb) = (read_dir(&a), read_dir(&b));
    let names: Vec<_> = fa.iter().map(|f| f.0.as_str()).collect();
    for want in [
        "chi_grid.csv",
        "chi_grid.json",
        "config.json",
        "fit_result.json",
        "plot_chi_im.dat",
        "plot_chi_re.dat",
        "plot_wigner.dat",
        "records.csv",
        "report.txt",
        "wigner_grid.csv",
        "wigner_grid.json",
    ] {
        assert!(names.contains(&want), "missing {want}: {names:?}");
    }
    assert_eq!(fa.len(), fb.len());
    for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        assert!(ba == bb, "{na} differs between runs");
    }

    let c = dir.path().join("c");
    chitomo(&["report", "--config", &cfg, "--out", c.to_str().unwrap(), "--seed", "10"]);
    assert_ne!(read_dir(&c), fa);
}

#[test]
fn config_hash_in_every_artifact() {
    let cfg = ExperimentConfig::from_json_str(SMALL).unwrap();
    let hash = cfg.hash();
    let bundle = run(&cfg, Stage::Report, None).unwrap();
    for (name, bytes) in chitomo_cli::artifacts(&bundle, Stage::Report).unwrap() {
        if name == "config.json" {
            let mut back: ExperimentConfig = serde_json::from_slice(&bytes).unwrap();
            back.output_dir = cfg.output_dir.clone();
            assert_eq!(back.hash(), hash);
            continue;
        }
        let text = String::from_utf8(bytes).unwrap();
        if name.ends_with(".json") {
            let v: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["header"]["config_hash"], Value::from(hash.clone()), "{name}");
        } else {
            assert!(text.contains(&format!("# config_hash: {hash}")), "{name}");
        }
    }
}

#[test]
fn overrides_change_the_hash_but_out_does_not() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let hash_of = |extra: &[&str]| {
        let mut args = vec!["oracle", "--config", cfg.as_str()];
        args.extend_from_slice(extra);
        let o = chitomo(&args);
        assert!(o.status.success());
        String::from_utf8(o.stdout).unwrap().lines().next().unwrap().to_string()
    };
    let base = hash_of(&[]);
    assert_eq!(base, hash_of(&["--out", "/elsewhere"]));
    assert_ne!(base, hash_of(&["--shots", "50"]));
    assert_ne!(base, hash_of(&["--pad-factor", "2"]));
    let o = chitomo(&["oracle", "--config", &cfg, "--pad-factor", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn records_file_round_trips_through_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let sim = dir.path().join("sim");
    let direct = dir.path().join("direct");
    let replay = dir.path().join("replay");
    assert!(chitomo(&["simulate", "--config", &cfg, "--out", sim.to_str().unwrap()]).status.success());
    assert!(chitomo(&["reconstruct", "--config", &cfg, "--out", direct.to_str().unwrap()]).status.success());
    let recs = sim.join("records.csv");
    let o = chitomo(&[
        "reconstruct",
        "--config",
        &cfg,
        "--out",
        replay.to_str().unwrap(),
        "--records",
        recs.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        std::fs::read(direct.join("chi_grid.csv")).unwrap(),
        std::fs::read(replay.join("chi_grid.csv")).unwrap()
    );
    assert!(!sim.join("chi_grid.csv").exists());

    let fit_dir = dir.path().join("fit");
    assert!(chitomo(&["fit", "--config", &cfg, "--out", fit_dir.to_str().unwrap()]).status.success());
    let v: Value = serde_json::from_slice(&std::fs::read(fit_dir.join("fit_result.json")).unwrap()).unwrap();
    assert!((v["fit"]["params"]["alpha_re"].as_f64().unwrap() - 1.5).abs() < 0.1);
    assert!(!fit_dir.join("wigner_grid.csv").exists());

    let o = chitomo(&["fit", "--config", &cfg, "--records", "/no/such/file.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn three_by_three_grid_gives_three_by_three_matrix() {
    let cfg = ExperimentConfig::from_json_str(
        r#"{"name":"tiny","state":{"family":"vacuum"},
            "grid":{"kind":"full_square","extent":1,"spacing":1},
            "pipeline":{"wigner_grid":{"kind":"full_square","extent":1,"spacing":1},"subtract_bias":false}}"#,
    )
    .unwrap();
    let bundle = run(&cfg, Stage::Reconstruct, None).unwrap();
    let files = emit_plotdata(&bundle).unwrap();
    assert_eq!(files.len(), 3);
    for (name, bytes) in files {
        let text = String::from_utf8(bytes).unwrap();
        let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 3, "{name}");
        assert!(rows.iter().all(|r| r.split_whitespace().count() == 3), "{name}");
        assert!(text.contains("# re_axis: -1.0000000000e0 0.0000000000e0 1.0000000000e0"), "{text}");
    }
}

#[test]
fn empty_bundle_has_no_plotdata() {
    let cfg = ExperimentConfig::from_json_str(SMALL).unwrap();
    let bundle = run(&cfg, Stage::Simulate, None).unwrap();
    assert!(emit_plotdata(&bundle).is_err());
}

#[test]
fn quadrant_gkp_plots_the_mirrored_plane() {
    let mut cfg = ExperimentConfig::load("bundled:fig4_gkp").unwrap();
    cfg.pipeline.fit = None;
    cfg.grid.spacing = 0.25;
    let bundle = run(&cfg, Stage::Reconstruct, None).unwrap();
    let files = emit_plotdata(&bundle).unwrap();
    let (_, re) = files.iter().find(|(n, _)| n == "plot_chi_re.dat").unwrap();
    let text = String::from_utf8(re.clone()).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect();
    // Re 6 x Im 5 at 0.25 measured on one quadrant, shown on all four.
    assert_eq!(rows.len(), 41);
    assert!(rows.iter().all(|r| r.len() == 49 && r.iter().all(|x| x.is_finite())));
    for (k, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, rows[40 - k][48 - j]);
            assert_eq!(*v, rows[k][48 - j]);
        }
    }
}

#[test]
fn bundled_squeezed_report_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let o = chitomo(&["report", "--config", "bundled:fig2_squeezed", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert_eq!(report, String::from_utf8(o.stdout).unwrap());
    let parity = report_value(&report, "parity b-sub");
    assert!((parity - 1.0).abs() < 0.05, "parity {parity}");
    assert!(report_value(&report, "fidelity") >= 0.99);
}

fn schema_keys(schema: &Value, pointer: &str) -> BTreeSet<String> {
    schema.pointer(pointer).unwrap().as_object().unwrap().keys().cloned().collect()
}

fn value_keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn shipped_schema_matches_config_fields() {
    let schema: Value = serde_json::from_str(include_str!("../../../docs/config.schema.json")).expect("schema is JSON");
    let mut cfg = ExperimentConfig::load("bundled:fig3_cat").unwrap();
    cfg.thetas = Some(vec![0.0, std::f64::consts::FRAC_PI_2]);
    let fit = cfg.pipeline.fit.as_mut().unwrap();
    fit.calibrated = Some(fit.initial.clone());
    fit.max_iterations = Some(50);
    cfg.grid.extent_im = Some(4.0);
    let v = serde_json::to_value(&cfg).unwrap();

    assert_eq!(schema_keys(&schema, "/properties"), value_keys(&v));
    assert_eq!(schema_keys(&schema, "/$defs/pipeline/properties"), value_keys(&v["pipeline"]));
    assert_eq!(schema_keys(&schema, "/$defs/fit/properties"), value_keys(&v["pipeline"]["fit"]));
    assert_eq!(schema_keys(&schema, "/$defs/grid/properties"), value_keys(&v["grid"]));
    assert_eq!(schema_keys(&schema, "/$defs/state/properties"), value_keys(&v["state"]));
    let required: BTreeSet<String> =
        schema["required"].as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect();
    let minimal = r#"{"name":"x","state":{"family":"vacuum"},"grid":{"kind":"full_square","extent":1,"spacing":0.5}}"#;
    assert_eq!(required, value_keys(&serde_json::from_str(minimal).unwrap()));
    assert!(ExperimentConfig::from_json_str(minimal).is_ok());
}
