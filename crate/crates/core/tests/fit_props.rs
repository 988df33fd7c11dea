mod common;

use chitomo::fit::{fit, reduced_chi_squared, FitOptions, FitResult, ModelFamily, ParamMap, StateModel};
use chitomo::measurement::{sample_grid, SpamBias, THETA_IM, THETA_RE};
use chitomo::recon::{build_grid, GridKind, GridSpec};
use chitomo::states::make_state;
use chitomo::Record;
use rayon::prelude::*;

fn pm(kv: &[(&str, f64)]) -> ParamMap {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn simulate(family: ModelFamily, p: &ParamMap, spec: &GridSpec, seed: u64) -> Vec<Record> {
    let state = make_state::<f64>(&family.state_spec(p)).unwrap();
    let pts = build_grid::<f64>(spec).unwrap();
    let b = SpamBias::new(p.get("b").copied().unwrap_or(0.0)).unwrap();
    sample_grid(&state, &pts, &[THETA_RE, THETA_IM], 200, b, seed).unwrap()
}

fn squeezed_grid() -> GridSpec {
    GridSpec::rectangular(GridKind::HalfPlane, 2.0, 6.0, 0.2)
}

fn cat_grid() -> GridSpec {
    GridSpec::rectangular(GridKind::HalfPlane, 4.0, 4.5, 0.2)
}

fn within(f: &FitResult, truth: &ParamMap, name: &str, k: f64) -> bool {
    (f.params[name] - truth[name]).abs() <= k * f.std_errors[name]
}

#[test]
fn reduced_chi_squared_is_one_at_truth() {
    let truth = pm(&[("r", 0.93)]);
    let model = StateModel::all_free(ModelFamily::Squeezed);
    let spec = squeezed_grid();
    let crs: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|seed| reduced_chi_squared(&simulate(ModelFamily::Squeezed, &truth, &spec, seed), &model, &truth).unwrap())
        .collect();
    let mean = crs.iter().sum::<f64>() / crs.len() as f64;
    assert!((0.9..=1.1).contains(&mean), "mean c_r = {mean}");

    // A 0.044 tilt that the evaluation ignores shows up as excess chi-squared.
    let tilted = pm(&[("r", 0.93), ("theta", 0.044)]);
    let recs = simulate(ModelFamily::Squeezed, &tilted, &spec, 7);
    let at_truth = reduced_chi_squared(&recs, &model, &tilted).unwrap();
    let untilted = reduced_chi_squared(&recs, &model, &truth).unwrap();
    assert!(untilted > at_truth, "{untilted} vs {at_truth}");
}

#[test]
fn cat_tilt_and_bias_recovered() {
    let truth = pm(&[("alpha_re", 2.42), ("r", 0.58), ("theta", 0.110), ("b", 0.009)]);
    let init = pm(&[("alpha_re", 2.42), ("r", 0.58)]);
    let model = StateModel::all_free(ModelFamily::Cat);
    let spec = cat_grid();
    let fits: Vec<FitResult> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            fit(&simulate(ModelFamily::Cat, &truth, &spec, seed), &model, &init, &FitOptions::default()).unwrap()
        })
        .collect();
    for f in &fits {
        assert!(f.converged);
        assert!(f.history.windows(2).all(|w| w[1] <= w[0]));
    }
    for name in ["theta", "b"] {
        let hits = fits.iter().filter(|f| within(f, &truth, name, 3.0)).count();
        assert!(hits >= 95, "{name}: {hits}/100 within 3 sigma");
    }
}

#[test]
fn wrong_family_is_flagged() {
    let gkp = pm(&[("l_re", 2.5), ("r", 0.93)]);
    let recs = simulate(ModelFamily::Gkp, &gkp, &GridSpec::rectangular(GridKind::HalfPlane, 6.0, 5.0, 0.2), 3);
    let f =
        fit(&recs, &StateModel::all_free(ModelFamily::Squeezed), &pm(&[("r", 0.9)]), &FitOptions::default()).unwrap();
    assert!(f.c_r > 3.0, "c_r = {}", f.c_r);
}

#[test]
fn fixing_a_zero_parameter_changes_nothing() {
    let truth = pm(&[("r", 0.93), ("theta", 0.04), ("delta_re", 0.78), ("b", 0.03)]);
    let recs = simulate(ModelFamily::DisplacedSqueezed, &truth, &squeezed_grid(), 11);
    let free = StateModel::all_free(ModelFamily::DisplacedSqueezed);
    let pinned =
        StateModel::new(ModelFamily::DisplacedSqueezed, &["r", "theta", "delta_re", "b"], &ParamMap::new()).unwrap();
    let a = fit(&recs, &free, &truth, &FitOptions::default()).unwrap();
    let b = fit(&recs, &pinned, &truth, &FitOptions::default()).unwrap();
    for name in ["r", "theta"] {
        let d = (a.params[name] - b.params[name]).abs();
        assert!(d <= a.std_errors[name], "{name}: {d} vs {}", a.std_errors[name]);
    }
}

#[test]
fn reported_errors_match_scatter() {
    let truth = pm(&[("r", 0.93), ("b", 0.03)]);
    let model = StateModel::all_free(ModelFamily::Squeezed);
    let spec = squeezed_grid();
    let fits: Vec<FitResult> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            fit(&simulate(ModelFamily::Squeezed, &truth, &spec, 1000 + seed), &model, &truth, &FitOptions::default())
                .unwrap()
        })
        .collect();
    let rs: Vec<f64> = fits.iter().map(|f| f.params["r"]).collect();
    let mean = rs.iter().sum::<f64>() / rs.len() as f64;
    let sd = (rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (rs.len() - 1) as f64).sqrt();
    let se = fits.iter().map(|f| f.std_errors["r"]).sum::<f64>() / fits.len() as f64;
    assert!((sd / se - 1.0).abs() <= 0.3, "scatter {sd} vs reported {se}");
}

#[test]
fn bias_is_separately_identifiable() {
    let base = pm(&[("alpha_re", 2.42), ("r", 0.58)]);
    let mut biased = base.clone();
    biased.insert("b".into(), 0.009);
    let model = StateModel::all_free(ModelFamily::Cat);
    let spec = cat_grid();
    let f0 = fit(&simulate(ModelFamily::Cat, &base, &spec, 21), &model, &base, &FitOptions::default()).unwrap();
    let f1 = fit(&simulate(ModelFamily::Cat, &biased, &spec, 21), &model, &base, &FitOptions::default()).unwrap();
    let diff = f1.params["b"] - f0.params["b"];
    let sigma = f0.std_errors["b"].hypot(f1.std_errors["b"]);
    assert!((diff - 0.009).abs() <= 3.0 * sigma, "db = {diff} ± {sigma}");
}
