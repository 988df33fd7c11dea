use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{bounds, ParamMap, StateModel};
use crate::error::{Error, Result};
use crate::linalg::{inverse_spd, solve_spd, Matrix};
use crate::measurement::ReadoutRecord;
use crate::scalar::Real;
use crate::states::{fidelity, make_state, DEFAULT_N_MAX};

/// Stopping rules for [`fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Stop when the relative decrease of the objective falls below this.
    pub ftol: f64,
    /// Stop when the relative step size falls below this.
    pub xtol: f64,
    pub initial_damping: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iterations: 200, ftol: 1e-12, xtol: 1e-10, initial_damping: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Every family parameter, free and fixed.
    pub params: ParamMap,
    pub free: Vec<String>,
    /// One-sigma errors of the free parameters.
    pub std_errors: ParamMap,
    /// Covariance of the free parameters, in `free` order.
    pub covariance: Vec<Vec<f64>>,
    /// Reduced chi-squared `χ²/(N − ν)`.
    pub c_r: f64,
    pub n_points: usize,
    pub n_free: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Objective `χ²` after every accepted step, starting with the initial value.
    pub history: Vec<f64>,
}

fn check_records<T: Real>(records: &[ReadoutRecord<T>], n_free: usize) -> Result<()> {
    if records.len() <= n_free {
        return Err(Error::InsufficientData { needed: n_free + 1, got: records.len() });
    }
    for r in records {
        if !(r.sem > T::zero()) || !r.sem.is_finite() {
            return Err(Error::param("sem", format!("record at {} has sem {}", r.beta, r.sem)));
        }
    }
    Ok(())
}

/// Weighted residuals `(y − f)/σ` at a full parameter map.
fn residuals<T: Real>(model: &StateModel, p: &ParamMap, records: &[ReadoutRecord<T>]) -> Result<Vec<T>> {
    let eval = model.evaluator::<T>(p)?;
    Ok(records.par_iter().map(|r| (r.estimate - eval.predict(r.beta, r.theta)) / r.sem).collect())
}

fn sum_sq<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, &x| a + x * x)
}

/// `χ²/(N − ν)` of `params` against the records; `ν` is the model's free count.
pub fn reduced_chi_squared<T: Real>(records: &[ReadoutRecord<T>], model: &StateModel, params: &ParamMap) -> Result<T> {
    let nu = model.n_free();
    check_records(records, nu)?;
    let res = residuals(model, &model.complete(params), records)?;
    Ok(sum_sq(&res) / T::from_usize_lossy(records.len() - nu))
}

/// Nudges a value strictly inside the bounds of `name`.
fn project(name: &str, v: f64) -> f64 {
    let (lo, hi) = bounds(name);
    let margin = 1e-12;
    match name {
        "b" => v.clamp(lo + margin, hi - margin),
        "theta" => v.clamp(lo, hi - margin),
        _ => v.clamp(lo, hi),
    }
}

/// Projects a free vector into the feasible set, shrinking complex amplitudes
/// that exceed the radius bound.
fn project_all(model: &StateModel, x: &mut [f64]) {
    for (k, name) in model.free.iter().enumerate() {
        x[k] = project(name, x[k]);
    }
    let full = model.expand(x);
    for (re, im) in [("delta_re", "delta_im"), ("alpha_re", "alpha_im"), ("l_re", "l_im")] {
        let (a, b) = (full.get(re).copied().unwrap_or(0.0), full.get(im).copied().unwrap_or(0.0));
        let m = a.hypot(b);
        let max = super::model::MAX_AMPLITUDE;
        if m > max {
            let s = max / m * (1.0 - 1e-12);
            for (name, v) in [(re, a), (im, b)] {
                if let Some(k) = model.free.iter().position(|f| f == name) {
                    x[k] = v * s;
                }
            }
        }
    }
}

/// Finite-difference Jacobian of the weighted model values, `∂(f/σ)/∂x`.
///
/// Central differences with step `ε^{1/3} max(|x|, 1)`; one-sided when the
/// central stencil would leave the box.
fn jacobian<T: Real>(model: &StateModel, x: &[f64], records: &[ReadoutRecord<T>], r0: &[T]) -> Result<Matrix<T>> {
    let n = records.len();
    let m = x.len();
    let mut jac = Matrix::zeros(n, m);
    let h0 = f64::EPSILON.cbrt();
    for k in 0..m {
        let name = &model.free[k];
        let h = h0 * x[k].abs().max(1.0);
        let (lo, hi) = bounds(name);
        let mut up = x.to_vec();
        let mut dn = x.to_vec();
        up[k] = x[k] + h;
        dn[k] = x[k] - h;
        let up_ok = up[k] < hi - 1e-12;
        let dn_ok = dn[k] > lo + 1e-12 || (name != "b" && dn[k] >= lo);
        // Residuals decrease when the model increases, hence the sign flips below.
        let column: Vec<T> = match (dn_ok, up_ok) {
            (true, true) => {
                let ru = residuals(model, &model.expand(&up), records)?;
                let rd = residuals(model, &model.expand(&dn), records)?;
                ru.iter().zip(&rd).map(|(&a, &b)| (b - a) / T::lit(2.0 * h)).collect()
            }
            (false, true) => {
                let ru = residuals(model, &model.expand(&up), records)?;
                ru.iter().zip(r0).map(|(&a, &b)| (b - a) / T::lit(h)).collect()
            }
            (true, false) => {
                let rd = residuals(model, &model.expand(&dn), records)?;
                r0.iter().zip(&rd).map(|(&a, &b)| (b - a) / T::lit(h)).collect()
            }
            (false, false) => {
                return Err(Error::param(name.clone(), "bound interval narrower than the difference step"))
            }
        };
        for i in 0..n {
            jac[(i, k)] = column[i];
        }
    }
    Ok(jac)
}

/// Bounded Levenberg-Marquardt fit of `model` to the records.
///
/// `init` seeds the free parameters (missing entries default to the model's
/// fixed map, then zero). A run that exhausts `max_iterations` returns
/// `Ok` with `converged = false`; a singular normal matrix at the optimum is
/// an error. Symmetric families are reported with `Re α ≥ 0` (`Re l ≥ 0`).
pub fn fit<T: Real>(
    records: &[ReadoutRecord<T>],
    model: &StateModel,
    init: &ParamMap,
    opts: &FitOptions,
) -> Result<FitResult> {
    let m = model.n_free();
    check_records(records, m)?;
    let start = model.complete(init);
    let mut x = model.free_values(&start);
    project_all(model, &mut x);

    let mut r = residuals(model, &model.expand(&x), records)?;
    let mut cost = sum_sq(&r).to_f64_lossy();
    if !cost.is_finite() {
        return Err(Error::NonConvergence("objective is not finite at the initial point".into()));
    }
    let mut history = vec![cost];
    let mut lambda = opts.initial_damping;
    let mut converged = m == 0;
    let mut iterations = 0;
    let mut jac = jacobian(model, &x, records, &r)?;

    while !converged && iterations < opts.max_iterations {
        iterations += 1;
        let a = jac.gram();
        let g = jac.tr_mul_vec(&r);
        let gmax = g.iter().fold(0.0f64, |acc, v| acc.max(v.to_f64_lossy().abs()));
        if gmax <= 1e-14 * cost.max(1.0) {
            converged = true;
            break;
        }
        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = a.clone();
            for k in 0..m {
                let d = a[(k, k)].max(T::lit(1e-12));
                damped[(k, k)] = a[(k, k)] + T::lit(lambda) * d;
            }
            let Ok(step) = solve_spd(&damped, &g) else {
                lambda *= 10.0;
                continue;
            };
            // Residuals are y − f, so the Gauss-Newton step is −(JᵀJ)⁻¹Jᵀr with
            // J = ∂r/∂x; `jacobian` returns −∂r/∂x, hence the plus sign.
            let mut trial: Vec<f64> = x.iter().zip(&step).map(|(&xi, s)| xi + s.to_f64_lossy()).collect();
            project_all(model, &mut trial);
            let rt = residuals(model, &model.expand(&trial), records)?;
            let ct = sum_sq(&rt).to_f64_lossy();
            if ct.is_finite() && ct < cost {
                let dx = trial.iter().zip(&x).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max);
                let rel = (cost - ct) / cost.max(f64::MIN_POSITIVE);
                x = trial;
                r = rt;
                cost = ct;
                history.push(cost);
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if rel < opts.ftol || dx < opts.xtol {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No downhill step at any damping: the point is stationary to
            // working precision.
            converged = true;
            break;
        }
        jac = jacobian(model, &x, records, &r)?;
    }

    let cov_t = if m == 0 { Matrix::zeros(0, 0) } else { inverse_spd(&jac.gram())? };
    let mut params = model.expand(&x);
    let mut covariance: Vec<Vec<f64>> =
        (0..m).map(|i| (0..m).map(|j| cov_t[(i, j)].to_f64_lossy()).collect()).collect();
    canonical_sign(model, &mut params, &mut covariance);
    let std_errors =
        model.free.iter().enumerate().map(|(k, n)| (n.clone(), covariance[k][k].max(0.0).sqrt())).collect();
    Ok(FitResult {
        params,
        free: model.free.clone(),
        std_errors,
        covariance,
        c_r: cost / (records.len() - m) as f64,
        n_points: records.len(),
        n_free: m,
        converged,
        iterations,
        history,
    })
}

/// Negates `α` (or `l`) when `Re < 0`, an exact symmetry of those families.
fn canonical_sign(model: &StateModel, params: &mut ParamMap, cov: &mut [Vec<f64>]) {
    let Some((re, im)) = model.family.sign_symmetric_pair() else { return };
    let (a, b) = (params[re], params[im]);
    if a > 0.0 || (a == 0.0 && b >= 0.0) {
        return;
    }
    params.insert(re.to_string(), -a);
    params.insert(im.to_string(), -b);
    let flipped: Vec<bool> = model.free.iter().map(|n| n == re || n == im).collect();
    for i in 0..cov.len() {
        for j in 0..cov.len() {
            if flipped[i] != flipped[j] {
                cov[i][j] = -cov[i][j];
            }
        }
    }
}

/// Best starting point over a grid of `(r, θ)` values, other parameters as in `base`.
pub fn grid_search_init<T: Real>(
    records: &[ReadoutRecord<T>],
    model: &StateModel,
    base: &ParamMap,
    r_values: &[f64],
    theta_values: &[f64],
) -> Result<ParamMap> {
    check_records(records, 0)?;
    let base = model.complete(base);
    let candidates: Vec<ParamMap> = r_values
        .iter()
        .flat_map(|&r| {
            theta_values.iter().map({
                let base = &base;
                move |&t| {
                    let mut p = base.clone();
                    p.insert("r".into(), r);
                    p.insert("theta".into(), t);
                    p
                }
            })
        })
        .collect();
    let mut best: Option<(f64, ParamMap)> = None;
    for p in candidates {
        let Ok(res) = residuals(model, &p, records) else { continue };
        let cost = sum_sq(&res).to_f64_lossy();
        if cost.is_finite() && best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, p));
        }
    }
    best.map(|(_, p)| p).ok_or_else(|| Error::NonConvergence("no grid candidate gave a finite objective".into()))
}

/// One parameter of a calibration comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamComparison {
    pub name: String,
    pub calibrated: f64,
    pub fitted: f64,
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub family: String,
    pub c_r_calibrated: f64,
    pub c_r_fitted: f64,
    /// `|⟨ψ_calibrated|ψ_fitted⟩|²`.
    pub fidelity: f64,
    pub params: Vec<ParamComparison>,
}

/// Compares the fitted state with the nominal (calibrated) one on the same data.
///
/// Both reduced chi-squared values use the model's free count; calibrated
/// parameters that are absent read as the model's fixed values.
pub fn compare_calibration<T: Real>(
    records: &[ReadoutRecord<T>],
    model: &StateModel,
    calibrated: &ParamMap,
    fitted: &FitResult,
) -> Result<CalibrationReport> {
    let cal = model.complete(calibrated);
    let fit_p = model.complete(&fitted.params);
    let c_r_calibrated = reduced_chi_squared(records, model, &cal)?.to_f64_lossy();
    let c_r_fitted = reduced_chi_squared(records, model, &fit_p)?.to_f64_lossy();
    let a = make_state::<f64>(&model.family.state_spec(&cal))?;
    let b = make_state::<f64>(&model.family.state_spec(&fit_p))?;
    let fidelity = fidelity(&a, &b, DEFAULT_N_MAX)?;
    let params = model
        .family
        .param_names()
        .iter()
        .map(|&n| ParamComparison {
            name: n.to_string(),
            calibrated: cal[n],
            fitted: fit_p[n],
            std_error: fitted.std_errors.get(n).copied(),
        })
        .collect();
    Ok(CalibrationReport { family: model.family.name().into(), c_r_calibrated, c_r_fitted, fidelity, params })
}
