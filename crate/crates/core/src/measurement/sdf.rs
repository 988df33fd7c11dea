//! Calibration of the state-dependent force on a Fock-1 probe.
//!
//! With `α(t) = c t` the probe's internal-state trace is
//! `⟨Z(t)⟩ = 1 − e^{−2(ct)²}(1 − (2ct)²)`, i.e. one minus the Fock-1
//! characteristic function at `2ct`.

use serde::{Deserialize, Serialize};

use super::sample_expectation;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::scalar::Real;

/// Proportionality `α(t) = c t`, `c` in 1/ms with `t` in ms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdfCalibration {
    c: f64,
}

impl SdfCalibration {
    pub fn new(c: f64) -> Result<Self> {
        if c > 0.0 && c.is_finite() {
            Ok(Self { c })
        } else {
            Err(Error::param("c", "must be positive"))
        }
    }

    pub fn c(self) -> f64 {
        self.c
    }

    /// `|α(t)|`.
    pub fn amplitude(self, t: f64) -> f64 {
        self.c * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdfFit {
    pub c: f64,
    pub sigma_c: f64,
    pub chi_squared: f64,
    pub iterations: usize,
}

fn trace_value<T: Real>(c: T, t: T) -> T {
    let u = c * t;
    let two = T::lit(2.0);
    T::one() - (-two * u * u).exp() * (T::one() - T::lit(4.0) * u * u)
}

/// `∂⟨Z⟩/∂c`.
fn trace_slope(c: f64, t: f64) -> f64 {
    let u = c * t;
    t * (-2.0 * u * u).exp() * (12.0 * u - 16.0 * u * u * u)
}

/// Analytic trace for a Fock-1 probe. Other probes are not supported.
pub fn simulate_sdf_trace<T: Real>(c: T, n_fock: u32, times: &[T]) -> Result<Vec<T>> {
    if n_fock != 1 {
        return Err(Error::Unsupported("n_fock != 1", "only the Fock-1 calibration probe is modelled"));
    }
    if let Some(t) = times.iter().find(|t| !(**t >= T::zero())) {
        return Err(Error::param("times", format!("must be >= 0, got {t}")));
    }
    Ok(times.iter().map(|&t| trace_value(c, t)).collect())
}

/// Binomially sampled trace: `(value, sem)` per time, time `k` on stream `k`.
pub fn sample_sdf_trace<T: Real>(c: T, times: &[T], shots: u64, seed: u64) -> Result<Vec<(T, T)>> {
    let ideal = simulate_sdf_trace(c, 1, times)?;
    ideal
        .into_iter()
        .enumerate()
        .map(|(k, z)| {
            // The qubit reads χ_1(2ct) = 1 − Z.
            let mut rng = stream_rng(seed, k as u64);
            let (_, est, sem) = sample_expectation(T::one() - z, shots, &mut rng)?;
            Ok((T::one() - est, sem))
        })
        .collect()
}

fn chi_squared(c: f64, times: &[f64], values: &[f64], sems: &[f64]) -> f64 {
    times.iter().zip(values).zip(sems).map(|((&t, &y), &s)| ((y - trace_value(c, t)) / s).powi(2)).sum()
}

/// Weighted least-squares estimate of `c` and its standard error.
///
/// A log-spaced scan picks the basin, then damped Gauss-Newton refines it.
pub fn fit_sdf_calibration(times: &[f64], values: &[f64], sems: &[f64]) -> Result<SdfFit> {
    if times.len() != values.len() || times.len() != sems.len() {
        return Err(Error::param("trace", "times, values and sems differ in length"));
    }
    if times.len() < 5 {
        return Err(Error::InsufficientData { needed: 4, got: times.len() });
    }
    if sems.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::param("sems", "must be positive and finite"));
    }
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    if !(t_max > 0.0) {
        return Err(Error::param("times", "need at least one positive time"));
    }

    const SCAN: usize = 400;
    let (lo, hi) = (0.02 / t_max, 50.0 / t_max);
    let ratio = (hi / lo).powf(1.0 / (SCAN - 1) as f64);
    let (best_k, mut c) = (0..SCAN)
        .map(|k| (k, lo * ratio.powi(k as i32)))
        .min_by(|a, b| chi_squared(a.1, times, values, sems).total_cmp(&chi_squared(b.1, times, values, sems)))
        .expect("scan is non-empty");
    if best_k == 0 {
        return Err(Error::NonConvergence("trace shows no displacement; c is driven to zero".into()));
    }

    let normal = |c: f64| -> (f64, f64) {
        let mut jtj = 0.0;
        let mut jtr = 0.0;
        for ((&t, &y), &s) in times.iter().zip(values).zip(sems) {
            let j = trace_slope(c, t) / s;
            jtj += j * j;
            jtr += j * (y - trace_value(c, t)) / s;
        }
        (jtj, jtr)
    };

    let mut cost = chi_squared(c, times, values, sems);
    let mut lambda = 1e-3;
    for iter in 1..=200 {
        let (jtj, jtr) = normal(c);
        if !(jtj > 0.0) {
            return Err(Error::NonConvergence("trace is insensitive to c".into()));
        }
        let step = jtr / (jtj * (1.0 + lambda));
        let trial = c + step;
        let trial_cost = if trial > 0.0 { chi_squared(trial, times, values, sems) } else { f64::INFINITY };
        if trial_cost <= cost {
            let done = step.abs() <= 1e-12 * c.abs() || cost - trial_cost <= 1e-14 * cost.max(1e-300);
            c = trial;
            cost = trial_cost;
            lambda = (lambda / 10.0).max(1e-12);
            if done {
                let (jtj, _) = normal(c);
                return Ok(SdfFit { c, sigma_c: jtj.sqrt().recip(), chi_squared: cost, iterations: iter });
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                let (jtj, _) = normal(c);
                return Ok(SdfFit { c, sigma_c: jtj.sqrt().recip(), chi_squared: cost, iterations: iter });
            }
        }
    }
    Err(Error::NonConvergence(format!("c did not settle after 200 iterations (last {c})")))
}
