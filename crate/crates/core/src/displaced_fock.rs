//! The population-based Wigner reconstruction: displace, read out the Fock
//! populations from a blue-sideband Rabi trace, and sum them with alternating
//! signs. Kept for comparison with direct characteristic-function readout.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, nnls, Matrix};
use crate::measurement::sample_expectation;
use crate::recon::io::{write_header, Header};
use crate::rng::stream_rng;
use crate::scalar::{Complex, Real};
use crate::states::{fock_expand, OscillatorState, DEFAULT_TAIL_TOL};

/// Base sideband Rabi frequency `Ω = 2π · 20 kHz`, in rad/ms.
pub const DEFAULT_OMEGA: f64 = 2.0 * std::f64::consts::PI * 20.0;

/// Designs with a larger condition number are rejected by [`extract_populations`].
pub const DEFAULT_MAX_CONDITION: f64 = 1e8;

/// `p(n_γ) = |⟨n|D(−γ)|ψ⟩|²` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationVector<T> {
    pub gamma: Complex<T>,
    pub probs: Vec<T>,
}

impl<T: Real> PopulationVector<T> {
    pub fn n_max(&self) -> usize {
        self.probs.len().saturating_sub(1)
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }
}

/// Fock populations of `D(−γ)|ψ⟩`; fails if more than
/// [`DEFAULT_TAIL_TOL`] of the norm lies above `n_max`.
pub fn displaced_populations<T: Real>(
    state: &OscillatorState<T>,
    gamma: Complex<T>,
    n_max: usize,
) -> Result<PopulationVector<T>> {
    let fock = fock_expand(&state.displaced(-gamma), n_max)?;
    fock.check_tail(DEFAULT_TAIL_TOL)?;
    Ok(PopulationVector { gamma, probs: fock.probabilities() })
}

/// [`displaced_populations`] at many points, in parallel.
pub fn displaced_populations_many<T: Real>(
    state: &OscillatorState<T>,
    gammas: &[Complex<T>],
    n_max: usize,
) -> Result<Vec<PopulationVector<T>>> {
    gammas.par_iter().map(|&g| displaced_populations(state, g, n_max)).collect()
}

/// `P(↑, t) − P(↓, t)` sampled at `times` (ms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiTrace<T> {
    pub gamma: Complex<T>,
    pub times: Vec<T>,
    pub values: Vec<T>,
    /// Base Rabi frequency in rad/ms.
    pub omega: T,
}

impl<T: Real> RabiTrace<T> {
    pub fn new(gamma: Complex<T>, times: Vec<T>, values: Vec<T>, omega: T) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::param("values", format!("{} values for {} times", values.len(), times.len())));
        }
        check_times(&times)?;
        check_omega(omega)?;
        Ok(Self { gamma, times, values, omega })
    }
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::param("times", "empty"));
    }
    if !times.iter().all(|t| t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("times", "must be finite and strictly increasing"));
    }
    Ok(())
}

fn check_omega<T: Real>(omega: T) -> Result<()> {
    if omega > T::zero() && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::param("omega", "must be positive"))
    }
}

/// Cosine design `A[i][n] = cos(Ω √(n+1) t_i)`.
pub fn design_matrix<T: Real>(times: &[T], omega: T, n_max: usize) -> Matrix<T> {
    let mut a = Matrix::zeros(times.len(), n_max + 1);
    for (i, &t) in times.iter().enumerate() {
        for n in 0..=n_max {
            a[(i, n)] = (omega * T::from_usize_lossy(n + 1).sqrt() * t).cos();
        }
    }
    a
}

/// Condition number of [`design_matrix`].
pub fn design_condition_number<T: Real>(times: &[T], omega: T, n_max: usize) -> T {
    condition_number(&design_matrix(times, omega, n_max))
}

/// Beat period between the two highest frequencies `Ω√n_max` and `Ω√(n_max+1)`.
pub fn beat_period(omega: f64, n_max: usize) -> f64 {
    let n = n_max as f64;
    2.0 * std::f64::consts::PI / (omega * ((n + 1.0).sqrt() - n.sqrt()))
}

/// `Σ_n p(n) cos(Ω √(n+1) t)` at every time.
pub fn synthesize_rabi_trace<T: Real>(pops: &PopulationVector<T>, omega: T, times: &[T]) -> Result<RabiTrace<T>> {
    check_times(times)?;
    check_omega(omega)?;
    let a = design_matrix(times, omega, pops.n_max());
    let values = a.mul_vec(&pops.probs);
    Ok(RabiTrace { gamma: pops.gamma, times: times.to_vec(), values, omega })
}

/// The trace with binomial projection noise (`shots` per time point); returns
/// the noisy trace and the per-point standard errors.
pub fn sample_rabi_trace<T: Real>(trace: &RabiTrace<T>, shots: u64, seed: u64) -> Result<(RabiTrace<T>, Vec<T>)> {
    let mut values = Vec::with_capacity(trace.values.len());
    let mut sems = Vec::with_capacity(trace.values.len());
    for (i, &v) in trace.values.iter().enumerate() {
        let (_, est, sem) = sample_expectation(v, shots, &mut stream_rng(seed, i as u64))?;
        values.push(est);
        sems.push(sem);
    }
    Ok((RabiTrace { values, ..trace.clone() }, sems))
}

/// Populations `p(0..=n_max)` from a trace by non-negative least squares,
/// rejecting designs whose condition number exceeds [`DEFAULT_MAX_CONDITION`].
pub fn extract_populations<T: Real>(trace: &RabiTrace<T>, n_max: usize) -> Result<PopulationVector<T>> {
    extract_populations_with(trace, n_max, DEFAULT_MAX_CONDITION)
}

pub fn extract_populations_with<T: Real>(
    trace: &RabiTrace<T>,
    n_max: usize,
    max_condition: f64,
) -> Result<PopulationVector<T>> {
    if trace.times.len() <= n_max {
        return Err(Error::InsufficientData { needed: n_max + 2, got: trace.times.len() });
    }
    let a = design_matrix(&trace.times, trace.omega, n_max);
    let cond = condition_number(&a).to_f64_lossy();
    if !(cond <= max_condition) {
        return Err(Error::IllConditioned { cond, threshold: max_condition });
    }
    let probs = nnls(&a, &trace.values)?;
    Ok(PopulationVector { gamma: trace.gamma, probs })
}

/// `Σ_n (−1)ⁿ p(n)`.
pub fn leibfried_parity<T: Real>(pops: &PopulationVector<T>) -> T {
    pops.probs.iter().enumerate().fold(T::zero(), |acc, (n, &p)| if n % 2 == 0 { acc + p } else { acc - p })
}

/// `W(γ) = (2/π) Σ_n (−1)ⁿ p(n_γ)`.
pub fn wigner_point_from_pops<T: Real>(pops: &PopulationVector<T>) -> T {
    T::lit(2.0) / T::PI() * leibfried_parity(pops)
}

/// Shot-time advantage `R = t_wig / (p_ps · t_char)` of direct χ readout.
pub fn cost_ratio(t_wig_per_point: f64, t_char_per_point: f64, p_ps: f64) -> Result<f64> {
    for (name, v) in [("t_wig_per_point", t_wig_per_point), ("t_char_per_point", t_char_per_point)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    if !(p_ps > 0.0 && p_ps <= 1.0) {
        return Err(Error::param("p_ps", format!("must lie in (0, 1], got {p_ps}")));
    }
    Ok(t_wig_per_point / (p_ps * t_char_per_point))
}

#[derive(Serialize)]
struct PopRow {
    n: usize,
    p: f64,
}

#[derive(Serialize)]
struct TraceRow {
    t_ms: f64,
    value: f64,
}

fn gamma_header<T: Real>(extra: &Header, gamma: Complex<T>) -> Header {
    let mut h = extra.clone();
    h.insert("gamma_re".into(), gamma.re.to_f64_lossy().to_string());
    h.insert("gamma_im".into(), gamma.im.to_f64_lossy().to_string());
    h
}

fn write_csv_rows<W: Write, R: Serialize>(out: W, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `# key: value` header, then `n,p` rows.
pub fn write_populations_csv<T: Real, W: Write>(pops: &PopulationVector<T>, extra: &Header, mut out: W) -> Result<()> {
    write_header(&mut out, &gamma_header(extra, pops.gamma))?;
    write_csv_rows(out, pops.probs.iter().enumerate().map(|(n, p)| PopRow { n, p: p.to_f64_lossy() }))
}

/// `# key: value` header (including `omega`), then `t_ms,value` rows.
pub fn write_rabi_trace_csv<T: Real, W: Write>(trace: &RabiTrace<T>, extra: &Header, mut out: W) -> Result<()> {
    let mut h = gamma_header(extra, trace.gamma);
    h.insert("omega".into(), trace.omega.to_f64_lossy().to_string());
    write_header(&mut out, &h)?;
    write_csv_rows(
        out,
        trace
            .times
            .iter()
            .zip(&trace.values)
            .map(|(t, v)| TraceRow { t_ms: t.to_f64_lossy(), value: v.to_f64_lossy() }),
    )
}
