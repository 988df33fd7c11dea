//! Readout of the characteristic function through a qubit.
//!
//! A carrier rotation selects the quadrature `θ`, the state-dependent force
//! applies `D(β)` conditioned on the qubit, and fluorescence gives
//! `⟨σ_z⟩ = cos θ Re χ(β) + sin θ Im χ(β)`. State preparation and measurement
//! errors enter as the affine map `E = ⟨σ_z⟩(1 − |b|) + b`, and finite shots as
//! binomial noise on `P(↑) = (E + 1)/2`.

mod io;
mod sdf;

pub use io::{read_records_csv, read_records_json, write_records_csv, write_records_json, RecordRow};
pub use sdf::{fit_sdf_calibration, sample_sdf_trace, simulate_sdf_trace, SdfCalibration, SdfFit};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::char_fn;
use crate::rng::stream_rng;
use crate::scalar::{c, Complex, Real};
use crate::states::OscillatorState;

/// `θ = 0` reads `Re χ`, `θ = π/2` reads `Im χ`.
pub const THETA_RE: f64 = 0.0;
pub const THETA_IM: f64 = std::f64::consts::FRAC_PI_2;

/// Scalar SPAM offset `b`, `|b| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SpamBias(f64);

impl SpamBias {
    pub const NONE: SpamBias = SpamBias(0.0);

    pub fn new(b: f64) -> Result<Self> {
        if b.is_finite() && b.abs() < 1.0 {
            Ok(Self(b))
        } else {
            Err(Error::InvalidBias(b))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `x (1 − |b|) + b`.
    pub fn apply<T: Real>(self, x: T) -> T {
        let b = T::lit(self.0);
        x * (T::one() - b.abs()) + b
    }

    /// Inverse of [`apply`](Self::apply).
    pub fn remove<T: Real>(self, e: T) -> T {
        let b = T::lit(self.0);
        (e - b) / (T::one() - b.abs())
    }
}

impl TryFrom<f64> for SpamBias {
    type Error = Error;
    fn try_from(b: f64) -> Result<Self> {
        Self::new(b)
    }
}

impl From<SpamBias> for f64 {
    fn from(b: SpamBias) -> f64 {
        b.0
    }
}

/// One measurement setting and its outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutRecord<T> {
    pub beta: Complex<T>,
    pub theta: T,
    pub shots: u64,
    pub ups: u64,
    /// `2 ups/shots − 1`
    pub estimate: T,
    pub sem: T,
}

/// `cos θ Re χ(β) + sin θ Im χ(β)`.
pub fn ideal_expectation<T: Real>(state: &OscillatorState<T>, beta: Complex<T>, theta: T) -> T {
    quadrature(char_fn(state, beta), theta)
}

/// Projection of a complex value onto quadrature `θ`.
#[inline]
pub fn quadrature<T: Real>(chi: Complex<T>, theta: T) -> T {
    theta.cos() * chi.re + theta.sin() * chi.im
}

/// Recovers `χ` from readings at `θ` and `θ + π/2`.
pub fn chi_from_quadratures<T: Real>(theta: T, at_theta: T, at_perp: T) -> Complex<T> {
    let (s, co) = theta.sin_cos();
    c(co * at_theta - s * at_perp, s * at_theta + co * at_perp)
}

pub fn biased_expectation<T: Real>(state: &OscillatorState<T>, beta: Complex<T>, theta: T, bias: SpamBias) -> T {
    bias.apply(ideal_expectation(state, beta, theta))
}

/// Draws `shots` outcomes with `⟨σ_z⟩ = expectation`.
///
/// `sem = 2 √(p̂(1 − p̂)/shots)`, floored at `1/shots` when every shot agreed.
pub fn sample_expectation<T: Real, R: Rng + ?Sized>(expectation: T, shots: u64, rng: &mut R) -> Result<(u64, T, T)> {
    if shots == 0 {
        return Err(Error::param("shots", "must be at least 1"));
    }
    let p = ((expectation.to_f64_lossy() + 1.0) / 2.0).clamp(0.0, 1.0);
    if p.is_nan() {
        return Err(Error::param("expectation", "not finite"));
    }
    let ups = Binomial::new(shots, p).map_err(|e| Error::param("p", e.to_string()))?.sample(rng);
    let n = shots as f64;
    let p_hat = ups as f64 / n;
    let estimate = 2.0 * p_hat - 1.0;
    let sem = if ups == 0 || ups == shots { 1.0 / n } else { 2.0 * (p_hat * (1.0 - p_hat) / n).sqrt() };
    Ok((ups, T::lit(estimate), T::lit(sem)))
}

/// Simulates one record; `seed` fully determines the outcome.
pub fn sample_readout<T: Real>(
    state: &OscillatorState<T>,
    beta: Complex<T>,
    theta: T,
    shots: u64,
    bias: SpamBias,
    seed: u64,
) -> Result<ReadoutRecord<T>> {
    let mut rng = stream_rng(seed, 0);
    let e = biased_expectation(state, beta, theta, bias);
    let (ups, estimate, sem) = sample_expectation(e, shots, &mut rng)?;
    Ok(ReadoutRecord { beta, theta, shots, ups, estimate, sem })
}

/// Samples every `(point, θ)` pair; pair `k = i·|θs| + j` uses stream `k` of `master_seed`.
///
/// Records are ordered point-major, quadrature-minor.
pub fn sample_grid<T: Real>(
    state: &OscillatorState<T>,
    points: &[Complex<T>],
    thetas: &[T],
    shots: u64,
    bias: SpamBias,
    master_seed: u64,
) -> Result<Vec<ReadoutRecord<T>>> {
    sample_with(points, thetas, shots, master_seed, |beta, theta| biased_expectation(state, beta, theta, bias))
}

/// Like [`sample_grid`] with an arbitrary expectation model.
pub fn sample_with<T, F>(
    points: &[Complex<T>],
    thetas: &[T],
    shots: u64,
    master_seed: u64,
    expectation: F,
) -> Result<Vec<ReadoutRecord<T>>>
where
    T: Real,
    F: Fn(Complex<T>, T) -> T + Sync,
{
    let nq = thetas.len();
    (0..points.len() * nq)
        .into_par_iter()
        .map(|k| {
            let beta = points[k / nq];
            let theta = thetas[k % nq];
            let mut rng = stream_rng(master_seed, k as u64);
            let (ups, estimate, sem) = sample_expectation(expectation(beta, theta), shots, &mut rng)?;
            Ok(ReadoutRecord { beta, theta, shots, ups, estimate, sem })
        })
        .collect()
}
