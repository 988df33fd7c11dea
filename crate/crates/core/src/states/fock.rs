//! Fock-basis expansion of canonical states.
//!
//! Each component is rewritten as `D(α) S(ξ)|0⟩` and expanded with
//!
//! ```text
//! ⟨n|D(α)S(ξ)|0⟩ = P h_n,   P = exp(−|α|²/2 − α*² t/2) / √cosh r,   t = e^{iϑ} tanh r
//! h_0 = 1,  h_1 = g,  h_{n+1} = (g h_n − t √n h_{n−1}) / √(n+1),   g = α̃ / cosh r
//! ```
//!
//! where `α̃ = α cosh r + α* e^{iϑ} sinh r`. The `h_n` are normalised Hermite
//! polynomials; they are carried with a separate log scale so that the
//! recurrence never overflows before the prefactor is applied.

use super::OscillatorState;
use crate::error::{Error, Result};
use crate::scalar::{c, cr, is_finite_c, Complex, Real};

/// Truncation used when none is given.
pub const DEFAULT_N_MAX: usize = 500;
/// Allowed missing norm `1 − Σ|a_n|²`.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Amplitudes `a_0..=a_{n_max}`; everything above `n_max` is implicitly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FockExpansion<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> FockExpansion<T> {
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn n_max(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `Σ_n |a_n|²`.
    pub fn captured_norm(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Errors unless `Σ|a_n|² ≥ 1 − tail_tol`.
    pub fn check_tail(&self, tail_tol: f64) -> Result<()> {
        let captured = self.captured_norm().to_f64_lossy();
        if captured >= 1.0 - tail_tol {
            Ok(())
        } else {
            Err(Error::TailViolation { captured, tol: tail_tol })
        }
    }

    /// `Σ_n a_n* b_n` over the common range.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes.iter().zip(&other.amplitudes).fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    /// `Σ_n n |a_n|²`.
    pub fn mean_number(&self) -> T {
        self.amplitudes.iter().enumerate().map(|(n, a)| T::from_usize_lossy(n) * a.norm_sqr()).sum()
    }
}

/// Accumulates `coeff · ⟨n|D(alpha)S(ξ)|0⟩` into `out`.
fn add_displaced_squeezed<T: Real>(
    out: &mut [Complex<T>],
    coeff: Complex<T>,
    alpha: Complex<T>,
    state: &OscillatorState<T>,
) -> Result<()> {
    let sq = state.squeeze();
    let half = T::lit(0.5);
    let cosh = sq.r().cosh();
    let t = sq.phase_tanh();
    let g = sq.transform(alpha) / cosh;
    // ln(coeff · P)
    let log_pref =
        cr(-alpha.norm_sqr() * half - cosh.ln() * half) - alpha.conj() * alpha.conj() * t * half + coeff.ln();

    let limit = T::max_value().sqrt();
    let mut scale = T::zero();
    let mut prev = cr(T::zero());
    let mut cur = cr(T::one());
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            let nf = T::from_usize_lossy(n);
            let next = (g * cur - t * (nf - T::one()).sqrt() * prev) / nf.sqrt();
            prev = cur;
            cur = next;
            let mag = cur.norm().max(prev.norm());
            if mag > limit {
                prev /= mag;
                cur /= mag;
                scale += mag.ln();
            }
        }
        if cur.re == T::zero() && cur.im == T::zero() {
            continue;
        }
        let term = (log_pref + cr(scale) + cur.ln()).exp();
        if !is_finite_c(term) {
            return Err(Error::Overflow(format!(
                "Fock amplitude {n} of D({alpha})S({}, {}) is not finite",
                sq.r(),
                sq.theta()
            )));
        }
        *slot += term;
    }
    Ok(())
}

/// Expands `state` on `|0⟩..=|n_max⟩`.
pub fn fock_expand<T: Real>(state: &OscillatorState<T>, n_max: usize) -> Result<FockExpansion<T>> {
    let mut amplitudes = vec![c(T::zero(), T::zero()); n_max + 1];
    for (coeff, alpha) in state.displaced_squeezed_terms() {
        add_displaced_squeezed(&mut amplitudes, coeff, alpha, state)?;
    }
    let inv = T::one() / state.norm().sqrt();
    for a in &mut amplitudes {
        *a *= inv;
    }
    Ok(FockExpansion { amplitudes })
}

/// `|Σ_{n ≤ n_max} a_n* b_n|²`.
pub fn fidelity<T: Real>(a: &OscillatorState<T>, b: &OscillatorState<T>, n_max: usize) -> Result<T> {
    let fa = fock_expand(a, n_max)?;
    let fb = fock_expand(b, n_max)?;
    Ok(fa.inner(&fb).norm_sqr())
}
