//! Oscillator states written as a squeezing operator applied to a superposition
//! of coherent states, `|ψ⟩ = S(ξ) Σ_k c_k |γ_k⟩ / √N`.
//!
//! Every state family the toolkit works with (squeezed, displaced-squeezed,
//! squeezed cats, three-component GKP approximations) is closed under this
//! form. Displacements applied from the left are pushed through the squeezer
//! with the interchange relation `D(α) S(ξ) = S(ξ) D(α')`,
//! `α' = α cosh r + α* e^{iϑ} sinh r`, and merged into the coherent centers
//! with the composition law `D(β) D(δ) = e^{(βδ* − β*δ)/2} D(β + δ)`.

mod fock;
mod overlap;
mod spec;

pub use fock::{fidelity, fock_expand, FockExpansion, DEFAULT_N_MAX, DEFAULT_TAIL_TOL};
pub use overlap::{displaced_squeezed_overlap, fidelity_overlap_oracle, state_overlap};
pub use spec::{make_state, ComponentSpec, StateSpec};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, cr, is_finite_c, Complex, Real};

/// Squeezing `ξ = r e^{iϑ}` in `S(ξ) = exp((−ξ a†² + ξ* a²)/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParam<T> {
    r: T,
    theta: T,
}

impl<T: Real> SqueezeParam<T> {
    /// `theta` is wrapped into `[−π, π)`.
    pub fn new(r: T, theta: T) -> Result<Self> {
        if !r.is_finite() || !theta.is_finite() {
            return Err(Error::param("r/theta", "must be finite"));
        }
        if r < T::zero() {
            return Err(Error::param("r", format!("must be >= 0, got {r}")));
        }
        Ok(Self { r, theta: wrap_angle(theta) })
    }

    pub fn none() -> Self {
        Self { r: T::zero(), theta: T::zero() }
    }

    pub fn r(&self) -> T {
        self.r
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn is_identity(&self) -> bool {
        self.r == T::zero()
    }

    /// `e^{iϑ} tanh r`, the Gaussian's complex squeezing coefficient.
    pub(crate) fn phase_tanh(&self) -> Complex<T> {
        Complex::from_polar(self.r.tanh(), self.theta)
    }

    /// `β ↦ β cosh r + β* e^{iϑ} sinh r`.
    ///
    /// This is the argument map in `χ(β; S(ξ)ψ) = χ(β̃; ψ)` and the interchange
    /// `D(β) S(ξ) = S(ξ) D(β̃)`.
    pub fn transform(&self, beta: Complex<T>) -> Complex<T> {
        if self.is_identity() {
            return beta;
        }
        beta * self.r.cosh() + beta.conj() * Complex::from_polar(self.r.sinh(), self.theta)
    }

    /// Inverse of [`transform`](Self::transform): `α ↦ α cosh r − α* e^{iϑ} sinh r`.
    pub fn inverse_transform(&self, alpha: Complex<T>) -> Complex<T> {
        if self.is_identity() {
            return alpha;
        }
        alpha * self.r.cosh() - alpha.conj() * Complex::from_polar(self.r.sinh(), self.theta)
    }
}

/// Wraps an angle into `[−π, π)`.
pub(crate) fn wrap_angle<T: Real>(theta: T) -> T {
    let two_pi = T::TAU();
    let mut t = (theta + T::PI()) % two_pi;
    if t < T::zero() {
        t += two_pi;
    }
    // `%` can return exactly 2π after the shift for inputs just below π.
    if t >= two_pi {
        t -= two_pi;
    }
    t - T::PI()
}

/// One term `c_k |γ_k⟩` of the coherent superposition (unnormalised).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentComponent<T> {
    pub coeff: Complex<T>,
    pub center: Complex<T>,
}

impl<T: Real> CoherentComponent<T> {
    pub fn new(coeff: Complex<T>, center: Complex<T>) -> Self {
        Self { coeff, center }
    }
}

/// Canonical state `S(ξ) Σ_k c_k |γ_k⟩ / √N`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorState<T> {
    components: Vec<CoherentComponent<T>>,
    squeeze: SqueezeParam<T>,
    norm: T,
}

impl<T: Real> OscillatorState<T> {
    /// Builds the canonical state from arbitrary components.
    ///
    /// Centers closer than `1e-10` are merged (coefficients added) and
    /// coefficients below `1e-14` in magnitude are dropped.
    pub fn new(components: Vec<CoherentComponent<T>>, squeeze: SqueezeParam<T>) -> Result<Self> {
        let merge_tol = T::tol(1e-10);
        let drop_tol = T::tol(1e-14);
        let mut merged: Vec<CoherentComponent<T>> = Vec::with_capacity(components.len());
        for comp in components {
            if !is_finite_c(comp.coeff) || !is_finite_c(comp.center) {
                return Err(Error::param("component", "coefficients and centers must be finite"));
            }
            match merged.iter_mut().find(|m| (m.center - comp.center).norm() < merge_tol) {
                Some(m) => m.coeff += comp.coeff,
                None => merged.push(comp),
            }
        }
        merged.retain(|m| m.coeff.norm() >= drop_tol);
        if merged.is_empty() {
            return Err(Error::AllCoefficientsZero);
        }
        let norm = superposition_norm(&merged);
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::Overflow(format!("normalisation evaluated to {norm}")));
        }
        Ok(Self { components: merged, squeeze, norm })
    }

    /// The ground state `|0⟩`.
    pub fn vacuum() -> Self {
        Self {
            components: vec![CoherentComponent::new(cr(T::one()), cr(T::zero()))],
            squeeze: SqueezeParam::none(),
            norm: T::one(),
        }
    }

    /// Coherent state `|α⟩`.
    pub fn coherent(alpha: Complex<T>) -> Result<Self> {
        Self::new(vec![CoherentComponent::new(cr(T::one()), alpha)], SqueezeParam::none())
    }

    pub fn components(&self) -> &[CoherentComponent<T>] {
        &self.components
    }

    pub fn squeeze(&self) -> SqueezeParam<T> {
        self.squeeze
    }

    /// Cached `N = Σ c_δ* c_ε ⟨δ|ε⟩`.
    pub fn norm(&self) -> T {
        self.norm
    }

    /// Re-runs canonicalisation on the stored components.
    pub fn canonicalize(&self) -> Result<Self> {
        Self::new(self.components.clone(), self.squeeze)
    }

    /// `D(δ) |ψ⟩`, again in canonical form.
    pub fn displaced(&self, delta: Complex<T>) -> Self {
        let shift = self.squeeze.transform(delta);
        let components = self
            .components
            .iter()
            .map(|comp| {
                let (phase, center) = compose_displacements(shift, comp.center);
                CoherentComponent::new(comp.coeff * phase, center)
            })
            .collect();
        // Shifting every center by the same amount keeps them distinct and
        // cannot zero a coefficient, so this only fails on overflow.
        Self::new(components, self.squeeze).expect("displacement preserves validity")
    }

    /// Multiplies every coefficient by `e^{iφ}`; physically the same state.
    pub fn with_global_phase(&self, phi: T) -> Self {
        let phase = Complex::from_polar(T::one(), phi);
        Self {
            components: self.components.iter().map(|m| CoherentComponent::new(m.coeff * phase, m.center)).collect(),
            squeeze: self.squeeze,
            norm: self.norm,
        }
    }

    /// The state rewritten as `Σ_k c_k D(α_k) S(ξ) |0⟩ / √N`.
    pub fn displaced_squeezed_terms(&self) -> impl Iterator<Item = (Complex<T>, Complex<T>)> + '_ {
        self.components.iter().map(move |m| (m.coeff, self.squeeze.inverse_transform(m.center)))
    }
}

/// `D(β) D(δ) = e^{(βδ* − β*δ)/2} D(β + δ)`; returns the phase and the new center.
pub(crate) fn compose_displacements<T: Real>(beta: Complex<T>, delta: Complex<T>) -> (Complex<T>, Complex<T>) {
    let half = T::lit(0.5);
    let exponent = (beta * delta.conj() - beta.conj() * delta) * half;
    // The exponent is purely imaginary.
    (Complex::from_polar(T::one(), exponent.im), beta + delta)
}

/// Coherent-state overlap exponent `ln⟨δ|ε⟩ = −(|δ|² + |ε|² − 2δ*ε)/2`.
#[inline]
pub(crate) fn coherent_overlap_exponent<T: Real>(delta: Complex<T>, eps: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    delta.conj() * eps - cr((delta.norm_sqr() + eps.norm_sqr()) * half)
}

/// `N = Σ_{δ,ε} c_δ* c_ε ⟨δ|ε⟩`.
pub(crate) fn superposition_norm<T: Real>(components: &[CoherentComponent<T>]) -> T {
    let mut acc = c(T::zero(), T::zero());
    for a in components {
        for b in components {
            acc += a.coeff.conj() * b.coeff * coherent_overlap_exponent(a.center, b.center).exp();
        }
    }
    acc.re
}

/// Normalisation of a state: `N` of its coherent superposition. Squeezing is unitary.
pub fn normalization<T: Real>(state: &OscillatorState<T>) -> T {
    state.norm()
}
