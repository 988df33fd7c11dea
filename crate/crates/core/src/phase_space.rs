//! Characteristic, Wigner and Husimi functions of canonical states, and
//! symmetrically ordered moments.
//!
//! All three functions reduce to sums over component pairs. Squeezing enters
//! only through the argument map `β ↦ β cosh r + β* e^{iϑ} sinh r`. Each term
//! collects its full complex exponent before a single `exp`, so large centers
//! do not underflow partial factors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, cr, Complex, Real};
use crate::states::{displaced_squeezed_overlap, CoherentComponent, OscillatorState, SqueezeParam};

/// Ordering parameter `l` of the s-parametrised quasiprobabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuasiKind {
    /// `l = 0`
    Wigner,
    /// `l = −1`
    HusimiQ,
    /// `l = +1`. Listed for completeness; it can be singular and is never evaluated.
    GlauberP,
}

impl QuasiKind {
    pub fn order(self) -> i32 {
        match self {
            QuasiKind::Wigner => 0,
            QuasiKind::HusimiQ => -1,
            QuasiKind::GlauberP => 1,
        }
    }
}

/// `χ(β) = ⟨ψ|D(β)|ψ⟩`.
pub fn char_fn<T: Real>(state: &OscillatorState<T>, beta: Complex<T>) -> Complex<T> {
    let b = state.squeeze().transform(beta);
    if b.re == T::zero() && b.im == T::zero() {
        return cr(T::one());
    }
    let half = T::lit(0.5);
    let comps = state.components();
    let mut acc = cr(T::zero());
    for d in comps {
        for e in comps {
            // ⟨δ|D(β)|ε⟩ = exp(−β*ε + δ*β + δ*ε − (|δ|² + |β|² + |ε|²)/2)
            let expo = -b.conj() * e.center + d.center.conj() * b + d.center.conj() * e.center
                - cr((d.center.norm_sqr() + b.norm_sqr() + e.center.norm_sqr()) * half);
            acc += d.coeff.conj() * e.coeff * expo.exp();
        }
    }
    acc / state.norm()
}

/// Closed-form Wigner function `W(γ)`.
pub fn wigner_fn<T: Real>(state: &OscillatorState<T>, gamma: Complex<T>) -> T {
    let g = state.squeeze().transform(gamma);
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let comps = state.components();
    let mut acc = cr(T::zero());
    for d in comps {
        for e in comps {
            let expo = -d.center.conj() * e.center + d.center.conj() * g * two + e.center * g.conj() * two
                - cr(g.norm_sqr() * two + (d.center.norm_sqr() + e.center.norm_sqr()) * half);
            acc += d.coeff.conj() * e.coeff * expo.exp();
        }
    }
    two / (state.norm() * T::PI()) * acc.re
}

/// Husimi function `Q(β) = |⟨β|ψ⟩|²/π`.
pub fn q_fn<T: Real>(state: &OscillatorState<T>, beta: Complex<T>) -> T {
    let sq = state.squeeze();
    let none = SqueezeParam::none();
    let amp = state
        .displaced_squeezed_terms()
        .fold(cr(T::zero()), |acc, (coeff, alpha)| acc + coeff * displaced_squeezed_overlap(beta, none, alpha, sq));
    amp.norm_sqr() / (state.norm() * T::PI())
}

/// `(|0⟩ + e^{iφ}|α⟩)/√N`, the state described by [`cat_midline`].
pub fn midline_cat_state<T: Real>(alpha: T, phi: T) -> Result<OscillatorState<T>> {
    OscillatorState::new(
        vec![
            CoherentComponent::new(cr(T::one()), cr(T::zero())),
            CoherentComponent::new(Complex::from_polar(T::one(), phi), cr(alpha)),
        ],
        SqueezeParam::none(),
    )
}

/// `W` or `Q` of [`midline_cat_state`] on the line `α/2 + i m`:
///
/// ```text
/// W = (4/πN) e^{−2m²}        [e^{−α²/2} + cos(φ − 2mα)]
/// Q = (2/πN) e^{−α²/4 − m²}  [1 + cos(φ − mα)]
/// ```
///
/// with `N = 2(1 + e^{−α²/2} cos φ)`. The Q fringes carry the extra `e^{−α²/4}`.
pub fn cat_midline<T: Real>(alpha: T, phi: T, m: T, kind: QuasiKind) -> Result<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let a2 = alpha * alpha;
    let norm = two * (one + (-a2 / two).exp() * phi.cos());
    match kind {
        QuasiKind::Wigner => Ok(T::lit(4.0) / (T::PI() * norm)
            * (-two * m * m).exp()
            * ((-a2 / two).exp() + (phi - two * m * alpha).cos())),
        QuasiKind::HusimiQ => {
            Ok(two / (T::PI() * norm) * (-a2 / T::lit(4.0) - m * m).exp() * (one + (phi - m * alpha).cos()))
        }
        QuasiKind::GlauberP => Err(Error::Unsupported("GlauberP", "the P function of a cat state is singular")),
    }
}

/// Default finite-difference step for [`symmetric_moment`].
pub const DEFAULT_MOMENT_STEP: f64 = 1e-3;

/// Central-difference stencil of order 2 for the `k`-th derivative, as
/// `(offset, weight)` pairs in units of the step.
fn stencil(k: usize) -> &'static [(i32, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => unreachable!("derivative order above 4"),
    }
}

/// Coefficients of `(u − iv)^m (u + iv)^n` indexed `[j][k]` for `u^j v^k`.
fn wirtinger_polynomial(m: usize, n: usize) -> Vec<Vec<Complex<f64>>> {
    let deg = m + n;
    let mut poly = vec![vec![Complex::new(0.0, 0.0); deg + 1]; deg + 1];
    poly[0][0] = Complex::new(1.0, 0.0);
    let factors = std::iter::repeat_n(-1.0, m).chain(std::iter::repeat_n(1.0, n));
    for sign in factors {
        let mut next = vec![vec![Complex::new(0.0, 0.0); deg + 1]; deg + 1];
        for j in 0..deg {
            for k in 0..deg {
                let p = poly[j][k];
                next[j + 1][k] += p;
                next[j][k + 1] += p * Complex::new(0.0, sign);
            }
        }
        poly = next;
    }
    poly
}

fn moment_at_step<T: Real>(state: &OscillatorState<T>, m: usize, n: usize, h: T) -> Complex<T> {
    let poly = wirtinger_polynomial(m, n);
    let mut acc = cr(T::zero());
    for (j, row) in poly.iter().enumerate() {
        for (k, coef) in row.iter().enumerate() {
            if coef.norm() == 0.0 {
                continue;
            }
            let mut d = cr(T::zero());
            for &(ox, wx) in stencil(j) {
                for &(oy, wy) in stencil(k) {
                    let beta = c(h * T::lit(ox as f64), h * T::lit(oy as f64));
                    d += char_fn(state, beta) * T::lit(wx * wy);
                }
            }
            let scale = h.powi((j + k) as i32);
            acc += c(T::lit(coef.re), T::lit(coef.im)) * d / scale;
        }
    }
    // ∂_β^m (−∂_β*)^n = (−1)^n 2^{−(m+n)} (∂x − i∂y)^m (∂x + i∂y)^n
    let sign = if n.is_multiple_of(2) { T::one() } else { -T::one() };
    acc * (sign / T::lit(2.0).powi((m + n) as i32))
}

/// `⟨(a†)^m a^n⟩_S = ∂_β^m (−∂_β*)^n χ(β)|_{β=0}` by central differences of the
/// analytic χ with step `h`, refined by one Richardson halving.
pub fn symmetric_moment<T: Real>(state: &OscillatorState<T>, m: usize, n: usize, h: T) -> Result<Complex<T>> {
    if m > 2 || n > 2 {
        return Err(Error::param("m/n", "orders are limited to 0, 1, 2"));
    }
    if m + n > 4 {
        return Err(Error::param("m+n", "total order above 4"));
    }
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::param("h", "step must be positive"));
    }
    if m + n == 0 {
        return Ok(cr(T::one()));
    }
    let coarse = moment_at_step(state, m, n, h);
    let fine = moment_at_step(state, m, n, h / T::lit(2.0));
    Ok((fine * T::lit(4.0) - coarse) / T::lit(3.0))
}
