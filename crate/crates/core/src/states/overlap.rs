//! Closed-form overlaps of displaced squeezed states, independent of the Fock route.
//!
//! In the position representation (`x = (a + a†)/√2`)
//!
//! ```text
//! ⟨x|D(α)S(ξ)|0⟩ = π^{−1/4} (cosh r − e^{iϑ} sinh r)^{−1/2}
//!                  · exp(−u (x − x₀)²/2 + i p₀ x − i x₀ p₀ / 2)
//! u = (cosh r + e^{iϑ} sinh r)/(cosh r − e^{iϑ} sinh r),   x₀ = √2 Re α,   p₀ = √2 Im α
//! ```
//!
//! so every overlap is a single complex Gaussian integral.

use super::{OscillatorState, SqueezeParam};
use crate::scalar::{cr, Complex, Real};

/// Wavefunction `pref · exp(−A x² + B x + C)`.
struct Gaussian<T> {
    pref: Complex<T>,
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
}

fn gaussian<T: Real>(alpha: Complex<T>, sq: SqueezeParam<T>) -> Gaussian<T> {
    let half = T::lit(0.5);
    let sqrt2 = T::SQRT_2();
    let ch = cr(sq.r().cosh());
    let es = Complex::from_polar(sq.r().sinh(), sq.theta());
    let u = (ch + es) / (ch - es);
    let x0 = sqrt2 * alpha.re;
    let p0 = sqrt2 * alpha.im;
    let i = Complex::i();
    Gaussian {
        pref: (ch - es).sqrt().inv() * T::PI().powf(T::lit(-0.25)),
        a: u * half,
        b: u * x0 + i * p0,
        c: -u * (x0 * x0 * half) - i * (x0 * p0 * half),
    }
}

/// `⟨α₁, ξ₁ | α₂, ξ₂⟩` with `|α, ξ⟩ = D(α) S(ξ) |0⟩`.
pub fn displaced_squeezed_overlap<T: Real>(
    alpha1: Complex<T>,
    sq1: SqueezeParam<T>,
    alpha2: Complex<T>,
    sq2: SqueezeParam<T>,
) -> Complex<T> {
    let g1 = gaussian(alpha1, sq1);
    let g2 = gaussian(alpha2, sq2);
    // ∫ exp(−A x² + B x + C) dx = √(π/A) exp(B²/(4A) + C),  Re A > 0
    let a = g1.a.conj() + g2.a;
    let b = g1.b.conj() + g2.b;
    let c = g1.c.conj() + g2.c;
    let quarter = T::lit(0.25);
    g1.pref.conj() * g2.pref * (cr(T::PI()) / a).sqrt() * (b * b / a * quarter + c).exp()
}

/// `⟨a|b⟩` summed over component pairs.
pub fn state_overlap<T: Real>(a: &OscillatorState<T>, b: &OscillatorState<T>) -> Complex<T> {
    let mut acc = cr(T::zero());
    for (ca, alpha_a) in a.displaced_squeezed_terms() {
        for (cb, alpha_b) in b.displaced_squeezed_terms() {
            acc += ca.conj() * cb * displaced_squeezed_overlap(alpha_a, a.squeeze(), alpha_b, b.squeeze());
        }
    }
    acc / (a.norm() * b.norm()).sqrt()
}

/// `|⟨a|b⟩|²` from [`state_overlap`].
pub fn fidelity_overlap_oracle<T: Real>(a: &OscillatorState<T>, b: &OscillatorState<T>) -> T {
    state_overlap(a, b).norm_sqr()
}
