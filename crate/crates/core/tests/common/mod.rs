#![allow(dead_code)]

use chitomo::states::{fock_expand, make_state, ComponentSpec, StateSpec};
use chitomo::{State, C64};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn polar(max_radius: f64) -> impl Strategy<Value = C64> {
    (0.0..=max_radius, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, a)| C64::from_polar(r, a))
}

/// Component list with coefficients of magnitude in [0.1, 1] and centers at
/// least 0.3 apart, so the normalisation never nearly cancels.
fn components(max_n: usize, max_center: f64) -> impl Strategy<Value = Vec<ComponentSpec>> {
    prop::collection::vec((0.1..=1.0f64, -3.2..3.2f64, polar(max_center)), 1..=max_n)
        .prop_filter("centers too close", |v| {
            v.iter().enumerate().all(|(i, a)| v[..i].iter().all(|b| (a.2 - b.2).norm() >= 0.3))
        })
        .prop_map(|v| {
            v.into_iter()
                .map(|(m, ph, z)| {
                    let k = C64::from_polar(m, ph);
                    ComponentSpec { coeff: [k.re, k.im], center: [z.re, z.im] }
                })
                .collect()
        })
}

/// `Σ_k c_k D(μ_k) S(r e^{iϑ}) |0⟩` with `|μ_k| ≤ max_center`, `r ≤ max_r`.
pub fn state_spec(max_n: usize, max_r: f64, max_center: f64) -> impl Strategy<Value = StateSpec> {
    (components(max_n, max_center), 0.0..=max_r, -1.5..1.5f64).prop_map(|(components, r, theta)| StateSpec::Custom {
        components,
        r,
        theta,
        delta: c(0.0, 0.0),
    })
}

pub fn random_state(max_n: usize, max_r: f64, max_center: f64) -> impl Strategy<Value = State> {
    state_spec(max_n, max_r, max_center).prop_map(|s| make_state(&s).expect("valid random state"))
}

/// The four reference states at their nominal parameters.
pub fn calibrated_states() -> Vec<(&'static str, StateSpec)> {
    vec![
        ("squeezed", StateSpec::DisplacedSqueezed { r: 0.93, theta: 0.0, delta: c(0.0, 0.0) }),
        ("displaced_squeezed", StateSpec::DisplacedSqueezed { r: 0.93, theta: 0.0, delta: c(0.78, 0.0) }),
        ("cat", StateSpec::Cat { alpha: c(2.42, 0.0), r: 0.58, theta: 0.0, delta: c(0.0, 0.0) }),
        ("gkp", StateSpec::Gkp { l: c(2.5, 0.0), r: 0.93, theta: 0.0, delta: c(0.0, 0.0) }),
    ]
}

/// `⟨{(a†)^m a^n}_sym⟩` for `m + n ≤ 2` from Fock amplitudes.
pub fn fock_symmetric_moment(state: &State, m: usize, n: usize, n_max: usize) -> C64 {
    let a = fock_expand(state, n_max).unwrap();
    let amp = a.amplitudes();
    let lower = |k: usize| -> C64 {
        // ⟨a^k⟩ = Σ_j sqrt((j+1)...(j+k)) a_j* a_{j+k}
        (0..amp.len().saturating_sub(k))
            .map(|j| {
                let f: f64 = (1..=k).map(|i| (j + i) as f64).product::<f64>().sqrt();
                amp[j].conj() * amp[j + k] * f
            })
            .sum()
    };
    match (m, n) {
        (0, 0) => c(1.0, 0.0),
        (0, k) => lower(k),
        (k, 0) => lower(k).conj(),
        (1, 1) => c(a.mean_number() + 0.5, 0.0),
        _ => panic!("order not covered"),
    }
}
