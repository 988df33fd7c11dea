mod common;

use chitomo::displaced_fock::{
    beat_period, design_condition_number, displaced_populations, extract_populations, sample_rabi_trace,
    synthesize_rabi_trace, wigner_point_from_pops, PopulationVector, DEFAULT_OMEGA,
};
use chitomo::phase_space::wigner_fn;
use chitomo::states::{make_state, DEFAULT_TAIL_TOL};
use chitomo::Error;
use common::*;
use proptest::prelude::*;

fn linspace(end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect()
}

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, n).prop_filter_map("all zero", |v| {
        let s: f64 = v.iter().sum();
        (s > 1e-3).then(|| v.into_iter().map(|x| x / s).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn noiseless_round_trip(n_max in 1usize..=10, probs in simplex(11)) {
        let mut p = probs;
        p.truncate(n_max + 1);
        let total: f64 = p.iter().sum();
        let pops = PopulationVector { gamma: c(0.0, 0.0), probs: p.iter().map(|x| x / total).collect() };
        let t = linspace(4.0 * beat_period(DEFAULT_OMEGA, n_max), 300);
        let trace = synthesize_rabi_trace(&pops, DEFAULT_OMEGA, &t).unwrap();
        prop_assert!((trace.values[0] - 1.0).abs() < 1e-12);
        let back = extract_populations(&trace, n_max).unwrap();
        for (a, b) in back.probs.iter().zip(&pops.probs) {
            prop_assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn populations_give_wigner(s in random_state(3, 0.8, 2.0), g in polar(1.5)) {
        let pops = displaced_populations(&s, g, 300).unwrap();
        let total = pops.total();
        prop_assert!((1.0 - DEFAULT_TAIL_TOL..=1.0 + 1e-12).contains(&total));
        prop_assert!(pops.probs.iter().all(|&p| (-1e-15..=1.0 + 1e-12).contains(&p)));
        prop_assert!((wigner_point_from_pops(&pops) - wigner_fn(&s, g)).abs() < 1e-6);
    }
}

#[test]
fn conditioning_grows_with_n_max() {
    for t_end in [0.25, 0.5] {
        let t = linspace(t_end, 2001);
        let conds: Vec<f64> = [5, 10, 20, 40].iter().map(|&n| design_condition_number(&t, DEFAULT_OMEGA, n)).collect();
        assert!(conds.windows(2).all(|w| w[1] > w[0]), "{t_end}: {conds:?}");
    }
}

/// Poisson(1) populations survive shot noise; the GKP point at 3+3i does not.
#[test]
fn noisy_extraction_degrades_with_support() {
    let vac = chitomo::State::vacuum();
    let pops = displaced_populations(&vac, c(1.0, 0.0), 8).unwrap_err();
    assert!(matches!(pops, Error::TailViolation { .. }));
    let pops = displaced_populations(&vac, c(1.0, 0.0), 20).unwrap();
    let t = linspace(4.0 * beat_period(DEFAULT_OMEGA, 8), 400);
    let short = PopulationVector { gamma: pops.gamma, probs: pops.probs[..=8].to_vec() };
    let (noisy, _) = sample_rabi_trace(&synthesize_rabi_trace(&short, DEFAULT_OMEGA, &t).unwrap(), 200, 1).unwrap();
    let back = extract_populations(&noisy, 8).unwrap();
    let err = back.probs.iter().zip(&short.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 0.05, "{err}");

    let gkp = make_state::<f64>(&calibrated_states()[3].1).unwrap();
    let pops = displaced_populations(&gkp, c(3.0, 3.0), 300).unwrap();
    let t = linspace(0.25, 101);
    let trace = synthesize_rabi_trace(&pops, DEFAULT_OMEGA, &t).unwrap();
    assert!(matches!(extract_populations(&trace, 80), Err(Error::IllConditioned { .. })));
}
