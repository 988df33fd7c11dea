//! Plain-text run summary.

use std::fmt::Write;

use chitomo::rng::RNG_ALGORITHM;

use crate::pipeline::Bundle;

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.digits$}"))
}

pub fn render(bundle: &Bundle) -> String {
    let cfg = &bundle.config;
    let mut s = String::new();
    // Writing to a String cannot fail.
    let _ = writeln!(s, "# config_hash: {}", bundle.hash);
    let _ = writeln!(s, "# rng: {RNG_ALGORITHM}");
    let _ = writeln!(s, "experiment      {}", cfg.name);
    let _ = writeln!(s, "state           {}", serde_json::to_string(&cfg.state).unwrap_or_default());
    let _ = writeln!(
        s,
        "grid            {} Re {} x Im {} step {}",
        cfg.grid.kind.name(),
        cfg.grid.extent_re(),
        cfg.grid.extent_im(),
        cfg.grid.spacing
    );
    let _ = writeln!(s, "records         {} ({} shots each, bias {})", bundle.records.len(), cfg.shots, cfg.bias);
    let _ = writeln!(s, "seed            {}", cfg.seed);
    let _ = writeln!(s);
    let _ = writeln!(s, "parity raw      {}", opt(bundle.parity_raw, 4));
    match bundle.subtracted_b {
        Some(b) => {
            let _ = writeln!(s, "parity b-sub    {} (b = {b:.4})", opt(bundle.parity_subtracted, 4));
        }
        None => {
            let _ = writeln!(s, "parity b-sub    n/a");
        }
    }
    let _ = writeln!(s, "dft oracle      {} % of 4/pi", opt(bundle.oracle_percent, 3));
    if let Some(w) = &bundle.wigner {
        let origin = w.value_at(chitomo::C64::new(0.0, 0.0));
        let _ = writeln!(s, "W(0)            {}", opt(origin, 4));
    }
    if let (Some(f), Some(c)) = (&bundle.fit, &bundle.calibration) {
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "fit             {} ({}, {} iterations, {} points, {} free)",
            c.family,
            if f.converged { "converged" } else { "NOT converged" },
            f.iterations,
            f.n_points,
            f.n_free
        );
        let _ = writeln!(s, "c_r calibrated  {:.3}", c.c_r_calibrated);
        let _ = writeln!(s, "c_r fitted      {:.3}", c.c_r_fitted);
        let _ = writeln!(s, "fidelity        {:.5}", c.fidelity);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<10} {:>12} {:>12} {:>10}", "param", "calibrated", "fitted", "s.e.");
        for p in &c.params {
            let _ = writeln!(
                s,
                "{:<10} {:>12.4} {:>12.4} {:>10}",
                p.name,
                p.calibrated,
                p.fitted,
                p.std_error.map_or("fixed".to_string(), |e| format!("{e:.4}"))
            );
        }
    }
    s
}
