//! The full sample-and-reconstruct pipeline and its deviation from the
//! analytic Wigner function.

use super::chigrid::{complete_by_symmetry, subtract_bias, ChiGrid, MirrorMode};
use super::dft::{dft_wigner, WignerGrid};
use super::grid::{build_grid, GridKind, GridSpec};
use crate::error::{Error, Result};
use crate::measurement::{sample_grid, ReadoutRecord, SpamBias, THETA_IM, THETA_RE};
use crate::phase_space::{wigner_fn, QuasiKind};
use crate::scalar::Real;
use crate::states::OscillatorState;

/// Quadratures read on a grid kind and the symmetry that completes it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    pub thetas: Vec<f64>,
    pub mirror: Option<MirrorMode>,
}

/// Full squares need no completion, half planes use Hermiticity, and
/// positive quadrants read only `Re χ` and use the four-fold mirror.
pub fn measurement_plan(kind: GridKind) -> Result<MeasurementPlan> {
    match kind {
        GridKind::FullSquare => Ok(MeasurementPlan { thetas: vec![THETA_RE, THETA_IM], mirror: None }),
        GridKind::HalfPlane => {
            Ok(MeasurementPlan { thetas: vec![THETA_RE, THETA_IM], mirror: Some(MirrorMode::Hermitian) })
        }
        GridKind::PositiveQuadrant => {
            Ok(MeasurementPlan { thetas: vec![THETA_RE], mirror: Some(MirrorMode::QuadrantMirror) })
        }
        GridKind::AxisScanRe | GridKind::AxisScanIm => {
            Err(Error::Unsupported("axis scans", "a one-dimensional scan cannot be completed to the full plane"))
        }
    }
}

/// Records → χ grid → symmetry completion → optional bias subtraction.
pub fn assemble_chi_grid<T: Real>(
    records: &[ReadoutRecord<T>],
    spacing: f64,
    plan: &MeasurementPlan,
    subtract: Option<f64>,
) -> Result<ChiGrid<T>> {
    let mut grid = ChiGrid::from_records(records, T::lit(spacing))?;
    if let Some(mode) = plan.mirror {
        grid = complete_by_symmetry(&grid, mode)?;
    }
    if let Some(b) = subtract {
        grid = subtract_bias(&grid, b)?;
    }
    Ok(grid)
}

/// Mean `|W_dft − W|` over the output points, in percent of `4/π`.
pub fn wigner_deviation_percent<T: Real>(state: &OscillatorState<T>, w: &WignerGrid<T>) -> T {
    let n = T::from_usize_lossy(w.points.len().max(1));
    let mean = w.points.iter().map(|p| (p.value - wigner_fn(state, p.gamma)).abs()).sum::<T>() / n;
    mean / (T::lit(4.0) / T::PI()) * T::lit(100.0)
}

/// Samples the ideal χ of `state` on `grid` with binomial noise, reconstructs
/// W on `out` and returns [`wigner_deviation_percent`].
pub fn dft_error_oracle<T: Real>(
    state: &OscillatorState<T>,
    grid: &GridSpec,
    out: &GridSpec,
    shots: u64,
    seed: u64,
    pad_factor: f64,
) -> Result<T> {
    let plan = measurement_plan(grid.kind)?;
    let points = build_grid::<T>(grid)?;
    let thetas: Vec<T> = plan.thetas.iter().map(|&t| T::lit(t)).collect();
    let records = sample_grid(state, &points, &thetas, shots, SpamBias::NONE, seed)?;
    let chi = assemble_chi_grid(&records, grid.spacing, &plan, None)?;
    let w = dft_wigner(&chi, pad_factor, out, QuasiKind::Wigner)?;
    Ok(wigner_deviation_percent(state, &w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_state, StateSpec};
    use crate::Complex;

    #[test]
    fn squeezed_vacuum_noiseless_within_one_percent() {
        let s = make_state::<f64>(&StateSpec::DisplacedSqueezed { r: 0.93, theta: 0.0, delta: Complex::new(0.0, 0.0) })
            .unwrap();
        let grid = GridSpec::rectangular(GridKind::HalfPlane, 2.0, 6.0, 0.08);
        let out = GridSpec::new(GridKind::FullSquare, 3.0, 0.1);
        let plan = measurement_plan(grid.kind).unwrap();
        let pts = build_grid::<f64>(&grid).unwrap();
        let mut recs = Vec::new();
        for &b in &pts {
            for &t in &plan.thetas {
                let e = crate::measurement::ideal_expectation(&s, b, t);
                recs.push(ReadoutRecord { beta: b, theta: t, shots: 1, ups: 0, estimate: e, sem: 0.0 });
            }
        }
        let chi = assemble_chi_grid(&recs, grid.spacing, &plan, None).unwrap();
        let w = dft_wigner(&chi, 4.0, &out, QuasiKind::Wigner).unwrap();
        let max = w.points.iter().map(|p| (p.value - wigner_fn(&s, p.gamma)).abs()).fold(0.0, f64::max);
        assert!(max < 0.01 * 4.0 / std::f64::consts::PI, "max deviation {max}");
        assert!(w.max_imag_residual() < 1e-9);
    }

    #[test]
    fn axis_scans_cannot_be_reconstructed() {
        assert!(measurement_plan(GridKind::AxisScanRe).is_err());
    }
}
