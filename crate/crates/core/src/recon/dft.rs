//! Quasiprobabilities from sampled χ by discrete Fourier sums.
//!
//! ```text
//! W_l(γ) = (Δβ²/π²) Σ_j χ(β_j) e^{l|β_j|²/2} e^{γβ_j* − γ*β_j}
//! ```
//!
//! with `γβ* − γ*β = 2i(Im γ Re β − Re γ Im β)`. On a full rectangular lattice
//! the phase factorises over the two axes, which gives the fast path used by
//! [`dft_wigner`]; [`dft_wigner_direct`] is the plain double sum.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chigrid::{ChiGrid, ChiPoint, Provenance};
use super::grid::{build_grid, GridSpec};
use crate::error::{Error, Result};
use crate::phase_space::QuasiKind;
use crate::scalar::{c, cr, Complex, Real};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WignerPoint<T> {
    pub gamma: Complex<T>,
    pub value: T,
    /// Imaginary part of the sum; zero for exactly Hermitian input.
    pub imag_residual: T,
}

/// Reconstructed `W` (or `Q`) on an output grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid<T> {
    pub kind: QuasiKind,
    pub spec: GridSpec,
    pub pad_factor: f64,
    pub points: Vec<WignerPoint<T>>,
}

impl<T: Real> WignerGrid<T> {
    pub fn value_at(&self, gamma: Complex<T>) -> Option<T> {
        let tol = T::tol(1e-9);
        self.points.iter().find(|p| (p.gamma - gamma).norm() < tol).map(|p| p.value)
    }

    pub fn max_imag_residual(&self) -> T {
        self.points.iter().map(|p| p.imag_residual.abs()).fold(T::zero(), T::max)
    }
}

/// Dense `(2K+1) × (2J+1)` lattice of χ values, rows along Im.
struct Lattice<T> {
    spacing: T,
    jm: i64,
    km: i64,
    values: Vec<Complex<T>>,
}

impl<T: Real> Lattice<T> {
    fn width(&self) -> usize {
        (2 * self.jm + 1) as usize
    }

    fn axis(&self, m: i64) -> Vec<T> {
        (-m..=m).map(|j| self.spacing * T::lit(j as f64)).collect()
    }
}

fn validate(pad_factor: f64, kind: QuasiKind) -> Result<()> {
    if kind == QuasiKind::GlauberP {
        return Err(Error::Unsupported(
            "GlauberP reconstruction",
            "the kernel e^{|beta|^2/2} amplifies truncation and shot noise without bound",
        ));
    }
    if !(pad_factor >= 1.0) || !pad_factor.is_finite() {
        return Err(Error::param("pad_factor", format!("must be >= 1, got {pad_factor}")));
    }
    Ok(())
}

fn to_lattice<T: Real>(grid: &ChiGrid<T>, pad_factor: f64) -> Result<Lattice<T>> {
    let grid = if grid.is_on_lattice() { grid.clone() } else { resample_to_lattice(grid, pad_factor)? };
    let (jm, km) = grid.full_square_extent()?;
    let width = (2 * jm + 1) as usize;
    let mut values = vec![cr(T::zero()); width * (2 * km + 1) as usize];
    for p in grid.points() {
        let (j, k) = grid.lattice_index(p.beta).expect("checked on lattice");
        values[(k + km) as usize * width + (j + jm) as usize] = p.value;
    }
    Ok(Lattice { spacing: grid.spacing(), jm, km, values })
}

/// Distinct sorted coordinates, merging values closer than `tol`.
fn distinct<T: Real>(mut xs: Vec<T>, tol: T) -> Vec<T> {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    xs.dedup_by(|a, b| (*a - *b).abs() < tol);
    xs
}

/// Bilinear resampling of a tensor-product grid onto `Δβ · Z²`.
///
/// The lattice spans `pad_factor` times the input's extent; nodes outside the
/// input's bounding box are zero.
pub fn resample_to_lattice<T: Real>(grid: &ChiGrid<T>, pad_factor: f64) -> Result<ChiGrid<T>> {
    if !(pad_factor >= 1.0) {
        return Err(Error::param("pad_factor", "must be >= 1"));
    }
    let d = grid.spacing();
    let tol = d * T::lit(1e-6);
    let xs = distinct(grid.points().iter().map(|p| p.beta.re).collect(), tol);
    let ys = distinct(grid.points().iter().map(|p| p.beta.im).collect(), tol);
    if xs.len() * ys.len() != grid.len() || xs.len() < 2 || ys.len() < 2 {
        return Err(Error::IncompleteCoverage("off-lattice input must be a full tensor-product grid".into()));
    }
    let locate = |axis: &[T], v: T| axis.iter().position(|a| (*a - v).abs() < tol).expect("own coordinate");
    let mut table = vec![None; xs.len() * ys.len()];
    for p in grid.points() {
        table[locate(&ys, p.beta.im) * xs.len() + locate(&xs, p.beta.re)] = Some(p);
    }
    let table: Vec<&ChiPoint<T>> = table
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::IncompleteCoverage("tensor grid has holes".into()))?;

    let max_abs = |axis: &[T]| axis.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let pad = T::lit(pad_factor);
    let jm = (max_abs(&xs) * pad / d + T::lit(1e-9)).floor().to_i64().unwrap_or(0);
    let km = (max_abs(&ys) * pad / d + T::lit(1e-9)).floor().to_i64().unwrap_or(0);
    // Cell index `i` with axis[i] <= v <= axis[i+1].
    let cell = |axis: &[T], v: T| -> Option<(usize, T)> {
        if v < axis[0] - tol || v > axis[axis.len() - 1] + tol {
            return None;
        }
        let i = axis.partition_point(|a| *a <= v).clamp(1, axis.len() - 1) - 1;
        let f = ((v - axis[i]) / (axis[i + 1] - axis[i])).max(T::zero()).min(T::one());
        Some((i, f))
    };
    let mut points = Vec::with_capacity(((2 * jm + 1) * (2 * km + 1)) as usize);
    for k in -km..=km {
        for j in -jm..=jm {
            let beta = c(d * T::lit(j as f64), d * T::lit(k as f64));
            let point = match (cell(&xs, beta.re), cell(&ys, beta.im)) {
                (Some((ix, fx)), Some((iy, fy))) => {
                    let at = |a: usize, b: usize| table[b * xs.len() + a];
                    let w = [
                        ((ix, iy), (T::one() - fx) * (T::one() - fy)),
                        ((ix + 1, iy), fx * (T::one() - fy)),
                        ((ix, iy + 1), (T::one() - fx) * fy),
                        ((ix + 1, iy + 1), fx * fy),
                    ];
                    let mut value = cr(T::zero());
                    let mut var = c(T::zero(), T::zero());
                    let mut im_known = true;
                    for ((a, b), wt) in w {
                        let p = at(a, b);
                        value += p.value * wt;
                        var += c(p.sem.re * p.sem.re * wt * wt, p.sem.im * p.sem.im * wt * wt);
                        im_known &= p.im_known;
                    }
                    ChiPoint {
                        beta,
                        value,
                        sem: c(var.re.sqrt(), var.im.sqrt()),
                        im_known,
                        provenance: Provenance::Resampled,
                    }
                }
                _ => ChiPoint {
                    beta,
                    value: cr(T::zero()),
                    sem: cr(T::zero()),
                    im_known: true,
                    provenance: Provenance::ZeroPadded,
                },
            };
            points.push(point);
        }
    }
    ChiGrid::new(d, points, grid.bias_subtracted())
}

fn kernel_weight<T: Real>(kind: QuasiKind, beta2: T) -> T {
    match kind.order() {
        0 => T::one(),
        l => (T::lit(l as f64) * beta2 * T::lit(0.5)).exp(),
    }
}

fn output_points<T: Real>(out: &GridSpec) -> Result<Vec<Complex<T>>> {
    build_grid(out)
}

/// Reconstruction by the separable fast path.
pub fn dft_wigner<T: Real>(
    grid: &ChiGrid<T>,
    pad_factor: f64,
    out: &GridSpec,
    kind: QuasiKind,
) -> Result<WignerGrid<T>> {
    validate(pad_factor, kind)?;
    let lat = to_lattice(grid, pad_factor)?;
    let gammas: Vec<Complex<T>> = output_points(out)?;
    let xs = lat.axis(lat.jm);
    let ys = lat.axis(lat.km);
    let width = lat.width();
    let weighted: Vec<Complex<T>> = lat
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let (x, y) = (xs[idx % width], ys[idx / width]);
            *v * kernel_weight(kind, x * x + y * y)
        })
        .collect();

    // Row sums R_k(a) = Σ_j v_kj e^{2i a x_j} for every distinct a = Im γ.
    let mut im_values: BTreeMap<i64, T> = BTreeMap::new();
    let key = |v: T| (v.to_f64_lossy() * 1e9).round() as i64;
    for g in &gammas {
        im_values.entry(key(g.im)).or_insert(g.im);
    }
    let two = T::lit(2.0);
    let row_sums: BTreeMap<i64, Vec<Complex<T>>> = im_values
        .into_par_iter()
        .map(|(kk, a)| {
            let phases: Vec<Complex<T>> = xs.iter().map(|&x| Complex::from_polar(T::one(), two * a * x)).collect();
            let sums = weighted
                .chunks(width)
                .map(|row| row.iter().zip(&phases).fold(cr(T::zero()), |s, (v, p)| s + *v * *p))
                .collect();
            (kk, sums)
        })
        .collect();

    let norm = lat.spacing * lat.spacing / (T::PI() * T::PI());
    let points = gammas
        .par_iter()
        .map(|&g| {
            let rows = &row_sums[&key(g.im)];
            let s = rows
                .iter()
                .zip(&ys)
                .fold(cr(T::zero()), |s, (r, &y)| s + *r * Complex::from_polar(T::one(), -two * g.re * y));
            let w = s * norm;
            WignerPoint { gamma: g, value: w.re, imag_residual: w.im }
        })
        .collect();
    Ok(WignerGrid { kind, spec: *out, pad_factor, points })
}

/// Reference implementation: the plain double sum at every output point.
pub fn dft_wigner_direct<T: Real>(
    grid: &ChiGrid<T>,
    pad_factor: f64,
    out: &GridSpec,
    kind: QuasiKind,
) -> Result<WignerGrid<T>> {
    validate(pad_factor, kind)?;
    let lat = to_lattice(grid, pad_factor)?;
    let gammas: Vec<Complex<T>> = output_points(out)?;
    let xs = lat.axis(lat.jm);
    let ys = lat.axis(lat.km);
    let width = lat.width();
    let norm = lat.spacing * lat.spacing / (T::PI() * T::PI());
    let points = gammas
        .par_iter()
        .map(|&g| {
            let mut s = cr(T::zero());
            for (idx, v) in lat.values.iter().enumerate() {
                let beta = c(xs[idx % width], ys[idx / width]);
                // γβ* − γ*β
                let phase = g * beta.conj() - g.conj() * beta;
                s += *v * kernel_weight(kind, beta.norm_sqr()) * phase.exp();
            }
            let w = s * norm;
            WignerPoint { gamma: g, value: w.re, imag_residual: w.im }
        })
        .collect();
    Ok(WignerGrid { kind, spec: *out, pad_factor, points })
}

/// `⟨Π⟩ = (Δβ²/2π) Σ Re χ` over a full square.
pub fn parity_from_grid<T: Real>(grid: &ChiGrid<T>) -> Result<T> {
    grid.full_square_extent()?;
    let d = grid.spacing();
    let s: T = grid.points().iter().map(|p| p.value.re).sum();
    Ok(d * d / (T::lit(2.0) * T::PI()) * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{char_fn, q_fn, wigner_fn};
    use crate::recon::grid::GridKind;
    use crate::states::OscillatorState;
    use approx::assert_abs_diff_eq;

    type C = Complex<f64>;

    fn noiseless(state: &OscillatorState<f64>, extent: f64, spacing: f64) -> ChiGrid<f64> {
        let pts = build_grid::<f64>(&GridSpec::new(GridKind::FullSquare, extent, spacing)).unwrap();
        ChiGrid::from_fn(&pts, spacing, |b| char_fn(state, b)).unwrap()
    }

    #[test]
    fn vacuum_origin() {
        let g = noiseless(&OscillatorState::vacuum(), 4.0, 0.2);
        let out = GridSpec::new(GridKind::FullSquare, 1.0, 0.5);
        let w = dft_wigner(&g, 4.0, &out, QuasiKind::Wigner).unwrap();
        assert_abs_diff_eq!(w.value_at(C::new(0.0, 0.0)).unwrap(), 2.0 / std::f64::consts::PI, epsilon = 1e-3);
        let q = dft_wigner(&g, 4.0, &out, QuasiKind::HusimiQ).unwrap();
        let s = OscillatorState::vacuum();
        for p in &q.points {
            assert_abs_diff_eq!(p.value, q_fn(&s, p.gamma), epsilon = 1e-3);
        }
    }

    #[test]
    fn fast_path_matches_direct_sum() {
        let s = OscillatorState::new(
            vec![
                crate::states::CoherentComponent::new(C::new(1.0, 0.0), C::new(0.7, 0.2)),
                crate::states::CoherentComponent::new(C::new(0.0, 0.6), C::new(-0.4, -0.5)),
            ],
            crate::states::SqueezeParam::new(0.3, 0.4).unwrap(),
        )
        .unwrap();
        let g = noiseless(&s, 6.0, 0.25);
        let out = GridSpec::rectangular(GridKind::HalfPlane, 1.5, 1.0, 0.25);
        for kind in [QuasiKind::Wigner, QuasiKind::HusimiQ] {
            let a = dft_wigner(&g, 1.0, &out, kind).unwrap();
            let b = dft_wigner_direct(&g, 1.0, &out, kind).unwrap();
            for (p, q) in a.points.iter().zip(&b.points) {
                assert_eq!(p.gamma, q.gamma);
                assert_abs_diff_eq!(p.value, q.value, epsilon = 1e-10);
                assert_abs_diff_eq!(p.imag_residual, q.imag_residual, epsilon = 1e-10);
            }
        }
        for p in &dft_wigner(&g, 1.0, &out, QuasiKind::Wigner).unwrap().points {
            assert_abs_diff_eq!(p.value, wigner_fn(&s, p.gamma), epsilon = 2e-3);
        }
    }

    #[test]
    fn parity_is_origin_value() {
        let g = noiseless(&OscillatorState::coherent(C::new(0.5, 0.0)).unwrap(), 4.0, 0.2);
        let w0 = dft_wigner(&g, 4.0, &GridSpec::new(GridKind::AxisScanRe, 0.5, 0.5), QuasiKind::Wigner)
            .unwrap()
            .value_at(C::new(0.0, 0.0))
            .unwrap();
        let par = parity_from_grid(&g).unwrap();
        assert_abs_diff_eq!(par, std::f64::consts::FRAC_PI_2 * w0, epsilon = 1e-10);
        assert_abs_diff_eq!(par, (-0.5f64).exp(), epsilon = 1e-3);
    }

    #[test]
    fn zero_grid() {
        let pts = build_grid::<f64>(&GridSpec::new(GridKind::FullSquare, 2.0, 0.5)).unwrap();
        let g = ChiGrid::from_fn(&pts, 0.5, |_| C::new(0.0, 0.0)).unwrap();
        let w = dft_wigner(&g, 4.0, &GridSpec::new(GridKind::FullSquare, 1.0, 0.5), QuasiKind::Wigner).unwrap();
        assert!(w.points.iter().all(|p| p.value.abs() < 1e-15));
    }

    #[test]
    fn rejects_p_and_bad_input() {
        let g = noiseless(&OscillatorState::vacuum(), 1.0, 0.5);
        let out = GridSpec::new(GridKind::FullSquare, 1.0, 0.5);
        assert!(matches!(dft_wigner(&g, 4.0, &out, QuasiKind::GlauberP), Err(Error::Unsupported(..))));
        assert!(dft_wigner(&g, 0.5, &out, QuasiKind::Wigner).is_err());
        let half =
            ChiGrid::from_fn(&build_grid::<f64>(&GridSpec::new(GridKind::HalfPlane, 1.0, 0.5)).unwrap(), 0.5, |_| {
                C::new(1.0, 0.0)
            })
            .unwrap();
        assert!(matches!(dft_wigner(&half, 4.0, &out, QuasiKind::Wigner), Err(Error::IncompleteCoverage(_))));
        assert!(parity_from_grid(&half).is_err());
    }

    #[test]
    fn off_lattice_input_is_resampled() {
        let s = OscillatorState::<f64>::vacuum();
        // A 0.3-spaced grid read with a declared 0.1 lattice.
        let pts: Vec<C> =
            (-10..=10).flat_map(|k| (-10..=10).map(move |j| C::new(0.3 * j as f64 + 0.05, 0.3 * k as f64))).collect();
        let g = ChiGrid::from_fn(&pts, 0.1, |b| char_fn(&s, b)).unwrap();
        assert!(!g.is_on_lattice());
        let r = resample_to_lattice(&g, 2.0).unwrap();
        assert!(r.is_on_lattice());
        assert!(r.points().iter().any(|p| p.provenance == Provenance::ZeroPadded));
        let w = dft_wigner(&g, 2.0, &GridSpec::new(GridKind::AxisScanRe, 0.5, 0.5), QuasiKind::Wigner).unwrap();
        assert_abs_diff_eq!(w.value_at(C::new(0.0, 0.0)).unwrap(), 2.0 / std::f64::consts::PI, epsilon = 2e-2);
    }
}
