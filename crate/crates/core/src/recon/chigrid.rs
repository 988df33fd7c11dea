use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{ReadoutRecord, SpamBias};
use crate::scalar::{c, cr, is_finite_c, Complex, Real};

/// Where a grid value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Measured,
    SymmetryCompleted,
    ZeroPadded,
    Resampled,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Measured => "measured",
            Provenance::SymmetryCompleted => "symmetry_completed",
            Provenance::ZeroPadded => "zero_padded",
            Provenance::Resampled => "resampled",
        }
    }
}

/// One χ sample. When only `Re χ` was read, `im_known` is false and the
/// imaginary parts hold zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiPoint<T> {
    pub beta: Complex<T>,
    pub value: Complex<T>,
    pub sem: Complex<T>,
    pub im_known: bool,
    pub provenance: Provenance,
}

impl<T: Real> ChiPoint<T> {
    pub fn measured(beta: Complex<T>, value: Complex<T>, sem: Complex<T>) -> Self {
        Self { beta, value, sem, im_known: true, provenance: Provenance::Measured }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MirrorMode {
    /// `χ(−β) = χ(β)*`, valid for every state.
    Hermitian,
    /// Additionally `χ(β*) = χ(β)*`; requires a state symmetric under `p → −p`
    /// (for example `ϑ = 0` with real displacements).
    QuadrantMirror,
}

/// A lattice point and the `(estimate, sem)` of each quadrature seen there.
type Slot<T> = (Complex<T>, Option<(T, T)>, Option<(T, T)>);

/// Sampled characteristic function on (a subset of) the lattice `Δβ · Z²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiGrid<T> {
    spacing: T,
    points: Vec<ChiPoint<T>>,
    bias_subtracted: bool,
}

/// Sub-lattice resolution of point keys.
const KEY_SCALE: f64 = 1024.0;

impl<T: Real> ChiGrid<T> {
    /// Sorts points row-major (Re fastest) and rejects duplicates.
    pub fn new(spacing: T, mut points: Vec<ChiPoint<T>>, bias_subtracted: bool) -> Result<Self> {
        if !(spacing > T::zero()) || !spacing.is_finite() {
            return Err(Error::param("spacing", "must be positive"));
        }
        for p in &points {
            if !is_finite_c(p.beta) || !is_finite_c(p.value) || !is_finite_c(p.sem) {
                return Err(Error::param("chi grid", "non-finite entry"));
            }
        }
        let key = |b: Complex<T>| point_key(b, spacing);
        points.sort_by_key(|p| {
            let (j, k) = key(p.beta);
            (k, j)
        });
        if let Some(w) = points.windows(2).find(|w| key(w[0].beta) == key(w[1].beta)) {
            return Err(Error::InconsistentData {
                re: w[0].beta.re.to_f64_lossy(),
                im: w[0].beta.im.to_f64_lossy(),
                detail: "duplicate grid point".into(),
            });
        }
        Ok(Self { spacing, points, bias_subtracted })
    }

    /// Pairs records at `θ = 0` (Re) and `θ = π/2` (Im) by β. A β with only a
    /// Re record keeps `im_known = false`.
    pub fn from_records(records: &[ReadoutRecord<T>], spacing: T) -> Result<Self> {
        let tol = T::tol(1e-9);
        let half_pi = T::FRAC_PI_2();
        let mut by_key: BTreeMap<(i64, i64), Slot<T>> = BTreeMap::new();
        for r in records {
            let key = point_key(r.beta, spacing);
            let slot = by_key.entry(key).or_insert((r.beta, None, None));
            let theta = crate::states::wrap_angle(r.theta);
            let target = if theta.abs() < tol {
                &mut slot.1
            } else if (theta - half_pi).abs() < tol {
                &mut slot.2
            } else {
                return Err(Error::Unsupported(
                    "quadrature angle",
                    "grids are assembled from theta = 0 and theta = pi/2 records",
                ));
            };
            if target.is_some() {
                return Err(Error::InconsistentData {
                    re: r.beta.re.to_f64_lossy(),
                    im: r.beta.im.to_f64_lossy(),
                    detail: "two records for the same point and quadrature".into(),
                });
            }
            *target = Some((r.estimate, r.sem));
        }
        let mut points = Vec::with_capacity(by_key.len());
        for (beta, re, im) in by_key.into_values() {
            let Some((re, re_sem)) = re else {
                return Err(Error::InconsistentData {
                    re: beta.re.to_f64_lossy(),
                    im: beta.im.to_f64_lossy(),
                    detail: "Im record without a matching Re record".into(),
                });
            };
            let (im, im_sem, known) = match im {
                Some((v, s)) => (v, s, true),
                None => (T::zero(), T::zero(), false),
            };
            points.push(ChiPoint {
                beta,
                value: c(re, im),
                sem: c(re_sem, im_sem),
                im_known: known,
                provenance: Provenance::Measured,
            });
        }
        Self::new(spacing, points, false)
    }

    /// Noiseless grid from a χ evaluator.
    pub fn from_fn<F: Fn(Complex<T>) -> Complex<T>>(points: &[Complex<T>], spacing: T, chi: F) -> Result<Self> {
        let pts = points.iter().map(|&b| ChiPoint::measured(b, chi(b), cr(T::zero()))).collect();
        Self::new(spacing, pts, false)
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn points(&self) -> &[ChiPoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bias_subtracted(&self) -> bool {
        self.bias_subtracted
    }

    /// Same points with values transformed by `f`.
    pub fn map_values<F: Fn(&ChiPoint<T>) -> Complex<T>>(&self, f: F) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            p.value = f(p);
        }
        out
    }

    /// Integer lattice index of `β`, if it lies on the lattice.
    pub fn lattice_index(&self, beta: Complex<T>) -> Option<(i64, i64)> {
        let (j, k) = point_key(beta, self.spacing);
        let s = KEY_SCALE as i64;
        (j % s == 0 && k % s == 0).then_some((j / s, k / s))
    }

    pub fn is_on_lattice(&self) -> bool {
        self.points.iter().all(|p| self.lattice_index(p.beta).is_some())
    }

    /// Checks that the lattice points fill `[−J, J] × [−K, K]`; returns `(J, K)`.
    pub fn full_square_extent(&self) -> Result<(i64, i64)> {
        if self.points.is_empty() {
            return Err(Error::IncompleteCoverage("grid is empty".into()));
        }
        let mut jm = 0;
        let mut km = 0;
        for p in &self.points {
            let (j, k) = self
                .lattice_index(p.beta)
                .ok_or_else(|| Error::IncompleteCoverage("points off the lattice; resample first".into()))?;
            jm = jm.max(j.abs());
            km = km.max(k.abs());
        }
        let expected = ((2 * jm + 1) * (2 * km + 1)) as usize;
        if self.points.len() != expected {
            return Err(Error::IncompleteCoverage(format!(
                "{} of {expected} points of the {}x{} square present",
                self.points.len(),
                2 * jm + 1,
                2 * km + 1
            )));
        }
        Ok((jm, km))
    }
}

pub(crate) fn point_key<T: Real>(beta: Complex<T>, spacing: T) -> (i64, i64) {
    let f = |x: T| (x.to_f64_lossy() / spacing.to_f64_lossy() * KEY_SCALE).round() as i64;
    (f(beta.re), f(beta.im))
}

/// Images of a point under the mirror group, excluding the identity.
fn images<T: Real>(p: &ChiPoint<T>, mode: MirrorMode) -> Vec<ChiPoint<T>> {
    let mk = |beta: Complex<T>, value: Complex<T>| ChiPoint {
        beta,
        value,
        sem: p.sem,
        im_known: p.im_known,
        provenance: Provenance::SymmetryCompleted,
    };
    let mut out = vec![mk(-p.beta, p.value.conj())];
    if mode == MirrorMode::QuadrantMirror {
        out.push(mk(p.beta.conj(), p.value.conj()));
        out.push(mk(-p.beta.conj(), p.value));
    }
    out
}

fn consistent<T: Real>(a: T, sa: T, b: T, sb: T) -> bool {
    let combined = (sa * sa + sb * sb).sqrt();
    let allowed = if combined == T::zero() { T::lit(1e-9) } else { T::lit(3.0) * combined };
    (a - b).abs() <= allowed
}

/// Fills missing lattice sites from mirror images of the present points.
///
/// Present points are kept unchanged and checked against their images
/// (3 combined sem, or `1e-9` for noiseless data). When several images land
/// on the same missing site they are averaged, so shared axis rows are never
/// double-weighted.
pub fn complete_by_symmetry<T: Real>(grid: &ChiGrid<T>, mode: MirrorMode) -> Result<ChiGrid<T>> {
    let spacing = grid.spacing();
    let present: BTreeMap<(i64, i64), &ChiPoint<T>> =
        grid.points().iter().map(|p| (point_key(p.beta, spacing), p)).collect();
    let mut fills: BTreeMap<(i64, i64), Vec<ChiPoint<T>>> = BTreeMap::new();
    for p in grid.points() {
        let own = point_key(p.beta, spacing);
        for img in images(p, mode) {
            let key = point_key(img.beta, spacing);
            if key == own {
                continue;
            }
            match present.get(&key) {
                Some(q) => {
                    let ok_re = consistent(q.value.re, q.sem.re, img.value.re, img.sem.re);
                    let ok_im =
                        !(q.im_known && img.im_known) || consistent(q.value.im, q.sem.im, img.value.im, img.sem.im);
                    if !(ok_re && ok_im) {
                        return Err(Error::InconsistentData {
                            re: q.beta.re.to_f64_lossy(),
                            im: q.beta.im.to_f64_lossy(),
                            detail: format!(
                                "value {} disagrees with mirror image {} of point ({}, {})",
                                q.value, img.value, p.beta.re, p.beta.im
                            ),
                        });
                    }
                }
                None => fills.entry(key).or_default().push(img),
            }
        }
    }
    let mut points: Vec<ChiPoint<T>> = grid.points().to_vec();
    for (_, imgs) in fills {
        let n = T::from_usize_lossy(imgs.len());
        let mut first = imgs[0];
        let value = imgs.iter().fold(cr(T::zero()), |a, p| a + p.value) / n;
        let var = imgs.iter().fold(c(T::zero(), T::zero()), |a, p| a + c(p.sem.re * p.sem.re, p.sem.im * p.sem.im));
        first.value = value;
        first.sem = c(var.re.sqrt() / n, var.im.sqrt() / n);
        first.im_known = imgs.iter().all(|p| p.im_known);
        points.push(first);
    }
    ChiGrid::new(spacing, points, grid.bias_subtracted())
}

/// `e ↦ (e − b)/(1 − |b|)` on every measured quadrature.
pub fn subtract_bias<T: Real>(grid: &ChiGrid<T>, b: f64) -> Result<ChiGrid<T>> {
    if grid.bias_subtracted() {
        return Err(Error::BiasAlreadySubtracted);
    }
    let bias = SpamBias::new(b)?;
    let scale = T::one() / (T::one() - T::lit(b.abs()));
    let mut out = grid.clone();
    for p in &mut out.points {
        p.value.re = bias.remove(p.value.re);
        p.sem.re *= scale;
        if p.im_known {
            p.value.im = bias.remove(p.value.im);
            p.sem.im *= scale;
        }
    }
    out.bias_subtracted = true;
    Ok(out)
}
