use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{c, Complex, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    FullSquare,
    /// `Im β ≥ 0`, with the `Im β = 0` row restricted to `Re β ≥ 0`.
    HalfPlane,
    PositiveQuadrant,
    AxisScanRe,
    AxisScanIm,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::FullSquare => "full_square",
            GridKind::HalfPlane => "half_plane",
            GridKind::PositiveQuadrant => "positive_quadrant",
            GridKind::AxisScanRe => "axis_scan_re",
            GridKind::AxisScanIm => "axis_scan_im",
        }
    }
}

/// Lattice `{(jΔ, kΔ)}` clipped to `|Re β| ≤ extent`, `|Im β| ≤ extent_im`.
///
/// `extent_im` defaults to `extent`; a separate value gives rectangular grids
/// for states whose χ is much wider along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: GridKind,
    pub extent: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent_im: Option<f64>,
    pub spacing: f64,
}

impl GridSpec {
    pub fn new(kind: GridKind, extent: f64, spacing: f64) -> Self {
        Self { kind, extent, extent_im: None, spacing }
    }

    pub fn rectangular(kind: GridKind, extent_re: f64, extent_im: f64, spacing: f64) -> Self {
        Self { kind, extent: extent_re, extent_im: Some(extent_im), spacing }
    }

    pub fn extent_re(&self) -> f64 {
        self.extent
    }

    pub fn extent_im(&self) -> f64 {
        self.extent_im.unwrap_or(self.extent)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(Error::param("spacing", format!("must be positive, got {}", self.spacing)));
        }
        for (name, e) in [("extent", self.extent_re()), ("extent_im", self.extent_im())] {
            if !e.is_finite() || e < self.spacing {
                return Err(Error::param(name, format!("must be >= spacing, got {e}")));
            }
        }
        Ok(())
    }

    /// Largest lattice indices `(J, K)` along Re and Im.
    pub fn half_counts(&self) -> (i64, i64) {
        let n = |e: f64| (e / self.spacing + 1e-9).floor() as i64;
        (n(self.extent_re()), n(self.extent_im()))
    }

    /// Lattice indices in row-major order, Re fastest.
    pub fn indices(&self) -> Result<Vec<(i64, i64)>> {
        self.validate()?;
        let (jm, km) = self.half_counts();
        let (j_range, k_range) = match self.kind {
            GridKind::FullSquare | GridKind::HalfPlane => {
                ((-jm, jm), (if self.kind == GridKind::HalfPlane { 0 } else { -km }, km))
            }
            GridKind::PositiveQuadrant => ((0, jm), (0, km)),
            GridKind::AxisScanRe => ((-jm, jm), (0, 0)),
            GridKind::AxisScanIm => ((0, 0), (-km, km)),
        };
        let mut out = Vec::new();
        for k in k_range.0..=k_range.1 {
            for j in j_range.0..=j_range.1 {
                if self.kind == GridKind::HalfPlane && k == 0 && j < 0 {
                    continue;
                }
                out.push((j, k));
            }
        }
        Ok(out)
    }
}

/// Points of `spec`; see [`GridSpec::indices`] for the ordering.
pub fn build_grid<T: Real>(spec: &GridSpec) -> Result<Vec<Complex<T>>> {
    let d = T::lit(spec.spacing);
    Ok(spec.indices()?.into_iter().map(|(j, k)| c(d * T::lit(j as f64), d * T::lit(k as f64))).collect())
}
