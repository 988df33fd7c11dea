//! Dense matrices for gnuplot (`plot "file" matrix with image`).
//!
//! Each file has `# key: value` header lines, then one row per `Im` value
//! (ascending) with one column per `Re` value (ascending). Cells without a
//! sample hold `nan`.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::{bail, Result};
use chitomo::recon::{write_header, Header};

use crate::pipeline::Bundle;

/// Values on the lattice `spacing · Z²`, densified.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub re_axis: Vec<f64>,
    pub im_axis: Vec<f64>,
    /// `rows[i][j]` is the value at `re_axis[j] + i·im_axis[i]`.
    pub rows: Vec<Vec<f64>>,
}

impl DenseMatrix {
    /// Points must lie on the lattice; repeated points keep the last value.
    pub fn from_points(points: &[(f64, f64, f64)], spacing: f64) -> Result<Self> {
        if points.is_empty() {
            bail!("plotdata: no points");
        }
        let key = |x: f64| (x / spacing).round() as i64;
        let mut cells = BTreeMap::new();
        for &(re, im, v) in points {
            cells.insert((key(im), key(re)), v);
        }
        let (j0, j1) = bounds(points.iter().map(|p| key(p.0)));
        let (k0, k1) = bounds(points.iter().map(|p| key(p.1)));
        let rows =
            (k0..=k1).map(|k| (j0..=j1).map(|j| cells.get(&(k, j)).copied().unwrap_or(f64::NAN)).collect()).collect();
        Ok(Self {
            re_axis: (j0..=j1).map(|j| j as f64 * spacing).collect(),
            im_axis: (k0..=k1).map(|k| k as f64 * spacing).collect(),
            rows,
        })
    }

    pub fn write<W: Write>(&self, header: &Header, mut out: W) -> Result<()> {
        let mut h = header.clone();
        h.insert("layout".into(), "rows = Im axis ascending, cols = Re axis ascending".into());
        h.insert("re_axis".into(), join(&self.re_axis));
        h.insert("im_axis".into(), join(&self.im_axis));
        write_header(&mut out, &h)?;
        for row in &self.rows {
            writeln!(out, "{}", join(row))?;
        }
        Ok(())
    }
}

fn bounds(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.10e}")).collect::<Vec<_>>().join(" ")
}

/// Named plot files for the reconstructed grids of a bundle.
pub fn emit_plotdata(bundle: &Bundle) -> Result<Vec<(String, Vec<u8>)>> {
    let mut files = Vec::new();
    let header = bundle.header();
    if let Some(chi) = &bundle.chi {
        let re: Vec<_> = chi.points().iter().map(|p| (p.beta.re, p.beta.im, p.value.re)).collect();
        let im: Vec<_> = chi
            .points()
            .iter()
            .map(|p| (p.beta.re, p.beta.im, if p.im_known { p.value.im } else { f64::NAN }))
            .collect();
        for (name, pts, what) in [("plot_chi_re.dat", re, "Re chi"), ("plot_chi_im.dat", im, "Im chi")] {
            let mut h = header.clone();
            h.insert("quantity".into(), what.into());
            let mut buf = Vec::new();
            DenseMatrix::from_points(&pts, chi.spacing())?.write(&h, &mut buf)?;
            files.push((name.to_string(), buf));
        }
    }
    if let Some(w) = &bundle.wigner {
        let pts: Vec<_> = w.points.iter().map(|p| (p.gamma.re, p.gamma.im, p.value)).collect();
        let mut h = header.clone();
        h.insert("quantity".into(), "W".into());
        let mut buf = Vec::new();
        DenseMatrix::from_points(&pts, w.spec.spacing)?.write(&h, &mut buf)?;
        files.push(("plot_wigner.dat".to_string(), buf));
    }
    if files.is_empty() {
        bail!("plotdata: the bundle holds no reconstructed grid");
    }
    Ok(files)
}
