//! CSV and JSON forms of χ and Wigner grids.
//!
//! CSV files start with a block of `# key: value` lines, followed by a
//! header row and one row per point. The JSON form is
//! `{"header": {...}, "points": [...]}` with the same row objects.
//! An unmeasured `Im χ` is written as an empty field (`null` in JSON).

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::chigrid::{ChiGrid, ChiPoint, Provenance};
use super::dft::{WignerGrid, WignerPoint};
use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::phase_space::QuasiKind;
use crate::scalar::{c, Real};

/// Ordered metadata written above the data rows.
pub type Header = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct ChiRow {
    re_beta: f64,
    im_beta: f64,
    re_chi: f64,
    im_chi: Option<f64>,
    re_sem: f64,
    im_sem: Option<f64>,
    provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct WignerRow {
    re_gamma: f64,
    im_gamma: f64,
    value: f64,
    imag_residual: f64,
}

#[derive(Serialize, Deserialize)]
struct Document<R> {
    header: Header,
    points: Vec<R>,
}

fn chi_header<T: Real>(grid: &ChiGrid<T>, extra: &Header) -> Header {
    let mut h = extra.clone();
    h.insert("spacing".into(), grid.spacing().to_f64_lossy().to_string());
    h.insert("bias_subtracted".into(), grid.bias_subtracted().to_string());
    h
}

fn chi_rows<T: Real>(grid: &ChiGrid<T>) -> Vec<ChiRow> {
    grid.points()
        .iter()
        .map(|p| ChiRow {
            re_beta: p.beta.re.to_f64_lossy(),
            im_beta: p.beta.im.to_f64_lossy(),
            re_chi: p.value.re.to_f64_lossy(),
            im_chi: p.im_known.then(|| p.value.im.to_f64_lossy()),
            re_sem: p.sem.re.to_f64_lossy(),
            im_sem: p.im_known.then(|| p.sem.im.to_f64_lossy()),
            provenance: p.provenance,
        })
        .collect()
}

fn chi_from_parts<T: Real>(header: &Header, rows: Vec<ChiRow>) -> Result<(ChiGrid<T>, Header)> {
    let get = |k: &str| header.get(k).ok_or_else(|| Error::MissingParameter(format!("header `{k}`")));
    let spacing: f64 = get("spacing")?.parse().map_err(|_| Error::param("spacing", "not a number"))?;
    let subtracted: bool =
        get("bias_subtracted")?.parse().map_err(|_| Error::param("bias_subtracted", "not a boolean"))?;
    let points = rows
        .into_iter()
        .map(|r| ChiPoint {
            beta: c(T::lit(r.re_beta), T::lit(r.im_beta)),
            value: c(T::lit(r.re_chi), T::lit(r.im_chi.unwrap_or(0.0))),
            sem: c(T::lit(r.re_sem), T::lit(r.im_sem.unwrap_or(0.0))),
            im_known: r.im_chi.is_some(),
            provenance: r.provenance,
        })
        .collect();
    Ok((ChiGrid::new(T::lit(spacing), points, subtracted)?, header.clone()))
}

/// Writes `# key: value` lines; keys may not contain `:` or newlines.
pub fn write_header<W: Write>(out: &mut W, header: &Header) -> Result<()> {
    for (k, v) in header {
        if k.contains(':') || k.contains('\n') || v.contains('\n') {
            return Err(Error::param(k.clone(), "header keys may not contain ':' or newlines"));
        }
        writeln!(out, "# {k}: {v}")?;
    }
    Ok(())
}

/// Splits leading `# key: value` lines from the CSV body.
pub(crate) fn read_header<R: Read>(input: R) -> Result<(Header, String)> {
    let mut header = Header::new();
    let mut body = String::new();
    let mut in_header = true;
    for line in BufReader::new(input).lines() {
        let line = line?;
        if in_header {
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) =
                    rest.split_once(':').ok_or_else(|| Error::param("header", format!("malformed line `{line}`")))?;
                header.insert(k.trim().to_string(), v.trim().to_string());
                continue;
            }
            in_header = false;
        }
        body.push_str(&line);
        body.push('\n');
    }
    Ok((header, body))
}

fn write_rows<W: Write, R: Serialize>(out: W, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: for<'de> Deserialize<'de>>(body: &str) -> Result<Vec<R>> {
    csv::Reader::from_reader(body.as_bytes()).deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_chi_grid_csv<T: Real, W: Write>(grid: &ChiGrid<T>, extra: &Header, mut out: W) -> Result<()> {
    write_header(&mut out, &chi_header(grid, extra))?;
    write_rows(out, &chi_rows(grid))
}

/// Returns the grid and the full header block.
pub fn read_chi_grid_csv<T: Real, R: Read>(input: R) -> Result<(ChiGrid<T>, Header)> {
    let (header, body) = read_header(input)?;
    chi_from_parts(&header, read_rows(&body)?)
}

pub fn write_chi_grid_json<T: Real, W: Write>(grid: &ChiGrid<T>, extra: &Header, out: W) -> Result<()> {
    let doc = Document { header: chi_header(grid, extra), points: chi_rows(grid) };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}

pub fn read_chi_grid_json<T: Real, R: Read>(input: R) -> Result<(ChiGrid<T>, Header)> {
    let doc: Document<ChiRow> = serde_json::from_reader(input)?;
    chi_from_parts(&doc.header, doc.points)
}

fn wigner_header<T: Real>(w: &WignerGrid<T>, extra: &Header) -> Result<Header> {
    let mut h = extra.clone();
    h.insert("kind".into(), serde_json::to_value(w.kind)?.as_str().unwrap_or_default().to_string());
    h.insert("pad_factor".into(), w.pad_factor.to_string());
    h.insert("output_grid".into(), serde_json::to_string(&w.spec)?);
    Ok(h)
}

fn wigner_rows<T: Real>(w: &WignerGrid<T>) -> Vec<WignerRow> {
    w.points
        .iter()
        .map(|p| WignerRow {
            re_gamma: p.gamma.re.to_f64_lossy(),
            im_gamma: p.gamma.im.to_f64_lossy(),
            value: p.value.to_f64_lossy(),
            imag_residual: p.imag_residual.to_f64_lossy(),
        })
        .collect()
}

pub fn write_wigner_grid_csv<T: Real, W: Write>(w: &WignerGrid<T>, extra: &Header, mut out: W) -> Result<()> {
    write_header(&mut out, &wigner_header(w, extra)?)?;
    write_rows(out, &wigner_rows(w))
}

pub fn write_wigner_grid_json<T: Real, W: Write>(w: &WignerGrid<T>, extra: &Header, out: W) -> Result<()> {
    let doc = Document { header: wigner_header(w, extra)?, points: wigner_rows(w) };
    serde_json::to_writer_pretty(out, &doc)?;
    Ok(())
}

pub fn read_wigner_grid_csv<T: Real, R: Read>(input: R) -> Result<(WignerGrid<T>, Header)> {
    let (header, body) = read_header(input)?;
    let get = |k: &str| header.get(k).ok_or_else(|| Error::MissingParameter(format!("header `{k}`")));
    let kind: QuasiKind = serde_json::from_value(serde_json::Value::String(get("kind")?.clone()))?;
    let pad_factor: f64 = get("pad_factor")?.parse().map_err(|_| Error::param("pad_factor", "not a number"))?;
    let spec: GridSpec = serde_json::from_str(get("output_grid")?)?;
    let points = read_rows::<WignerRow>(&body)?
        .into_iter()
        .map(|r| WignerPoint {
            gamma: c(T::lit(r.re_gamma), T::lit(r.im_gamma)),
            value: T::lit(r.value),
            imag_residual: T::lit(r.imag_residual),
        })
        .collect();
    Ok((WignerGrid { kind, spec, pad_factor, points }, header))
}
