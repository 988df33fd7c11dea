//! CSV and JSON forms of [`ReadoutRecord`] lists.
//!
//! Column order is fixed: `re_beta, im_beta, theta, shots, ups, estimate, sem`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::ReadoutRecord;
use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Flat row, one per record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub re_beta: f64,
    pub im_beta: f64,
    pub theta: f64,
    pub shots: u64,
    pub ups: u64,
    pub estimate: f64,
    pub sem: f64,
}

impl<T: Real> From<&ReadoutRecord<T>> for RecordRow {
    fn from(r: &ReadoutRecord<T>) -> Self {
        Self {
            re_beta: r.beta.re.to_f64_lossy(),
            im_beta: r.beta.im.to_f64_lossy(),
            theta: r.theta.to_f64_lossy(),
            shots: r.shots,
            ups: r.ups,
            estimate: r.estimate.to_f64_lossy(),
            sem: r.sem.to_f64_lossy(),
        }
    }
}

impl RecordRow {
    fn into_record<T: Real>(self) -> Result<ReadoutRecord<T>> {
        if self.shots == 0 || self.ups > self.shots {
            return Err(Error::param(
                "ups/shots",
                format!("need 0 <= ups <= shots, shots >= 1 (got {}/{})", self.ups, self.shots),
            ));
        }
        if !(self.sem >= 0.0) || !(-1.0..=1.0).contains(&self.estimate) {
            return Err(Error::param("estimate/sem", "estimate must lie in [-1, 1] and sem >= 0"));
        }
        Ok(ReadoutRecord {
            beta: c(T::lit(self.re_beta), T::lit(self.im_beta)),
            theta: T::lit(self.theta),
            shots: self.shots,
            ups: self.ups,
            estimate: T::lit(self.estimate),
            sem: T::lit(self.sem),
        })
    }
}

pub fn write_records_csv<T: Real, W: Write>(records: &[ReadoutRecord<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(RecordRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv<T: Real, R: Read>(input: R) -> Result<Vec<ReadoutRecord<T>>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    rd.deserialize::<RecordRow>().map(|row| row?.into_record()).collect()
}

pub fn write_records_json<T: Real, W: Write>(records: &[ReadoutRecord<T>], out: W) -> Result<()> {
    let rows: Vec<RecordRow> = records.iter().map(RecordRow::from).collect();
    serde_json::to_writer_pretty(out, &rows)?;
    Ok(())
}

pub fn read_records_json<T: Real, R: Read>(input: R) -> Result<Vec<ReadoutRecord<T>>> {
    let rows: Vec<RecordRow> = serde_json::from_reader(input)?;
    rows.into_iter().map(RecordRow::into_record).collect()
}
