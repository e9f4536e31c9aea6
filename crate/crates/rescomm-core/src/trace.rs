//! Uniform-rate trace recording and CSV emission.
//!
//! CSV contract: header row, `.` decimal separator, LF line endings, one
//! row per sample. Values use the shortest round-trip float formatting so
//! identical runs serialize byte-identically.

use std::io::Write;

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Debug, Clone)]
pub struct TraceRecorder<S> {
    channels: Vec<String>,
    rows: Vec<Vec<S>>,
    dt: S,
    t0: S,
}

impl<S: Real> TraceRecorder<S> {
    pub fn new(channels: &[&str], dt: S, t0: S) -> Result<Self> {
        if !dt.is_finite() || dt <= S::zero() {
            return Err(Error::RejectedInput("trace dt must be > 0".into()));
        }
        Ok(TraceRecorder {
            channels: channels.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            dt,
            t0,
        })
    }

    pub fn channels(&self) -> &[String] {
        &self.channels
    }

    pub fn dt(&self) -> S {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Time of sample `i`.
    pub fn time(&self, i: usize) -> S {
        self.t0 + S::from_usize(i).unwrap() * self.dt
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn push(&mut self, row: Vec<S>) -> Result<()> {
        if row.len() != self.channels.len() {
            return Err(Error::Integrity(format!(
                "trace row has {} values, expected {}",
                row.len(),
                self.channels.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Column by channel name.
    pub fn column(&self, name: &str) -> Option<Vec<S>> {
        let idx = self.channels.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t")?;
        for c in &self.channels {
            write!(w, ",{c}")?;
        }
        w.write_all(b"\n")?;
        for (i, row) in self.rows.iter().enumerate() {
            write!(w, "{}", self.time(i).to_f64_lossy())?;
            for v in row {
                write!(w, ",{}", v.to_f64_lossy())?;
            }
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("csv is valid utf-8")
    }
}

/// Write an arbitrary record table as CSV with the same formatting contract.
pub fn write_csv_rows<W: Write>(mut w: W, header: &str, rows: &[Vec<String>]) -> Result<()> {
    writeln!(w, "{header}")?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
