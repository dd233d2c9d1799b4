use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-width histogram. Bin `i` covers `[start + i w, start + (i + 1) w)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub start: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn new(bin_width: f64, start: f64, counts: Vec<u64>) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::invalid(format!("bin width must be positive, got {bin_width}")));
        }
        if !start.is_finite() {
            return Err(Error::invalid("histogram start is not finite"));
        }
        Ok(Self {
            bin_width,
            start,
            counts,
        })
    }

    pub fn zeros(bin_width: f64, start: f64, bins: usize) -> Result<Self> {
        Self::new(bin_width, start, vec![0; bins])
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_start(&self, i: usize) -> f64 {
        self.start + i as f64 * self.bin_width
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        self.bin_start(i) + 0.5 * self.bin_width
    }

    /// Index of the fullest bin (first on ties).
    pub fn mode(&self) -> Option<usize> {
        let max = *self.counts.iter().max()?;
        self.counts.iter().position(|&c| c == max)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::parse("histogram csv", e);
        w.write_record(["bin_start_ms", "count"]).map_err(err)?;
        for (i, c) in self.counts.iter().enumerate() {
            w.write_record([self.bin_start(i).to_string(), c.to_string()])
                .map_err(err)?;
        }
        w.flush().map_err(|e| Error::parse("histogram csv", e))?;
        Ok(())
    }
}
