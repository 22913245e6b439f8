use std::io::Write;

use serde::Serialize;

use super::spec::{CostWeights, OutputFormat};
use crate::conversions::ShadowBoundsRow;
use crate::error::{HeError, Result};
use crate::simd::CostLedger;

/// One row of an experiment table. Counters are per element (amortized over
/// the batch) for the conversion studies and per circuit evaluation for the
/// comparator suite. `max_abs_error` is infinite when the run overflowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub name: String,
    pub n: u64,
    pub bandwidth_slots: u64,
    pub ct_mults: f64,
    pub pt_mults: f64,
    pub rotations: f64,
    pub conjugations: f64,
    pub depth: u32,
    pub simulated_cost: f64,
    pub max_abs_error: f64,
    pub overflowed: bool,
}

pub const CSV_COLUMNS: [&str; 11] = [
    "name",
    "n",
    "bandwidth_slots",
    "ct_mults",
    "pt_mults",
    "rotations",
    "conjugations",
    "depth",
    "simulated_cost",
    "max_abs_error",
    "overflowed",
];

pub fn simulated_cost(c: &CostLedger, w: &CostWeights) -> f64 {
    w.ct_mult * c.ct_mults as f64
        + w.pt_mult * c.pt_mults as f64
        + w.add * c.adds as f64
        + w.rotation * c.rotations as f64
        + w.conjugation * c.conjugations as f64
}

/// Measured outcome of one experiment cell before amortization.
#[derive(Debug, Clone, Default)]
pub struct Cell {
    pub cost: CostLedger,
    pub max_abs_error: f64,
    pub overflowed: bool,
}

impl BenchRecord {
    /// Divides the counters by `per` (elements sharing the cost).
    pub fn from_cell(name: impl Into<String>, n: u64, bandwidth_slots: u64, cell: &Cell, per: f64, w: &CostWeights) -> Self {
        let c = &cell.cost;
        BenchRecord {
            name: name.into(),
            n,
            bandwidth_slots,
            ct_mults: c.ct_mults as f64 / per,
            pt_mults: c.pt_mults as f64 / per,
            rotations: c.rotations as f64 / per,
            conjugations: c.conjugations as f64 / per,
            depth: c.max_depth,
            simulated_cost: simulated_cost(c, w) / per,
            max_abs_error: if cell.overflowed { f64::INFINITY } else { cell.max_abs_error },
            overflowed: cell.overflowed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Report {
    Records(Vec<BenchRecord>),
    ShadowBounds(Vec<ShadowBoundsRow>),
}

fn csv_err(e: csv::Error) -> HeError {
    HeError::Io(std::io::Error::other(e))
}

fn write_csv<T: Serialize>(rows: &[T], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

impl Report {
    /// CSV has a header row; JSON is an array of records. Non-finite
    /// numbers appear as `inf` in CSV and `null` in JSON.
    pub fn write(&self, format: OutputFormat, mut out: impl Write) -> Result<()> {
        match (self, format) {
            (Report::Records(r), OutputFormat::Csv) => {
                if r.is_empty() {
                    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
                    return Ok(());
                }
                write_csv(r, out)
            }
            (Report::ShadowBounds(r), OutputFormat::Csv) => write_csv(r, out),
            (Report::Records(r), OutputFormat::Json) => {
                serde_json::to_writer_pretty(&mut out, r)?;
                writeln!(out)?;
                Ok(())
            }
            (Report::ShadowBounds(r), OutputFormat::Json) => {
                serde_json::to_writer_pretty(&mut out, r)?;
                writeln!(out)?;
                Ok(())
            }
        }
    }

    pub fn to_string(&self, format: OutputFormat) -> Result<String> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        Ok(String::from_utf8(buf).expect("writers emit UTF-8"))
    }
}
