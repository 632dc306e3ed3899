//! CSV reports with a fixed column layout.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// One report row. `value` is written with 17 significant digits so it
/// parses back to the identical `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub metric: String,
    pub representation: String,
    pub group: String,
    #[serde(serialize_with = "full_precision")]
    pub value: f64,
    pub unit: String,
    pub n: usize,
}

impl Row {
    pub fn new(metric: &str, representation: &str, group: &str, value: f64, unit: &str, n: usize) -> Self {
        Self {
            metric: metric.into(),
            representation: representation.into(),
            group: group.into(),
            value,
            unit: unit.into(),
            n,
        }
    }
}

fn full_precision<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:.16e}"))
}

pub fn to_bytes(rows: &[Row]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory CSV write");
    }
    w.into_inner().expect("in-memory CSV flush")
}

pub fn write(path: &Path, rows: &[Row]) -> CliResult<()> {
    std::fs::write(path, to_bytes(rows)).map_err(|e| CliError::io("write", path, e))
}

pub fn read(path: &Path) -> CliResult<Vec<Row>> {
    let mut r =
        csv::Reader::from_path(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    r.deserialize().collect::<Result<Vec<Row>, _>>().map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}
