//! JSONL datasets, one sample per line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use anchorlab::{AttachmentAnchor, ImageDims, Point2, Sample};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// One dataset line. Keys this tool does not know about, at the top level
/// and inside `meta`, are carried through unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub image: ImageDims,
    pub dissection: Point2,
    pub grasp: Point2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<AttachmentAnchor>,
    #[serde(default)]
    pub meta: BTreeMap<String, Value>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, Value>,
}

impl Record {
    pub fn from_sample(s: &Sample) -> Self {
        Self {
            image: s.image,
            dissection: s.dissection,
            grasp: s.grasp,
            anchor: s.anchor,
            meta: s.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect(),
            extra: BTreeMap::new(),
        }
    }

    /// Core view of the record. Non-string meta values become their JSON text.
    pub fn to_sample(&self) -> Sample {
        let meta = self
            .meta
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), text)
            })
            .collect();
        Sample { image: self.image, dissection: self.dissection, grasp: self.grasp, anchor: self.anchor, meta }
    }

    /// Replaces the geometry with that of `s`, keeping meta and extra keys.
    pub fn with_geometry(&self, s: &Sample) -> Self {
        Self { image: s.image, dissection: s.dissection, grasp: s.grasp, anchor: s.anchor, ..self.clone() }
    }
}

/// Parses one line, validating the sample it describes.
pub fn parse_line(line: &str) -> Result<Record, String> {
    let rec: Record = serde_json::from_str(line).map_err(|e| e.to_string())?;
    rec.to_sample().validate().map_err(|e| e.to_string())?;
    Ok(rec)
}

pub fn to_line(rec: &Record) -> String {
    serde_json::to_string(rec).expect("records always serialize")
}

pub fn read(path: &Path) -> CliResult<Vec<Record>> {
    Ok(read_numbered(path)?.into_iter().map(|(_, r)| r).collect())
}

/// Records paired with their 1-based line numbers; blank lines are skipped.
pub fn read_numbered(path: &Path) -> CliResult<Vec<(usize, Record)>> {
    let file = File::open(path).map_err(|e| CliError::io("read", path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = parse_line(&line).map_err(|e| CliError::Data(format!("{}:{}: {e}", path.display(), i + 1)))?;
        out.push((i + 1, rec));
    }
    Ok(out)
}

pub fn write(path: &Path, records: &[Record]) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io("write", path, e))?;
    let mut w = BufWriter::new(file);
    for rec in records {
        writeln!(w, "{}", to_line(rec)).map_err(|e| CliError::io("write", path, e))?;
    }
    w.flush().map_err(|e| CliError::io("write", path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{"image":{"w":640,"h":480},"dissection":{"x":10.5,"y":20.0},"grasp":{"x":30.25,"y":40.0},"anchor":{"case":2,"origin":{"x":320.0,"y":240.0},"theta_adh":1.5707963267948966,"theta_m1":3.141592653589793,"theta_m2":0.0},"meta":{"surgeon_id":"s03","surgery_type":"sigmoid","weight":3},"source":"atlas"}"#;

    #[test]
    fn round_trip_preserves_unknown_keys() {
        let rec = parse_line(LINE).unwrap();
        assert_eq!(rec.extra["source"], Value::String("atlas".into()));
        assert_eq!(rec.to_sample().meta["weight"], "3");
        let again = parse_line(&to_line(&rec)).unwrap();
        assert_eq!(again, rec);
        assert_eq!(to_line(&again), LINE);
    }

    #[test]
    fn anchor_is_optional() {
        let rec = parse_line(r#"{"image":{"w":10,"h":10},"dissection":{"x":1,"y":1},"grasp":{"x":2,"y":2}}"#).unwrap();
        assert!(rec.anchor.is_none());
        assert!(!to_line(&rec).contains("anchor"));
    }

    #[test]
    fn invalid_samples_rejected() {
        assert!(parse_line(r#"{"image":{"w":10,"h":10},"dissection":{"x":1,"y":1},"grasp":{"x":20,"y":2}}"#).is_err());
        assert!(parse_line(r#"{"image":{"w":10,"h":10}"#).is_err());
        assert!(parse_line("not json").is_err());
    }
}
