//! Binary PPM (P6) rasters.

use std::path::Path;

use anchorlab::Raster;

use crate::error::{CliError, CliResult};

pub fn encode(r: &Raster) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", r.width(), r.height()).into_bytes();
    out.extend(r.pixels().iter().flatten());
    out
}

/// Parses the subset of P6 written by [`encode`]: no comments, maxval 255.
pub fn decode(bytes: &[u8]) -> Result<Raster, String> {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|e| e.to_string())?);
    }
    if fields[0] != "P6" || fields[3] != "255" {
        return Err(format!("unsupported header {} / maxval {}", fields[0], fields[3]));
    }
    let num = |s: &str| s.parse::<u32>().map_err(|e| format!("bad dimension {s:?}: {e}"));
    let (w, h) = (num(fields[1])?, num(fields[2])?);
    let data = &bytes[pos + 1..];
    if data.len() != 3 * w as usize * h as usize {
        return Err(format!("expected {} pixel bytes, found {}", 3 * w * h, data.len()));
    }
    let pixels = data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Raster::from_pixels(w, h, pixels).map_err(|e| e.to_string())
}

pub fn write(path: &Path, r: &Raster) -> CliResult<()> {
    std::fs::write(path, encode(r)).map_err(|e| CliError::io("write", path, e))
}
