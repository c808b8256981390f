//! On-disk memo for exemplar coefficient vectors.
//!
//! Active only when `FUNDCOEFF_CACHE_DIR` is set. File layout: the magic
//! `FCQ1`, a u32 label length, the label bytes, a u64 count, then `count`
//! little-endian i128 values.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"FCQ1";

fn path_for(label: &str) -> Option<PathBuf> {
    let dir = std::env::var_os("FUNDCOEFF_CACHE_DIR")?;
    let safe: String = label.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    Some(PathBuf::from(dir).join(format!("{safe}.fcq")))
}

pub fn encode(label: &str, values: &[i128]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + label.len() + 16 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(label.len() as u32).to_le_bytes());
    out.extend_from_slice(label.as_bytes());
    out.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<(String, Vec<i128>)> {
    let bad = |m: &str| Error::Cache(m.to_string());
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(bad("missing FCQ1 header"));
    }
    let ll = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let rest = &bytes[8..];
    if rest.len() < ll + 8 {
        return Err(bad("truncated label"));
    }
    let label = String::from_utf8(rest[..ll].to_vec()).map_err(|_| bad("label is not utf-8"))?;
    let count = u64::from_le_bytes(rest[ll..ll + 8].try_into().unwrap()) as usize;
    let body = &rest[ll + 8..];
    if body.len() != 16 * count {
        return Err(bad("body length does not match count"));
    }
    let values = body.chunks_exact(16).map(|c| i128::from_le_bytes(c.try_into().unwrap())).collect();
    Ok((label, values))
}

/// At least `min_len` cached values for `label`, if present.
pub fn load(label: &str, min_len: usize) -> Result<Option<Vec<i128>>> {
    let Some(path) = path_for(label) else { return Ok(None) };
    let mut bytes = Vec::new();
    match fs::File::open(&path) {
        Ok(mut f) => f.read_to_end(&mut bytes).map_err(|e| Error::Cache(e.to_string()))?,
        Err(_) => return Ok(None),
    };
    let (got, values) = decode(&bytes)?;
    if got != label {
        return Err(Error::Cache(format!("label mismatch in {}: {got}", path.display())));
    }
    Ok((values.len() >= min_len).then_some(values))
}

pub fn store(label: &str, values: &[i128]) -> Result<()> {
    let Some(path) = path_for(label) else { return Ok(()) };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::Cache(e.to_string()))?;
    }
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| Error::Cache(e.to_string()))?;
    f.write_all(&encode(label, values)).map_err(|e| Error::Cache(e.to_string()))?;
    fs::rename(&tmp, &path).map_err(|e| Error::Cache(e.to_string()))
}
