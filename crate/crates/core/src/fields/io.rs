use super::grid::{FieldKind, GridField, GridSpec};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"EULCIFLD";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    grid: GridSpec,
    kind: FieldKind,
    ncomp: usize,
}

/// Magic, little-endian u64 header length, JSON header, little-endian f64 payload.
pub fn write_field(path: &Path, f: &GridField) -> Result<()> {
    let header = serde_json::to_vec(&Header { grid: f.grid, kind: f.kind, ncomp: f.ncomp() })?;
    let mut buf = Vec::with_capacity(16 + header.len() + 8 * f.data.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(header.len() as u64).to_le_bytes());
    buf.extend_from_slice(&header);
    for x in &f.data {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    std::fs::File::create(path)?.write_all(&buf)?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<GridField> {
    let mut raw = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut raw)?;
    if raw.len() < 16 || &raw[..8] != MAGIC {
        return Err(Error::invalid(format!("{} is not a field container", path.display())));
    }
    let hlen = u64::from_le_bytes(raw[8..16].try_into().unwrap()) as usize;
    let header: Header = serde_json::from_slice(raw.get(16..16 + hlen).ok_or_else(|| Error::invalid("truncated header"))?)?;
    header.grid.validate()?;
    if header.ncomp != header.kind.components(header.grid.dim) {
        return Err(Error::invalid("component count does not match field kind"));
    }
    let payload = &raw[16 + hlen..];
    let expect = header.grid.n_nodes() * header.ncomp;
    if payload.len() != 8 * expect {
        return Err(Error::invalid(format!("payload holds {} bytes, expected {}", payload.len(), 8 * expect)));
    }
    let data = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(GridField { grid: header.grid, kind: header.kind, data })
}
