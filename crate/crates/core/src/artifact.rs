//! Flat binary persistence of a coercion and its solved table.
//!
//! Layout, all numbers little-endian:
//!
//! ```text
//! "BMCZ1"                          5 bytes
//! N_T, N_bins                      u64 each
//! edges   N_T × (N_bins-1)         f64, row-major
//! values  N_T × N_bins             f64
//! P       (N_T-1) × N_bins²        f64
//! V       N_T × N_bins             f64   (optional, together with S)
//! S       N_T × N_bins             f64, 0.0 or 1.0
//! ```

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::chain::ValueStoppingTable;
use crate::coercion::Coercion;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 5] = b"BMCZ1";

pub fn write_artifact<W: Write>(
    out: &mut W,
    c: &Coercion,
    table: Option<&ValueStoppingTable>,
) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(c.n_times() as u64).to_le_bytes())?;
    out.write_all(&(c.n_bins() as u64).to_le_bytes())?;
    let (edges, values, trans) = c.raw_parts();
    for v in edges.iter().chain(values).chain(trans) {
        out.write_all(&v.to_le_bytes())?;
    }
    if let Some(table) = table {
        let (value, stop) = table.raw_parts();
        for v in value {
            out.write_all(&v.to_le_bytes())?;
        }
        for &s in stop {
            out.write_all(&(if s { 1.0f64 } else { 0.0 }).to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn save(path: &Path, c: &Coercion, table: Option<&ValueStoppingTable>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    write_artifact(&mut out, c, table)?;
    out.flush()?;
    Ok(())
}

pub fn read_artifact(bytes: &[u8]) -> Result<(Coercion, Option<ValueStoppingTable>)> {
    let bad = |m: &str| Error::Artifact(m.to_string());
    if bytes.len() < 21 || &bytes[..5] != MAGIC {
        return Err(bad("missing BMCZ1 header"));
    }
    let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
    let (n_times, n_bins) = (word(5) as usize, word(13) as usize);
    if n_times < 2 || n_bins < 2 {
        return Err(bad("header sizes out of range"));
    }
    let body = &bytes[21..];
    if !body.len().is_multiple_of(8) {
        return Err(bad("body is not a whole number of f64 values"));
    }
    let floats: Vec<f64> = body
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let n_edges = n_times * (n_bins - 1);
    let n_values = n_times * n_bins;
    let n_trans = (n_times - 1) * n_bins * n_bins;
    let base = n_edges + n_values + n_trans;
    let with_table = base + 2 * n_values;
    if floats.len() != base && floats.len() != with_table {
        return Err(bad("body length does not match the header"));
    }
    let c = Coercion::from_parts(
        n_bins,
        floats[..n_edges].to_vec(),
        floats[n_edges..n_edges + n_values].to_vec(),
        floats[n_edges + n_values..base].to_vec(),
    )?;
    let table = if floats.len() == with_table {
        let value = floats[base..base + n_values].to_vec();
        let stop = floats[base + n_values..]
            .iter()
            .map(|&s| match s {
                0.0 => Ok(false),
                1.0 => Ok(true),
                _ => Err(bad("stopping flags must be 0 or 1")),
            })
            .collect::<Result<Vec<bool>>>()?;
        Some(ValueStoppingTable::from_parts(n_bins, value, stop))
    } else {
        None
    };
    Ok((c, table))
}

pub fn load(path: &Path) -> Result<(Coercion, Option<ValueStoppingTable>)> {
    read_artifact(&fs::read(path)?)
}
