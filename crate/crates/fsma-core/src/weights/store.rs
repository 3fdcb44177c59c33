//! Weight matrix file format: one JSON header line, then the row-major
//! entries as little-endian 64-bit floats.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{Provenance, WeightError, WeightMatrix};

#[derive(Serialize, Deserialize)]
struct Header {
    n: usize,
    l: usize,
    provenance: Provenance,
    f_used: f64,
}

pub fn save_weights(w: &WeightMatrix, path: &Path) -> Result<(), WeightError> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| WeightError::Store(e.to_string()))?);
    let header = Header {
        n: w.n(),
        l: w.block_len(),
        provenance: w.provenance(),
        f_used: w.f_used(),
    };
    serde_json::to_writer(&mut out, &header).map_err(|e| WeightError::Store(e.to_string()))?;
    out.write_all(b"\n")
        .map_err(|e| WeightError::Store(e.to_string()))?;
    for &value in w.data.iter() {
        out.write_all(&value.to_le_bytes())
            .map_err(|e| WeightError::Store(e.to_string()))?;
    }
    out.flush().map_err(|e| WeightError::Store(e.to_string()))
}

pub fn load_weights(path: &Path) -> Result<WeightMatrix, WeightError> {
    let mut reader =
        BufReader::new(File::open(path).map_err(|e| WeightError::Store(e.to_string()))?);
    let mut header_bytes = Vec::new();
    let mut byte = [0u8; 1];
    loop {
        reader
            .read_exact(&mut byte)
            .map_err(|_| WeightError::Store("missing header line".to_string()))?;
        if byte[0] == b'\n' {
            break;
        }
        header_bytes.push(byte[0]);
    }
    let header: Header = serde_json::from_slice(&header_bytes)
        .map_err(|e| WeightError::Store(format!("bad header: {e}")))?;
    let count = header.n * header.n;
    let mut raw = vec![0u8; count * 8];
    reader
        .read_exact(&mut raw)
        .map_err(|_| WeightError::Store("truncated weight payload".to_string()))?;
    let mut trailing = [0u8; 1];
    if reader.read(&mut trailing).unwrap_or(0) != 0 {
        return Err(WeightError::Store("trailing bytes after payload".to_string()));
    }
    let values: Vec<f64> = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let data = Array2::from_shape_vec((header.n, header.n), values)
        .map_err(|e| WeightError::Store(e.to_string()))?;
    if header.l == 0 || header.n % header.l != 0 {
        return Err(WeightError::Store(format!(
            "bad block length {} for n = {}",
            header.l, header.n
        )));
    }
    Ok(WeightMatrix::new(
        data,
        header.l,
        header.provenance,
        header.f_used,
    ))
}
