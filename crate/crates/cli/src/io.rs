//! Matrix and eigenpair file formats.
//!
//! JSON matrices are `{"rows": r, "cols": c, "entries": [[re, im], ...]}` in row-major
//! order. Binary matrices start with the magic `EIGP` and a little-endian `u32` size
//! `n`, followed by `n * n` row-major entries as pairs of little-endian `f64`.

use std::fs;
use std::io::Write;
use std::path::Path;

use eigenpath::linalg::{ComplexMatrix, ComplexVector};
use eigenpath::newton::ApproxEigenpair;
use eigenpath::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MAGIC: &[u8; 4] = b"EIGP";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.as_slice().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let data = self.entries.iter().map(|p| Complex64::new(p[0], p[1])).collect();
        let m = ComplexMatrix::from_row_major(self.rows, self.cols, data).map_err(|e| CliError::Usage(e.to_string()))?;
        if !m.is_finite() {
            return Err(CliError::Usage("matrix has non-finite entries".into()));
        }
        Ok(m)
    }
}

pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn vector_pairs(v: &ComplexVector) -> Vec<[f64; 2]> {
    v.iter().map(|&z| complex_pair(z)).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairJson {
    pub zeta: [f64; 2],
    pub w: Vec<[f64; 2]>,
}

impl PairJson {
    pub fn from_pair(p: &ApproxEigenpair) -> Self {
        Self {
            zeta: complex_pair(p.zeta),
            w: vector_pairs(&p.w),
        }
    }

    pub fn to_pair(&self) -> Result<ApproxEigenpair, CliError> {
        let w = ComplexVector::from(self.w.iter().map(|p| Complex64::new(p[0], p[1])).collect::<Vec<_>>());
        ApproxEigenpair::new(Complex64::new(self.zeta[0], self.zeta[1]), &w).map_err(|e| CliError::Usage(e.to_string()))
    }
}

pub fn encode_binary(m: &ComplexMatrix) -> Result<Vec<u8>, CliError> {
    if !m.is_square() {
        return Err(CliError::Usage("binary format holds square matrices only".into()));
    }
    let n = u32::try_from(m.rows()).map_err(|_| CliError::Usage("matrix too large".into()))?;
    let mut out = Vec::with_capacity(8 + 16 * m.as_slice().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&n.to_le_bytes());
    for z in m.as_slice() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_binary(bytes: &[u8]) -> Result<ComplexMatrix, CliError> {
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(CliError::Usage("not an EIGP binary matrix".into()));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let body = &bytes[8..];
    if body.len() != 16 * n * n {
        return Err(CliError::Usage(format!(
            "binary matrix of size {n} needs {} payload bytes, found {}",
            16 * n * n,
            body.len()
        )));
    }
    let f = |k: usize| f64::from_le_bytes(body[8 * k..8 * k + 8].try_into().unwrap());
    let data = (0..n * n).map(|k| Complex64::new(f(2 * k), f(2 * k + 1))).collect();
    let m = ComplexMatrix::from_row_major(n, n, data).map_err(|e| CliError::Usage(e.to_string()))?;
    if !m.is_finite() {
        return Err(CliError::Usage("matrix has non-finite entries".into()));
    }
    Ok(m)
}

/// Reads a matrix in either format, detected by the magic bytes.
pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    if bytes.starts_with(MAGIC) {
        return decode_binary(&bytes);
    }
    let parsed: MatrixJson = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))?;
    parsed.to_matrix()
}

pub fn read_pair(path: &Path) -> Result<ApproxEigenpair, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let parsed: PairJson = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Usage(format!("cannot parse {}: {e}", path.display())))?;
    parsed.to_pair()
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Usage(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ComplexMatrix {
        ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(i as f64 - 0.1 * j as f64, 1.0 / (1.0 + i as f64 + j as f64)))
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let m = sample();
        let bytes = encode_binary(&m).unwrap();
        assert_eq!(&bytes[..4], b"EIGP");
        assert_eq!(bytes.len(), 8 + 16 * 9);
        assert_eq!(decode_binary(&bytes).unwrap(), m);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = sample();
        let text = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
        let back: MatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn truncated_binary_rejected() {
        let bytes = encode_binary(&sample()).unwrap();
        assert!(decode_binary(&bytes[..bytes.len() - 1]).is_err());
        assert!(decode_binary(b"NOPE\x01\0\0\0").is_err());
    }

    #[test]
    fn json_shape_checked() {
        let bad = MatrixJson {
            rows: 2,
            cols: 2,
            entries: vec![[1.0, 0.0]; 3],
        };
        assert!(bad.to_matrix().is_err());
    }
}
