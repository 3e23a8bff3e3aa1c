//! JSON matrix files: `{"rows": m, "cols": n, "data": [[re, im], ...]}`, row-major.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::mat::{Mat, C64};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {path}")]
    Fs { path: String, source: std::io::Error },
    #[error("malformed matrix JSON in {path}")]
    Json { path: String, source: serde_json::Error },
    #[error("matrix in {path} has zero rows or columns")]
    Empty { path: String },
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for Mat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixFile {
            rows: self.rows(),
            cols: self.cols(),
            data: self.data().iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let f = MatrixFile::deserialize(d)?;
        let expected = f.rows.checked_mul(f.cols).ok_or_else(|| serde::de::Error::custom("dimensions overflow"))?;
        if f.data.len() != expected {
            return Err(serde::de::Error::custom(format!(
                "data has {} entries, expected rows x cols = {} x {} = {expected}",
                f.data.len(),
                f.rows,
                f.cols
            )));
        }
        if f.data.iter().flatten().any(|v| !v.is_finite()) {
            return Err(serde::de::Error::custom("non-finite entry"));
        }
        let data = f.data.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        Ok(Mat::from_vec(f.rows, f.cols, data).expect("length checked"))
    }
}

pub fn parse_matrix(text: &str) -> Result<Mat, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn to_json(m: &Mat) -> String {
    serde_json::to_string(m).expect("matrix serialization cannot fail")
}

/// Reads a matrix file; input matrices must be at least 1x1.
pub fn read_matrix(path: &Path) -> Result<Mat, IoError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| IoError::Fs { path: name.clone(), source })?;
    let m = parse_matrix(&text).map_err(|source| IoError::Json { path: name.clone(), source })?;
    if m.is_empty() {
        return Err(IoError::Empty { path: name });
    }
    Ok(m)
}

pub fn write_matrix(path: &Path, m: &Mat) -> Result<(), IoError> {
    fs::write(path, to_json(m) + "\n").map_err(|source| IoError::Fs { path: path.display().to_string(), source })
}
