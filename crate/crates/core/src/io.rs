//! Matrix JSON files: `{"n_qubits": n, "entries": [[re, im], ...]}`, row-major.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n_qubits: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            n_qubits: m.n_qubits(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        if let Some(bad) = f.entries.iter().flatten().find(|v| !v.is_finite()) {
            return Err(Error::Format(format!("non-finite entry {bad}")));
        }
        ComplexMatrix::new(
            f.n_qubits,
            f.entries
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string(&MatrixFile::from(m)).expect("matrix serialization is infallible")
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    serde_json::from_str::<MatrixFile>(text)?.try_into()
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    matrix_from_json(&std::fs::read_to_string(path)?)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<()> {
    std::fs::write(path, matrix_to_json(m))?;
    Ok(())
}

/// Loads subset members from a directory of `*.json` matrix files (in file
/// name order) or from one file holding a JSON array of matrix objects.
pub fn read_members(path: &Path) -> Result<Vec<ComplexMatrix>> {
    if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::Format(format!(
                "{}: directory holds no .json matrix files",
                path.display()
            )));
        }
        files.iter().map(|p| read_matrix(p)).collect()
    } else {
        let text = std::fs::read_to_string(path)?;
        let raw: Vec<MatrixFile> = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        raw.into_iter().map(ComplexMatrix::try_from).collect()
    }
}
