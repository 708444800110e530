//! JSON state files: `{"dim": d, "matrix": [[[re, im], ...], ...]}`.

use std::path::Path;

use coherence_core::{ComplexMatrix, DensityMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dim: usize,
    /// Row-major entries as `[re, im]` pairs.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn from_density_matrix(rho: &DensityMatrix) -> Self {
        let d = rho.dim();
        Self {
            dim: d,
            matrix: (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            let z = rho.get(i, j);
                            [z.re, z.im]
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    /// Checks shape, finiteness, Hermiticity, positivity and trace.
    pub fn to_density_matrix(&self) -> Result<DensityMatrix, CliError> {
        let d = self.dim;
        if d < 2 {
            return Err(CliError::Validation(format!(
                "dim must be at least 2, got {d}"
            )));
        }
        if self.matrix.len() != d {
            return Err(CliError::Validation(format!(
                "matrix has {} rows, expected {d}",
                self.matrix.len()
            )));
        }
        let mut data = Vec::with_capacity(d * d);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != d {
                return Err(CliError::Validation(format!(
                    "row {i} has {} entries, expected {d}",
                    row.len()
                )));
            }
            for (j, [re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(CliError::Validation(format!(
                        "entry [{i}][{j}] is not finite"
                    )));
                }
                data.push(C64::new(*re, *im));
            }
        }
        let m = ComplexMatrix::from_row_major(d, d, data)?;
        Ok(DensityMatrix::new(m)?)
    }
}

/// Reads and validates a state file.
pub fn load_state(path: &Path) -> Result<DensityMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    StateFile::parse(&text)?.to_density_matrix()
}
