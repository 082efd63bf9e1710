//! JSON tensor files: `{"dim": n, "entries": [[i, j, k, l, value], …]}` with
//! 1-based indices. Entries are generators; the remaining components follow
//! from the curvature symmetries.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::curvature::{build_act, AlgebraicCurvatureTensor};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub dim: usize,
    pub entries: Vec<(usize, usize, usize, usize, f64)>,
}

impl TensorFile {
    /// Canonical generators of `r`, 1-based.
    pub fn from_tensor(r: &AlgebraicCurvatureTensor) -> Self {
        Self {
            dim: r.dim(),
            entries: r
                .generators()
                .into_iter()
                .map(|(i, j, k, l, v)| (i + 1, j + 1, k + 1, l + 1, v))
                .collect(),
        }
    }

    pub fn to_tensor(&self) -> Result<AlgebraicCurvatureTensor> {
        let n = self.dim;
        let mut zero_based = Vec::with_capacity(self.entries.len());
        for &(i, j, k, l, v) in &self.entries {
            if [i, j, k, l].iter().any(|&x| x == 0 || x > n) {
                return Err(Error::IndexOutOfRange { i, j, k, l, dim: n });
            }
            zero_based.push((i - 1, j - 1, k - 1, l - 1, v));
        }
        build_act(n, &zero_based)
    }
}

pub fn tensor_to_json(r: &AlgebraicCurvatureTensor) -> String {
    let file = TensorFile::from_tensor(r);
    let mut out = format!("{{\n  \"dim\": {},\n  \"entries\": [", file.dim);
    for (idx, e) in file.entries.iter().enumerate() {
        let sep = if idx == 0 { "\n    " } else { ",\n    " };
        out.push_str(sep);
        out.push_str(&serde_json::to_string(e).expect("finite entries"));
    }
    if !file.entries.is_empty() {
        out.push_str("\n  ");
    }
    out.push_str("]\n}\n");
    out
}

pub fn tensor_from_json(text: &str) -> Result<AlgebraicCurvatureTensor> {
    let file: TensorFile = serde_json::from_str(text)?;
    file.to_tensor()
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<AlgebraicCurvatureTensor> {
    tensor_from_json(&fs::read_to_string(path)?)
}

pub fn write_tensor(path: impl AsRef<Path>, r: &AlgebraicCurvatureTensor) -> Result<()> {
    fs::write(path, tensor_to_json(r))?;
    Ok(())
}
