//! `{"dim": n, "re": [[...]], "im": [[...]]}` row-major operator documents.

use serde::{Deserialize, Serialize};

use super::hermitian::{DensityMatrix, HermitianOperator};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&HermitianOperator> for OperatorJson {
    fn from(h: &HermitianOperator) -> Self {
        let n = h.dim();
        let m = h.matrix();
        Self {
            dim: n,
            re: (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }
}

impl TryFrom<&OperatorJson> for HermitianOperator {
    type Error = Error;

    fn try_from(doc: &OperatorJson) -> Result<Self> {
        let n = doc.dim;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !rows_ok(&doc.re) || !rows_ok(&doc.im) {
            return Err(Error::InvalidArgument(format!(
                "operator document must carry {n}x{n} re and im arrays"
            )));
        }
        let re: Vec<f64> = doc.re.iter().flatten().copied().collect();
        let im: Vec<f64> = doc.im.iter().flatten().copied().collect();
        HermitianOperator::from_parts(n, &re, &im)
    }
}

impl HermitianOperator {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&OperatorJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: OperatorJson = serde_json::from_str(text)?;
        Self::try_from(&doc)
    }
}

impl DensityMatrix {
    pub fn to_json(&self) -> Result<String> {
        self.as_operator().to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(HermitianOperator::from_json(text)?)
    }
}
