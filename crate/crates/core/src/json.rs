//! JSON encodings shared by the CLI and the report writers.
//!
//! A matrix is `{"p": int, "re": [[...]], "im": [[...]]}` in row-major order.
//! A vector of matrices is `{"p": int, "kind": "...", "items": [matrix, ...]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::CMatrix;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub p: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let p = m.nrows();
        MatrixJson {
            p,
            re: (0..p).map(|i| (0..p).map(|j| m[(i, j)].re).collect()).collect(),
            im: (0..p).map(|i| (0..p).map(|j| m[(i, j)].im).collect()).collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(js: &MatrixJson) -> Result<CMatrix> {
        let p = js.p;
        let shaped = |rows: &Vec<Vec<f64>>| rows.len() == p && rows.iter().all(|r| r.len() == p);
        if !shaped(&js.re) || !shaped(&js.im) {
            return Err(Error::Format(format!("matrix entries are not {p}x{p}")));
        }
        Ok(CMatrix::from_fn(p, p, |i, j| Complex64::new(js.re[i][j], js.im[i][j])))
    }
}

/// Kinds of matrix vectors exchanged on the command line.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum VectorKind {
    #[serde(rename = "interval-moments")]
    IntervalMoments,
    #[serde(rename = "interval-canonical")]
    IntervalCanonical,
    #[serde(rename = "trig-moments")]
    TrigMoments,
    #[serde(rename = "circle-canonical")]
    CircleCanonical,
    #[serde(rename = "schur-taylor")]
    SchurTaylor,
    #[serde(rename = "schur-parameters")]
    SchurParameters,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VectorJson {
    pub p: usize,
    pub kind: VectorKind,
    pub items: Vec<MatrixJson>,
}

impl VectorJson {
    pub fn new(p: usize, kind: VectorKind, items: &[CMatrix]) -> Self {
        VectorJson {
            p,
            kind,
            items: items.iter().map(MatrixJson::from).collect(),
        }
    }

    /// Decodes the items, checking that every matrix has dimension `p`.
    pub fn matrices(&self) -> Result<Vec<CMatrix>> {
        self.items
            .iter()
            .map(|m| {
                if m.p != self.p {
                    return Err(Error::DimensionMismatch {
                        expected: self.p,
                        found: m.p,
                    });
                }
                CMatrix::try_from(m)
            })
            .collect()
    }

    pub fn expect_kind(&self, kind: VectorKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Format(format!(
                "expected vector kind {kind:?}, found {:?}",
                self.kind
            )));
        }
        Ok(())
    }
}
