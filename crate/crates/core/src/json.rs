//! JSON schemas for operators and structure constants.
//!
//! Operator files look like `{"algebra":{"name":"so","n":4},"mat":[[...],...]}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::curvop::SymOperator;
use crate::error::{CurvError, Result};
use crate::liealg::{self, AlgebraName};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub name: AlgebraName,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorJson {
    pub algebra: AlgebraJson,
    pub mat: Vec<Vec<f64>>,
}

impl OperatorJson {
    pub fn from_operator(op: &SymOperator) -> Self {
        let d = op.dim();
        let mat = (0..d)
            .map(|i| (0..d).map(|j| op.mat()[(i, j)]).collect())
            .collect();
        Self {
            algebra: AlgebraJson {
                name: op.algebra().name(),
                n: op.algebra().n(),
            },
            mat,
        }
    }

    pub fn to_operator(&self) -> Result<SymOperator> {
        let alg = liealg::shared(self.algebra.name, self.algebra.n)?;
        let d = alg.dim();
        if self.mat.len() != d || self.mat.iter().any(|row| row.len() != d) {
            return Err(CurvError::DimensionMismatch(format!(
                "matrix must be {d}x{d} for {}({})",
                self.algebra.name.as_str(),
                self.algebra.n
            )));
        }
        let mat = DMatrix::from_fn(d, d, |i, j| self.mat[i][j]);
        SymOperator::new(alg, mat)
    }
}

pub fn read_operator(path: &std::path::Path) -> Result<SymOperator> {
    let text = std::fs::read_to_string(path)?;
    let parsed: OperatorJson = serde_json::from_str(&text)?;
    parsed.to_operator()
}

pub fn write_operator(path: &std::path::Path, op: &SymOperator) -> Result<()> {
    let text = serde_json::to_string_pretty(&OperatorJson::from_operator(op))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Structure constants as an array of [a, b, k, value] quadruples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StructureJson {
    pub algebra: AlgebraJson,
    pub dim: usize,
    pub structure: Vec<(usize, usize, usize, f64)>,
}

impl StructureJson {
    pub fn from_algebra(alg: &liealg::MetricLieAlgebra) -> Self {
        let d = alg.dim();
        let mut entries = Vec::new();
        for a in 0..d {
            for b in 0..d {
                for k in 0..d {
                    let c = alg.structure_constant(a, b, k);
                    if c.abs() > 1e-14 {
                        entries.push((a, b, k, c));
                    }
                }
            }
        }
        Self {
            algebra: AlgebraJson {
                name: alg.name(),
                n: alg.n(),
            },
            dim: d,
            structure: entries,
        }
    }
}
