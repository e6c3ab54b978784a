//! JSON semigroup descriptors.
//!
//! One object with fields `type`, `n`, `A` (schur), `jump_ops` (custom) and an
//! optional `label`. Custom jump operators are lists of `n²` `[re, im]` pairs
//! in row-major order; a list of `n` rows of `n` pairs is also accepted.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{c64, AlgElement};
use crate::semigroups::{
    cyclic_group_semigroup, depolarizing, from_jump_ops, schur_semigroup, symmetric_group_semigroup, LindbladGenerator,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemigroupKind {
    Schur,
    Cyclic,
    SymmetricGroup,
    Depolarizing,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JumpOp {
    Flat(Vec<[f64; 2]>),
    Rows(Vec<Vec<[f64; 2]>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSpec {
    #[serde(rename = "type")]
    pub kind: SemigroupKind,
    pub n: usize,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump_ops: Option<Vec<JumpOp>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Spec(msg.into())
}

impl SemigroupSpec {
    /// Parses JSON text; syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| spec_err(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| spec_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Spec(m) => spec_err(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn schur_matrix(&self) -> Result<DMatrix<f64>> {
        let rows = self
            .a
            .as_ref()
            .ok_or_else(|| spec_err("field `A` is required for type \"schur\""))?;
        if rows.len() != self.n {
            return Err(spec_err(format!(
                "field `A`: expected {} rows, found {}",
                self.n,
                rows.len()
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != self.n {
                return Err(spec_err(format!(
                    "field `A[{i}]`: expected {} entries, found {}",
                    self.n,
                    r.len()
                )));
            }
        }
        Ok(DMatrix::from_fn(self.n, self.n, |i, j| rows[i][j]))
    }

    fn custom_ops(&self) -> Result<Vec<AlgElement>> {
        let ops = self
            .jump_ops
            .as_ref()
            .ok_or_else(|| spec_err("field `jump_ops` is required for type \"custom\""))?;
        let n = self.n;
        ops.iter()
            .enumerate()
            .map(|(k, op)| {
                let flat: Vec<[f64; 2]> = match op {
                    JumpOp::Flat(v) => v.clone(),
                    JumpOp::Rows(rows) => {
                        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                            return Err(spec_err(format!(
                                "field `jump_ops[{k}]`: expected {n} rows of {n} pairs"
                            )));
                        }
                        rows.concat()
                    }
                };
                if flat.len() != n * n {
                    return Err(spec_err(format!(
                        "field `jump_ops[{k}]`: expected {} entries, found {}",
                        n * n,
                        flat.len()
                    )));
                }
                Ok(DMatrix::from_fn(n, n, |p, q| {
                    let [re, im] = flat[p * n + q];
                    c64(re, im)
                }))
            })
            .collect()
    }

    /// Builds the generator; construction failures are reported as descriptor errors.
    pub fn build(&self) -> Result<LindbladGenerator> {
        if self.n == 0 {
            return Err(spec_err("field `n` must be positive"));
        }
        let gen = match self.kind {
            SemigroupKind::Schur => schur_semigroup(&self.schur_matrix()?),
            SemigroupKind::Cyclic => cyclic_group_semigroup(self.n),
            SemigroupKind::SymmetricGroup => symmetric_group_semigroup(self.n),
            SemigroupKind::Depolarizing => depolarizing(self.n),
            SemigroupKind::Custom => from_jump_ops(self.custom_ops()?),
        }
        .map_err(|e| match e {
            e @ Error::TooLarge { .. } => e,
            other => spec_err(other.to_string()),
        })?;
        Ok(match &self.label {
            Some(l) => gen.with_label(l.clone()),
            None => gen,
        })
    }
}
