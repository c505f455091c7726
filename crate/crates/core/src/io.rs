//! JSON formats shared by the CLI and the examples.
//!
//! Matrices are `{"dim": n, "re": [[..]], "im": [[..]]}` in row-major order;
//! `im` may be omitted for real matrices. Floats are written with 17
//! significant digits so that every report round-trips exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.dim;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !rows_ok(&self.re) || self.im.as_ref().is_some_and(|im| !rows_ok(im)) {
            return Err(Error::Shape(format!("matrix rows do not match dim {n}")));
        }
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            C64::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        });
        crate::linalg::ensure_finite(&m)?;
        Ok(m)
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let n = m.nrows();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
        Self { dim: n, re, im: Some(im) }
    }
}

pub fn matrix_from_value(v: &Value) -> Result<ComplexMatrix> {
    let parsed: MatrixJson = serde_json::from_value(v.clone())?;
    parsed.to_matrix()
}

pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixJson::from_matrix(m)).expect("matrix serializes")
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    matrix_from_value(&read_json(path)?)
}

/// Pretty JSON with every float written as `{:.16e}`.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap()));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(|x| x.is_number()) => {
            out.push('[');
            for (k, x) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(x, indent, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(x, indent + 1, out);
                if k + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, x)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(x, indent + 1, out);
                if k + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}
