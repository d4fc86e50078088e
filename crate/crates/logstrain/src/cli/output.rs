//! Deterministic serialization: fixed 17-significant-digit float formatting,
//! `\n` line endings, so identical configs produce byte-identical CSV.

use super::CliError;
use crate::tensor::{SquareMatrix, SymmetricMatrix, Vector};
use serde_json::Value;
use std::path::Path;

/// 17 significant digits; non-finite values spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{:.16e}", x)
    }
}

/// JSON has no non-finite numbers; those become strings.
pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        Value::String(fmt_f64(x))
    }
}

pub fn json_floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_f64(x)).collect())
}

pub fn flat_square<const N: usize>(m: &SquareMatrix<N>) -> Vec<f64> {
    let mut out = Vec::with_capacity(N * N);
    for i in 0..N {
        for j in 0..N {
            out.push(m.entries[i][j]);
        }
    }
    out
}

pub fn flat_sym<const N: usize>(m: &SymmetricMatrix<N>) -> Vec<f64> {
    let mut out = Vec::with_capacity(N * N);
    for i in 0..N {
        for j in 0..N {
            out.push(m.get(i, j));
        }
    }
    out
}

pub fn flat_vector<const N: usize>(v: &Vector<N>) -> Vec<f64> {
    v.to_vec()
}

pub fn csv_document(header: &[String], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

pub fn write_text(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("cannot serialize {}: {e}", path.display())))?;
    s.push('\n');
    write_text(path, &s)
}

/// Row-major matrix column names like `s11, s12, ...` (1-based).
pub fn matrix_headers(prefix: &str, n: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            out.push(format!("{prefix}{i}{j}"));
        }
    }
    out
}
