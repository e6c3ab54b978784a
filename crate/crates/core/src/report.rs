//! Verdict reports and their canonical JSON encoding.
//!
//! Canonical JSON has lexicographically sorted keys, no insignificant
//! whitespace, and every float written with 17 significant digits. Non-finite
//! floats are encoded as the strings `"inf"`, `"-inf"` and `"nan"`.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::matcore::{AlgElement, C64};
use nalgebra::DVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Be,
    Cbe,
    Ge,
    Cge,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Be => "BE",
            Condition::Cbe => "CBE",
            Condition::Ge => "GE",
            Condition::Cge => "CGE",
        }
    }
}

/// Data that reproduces a report's minimum eigenvalue.
#[derive(Clone, Debug)]
pub enum Witness {
    /// `min_eig = <xi, be_form(a) xi>` with `|a|_tau = |xi| = 1`.
    Be { a: AlgElement, xi: DVector<C64> },
    /// `min_eig = Σ_αβ w_α* B_αβ w_β` over the scaled matrix-unit basis,
    /// with `w` split into `n²` blocks of length `n`.
    Cbe { w: DVector<C64> },
    /// `min_eig = <a, H(rho) a>_tau` with `|a|_tau = 1`, on the algebra
    /// amplified by `M_amplify`.
    Ge {
        rho: AlgElement,
        a: AlgElement,
        mean: String,
        amplify: usize,
    },
}

#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub condition: Condition,
    pub k: f64,
    /// `f64::INFINITY` encodes `N = ∞`.
    pub n: f64,
    pub min_eig: f64,
    pub tol: f64,
    pub verdict: bool,
    pub witness: Option<Witness>,
    pub samples: usize,
    pub notes: String,
}

impl CurvatureReport {
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("condition".into(), Value::String(self.condition.as_str().into()));
        m.insert("K".into(), float(self.k));
        m.insert("N".into(), float(self.n));
        m.insert("min_eig".into(), float(self.min_eig));
        m.insert("tol".into(), float(self.tol));
        m.insert("verdict".into(), Value::Bool(self.verdict));
        m.insert("samples".into(), Value::from(self.samples as u64));
        m.insert(
            "witness".into(),
            self.witness.as_ref().map_or(Value::Null, Witness::to_value),
        );
        m.insert("notes".into(), Value::String(self.notes.clone()));
        Value::Object(m)
    }

    pub fn to_canonical_json(&self) -> String {
        canonical_json(&self.to_value())
    }
}

impl Witness {
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        match self {
            Witness::Be { a, xi } => {
                m.insert("kind".into(), "BE".into());
                m.insert("a".into(), matrix(a));
                m.insert("xi".into(), vector(xi));
            }
            Witness::Cbe { w } => {
                m.insert("kind".into(), "CBE".into());
                m.insert("w".into(), vector(w));
            }
            Witness::Ge { rho, a, mean, amplify } => {
                m.insert("kind".into(), "GE".into());
                m.insert("rho".into(), matrix(rho));
                m.insert("a".into(), matrix(a));
                m.insert("mean".into(), Value::String(mean.clone()));
                m.insert("amplify".into(), Value::from(*amplify as u64));
            }
        }
        Value::Object(m)
    }
}

/// JSON value of a float; non-finite values become strings.
pub fn float(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x == f64::INFINITY {
        Value::String("inf".into())
    } else if x == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
    }
}

/// Inverse of [`float`] for the string encodings.
pub fn parse_float(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" | "Infinity" | "∞" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "nan" => Some(f64::NAN),
            other => other.parse().ok(),
        },
        _ => None,
    }
}

pub fn complex(z: C64) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

/// Rows of `[re, im]` pairs.
pub fn matrix(a: &AlgElement) -> Value {
    Value::Array(
        (0..a.nrows())
            .map(|i| Value::Array((0..a.ncols()).map(|j| complex(a[(i, j)])).collect()))
            .collect(),
    )
}

pub fn vector(v: &DVector<C64>) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

/// Serializes with sorted keys and 17 significant digits per float.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else {
                let x = n.as_f64().unwrap_or(f64::NAN);
                write!(out, "{x:.16e}").unwrap();
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(out, &map[k]);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_key_order_and_float_format() {
        let v = json!({"b": 1.5, "a": [1, 0.1], "c": {"z": null, "y": true}});
        assert_eq!(
            canonical_json(&v),
            r#"{"a":[1,1.0000000000000001e-1],"b":1.5000000000000000e0,"c":{"y":true,"z":null}}"#
        );
    }

    #[test]
    fn floats_round_trip_through_canonical_text() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, std::f64::consts::PI] {
            let s = canonical_json(&float(x));
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn infinite_dimension_is_a_string() {
        assert_eq!(float(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(parse_float(&float(f64::INFINITY)), Some(f64::INFINITY));
        assert_eq!(parse_float(&json!(4)), Some(4.0));
    }

    #[test]
    fn report_fields() {
        let r = CurvatureReport {
            condition: Condition::Cbe,
            k: 0.0,
            n: f64::INFINITY,
            min_eig: -0.25,
            tol: 1e-8,
            verdict: false,
            witness: None,
            samples: 1,
            notes: String::new(),
        };
        let v = r.to_value();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 9);
        for k in [
            "condition",
            "K",
            "N",
            "min_eig",
            "tol",
            "verdict",
            "samples",
            "witness",
            "notes",
        ] {
            assert!(v.get(k).is_some(), "missing {k}");
        }
        assert_eq!(v["N"], json!("inf"));
        assert!(v["witness"].is_null());
    }
}
