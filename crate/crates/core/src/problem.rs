//! Problem files.
//!
//! A problem is a JSON document:
//!
//! ```json
//! {
//!   "matrix": [[1, "3/5", "0.25"]],
//!   "p": 2,
//!   "shapes": {"type": "bounds", "lower": [1, 0], "upper": [3, 2]},
//!   "objective": {"type": "linear", "cost": [[1, 0]]}
//! }
//! ```
//!
//! Shapes are `{"type":"all"}`, `{"type":"list","shapes":[[...],...]}` or
//! `{"type":"bounds","lower":[...],"upper":[...]}`. Objectives are `linear` (`cost`),
//! `sum_diag_pow` (`q`), `sum_column_norm_pow` (`q`), `max_cut` (`edges`, 1-based pairs) and
//! `external` (`cmd`, program and arguments). Scalars are JSON integers, decimals, or strings
//! holding an integer, decimal or `a/b`; all are read exactly.

use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::linalg::{format_rational, is_integer, parse_rational, DenseMatrix, Rational};
use crate::partition::{Shape, ShapeFamily, ShapeKind};
use crate::solver::Objective;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub matrix: DenseMatrix,
    pub p: usize,
    pub shapes: ShapeFamily,
    pub objective: Option<Objective>,
}

impl Problem {
    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        let top = as_object(&value, "problem")?;
        check_keys(top, &["matrix", "p", "shapes", "objective"], "problem")?;
        let matrix = parse_matrix(required(top, "matrix", "problem")?, "matrix")?;
        let p = as_count(required(top, "p", "problem")?, "p")?;
        if p == 0 {
            return Err(Error::Parse("p must be positive".into()));
        }
        let n = matrix.cols();
        let shapes = parse_shapes(required(top, "shapes", "problem")?, n, p)?;
        let objective = match top.get("objective") {
            None | Some(Value::Null) => None,
            Some(o) => Some(parse_objective(o)?),
        };
        Ok(Self {
            matrix,
            p,
            shapes,
            objective,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut top = Map::new();
        top.insert("matrix".into(), matrix_value(&self.matrix));
        top.insert("p".into(), Value::from(self.p));
        top.insert("shapes".into(), shapes_value(&self.shapes));
        if let Some(o) = &self.objective {
            top.insert("objective".into(), objective_value(o));
        }
        Value::Object(top)
    }
}

fn as_object<'a>(value: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::Parse(format!("{what} must be a JSON object")))
}

fn check_keys(map: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::Parse(format!("unknown key {k:?} in {what}"))),
        None => Ok(()),
    }
}

fn required<'a>(map: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    map.get(key)
        .ok_or_else(|| Error::Parse(format!("missing key {key:?} in {what}")))
}

fn as_count(value: &Value, what: &str) -> Result<usize> {
    value
        .as_u64()
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::Parse(format!("{what} must be a nonnegative integer, got {value}")))
}

fn as_array<'a>(value: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn count_list(value: &Value, what: &str) -> Result<Vec<usize>> {
    as_array(value, what)?.iter().map(|v| as_count(v, what)).collect()
}

/// A scalar given as a JSON number or string.
pub fn parse_scalar(value: &Value) -> Result<Rational> {
    match value {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a number or string scalar, got {other}"))),
    }
}

/// Integers become JSON numbers, everything else an `"a/b"` string.
pub fn scalar_value(value: &Rational) -> Value {
    let text = format_rational(value);
    if is_integer(value) {
        Value::Number(Number::from_str(&text).expect("integer text is a JSON number"))
    } else {
        Value::String(text)
    }
}

fn parse_matrix(value: &Value, what: &str) -> Result<DenseMatrix> {
    let rows = as_array(value, what)?;
    if rows.is_empty() {
        return Err(Error::Parse(format!("{what} has no rows")));
    }
    let rows = rows
        .iter()
        .map(|r| as_array(r, what)?.iter().map(parse_scalar).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    DenseMatrix::from_rows(rows).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn matrix_value(m: &DenseMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| Value::Array(m.row(r).iter().map(scalar_value).collect()))
            .collect(),
    )
}

fn parse_shapes(value: &Value, n: usize, p: usize) -> Result<ShapeFamily> {
    let map = as_object(value, "shapes")?;
    let kind = required(map, "type", "shapes")?
        .as_str()
        .ok_or_else(|| Error::Parse("shapes type must be a string".into()))?;
    let family = match kind {
        "all" => {
            check_keys(map, &["type"], "shapes")?;
            ShapeFamily::all(n, p)
        }
        "list" => {
            check_keys(map, &["type", "shapes"], "shapes")?;
            let list = as_array(required(map, "shapes", "shapes")?, "shapes list")?
                .iter()
                .map(|s| count_list(s, "shape").map(Shape::new))
                .collect::<Result<Vec<_>>>()?;
            ShapeFamily::explicit(n, p, list)
        }
        "bounds" => {
            check_keys(map, &["type", "lower", "upper"], "shapes")?;
            let lower = count_list(required(map, "lower", "shapes")?, "lower")?;
            let upper = count_list(required(map, "upper", "shapes")?, "upper")?;
            ShapeFamily::bounds(n, p, lower, upper)
        }
        other => return Err(Error::Parse(format!("unknown shapes type {other:?}"))),
    };
    family.map_err(|e| Error::Parse(format!("shapes: {e}")))
}

fn shapes_value(family: &ShapeFamily) -> Value {
    let mut map = Map::new();
    match family.kind() {
        ShapeKind::All => {
            map.insert("type".into(), "all".into());
        }
        ShapeKind::Explicit(shapes) => {
            map.insert("type".into(), "list".into());
            let list = shapes.iter().map(|s| Value::from(s.counts().to_vec())).collect();
            map.insert("shapes".into(), Value::Array(list));
        }
        ShapeKind::Bounds { lower, upper } => {
            map.insert("type".into(), "bounds".into());
            map.insert("lower".into(), Value::from(lower.clone()));
            map.insert("upper".into(), Value::from(upper.clone()));
        }
    }
    Value::Object(map)
}

fn parse_objective(value: &Value) -> Result<Objective> {
    let map = as_object(value, "objective")?;
    let kind = required(map, "type", "objective")?
        .as_str()
        .ok_or_else(|| Error::Parse("objective type must be a string".into()))?;
    let exponent = |map: &Map<String, Value>| -> Result<u32> {
        check_keys(map, &["type", "q"], "objective")?;
        let q = as_count(required(map, "q", "objective")?, "q")?;
        u32::try_from(q).map_err(|_| Error::Parse(format!("exponent q = {q} is too large")))
    };
    let objective = match kind {
        "linear" => {
            check_keys(map, &["type", "cost"], "objective")?;
            Objective::Linear(parse_matrix(required(map, "cost", "objective")?, "cost")?)
        }
        "sum_diag_pow" => Objective::SumDiagPow(exponent(map)?),
        "sum_column_norm_pow" => Objective::SumColumnNormPow(exponent(map)?),
        "max_cut" => {
            check_keys(map, &["type", "edges"], "objective")?;
            let edges = as_array(required(map, "edges", "objective")?, "edges")?
                .iter()
                .map(|e| match count_list(e, "edge")?.as_slice() {
                    &[u, v] if u >= 1 && v >= 1 => Ok((u - 1, v - 1)),
                    _ => Err(Error::Parse(format!("edge must be a pair of 1-based indices, got {e}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Objective::MaxCut(edges)
        }
        "external" => {
            check_keys(map, &["type", "cmd"], "objective")?;
            let cmd = as_array(required(map, "cmd", "objective")?, "cmd")?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| Error::Parse("cmd entries must be strings".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Objective::External(cmd)
        }
        other => return Err(Error::Parse(format!("unknown objective type {other:?}"))),
    };
    objective
        .validate()
        .map_err(|e| Error::Parse(format!("objective: {e}")))?;
    Ok(objective)
}

fn objective_value(objective: &Objective) -> Value {
    let mut map = Map::new();
    match objective {
        Objective::Linear(cost) => {
            map.insert("type".into(), "linear".into());
            map.insert("cost".into(), matrix_value(cost));
        }
        Objective::SumDiagPow(q) => {
            map.insert("type".into(), "sum_diag_pow".into());
            map.insert("q".into(), Value::from(*q));
        }
        Objective::SumColumnNormPow(q) => {
            map.insert("type".into(), "sum_column_norm_pow".into());
            map.insert("q".into(), Value::from(*q));
        }
        Objective::MaxCut(edges) => {
            map.insert("type".into(), "max_cut".into());
            let list = edges.iter().map(|&(u, v)| Value::from(vec![u + 1, v + 1])).collect();
            map.insert("edges".into(), Value::Array(list));
        }
        Objective::External(cmd) => {
            map.insert("type".into(), "external".into());
            map.insert("cmd".into(), Value::from(cmd.clone()));
        }
    }
    Value::Object(map)
}
