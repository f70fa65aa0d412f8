use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::rational::{parse_rational, Rational, Vector};
use crate::linalg::{Matrix, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `L ≥ 0` and `C > 0` (or an absent capacitor).
    Physical,
    /// Any signs, as long as no capacitance is zero.
    General,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub inductance: Rational,
    pub inverse_capacitance: Rational,
}

impl Branch {
    pub fn is_inductive(&self) -> bool {
        !self.inductance.is_zero()
    }

    pub fn is_capacitive(&self) -> bool {
        !self.inverse_capacitance.is_zero()
    }

    pub fn is_empty(&self) -> bool {
        !self.is_inductive() && !self.is_capacitive()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Netlist {
    pub nodes: Vec<String>,
    pub branches: Vec<Branch>,
    /// Explicit Kirchhoff current law rows, one entry per branch, replacing the node rows.
    pub kcl_rows: Option<Matrix>,
    pub mode: Mode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetlist {
    nodes: Vec<String>,
    branches: Vec<RawBranch>,
    #[serde(default)]
    kcl_rows: Option<Vec<Vec<Value>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBranch {
    name: String,
    from: String,
    to: String,
    #[serde(rename = "L", default)]
    l: Option<Value>,
    #[serde(rename = "C", default)]
    c: Option<Value>,
}

fn value_text(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn rational_field(v: &Value, what: &str) -> Result<Rational> {
    let text = value_text(v)
        .ok_or_else(|| Error::Parse(format!("{what}: expected a rational string, got {v}")))?;
    parse_rational(&text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn parse_netlist(text: &str, mode: Mode) -> Result<Netlist> {
    let raw: RawNetlist = serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!(
            "netlist JSON at line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })?;
    let mut index = HashMap::new();
    for (i, n) in raw.nodes.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(Error::Invalid(format!("duplicate node {n:?}")));
        }
    }
    if raw.branches.is_empty() {
        return Err(Error::Invalid("netlist has no branches".into()));
    }
    let mut names = HashMap::new();
    let mut branches = Vec::with_capacity(raw.branches.len());
    for (k, b) in raw.branches.iter().enumerate() {
        let ctx = format!("branch {k} ({:?})", b.name);
        if names.insert(b.name.clone(), k).is_some() {
            return Err(Error::Invalid(format!("duplicate branch name {:?}", b.name)));
        }
        let node = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("{ctx}: unknown node {n:?}")))
        };
        let from = node(&b.from)?;
        let to = node(&b.to)?;
        let inductance = match &b.l {
            None | Some(Value::Null) => Rational::zero(),
            Some(v) => rational_field(v, &format!("{ctx} inductance"))?,
        };
        let inverse_capacitance = match &b.c {
            None | Some(Value::Null) => Rational::zero(),
            Some(Value::String(s)) if s.trim().eq_ignore_ascii_case("inf") => Rational::zero(),
            Some(v) => {
                let c = rational_field(v, &format!("{ctx} capacitance"))?;
                if c.is_zero() {
                    return Err(Error::Invalid(format!(
                        "{ctx}: zero capacitance is an open branch"
                    )));
                }
                Rational::one() / c
            }
        };
        if mode == Mode::Physical {
            if inductance.is_negative() {
                return Err(Error::Invalid(format!(
                    "{ctx}: negative inductance needs general mode"
                )));
            }
            if inverse_capacitance.is_negative() {
                return Err(Error::Invalid(format!(
                    "{ctx}: negative capacitance needs general mode"
                )));
            }
        }
        branches.push(Branch {
            name: b.name.clone(),
            from,
            to,
            inductance,
            inverse_capacitance,
        });
    }
    let n = branches.len();
    let kcl_rows = match raw.kcl_rows {
        None => None,
        Some(rows) => {
            let mut parsed: Vec<Vector> = Vec::with_capacity(rows.len());
            for (r, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::Invalid(format!(
                        "kcl row {r} has {} entries for {n} branches",
                        row.len()
                    )));
                }
                let vals = row
                    .iter()
                    .enumerate()
                    .map(|(j, v)| rational_field(v, &format!("kcl row {r} entry {j}")))
                    .collect::<Result<Vector>>()?;
                parsed.push(vals);
            }
            if Subspace::span(n, &parsed).dim() != parsed.len() {
                return Err(Error::Invalid("kcl rows are linearly dependent".into()));
            }
            Some(Matrix::from_rows(n, &parsed))
        }
    };
    Ok(Netlist {
        nodes: raw.nodes,
        branches,
        kcl_rows,
        mode,
    })
}

impl Netlist {
    pub fn branch_names(&self) -> Vec<String> {
        self.branches.iter().map(|b| b.name.clone()).collect()
    }

    /// JSON in the input format, with `1/C` written back as `C`.
    pub fn to_json(&self) -> String {
        let branches: Vec<Value> = self
            .branches
            .iter()
            .map(|b| {
                let l = if b.inductance.is_zero() {
                    Value::Null
                } else {
                    Value::String(b.inductance.to_string())
                };
                let c = if b.inverse_capacitance.is_zero() {
                    Value::Null
                } else {
                    Value::String((Rational::one() / &b.inverse_capacitance).to_string())
                };
                serde_json::json!({
                    "name": b.name,
                    "from": self.nodes[b.from],
                    "to": self.nodes[b.to],
                    "L": l,
                    "C": c,
                })
            })
            .collect();
        let mut doc = serde_json::json!({ "nodes": self.nodes, "branches": branches });
        if let Some(k) = &self.kcl_rows {
            let rows: Vec<Vec<String>> = k
                .row_vectors()
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect();
            doc["kcl_rows"] = serde_json::json!(rows);
        }
        serde_json::to_string_pretty(&doc).expect("netlist serialises")
    }
}
