use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, Monomial, Rational, Var};
use crate::multiindex::MultiIndex;
use crate::report::Report;

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
#[serde(deny_unknown_fields)]
struct VarRecord {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    component: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
#[serde(deny_unknown_fields)]
struct FactorRecord {
    var: VarRecord,
    exp: u32,
}

/// One monomial term; numerator and denominator are decimal strings so that
/// big integers survive JSON.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    num: String,
    den: String,
    factors: Vec<FactorRecord>,
}

fn var_record(v: &Var) -> VarRecord {
    let (kind, component, index) = match v {
        Var::X(mu) => ("x", Some(*mu), None),
        Var::U(mu, i) => ("u", Some(*mu), Some(i.entries().to_vec())),
        Var::P(i) => ("p", None, Some(i.entries().to_vec())),
        Var::Nu => ("nu", None, None),
        Var::T => ("t", None, None),
    };
    VarRecord {
        kind: kind.to_string(),
        component,
        index,
    }
}

fn var_from_record(r: &VarRecord, dim: usize) -> Result<Var> {
    let bad = |m: &str| Error::Serialization(format!("{m} in {r:?}"));
    let component = |c: Option<u32>| {
        c.filter(|&c| c >= 1 && c as usize <= dim)
            .ok_or_else(|| bad("component missing or out of range"))
    };
    let index = |i: &Option<Vec<u32>>| match i {
        Some(i) if i.len() == dim => Ok(MultiIndex::new(i.iter().copied())),
        Some(i) => Err(Error::DimensionMismatch {
            expected: dim,
            found: i.len(),
        }),
        None => Err(bad("missing index")),
    };
    let no_index = |ok: bool| if ok { Ok(()) } else { Err(bad("unexpected field")) };
    match r.kind.as_str() {
        "x" => {
            no_index(r.index.is_none())?;
            Ok(Var::X(component(r.component)?))
        }
        "u" => Ok(Var::U(component(r.component)?, index(&r.index)?)),
        "p" => {
            no_index(r.component.is_none())?;
            Ok(Var::P(index(&r.index)?))
        }
        "nu" | "t" => {
            no_index(r.component.is_none() && r.index.is_none())?;
            Ok(if r.kind == "nu" { Var::Nu } else { Var::T })
        }
        _ => Err(bad("unknown variable kind")),
    }
}

fn records(f: &Expr) -> Vec<TermRecord> {
    f.terms()
        .map(|(m, c)| TermRecord {
            num: c.numer().to_string(),
            den: c.denom().to_string(),
            factors: m
                .factors()
                .iter()
                .map(|(v, e)| FactorRecord {
                    var: var_record(v),
                    exp: *e,
                })
                .collect(),
        })
        .collect()
}

/// Serialize as a JSON array of term records in canonical order.
pub fn expr_to_json(f: &Expr) -> serde_json::Value {
    serde_json::to_value(records(f)).expect("term records serialize")
}

/// Inverse of [`expr_to_json`]; indices are checked against `dim`.
pub fn expr_from_json(value: &serde_json::Value, dim: usize) -> Result<Expr> {
    let recs: Vec<TermRecord> =
        serde_json::from_value(value.clone()).map_err(|e| Error::Serialization(e.to_string()))?;
    let mut out = Expr::zero();
    for r in recs {
        let parse = |s: &str| -> Result<BigInt> {
            s.parse()
                .map_err(|_| Error::Serialization(format!("bad integer `{s}`")))
        };
        let den = parse(&r.den)?;
        if den.is_zero() {
            return Err(Error::Serialization("zero denominator".into()));
        }
        let c = Rational::new(parse(&r.num)?, den);
        let mut factors = Vec::with_capacity(r.factors.len());
        for f in &r.factors {
            factors.push((var_from_record(&f.var, dim)?, f.exp));
        }
        out.add_term(Monomial::from_factors(factors), c);
    }
    Ok(out)
}

/// One record per residual: `{name, informational, zero, value}`.
pub fn report_to_json(report: &Report) -> serde_json::Value {
    serde_json::Value::Array(
        report
            .entries
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.name,
                    "informational": r.informational,
                    "zero": r.value.is_zero(),
                    "value": expr_to_json(&r.value),
                })
            })
            .collect(),
    )
}
