//! JSON files for recurrences and q-difference systems, plus the small
//! textual forms used on the command line.
//!
//! A recurrence file:
//!
//! ```json
//! { "order": 1,
//!   "coeffs": [ [ {"dx": 1, "dy": 1, "c": "-1"}, {"dx": 0, "dy": 0, "c": "1"} ],
//!               [ {"dx": 1, "dy": 0, "c": "1"},  {"dx": 0, "dy": 0, "c": "-1"} ] ],
//!   "initials": ["1"] }
//! ```
//!
//! `coeffs[j]` multiplies `u_(n+j)`; in a monomial `dx` is the power of `q`
//! and `dy` the power of `q^n`. A system file lists the matrix row-major:
//!
//! ```json
//! { "nu": 1, "entries": [ { "num": [ {"dx": 1, "dy": 0, "c": "1"} ] } ] }
//! ```
//!
//! where `dy` is now the power of `x` and a missing `"den"` means 1, or gives a
//! scalar equation `a_0 y(x) + ... + a_nu y(q^nu x) = 0` as
//! `{ "equation": [ [monomials of a_0], ..., [monomials of a_nu] ] }`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::curvature::{QDifferenceSystem, RationalEntry};
use crate::error::{Error, Result};
use crate::recurrence::{BivariatePoly, Monomial, QRecurrence};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MonomialJson {
    dx: u32,
    dy: u32,
    c: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecurrenceJson {
    order: usize,
    coeffs: Vec<Vec<MonomialJson>>,
    initials: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryJson {
    num: Vec<MonomialJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    den: Option<Vec<MonomialJson>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum SystemJson {
    Matrix { nu: usize, entries: Vec<EntryJson> },
    Equation { equation: Vec<Vec<MonomialJson>> },
}

/// An integer or `a/b` with `b != 0`, optionally signed.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |msg: &str| Error::parse(format!("rational {s:?}"), msg);
    let int = |t: &str| -> Result<BigInt> {
        let t = t.trim();
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad("expected decimal digits"));
        }
        BigInt::from_str(t).map_err(|e| bad(&e.to_string()))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(int(s)?)),
        Some((n, d)) => {
            let d = int(d)?;
            if d.is_zero() {
                return Err(bad("zero denominator"));
            }
            Ok(BigRational::new(int(n)?, d))
        }
    }
}

/// Canonical text of a rational: `n` or `n/d`.
pub fn format_rational(v: &BigRational) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Comma-separated unsigned integers.
pub fn parse_indices(s: &str) -> Result<Vec<u64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .enumerate()
        .map(|(i, t)| {
            t.trim().parse::<u64>().map_err(|e| Error::parse(format!("index list entry {}", i + 1), format!("{:?}: {e}", t.trim())))
        })
        .collect()
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::parse(format!("{what} line {} column {}", e.line(), e.column()), e.to_string())
}

fn poly_from_json(terms: &[MonomialJson], field: &str) -> Result<BivariatePoly> {
    let terms = terms
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let c = parse_rational(&m.c).map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(format!("{field}[{k}].c"), message),
                other => other,
            })?;
            Ok(Monomial::new(m.dx, m.dy, c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BivariatePoly::new(terms))
}

fn poly_to_json(p: &BivariatePoly) -> Vec<MonomialJson> {
    p.terms().iter().map(|m| MonomialJson { dx: m.dx, dy: m.dy, c: format_rational(&m.c) }).collect()
}

pub fn parse_recurrence(text: &str) -> Result<QRecurrence> {
    let raw: RecurrenceJson = serde_json::from_str(text).map_err(|e| json_error("recurrence file", e))?;
    let coeffs = raw.coeffs.iter().enumerate().map(|(j, c)| poly_from_json(c, &format!("coeffs[{j}]"))).collect::<Result<Vec<_>>>()?;
    let initials = raw
        .initials
        .iter()
        .enumerate()
        .map(|(k, v)| {
            parse_rational(v).map_err(|e| match e {
                Error::Parse { message, .. } => Error::parse(format!("initials[{k}]"), message),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    QRecurrence::new(raw.order, coeffs, initials)
}

pub fn recurrence_to_json(rec: &QRecurrence) -> String {
    let raw = RecurrenceJson {
        order: rec.order(),
        coeffs: rec.coeffs().iter().map(poly_to_json).collect(),
        initials: rec.initials().iter().map(format_rational).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}

pub fn parse_system(text: &str) -> Result<QDifferenceSystem> {
    let raw: SystemJson = serde_json::from_str(text).map_err(|e| json_error("system file", e))?;
    match raw {
        SystemJson::Matrix { nu, entries } => {
            let entries = entries
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    let num = poly_from_json(&e.num, &format!("entries[{k}].num"))?;
                    Ok(match &e.den {
                        Some(d) => RationalEntry { num, den: poly_from_json(d, &format!("entries[{k}].den"))? },
                        None => RationalEntry::polynomial(num),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            QDifferenceSystem::new(nu, entries)
        }
        SystemJson::Equation { equation } => {
            let a = equation.iter().enumerate().map(|(j, c)| poly_from_json(c, &format!("equation[{j}]"))).collect::<Result<Vec<_>>>()?;
            QDifferenceSystem::from_scalar_equation(a)
        }
    }
}

pub fn system_to_json(sys: &QDifferenceSystem) -> String {
    let raw = SystemJson::Matrix {
        nu: sys.nu(),
        entries: sys.entries().iter().map(|e| EntryJson { num: poly_to_json(&e.num), den: Some(poly_to_json(&e.den)) }).collect(),
    };
    serde_json::to_string_pretty(&raw).expect("plain data serializes")
}
