use std::collections::BTreeMap;

use super::parse::Parser;
use super::print_expr;
use super::SourceSpan;
use crate::constraints::Setting;
use crate::error::{Error, Result};
use crate::evolutionary::Characteristic;
use crate::expr::Expr;
use crate::reducedcomplex::{ChiKey, ChiTuple};
use crate::variational::{Cotuple, CurrentTuple};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TupleShape {
    /// `f1 .. fm, f`
    Characteristic,
    /// `j1 .. jm`
    Current,
    /// `d1 .. dm, dp`
    Cotuple,
    /// `chi01, chi[a,i1], chi[i1]`
    ChiCe,
    /// `chi01, chi[a,i1], chi0, chi1`
    ChiCpe,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tuple {
    Characteristic(Characteristic),
    Current(CurrentTuple),
    Cotuple(Cotuple),
    Chi(ChiTuple),
}

/// `name: expr; name: expr; ...` with optional trailing `;`.
fn parse_named(text: &str, dim: usize) -> Result<Vec<(String, SourceSpan, Expr)>> {
    let mut p = Parser::new(text, dim);
    let mut out: Vec<(String, SourceSpan, Expr)> = Vec::new();
    loop {
        p.skip_ws();
        if p.at_end() {
            break;
        }
        let start = p.pos;
        let bytes = text.as_bytes();
        while p.pos < bytes.len() && bytes[p.pos] != b':' && bytes[p.pos] != b';' {
            p.pos += 1;
        }
        let name: String = text[start..p.pos].chars().filter(|c| !c.is_whitespace()).collect();
        let span = SourceSpan::new(start, p.pos);
        if name.is_empty() {
            return Err(p.error_here("expected a component name"));
        }
        p.expect(b':')?;
        let e = p.expr()?;
        if out.iter().any(|(n, _, _)| *n == name) {
            return Err(Error::DuplicateComponent(name));
        }
        out.push((name, span, e));
        if !p.eat(b';') {
            p.skip_ws();
            if !p.at_end() {
                return Err(p.error_here("expected `;` between components"));
            }
            break;
        }
    }
    Ok(out)
}

fn numbered(name: &str, prefix: &str, dim: usize) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    if rest.starts_with('0') {
        return None;
    }
    let k: usize = rest.parse().ok()?;
    (1..=dim).contains(&k).then_some(k)
}

fn chi_key(name: &str, setting: Setting, dim: usize) -> Option<ChiKey> {
    if name == "chi01" {
        return Some(ChiKey::Chi01);
    }
    if setting == Setting::Cpe {
        match name {
            "chi0" => return Some(ChiKey::Pressure(0)),
            "chi1" => return Some(ChiKey::Pressure(1)),
            _ => {}
        }
    }
    let inner = name.strip_prefix("chi[")?.strip_suffix(']')?;
    let parts: Vec<&str> = inner.split(',').collect();
    let num = |s: &str| -> Option<u32> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
            return None;
        }
        s.parse().ok()
    };
    match parts.as_slice() {
        [a, i1] => {
            let alpha = num(a)?;
            (alpha >= 2 && alpha as usize <= dim).then_some(ChiKey::Alpha { i1: num(i1)?, alpha })
        }
        [i1] if setting == Setting::Ce => Some(ChiKey::Pressure(num(i1)?)),
        _ => None,
    }
}

/// Parse named components into a tuple of the requested shape; missing
/// components are zero.
pub fn parse_tuple(text: &str, shape: TupleShape, dim: usize) -> Result<Tuple> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let named = parse_named(text, dim)?;
    let unknown = |n: &str| Error::UnknownComponent(n.to_string());
    match shape {
        TupleShape::Characteristic | TupleShape::Cotuple => {
            let (prefix, scalar) = match shape {
                TupleShape::Characteristic => ("f", "f"),
                _ => ("d", "dp"),
            };
            let mut velocity = vec![Expr::zero(); dim];
            let mut pressure = Expr::zero();
            for (n, _, e) in named {
                if n == scalar {
                    pressure = e;
                } else if let Some(k) = numbered(&n, prefix, dim) {
                    velocity[k - 1] = e;
                } else {
                    return Err(unknown(&n));
                }
            }
            Ok(match shape {
                TupleShape::Characteristic => Tuple::Characteristic(Characteristic::new(velocity, pressure)),
                _ => Tuple::Cotuple(Cotuple::new(velocity, pressure)),
            })
        }
        TupleShape::Current => {
            let mut components = vec![Expr::zero(); dim];
            for (n, _, e) in named {
                let k = numbered(&n, "j", dim).ok_or_else(|| unknown(&n))?;
                components[k - 1] = e;
            }
            Ok(Tuple::Current(CurrentTuple { components }))
        }
        TupleShape::ChiCe | TupleShape::ChiCpe => {
            let setting = if shape == TupleShape::ChiCe { Setting::Ce } else { Setting::Cpe };
            let mut chi = ChiTuple::new(setting, dim)?;
            let mut seen = BTreeMap::new();
            for (n, _, e) in named {
                let key = chi_key(&n, setting, dim).ok_or_else(|| unknown(&n))?;
                // `chi[2,0]` and `chi[2, 0]` name the same slot
                if seen.insert(key, ()).is_some() {
                    return Err(Error::DuplicateComponent(n));
                }
                chi.set(key, e)?;
            }
            Ok(Tuple::Chi(chi))
        }
    }
}

fn expect_shape<T>(t: Tuple, pick: impl FnOnce(Tuple) -> Option<T>) -> T {
    pick(t).expect("parse_tuple returns the requested shape")
}

pub fn parse_characteristic(text: &str, dim: usize) -> Result<Characteristic> {
    let t = parse_tuple(text, TupleShape::Characteristic, dim)?;
    Ok(expect_shape(t, |t| match t {
        Tuple::Characteristic(c) => Some(c),
        _ => None,
    }))
}

pub fn parse_current(text: &str, dim: usize) -> Result<CurrentTuple> {
    let t = parse_tuple(text, TupleShape::Current, dim)?;
    Ok(expect_shape(t, |t| match t {
        Tuple::Current(c) => Some(c),
        _ => None,
    }))
}

pub fn parse_cotuple(text: &str, dim: usize) -> Result<Cotuple> {
    let t = parse_tuple(text, TupleShape::Cotuple, dim)?;
    Ok(expect_shape(t, |t| match t {
        Tuple::Cotuple(c) => Some(c),
        _ => None,
    }))
}

pub fn parse_chi(text: &str, setting: Setting, dim: usize) -> Result<ChiTuple> {
    let shape = match setting {
        Setting::Ce => TupleShape::ChiCe,
        Setting::Cpe => TupleShape::ChiCpe,
        Setting::Free => return Err(Error::ShapeMismatch("chi-tuples need the ce or cpe setting".into())),
    };
    let t = parse_tuple(text, shape, dim)?;
    Ok(expect_shape(t, |t| match t {
        Tuple::Chi(c) => Some(c),
        _ => None,
    }))
}

fn join(parts: impl IntoIterator<Item = (String, String)>) -> String {
    parts
        .into_iter()
        .map(|(n, e)| format!("{n}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn print_characteristic(f: &Characteristic) -> String {
    let parts = f
        .velocity
        .iter()
        .enumerate()
        .map(|(k, e)| (format!("f{}", k + 1), print_expr(e)))
        .chain(std::iter::once(("f".to_string(), print_expr(&f.pressure))));
    join(parts)
}

pub fn print_current(j: &CurrentTuple) -> String {
    join(
        j.components
            .iter()
            .enumerate()
            .map(|(k, e)| (format!("j{}", k + 1), print_expr(e))),
    )
}

pub fn print_cotuple(c: &Cotuple) -> String {
    let parts = c
        .velocity
        .iter()
        .enumerate()
        .map(|(k, e)| (format!("d{}", k + 1), print_expr(e)))
        .chain(std::iter::once(("dp".to_string(), print_expr(&c.pressure))));
    join(parts)
}

/// Nonzero components only; the zero tuple prints as `chi01: 0`.
pub fn print_chi(chi: &ChiTuple) -> String {
    if chi.is_zero() {
        return "chi01: 0".to_string();
    }
    join(
        chi.components()
            .iter()
            .map(|(k, e)| (k.name(chi.setting()), print_expr(e))),
    )
}

pub fn print_tuple(t: &Tuple) -> String {
    match t {
        Tuple::Characteristic(f) => print_characteristic(f),
        Tuple::Current(j) => print_current(j),
        Tuple::Cotuple(c) => print_cotuple(c),
        Tuple::Chi(c) => print_chi(c),
    }
}
