use std::fmt::Write;

use num_traits::{One, Signed};

use crate::expr::{Expr, Monomial};

fn write_monomial(out: &mut String, m: &Monomial) {
    for (k, (v, e)) in m.factors().iter().enumerate() {
        if k > 0 {
            out.push('*');
        }
        write!(out, "{v}").unwrap();
        if *e > 1 {
            write!(out, "^{e}").unwrap();
        }
    }
}

/// Canonical rendering: terms in ascending monomial order, ` + ` / ` - `
/// separators, unit coefficients omitted.
pub fn print_expr(f: &Expr) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in f.terms().enumerate() {
        let neg = c.is_negative();
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let a = c.abs();
        if m.is_one() {
            write!(out, "{a}").unwrap();
        } else {
            if !a.is_one() {
                write!(out, "{a}*").unwrap();
            }
            write_monomial(&mut out, m);
        }
    }
    out
}
