//! Seeded random expressions for the integration tests.
#![allow(dead_code)]

use jetcalc_core::expr::{rat, Expr, Monomial, Var};
use jetcalc_core::MultiIndex;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub dim: usize,
    pub u_order: u32,
    pub p_order: u32,
    pub terms: usize,
    pub degree: u32,
    /// Allow `x`, `nu`, `t` factors.
    pub parameters: bool,
}

impl Shape {
    pub fn new(dim: usize, u_order: u32, p_order: u32) -> Self {
        Shape {
            dim,
            u_order,
            p_order,
            terms: 4,
            degree: 3,
            parameters: true,
        }
    }
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn index(&mut self, dim: usize, order: u32) -> MultiIndex {
        let target = self.rng.gen_range(0..=order);
        let mut e = vec![0u32; dim];
        // direction 1 is favoured so that constraint eliminations are exercised
        for _ in 0..target {
            let k = if self.rng.gen_bool(0.4) { 0 } else { self.rng.gen_range(0..dim) };
            e[k] += 1;
        }
        MultiIndex::new(e)
    }

    pub fn var(&mut self, s: &Shape) -> Var {
        let kinds: &[u8] = if s.parameters { &[0, 0, 0, 0, 1, 1, 2, 3, 4] } else { &[0, 0, 0, 1] };
        match *kinds.choose(&mut self.rng).unwrap() {
            0 => Var::U(self.rng.gen_range(1..=s.dim as u32), self.index(s.dim, s.u_order)),
            1 => Var::P(self.index(s.dim, s.p_order)),
            2 => Var::X(self.rng.gen_range(1..=s.dim as u32)),
            3 => Var::Nu,
            _ => Var::T,
        }
    }

    pub fn coefficient(&mut self) -> jetcalc_core::Rational {
        let n = self.rng.gen_range(-6i64..=6);
        let n = if n == 0 { 1 } else { n };
        rat(n, self.rng.gen_range(1..=4))
    }

    pub fn monomial(&mut self, s: &Shape) -> Monomial {
        let deg = self.rng.gen_range(0..=s.degree);
        Monomial::from_factors((0..deg).map(|_| (self.var(s), 1)).collect::<Vec<_>>())
    }

    pub fn expr(&mut self, s: &Shape) -> Expr {
        let n = self.rng.gen_range(1..=s.terms);
        let mut e = Expr::zero();
        for _ in 0..n {
            let c = self.coefficient();
            let m = self.monomial(s);
            e.add_term(m, c);
        }
        e
    }

    /// A nonzero expression.
    pub fn nonzero(&mut self, s: &Shape) -> Expr {
        loop {
            let e = self.expr(s);
            if !e.is_zero() {
                return e;
            }
        }
    }
}

use jetcalc_core::exprio::{self, TupleShape};
use jetcalc_core::reducedcomplex::{ChiKey, ChiTuple};
use jetcalc_core::{Characteristic, Cotuple, CurrentTuple, Setting};

/// One printed value of the I/O corpus.
#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub kind: &'static str,
    pub dim: usize,
    pub text: String,
}

fn shape_of(kind: &str) -> Option<TupleShape> {
    Some(match kind {
        "characteristic" => TupleShape::Characteristic,
        "current" => TupleShape::Current,
        "cotuple" => TupleShape::Cotuple,
        "chi_ce" => TupleShape::ChiCe,
        "chi_cpe" => TupleShape::ChiCpe,
        _ => return None,
    })
}

impl CorpusItem {
    /// Parse and print again.
    pub fn reprint(&self) -> Result<String, String> {
        match self.kind {
            "expr" => exprio::parse_expr(&self.text, self.dim)
                .map(|e| exprio::print_expr(&e))
                .map_err(|e| e.to_string()),
            "json" => {
                let v: serde_json::Value = serde_json::from_str(&self.text).map_err(|e| e.to_string())?;
                let e = exprio::expr_from_json(&v, self.dim).map_err(|e| e.to_string())?;
                Ok(serde_json::to_string(&exprio::expr_to_json(&e)).unwrap())
            }
            kind => exprio::parse_tuple(&self.text, shape_of(kind).unwrap(), self.dim)
                .map(|t| exprio::print_tuple(&t))
                .map_err(|e| e.to_string()),
        }
    }
}

/// Fifty values covering expressions, every tuple shape, and the structured
/// form.
pub fn corpus() -> Vec<CorpusItem> {
    let mut out = Vec::new();
    let mut g = Gen::new(0x5eed);
    let push = |out: &mut Vec<CorpusItem>, kind, dim, text: String| out.push(CorpusItem { kind, dim, text });

    let fixed = [
        Expr::zero(),
        Expr::one(),
        Expr::constant(rat(-7, 3)),
        Expr::u(2, [0, 0, 0]).pow(2).scale(&rat(-1, 2)),
        Expr::nu() * Expr::t() * Expr::x(3),
        -Expr::u(2, [0, 1, 0]) - Expr::u(3, [0, 0, 1]),
    ];
    for e in fixed {
        push(&mut out, "expr", 3, exprio::print_expr(&e));
    }
    let ns = jetcalc_core::ns::ns_build(3, jetcalc_core::ns::Viscosity::Symbolic).unwrap();
    for e in &ns.evolution {
        push(&mut out, "expr", 3, exprio::print_expr(e));
    }
    push(&mut out, "expr", 3, exprio::print_expr(&ns.pe0()));
    for k in 0..10 {
        let dim = 2 + k % 3;
        let e = g.expr(&Shape { terms: 5, ..Shape::new(dim, 3, 2) });
        push(&mut out, "expr", dim, exprio::print_expr(&e));
    }

    let s = Shape { terms: 2, ..Shape::new(3, 2, 2) };
    for _ in 0..6 {
        let f = Characteristic::new((0..3).map(|_| g.expr(&s)).collect(), g.expr(&s));
        push(&mut out, "characteristic", 3, exprio::print_characteristic(&f));
    }
    for _ in 0..5 {
        let j = CurrentTuple {
            components: (0..3).map(|_| g.expr(&s)).collect(),
        };
        push(&mut out, "current", 3, exprio::print_current(&j));
    }
    for _ in 0..5 {
        let c = Cotuple::new((0..2).map(|_| g.expr(&Shape { dim: 2, ..s })).collect(), g.expr(&Shape { dim: 2, ..s }));
        push(&mut out, "cotuple", 2, exprio::print_cotuple(&c));
    }
    for (kind, setting) in [("chi_ce", Setting::Ce), ("chi_cpe", Setting::Cpe)] {
        let ctx = jetcalc_core::ReductionContext::new(setting, 3).unwrap();
        for k in 0..5u32 {
            let mut chi = ChiTuple::new(setting, 3).unwrap();
            if k > 0 {
                chi.set(ChiKey::Chi01, ctx.reduce(&g.expr(&s))).unwrap();
                chi.set(ChiKey::Alpha { i1: k - 1, alpha: 2 + k % 2 }, ctx.reduce(&g.expr(&s))).unwrap();
                chi.set(ChiKey::Pressure(k % 2), ctx.reduce(&g.expr(&s))).unwrap();
            }
            push(&mut out, kind, 3, exprio::print_chi(&chi));
        }
    }
    for k in 0..4 {
        let e = g.expr(&Shape { terms: 3, ..Shape::new(3, 2, 2) });
        let e = if k == 0 { Expr::zero() } else { e };
        push(&mut out, "json", 3, serde_json::to_string(&exprio::expr_to_json(&e)).unwrap());
    }
    out
}

/// Corpus rendered one item per line.
pub fn corpus_listing(items: &[CorpusItem]) -> String {
    items
        .iter()
        .map(|c| format!("{} m={}: {}\n", c.kind, c.dim, c.text))
        .collect()
}

/// Compare against `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{} differs from the current output", path.display()))
    }
}
