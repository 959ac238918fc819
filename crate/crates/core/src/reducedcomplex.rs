//! The reduced operator `D~_1 = D_1 + f*` on chi-tuples in the CE and CPE
//! settings, the equivalent reduced system, and bounded kernel search.
//!
//! A chi-tuple is indexed like the transverse variational derivative: the
//! `u^1` slot at `i^1 = 0` (`chi01`), the `u^a` slots at every `i^1`
//! (`chi[a,i1]`), and the pressure slots at every `i^1` (CE) or at `i^1` in
//! `{0, 1}` only (CPE, where `p_i` with `i^1 > 1` is eliminated).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::constraints::{ReductionContext, Setting};
use crate::error::{Error, Result};
use crate::expr::{int, Expr, Monomial, Rational, Var};
use crate::linalg::Echelon;
use crate::multiindex::MultiIndex;
use crate::report::Report;
use crate::totalderiv::Laplacian;
use crate::variational::variational_derivative;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ChiKey {
    /// `chi^0_1`
    Chi01,
    /// `chi^{i1}_alpha`, `alpha` in `2..=m`
    Alpha { i1: u32, alpha: u32 },
    /// `chi^{i1}`; on CPE only `i1` in `{0, 1}`
    Pressure(u32),
}

impl ChiKey {
    /// Name in the tuple grammar.
    pub fn name(&self, setting: Setting) -> String {
        match (self, setting) {
            (ChiKey::Chi01, _) => "chi01".to_string(),
            (ChiKey::Alpha { i1, alpha }, _) => format!("chi[{alpha},{i1}]"),
            (ChiKey::Pressure(i1), Setting::Cpe) => format!("chi{i1}"),
            (ChiKey::Pressure(i1), _) => format!("chi[{i1}]"),
        }
    }

    /// The jet variable whose transverse variational derivative this slot
    /// holds.
    pub fn var(&self, dim: usize) -> Var {
        let at = |i1: u32| {
            let mut e = vec![0; dim];
            e[0] = i1;
            MultiIndex::new(e)
        };
        match *self {
            ChiKey::Chi01 => Var::U(1, at(0)),
            ChiKey::Alpha { i1, alpha } => Var::U(alpha, at(i1)),
            ChiKey::Pressure(i1) => Var::P(at(i1)),
        }
    }

    fn of_var(v: &Var) -> Option<ChiKey> {
        let i1 = v.index()?.get(1);
        match v {
            Var::U(1, _) if i1 == 0 => Some(ChiKey::Chi01),
            Var::U(1, _) => None,
            Var::U(alpha, _) => Some(ChiKey::Alpha { i1, alpha: *alpha }),
            Var::P(_) => Some(ChiKey::Pressure(i1)),
            _ => None,
        }
    }

    fn valid(&self, setting: Setting, dim: usize) -> bool {
        match *self {
            ChiKey::Chi01 => true,
            ChiKey::Alpha { alpha, .. } => alpha >= 2 && alpha as usize <= dim,
            ChiKey::Pressure(i1) => setting == Setting::Ce || i1 <= 1,
        }
    }
}

/// Finitely supported chi-tuple; absent components are zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChiTuple {
    setting: Setting,
    dim: usize,
    components: BTreeMap<ChiKey, Expr>,
}

impl ChiTuple {
    pub fn new(setting: Setting, dim: usize) -> Result<Self> {
        if setting == Setting::Free {
            return Err(Error::ShapeMismatch("chi-tuples need the ce or cpe setting".into()));
        }
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(ChiTuple {
            setting,
            dim,
            components: BTreeMap::new(),
        })
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, key: ChiKey, value: Expr) -> Result<()> {
        if !key.valid(self.setting, self.dim) {
            return Err(Error::UnknownComponent(key.name(self.setting)));
        }
        if value.is_zero() {
            self.components.remove(&key);
        } else {
            self.components.insert(key, value);
        }
        Ok(())
    }

    pub fn with(mut self, key: ChiKey, value: Expr) -> Result<Self> {
        self.set(key, value)?;
        Ok(self)
    }

    pub fn get(&self, key: &ChiKey) -> Expr {
        self.components.get(key).cloned().unwrap_or_default()
    }

    /// Nonzero components in key order.
    pub fn components(&self) -> &BTreeMap<ChiKey, Expr> {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    fn add(&mut self, key: ChiKey, value: &Expr) {
        if value.is_zero() {
            return;
        }
        let e = self.components.entry(key).or_default();
        *e += value;
        if e.is_zero() {
            self.components.remove(&key);
        }
    }

    pub fn scale(&self, c: &Rational) -> ChiTuple {
        let mut out = ChiTuple { components: BTreeMap::new(), ..*self };
        for (k, v) in &self.components {
            out.add(*k, &v.scale(c));
        }
        out
    }

    pub fn add_tuple(&self, other: &ChiTuple) -> ChiTuple {
        let mut out = self.clone();
        for (k, v) in &other.components {
            out.add(*k, v);
        }
        out
    }

    pub fn sub_tuple(&self, other: &ChiTuple) -> ChiTuple {
        self.add_tuple(&other.scale(&int(-1)))
    }

    fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> ChiTuple {
        let mut out = ChiTuple { components: BTreeMap::new(), ..*self };
        for (k, v) in &self.components {
            out.add(*k, &f(v));
        }
        out
    }
}

fn context_for(setting: Setting, dim: usize) -> Result<ReductionContext> {
    ReductionContext::new(setting, dim)
}

fn check_ctx(ctx: &ReductionContext, chi: &ChiTuple) -> Result<()> {
    if ctx.dim() != chi.dim {
        return Err(Error::DimensionMismatch {
            expected: ctx.dim(),
            found: chi.dim,
        });
    }
    if ctx.setting() != chi.setting {
        return Err(Error::ShapeMismatch(format!(
            "{} tuple in {} context",
            chi.setting,
            ctx.setting()
        )));
    }
    Ok(())
}

fn uvar(dim: usize, mu: usize, dir: usize) -> Expr {
    Expr::var(Var::U(mu as u32, MultiIndex::unit(dim, dir)))
}

/// The index-shift and `chi01` terms shared by both settings.
fn fstar_common(ctx: &ReductionContext, chi: &ChiTuple, out: &mut ChiTuple) {
    let dim = chi.dim;
    for (key, v) in &chi.components {
        match *key {
            ChiKey::Chi01 => {
                for alpha in 2..=dim {
                    let d = ctx.restricted_derivative_unchecked(alpha, v);
                    out.add(ChiKey::Alpha { i1: 0, alpha: alpha as u32 }, &d);
                }
            }
            ChiKey::Alpha { i1, alpha } => out.add(ChiKey::Alpha { i1: i1 + 1, alpha }, v),
            ChiKey::Pressure(i1) if chi.setting == Setting::Ce || i1 == 0 => {
                out.add(ChiKey::Pressure(i1 + 1), v)
            }
            ChiKey::Pressure(_) => {}
        }
    }
}

/// `f*` on CE: `(f*chi)01 = 0`, `(f*chi)^{i1}_a = [i1 = 0] D_a chi01 +
/// chi^{i1-1}_a`, `(f*chi)^{i1} = chi^{i1-1}`.
pub fn fstar_ce(chi: &ChiTuple) -> Result<ChiTuple> {
    let ctx = context_for(Setting::Ce, chi.dim)?;
    fstar_with(&ctx, chi)
}

/// `f*` on CPE: the CE terms (pressure shift from `chi0` only) plus the
/// `chi1` contributions
/// `(f*chi)01 += 2 D_a(u^a_(1) chi1)`,
/// `(f*chi)^0_a += 2 D_a(u^b_(b) chi1) + 2 D_b(u^b_(a) chi1)`,
/// `(f*chi)^1_a -= 2 u^1_(a) chi1`, `(f*chi)0 = -Lap' chi1`.
pub fn fstar_cpe(chi: &ChiTuple) -> Result<ChiTuple> {
    let ctx = context_for(Setting::Cpe, chi.dim)?;
    fstar_with(&ctx, chi)
}

/// `f*` for the setting of `ctx`.
pub fn fstar_with(ctx: &ReductionContext, chi: &ChiTuple) -> Result<ChiTuple> {
    check_ctx(ctx, chi)?;
    let dim = chi.dim;
    let chi = chi.map(|e| ctx.reduce(e));
    let mut out = ChiTuple { components: BTreeMap::new(), ..chi };
    fstar_common(ctx, &chi, &mut out);
    if chi.setting == Setting::Cpe {
        let c1 = chi.get(&ChiKey::Pressure(1));
        if !c1.is_zero() {
            let d = |mu: usize, e: &Expr| ctx.restricted_derivative_unchecked(mu, e);
            let two = int(2);
            let c01: Expr = (2..=dim).map(|a| d(a, &(uvar(dim, a, 1) * &c1))).sum();
            out.add(ChiKey::Chi01, &c01.scale(&two));
            let trace: Expr = (2..=dim).map(|b| uvar(dim, b, b)).sum();
            let trace_c1 = &trace * &c1;
            for a in 2..=dim {
                let mut acc = d(a, &trace_c1);
                for b in 2..=dim {
                    acc += d(b, &(uvar(dim, b, a) * &c1));
                }
                out.add(ChiKey::Alpha { i1: 0, alpha: a as u32 }, &acc.scale(&two));
                out.add(
                    ChiKey::Alpha { i1: 1, alpha: a as u32 },
                    &(uvar(dim, 1, a) * &c1).scale(&int(-2)),
                );
            }
            out.add(ChiKey::Pressure(0), &-ctx.restricted_laplacian(Laplacian::Primed, &c1));
        }
    }
    Ok(out.map(|e| ctx.reduce(e)))
}

/// `D~_1 chi`: componentwise restricted `D_1` plus `f*`.
pub fn dtilde1(ctx: &ReductionContext, chi: &ChiTuple) -> Result<ChiTuple> {
    let fs = fstar_with(ctx, chi)?;
    let d1 = chi.map(|e| ctx.restricted_derivative_unchecked(1, &ctx.reduce(e)));
    Ok(d1.add_tuple(&fs).map(|e| ctx.reduce(e)))
}

/// Transverse variational derivative (directions `2..=m`) of a Lagrangian in
/// the coordinates of `ctx`, as a chi-tuple.
pub fn theta_variational(ctx: &ReductionContext, l: &Expr) -> Result<ChiTuple> {
    let dim = ctx.dim();
    let l = ctx.reduce(l);
    let dirs: Vec<usize> = (2..=dim).collect();
    let mut out = ChiTuple::new(ctx.setting(), dim)?;
    for (v, e) in variational_derivative(&l, &dirs) {
        let key = ChiKey::of_var(&v)
            .filter(|k| k.valid(ctx.setting(), dim))
            .ok_or_else(|| Error::ShapeMismatch(format!("{v} is not a coordinate")))?;
        out.add(key, &ctx.reduce(&e));
    }
    Ok(out)
}

/// Residuals of the reduced system equivalent to `D~_1 chi = 0`.
///
/// CPE: `chi^0_a - 2 u^1_(a) chi1`, `chi^{i1}_a` (`i1 >= 1`),
/// `chi0 + D_1 chi1`, `Lap chi1`,
/// `(u^mu_(1) D_mu D_a - u^mu_(a) D_mu D_1) chi1`,
/// `D_1 chi01 + 2 D_a(u^a_(1) chi1)`,
/// `D_a chi01 + 2 (u^mu_(a) D_mu chi1 + D_a(u^b_(b) chi1))`.
///
/// CE: `D_mu chi01` for every direction and every other component.
pub fn reduced_system_residuals(ctx: &ReductionContext, chi: &ChiTuple) -> Result<Report> {
    check_ctx(ctx, chi)?;
    let dim = chi.dim;
    let chi = chi.map(|e| ctx.reduce(e));
    let d = |mu: usize, e: &Expr| ctx.restricted_derivative_unchecked(mu, e);
    let mut report = Report::new();
    let c01 = chi.get(&ChiKey::Chi01);

    // components forced to vanish: every alpha slot beyond i1 = 0 (CPE) or at
    // all (CE), plus the CE pressure slots
    let mut forced: BTreeSet<ChiKey> = chi
        .components
        .keys()
        .filter(|k| match k {
            ChiKey::Chi01 => false,
            ChiKey::Alpha { i1, .. } => chi.setting == Setting::Ce || *i1 >= 1,
            ChiKey::Pressure(_) => chi.setting == Setting::Ce,
        })
        .copied()
        .collect();
    if chi.setting == Setting::Ce {
        for mu in 1..=dim {
            report.push(format!("D{mu} chi01"), ctx.reduce(&d(mu, &c01)));
        }
        for a in 2..=dim {
            forced.insert(ChiKey::Alpha { i1: 0, alpha: a as u32 });
        }
        forced.insert(ChiKey::Pressure(0));
        for k in forced {
            report.push(k.name(chi.setting), chi.get(&k));
        }
        return Ok(report);
    }

    let c0 = chi.get(&ChiKey::Pressure(0));
    let c1 = chi.get(&ChiKey::Pressure(1));
    for a in 2..=dim {
        let k = ChiKey::Alpha { i1: 0, alpha: a as u32 };
        let r = chi.get(&k) - (uvar(dim, 1, a) * &c1).scale(&int(2));
        report.push(format!("{} - 2 u1_(e{a}) chi1", k.name(Setting::Cpe)), ctx.reduce(&r));
    }
    for a in 2..=dim {
        forced.insert(ChiKey::Alpha { i1: 1, alpha: a as u32 });
    }
    for k in forced {
        report.push(k.name(Setting::Cpe), chi.get(&k));
    }
    let d1c1 = d(1, &c1);
    report.push("chi0 + D1 chi1", ctx.reduce(&(&c0 + &d1c1)));
    report.push(
        "Lap chi1",
        ctx.reduce(&ctx.restricted_laplacian(Laplacian::Full, &c1)),
    );
    let grad: Vec<Expr> = (1..=dim).map(|mu| d(mu, &c1)).collect();
    for a in 2..=dim {
        let mut acc = Expr::zero();
        for mu in 1..=dim {
            acc += uvar(dim, mu, 1) * d(mu, &grad[a - 1]);
            acc -= uvar(dim, mu, a) * d(mu, &d1c1);
        }
        report.push(format!("compatibility {a}"), ctx.reduce(&acc));
    }
    let flux: Expr = (2..=dim).map(|a| d(a, &(uvar(dim, a, 1) * &c1))).sum();
    report.push(
        "D1 chi01 + 2 D_a(u^a_(1) chi1)",
        ctx.reduce(&(d(1, &c01) + flux.scale(&int(2)))),
    );
    let trace: Expr = (2..=dim).map(|b| uvar(dim, b, b)).sum();
    let trace_c1 = &trace * &c1;
    for a in 2..=dim {
        let mut acc = d(a, &trace_c1);
        for mu in 1..=dim {
            acc += uvar(dim, mu, a) * &grad[mu - 1];
        }
        let r = d(a, &c01) + acc.scale(&int(2));
        report.push(format!("D{a} chi01 + 2 (u^mu_(e{a}) D_mu chi1 + D{a}(u^b_(b) chi1))"), ctx.reduce(&r));
    }
    Ok(report)
}

/// Search-space truncation for [`kernel_search`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AnsatzSpec {
    /// Maximal jet order of coordinates, also the largest `i1` slot.
    pub max_order: u32,
    /// Maximal degree in jet coordinates.
    pub max_degree: u32,
    /// Maximal degree in `x`.
    pub max_x_degree: u32,
    /// Allow a factor `t`.
    pub include_t: bool,
}

impl AnsatzSpec {
    pub fn new(max_order: u32, max_degree: u32, max_x_degree: u32) -> Self {
        AnsatzSpec {
            max_order,
            max_degree,
            max_x_degree,
            include_t: false,
        }
    }
}

fn monomials_upto(vars: &[Var], max_degree: u32) -> Vec<Monomial> {
    fn rec(vars: &[Var], budget: u32, cur: &mut Vec<(Var, u32)>, out: &mut Vec<Monomial>) {
        let Some((v, rest)) = vars.split_first() else {
            out.push(Monomial::from_factors(cur.iter().cloned()));
            return;
        };
        for e in 0..=budget {
            if e > 0 {
                cur.push((v.clone(), e));
            }
            rec(rest, budget - e, cur, out);
            if e > 0 {
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(vars, max_degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// The ansatz: components and monomials.
#[derive(Clone, Debug)]
pub struct Ansatz {
    pub components: Vec<ChiKey>,
    pub monomials: Vec<Monomial>,
}

impl Ansatz {
    pub fn build(ctx: &ReductionContext, spec: &AnsatzSpec) -> Ansatz {
        let dim = ctx.dim();
        let mut components = vec![ChiKey::Chi01];
        for i1 in 0..=spec.max_order {
            for alpha in 2..=dim as u32 {
                components.push(ChiKey::Alpha { i1, alpha });
            }
        }
        match ctx.setting() {
            Setting::Cpe => components.extend([ChiKey::Pressure(0), ChiKey::Pressure(1)]),
            _ => components.extend((0..=spec.max_order).map(ChiKey::Pressure)),
        }
        components.sort();

        let mut jet = Vec::new();
        for i in MultiIndex::all_up_to(dim, spec.max_order) {
            for mu in 1..=dim as u32 {
                jet.push(Var::U(mu, i.clone()));
            }
            jet.push(Var::P(i));
        }
        jet.retain(|v| ctx.is_coordinate(v));
        let xs: Vec<Var> = (1..=dim as u32).map(Var::X).collect();
        let jm = monomials_upto(&jet, spec.max_degree);
        let xm = monomials_upto(&xs, spec.max_x_degree);
        let mut monomials = Vec::new();
        for a in &jm {
            for b in &xm {
                let m = a.mul(b);
                if spec.include_t {
                    monomials.push(m.mul(&Monomial::var(Var::T)));
                }
                monomials.push(m);
            }
        }
        monomials.sort();
        Ansatz { components, monomials }
    }

    pub fn unknowns(&self) -> usize {
        self.components.len() * self.monomials.len()
    }

    fn unit(&self, ctx: &ReductionContext, col: usize) -> ChiTuple {
        let n = self.monomials.len();
        let key = self.components[col / n];
        let m = self.monomials[col % n].clone();
        let mut chi = ChiTuple::new(ctx.setting(), ctx.dim()).expect("constrained setting");
        chi.add(key, &Expr::term(Rational::from_integer(1.into()), m));
        chi
    }

    /// The tuple with the given coefficient vector.
    pub fn assemble(&self, ctx: &ReductionContext, coeffs: &[Rational]) -> ChiTuple {
        let n = self.monomials.len();
        let mut chi = ChiTuple::new(ctx.setting(), ctx.dim()).expect("constrained setting");
        for (col, c) in coeffs.iter().enumerate() {
            if !num_traits::Zero::is_zero(c) {
                let key = self.components[col / n];
                chi.add(key, &Expr::term(c.clone(), self.monomials[col % n].clone()));
            }
        }
        chi
    }

    /// Nullspace of a linear map on the ansatz whose image is a list of
    /// labelled expressions; every monomial coefficient of every label is a
    /// row.
    pub fn nullspace<F>(&self, ctx: &ReductionContext, op: F) -> Vec<ChiTuple>
    where
        F: Fn(&ChiTuple) -> Vec<(String, Expr)> + Sync,
    {
        let images: Vec<Vec<(String, Expr)>> = (0..self.unknowns())
            .into_par_iter()
            .map(|col| op(&self.unit(ctx, col)))
            .collect();
        let mut rows: BTreeMap<(String, Monomial), Vec<(usize, Rational)>> = BTreeMap::new();
        for (col, image) in images.into_iter().enumerate() {
            for (label, e) in image {
                for (m, c) in e.terms() {
                    rows.entry((label.clone(), m.clone()))
                        .or_default()
                        .push((col, c.clone()));
                }
            }
        }
        let mut ech = Echelon::new(self.unknowns());
        for row in rows.values() {
            ech.push(row);
        }
        ech.nullspace()
            .into_iter()
            .map(|v| self.assemble(ctx, &v))
            .collect()
    }
}

/// Default cap on the number of unknowns.
pub const DEFAULT_UNKNOWN_CAP: usize = 20_000;

/// Exact basis of `ker D~_1` within the ansatz, ordered by free column.
pub fn kernel_search(ctx: &Arc<ReductionContext>, spec: &AnsatzSpec, cap: usize) -> Result<Vec<ChiTuple>> {
    if ctx.setting() == Setting::Free {
        return Err(Error::ShapeMismatch("kernel search needs the ce or cpe setting".into()));
    }
    let ansatz = Ansatz::build(ctx, spec);
    let required = ansatz.unknowns();
    if required > cap {
        return Err(Error::AnsatzTooLarge { required, cap });
    }
    Ok(ansatz.nullspace(ctx, |chi| {
        let out = dtilde1(ctx, chi).expect("ansatz tuples match the context");
        out.components
            .into_iter()
            .map(|(k, v)| (k.name(ctx.setting()), v))
            .collect()
    }))
}
