//! Euler operator, Frechet linearization, formal adjoint, Helmholtz test,
//! and conserved-current divergence.

use std::collections::BTreeMap;

use crate::constraints::ReductionContext;
use crate::evolutionary::{Characteristic, DerivativeTable};
use crate::expr::{Expr, Rational, Var};
use crate::multiindex::MultiIndex;
use crate::totalderiv::total_derivative;

/// A velocity component `1..=m` or the pressure.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Slot {
    Velocity(u32),
    Pressure,
}

impl Slot {
    /// The slot a jet coordinate belongs to.
    pub fn of(v: &Var) -> Option<Slot> {
        match v {
            Var::U(mu, _) => Some(Slot::Velocity(*mu)),
            Var::P(_) => Some(Slot::Pressure),
            _ => None,
        }
    }

    pub fn var(self, i: MultiIndex) -> Var {
        match self {
            Slot::Velocity(mu) => Var::U(mu, i),
            Slot::Pressure => Var::P(i),
        }
    }

    pub fn all(dim: usize) -> impl Iterator<Item = Slot> {
        (1..=dim as u32)
            .map(Slot::Velocity)
            .chain(std::iter::once(Slot::Pressure))
    }
}

/// Cotuple `(chi_1, ..., chi_m; chi)`, e.g. a variational derivative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cotuple {
    pub velocity: Vec<Expr>,
    pub pressure: Expr,
}

impl Cotuple {
    pub fn new(velocity: Vec<Expr>, pressure: Expr) -> Self {
        Cotuple { velocity, pressure }
    }

    pub fn zero(dim: usize) -> Self {
        Cotuple::new(vec![Expr::zero(); dim], Expr::zero())
    }

    pub fn dim(&self) -> usize {
        self.velocity.len()
    }

    pub fn get(&self, slot: Slot) -> &Expr {
        match slot {
            Slot::Velocity(mu) => &self.velocity[mu as usize - 1],
            Slot::Pressure => &self.pressure,
        }
    }

    pub fn get_mut(&mut self, slot: Slot) -> &mut Expr {
        match slot {
            Slot::Velocity(mu) => &mut self.velocity[mu as usize - 1],
            Slot::Pressure => &mut self.pressure,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.velocity.iter().all(Expr::is_zero) && self.pressure.is_zero()
    }

    pub fn slots(&self) -> impl Iterator<Item = (Slot, &Expr)> {
        self.velocity
            .iter()
            .enumerate()
            .map(|(k, e)| (Slot::Velocity(k as u32 + 1), e))
            .chain(std::iter::once((Slot::Pressure, &self.pressure)))
    }
}

/// Current `J^mu d_mu x`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurrentTuple {
    pub components: Vec<Expr>,
}

/// Matrix of total-derivative operators: `g_a = sum c(a, b, k) D_k f^b`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct OperatorCoefficients {
    coeffs: BTreeMap<(Slot, Slot, MultiIndex), Expr>,
}

impl OperatorCoefficients {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, target: Slot, source: Slot, k: MultiIndex, c: &Expr) {
        if c.is_zero() {
            return;
        }
        let key = (target, source, k);
        let entry = self.coeffs.entry(key.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn get(&self, target: Slot, source: Slot, k: &MultiIndex) -> Expr {
        self.coeffs
            .get(&(target, source, k.clone()))
            .cloned()
            .unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Slot, Slot, MultiIndex), &Expr)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn sub(&self, other: &OperatorCoefficients) -> OperatorCoefficients {
        let mut out = self.clone();
        for ((a, b, k), c) in &other.coeffs {
            out.add(*a, *b, k.clone(), &-c);
        }
        out
    }

    /// Formal adjoint `(P^* h)_b = sum_a (-D)_n (c(a, b, n) h_a)`, expanded by
    /// the higher Leibniz rule.
    pub fn adjoint(&self) -> OperatorCoefficients {
        let mut out = OperatorCoefficients::new();
        for ((a, b, n), c) in &self.coeffs {
            let sign = if n.degree() % 2 == 0 { 1 } else { -1 };
            for k in n.sub_indices() {
                let l = n.checked_sub(&k).unwrap().unwrap();
                let binom = Rational::from_integer(n.binomial(&k).unwrap().into());
                let d = crate::totalderiv::total_derivative_multi(&l, c);
                out.add(*b, *a, k, &d.scale(&(binom * crate::expr::int(sign))));
            }
        }
        out
    }

    /// Apply to a characteristic with the derivatives of `ctx`.
    pub fn apply(&self, ctx: &ReductionContext, f: &Characteristic) -> Characteristic {
        let mut tables: BTreeMap<Slot, DerivativeTable> = Slot::all(f.dim())
            .map(|s| (s, DerivativeTable::new(ctx, ctx.reduce(f.get(s)))))
            .collect();
        let mut out = Characteristic::zero(f.dim());
        for ((a, b, k), c) in &self.coeffs {
            let d = tables.get_mut(b).unwrap().get(k);
            *out.get_mut(*a) += c * &d;
        }
        out.map(|e| ctx.reduce(e))
    }
}

/// Variational derivative with total derivatives restricted to `directions`.
///
/// Each jet coordinate `v = w_i` is split as `i = j + fixed` where `j` lives on
/// `directions`; the result is keyed by `w_fixed` and holds
/// `sum_j (-1)^{|j|} D_j dL/dv`. With all directions every key has the zero
/// index; with directions `2..=m` the keys carry the `i^1` label.
pub fn variational_derivative(l: &Expr, directions: &[usize]) -> BTreeMap<Var, Expr> {
    let mut out: BTreeMap<Var, Expr> = BTreeMap::new();
    for v in l.variables() {
        let Some(i) = v.index() else { continue };
        let mut fixed = i.clone();
        let mut j = MultiIndex::zero(i.dim());
        for &mu in directions {
            for _ in 0..i.get(mu) {
                fixed = fixed.lower(mu).unwrap();
                j = j.bump(mu);
            }
        }
        let mut term = l.partial(&v);
        for &mu in directions {
            for _ in 0..j.get(mu) {
                term = total_derivative(mu, &term);
            }
        }
        if j.degree() % 2 == 1 {
            term = -term;
        }
        *out.entry(v.with_index(fixed)).or_default() += term;
    }
    out.retain(|_, e| !e.is_zero());
    out
}

/// `delta_{u^mu} L = (-D)_i dL/du^mu_i`, `delta_p L = (-D)_i dL/dp_i`.
pub fn euler_operator(l: &Expr, dim: usize) -> Cotuple {
    let dirs: Vec<usize> = (1..=dim).collect();
    let mut out = Cotuple::zero(dim);
    for (v, e) in variational_derivative(l, &dirs) {
        *out.get_mut(Slot::of(&v).unwrap()) = e;
    }
    out
}

/// `chi_*`: coefficient of `D_k f^b` in slot `a` is `d chi_a / d w^b_k`.
pub fn frechet_linearization(chi: &Cotuple) -> OperatorCoefficients {
    let mut out = OperatorCoefficients::new();
    for (a, comp) in chi.slots() {
        for v in comp.variables() {
            if let Some(b) = Slot::of(&v) {
                out.add(a, b, v.index().unwrap().clone(), &comp.partial(&v));
            }
        }
    }
    out
}

/// `chi^*`: coefficient of `D_k f^b` in slot `a` is
/// `sum_l (-1)^{|k+l|} binom(k+l, k) D_l(d chi_b / d w^a_{k+l})`.
pub fn formal_adjoint(chi: &Cotuple) -> OperatorCoefficients {
    let mut out = OperatorCoefficients::new();
    for (b, comp) in chi.slots() {
        for v in comp.variables() {
            let Some(a) = Slot::of(&v) else { continue };
            let n = v.index().unwrap();
            let partial = comp.partial(&v);
            let sign = crate::expr::int(if n.degree() % 2 == 0 { 1 } else { -1 });
            for k in n.sub_indices() {
                let l = n.checked_sub(&k).unwrap().unwrap();
                let binom = Rational::from_integer(n.binomial(&k).unwrap().into());
                let d = crate::totalderiv::total_derivative_multi(&l, &partial);
                out.add(a, b, k, &d.scale(&(binom * &sign)));
            }
        }
    }
    out
}

/// `chi_* - chi^*`; empty iff `chi` is variational.
pub fn helmholtz_residual(chi: &Cotuple) -> OperatorCoefficients {
    frechet_linearization(chi).sub(&formal_adjoint(chi))
}

/// `D_mu J^mu` reduced in `ctx`.
pub fn current_divergence(ctx: &ReductionContext, j: &CurrentTuple) -> Expr {
    let d: Expr = j
        .components
        .iter()
        .enumerate()
        .map(|(k, e)| total_derivative(k + 1, e))
        .sum();
    ctx.reduce(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, rat};

    fn u(mu: u32, i: [u32; 3]) -> Expr {
        Expr::u(mu, i)
    }
    fn p(i: [u32; 3]) -> Expr {
        Expr::p(i)
    }
    fn unit(mu: usize) -> MultiIndex {
        MultiIndex::unit(3, mu)
    }

    #[test]
    fn euler_examples() {
        let l = u(1, [0, 0, 0]) * u(1, [1, 0, 0]);
        assert!(euler_operator(&l, 3).is_zero());

        let l: Expr = (1..=3)
            .map(|mu| Expr::var(Var::P(unit(mu))).pow(2).scale(&rat(1, 2)))
            .sum();
        let d = euler_operator(&l, 3);
        assert_eq!(d.pressure, -(p([2, 0, 0]) + p([0, 2, 0]) + p([0, 0, 2])));

        let l: Expr = (1..=3u32)
            .map(|mu| p([0, 0, 0]) * Expr::var(Var::U(mu, unit(mu as usize))))
            .sum();
        let d = euler_operator(&l, 3);
        for mu in 1..=3 {
            assert_eq!(d.velocity[mu - 1], -Expr::var(Var::P(unit(mu))));
        }
        assert_eq!(d.pressure, u(1, [1, 0, 0]) + u(2, [0, 1, 0]) + u(3, [0, 0, 1]));
    }

    #[test]
    fn linearization_and_adjoint_basics() {
        let chi = Cotuple::new(vec![u(1, [0, 0, 0]), u(2, [0, 0, 0]), u(3, [0, 0, 0])], Expr::zero());
        let lin = frechet_linearization(&chi);
        assert_eq!(lin.len(), 3);
        for mu in 1..=3 {
            assert_eq!(lin.get(Slot::Velocity(mu), Slot::Velocity(mu), &MultiIndex::zero(3)), Expr::one());
        }
        assert_eq!(formal_adjoint(&chi), lin);

        let chi = Cotuple::new(vec![u(1, [1, 0, 0]), Expr::zero(), Expr::zero()], Expr::zero());
        let s = Slot::Velocity(1);
        assert_eq!(frechet_linearization(&chi).get(s, s, &unit(1)), Expr::one());
        assert_eq!(formal_adjoint(&chi).get(s, s, &unit(1)), -Expr::one());
        let h = helmholtz_residual(&chi);
        assert_eq!(h.get(s, s, &unit(1)), Expr::int(2));
        assert_eq!(h.len(), 1);

        let chi = Cotuple::new(vec![Expr::zero(); 3], p([0, 0, 0]));
        assert!(helmholtz_residual(&chi).is_zero());
    }

    #[test]
    fn linearization_reproduces_ev() {
        let l: Expr = (1..=3u32)
            .map(|mu| p([0, 0, 0]) * Expr::var(Var::U(mu, unit(mu as usize))))
            .sum();
        let chi = euler_operator(&l, 3);
        let ctx = ReductionContext::free(3).unwrap();
        let f = Characteristic::new(
            vec![u(2, [0, 0, 0]) * Expr::x(1), p([0, 1, 0]), u(1, [0, 0, 0]).pow(2)],
            Expr::x(3) * u(3, [0, 0, 1]),
        );
        let applied = frechet_linearization(&chi).apply(&ctx, &f);
        for (slot, comp) in chi.slots() {
            let ev = crate::evolutionary::ev_apply(&ctx, &f, comp).unwrap();
            assert_eq!(applied.get(slot), &ev);
        }
    }

    #[test]
    fn adjoint_routes_agree() {
        let chi = Cotuple::new(
            vec![
                u(1, [1, 1, 0]) * u(2, [0, 0, 0]),
                p([0, 2, 0]) * Expr::x(1),
                u(3, [0, 0, 1]).pow(2),
            ],
            u(1, [0, 1, 0]) * p([1, 0, 0]),
        );
        let lin = frechet_linearization(&chi);
        assert_eq!(formal_adjoint(&chi), lin.adjoint());
        assert_eq!(lin.adjoint().adjoint(), lin);
    }

    #[test]
    fn conserved_currents() {
        let ce = ReductionContext::ce(3).unwrap();
        let j = CurrentTuple {
            components: vec![u(1, [0, 0, 0]), u(2, [0, 0, 0]), u(3, [0, 0, 0])],
        };
        assert!(current_divergence(&ce, &j).is_zero());

        let cpe = ReductionContext::cpe(3).unwrap();
        let j = CurrentTuple {
            components: vec![u(1, [0, 0, 0]).pow(2), Expr::zero(), Expr::zero()],
        };
        let expected = (u(1, [0, 0, 0]) * (-u(2, [0, 1, 0]) - u(3, [0, 0, 1]))).scale(&int(2));
        assert_eq!(current_divergence(&cpe, &j), expected);
    }

    #[test]
    fn transverse_variational_derivative_keys() {
        let l = u(2, [1, 1, 0]) * u(2, [1, 0, 0]) + p([0, 0, 1]) * Expr::x(3) + u(1, [2, 1, 0]) * Expr::x(2);
        let d = variational_derivative(&l, &[2, 3]);
        // u^2 at i^1 = 1: u2_[1,1,0] - D_2 u2_[1,0,0] cancels
        assert!(!d.contains_key(&Var::u(2, [1, 0, 0])));
        assert_eq!(d[&Var::p([0, 0, 0])], Expr::int(-1));
        assert_eq!(d[&Var::u(1, [2, 0, 0])], Expr::int(-1));
        assert_eq!(d.len(), 2);
    }
}
