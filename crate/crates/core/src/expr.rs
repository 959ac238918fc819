//! Canonical polynomials in jet variables over exact rationals.
//!
//! An [`Expr`] is a finite map from monomials to nonzero rational
//! coefficients. Every constructor and operation returns canonical form, so
//! structural equality is mathematical equality.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A coordinate on the jet space.
///
/// Components `mu` are 1-based. The derived order (X < U < P < nu < t, then
/// component, then multi-index) is the canonical variable order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// Independent variable `x^mu`.
    X(u32),
    /// Velocity jet coordinate `u^mu_i`.
    U(u32, MultiIndex),
    /// Pressure jet coordinate `p_i`.
    P(MultiIndex),
    /// Viscosity symbol.
    Nu,
    /// Time.
    T,
}

impl Var {
    pub fn u(mu: u32, idx: impl IntoIterator<Item = u32>) -> Var {
        Var::U(mu, MultiIndex::new(idx))
    }

    pub fn p(idx: impl IntoIterator<Item = u32>) -> Var {
        Var::P(MultiIndex::new(idx))
    }

    pub fn index(&self) -> Option<&MultiIndex> {
        match self {
            Var::U(_, i) | Var::P(i) => Some(i),
            _ => None,
        }
    }

    /// The same field with a different multi-index. Panics on non-jet variables.
    pub fn with_index(&self, idx: MultiIndex) -> Var {
        match self {
            Var::U(mu, _) => Var::U(*mu, idx),
            Var::P(_) => Var::P(idx),
            other => panic!("{other} has no multi-index"),
        }
    }

    pub fn is_jet(&self) -> bool {
        matches!(self, Var::U(..) | Var::P(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(mu) => write!(f, "x{mu}"),
            Var::U(mu, i) => write!(f, "u{mu}_{i}"),
            Var::P(i) => write!(f, "p_{i}"),
            Var::Nu => write!(f, "nu"),
            Var::T => write!(f, "t"),
        }
    }
}

/// Product of variable powers, sorted by variable, exponents nonzero.
///
/// Ordered by total degree, then lexicographically on the factor list.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[(Var, u32); 3]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(SmallVec::from_elem((v, 1), 1))
    }

    /// Build from arbitrary factors, merging repeats and dropping zero powers.
    pub fn from_factors(factors: impl IntoIterator<Item = (Var, u32)>) -> Self {
        let mut map: BTreeMap<Var, u32> = BTreeMap::new();
        for (v, e) in factors {
            *map.entry(v).or_default() += e;
        }
        Monomial(map.into_iter().filter(|(_, e)| *e > 0).collect())
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|k| self.0[k].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().cloned());
        Monomial(out)
    }

    /// Lower the power of the factor at position `k` by one.
    fn lower_at(&self, k: usize) -> Monomial {
        let mut out = self.0.clone();
        if out[k].1 == 1 {
            out.remove(k);
        } else {
            out[k].1 -= 1;
        }
        Monomial(out)
    }

    fn without_at(&self, k: usize) -> Monomial {
        let mut out = self.0.clone();
        out.remove(k);
        Monomial(out)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.as_slice().cmp(other.0.as_slice()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in jet variables with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expr::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(int(n))
    }

    pub fn var(v: Var) -> Self {
        Expr::term(Rational::one(), Monomial::var(v))
    }

    pub fn x(mu: u32) -> Self {
        Expr::var(Var::X(mu))
    }

    pub fn u(mu: u32, idx: impl IntoIterator<Item = u32>) -> Self {
        Expr::var(Var::u(mu, idx))
    }

    pub fn p(idx: impl IntoIterator<Item = u32>) -> Self {
        Expr::var(Var::p(idx))
    }

    pub fn nu() -> Self {
        Expr::var(Var::Nu)
    }

    pub fn t() -> Self {
        Expr::var(Var::T)
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut out = Expr::zero();
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant value, if the expression has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, c: &Rational, m: &Monomial) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self
                .terms
                .iter()
                .map(|(n, k)| (n.mul(m), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Expr {
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Every variable that occurs, in canonical order.
    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    /// Formal partial derivative, all jet coordinates independent.
    pub fn partial(&self, v: &Var) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            if let Ok(k) = m.0.binary_search_by(|(w, _)| w.cmp(v)) {
                let e = m.0[k].1;
                out.add_term(m.lower_at(k), c * int(e as i64));
            }
        }
        out
    }

    /// Apply the derivation sending each variable `v` to `image(v)`:
    /// `sum_v (d f / d v) * image(v)`.
    ///
    /// `image` is queried once per distinct variable; `None` means zero.
    pub fn derive_by<F>(&self, mut image: F) -> Expr
    where
        F: FnMut(&Var) -> Option<Expr>,
    {
        let mut cache: HashMap<Var, Option<Expr>> = HashMap::new();
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            for (k, (v, e)) in m.0.iter().enumerate() {
                let img = cache.entry(v.clone()).or_insert_with(|| image(v));
                let Some(img) = img else { continue };
                if img.is_zero() {
                    continue;
                }
                let rest = m.lower_at(k);
                let coeff = c * int(*e as i64);
                for (n, d) in &img.terms {
                    out.add_term(n.mul(&rest), d * &coeff);
                }
            }
        }
        out
    }

    /// Replace each variable `v` by `image(v)` simultaneously (single pass).
    /// `None` keeps the variable.
    pub fn substitute_by<F>(&self, mut image: F) -> Expr
    where
        F: FnMut(&Var) -> Option<Expr>,
    {
        let mut cache: HashMap<Var, Option<Expr>> = HashMap::new();
        let mut powers: HashMap<(Var, u32), Expr> = HashMap::new();
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut kept: SmallVec<[(Var, u32); 3]> = SmallVec::new();
            let mut product = Expr::constant(c.clone());
            for (v, e) in m.factors() {
                let img = cache.entry(v.clone()).or_insert_with(|| image(v));
                match img {
                    None => kept.push((v.clone(), *e)),
                    Some(img) => {
                        let p = powers
                            .entry((v.clone(), *e))
                            .or_insert_with(|| img.pow(*e));
                        product = &product * &*p;
                        if product.is_zero() {
                            break;
                        }
                    }
                }
            }
            if product.is_zero() {
                continue;
            }
            let kept = Monomial(kept);
            for (n, d) in product.terms {
                out.add_term(n.mul(&kept), d);
            }
        }
        out
    }

    pub fn substitute(&self, v: &Var, replacement: &Expr) -> Expr {
        self.substitute_by(|w| (w == v).then(|| replacement.clone()))
    }

    /// Highest `|i|` over velocity and pressure coordinates, `None` if absent.
    pub fn orders(&self) -> (Option<u32>, Option<u32>) {
        let mut u = None;
        let mut p = None;
        for v in self.variables() {
            match &v {
                Var::U(_, i) => u = u.max(Some(i.degree())),
                Var::P(i) => p = p.max(Some(i.degree())),
                _ => {}
            }
        }
        (u, p)
    }

    /// Exact value at a point. Every occurring variable must be assigned.
    pub fn evaluate(&self, assignment: &HashMap<Var, Rational>) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m.factors() {
                let value = assignment
                    .get(v)
                    .ok_or_else(|| Error::MissingVariable(v.to_string()))?;
                t *= num_traits::pow(value.clone(), *e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Drop every monomial containing a variable rejected by `keep`.
    pub fn filter_monomials<F: Fn(&Monomial) -> bool>(&self, keep: F) -> Expr {
        Expr {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Split off the coefficient of `v^1` as a polynomial in the rest:
    /// returns `(coefficient of v, remainder without v)`. Higher powers of `v`
    /// stay in the remainder.
    pub fn split_linear(&self, v: &Var) -> (Expr, Expr) {
        let mut lin = Expr::zero();
        let mut rest = Expr::zero();
        for (m, c) in &self.terms {
            match m.0.binary_search_by(|(w, _)| w.cmp(v)) {
                Ok(k) if m.0[k].1 == 1 => lin.add_term(m.without_at(k), c.clone()),
                _ => rest.add_term(m.clone(), c.clone()),
            }
        }
        (lin, rest)
    }

    pub fn leading_sign_negative(&self) -> bool {
        self.terms.values().next().is_some_and(|c| c.is_negative())
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::var(v)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::constant(c)
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            for (n, d) in &rhs.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr { (&self).$f(&rhs) }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $f(self, rhs: &Expr) -> Expr { (&self).$f(rhs) }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr { self.$f(&rhs) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl AddAssign for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        *self += &rhs;
    }
}

impl SubAssign for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        *self -= &rhs;
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Expr::zero();
        for e in iter {
            acc += &e;
        }
        acc
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::exprio::print_expr(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(mu: u32, i: [u32; 3]) -> Expr {
        Expr::u(mu, i)
    }
    fn p(i: [u32; 3]) -> Expr {
        Expr::p(i)
    }

    #[test]
    fn ring_basics() {
        let a = u(1, [0, 0, 0]);
        assert!((&a - &a).is_zero());
        assert_eq!(&Expr::x(1) * &Expr::x(1), Expr::x(1).pow(2));
        let lhs = p([0, 0, 0]).scale(&rat(2, 3)) * Expr::nu().scale(&int(3));
        assert_eq!(lhs, (Expr::nu() * p([0, 0, 0])).scale(&int(2)));
        assert_eq!(a.pow(0), Expr::one());
    }

    #[test]
    fn partials() {
        let v = Var::u(1, [1, 0, 0]);
        let f = u(1, [1, 0, 0]).pow(2);
        assert_eq!(f.partial(&v), u(1, [1, 0, 0]).scale(&int(2)));
        assert!((Expr::x(1) * Expr::nu()).partial(&Var::p([0, 0, 0])).is_zero());
        let g = Expr::x(1) * u(2, [0, 0, 0]);
        assert_eq!(g.partial(&Var::X(1)), u(2, [0, 0, 0]));
    }

    #[test]
    fn substitution() {
        let v = Var::u(1, [1, 0, 0]);
        let f = u(1, [1, 0, 0]) * p([0, 0, 0]);
        assert!(f.substitute(&v, &Expr::zero()).is_zero());
        let g = Expr::x(1) * u(2, [0, 1, 0]) + Expr::int(3);
        assert_eq!(g.substitute(&Var::X(1), &Expr::x(1)), g);
        let h = p([0, 0, 0]).pow(2);
        assert_eq!(
            h.substitute(&Var::p([0, 0, 0]), &u(1, [0, 0, 0])),
            u(1, [0, 0, 0]).pow(2)
        );
        // single pass: the replacement is not rewritten again
        let w = Var::X(1);
        let k = Expr::x(1).substitute(&w, &(Expr::x(1) + Expr::one()));
        assert_eq!(k, Expr::x(1) + Expr::one());
    }

    #[test]
    fn orders() {
        assert_eq!((u(1, [2, 0, 0]) * p([0, 1, 0])).orders(), (Some(2), Some(1)));
        assert_eq!((Expr::nu() * Expr::x(1)).orders(), (None, None));
        let ce = u(1, [1, 0, 0]) + u(2, [0, 1, 0]) + u(3, [0, 0, 1]);
        assert_eq!(ce.orders(), (Some(1), None));
    }

    #[test]
    fn evaluation() {
        let mut a = HashMap::new();
        a.insert(Var::u(1, [0, 0, 0]), int(3));
        assert_eq!(u(1, [0, 0, 0]).pow(2).evaluate(&a).unwrap(), int(9));
        assert_eq!(Expr::zero().evaluate(&HashMap::new()).unwrap(), int(0));
        let mut b = HashMap::new();
        b.insert(Var::Nu, int(1));
        b.insert(Var::p([0, 0, 0]), rat(1, 2));
        assert_eq!((Expr::nu() * p([0, 0, 0])).evaluate(&b).unwrap(), rat(1, 2));
        let err = (Expr::nu() * Expr::t()).evaluate(&b).unwrap_err();
        assert_eq!(err, Error::MissingVariable("t".into()));
    }
}
