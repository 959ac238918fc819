//! Total derivatives on the free jet algebra and the horizontal differential.

use std::collections::BTreeMap;

use crate::expr::{Expr, Var};
use crate::multiindex::MultiIndex;

/// `D_mu = d/dx^mu + u^l_{i+(mu)} d/du^l_i + p_{i+(mu)} d/dp_i`.
pub fn total_derivative(mu: usize, f: &Expr) -> Expr {
    f.derive_by(|v| free_image(mu, v))
}

/// Image of a single coordinate under the free `D_mu`.
pub(crate) fn free_image(mu: usize, v: &Var) -> Option<Expr> {
    match v {
        Var::X(nu) => (*nu as usize == mu).then(Expr::one),
        Var::U(l, i) => Some(Expr::var(Var::U(*l, i.bump(mu)))),
        Var::P(i) => Some(Expr::var(Var::P(i.bump(mu)))),
        Var::Nu | Var::T => None,
    }
}

/// `D_i = D_1^{i^1} ... D_m^{i^m}`.
pub fn total_derivative_multi(i: &MultiIndex, f: &Expr) -> Expr {
    let mut out = f.clone();
    for mu in 1..=i.dim() {
        for _ in 0..i.get(mu) {
            out = total_derivative(mu, &out);
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Laplacian {
    /// Sum over all directions `1..=m`.
    Full,
    /// Sum over the transverse directions `2..=m`.
    Primed,
}

pub fn laplacian(variant: Laplacian, dim: usize, f: &Expr) -> Expr {
    let start = match variant {
        Laplacian::Full => 1,
        Laplacian::Primed => 2,
    };
    (start..=dim)
        .map(|mu| total_derivative(mu, &total_derivative(mu, f)))
        .sum()
}

/// Components of a horizontal `q`-form on strictly increasing index tuples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HForm {
    dim: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, Expr>,
}

impl HForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        HForm {
            dim,
            degree,
            components: BTreeMap::new(),
        }
    }

    pub fn function(dim: usize, f: Expr) -> Self {
        let mut w = HForm::zero(dim, 0);
        w.set(vec![], f);
        w
    }

    /// The `(m-1)`-form `J^mu d_mu x`, where
    /// `d_mu x = (-1)^{mu-1} dx^1 ^ ... (omit dx^mu) ... ^ dx^m`.
    pub fn from_current(j: &[Expr]) -> Self {
        let dim = j.len();
        let mut w = HForm::zero(dim, dim - 1);
        for (k, jk) in j.iter().enumerate() {
            let mu = k + 1;
            let key: Vec<usize> = (1..=dim).filter(|&n| n != mu).collect();
            let sign = if (mu - 1) % 2 == 0 { jk.clone() } else { -jk };
            w.set(key, sign);
        }
        w
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Set a component on an arbitrary index tuple; the tuple is sorted and
    /// the sign of the permutation applied. Repeated indices are dropped.
    pub fn set(&mut self, mut key: Vec<usize>, value: Expr) {
        assert_eq!(key.len(), self.degree, "component arity must equal degree");
        let mut sign = false;
        for a in 0..key.len() {
            for b in 0..key.len() - 1 - a {
                if key[b] > key[b + 1] {
                    key.swap(b, b + 1);
                    sign = !sign;
                }
            }
        }
        if key.windows(2).any(|w| w[0] == w[1]) {
            return;
        }
        let value = if sign { -value } else { value };
        if value.is_zero() {
            self.components.remove(&key);
        } else {
            self.components.insert(key, value);
        }
    }

    pub fn get(&self, key: &[usize]) -> Expr {
        self.components.get(key).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, Expr> {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }
}

/// `d_H`: the component on `mu_0 < ... < mu_q` is
/// `sum_s (-1)^s D_{mu_s} w_{mu_0 .. ^mu_s .. mu_q}`.
pub fn horizontal_differential(w: &HForm) -> HForm {
    let q = w.degree;
    let mut out = HForm::zero(w.dim, q + 1);
    if q >= w.dim {
        return out;
    }
    for key in increasing_tuples(w.dim, q + 1) {
        let mut acc = Expr::zero();
        for s in 0..key.len() {
            let mut rest = key.clone();
            let mu = rest.remove(s);
            if let Some(c) = w.components.get(&rest) {
                let d = total_derivative(mu, c);
                if s % 2 == 0 {
                    acc += d;
                } else {
                    acc -= d;
                }
            }
        }
        out.set(key, acc);
    }
    out
}

fn increasing_tuples(dim: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, dim: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for n in start..=dim {
            cur.push(n);
            rec(n + 1, dim, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, dim, len, &mut Vec::new(), &mut out);
    out
}
