//! Reduction modulo the divergence-free (CE) and pressure-Poisson (PE)
//! constraint ideals by passing to canonical coordinates.
//!
//! On CE the coordinates are `x, u^1_i (i^1 = 0), u^a_i, p_i`; every
//! `u^1_i` with `i^1 > 0` is replaced by `-sum_b u^b_{i-(1)+(b)}`.
//! On CPE additionally only `p_i` with `i^1 <= 1` survive; `p_{(i^1, j)}` with
//! `i^1 >= 2` becomes `-D_1^{i^1-2} D_j Phi` using restricted derivatives,
//! where `Phi = Lap' p + (u^l_(mu) u^mu_(l))|CE`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::multiindex::MultiIndex;
use crate::totalderiv::{free_image, laplacian, total_derivative, total_derivative_multi, Laplacian};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Setting {
    Free,
    Ce,
    Cpe,
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::Free => "free",
            Setting::Ce => "ce",
            Setting::Cpe => "cpe",
        })
    }
}

impl FromStr for Setting {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "free" => Ok(Setting::Free),
            "ce" => Ok(Setting::Ce),
            "cpe" => Ok(Setting::Cpe),
            other => Err(format!("unknown constraint setting `{other}`")),
        }
    }
}

/// The divergence expression `CE_i = u^mu_{i+(mu)}`.
pub fn ce_generator(i: &MultiIndex) -> Expr {
    (1..=i.dim())
        .map(|mu| Expr::var(Var::U(mu as u32, i.bump(mu))))
        .sum()
}

/// `u^l_(mu) u^mu_(l)`, summed over all `l, mu`.
pub fn velocity_gradient_square(dim: usize) -> Expr {
    let mut acc = Expr::zero();
    for l in 1..=dim {
        for mu in 1..=dim {
            let a = Expr::var(Var::U(l as u32, MultiIndex::unit(dim, mu)));
            let b = Expr::var(Var::U(mu as u32, MultiIndex::unit(dim, l)));
            acc += a * b;
        }
    }
    acc
}

/// `PE_i = Lap p_i + D_i(u^l_(mu) u^mu_(l))`.
pub fn pe_generator(i: &MultiIndex) -> Expr {
    let dim = i.dim();
    laplacian(Laplacian::Full, dim, &Expr::var(Var::P(i.clone())))
        + total_derivative_multi(i, &velocity_gradient_square(dim))
}

/// Reduction context: constraint setting, dimension, and the cached reduced
/// `Phi` together with memoized eliminations of pressure coordinates.
pub struct ReductionContext {
    setting: Setting,
    dim: usize,
    phi: Expr,
    eliminated: Mutex<HashMap<Var, Expr>>,
}

impl fmt::Debug for ReductionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReductionContext")
            .field("setting", &self.setting)
            .field("dim", &self.dim)
            .finish()
    }
}

/// Outcome of an ideal-membership test: the reduced residual is zero iff member.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Membership {
    pub member: bool,
    pub residual: Expr,
}

impl ReductionContext {
    pub fn new(setting: Setting, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let mut ctx = ReductionContext {
            setting,
            dim,
            phi: Expr::zero(),
            eliminated: Mutex::new(HashMap::new()),
        };
        let p0 = Expr::var(Var::P(MultiIndex::zero(dim)));
        let raw = laplacian(Laplacian::Primed, dim, &p0) + velocity_gradient_square(dim);
        ctx.phi = ctx.reduce_velocity(&raw);
        Ok(ctx)
    }

    pub fn free(dim: usize) -> Result<Self> {
        Self::new(Setting::Free, dim)
    }

    pub fn ce(dim: usize) -> Result<Self> {
        Self::new(Setting::Ce, dim)
    }

    pub fn cpe(dim: usize) -> Result<Self> {
        Self::new(Setting::Cpe, dim)
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Phi` in CE coordinates. Independent of the setting.
    pub fn phi(&self) -> &Expr {
        &self.phi
    }

    pub fn check_direction(&self, mu: usize) -> Result<()> {
        if mu == 0 || mu > self.dim {
            return Err(Error::InvalidDirection {
                direction: mu,
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// Is `v` one of the canonical coordinates of this setting?
    pub fn is_coordinate(&self, v: &Var) -> bool {
        match (self.setting, v) {
            (Setting::Free, _) => true,
            (_, Var::U(1, i)) if i.get(1) > 0 => false,
            (Setting::Cpe, Var::P(i)) if i.get(1) > 1 => false,
            _ => true,
        }
    }

    fn u1_replacement(&self, i: &MultiIndex) -> Expr {
        let base = i.lower(1).expect("u^1 elimination needs i^1 > 0");
        -(2..=self.dim)
            .map(|b| Expr::var(Var::U(b as u32, base.bump(b))))
            .sum::<Expr>()
    }

    fn reduce_velocity(&self, f: &Expr) -> Expr {
        f.substitute_by(|v| match v {
            Var::U(1, i) if i.get(1) > 0 => Some(self.u1_replacement(i)),
            _ => None,
        })
    }

    /// Canonical-coordinate expression for a single variable, `None` if it
    /// already is a coordinate.
    pub fn eliminate(&self, v: &Var) -> Option<Expr> {
        if self.is_coordinate(v) {
            return None;
        }
        match v {
            Var::U(1, i) => Some(self.u1_replacement(i)),
            Var::P(i) => Some(self.pressure_elimination(i)),
            _ => None,
        }
    }

    fn pressure_elimination(&self, i: &MultiIndex) -> Expr {
        let key = Var::P(i.clone());
        if let Some(hit) = self.eliminated.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let value = if i.get(1) == 2 {
            let mut j = i.clone();
            j = j.lower(1).unwrap().lower(1).unwrap();
            -total_derivative_multi(&j, &self.phi)
        } else {
            let prev = self.pressure_elimination(&i.lower(1).unwrap());
            self.restricted_derivative_unchecked(1, &prev)
        };
        self.eliminated.lock().unwrap().insert(key, value.clone());
        value
    }

    /// Rewrite `f` into the canonical coordinates of this setting.
    pub fn reduce(&self, f: &Expr) -> Expr {
        if self.setting == Setting::Free {
            return f.clone();
        }
        f.substitute_by(|v| self.eliminate(v))
    }

    /// Total derivative on the constrained algebra: free `D_mu` on each
    /// coordinate followed by one elimination step.
    pub fn restricted_derivative(&self, mu: usize, f: &Expr) -> Result<Expr> {
        self.check_direction(mu)?;
        Ok(self.restricted_derivative_unchecked(mu, f))
    }

    pub(crate) fn restricted_derivative_unchecked(&self, mu: usize, f: &Expr) -> Expr {
        if self.setting == Setting::Free {
            return total_derivative(mu, f);
        }
        f.derive_by(|v| {
            let img = match self.eliminate(v) {
                // input not in coordinates: differentiate its coordinate form
                Some(e) => return Some(self.restricted_derivative_unchecked(mu, &e)),
                None => free_image(mu, v)?,
            };
            match img.variables().into_iter().next() {
                Some(w) if !self.is_coordinate(&w) => Some(self.eliminate(&w).unwrap()),
                _ => Some(img),
            }
        })
    }

    /// Restricted `D_i`.
    pub fn restricted_derivative_multi(&self, i: &MultiIndex, f: &Expr) -> Expr {
        let mut out = f.clone();
        for mu in 1..=i.dim() {
            for _ in 0..i.get(mu) {
                out = self.restricted_derivative_unchecked(mu, &out);
            }
        }
        out
    }

    /// Restricted Laplacian (full or transverse).
    pub fn restricted_laplacian(&self, variant: Laplacian, f: &Expr) -> Expr {
        let start = match variant {
            Laplacian::Full => 1,
            Laplacian::Primed => 2,
        };
        (start..=self.dim)
            .map(|mu| {
                let d = self.restricted_derivative_unchecked(mu, f);
                self.restricted_derivative_unchecked(mu, &d)
            })
            .sum()
    }

    pub fn ideal_member(&self, f: &Expr) -> Membership {
        let residual = self.reduce(f);
        Membership {
            member: residual.is_zero(),
            residual,
        }
    }
}

/// Reduce modulo the divergence-free ideal.
pub fn reduce_ce(f: &Expr, dim: usize) -> Result<Expr> {
    Ok(ReductionContext::ce(dim)?.reduce(f))
}

/// Reduce modulo the joint divergence-free and pressure-Poisson ideal.
pub fn reduce_cpe(f: &Expr, dim: usize) -> Result<Expr> {
    Ok(ReductionContext::cpe(dim)?.reduce(f))
}
