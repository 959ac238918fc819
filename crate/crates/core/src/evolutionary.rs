//! Evolutionary vector fields, symmetry determining equations, and the
//! evolution derivation `D_t = d/dt + ev_E`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::constraints::{ReductionContext, Setting};
use crate::error::{Error, Result};
use crate::expr::{Expr, Var};
use crate::multiindex::MultiIndex;
use crate::report::Report;
use crate::totalderiv::Laplacian;
use crate::variational::{frechet_linearization, Cotuple, Slot};

/// Characteristic `(f^1, ..., f^m; f)` of an evolutionary field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Characteristic {
    pub velocity: Vec<Expr>,
    pub pressure: Expr,
}

impl Characteristic {
    pub fn zero(dim: usize) -> Self {
        Characteristic {
            velocity: vec![Expr::zero(); dim],
            pressure: Expr::zero(),
        }
    }

    pub fn new(velocity: Vec<Expr>, pressure: Expr) -> Self {
        Characteristic { velocity, pressure }
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

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Characteristic {
        Characteristic {
            velocity: self.velocity.iter().map(&mut f).collect(),
            pressure: f(&self.pressure),
        }
    }

    pub fn zip_with(&self, other: &Characteristic, mut f: impl FnMut(&Expr, &Expr) -> Expr) -> Characteristic {
        Characteristic {
            velocity: self
                .velocity
                .iter()
                .zip(&other.velocity)
                .map(|(a, b)| f(a, b))
                .collect(),
            pressure: f(&self.pressure, &other.pressure),
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

    fn check_dim(&self, ctx: &ReductionContext) -> Result<()> {
        if self.dim() != ctx.dim() {
            return Err(Error::DimensionMismatch {
                expected: ctx.dim(),
                found: self.dim(),
            });
        }
        Ok(())
    }
}

/// Memo of restricted derivatives `D_i g` of a fixed expression.
pub(crate) struct DerivativeTable<'a> {
    ctx: &'a ReductionContext,
    memo: HashMap<MultiIndex, Expr>,
}

impl<'a> DerivativeTable<'a> {
    pub(crate) fn new(ctx: &'a ReductionContext, base: Expr) -> Self {
        let mut memo = HashMap::new();
        memo.insert(MultiIndex::zero(ctx.dim()), base);
        DerivativeTable { ctx, memo }
    }

    pub(crate) fn get(&mut self, i: &MultiIndex) -> Expr {
        if let Some(hit) = self.memo.get(i) {
            return hit.clone();
        }
        let mu = (1..=i.dim()).rev().find(|&mu| i.get(mu) > 0).unwrap();
        let prev = self.get(&i.lower(mu).unwrap());
        let value = self.ctx.restricted_derivative_unchecked(mu, &prev);
        self.memo.insert(i.clone(), value.clone());
        value
    }
}

/// `ev_f g = sum D_i f^mu * dg/du^mu_i + D_i f * dg/dp_i`, restricted
/// derivatives on constrained settings.
pub fn ev_apply(ctx: &ReductionContext, f: &Characteristic, g: &Expr) -> Result<Expr> {
    f.check_dim(ctx)?;
    let f = f.map(|e| ctx.reduce(e));
    let g = ctx.reduce(g);
    Ok(ev_apply_reduced(ctx, &f, &g))
}

pub(crate) fn ev_apply_reduced(ctx: &ReductionContext, f: &Characteristic, g: &Expr) -> Expr {
    let mut tables: Vec<DerivativeTable> = f
        .velocity
        .iter()
        .chain(std::iter::once(&f.pressure))
        .map(|e| DerivativeTable::new(ctx, e.clone()))
        .collect();
    let dim = f.dim();
    let out = g.derive_by(|v| match v {
        Var::U(mu, i) => Some(tables[*mu as usize - 1].get(i)),
        Var::P(i) => Some(tables[dim].get(i)),
        _ => None,
    });
    ctx.reduce(&out)
}

/// `D_mu(ev_f g) - ev_f(D_mu g)`.
pub fn commutator_with_d(ctx: &ReductionContext, mu: usize, f: &Characteristic, g: &Expr) -> Result<Expr> {
    ctx.check_direction(mu)?;
    f.check_dim(ctx)?;
    let f = f.map(|e| ctx.reduce(e));
    let g = ctx.reduce(g);
    let a = ctx.restricted_derivative_unchecked(mu, &ev_apply_reduced(ctx, &f, &g));
    let b = ev_apply_reduced(ctx, &f, &ctx.restricted_derivative_unchecked(mu, &g));
    Ok(a - b)
}

/// Determining equations for `ev_f` to be a symmetry of the setting.
///
/// * free: no conditions;
/// * CE: `divergence = D_mu f^mu`;
/// * CPE: additionally `poisson = Lap f + 2 u^l_(mu) D_l f^mu`.
pub fn symmetry_residuals(ctx: &ReductionContext, f: &Characteristic) -> Result<Report> {
    f.check_dim(ctx)?;
    let mut report = Report::new();
    if ctx.setting() == Setting::Free {
        return Ok(report);
    }
    let f = f.map(|e| ctx.reduce(e));
    report.push("divergence", divergence(ctx, &f.velocity));
    if ctx.setting() == Setting::Cpe {
        report.push("poisson", poisson_residual(ctx, &f));
    }
    Ok(report)
}

pub(crate) fn divergence(ctx: &ReductionContext, v: &[Expr]) -> Expr {
    let d: Expr = v
        .iter()
        .enumerate()
        .map(|(k, e)| ctx.restricted_derivative_unchecked(k + 1, e))
        .sum();
    ctx.reduce(&d)
}

/// `Lap f + 2 u^l_(mu) D_l f^mu`, reduced; `f` already in coordinates.
pub(crate) fn poisson_residual(ctx: &ReductionContext, f: &Characteristic) -> Expr {
    let dim = ctx.dim();
    let mut acc = ctx.restricted_laplacian(Laplacian::Full, &f.pressure);
    for (m, fm) in f.velocity.iter().enumerate() {
        let mu = m + 1;
        for lam in 1..=dim {
            let d = ctx.restricted_derivative_unchecked(lam, fm);
            let u = Expr::var(Var::U(lam as u32, MultiIndex::unit(dim, mu)));
            acc += (u * d).scale(&crate::expr::int(2));
        }
    }
    ctx.reduce(&acc)
}

/// `D_t = d/dt + ev_E` on a constraint setting.
#[derive(Clone, Debug)]
pub struct EvolutionField {
    pub characteristic: Characteristic,
    ctx: Arc<ReductionContext>,
}

impl EvolutionField {
    /// The characteristic is stored in the coordinates of `ctx`.
    pub fn new(ctx: Arc<ReductionContext>, characteristic: Characteristic) -> Result<Self> {
        characteristic.check_dim(&ctx)?;
        let characteristic = characteristic.map(|e| ctx.reduce(e));
        Ok(EvolutionField { characteristic, ctx })
    }

    pub fn context(&self) -> &ReductionContext {
        &self.ctx
    }

    /// The symmetry conditions `ev_E` must satisfy to be admissible.
    pub fn admissibility(&self) -> Report {
        symmetry_residuals(&self.ctx, &self.characteristic).expect("dimension checked on construction")
    }
}

pub fn evolution_derivative(e: &EvolutionField, g: &Expr) -> Expr {
    let g = e.ctx.reduce(g);
    g.partial(&Var::T) + ev_apply_reduced(&e.ctx, &e.characteristic, &g)
}

/// `E_* f`, the linearization of the evolution components applied to `f`.
pub fn linearize_evolution(e: &EvolutionField, f: &Characteristic) -> Result<Characteristic> {
    f.check_dim(&e.ctx)?;
    let f = f.map(|x| e.ctx.reduce(x));
    let chi = Cotuple::new(e.characteristic.velocity.clone(), e.characteristic.pressure.clone());
    let op = frechet_linearization(&chi);
    Ok(op.apply(&e.ctx, &f))
}

/// `D_t f - E_* f`, componentwise; zero iff `ev_f` commutes with `D_t`.
pub fn time_symmetry_residual(e: &EvolutionField, f: &Characteristic) -> Result<Characteristic> {
    let lin = linearize_evolution(e, f)?;
    let f = f.map(|x| e.ctx.reduce(x));
    Ok(f.zip_with(&lin, |a, b| evolution_derivative(e, a) - b))
}
