//! Navier-Stokes presets and the verification suite built on them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::Signed;

use crate::constraints::{ce_generator, pe_generator, ReductionContext};
use crate::error::{Error, Result};
use crate::evolutionary::{divergence, poisson_residual, Characteristic, EvolutionField};
use crate::expr::{int, Expr, Rational, Var};
use crate::multiindex::MultiIndex;
use crate::report::Report;
use crate::totalderiv::{laplacian, total_derivative, Laplacian};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Viscosity {
    Symbolic,
    Value(Rational),
}

impl Viscosity {
    pub fn expr(&self) -> Expr {
        match self {
            Viscosity::Symbolic => Expr::nu(),
            Viscosity::Value(c) => Expr::constant(c.clone()),
        }
    }
}

impl fmt::Display for Viscosity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Viscosity::Symbolic => f.write_str("symbolic"),
            Viscosity::Value(c) => write!(f, "{c}"),
        }
    }
}

/// `symbolic`, or a rational such as `1/100`.
impl FromStr for Viscosity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "symbolic" || s == "nu" {
            return Ok(Viscosity::Symbolic);
        }
        let c = crate::exprio::parse_expr(s, 2)
            .ok()
            .and_then(|e| e.as_constant())
            .ok_or_else(|| Error::InvalidViscosity(s.to_string()))?;
        Ok(Viscosity::Value(c))
    }
}

/// The Navier-Stokes system in dimension `m`.
#[derive(Clone, Debug)]
pub struct NsInstance {
    pub dim: usize,
    pub viscosity: Viscosity,
    pub context: Arc<ReductionContext>,
    /// `E^mu = -u^l u^mu_(l) + nu Lap u^mu - p_(mu)`, free-algebra form.
    pub evolution: Vec<Expr>,
}

fn unit(dim: usize, mu: usize) -> MultiIndex {
    MultiIndex::unit(dim, mu)
}

pub fn ns_build(dim: usize, viscosity: Viscosity) -> Result<NsInstance> {
    if let Viscosity::Value(c) = &viscosity {
        if !c.is_positive() {
            return Err(Error::InvalidViscosity(c.to_string()));
        }
    }
    let context = Arc::new(ReductionContext::cpe(dim)?);
    let nu = viscosity.expr();
    let evolution = (1..=dim as u32)
        .map(|mu| {
            let u_mu = Expr::var(Var::U(mu, MultiIndex::zero(dim)));
            let mut e = &nu * &laplacian(Laplacian::Full, dim, &u_mu);
            for lam in 1..=dim {
                let u_lam = Expr::var(Var::U(lam as u32, MultiIndex::zero(dim)));
                e -= u_lam * Expr::var(Var::U(mu, unit(dim, lam)));
            }
            e - Expr::var(Var::P(unit(dim, mu as usize)))
        })
        .collect();
    Ok(NsInstance {
        dim,
        viscosity,
        context,
        evolution,
    })
}

impl NsInstance {
    /// `CE_0 = u^mu_(mu)`.
    pub fn ce0(&self) -> Expr {
        ce_generator(&MultiIndex::zero(self.dim))
    }

    /// `PE_0 = Lap p + u^l_(mu) u^mu_(l)`.
    pub fn pe0(&self) -> Expr {
        pe_generator(&MultiIndex::zero(self.dim))
    }

    /// The conserved current `F^mu`; it coincides with `E^mu`.
    pub fn current(&self) -> Vec<Expr> {
        self.evolution.clone()
    }

    /// Evolution field with the given pressure component.
    pub fn evolution_field(&self, pressure: Expr) -> Result<EvolutionField> {
        EvolutionField::new(
            self.context.clone(),
            Characteristic::new(self.evolution.clone(), pressure),
        )
    }

    /// Named presets in grammar form order.
    pub fn presets(&self) -> Vec<(String, Expr)> {
        let mut out: Vec<(String, Expr)> = self
            .evolution
            .iter()
            .enumerate()
            .map(|(k, e)| (format!("E{}", k + 1), e.clone()))
            .collect();
        out.push(("CE0".into(), self.ce0()));
        out.push(("PE0".into(), self.pe0()));
        out.push(("Phi".into(), self.context.phi().clone()));
        for (k, f) in self.current().into_iter().enumerate() {
            out.push((format!("F{}", k + 1), f));
        }
        out
    }

    /// `D_mu F^mu + PE_0 - (nu Lap - u^l D_l) CE_0` on the free algebra.
    pub fn current_identity(&self) -> Expr {
        let dim = self.dim;
        let div: Expr = self
            .current()
            .iter()
            .enumerate()
            .map(|(k, f)| total_derivative(k + 1, f))
            .sum();
        let ce0 = self.ce0();
        let mut transport = &self.viscosity.expr() * &laplacian(Laplacian::Full, dim, &ce0);
        for lam in 1..=dim {
            transport -= Expr::var(Var::U(lam as u32, MultiIndex::zero(dim))) * total_derivative(lam, &ce0);
        }
        div + self.pe0() - transport
    }

    /// `D_mu E^mu` with free total derivatives.
    pub fn free_divergence(&self) -> Expr {
        self.evolution
            .iter()
            .enumerate()
            .map(|(k, e)| total_derivative(k + 1, e))
            .sum()
    }
}

/// Runs the named checks:
///
/// * `(a) divergence`: `D_mu E^mu` with the derivatives of the constrained
///   algebra, then reduced on CE. The free-derivative variant is reported
///   for information; it equals `-PE_0` reduced on CE.
/// * `(b) identity`, `(b) reduced`: the current identity on the free
///   algebra, and `D_mu F^mu` reduced on CPE.
/// * `(c) poisson`: `Lap E + 2 u^l_(mu) D_l E^mu` for the pressure
///   component `E`; informational when no candidate is supplied (`E = 0`).
pub fn ns_verify(inst: &NsInstance, pressure_candidate: Option<&Expr>) -> Result<Report> {
    let ctx = &inst.context;
    let ce = ReductionContext::ce(inst.dim)?;
    let mut report = Report::new();

    let reduced: Vec<Expr> = inst.evolution.iter().map(|e| ctx.reduce(e)).collect();
    report.push("(a) divergence", ce.reduce(&divergence(ctx, &reduced)));
    report.push_info("(a) free divergence on ce", ce.reduce(&inst.free_divergence()));

    report.push("(b) identity", inst.current_identity());
    let cur = crate::variational::CurrentTuple {
        components: inst.current(),
    };
    report.push("(b) reduced", crate::variational::current_divergence(ctx, &cur));

    let pressure = pressure_candidate.cloned().unwrap_or_default();
    let f = Characteristic::new(reduced, ctx.reduce(&pressure));
    let r = poisson_residual(ctx, &f);
    if pressure_candidate.is_some() {
        report.push("(c) poisson", r);
    } else {
        report.push_info("(c) poisson", r);
    }
    Ok(report)
}

/// A prolonged constraint paired with its reduction on CPE.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Prolongation {
    pub name: String,
    pub expr: Expr,
    pub reduced: Expr,
}

/// `D_t CE_0` (as `D_mu E^mu`), the family `D_(mu) CE_0`, and `PE_0`.
pub fn ns_integrability_prolongations(inst: &NsInstance) -> Vec<Prolongation> {
    let ctx = &inst.context;
    let mut items = vec![("D_t CE0".to_string(), inst.free_divergence())];
    let ce0 = inst.ce0();
    for mu in 1..=inst.dim {
        items.push((format!("D{mu} CE0"), total_derivative(mu, &ce0)));
    }
    items.push(("PE0".into(), inst.pe0()));
    items
        .into_iter()
        .map(|(name, expr)| Prolongation {
            reduced: ctx.reduce(&expr),
            name,
            expr,
        })
        .collect()
}

/// `2 u^l_(mu) D_l E^mu` on CPE, the Poisson source for `E = 0`.
pub fn poisson_source(inst: &NsInstance) -> Expr {
    let ctx = &inst.context;
    let dim = inst.dim;
    let mut acc = Expr::zero();
    for (m, e) in inst.evolution.iter().enumerate() {
        let e = ctx.reduce(e);
        for lam in 1..=dim {
            let u = Expr::var(Var::U(lam as u32, unit(dim, m + 1)));
            acc += u * ctx.restricted_derivative_unchecked(lam, &e);
        }
    }
    ctx.reduce(&acc.scale(&int(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{rat, Monomial};

    #[test]
    fn build_examples() {
        let ns = ns_build(3, Viscosity::Symbolic).unwrap();
        let m = Monomial::from_factors([(Var::u(1, [2, 0, 0]), 1), (Var::Nu, 1)]);
        assert_eq!(ns.evolution[0].coefficient(&m), int(1));
        let ns2 = ns_build(2, Viscosity::Value(rat(1, 10))).unwrap();
        for e in &ns2.evolution {
            assert!(e.variables().iter().all(|v| v.index().is_none_or(|i| i.dim() == 2)));
        }
        assert!(matches!(ns_build(3, Viscosity::Value(int(-1))), Err(Error::InvalidViscosity(_))));
        assert!(matches!(ns_build(3, Viscosity::Value(int(0))), Err(Error::InvalidViscosity(_))));
        assert!(matches!(ns_build(1, Viscosity::Symbolic), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn viscosity_parsing() {
        assert_eq!("symbolic".parse::<Viscosity>().unwrap(), Viscosity::Symbolic);
        assert_eq!("1/100".parse::<Viscosity>().unwrap(), Viscosity::Value(rat(1, 100)));
        assert_eq!("-2".parse::<Viscosity>().unwrap(), Viscosity::Value(int(-2)));
        assert!("x1".parse::<Viscosity>().is_err());
    }

    #[test]
    fn verify_suite() {
        for dim in [2, 3] {
            for visc in [Viscosity::Symbolic, Viscosity::Value(rat(3, 2))] {
                let ns = ns_build(dim, visc).unwrap();
                let r = ns_verify(&ns, None).unwrap();
                assert!(r.passes(), "{:?}", r);
                assert!(r.get("(a) divergence").unwrap().is_zero());
                assert!(r.get("(b) identity").unwrap().is_zero());
                assert!(r.get("(b) reduced").unwrap().is_zero());
                let c = r.get("(c) poisson").unwrap();
                assert!(!c.is_zero());
                assert_eq!(c, &poisson_source(&ns));
            }
        }
    }

    #[test]
    fn free_divergence_differs_by_pressure_constraint() {
        let ns = ns_build(3, Viscosity::Symbolic).unwrap();
        let ce = ReductionContext::ce(3).unwrap();
        let free = ce.reduce(&ns.free_divergence());
        assert!(!free.is_zero());
        assert_eq!(free, -ce.reduce(&ns.pe0()));
    }

    #[test]
    fn prolongations_vanish_on_cpe() {
        let ns = ns_build(3, Viscosity::Symbolic).unwrap();
        let items = ns_integrability_prolongations(&ns);
        assert_eq!(items.len(), 5);
        for p in &items {
            assert!(!p.expr.is_zero(), "{}", p.name);
            assert!(p.reduced.is_zero(), "{}", p.name);
        }
        let ce = ReductionContext::ce(3).unwrap();
        assert!(ce.reduce(&items[2].expr).is_zero());
    }
}
