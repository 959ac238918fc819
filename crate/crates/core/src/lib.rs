//! Exact differential algebra on the jet space of the incompressible
//! Navier-Stokes equations.
//!
//! Expressions are polynomials with rational coefficients in the jet
//! coordinates `x^mu`, `u^mu_i`, `p_i`, the viscosity `nu` and time `t`.

pub mod constraints;
pub mod error;
pub mod evolutionary;
pub mod expr;
pub mod exprio;
pub mod linalg;
pub mod multiindex;
pub mod ns;
pub mod reducedcomplex;
pub mod report;
pub mod totalderiv;
pub mod variational;

pub use constraints::{reduce_ce, reduce_cpe, ReductionContext, Setting};
pub use error::{Error, Result};
pub use evolutionary::{Characteristic, EvolutionField};
pub use expr::{Expr, Monomial, Rational, Var};
pub use multiindex::MultiIndex;
pub use report::{Report, Residual};
pub use variational::{Cotuple, CurrentTuple, OperatorCoefficients, Slot};
