mod common;

use common::{Gen, Shape};
use jetcalc_core::evolutionary::{commutator_with_d, ev_apply, symmetry_residuals};
use jetcalc_core::exprio::{
    expr_from_json, expr_to_json, parse_characteristic, parse_chi, parse_expr, print_characteristic, print_chi,
    print_expr,
};
use jetcalc_core::reducedcomplex::{dtilde1, fstar_with, theta_variational, ChiKey, ChiTuple};
use jetcalc_core::totalderiv::{horizontal_differential, total_derivative, HForm};
use jetcalc_core::variational::{euler_operator, formal_adjoint, frechet_linearization, helmholtz_residual};
use jetcalc_core::{Characteristic, Cotuple, Expr, ReductionContext, Setting};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn characteristic(g: &mut Gen, s: &Shape) -> Characteristic {
    Characteristic::new((0..s.dim).map(|_| g.expr(s)).collect(), g.expr(s))
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn total_derivatives_commute(seed in any::<u64>(), dim in 2usize..=3) {
        let mut g = Gen::new(seed);
        let f = g.expr(&Shape::new(dim, 3, 2));
        for mu in 1..=dim {
            for nu in mu + 1..=dim {
                let a = total_derivative(mu, &total_derivative(nu, &f));
                let b = total_derivative(nu, &total_derivative(mu, &f));
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn total_derivative_is_a_derivation(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let s = Shape::new(3, 2, 2);
        let (f, h) = (g.expr(&s), g.expr(&s));
        for mu in 1..=3 {
            let lhs = total_derivative(mu, &(&f * &h));
            let rhs = &total_derivative(mu, &f) * &h + &f * &total_derivative(mu, &h);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ev_commutes_with_free_derivatives(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let s = Shape::new(3, 2, 2);
        let ctx = ReductionContext::free(3).unwrap();
        let f = characteristic(&mut g, &s);
        let h = g.expr(&s);
        for mu in 1..=3 {
            prop_assert!(commutator_with_d(&ctx, mu, &f, &h).unwrap().is_zero());
        }
    }

    #[test]
    fn linearization_matches_ev(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let s = Shape { terms: 3, ..Shape::new(3, 2, 1) };
        let ctx = ReductionContext::free(3).unwrap();
        let chi = Cotuple::new((0..3).map(|_| g.expr(&s)).collect(), g.expr(&s));
        let f = characteristic(&mut g, &s);
        let applied = frechet_linearization(&chi).apply(&ctx, &f);
        for (slot, comp) in chi.slots() {
            prop_assert_eq!(applied.get(slot), &ev_apply(&ctx, &f, comp).unwrap());
        }
    }

    #[test]
    fn reduction_is_a_differential_homomorphism(seed in any::<u64>(), cpe in any::<bool>()) {
        let mut g = Gen::new(seed);
        let s = Shape::new(3, 3, 3);
        let ctx = ReductionContext::new(if cpe { Setting::Cpe } else { Setting::Ce }, 3).unwrap();
        let (f, h) = (g.expr(&s), g.expr(&s));
        let rf = ctx.reduce(&f);
        prop_assert_eq!(ctx.reduce(&rf), rf.clone());
        prop_assert_eq!(ctx.reduce(&(&f * &h)), &rf * &ctx.reduce(&h));
        for mu in 1..=3 {
            let lhs = ctx.reduce(&total_derivative(mu, &f));
            prop_assert_eq!(lhs, ctx.restricted_derivative(mu, &rf).unwrap());
        }
    }

    #[test]
    fn euler_kills_divergences(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let s = Shape { terms: 3, ..Shape::new(3, 2, 2) };
        let div: Expr = (1..=3).map(|mu| total_derivative(mu, &g.expr(&s))).sum();
        prop_assert!(euler_operator(&div, 3).is_zero());
    }

    #[test]
    fn euler_images_are_variational(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let s = Shape { terms: 3, ..Shape::new(3, 2, 2) };
        let chi = euler_operator(&g.expr(&s), 3);
        prop_assert!(helmholtz_residual(&chi).is_zero());
    }

    #[test]
    fn adjoint_is_an_involution(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let s = Shape { terms: 3, ..Shape::new(3, 2, 2) };
        let chi = Cotuple::new((0..3).map(|_| g.expr(&s)).collect(), g.expr(&s));
        let lin = frechet_linearization(&chi);
        prop_assert_eq!(lin.adjoint(), formal_adjoint(&chi));
        prop_assert_eq!(lin.adjoint().adjoint(), lin);
    }

    #[test]
    fn horizontal_differential_squares_to_zero(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let s = Shape { terms: 2, ..Shape::new(3, 1, 1) };
        let mut w = HForm::zero(3, 1);
        for mu in 1..=3 {
            w.set(vec![mu], g.expr(&s));
        }
        prop_assert!(horizontal_differential(&horizontal_differential(&w)).is_zero());
    }

    #[test]
    fn translations_are_symmetries(lam in 1usize..=3, dim in 2usize..=3) {
        let lam = lam.min(dim);
        let ctx = ReductionContext::cpe(dim).unwrap();
        let e = jetcalc_core::MultiIndex::unit(dim, lam);
        let f = Characteristic::new(
            (1..=dim as u32).map(|mu| Expr::var(jetcalc_core::Var::U(mu, e.clone()))).collect(),
            Expr::var(jetcalc_core::Var::P(e)),
        );
        prop_assert!(symmetry_residuals(&ctx, &f).unwrap().passes());
    }
}

fn random_chi(g: &mut Gen, setting: Setting) -> ChiTuple {
    let s = Shape { terms: 2, degree: 2, ..Shape::new(3, 1, 1) };
    let ctx = ReductionContext::new(setting, 3).unwrap();
    let mut chi = ChiTuple::new(setting, 3).unwrap();
    let mut keys = vec![
        ChiKey::Chi01,
        ChiKey::Alpha { i1: 0, alpha: 2 },
        ChiKey::Alpha { i1: 1, alpha: 3 },
        ChiKey::Pressure(0),
        ChiKey::Pressure(1),
    ];
    if setting == Setting::Ce {
        keys.push(ChiKey::Pressure(3));
    }
    for k in keys {
        if g.rng().gen_bool(0.7) {
            chi.set(k, ctx.reduce(&g.expr(&s))).unwrap();
        }
    }
    chi
}

use rand::Rng;

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn transverse_variational_derivative_intertwines_d1(seed in any::<u64>(), cpe in any::<bool>()) {
        let mut g = Gen::new(seed);
        let setting = if cpe { Setting::Cpe } else { Setting::Ce };
        let ctx = ReductionContext::new(setting, 3).unwrap();
        let s = Shape { terms: 3, ..Shape::new(3, 1, 1) };
        let l = ctx.reduce(&g.expr(&s));
        let lhs = theta_variational(&ctx, &ctx.restricted_derivative(1, &l).unwrap()).unwrap();
        let rhs = dtilde1(&ctx, &theta_variational(&ctx, &l).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fstar_is_linear(seed in any::<u64>(), cpe in any::<bool>(), a in -5i64..5, b in 1i64..5) {
        let mut g = Gen::new(seed);
        let setting = if cpe { Setting::Cpe } else { Setting::Ce };
        let ctx = ReductionContext::new(setting, 3).unwrap();
        let (x, y) = (random_chi(&mut g, setting), random_chi(&mut g, setting));
        let (a, b) = (jetcalc_core::expr::int(a), jetcalc_core::expr::rat(1, b));
        let lhs = fstar_with(&ctx, &x.scale(&a).add_tuple(&y.scale(&b))).unwrap();
        let rhs = fstar_with(&ctx, &x).unwrap().scale(&a).add_tuple(&fstar_with(&ctx, &y).unwrap().scale(&b));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn chi_tuples_roundtrip(seed in any::<u64>(), cpe in any::<bool>()) {
        let mut g = Gen::new(seed);
        let setting = if cpe { Setting::Cpe } else { Setting::Ce };
        let chi = random_chi(&mut g, setting);
        let text = print_chi(&chi);
        prop_assert_eq!(parse_chi(&text, setting, 3).unwrap(), chi);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn expressions_roundtrip(seed in any::<u64>(), dim in 2usize..=4) {
        let mut g = Gen::new(seed);
        let e = g.expr(&Shape { terms: 6, ..Shape::new(dim, 3, 3) });
        let text = print_expr(&e);
        let back = parse_expr(&text, dim).unwrap();
        prop_assert_eq!(print_expr(&back), text);
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(expr_from_json(&expr_to_json(&e), dim).unwrap(), e);
    }

    #[test]
    fn characteristics_roundtrip(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let f = characteristic(&mut g, &Shape::new(3, 2, 2));
        prop_assert_eq!(parse_characteristic(&print_characteristic(&f), 3).unwrap(), f);
    }

    #[test]
    fn parser_never_panics(text in "[-+*/^()0-9a-z_\\[\\], ]{0,40}") {
        let _ = parse_expr(&text, 3);
    }
}
