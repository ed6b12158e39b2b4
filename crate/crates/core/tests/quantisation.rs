mod common;

use bvquant::algebra::{parse_series, q, qf, total_d, DGAlgebra, GeneratorSpec, Poly, VarKind};
use bvquant::connection::{linfty_bracket, RightConnection};
use bvquant::polyvector::{contract, mu_classical, PoissonStructure};
use bvquant::quantisation::*;
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn series(a: &DGAlgebra, s: &str, order: i64) -> HbarSeries {
    HbarSeries::from_series(a.sig(), &parse_series(a.sig(), s).unwrap(), order)
}

fn gm_pi(a: &DGAlgebra) -> Poly {
    p(a.sig(), "x^-1*pd(xi)*pd(x)")
}

fn poly_ring(name: &str, invertible: bool) -> DGAlgebra {
    let g = if invertible { GeneratorSpec::invertible(name) } else { GeneratorSpec::new(name, 0) };
    DGAlgebra::free(vec![g]).unwrap()
}

/// Random even series of `DR^r`-degree zero with `hbar` exponents in `1..=3`.
fn random_s(a: &DGAlgebra, r: &mut TestRng, order: i64) -> HbarSeries {
    let sig = a.sig();
    let mut s = HbarSeries::zero(sig, order);
    for _ in 0..r.gen_range(1..=3) {
        let u = random_poly(sig, r, PV, 3, 4).filter(|m| dr_degree(sig, m) == 0 && m.count(sig, VarKind::Vector) <= 3);
        s.add_at(r.gen_range(1..=3), &u);
    }
    s
}

fn random_u(a: &DGAlgebra, r: &mut TestRng, order: i64) -> HbarSeries {
    let mut u = HbarSeries::zero(a.sig(), order);
    for k in 0..=2 {
        u.add_at(k, &random_homogeneous(a.sig(), r, PV, 3, 3));
    }
    u
}

/// Random form series of form weight at most 2 built from generators and `dd` symbols.
fn random_form(a: &DGAlgebra, r: &mut TestRng, order: i64) -> HbarSeries {
    let sig = a.sig();
    let w = random_poly(sig, r, FORM, 3, 3).filter(|m| m.count(sig, VarKind::Form) <= 2);
    HbarSeries::term(0, w, order)
}

/// `sum_p hbar^p mu_classical(pi, omega_p)`.
fn classical_image(pi: &Poly, omega: &Poly, order: i64) -> HbarSeries {
    let mut out = HbarSeries::zero(pi.sig(), order);
    for w in 0..=omega.max_form_weight() {
        out.add_at(w as i64, &mu_classical(pi, &omega.weight_part(VarKind::Form, w)));
    }
    out
}

#[test]
fn cotangent_residual_vanishes() {
    let a = cotangent_a1();
    let c = RightConnection::coordinate(&a);
    let s = series(&a, "hbar*pd(x)*pd(xi)", 6);
    assert!(qme_residual(&s, &c).unwrap().is_zero());
    assert!(qme_mc_equivalence(&s, &c).unwrap().pass);
    assert!(Quantisation::new(s).unwrap().verify(&c).unwrap().is_verified());
}

#[test]
fn gm_residual_is_pinned() {
    let a = cotangent_gm();
    let c = RightConnection::coordinate(&a);
    let s = series(&a, "hbar*x^-1*pd(xi)*pd(x)", 4);
    assert_eq!(qme_residual(&s, &c).unwrap(), series(&a, "-hbar*x^-2*pd(xi)", 4));
    assert!(qme_mc_equivalence(&s, &c).unwrap().pass);
    assert!(!Quantisation::new(s).unwrap().verify(&c).unwrap().is_verified());
}

#[test]
fn zero_series() {
    let a = koszul();
    let c = RightConnection::coordinate(&a);
    let z = HbarSeries::zero(a.sig(), 4);
    assert!(qme_residual(&z, &c).unwrap().is_zero());
    let rep = qme_mc_equivalence(&z, &c).unwrap();
    assert!(rep.pass && rep.lhs == "0");
}

#[test]
fn exp_needs_positive_powers() {
    let a = cotangent_a1();
    let s = series(&a, "pd(x)*pd(xi)", 3);
    assert_eq!(s.exp(), Err(QuantisationError::NotNilpotent));
}

#[test]
fn quantisation_checks_filtration_and_degree() {
    let a = cotangent_a1();
    assert_eq!(Quantisation::new(series(&a, "pd(x)*pd(xi)", 2)), Err(QuantisationError::NotQuantisation));
    assert_eq!(Quantisation::new(series(&a, "hbar*pd(x)", 2)), Err(QuantisationError::NotQuantisation));
    let ok = Quantisation::new(series(&a, "hbar*pd(x)*pd(xi) + hbar^2*x^2*pd(x)*pd(xi)", 3)).unwrap();
    assert_eq!(ok.poisson(), series(&a, "hbar*pd(x)*pd(xi)", 3));
    assert!(!ok.is_verified());
}

#[test]
fn poisson_series_round_trip() {
    let a = cotangent_gm();
    let pi = PoissonStructure::strict(gm_pi(&a));
    let s = poisson_series(&pi, 3);
    assert_eq!(s, series(&a, "hbar*x^-1*pd(xi)*pd(x)", 3));
    assert_eq!(poisson_from_series(&s).unwrap().components(), pi.components());
    assert!(matches!(poisson_from_series(&series(&a, "hbar*pd(x)", 3)), Err(QuantisationError::NotClassical(_))));
}

#[test]
fn twisted_differential_basics() {
    let a = cotangent_gm();
    let c = RightConnection::coordinate(&a);
    let s = series(&a, "hbar*x^-1*pd(xi)*pd(x)", 4);
    let ds = twisted_differential(&s, &c).unwrap();
    assert_eq!(ds.apply(&HbarSeries::one(a.sig(), 4)), qme_residual(&s, &c).unwrap());
    let d0 = twisted_differential(&HbarSeries::zero(a.sig(), 4), &c).unwrap();
    let u = series(&a, "x^3*pd(x)*xi + hbar*pd(xi)", 4);
    assert_eq!(d0.apply(&u), apply_d_series(&c, &u));
}

#[test]
fn sigma_examples() {
    let a = cotangent_a1();
    let t = sigma(&series(&a, "hbar*pd(x)*pd(xi)", 4));
    assert_eq!(t.base, series(&a, "hbar*pd(x)*pd(xi)", 4));
    assert_eq!(t.epsilon_part, series(&a, "hbar^2*pd(x)*pd(xi)", 4));
    let c = sigma(&series(&a, "x^2", 4));
    assert!(c.epsilon_part.is_zero());
}

#[test]
fn mu_of_log_form_on_gm() {
    let a = cotangent_gm();
    let c = RightConnection::coordinate(&a);
    let s = series(&a, "hbar*x^-1*pd(xi)*pd(x)", 3);
    let mu = mu_quantised(&series(&a, "x^-1*dd(x)", 3), &s, &c).unwrap();
    assert_eq!(mu, series(&a, "hbar*x^-2*pd(xi)", 3));
    assert_eq!(mu_classical(&gm_pi(&a), &p(a.sig(), "x^-1*dd(x)")), p(a.sig(), "x^-2*pd(xi)"));
}

#[test]
fn mu_of_symplectic_form_on_cotangent() {
    let a = cotangent_a1();
    let c = RightConnection::coordinate(&a);
    let s = series(&a, "hbar*pd(x)*pd(xi)", 4);
    let mu = mu_quantised(&series(&a, "dd(x)*dd(xi)", 4), &s, &c).unwrap();
    assert_eq!(mu, series(&a, "-hbar + hbar^2*pd(x)*pd(xi)", 4));
}

#[test]
fn mu_at_zero_vanishes_in_positive_weight() {
    let a = cotangent_gm();
    let c = RightConnection::coordinate(&a);
    let z = HbarSeries::zero(a.sig(), 3);
    let om = series(&a, "x^2*dd(x) + dd(x)*dd(xi) + x^-1*xi*dd(xi)", 3);
    assert!(mu_quantised(&om, &z, &c).unwrap().is_zero());
}

#[test]
fn mu_rejects_vector_symbols() {
    let a = cotangent_a1();
    let c = RightConnection::coordinate(&a);
    let s = series(&a, "hbar*pd(x)*pd(xi)", 2);
    let bad = series(&a, "pd(x)", 2);
    assert!(matches!(mu_quantised(&bad, &s, &c), Err(QuantisationError::BadForm(_))));
}

#[test]
fn compatibility_on_cotangent() {
    let a = cotangent_a1();
    let c = RightConnection::coordinate(&a);
    let s = series(&a, "hbar*pd(x)*pd(xi)", 4);
    let b = Bounds::default();
    let good = compatibility_check(&series(&a, "dd(x)*dd(xi) + hbar", 4), &s, &c, &b).unwrap();
    assert_eq!(good.verdict, CompatibilityVerdict::Compatible);
    let doubled = compatibility_check(&series(&a, "2*dd(x)*dd(xi) + 2*hbar", 4), &s, &c, &b).unwrap();
    assert_eq!(doubled.verdict, CompatibilityVerdict::IncompatibleWithinBounds);
    assert_eq!(doubled.difference, series(&a, "hbar^2*pd(x)*pd(xi)", 4));
    let bare = compatibility_check(&series(&a, "dd(x)*dd(xi)", 4), &s, &c, &b).unwrap();
    assert_eq!(bare.verdict, CompatibilityVerdict::IncompatibleWithinBounds);
    let z = HbarSeries::zero(a.sig(), 4);
    assert_eq!(compatibility_check(&z, &z, &c, &b).unwrap().verdict, CompatibilityVerdict::Compatible);
}

#[test]
fn compatibility_finds_primitives() {
    // hbar^2 dxi dx = d(hbar^2 xi dx) adds a coboundary
    let a = cotangent_a1();
    let c = RightConnection::coordinate(&a);
    let s = series(&a, "hbar*pd(x)*pd(xi)", 4);
    let rep = compatibility_check(&series(&a, "dd(x)*dd(xi) + hbar + hbar^2*dd(xi)*dd(x)", 4), &s, &c, &Bounds::default()).unwrap();
    assert_eq!(rep.verdict, CompatibilityVerdict::Compatible);
    let y = rep.primitive.unwrap();
    assert_eq!(twisted_differential(&s, &c).unwrap().apply(&y), rep.difference);
    assert!(!y.is_zero());
}

#[test]
fn de_rham_cohomology_of_line() {
    let a = poly_ring("x", false);
    let b = Bounds::default();
    let h0 = cohomology_basis(&Complex::DeRham(&a), 0, &b);
    assert_eq!(h0.len(), 1);
    assert_eq!(h0[0].representative, a.one());
    assert!(cohomology_basis(&Complex::DeRham(&a), 1, &b).is_empty());
    let exact = CohomologyClass { representative: p(a.sig(), "x^3*dd(x)"), complex: ComplexTag::DeRham, degree: 1, bounds: b };
    match cohomology_class_test(&Complex::DeRham(&a), &exact).unwrap() {
        ClassVerdict::Zero { primitive } => assert_eq!(total_d(&a, &primitive), exact.representative),
        v => panic!("{v:?}"),
    }
}

#[test]
fn de_rham_cohomology_of_punctured_line() {
    let a = poly_ring("x", true);
    let cx = Complex::DeRham(&a);
    let b = Bounds::default();
    let h1 = cohomology_basis(&cx, 1, &b);
    assert_eq!(h1.len(), 1);
    assert_eq!(h1[0].representative, p(a.sig(), "x^-1*dd(x)"));
    assert_eq!(cohomology_class_test(&cx, &h1[0]).unwrap(), ClassVerdict::NonzeroWithinBounds);
    let far = CohomologyClass { representative: p(a.sig(), "x^-20*dd(x)"), complex: ComplexTag::DeRham, degree: 1, bounds: b };
    assert_eq!(cohomology_class_test(&cx, &far), Err(QuantisationError::Inconclusive));
    let wider = CohomologyClass { bounds: Bounds::new(8, 20), ..far };
    assert!(matches!(cohomology_class_test(&cx, &wider), Ok(ClassVerdict::Zero { .. })));
}

#[test]
fn class_test_rejects_non_cocycles() {
    let a = cotangent_a1();
    let cx = Complex::DeRham(&a);
    let c = CohomologyClass { representative: p(a.sig(), "x*xi"), complex: ComplexTag::DeRham, degree: -2, bounds: Bounds::default() };
    assert!(matches!(cohomology_class_test(&cx, &c), Err(QuantisationError::NotCocycle(_))));
}

#[test]
fn right_de_rham_of_cotangent() {
    let a = cotangent_a1();
    let c = RightConnection::coordinate(&a);
    let cx = Complex::RightDeRham(&c);
    let b = Bounds::new(3, 3);
    let h0 = cohomology_basis(&cx, 0, &b);
    assert_eq!(h0.len(), 1);
    assert_eq!(h0[0].representative, p(a.sig(), "pd(x)*pd(xi)"));
    assert!(cohomology_basis(&cx, -1, &b).is_empty());
    assert!(cohomology_basis(&cx, 1, &b).is_empty());
    // exp(hbar pi) = 1 + hbar pi pairs with dx dxi to -hbar
    let e = series(&a, "hbar*pd(x)*pd(xi)", 3).exp().unwrap();
    let paired = e.map(|u| contract(&u.weight_part(VarKind::Vector, 2), &p(a.sig(), "dd(x)*dd(xi)")));
    assert_eq!(paired, series(&a, "-hbar", 3));
}

#[test]
fn slices_respect_bounds() {
    let a = cotangent_gm();
    let c = RightConnection::coordinate(&a);
    let cx = Complex::RightDeRham(&c);
    let b = Bounds { poly_degree: 2, laurent_window: 2, max_weight: 2 };
    let s = cochain_slice(&cx, 0, &b);
    assert!(!s.is_empty());
    assert!(s.iter().all(|m| b.admits(a.sig(), m) && dr_degree(a.sig(), m) == 0));
    let wide = cochain_slice(&cx, 0, &b.widened());
    assert!(s.iter().all(|m| wide.contains(m)));
}

#[test]
fn gm_obstruction_is_nonzero() {
    let a = cotangent_gm();
    let c = RightConnection::coordinate(&a);
    let pi = PoissonStructure::strict(gm_pi(&a));
    let ob = obstruction(&c, &pi, 4, Bounds::default()).unwrap();
    assert_eq!(ob.cochain, series(&a, "-hbar*x^-2*pd(xi)", 4));
    assert_eq!(ob.class.representative, p(a.sig(), "-x^-2*pd(xi)"));
    for filtered in [true, false] {
        let cx = Complex::PoissonTangent { alg: &a, pi: gm_pi(&a), filtered };
        let cl = CohomologyClass { complex: cx.tag(), ..ob.class.clone() };
        assert_eq!(cohomology_class_test(&cx, &cl).unwrap(), ClassVerdict::NonzeroWithinBounds);
    }
}

#[test]
fn cotangent_obstruction_vanishes() {
    let a = cotangent_a1();
    let c = RightConnection::coordinate(&a);
    let pi = PoissonStructure::strict(p(a.sig(), "pd(x)*pd(xi)"));
    assert!(obstruction_cochain(&c, &pi, 5).unwrap().is_zero());
}

#[test]
fn obstruction_rejects_non_mc() {
    let a = with_odd_pair();
    let c = RightConnection::coordinate(&a);
    let pi = PoissonStructure::strict(p(a.sig(), "pd(x)*pd(xi) + x*pd(e)^2"));
    assert!(matches!(obstruction_cochain(&c, &pi, 3), Err(QuantisationError::NotMaurerCartan(_))));
}

#[test]
fn solve_cotangent() {
    let a = cotangent_a1();
    let c = RightConnection::coordinate(&a);
    let pi = PoissonStructure::strict(p(a.sig(), "pd(x)*pd(xi)"));
    for tie in [TieBreak::WeightThenDegree, TieBreak::DegreeThenWeight] {
        match solve_qme(&pi, &c, 5, &Bounds::default(), tie).unwrap() {
            SolveOutcome::Solved(q) => {
                assert!(q.is_verified());
                assert_eq!(q.series(), &series(&a, "hbar*pd(x)*pd(xi)", 5));
            }
            o => panic!("{o:?}"),
        }
    }
}

#[test]
fn solve_gm_is_obstructed() {
    let a = cotangent_gm();
    let c = RightConnection::coordinate(&a);
    let pi = PoissonStructure::strict(gm_pi(&a));
    match solve_qme(&pi, &c, 3, &Bounds::default(), TieBreak::default()).unwrap() {
        SolveOutcome::Obstructed { obstruction, residual } => {
            assert_eq!(obstruction.class.representative, p(a.sig(), "-x^-2*pd(xi)"));
            assert_eq!(residual, series(&a, "-hbar*x^-2*pd(xi)", 3));
        }
        o => panic!("{o:?}"),
    }
}

#[test]
fn solve_gm_after_log_twist() {
    let a = cotangent_gm();
    let c = RightConnection::coordinate(&a).twist(&p(a.sig(), "x^-1*dd(x)")).unwrap();
    let pi = PoissonStructure::strict(gm_pi(&a));
    match solve_qme(&pi, &c, 3, &Bounds::default(), TieBreak::default()).unwrap() {
        SolveOutcome::Solved(q) => assert!(q.is_verified() && qme_residual(q.series(), &c).unwrap().is_zero()),
        o => panic!("{o:?}"),
    }
}

fn lagrange_derivative_at_zero(values: &[HbarSeries]) -> HbarSeries {
    let m = values.len();
    let mut out = HbarSeries::zero(values[0].sig(), values[0].order());
    for i in 0..m {
        let ti = q(i as i64);
        let mut denom = q(1);
        for j in (0..m).filter(|&j| j != i) {
            denom *= &ti - q(j as i64);
        }
        let mut num = q(0);
        for l in (0..m).filter(|&l| l != i) {
            let mut prod = q(1);
            for j in (0..m).filter(|&j| j != i && j != l) {
                prod *= -q(j as i64);
            }
            num += prod;
        }
        out = out.add(&values[i].scale(&(num / denom)));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qme_matches_mc_expansion(seed in any::<u64>()) {
        let mut r = rng(seed);
        for (a, higher) in [(cotangent_gm(), false), (koszul(), false), (with_odd_pair(), true)] {
            let c = if higher { random_higher(&a, &mut r) } else { RightConnection::coordinate(&a) };
            let s = random_s(&a, &mut r, 4);
            let rep = qme_mc_equivalence(&s, &c).unwrap();
            prop_assert!(rep.pass, "{} vs {}", rep.lhs, rep.rhs);
            prop_assert_eq!(qme_residual(&s, &c).unwrap(), s.exp().unwrap().mul(&mc_expression(&s, &c).unwrap()));
        }
    }

    #[test]
    fn twisted_differential_squares_to_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        for a in [cotangent_gm(), koszul()] {
            let c = RightConnection::coordinate(&a);
            let s = random_s(&a, &mut r, 3);
            let ds = twisted_differential(&s, &c).unwrap();
            let u = random_u(&a, &mut r, 3);
            prop_assert!(ds.apply(&ds.apply(&u)).is_zero());
        }
    }

    #[test]
    fn products_and_d_respect_f_tilde(seed in any::<u64>(), i in 0i64..3, j in 0i64..3) {
        let mut r = rng(seed);
        let a = cotangent_gm();
        let c = RightConnection::coordinate(&a);
        let x = random_u(&a, &mut r, 5).shift(i).filter(|k, w| w <= k + 1);
        let y = random_u(&a, &mut r, 5).shift(j).filter(|k, w| w <= k + 1);
        prop_assume!(x.in_f_tilde(i + 1) && y.in_f_tilde(j + 1));
        prop_assert!(x.mul(&y).shift(1).in_f_tilde(i + j + 2));
        prop_assert!(apply_d_series(&c, &x).in_f_tilde(i + 1));
    }

    #[test]
    fn brackets_respect_f_tilde(seed in any::<u64>(), m in 2usize..4) {
        let mut r = rng(seed);
        let a = cotangent_gm();
        let c = RightConnection::coordinate(&a).twist(&p(a.sig(), "x^-1*dd(x)")).unwrap();
        let mut args = Vec::new();
        let mut total = 0;
        for _ in 0..m {
            let i = r.gen_range(1..3);
            let k = r.gen_range(i - 1..3);
            let u = random_homogeneous(a.sig(), &mut r, PV, 2, 3).filter(|mo| (mo.count(a.sig(), VarKind::Vector) as i64) <= k + 1);
            prop_assume!(!u.is_zero());
            args.push((k, u));
            total += i;
        }
        let kk: i64 = args.iter().map(|(k, _)| k).sum();
        let polys: Vec<Poly> = args.iter().map(|(_, u)| u.clone()).collect();
        let b = HbarSeries::term(kk, linfty_bracket(&c, &polys), 10);
        prop_assert!(b.in_f_tilde(total + 1 - m as i64));
    }

    #[test]
    fn g_conv_two_splits(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = cotangent_a1();
        let u = random_u(&a, &mut r, 4).shift(r.gen_range(-1..2));
        let split = u.iter_terms().all(|(k, m)| {
            let w = m.count(a.sig(), VarKind::Vector) as i64;
            (k == 0 && w == 0) || (k >= 1 && w <= k + 1)
        });
        prop_assert_eq!(u.in_g_conv(2), split);
        prop_assert_eq!(u.in_g(0), u.min_level().is_none_or(|l| l >= 0));
    }

    #[test]
    fn sigma_lands_in_tangent_filtration(seed in any::<u64>(), i in 1i64..4) {
        let mut r = rng(seed);
        let a = cotangent_gm();
        let s = random_u(&a, &mut r, 5).shift(i - 1).filter(|k, w| w <= k + 1);
        prop_assume!(s.in_f_tilde(i));
        let t = sigma(&s);
        prop_assert!(t.epsilon_part.in_tangent_f_tilde(i));
        prop_assert_eq!(t.base, s);
    }

    #[test]
    fn nu_is_the_derivative_of_mu(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = cotangent_gm();
        let c = RightConnection::coordinate(&a);
        let order = 3;
        let s = random_s(&a, &mut r, order);
        let rho = random_s(&a, &mut r, order);
        let om = random_form(&a, &mut r, order);
        let values: Vec<HbarSeries> = (0..=order + 1)
            .map(|t| mu_quantised(&om, &s.add(&rho.scale(&q(t))), &c).unwrap())
            .collect();
        prop_assert_eq!(nu(&om, &s, &rho, &c).unwrap(), lagrange_derivative_at_zero(&values));
        let dual = mu_dual(&om, &TangentElement { base: s.clone(), epsilon_part: rho.clone() }, &c).unwrap();
        prop_assert_eq!(dual.base, values[0].clone());
    }

    #[test]
    fn mu_reduces_to_classical(seed in any::<u64>()) {
        let mut r = rng(seed);
        for a in [cotangent_gm(), with_odd_pair()] {
            let c = RightConnection::coordinate(&a);
            let pi = random_mc_pi(&a, &mut r);
            let om = random_form(&a, &mut r, 4);
            let mu = mu_quantised(&om, &HbarSeries::term(1, pi.clone(), 4), &c).unwrap();
            prop_assert_eq!(mu.level_part(1), classical_image(&pi, &om.coeff(0), 4));
        }
    }

    #[test]
    fn mu_is_a_chain_map(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = cotangent_gm();
        let c = RightConnection::coordinate(&a).twist(&p(a.sig(), "x^-1*dd(x)")).unwrap();
        let s = series(&a, "hbar*x^-1*pd(xi)*pd(x)", 4);
        let om = random_form(&a, &mut r, 4);
        let lhs = twisted_differential(&s, &c).unwrap().apply(&mu_quantised(&om, &s, &c).unwrap());
        let rhs = mu_quantised(&om.map(|w| total_d(&a, w)), &s, &c).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn twist_changes_obstruction_by_mu(seed in any::<u64>()) {
        let mut r = rng(seed);
        for a in [cotangent_gm(), with_odd_pair(), two_dim()] {
            let pi = PoissonStructure::strict(random_mc_pi(&a, &mut r));
            let alpha = random_closed(&a, &mut r);
            for c in [RightConnection::coordinate(&a), random_higher(&a, &mut r)] {
                let t = c.twist(&alpha).unwrap();
                let diff = obstruction_cochain(&t, &pi, 4).unwrap().sub(&obstruction_cochain(&c, &pi, 4).unwrap());
                let mu = classical_image(pi.component(2).unwrap(), &alpha, 4);
                prop_assert_eq!(diff, mu);
            }
        }
    }

    #[test]
    fn compatibility_is_linear_in_omega(seed in any::<u64>(), k in 1i64..4) {
        let mut r = rng(seed);
        let a = cotangent_a1();
        let c = RightConnection::coordinate(&a);
        let s = series(&a, "hbar*pd(x)*pd(xi)", 4);
        let om = series(&a, "dd(x)*dd(xi) + hbar", 4);
        let (c1, c2, e1, e2) = (r.gen_range(-3..=3), r.gen_range(-3..=3), r.gen_range(0..3), r.gen_range(0..3));
        let beta = p(a.sig(), &format!("x^{e1}*xi*dd(x)")).scale(&q(c1)) + &p(a.sig(), &format!("x^{e2}*dd(xi)")).scale(&q(c2));
        let extra = HbarSeries::term(k, total_d(&a, &beta), 4);
        let rep = compatibility_check(&om.add(&extra), &s, &c, &Bounds::new(6, 6)).unwrap();
        prop_assert_eq!(rep.verdict, CompatibilityVerdict::Compatible);
    }
}

#[test]
fn series_arithmetic_truncates() {
    let a = cotangent_a1();
    let s = series(&a, "hbar*x + hbar^2*pd(x)", 3);
    let sq = s.mul(&s);
    assert_eq!(sq, series(&a, "hbar^2*x^2 + 2*hbar^3*x*pd(x)", 3));
    assert_eq!(s.d_hbar(), series(&a, "x + 2*hbar*pd(x)", 3));
    assert_eq!(s.scale(&qf(1, 2)).add(&s.scale(&qf(1, 2))), s);
    assert_eq!(format!("{s:?}"), "hbar*x + hbar^2*pd(x) (mod hbar^4)");
}
