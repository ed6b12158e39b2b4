mod common;

use std::collections::BTreeMap;

use bvquant::algebra::{
    apply_delta, de_rham_d, parse, parse_series, serialize, serialize_series, total_d, verify_cdga, CdgaViolation,
    DGAlgebra, GeneratorSpec, Poly, Signature, VarKind,
};
use common::*;
use proptest::prelude::*;

const FUN: &[VarKind] = &[VarKind::Gen];
const FORM: &[VarKind] = &[VarKind::Gen, VarKind::Form];
const ALL: &[VarKind] = &[VarKind::Gen, VarKind::Form, VarKind::Vector];

fn three_odd() -> DGAlgebra {
    DGAlgebra::free(vec![
        GeneratorSpec::new("x", 0),
        GeneratorSpec::new("e1", -1),
        GeneratorSpec::new("e2", -1),
        GeneratorSpec::new("xi", -2),
    ])
    .unwrap()
}

#[test]
fn even_generator_squares_freely() {
    let a = cotangent_a1();
    let xi = a.gen("xi");
    assert_eq!(serialize(&(&xi * &xi)), "xi^2");
}

#[test]
fn odd_generators_square_to_zero_and_anticommute() {
    let a = three_odd();
    let (e1, e2) = (a.gen("e1"), a.gen("e2"));
    assert!((&e1 * &e1).is_zero());
    assert!((&(&e1 * &e2) + &(&e2 * &e1)).is_zero());
    assert_eq!(serialize(&(&e2 * &e1)), "-e1*e2");
}

#[test]
fn laurent_inverse() {
    let a = cotangent_gm();
    let x = a.gen("x");
    let xi = x.inverse_unit().unwrap();
    assert_eq!(&x * &xi, a.one());
    assert_eq!(serialize(&xi.pow(3)), "x^-3");
    assert!(a.gen("xi").inverse_unit().is_none());
}

#[test]
fn multiplying_across_algebras_is_an_error() {
    let (a, b) = (cotangent_a1(), three_odd());
    assert!(a.gen("x").multiply(&b.gen("x")).is_err());
}

#[test]
fn generator_validation() {
    assert!(Signature::new(vec![GeneratorSpec::new("x", 0), GeneratorSpec::new("x", 1)]).is_err());
    assert!(Signature::new(vec![GeneratorSpec { name: "y".into(), degree: 1, invertible: true }]).is_err());
    assert!(Signature::new(vec![GeneratorSpec::new("hbar", 0)]).is_err());
    assert!(Signature::new(vec![GeneratorSpec::new("2x", 0)]).is_err());
}

#[test]
fn delta_vanishes_on_cotangent() {
    let a = cotangent_a1();
    assert!(apply_delta(&a, &a.gen("x")).is_zero());
    assert!(verify_cdga(&a).pass);
}

#[test]
fn koszul_algebra_is_a_cdga() {
    let a = koszul();
    let r = verify_cdga(&a);
    assert!(r.pass, "{:?}", r.violations);
    assert_eq!(serialize(&apply_delta(&a, &a.gen("xi"))), "y*e1 - x*e2");
}

#[test]
fn verify_cdga_reports_square_failure() {
    let sig = Signature::new(vec![GeneratorSpec::new("x", 0), GeneratorSpec::new("e", -1), GeneratorSpec::new("f", -2)])
        .unwrap();
    let d = BTreeMap::from([("e".to_string(), p(&sig, "x")), ("f".to_string(), p(&sig, "e"))]);
    let a = DGAlgebra::with_differential(&sig, d).unwrap();
    let r = verify_cdga(&a);
    assert!(!r.pass);
    assert_eq!(
        r.violations,
        vec![CdgaViolation::SquareNonzero { generator: "f".into(), value: "x".into() }]
    );
}

#[test]
fn verify_cdga_reports_degree_failure() {
    let sig = Signature::new(vec![GeneratorSpec::new("x", 0), GeneratorSpec::new("e", -1)]).unwrap();
    let d = BTreeMap::from([("e".to_string(), p(&sig, "e"))]);
    let a = DGAlgebra::with_differential(&sig, d).unwrap();
    let r = verify_cdga(&a);
    assert!(matches!(r.violations[0], CdgaViolation::Degree { .. }));
}

#[test]
fn de_rham_basics() {
    let a = cotangent_gm();
    let sig = a.sig();
    assert_eq!(de_rham_d(&a.gen("x")), a.dd("x"));
    assert!(de_rham_d(&p(sig, "x^-1*dd(x)")).is_zero());
    assert_eq!(serialize(&de_rham_d(&p(sig, "x^-1"))), "-x^-2*dd(x)");
    assert_eq!(serialize(&de_rham_d(&p(sig, "x*xi"))), "xi*dd(x) + x*dd(xi)");
}

#[test]
fn form_symbols_commute_by_shifted_parity() {
    let a = three_odd();
    let sig = a.sig();
    // dx is odd, de is even, dxi is odd.
    assert!((&a.dd("x") * &a.dd("x")).is_zero());
    assert_eq!(serialize(&(&a.dd("e1") * &a.dd("e1"))), "dd(e1)^2");
    assert_eq!(&a.dd("xi") * &a.dd("x"), -(&a.dd("x") * &a.dd("xi")));
    assert_eq!(&a.dd("e1") * &a.dd("x"), &a.dd("x") * &a.dd("e1"));
    assert_eq!(p(sig, "dd(e1)*e2"), p(sig, "e2*dd(e1)"));
    assert_eq!(p(sig, "dd(x)*e2"), -p(sig, "e2*dd(x)"));
}

#[test]
fn parse_errors_carry_position() {
    let a = cotangent_a1();
    let e = parse(a.sig(), "x +\n  y").unwrap_err();
    assert_eq!((e.line, e.column), (2, 3));
    assert!(parse(a.sig(), "x^-1").is_err());
    assert!(parse(a.sig(), "hbar*x").is_err());
    assert!(parse(a.sig(), "1/0").is_err());
    assert!(parse(a.sig(), "").is_err());
    assert!(parse(a.sig(), "(x").is_err());
}

#[test]
fn series_parsing() {
    let a = cotangent_gm();
    let s = parse_series(a.sig(), "hbar*x^-1*pd(xi)*pd(x) + hbar^-1 - 2").unwrap();
    assert_eq!(s.keys().copied().collect::<Vec<_>>(), vec![-1, 0, 1]);
    assert_eq!(serialize_series(a.sig(), &s), "hbar^-1 - 2 - hbar*x^-1*pd(x)*pd(xi)");
}

fn leibniz_defect(a: &DGAlgebra, u: &Poly, v: &Poly) -> Poly {
    let lhs = apply_delta(a, &(u * v));
    let s = sign(u.parity().unwrap());
    lhs - &(&apply_delta(a, u) * v) - &(u * &apply_delta(a, v)).scale(&s)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_is_associative(seed in any::<u64>()) {
        let a = koszul();
        let mut r = rng(seed);
        let (u, v, w) = (
            random_poly(a.sig(), &mut r, ALL, 3, 4),
            random_poly(a.sig(), &mut r, ALL, 3, 4),
            random_poly(a.sig(), &mut r, ALL, 3, 4),
        );
        prop_assert_eq!(&(&u * &v) * &w, &u * &(&v * &w));
    }

    #[test]
    fn product_is_graded_commutative(seed in any::<u64>()) {
        let a = koszul();
        let mut r = rng(seed);
        let u = random_homogeneous(a.sig(), &mut r, ALL, 3, 4);
        let v = random_homogeneous(a.sig(), &mut r, ALL, 3, 4);
        let s = sign(u.parity().unwrap() && v.parity().unwrap());
        prop_assert_eq!(&u * &v, (&v * &u).scale(&s));
    }

    #[test]
    fn delta_is_a_derivation(seed in any::<u64>()) {
        let a = koszul();
        let mut r = rng(seed);
        let u = random_homogeneous(a.sig(), &mut r, FUN, 3, 4);
        let v = random_poly(a.sig(), &mut r, FUN, 3, 4);
        prop_assert!(leibniz_defect(&a, &u, &v).is_zero());
    }

    #[test]
    fn delta_squares_to_zero(seed in any::<u64>()) {
        let a = koszul();
        let mut r = rng(seed);
        let u = random_poly(a.sig(), &mut r, FUN, 4, 5);
        prop_assert!(apply_delta(&a, &apply_delta(&a, &u)).is_zero());
    }

    #[test]
    fn delta_raises_degree(seed in any::<u64>()) {
        let a = koszul();
        let mut r = rng(seed);
        let u = random_homogeneous(a.sig(), &mut r, FUN, 3, 4);
        let du = apply_delta(&a, &u);
        prop_assume!(!du.is_zero());
        prop_assert_eq!(du.degree(), u.degree().map(|d| d + 1));
    }

    #[test]
    fn total_differential_squares_to_zero(seed in any::<u64>()) {
        let a = koszul();
        let mut r = rng(seed);
        let w = random_poly(a.sig(), &mut r, FORM, 4, 5);
        prop_assert!(de_rham_d(&de_rham_d(&w)).is_zero());
        prop_assert!(total_d(&a, &total_d(&a, &w)).is_zero());
    }

    #[test]
    fn de_rham_d_is_a_derivation(seed in any::<u64>()) {
        let a = koszul();
        let mut r = rng(seed);
        let f = random_homogeneous(a.sig(), &mut r, FORM, 3, 3);
        let w = random_poly(a.sig(), &mut r, FORM, 3, 3);
        let s = sign(f.parity().unwrap());
        let rhs = &de_rham_d(&f) * &w + &(&f * &de_rham_d(&w)).scale(&s);
        prop_assert_eq!(de_rham_d(&(&f * &w)), rhs);
    }

    #[test]
    fn laurent_products_cancel(seed in any::<u64>()) {
        let a = cotangent_gm();
        let mut r = rng(seed);
        let m = random_mono(a.sig(), &mut r, FUN, 4);
        let u = Poly::monomial(a.sig(), m, small_q(&mut r));
        if let Some(inv) = u.inverse_unit() {
            prop_assert_eq!(&u * &inv, a.one());
        }
    }

    #[test]
    fn serialize_parse_round_trip(seed in any::<u64>()) {
        let a = koszul();
        let mut r = rng(seed);
        let u = random_poly(a.sig(), &mut r, ALL, 5, 5);
        let s = serialize(&u);
        prop_assert_eq!(parse(a.sig(), &s).unwrap(), u.clone());
        prop_assert_eq!(serialize(&parse(a.sig(), &s).unwrap()), s);
    }
}
