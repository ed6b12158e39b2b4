//! Gorenstein reduction of polyvectors on a toy model to forms on the base
//! with coefficients in `O[e, pd(e)]`, and the class formulas.
//!
//! A reduced element `a w`, with `a` free of `dx` and `w` a `dx`-word, stands
//! for the polyvector `a (w contracted into I)`, `I = prod_i pd(x_i) pd(xi_i)`,
//! with `w` written to the left of `I`.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{qf, Monomial, Poly, VarKind, Q};
use crate::connection::{apply_d_fast, RightConnection};
use crate::polyvector::pair_left;
use crate::quantisation::{Bounds, CohomologyClass, ComplexTag, HbarSeries};

use super::{build_dg_scheme, build_poisson, ToyError, ToyGeometry};

/// Global sign of the orientation `u(e_r ... e_1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    #[default]
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> Q {
        match self {
            Orientation::Positive => Q::one(),
            Orientation::Negative => -Q::one(),
        }
    }
}

fn unit(p: &Poly, m: &Monomial) -> Poly {
    Poly::monomial(p.sig(), m.clone(), Q::one())
}

fn has_xi(g: &ToyGeometry, m: &Monomial) -> bool {
    (0..g.n()).any(|i| m.0[g.n() + g.r() + i] != 0)
}

fn drop_xi(g: &ToyGeometry, p: &Poly) -> Poly {
    p.filter(|m| !has_xi(g, m))
}

struct Reducer<'a> {
    g: &'a ToyGeometry,
    conn: RightConnection,
    /// Keep the terms produced by the `delta(xi)` relation.
    with_phi: bool,
}

impl Reducer<'_> {
    /// Rewrite a monomial missing `pd(xi_i)` through `D(xi_i v) = 0` modulo `xi`
    /// with `v = w pd(xi_i)`: `w = -(1/s) delta(xi_i) v`.
    fn fill_xi(&self, i: usize, p: &Poly) -> Poly {
        let g = self.g;
        let pv = g.sig().vector_var(g.n() + g.r() + i);
        let mut out = Poly::zero(g.sig());
        for (m, c) in p.terms() {
            if m.0[pv] != 0 {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            if !self.with_phi {
                continue;
            }
            let w = unit(p, m);
            let v = &w * &g.pd_xi(i);
            let dxi = self.conn.alg().delta_of(g.sig().gen_var(g.n() + g.r() + i)).clone();
            let rel = drop_xi(g, &apply_d_fast(&self.conn, &(&g.xi(i) * &v)));
            let t = &rel - &(&dxi * &v);
            let s = t.coefficient(m);
            assert!(!s.is_zero() && t == w.scale(&s), "relation for {w} has unexpected form {t}");
            out = out + &(&dxi * &v).scale(&(-(c / &s)));
        }
        out
    }

    fn factor_i(&self, p: &Poly) -> Poly {
        let g = self.g;
        let sig = g.sig().clone();
        let n = g.n();
        let big_i = (0..n).fold(Poly::one(&sig), |acc, i| &(&acc * &g.pd_x(i)) * &g.pd_xi(i));
        let mut out = Poly::zero(&sig);
        for (m, c) in p.terms() {
            let mut rest = m.clone();
            let mut w = Poly::one(&sig);
            for i in 0..n {
                rest.0[sig.vector_var(n + g.r() + i)] = 0;
                if m.0[sig.vector_var(i)] == 0 {
                    w = &w * &g.dx(i);
                } else {
                    rest.0[sig.vector_var(i)] = 0;
                }
            }
            let a = unit(p, &rest);
            let back = &a * &pair_left(&w, &big_i);
            let sign = back.coefficient(m);
            debug_assert!(back.len() == 1 && !sign.is_zero());
            out = out + &(&a * &w).scale(&(c / &sign));
        }
        out
    }

    fn reduce(&self, p: &Poly) -> Poly {
        let mut u = drop_xi(self.g, p);
        for i in 0..self.g.n() {
            u = self.fill_xi(i, &u);
        }
        self.factor_i(&u)
    }
}

fn reducer(g: &ToyGeometry, with_phi: bool) -> Result<Reducer<'_>, ToyError> {
    let alg = build_dg_scheme(g)?;
    Ok(Reducer { g, conn: RightConnection::coordinate(&alg), with_phi })
}

/// Reduce an `hbar`-series of polyvectors on the toy model: terms with `xi`
/// coefficients vanish, missing `pd(xi_i)` are supplied through
/// `delta(xi_i) u ~ d u / d pd(xi_i)`, and `I` is factored out.
pub fn gorenstein_reduce(u: &HbarSeries, g: &ToyGeometry) -> Result<HbarSeries, ToyError> {
    let red = reducer(g, true)?;
    Ok(u.map(|p| red.reduce(p)))
}

/// Scalar part `S - hbar pi`, which must be a series in `hbar` with constant coefficients.
fn scalar_correction(g: &ToyGeometry, s: &HbarSeries) -> Result<HbarSeries, ToyError> {
    let pi = build_poisson(g)?.total().expect("strict");
    let corr = s.sub(&HbarSeries::term(1, pi, s.order()));
    if corr.terms().values().any(|p| !p.is_constant()) || corr.terms().contains_key(&0) {
        return Err(ToyError::NotScalarCorrection(corr.to_string()));
    }
    Ok(corr)
}

/// `hbar^n exp(hbar Q + nabla_E + hbar^-1 Q(kappa) + hbar^-1 nabla_E(phi))` in the
/// reduced representation, to the given order: the terms of `pi` with
/// `pd(xi_i)` replaced by `hbar^-1 dx_i`, plus `hbar^-1 sum delta(xi_i) dx_i`.
pub fn closed_form(g: &ToyGeometry, order: i64) -> Result<HbarSeries, ToyError> {
    let sig = g.sig().clone();
    let (n, r) = (g.n(), g.r());
    let mut q_term = Poly::zero(&sig);
    let mut c_term = Poly::zero(&sig);
    for j in 0..r {
        for l in 0..r {
            q_term = q_term + &(&(&g.q()[j][l] * &g.pd_e(j)) * &g.pd_e(l));
            for i in 0..n {
                c_term = c_term + &(&(&(g.c(l, j, i) * &g.e(l)) * &g.pd_e(j)) * &g.dx(i));
            }
        }
    }
    let q_term = q_term.scale(&qf(-1, 2));
    let curv = g.curvature()?.q_kappa_element(g);
    let y = &curv + &g.nabla_phi_element();
    let nil_exp = |x: &Poly| {
        let mut acc = Poly::one(&sig);
        let mut pow = Poly::one(&sig);
        for k in 1..=n + 1 {
            pow = (&pow * x).scale(&Q::new(1.into(), (k as i64).into()));
            acc = acc + &pow;
        }
        acc
    };
    let mut inv = HbarSeries::zero(&sig, order);
    let mut pow = Poly::one(&sig);
    for k in 0..=n {
        inv.add_at((n - k) as i64, &pow);
        pow = (&pow * &y).scale(&Q::new(1.into(), ((k + 1) as i64).into()));
    }
    let exp_q = HbarSeries::term(1, q_term, order).exp()?;
    Ok(exp_q.mul_poly(&nil_exp(&c_term)).mul(&inv))
}

#[derive(Clone, Debug)]
pub struct ClassFormula {
    /// `gorenstein_reduce(e^S)`.
    pub reduced: HbarSeries,
    /// Closed form times the unit `e^{S - hbar pi}`.
    pub expected: HbarSeries,
}

/// Reduce `e^S` and compare with the closed form; `S` is `hbar pi` plus a scalar series.
pub fn class_formula(g: &ToyGeometry, s: &HbarSeries) -> Result<ClassFormula, ToyError> {
    let unit_series = scalar_correction(g, s)?.exp()?;
    let reduced = gorenstein_reduce(&s.exp()?, g)?;
    let expected = closed_form(g, s.order())?.mul(&unit_series);
    let diff = reduced.sub(&expected);
    if let Some((k, m)) = diff.iter_terms().next() {
        let c = diff.coeff(k).coefficient(m);
        return Err(ToyError::Mismatch(HbarSeries::term(k, Poly::monomial(g.sig(), m.clone(), c), s.order()).to_string()));
    }
    Ok(ClassFormula { reduced, expected })
}

#[derive(Clone, Debug)]
pub struct ProjectedClass {
    /// Forms on the base ring, one coefficient per power of `hbar`.
    pub series: HbarSeries,
    /// De Rham class of the sum of the coefficients.
    pub class: CohomologyClass,
}

/// Drop `pd(e)` terms and the `nabla_E(phi)` pieces of the reduction of `e^S`,
/// then apply the orientation `u(e_r ... e_1) = 1`.
pub fn project_class(g: &ToyGeometry, s: &HbarSeries, orientation: Orientation) -> Result<ProjectedClass, ToyError> {
    scalar_correction(g, s)?;
    let sig = g.sig().clone();
    let (n, r) = (g.n(), g.r());
    let red = reducer(g, false)?;
    let top = (0..r).rev().fold(Poly::one(&sig), |acc, j| &acc * &g.e(j));
    let base = g.base_sig().clone();
    let mut series = HbarSeries::zero(&base, s.order());
    for (k, p) in s.exp()?.terms() {
        let reduced = red.reduce(p).filter(|m| m.count(&sig, VarKind::Vector) == 0);
        let mut out = Poly::zero(&sig);
        for (m, c) in reduced.terms() {
            if (0..r).any(|j| m.0[n + j] != 1) {
                continue;
            }
            let mut rest = m.clone();
            for j in 0..r {
                rest.0[n + j] = 0;
            }
            let a = unit(p, &rest);
            let sign = (&top * &a).coefficient(m);
            out = out + &a.scale(&(c / &sign * orientation.sign()));
        }
        series.add_at(*k, &g.to_base(&out)?);
    }
    let representative = series.terms().values().fold(Poly::zero(&base), |acc, p| acc + p);
    let class = CohomologyClass { representative, complex: ComplexTag::DeRham, degree: r as i32, bounds: Bounds::default() };
    Ok(ProjectedClass { series, class })
}
