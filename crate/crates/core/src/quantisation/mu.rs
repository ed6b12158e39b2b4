//! The compatibility map `mu(-, S)`, its derivative `nu` and the
//! compatibility test `[mu(omega, S)] = [sigma(S)]`.
//!
//! A form `a0 dg1 ... dgn` is sent to `a0 E_g1(E_g2(... E_gn(1)))` where
//! `E_g(u) = D_S(g u) - (-1)^|g| g D_S(u) - delta(g) u`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{Monomial, Poly, VarKind, Q};
use crate::connection::RightConnection;

use super::cohomology::{cochain_slice, Bounds, Complex};
use super::linalg::Echelon;
use super::qme::{twisted_differential, TwistedDifferential};
use super::series::{sigma, HbarSeries, TangentElement};
use super::QuantisationError;

/// Split a form monomial into its function coefficient and its `dd` word,
/// even symbols repeated by their exponent.
fn split_form(conn: &RightConnection, m: &Monomial, c: &Q) -> Result<(Poly, Vec<usize>), QuantisationError> {
    let sig = conn.sig().clone();
    let mut a0 = Monomial::one(sig.nvars());
    let mut word = Vec::new();
    for (v, &e) in m.0.iter().enumerate() {
        match sig.kind(v) {
            VarKind::Gen => a0.0[v] = e,
            VarKind::Form => word.extend(std::iter::repeat_n(sig.base(v), e as usize)),
            VarKind::Vector if e != 0 => {
                return Err(QuantisationError::BadForm(Poly::monomial(&sig, m.clone(), c.clone()).to_string()))
            }
            VarKind::Vector => {}
        }
    }
    Ok((Poly::monomial(&sig, a0, c.clone()), word))
}

fn left_mul(p: &Poly, u: &HbarSeries) -> HbarSeries {
    u.map(|c| p * c)
}

struct Ops<'a> {
    conn: &'a RightConnection,
    ds: TwistedDifferential<'a>,
}

impl Ops<'_> {
    fn gen(&self, g: usize) -> Poly {
        let sig = self.conn.sig();
        Poly::var(sig, sig.gen_var(g))
    }

    /// `[op, g] u` for the even operator `op`, minus `delta(g) u`.
    fn commutator(&self, g: usize, u: &HbarSeries, op: &dyn Fn(&HbarSeries) -> HbarSeries, with_delta: bool) -> HbarSeries {
        let sig = self.conn.sig();
        let x = self.gen(g);
        let gu = left_mul(&x, u);
        let mut out = op(&gu);
        let t = left_mul(&x, &op(u));
        out = if sig.odd(sig.gen_var(g)) { out.add(&t) } else { out.sub(&t) };
        if with_delta {
            out = out.sub(&left_mul(self.conn.alg().delta_of(g), u));
        }
        out
    }

    fn e(&self, g: usize, u: &HbarSeries) -> HbarSeries {
        self.commutator(g, u, &|v| self.ds.apply(v), true)
    }

    /// The `eps`-derivative of `E_g` along `rho`.
    fn e_prime(&self, g: usize, u: &HbarSeries, rho: &HbarSeries) -> HbarSeries {
        let f = |v: &HbarSeries| self.ds.apply(&rho.mul(v)).sub(&rho.mul(&self.ds.apply(v)));
        self.commutator(g, u, &f, false)
    }
}

fn for_each_term(
    omega: &HbarSeries,
    conn: &RightConnection,
    mut f: impl FnMut(i64, &Poly, &[usize]) -> HbarSeries,
    order: i64,
) -> Result<HbarSeries, QuantisationError> {
    let mut out = HbarSeries::zero(conn.sig(), order);
    for (k, p) in omega.terms() {
        for (m, c) in p.terms() {
            let (a0, word) = split_form(conn, m, c)?;
            out = out.add(&f(*k, &a0, &word));
        }
    }
    Ok(out)
}

/// `mu(omega, S)` for an `hbar`-series of forms built from generators and `dd` symbols.
pub fn mu_quantised(omega: &HbarSeries, s: &HbarSeries, conn: &RightConnection) -> Result<HbarSeries, QuantisationError> {
    let ops = Ops { conn, ds: twisted_differential(s, conn)? };
    let order = s.order();
    for_each_term(
        omega,
        conn,
        |k, a0, word| {
            let mut u = HbarSeries::one(conn.sig(), order);
            for &g in word.iter().rev() {
                u = ops.e(g, &u);
            }
            left_mul(a0, &u).shift(k)
        },
        order,
    )
}

/// `nu(omega, S, rho)`, the `eps`-coefficient of `mu(omega, S + eps rho)` for `rho` of even degree.
pub fn nu(
    omega: &HbarSeries,
    s: &HbarSeries,
    rho: &HbarSeries,
    conn: &RightConnection,
) -> Result<HbarSeries, QuantisationError> {
    let ops = Ops { conn, ds: twisted_differential(s, conn)? };
    let order = s.order();
    for_each_term(
        omega,
        conn,
        |k, a0, word| {
            // (value, eps-part) through the nested composition
            let mut u = HbarSeries::one(conn.sig(), order);
            let mut du = HbarSeries::zero(conn.sig(), order);
            for &g in word.iter().rev() {
                du = ops.e(g, &du).add(&ops.e_prime(g, &u, rho));
                u = ops.e(g, &u);
            }
            left_mul(a0, &du).shift(k)
        },
        order,
    )
}

/// `mu(omega, -)` on the dual-number point `S + eps rho`.
pub fn mu_dual(omega: &HbarSeries, point: &TangentElement, conn: &RightConnection) -> Result<TangentElement, QuantisationError> {
    Ok(TangentElement {
        base: mu_quantised(omega, &point.base, conn)?,
        epsilon_part: nu(omega, &point.base, &point.epsilon_part, conn)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompatibilityVerdict {
    Compatible,
    IncompatibleWithinBounds,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatibilityReport {
    pub verdict: CompatibilityVerdict,
    pub mu: HbarSeries,
    pub sigma: HbarSeries,
    /// `mu(omega, S) - sigma(S)`.
    pub difference: HbarSeries,
    /// `y` with `D_S(y) = difference`, when found.
    pub primitive: Option<HbarSeries>,
    pub bounds: Bounds,
}

/// Is `mu(omega, S) - sigma(S)` a `D_S`-coboundary of `(G*F~)^2 T_S` within the bounds?
pub fn compatibility_check(
    omega: &HbarSeries,
    s: &HbarSeries,
    conn: &RightConnection,
    bounds: &Bounds,
) -> Result<CompatibilityReport, QuantisationError> {
    let sig = conn.sig().clone();
    let order = s.order();
    let mu = mu_quantised(omega, s, conn)?;
    let sg = sigma(s).epsilon_part;
    let difference = mu.sub(&sg);
    let report = |verdict, primitive| CompatibilityReport {
        verdict,
        mu: mu.clone(),
        sigma: sg.clone(),
        difference: difference.clone(),
        primitive,
        bounds: *bounds,
    };
    if difference.is_zero() {
        return Ok(report(CompatibilityVerdict::Compatible, Some(HbarSeries::zero(&sig, order))));
    }
    let ds = twisted_differential(s, conn)?;
    let complex = Complex::RightDeRham(conn);
    let degrees: Vec<i32> = difference.iter_terms().map(|(_, m)| complex.degree_of(m)).collect();
    let degree = degrees[0];
    let slice = if degrees.iter().all(|&d| d == degree) { cochain_slice(&complex, degree - 1, bounds) } else { Vec::new() };
    let mut cols: Vec<(i64, Monomial)> = Vec::new();
    for k in 1..=order {
        for m in &slice {
            if (m.count(&sig, VarKind::Vector) as i64) <= 2 * k - 2 {
                cols.push((k, m.clone()));
            }
        }
    }
    let one = Q::from_integer(1.into());
    let mut ech = Echelon::new();
    for (k, m) in &cols {
        let y = HbarSeries::term(*k, Poly::monomial(&sig, m.clone(), one.clone()), order);
        ech.insert(ds.apply(&y).to_sparse());
    }
    if let Some(c) = ech.solve(&difference.to_sparse()) {
        let mut y: BTreeMap<(i64, Monomial), Q> = BTreeMap::new();
        for (j, x) in c {
            y.insert(cols[j].clone(), x);
        }
        return Ok(report(CompatibilityVerdict::Compatible, Some(HbarSeries::from_sparse(&sig, &y, order))));
    }
    let fits = difference.iter_terms().all(|(_, m)| bounds.admits(&sig, m));
    let verdict = if fits { CompatibilityVerdict::IncompatibleWithinBounds } else { CompatibilityVerdict::Inconclusive };
    Ok(report(verdict, None))
}
