//! The quantum master equation `D(e^S) = 0` and its Maurer-Cartan form.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::One;
use serde::Serialize;

use crate::algebra::{Poly, VarKind, Q};
use crate::connection::{apply_d_fast, linfty_bracket, linfty_bracket_component, RightConnection};
use crate::polyvector::{mc_check, PoissonStructure};

use super::cohomology::{Bounds, CohomologyClass, ComplexTag};
use super::series::HbarSeries;
use super::QuantisationError;

/// A solution candidate `S` in `F~^2` of `DR^r`-degree zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quantisation {
    series: HbarSeries,
    verified: bool,
}

impl Quantisation {
    pub fn new(series: HbarSeries) -> Result<Self, QuantisationError> {
        if !series.in_f_tilde(2) || !series.has_dr_degree(0) {
            return Err(QuantisationError::NotQuantisation);
        }
        Ok(Quantisation { series, verified: false })
    }

    /// Check the quantum master equation to the series' order and record the verdict.
    pub fn verify(mut self, conn: &RightConnection) -> Result<Self, QuantisationError> {
        self.verified = qme_residual(&self.series, conn)?.is_zero();
        Ok(self)
    }

    pub fn series(&self) -> &HbarSeries {
        &self.series
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    /// The underlying `pi_hbar`: the `G`-level zero part.
    pub fn poisson(&self) -> HbarSeries {
        self.series.level_part(0)
    }
}

/// `pi_hbar = sum_j hbar^{j-1} pi_j`.
pub fn poisson_series(pi: &PoissonStructure, order: i64) -> HbarSeries {
    let sig = pi.components().values().next().map(|p| p.sig().clone());
    let Some(sig) = sig else {
        panic!("Poisson structure without components");
    };
    let mut s = HbarSeries::zero(&sig, order);
    for (j, p) in pi.components() {
        s.add_at(*j as i64 - 1, p);
    }
    s
}

/// Read a Poisson structure from a series whose terms are all `hbar^{j-1}` times weight `j`.
pub fn poisson_from_series(s: &HbarSeries) -> Result<PoissonStructure, QuantisationError> {
    let mut comps: BTreeMap<usize, Poly> = BTreeMap::new();
    for (k, p) in s.terms() {
        let w = *k + 1;
        let bad = p.filter(|m| m.count(s.sig(), VarKind::Vector) as i64 != w);
        if w < 2 || !bad.is_zero() {
            return Err(QuantisationError::NotClassical(format!("{}", HbarSeries::term(*k, p.clone(), s.order()))));
        }
        comps.insert(w as usize, p.clone());
    }
    PoissonStructure::from_components(comps).map_err(|e| QuantisationError::NotClassical(e.to_string()))
}

/// `D` applied coefficientwise.
pub fn apply_d_series(conn: &RightConnection, s: &HbarSeries) -> HbarSeries {
    s.map(|p| apply_d_fast(conn, p))
}

/// `D(e^S)` to the order of `S`.
pub fn qme_residual(s: &HbarSeries, conn: &RightConnection) -> Result<HbarSeries, QuantisationError> {
    Ok(apply_d_series(conn, &s.exp()?))
}

/// `e^{-S} D(e^S)`.
pub fn mc_expression(s: &HbarSeries, conn: &RightConnection) -> Result<HbarSeries, QuantisationError> {
    Ok(s.neg().exp()?.mul(&qme_residual(s, conn)?))
}

fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, i| acc * Q::from_integer((i as i64).into()))
}

/// `[S, ..., S]_n` for an even series `S`, expanded over its `hbar` coefficients
/// with `bracket` the polyvector-level `n`-ary operation.
fn power_with(s: &HbarSeries, n: usize, bracket: &dyn Fn(&[Poly]) -> Poly) -> HbarSeries {
    let items: Vec<(i64, &Poly)> = s.terms().iter().map(|(k, p)| (*k, p)).collect();
    let mut out = HbarSeries::zero(s.sig(), s.order());
    for ms in (0..items.len()).combinations_with_replacement(n) {
        let k: i64 = ms.iter().map(|&i| items[i].0).sum();
        if k > s.order() {
            continue;
        }
        let orderings = ms.iter().dedup_with_count().fold(factorial(n), |acc, (c, _)| acc / factorial(c));
        let args: Vec<Poly> = ms.iter().map(|&i| items[i].1.clone()).collect();
        out.add_at(k, &bracket(&args).scale(&orderings));
    }
    out
}

/// `[S, ..., S]_n` for the full operator `D`; `S` must be even.
pub fn bracket_power(conn: &RightConnection, s: &HbarSeries, n: usize) -> HbarSeries {
    power_with(s, n, &|args| linfty_bracket(conn, args))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QmeMcReport {
    pub pass: bool,
    pub order: i64,
    pub lhs: String,
    pub rhs: String,
}

/// Compare `e^{-S} D(e^S)` with `sum_n [S, ..., S]_n / n!`.
pub fn qme_mc_equivalence(s: &HbarSeries, conn: &RightConnection) -> Result<QmeMcReport, QuantisationError> {
    let lhs = mc_expression(s, conn)?;
    let mut rhs = HbarSeries::zero(s.sig(), s.order());
    if !s.is_zero() {
        for n in 1..=s.order().max(1) as usize {
            let t = bracket_power(conn, s, n).scale(&(Q::one() / factorial(n)));
            rhs = rhs.add(&t);
        }
    }
    Ok(QmeMcReport { pass: lhs == rhs, order: s.order(), lhs: lhs.to_string(), rhs: rhs.to_string() })
}

/// The operator `u -> e^{-S} D(e^S u)`.
pub struct TwistedDifferential<'a> {
    conn: &'a RightConnection,
    exp_s: HbarSeries,
    exp_minus_s: HbarSeries,
}

impl TwistedDifferential<'_> {
    pub fn apply(&self, u: &HbarSeries) -> HbarSeries {
        let inner = self.exp_s.mul(u);
        self.exp_minus_s.mul(&apply_d_series(self.conn, &inner))
    }

    pub fn order(&self) -> i64 {
        self.exp_s.order()
    }
}

pub fn twisted_differential<'a>(
    s: &HbarSeries,
    conn: &'a RightConnection,
) -> Result<TwistedDifferential<'a>, QuantisationError> {
    Ok(TwistedDifferential { conn, exp_s: s.exp()?, exp_minus_s: s.neg().exp()? })
}

/// `sum_{n >= 1} [pi_hbar, ..., pi_hbar]_{nabla_{n+1}, n} / n!`.
pub fn obstruction_cochain(
    conn: &RightConnection,
    pi: &PoissonStructure,
    order: i64,
) -> Result<HbarSeries, QuantisationError> {
    let report = mc_check(conn.alg(), pi);
    if !report.pass {
        let w = report.violations.iter().map(|v| format!("weight {}: {}", v.weight, v.residual)).collect::<Vec<_>>();
        return Err(QuantisationError::NotMaurerCartan(w.join("; ")));
    }
    let s = poisson_series(pi, order);
    let mut out = HbarSeries::zero(s.sig(), order);
    for n in 1..conn.max_k() {
        let t = power_with(&s, n, &|args| linfty_bracket_component(conn, n + 1, args));
        out = out.add(&t.scale(&(Q::one() / factorial(n))));
    }
    Ok(out)
}

/// The first-order obstruction with its class in `H^1(F^1 T_pi Pol)`.
#[derive(Clone, Debug)]
pub struct Obstruction {
    pub cochain: HbarSeries,
    pub class: CohomologyClass,
}

pub fn obstruction(
    conn: &RightConnection,
    pi: &PoissonStructure,
    order: i64,
    bounds: Bounds,
) -> Result<Obstruction, QuantisationError> {
    let cochain = obstruction_cochain(conn, pi, order)?;
    let sig = conn.sig().clone();
    let rep = cochain.terms().values().fold(Poly::zero(&sig), |a, p| a + p);
    let class = CohomologyClass {
        representative: rep,
        complex: ComplexTag::FilteredPoissonTangent,
        degree: 1,
        bounds,
    };
    Ok(Obstruction { cochain, class })
}

