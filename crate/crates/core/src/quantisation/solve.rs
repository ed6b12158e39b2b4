//! Order-by-order lifting of `pi_hbar` to a solution of the quantum master
//! equation, one `G`-level at a time.
//!
//! At level `i` the correction `c` solves `delta_pi(c) = -level_i(e^{-S} D(e^S))`
//! with `delta_pi = [delta + pi_hbar, -]`, over `hbar^k b`, `b` of weight
//! `k + 1 - i` and `DR^r`-degree zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{Monomial, Poly, Signature, VarKind, Q};
use crate::connection::RightConnection;
use crate::polyvector::{mc_check, schouten, PoissonStructure};

use super::cohomology::{cochain_slice, Bounds, Complex};
use super::linalg::Echelon;
use super::qme::{mc_expression, obstruction, poisson_series, Obstruction, Quantisation};
use super::series::HbarSeries;
use super::QuantisationError;

/// Column order for the correction search; earlier columns are preferred.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    WeightThenDegree,
    DegreeThenWeight,
}

#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solved(Quantisation),
    /// No first-order correction: the obstruction class is nonzero within bounds.
    Obstructed { obstruction: Obstruction, residual: HbarSeries },
    /// No correction at a level `>= 2` within bounds.
    Unresolved { level: i64, residual: HbarSeries },
}

fn poly_degree(sig: &Signature, m: &Monomial) -> i64 {
    (0..sig.nvars()).filter(|&v| sig.kind(v) == VarKind::Gen).map(|v| m.0[v].unsigned_abs() as i64).sum()
}

/// `delta_pi(hbar^k b)` to the given order.
fn delta_pi(conn: &RightConnection, pi: &PoissonStructure, k: i64, b: &Poly, order: i64) -> HbarSeries {
    let mut out = HbarSeries::term(k, schouten(&conn.alg().delta_polyvector(), b), order);
    for (j, p) in pi.components() {
        out.add_at(k + *j as i64 - 1, &schouten(p, b));
    }
    out
}

pub fn solve_qme(
    pi: &PoissonStructure,
    conn: &RightConnection,
    order: i64,
    bounds: &Bounds,
    tie: TieBreak,
) -> Result<SolveOutcome, QuantisationError> {
    let report = mc_check(conn.alg(), pi);
    if !report.pass {
        let w = report.violations.iter().map(|v| format!("weight {}: {}", v.weight, v.residual)).collect::<Vec<_>>();
        return Err(QuantisationError::NotMaurerCartan(w.join("; ")));
    }
    let sig = conn.sig().clone();
    let mut s = poisson_series(pi, order);
    let slice = cochain_slice(&Complex::RightDeRham(conn), 0, bounds);
    let one = Q::from_integer(1.into());
    for level in 1..=order + 1 {
        let m = mc_expression(&s, conn)?;
        let lower = m.filter(|k, w| k + 1 - w < level);
        if !lower.is_zero() {
            return Err(QuantisationError::LowerLevel(level, lower.to_string()));
        }
        let target = m.level_part(level);
        if target.is_zero() {
            continue;
        }
        let mut cols: Vec<((i64, i64, i64), i64, Monomial)> = Vec::new();
        for k in (level - 1).max(1)..=order {
            let w = k + 1 - level;
            for b in slice.iter().filter(|b| b.count(&sig, VarKind::Vector) as i64 == w) {
                let d = poly_degree(&sig, b);
                let key = match tie {
                    TieBreak::WeightThenDegree => (w, d, k),
                    TieBreak::DegreeThenWeight => (d, w, k),
                };
                cols.push((key, k, b.clone()));
            }
        }
        cols.sort();
        let mut ech = Echelon::new();
        for (_, k, b) in &cols {
            let image = delta_pi(conn, pi, *k, &Poly::monomial(&sig, b.clone(), one.clone()), order);
            ech.insert(image.level_part(level).to_sparse());
        }
        let Some(c) = ech.solve(&target.neg().to_sparse()) else {
            if level == 1 {
                return Ok(SolveOutcome::Obstructed { obstruction: obstruction(conn, pi, order, *bounds)?, residual: target });
            }
            return Ok(SolveOutcome::Unresolved { level, residual: target });
        };
        let mut corr: BTreeMap<(i64, Monomial), Q> = BTreeMap::new();
        for (j, x) in c {
            corr.insert((cols[j].1, cols[j].2.clone()), x);
        }
        s = s.add(&HbarSeries::from_sparse(&sig, &corr, order));
    }
    let q = Quantisation::new(s)?.verify(conn)?;
    if q.is_verified() {
        Ok(SolveOutcome::Solved(q))
    } else {
        let residual = mc_expression(q.series(), conn)?;
        Ok(SolveOutcome::Unresolved { level: order + 1, residual })
    }
}
