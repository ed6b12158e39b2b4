//! Strict toy models built from a free bundle `E` with pairing `Q`,
//! connection `nabla_E` and section `phi` over a coordinate ring, together
//! with the Gorenstein reduction and the resulting class formulas.

mod geometry;
mod reduce;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{qf, AlgebraError, DGAlgebra, Poly};
use crate::polyvector::PoissonStructure;
use crate::quantisation::QuantisationError;

pub use geometry::{e_name, xi_name, Curvature, ToyGeometry, ToyGeometrySpec};
pub use reduce::{class_formula, closed_form, gorenstein_reduce, project_class, ClassFormula, Orientation, ProjectedClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToyError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("det Q = `{0}` is not a unit")]
    NotUnit(String),
    #[error("Q is not compatible with nabla_E at ({j}, {l}): defect `{defect}`")]
    NotCompatible { j: usize, l: usize, defect: String },
    #[error("d Q(phi, phi) = `{0}` is nonzero")]
    PhiNotIsotropic(String),
    #[error("S - hbar pi = `{0}` is not a scalar series")]
    NotScalarCorrection(String),
    #[error("closed form mismatch at `{0}`")]
    Mismatch(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Quantisation(#[from] QuantisationError),
}

/// `delta(e_j) = Q(phi, e_j)` and `delta(xi_i) = -(nabla_i phi)` on the frame.
pub fn build_dg_scheme(g: &ToyGeometry) -> Result<DGAlgebra, ToyError> {
    g.validate()?;
    let (n, r) = (g.n(), g.r());
    let sig = g.sig();
    let mut values = BTreeMap::new();
    for j in 0..r {
        let v = (0..r).fold(Poly::zero(sig), |acc, l| acc + &(&g.phi()[l] * &g.q()[l][j]));
        values.insert(e_name(j), v);
    }
    for i in 0..n {
        let v = g.nabla_phi(i).iter().enumerate().fold(Poly::zero(sig), |acc, (l, f)| acc - &(f * &g.e(l)));
        values.insert(xi_name(&g.spec().base[i]), v);
    }
    Ok(DGAlgebra::with_differential(sig, values)?)
}

/// Replace each `dx_i` by `pd(xi_i)`.
pub fn forms_to_xi_vectors(g: &ToyGeometry, p: &Poly) -> Poly {
    let sig = g.sig().clone();
    p.substitute(&|v| if v >= sig.ngens() && v < sig.ngens() + g.n() { Some(g.pd_xi(v - sig.ngens())) } else { None })
}

/// The four pieces of `pi`: `sum pd(x_i) pd(xi_i)`, the `Q` term, the
/// connection term and the curvature term.
pub fn poisson_terms(g: &ToyGeometry) -> Result<[Poly; 4], ToyError> {
    let (n, r) = (g.n(), g.r());
    let sig = g.sig();
    let mut t0 = Poly::zero(sig);
    for i in 0..n {
        t0 = t0 + &(&g.pd_x(i) * &g.pd_xi(i));
    }
    let mut tq = Poly::zero(sig);
    let mut tc = Poly::zero(sig);
    for j in 0..r {
        for l in 0..r {
            tq = tq + &(&(&g.q()[j][l] * &g.pd_e(j)) * &g.pd_e(l));
            for i in 0..n {
                tc = tc + &(&(&(g.c(l, j, i) * &g.e(l)) * &g.pd_e(j)) * &g.pd_xi(i));
            }
        }
    }
    let tl = forms_to_xi_vectors(g, &g.curvature()?.q_kappa_element(g));
    Ok([t0, tq, tc, tl])
}

/// `pi = sum pd(x_i) pd(xi_i) - (1/2) sum Q_jl pd(e_j) pd(e_l)
///      + sum c_lji e_l pd(e_j) pd(xi_i) + Q(kappa)[dx -> pd(xi)]`.
pub fn build_poisson(g: &ToyGeometry) -> Result<PoissonStructure, ToyError> {
    g.validate()?;
    let [t0, tq, tc, tl] = poisson_terms(g)?;
    Ok(PoissonStructure::strict(t0 + &tq.scale(&qf(-1, 2)) + &tc + &tl))
}
