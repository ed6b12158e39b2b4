//! Cohomology on bounded slices of cochains.
//!
//! A slice holds the monomials of one degree whose generator exponents fit
//! the polynomial-degree bound and Laurent window, with at most `max_weight`
//! symbols. Coboundaries are searched one step wider than the cocycles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{mono_form_degree, total_d, valid_mono, DGAlgebra, Monomial, Poly, Signature, VarKind, Q};
use crate::connection::{apply_d_fast, RightConnection};
use crate::polyvector::schouten;

use super::linalg::{Echelon, SparseVec};
use super::series::dr_degree;
use super::QuantisationError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub poly_degree: usize,
    pub laurent_window: usize,
    #[serde(default = "default_max_weight")]
    pub max_weight: usize,
}

fn default_max_weight() -> usize {
    4
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { poly_degree: 8, laurent_window: 8, max_weight: default_max_weight() }
    }
}

impl Bounds {
    pub fn new(poly_degree: usize, laurent_window: usize) -> Self {
        Bounds { poly_degree, laurent_window, ..Default::default() }
    }

    pub fn widened(&self) -> Self {
        Bounds {
            poly_degree: self.poly_degree + 1,
            laurent_window: self.laurent_window + 1,
            max_weight: self.max_weight + 1,
        }
    }

    /// Does the monomial fit these bounds?
    pub fn admits(&self, sig: &Signature, m: &Monomial) -> bool {
        let mut poly = 0usize;
        let mut weight = 0usize;
        for (v, &e) in m.0.iter().enumerate() {
            if sig.invertible(v) {
                if e.unsigned_abs() as usize > self.laurent_window {
                    return false;
                }
            } else if sig.kind(v) == VarKind::Gen {
                poly += e as usize;
            } else {
                weight += e as usize;
            }
        }
        poly <= self.poly_degree && weight <= self.max_weight
    }
}

/// A cochain complex on which bounded cohomology is computed.
pub enum Complex<'a> {
    /// Forms with `d + delta`, graded by total degree.
    DeRham(&'a DGAlgebra),
    /// Polyvectors with the right de Rham operator `D`, graded by `DR^r`-degree.
    RightDeRham(&'a RightConnection),
    /// Polyvectors with `delta + [pi, -]`; `filtered` drops weight zero.
    PoissonTangent { alg: &'a DGAlgebra, pi: Poly, filtered: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplexTag {
    DeRham,
    RightDeRham,
    PoissonTangent,
    FilteredPoissonTangent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    pub representative: Poly,
    pub complex: ComplexTag,
    pub degree: i32,
    pub bounds: Bounds,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassVerdict {
    Zero { primitive: Poly },
    NonzeroWithinBounds,
}

impl Complex<'_> {
    pub fn tag(&self) -> ComplexTag {
        match self {
            Complex::DeRham(_) => ComplexTag::DeRham,
            Complex::RightDeRham(_) => ComplexTag::RightDeRham,
            Complex::PoissonTangent { filtered: false, .. } => ComplexTag::PoissonTangent,
            Complex::PoissonTangent { filtered: true, .. } => ComplexTag::FilteredPoissonTangent,
        }
    }

    fn sig(&self) -> &std::sync::Arc<Signature> {
        match self {
            Complex::DeRham(a) | Complex::PoissonTangent { alg: a, .. } => a.sig(),
            Complex::RightDeRham(c) => c.sig(),
        }
    }

    pub fn differential(&self, u: &Poly) -> Poly {
        match self {
            Complex::DeRham(a) => total_d(a, u),
            Complex::RightDeRham(c) => apply_d_fast(c, u),
            Complex::PoissonTangent { alg, pi, .. } => schouten(&(alg.delta_polyvector() + pi), u),
        }
    }

    pub fn degree_of(&self, m: &Monomial) -> i32 {
        match self {
            Complex::DeRham(a) => mono_form_degree(a.sig(), m),
            _ => dr_degree(self.sig(), m),
        }
    }

    fn symbol_kind(&self) -> VarKind {
        match self {
            Complex::DeRham(_) => VarKind::Form,
            _ => VarKind::Vector,
        }
    }

    fn min_weight(&self) -> usize {
        match self {
            Complex::PoissonTangent { filtered: true, .. } => 1,
            _ => 0,
        }
    }
}

/// Cochain monomials of the given degree within the bounds.
pub fn cochain_slice(complex: &Complex<'_>, degree: i32, bounds: &Bounds) -> Vec<Monomial> {
    let sig = complex.sig().clone();
    let kind = complex.symbol_kind();
    let vars: Vec<usize> =
        (0..sig.nvars()).filter(|&v| sig.kind(v) == VarKind::Gen || sig.kind(v) == kind).collect();
    let mut out = Vec::new();
    let mut cur = Monomial::one(sig.nvars());
    enumerate(&sig, bounds, &vars, 0, 0, 0, &mut cur, &mut |m| {
        if m.count(&sig, kind) as usize >= complex.min_weight() && complex.degree_of(m) == degree && valid_mono(&sig, m) {
            out.push(m.clone());
        }
    });
    out
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    sig: &Signature,
    b: &Bounds,
    vars: &[usize],
    i: usize,
    poly: usize,
    weight: usize,
    cur: &mut Monomial,
    f: &mut dyn FnMut(&Monomial),
) {
    if i == vars.len() {
        f(cur);
        return;
    }
    let v = vars[i];
    let (lo, hi): (i32, i32) = if sig.invertible(v) {
        (-(b.laurent_window as i32), b.laurent_window as i32)
    } else if sig.kind(v) == VarKind::Gen {
        (0, if sig.odd(v) { 1 } else { (b.poly_degree - poly) as i32 })
    } else {
        (0, if sig.odd(v) { 1 } else { (b.max_weight - weight) as i32 })
    };
    for e in lo..=hi {
        let (p, w) = if sig.invertible(v) {
            (poly, weight)
        } else if sig.kind(v) == VarKind::Gen {
            (poly + e as usize, weight)
        } else {
            (poly, weight + e as usize)
        };
        if p > b.poly_degree || w > b.max_weight {
            break;
        }
        cur.0[v] = e;
        enumerate(sig, b, vars, i + 1, p, w, cur, f);
    }
    cur.0[v] = 0;
}

fn sparse(p: &Poly) -> SparseVec<Monomial> {
    p.terms().clone()
}

fn combine(sig: &std::sync::Arc<Signature>, basis: &[Monomial], coeffs: &BTreeMap<usize, Q>) -> Poly {
    let mut out = Poly::zero(sig);
    for (j, c) in coeffs {
        out.add_term(basis[*j].clone(), c.clone());
    }
    out
}

fn image_echelon(complex: &Complex<'_>, source: &[Monomial]) -> Echelon<Monomial> {
    let sig = complex.sig().clone();
    let one = Q::from_integer(1.into());
    let mut ech = Echelon::new();
    for m in source {
        ech.insert(sparse(&complex.differential(&Poly::monomial(&sig, m.clone(), one.clone()))));
    }
    ech
}

/// Representatives of a basis of cocycles of `degree` in the slice modulo
/// coboundaries from the widened slice one degree lower.
pub fn cohomology_basis(complex: &Complex<'_>, degree: i32, bounds: &Bounds) -> Vec<CohomologyClass> {
    let sig = complex.sig().clone();
    let one = Q::from_integer(1.into());
    let target = cochain_slice(complex, degree, bounds);
    let mut cocycles = Echelon::new();
    for m in &target {
        cocycles.insert(sparse(&complex.differential(&Poly::monomial(&sig, m.clone(), one.clone()))));
    }
    let mut span = image_echelon(complex, &cochain_slice(complex, degree - 1, &bounds.widened()));
    let mut out = Vec::new();
    for rel in cocycles.kernel() {
        let z = combine(&sig, &target, rel);
        if span.insert(sparse(&z)) {
            out.push(CohomologyClass { representative: z, complex: complex.tag(), degree, bounds: *bounds });
        }
    }
    out
}

/// Decide whether a cocycle bounds within the widened slice.
pub fn cohomology_class_test(complex: &Complex<'_>, class: &CohomologyClass) -> Result<ClassVerdict, QuantisationError> {
    let sig = complex.sig().clone();
    let rep = &class.representative;
    let d = complex.differential(rep);
    if !d.is_zero() {
        return Err(QuantisationError::NotCocycle(d.to_string()));
    }
    if rep.is_zero() {
        return Ok(ClassVerdict::Zero { primitive: Poly::zero(&sig) });
    }
    let fits = rep.terms().keys().all(|m| class.bounds.admits(&sig, m) && complex.degree_of(m) == class.degree);
    let source = cochain_slice(complex, class.degree - 1, &class.bounds.widened());
    let ech = image_echelon(complex, &source);
    match ech.solve(&sparse(rep)) {
        Some(c) => Ok(ClassVerdict::Zero { primitive: combine(&sig, &source, &c) }),
        None if fits => Ok(ClassVerdict::NonzeroWithinBounds),
        None => Err(QuantisationError::Inconclusive),
    }
}
