//! Shifted polyvectors: products of vector symbols `pd(g)` with function
//! coefficients, the Schouten-Nijenhuis bracket, contraction with forms, the
//! Maurer-Cartan check and strict nondegeneracy.
//!
//! A polyvector is a [`Poly`] in generators and vector symbols. The symbol
//! `pd(g)` has parity `deg g + 1`, polyvector degree `-deg g` and weight 1.

use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Monomial, DGAlgebra, Poly, Q, VarKind};

/// Alias used where a value is a polyvector.
pub type Polyvector = Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyvectorError {
    #[error("weight mismatch: polyvector has weight {0:?}, form has weight {1:?}")]
    WeightMismatch(Option<i32>, Option<i32>),
    #[error("only strict Poisson structures are supported here")]
    NotStrict,
    #[error("component of weight {0} is not a homogeneous polyvector of that weight")]
    BadComponent(usize),
}

/// Contract the form `omega` into `u`, with `u` written to the left of `omega`.
/// Each `dh` is paired with the adjacent `pd(h)` by a right derivative, so
/// `contract(u, dh1 dh2 c) = d^R_{h2} d^R_{h1}(u) c`.
pub fn contract(u: &Poly, omega: &Poly) -> Poly {
    let sig = u.sig().clone();
    let n = sig.ngens();
    let mut out = Poly::zero(&sig);
    for (m, c) in omega.terms() {
        let mut coeff = Monomial::one(sig.nvars());
        coeff.0[..n].copy_from_slice(&m.0[..n]);
        let mut acc = u.clone();
        let mut word_odd = false;
        for i in 0..n {
            let e = m.0[sig.form_var(i)];
            for _ in 0..e {
                acc = acc.dright(sig.vector_var(i));
            }
            if e % 2 == 1 && sig.odd(sig.form_var(i)) {
                word_odd = !word_odd;
            }
            if acc.is_zero() {
                break;
            }
        }
        if acc.is_zero() {
            continue;
        }
        let a = Poly::monomial(&sig, coeff, c.clone());
        let t = &acc * &a;
        out = out + &if word_odd && a.parity() == Some(true) { -t } else { t };
    }
    out
}

/// Full pairing: weight-`q` parts of `u` against weight-`q` parts of `omega`.
pub fn pairing(u: &Poly, omega: &Poly) -> Poly {
    let mut out = Poly::zero(u.sig());
    for q in 0..=u.max_vector_weight().min(omega.max_form_weight()) {
        let (a, b) = (u.weight_part(VarKind::Vector, q), omega.weight_part(VarKind::Form, q));
        if !a.is_zero() && !b.is_zero() {
            out = out + &contract(&a, &b);
        }
    }
    out
}

/// Pair the form `omega` written to the left of `u`: each `dh` meets the
/// adjacent `pd(h)` by a left derivative, so `pair_left(c dh1 dh2, u) = c d^L_{h1} d^L_{h2}(u)`.
pub fn pair_left(omega: &Poly, u: &Poly) -> Poly {
    let sig = u.sig().clone();
    let n = sig.ngens();
    let mut out = Poly::zero(&sig);
    for (m, c) in omega.terms() {
        let mut coeff = Monomial::one(sig.nvars());
        coeff.0[..n].copy_from_slice(&m.0[..n]);
        let mut acc = u.clone();
        for i in (0..n).rev() {
            for _ in 0..m.0[sig.form_var(i)] {
                acc = acc.dleft(sig.vector_var(i));
            }
            if acc.is_zero() {
                break;
            }
        }
        if !acc.is_zero() {
            out = out + &(&Poly::monomial(&sig, coeff, c.clone()) * &acc);
        }
    }
    out
}

/// Pairing of a weight-`p` polyvector with a weight-`p` form.
pub fn evaluate_on_form(u: &Poly, omega: &Poly) -> Result<Poly, PolyvectorError> {
    let (wu, wo) = (u.vector_weight(), omega.form_weight());
    let ok = match (wu, wo) {
        (Some(a), Some(b)) => a == b,
        (None, _) if u.is_zero() => true,
        (_, None) if omega.is_zero() => true,
        _ => false,
    };
    if !ok {
        return Err(PolyvectorError::WeightMismatch(wu, wo));
    }
    Ok(contract(u, omega))
}

/// Schouten-Nijenhuis bracket, normalised so that `[pd(x), x] = 1`.
pub fn schouten(u: &Poly, v: &Poly) -> Poly {
    let sig = u.sig().clone();
    let mut out = Poly::zero(&sig);
    for i in 0..sig.ngens() {
        let (g, t) = (sig.gen_var(i), sig.vector_var(i));
        let a = u.dright(t);
        if !a.is_zero() {
            let b = v.dleft(g);
            if !b.is_zero() {
                out = out + &(&a * &b);
            }
        }
        let a = u.dright(g);
        if !a.is_zero() {
            let b = v.dleft(t);
            if !b.is_zero() {
                out = out - &(&a * &b);
            }
        }
    }
    out
}

/// The algebra differential acting on polyvectors, `[delta, u]`.
pub fn delta_pol(alg: &DGAlgebra, u: &Poly) -> Poly {
    schouten(&alg.delta_polyvector(), u)
}

/// A (-2)-shifted Poisson structure as weight components `pi_j`, `j >= 2`.
#[derive(Clone, Debug)]
pub struct PoissonStructure {
    components: BTreeMap<usize, Poly>,
}

impl PoissonStructure {
    pub fn strict(pi2: Poly) -> Self {
        PoissonStructure { components: BTreeMap::from([(2, pi2)]) }
    }

    /// Split a polyvector into its weight components; weights below 2 are rejected.
    pub fn from_components(components: BTreeMap<usize, Poly>) -> Result<Self, PolyvectorError> {
        for (w, p) in &components {
            if *w < 2 || !(p.is_zero() || p.vector_weight() == Some(*w as i32)) {
                return Err(PolyvectorError::BadComponent(*w));
            }
        }
        Ok(PoissonStructure { components })
    }

    pub fn from_polyvector(p: &Poly) -> Result<Self, PolyvectorError> {
        let mut comps = BTreeMap::new();
        for w in 0..=p.max_vector_weight() {
            let part = p.weight_part(VarKind::Vector, w);
            if !part.is_zero() {
                comps.insert(w as usize, part);
            }
        }
        Self::from_components(comps)
    }

    pub fn components(&self) -> &BTreeMap<usize, Poly> {
        &self.components
    }

    pub fn component(&self, w: usize) -> Option<&Poly> {
        self.components.get(&w)
    }

    pub fn is_strict(&self) -> bool {
        self.components.iter().all(|(w, p)| *w == 2 || p.is_zero())
    }

    pub fn total(&self) -> Option<Poly> {
        let mut it = self.components.values();
        let first = it.next()?.clone();
        Some(it.fold(first, |a, b| a + b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McViolation {
    pub weight: usize,
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct McReport {
    pub pass: bool,
    pub violations: Vec<McViolation>,
}

/// Components of `delta pi_j + 1/2 sum_{a+b=j+1} [pi_a, pi_b]`.
pub fn mc_residuals(alg: &DGAlgebra, pi: &PoissonStructure) -> BTreeMap<usize, Poly> {
    let mut res: BTreeMap<usize, Poly> = BTreeMap::new();
    let half = Q::new(1.into(), 2.into());
    for (w, p) in &pi.components {
        let d = delta_pol(alg, p);
        let e = res.entry(*w).or_insert_with(|| alg.zero());
        *e = e.clone() + &d;
    }
    for (a, pa) in &pi.components {
        for (b, pb) in &pi.components {
            let br = schouten(pa, pb).scale(&half);
            let e = res.entry(a + b - 1).or_insert_with(|| alg.zero());
            *e = e.clone() + &br;
        }
    }
    res.retain(|_, p| !p.is_zero());
    res
}

pub fn mc_check(alg: &DGAlgebra, pi: &PoissonStructure) -> McReport {
    let violations: Vec<McViolation> = mc_residuals(alg, pi)
        .into_iter()
        .map(|(weight, r)| McViolation { weight, residual: r.to_string() })
        .collect();
    McReport { pass: violations.is_empty(), violations }
}

/// Square matrix over the algebra, rows and columns indexed by generators.
pub type Matrix = Vec<Vec<Poly>>;

#[derive(Clone, Debug)]
pub struct NondegeneracyCertificate {
    pub nondegenerate: bool,
    /// Matrix of `dg -> contract(pi_2, dg)`, see [`flat_matrix`].
    pub matrix: Matrix,
    /// Determinant of the matrix with all odd generators set to zero.
    pub reduced_determinant: Poly,
    /// Inverse matrix: `pd(h)` pulls back to `sum_g dg * inverse[g][h]`.
    pub inverse: Option<Matrix>,
}

/// Matrix of `pi_2^flat` with coefficients on the right:
/// `contract(pi_2, dg) = sum_h pd(h) * matrix[h][g]`.
pub fn flat_matrix(pi2: &Poly) -> Matrix {
    let sig = pi2.sig().clone();
    let n = sig.ngens();
    let mut mat = vec![vec![Poly::zero(&sig); n]; n];
    for g in 0..n {
        let v = contract(pi2, &Poly::var(&sig, sig.form_var(g)));
        for (m, c) in v.terms() {
            if let Some(h) = (0..n).find(|&h| m.0[sig.vector_var(h)] == 1) {
                let mut a = m.clone();
                a.0[sig.vector_var(h)] = 0;
                let coeff = Poly::monomial(&sig, a, c.clone());
                let flip = sig.odd(sig.vector_var(h)) && coeff.parity() == Some(true);
                mat[h][g] = &mat[h][g] + &if flip { -coeff } else { coeff };
            }
        }
    }
    mat
}

fn drop_odd(p: &Poly) -> Poly {
    let sig = p.sig().clone();
    p.filter(|m| (0..sig.ngens()).all(|v| m.0[v] == 0 || !sig.odd(v)))
}

/// Determinant of a matrix with pairwise commuting entries.
pub fn determinant(mat: &Matrix) -> Option<Poly> {
    let n = mat.len();
    let sig = mat.first()?.first()?.sig().clone();
    let mut dp: Vec<Option<Poly>> = vec![None; 1 << n];
    dp[0] = Some(Poly::one(&sig));
    for mask in 0usize..(1 << n) {
        let row = mask.count_ones() as usize;
        if row >= n {
            continue;
        }
        let cur = match &dp[mask] {
            Some(p) if !p.is_zero() => p.clone(),
            _ => continue,
        };
        for c in 0..n {
            if mask & (1 << c) != 0 || mat[row][c].is_zero() {
                continue;
            }
            let above = (mask >> (c + 1)).count_ones();
            let mut t = &cur * &mat[row][c];
            if above % 2 == 1 {
                t = -t;
            }
            let nm = mask | (1 << c);
            dp[nm] = Some(match dp[nm].take() {
                Some(p) => p + &t,
                None => t,
            });
        }
    }
    Some(dp[(1 << n) - 1].clone().unwrap_or_else(|| Poly::zero(&sig)))
}

fn minor(mat: &Matrix, r: usize, c: usize) -> Matrix {
    mat.iter()
        .enumerate()
        .filter(|(i, _)| *i != r)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, x)| x.clone()).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let sig = a[0][0].sig().clone();
    let mut out = vec![vec![Poly::zero(&sig); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] = out[i][j].clone() + &(&a[i][k] * &b[k][j]);
                }
            }
        }
    }
    out
}

pub fn is_identity(m: &Matrix) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, x)| {
            if i == j {
                x.is_constant() && x.constant_term().is_one()
            } else {
                x.is_zero()
            }
        })
    })
}

/// Inverse of a matrix over the algebra when its reduction modulo odd generators
/// has a unit determinant.
pub fn invert_matrix(mat: &Matrix) -> (Poly, Option<Matrix>) {
    let n = mat.len();
    if n == 0 {
        return (Poly::zero(&crate::algebra::Signature::new(vec![]).unwrap()), Some(vec![]));
    }
    let sig = mat[0][0].sig().clone();
    let m0: Matrix = mat.iter().map(|r| r.iter().map(drop_odd).collect()).collect();
    let det = determinant(&m0).unwrap();
    let dinv = match det.inverse_unit() {
        Some(d) => d,
        None => return (det, None),
    };
    let mut inv0 = vec![vec![Poly::zero(&sig); n]; n];
    if n == 1 {
        inv0[0][0] = dinv.clone();
    } else {
        for (i, row) in inv0.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                let cof = determinant(&minor(&m0, j, i)).unwrap();
                let cof = if (i + j) % 2 == 1 { -cof } else { cof };
                *x = &cof * &dinv;
            }
        }
    }
    // Neumann series for the nilpotent odd part.
    let nil: Matrix =
        (0..n).map(|i| (0..n).map(|j| &mat[i][j] - &m0[i][j]).collect()).collect();
    let step: Matrix = mat_mul(&inv0, &nil).into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
    let mut total = inv0.clone();
    let mut term = inv0.clone();
    let bound = (0..sig.ngens()).filter(|&v| sig.odd(v)).count() + 2;
    for _ in 0..bound {
        term = mat_mul(&step, &term);
        if term.iter().all(|r| r.iter().all(|x| x.is_zero())) {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                total[i][j] = total[i][j].clone() + &term[i][j];
            }
        }
    }
    if is_identity(&mat_mul(mat, &total)) {
        (det, Some(total))
    } else {
        (det, None)
    }
}

/// Strict nondegeneracy of `pi_2^flat`, with the inverse matrix as certificate.
pub fn nondegeneracy_check(pi: &PoissonStructure) -> Result<NondegeneracyCertificate, PolyvectorError> {
    if !pi.is_strict() {
        return Err(PolyvectorError::NotStrict);
    }
    let pi2 = pi.component(2).ok_or(PolyvectorError::NotStrict)?;
    let matrix = flat_matrix(pi2);
    let (det, inverse) = invert_matrix(&matrix);
    Ok(NondegeneracyCertificate { nondegenerate: inverse.is_some(), matrix, reduced_determinant: det, inverse })
}

/// The 1-form `(pi^flat)^{-1}(pd(h))`.
pub fn inverse_flat_form(cert: &NondegeneracyCertificate, h: usize) -> Option<Poly> {
    let inv = cert.inverse.as_ref()?;
    let sig = inv[0][0].sig().clone();
    let mut out = Poly::zero(&sig);
    for (g, row) in inv.iter().enumerate() {
        if !row[h].is_zero() {
            out = out + &(&Poly::var(&sig, sig.form_var(g)) * &row[h]);
        }
    }
    Some(out)
}

/// Constant-coefficient check helper: is `p` exactly `c` times the unit?
pub fn is_scalar(p: &Poly, c: &Q) -> bool {
    if c.is_zero() {
        return p.is_zero();
    }
    p.is_constant() && &p.constant_term() == c
}

/// The classical compatibility map: the multiplicative extension of
/// `a dg -> a * contract(pi, dg)` from forms to polyvectors.
pub fn mu_classical(pi: &Poly, omega: &Poly) -> Poly {
    let sig = omega.sig().clone();
    let images: Vec<Poly> = (0..sig.ngens()).map(|g| contract(pi, &Poly::var(&sig, sig.form_var(g)))).collect();
    omega.substitute(&|v| match sig.kind(v) {
        VarKind::Form => Some(images[sig.base(v)].clone()),
        _ => None,
    })
}
