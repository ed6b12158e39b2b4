//! Exact graded-commutative polynomials with Koszul signs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num::{BigInt, BigRational, One, Signed, Zero};

use super::signature::{Signature, VarKind};
use super::AlgebraError;

/// Exact rational coefficient.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector over the full variable layout, in canonical (declaration) order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn count(&self, sig: &Signature, kind: VarKind) -> i32 {
        self.0.iter().enumerate().filter(|(v, _)| sig.kind(*v) == kind).map(|(_, &e)| e).sum()
    }

    pub fn odd(&self, sig: &Signature) -> bool {
        self.0.iter().enumerate().filter(|(v, &e)| e != 0 && sig.odd(*v)).count() % 2 == 1
    }
}

/// Product of canonical monomials: `None` if an odd variable repeats, otherwise the
/// product and whether the Koszul sign is negative.
pub fn mono_mul(sig: &Signature, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
    let n = a.0.len();
    let mut out = Vec::with_capacity(n);
    let mut neg = false;
    let mut odd_after = 0usize;
    for v in (0..n).rev() {
        let (ea, eb) = (a.0[v], b.0[v]);
        if sig.odd(v) {
            if ea != 0 && eb != 0 {
                return None;
            }
            if eb != 0 && odd_after % 2 == 1 {
                neg = !neg;
            }
            if ea != 0 {
                odd_after += 1;
            }
        }
        out.push(ea + eb);
    }
    out.reverse();
    Some((Monomial(out), neg))
}

/// Finite sum of rational multiples of canonical monomials.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    sig: Arc<Signature>,
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero(sig: &Arc<Signature>) -> Self {
        Poly { sig: sig.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(sig: &Arc<Signature>, c: Q) -> Self {
        let mut p = Poly::zero(sig);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(sig.nvars()), c);
        }
        p
    }

    pub fn one(sig: &Arc<Signature>) -> Self {
        Poly::constant(sig, Q::one())
    }

    pub fn monomial(sig: &Arc<Signature>, m: Monomial, c: Q) -> Self {
        let mut p = Poly::zero(sig);
        if !c.is_zero() && valid_mono(sig, &m) {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(sig: &Arc<Signature>, v: usize) -> Self {
        let mut m = Monomial::one(sig.nvars());
        m.0[v] = 1;
        Poly::monomial(sig, m, Q::one())
    }

    /// The generator named `name`.
    pub fn gen(sig: &Arc<Signature>, name: &str) -> Result<Self, AlgebraError> {
        let i = sig.gen_index(name).ok_or_else(|| AlgebraError::UnknownGenerator(name.into()))?;
        Ok(Poly::var(sig, sig.gen_var(i)))
    }

    /// The de Rham symbol `dd(name)`.
    pub fn dd(sig: &Arc<Signature>, name: &str) -> Result<Self, AlgebraError> {
        let i = sig.gen_index(name).ok_or_else(|| AlgebraError::UnknownGenerator(name.into()))?;
        Ok(Poly::var(sig, sig.form_var(i)))
    }

    /// The vector symbol `pd(name)`.
    pub fn pd(sig: &Arc<Signature>, name: &str) -> Result<Self, AlgebraError> {
        let i = sig.gen_index(name).ok_or_else(|| AlgebraError::UnknownGenerator(name.into()))?;
        Ok(Poly::var(sig, sig.vector_var(i)))
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Q> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Q> {
        self.terms
    }

    pub fn from_terms(sig: &Arc<Signature>, terms: BTreeMap<Monomial, Q>) -> Self {
        let mut p = Poly::zero(sig);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Poly, c: &Q) {
        self.check(other);
        if c.is_zero() {
            return;
        }
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.sig);
        }
        Poly { sig: self.sig.clone(), terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    fn check(&self, other: &Poly) {
        assert!(Signature::same(&self.sig, &other.sig), "{}", AlgebraError::SignatureMismatch);
    }

    /// Graded-commutative product; errors when the operands live over different signatures.
    pub fn multiply(&self, other: &Poly) -> Result<Poly, AlgebraError> {
        if !Signature::same(&self.sig, &other.sig) {
            return Err(AlgebraError::SignatureMismatch);
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(&self.sig);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = mono_mul(&self.sig, ma, mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(&self.sig);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a single term built from invertible generators only.
    pub fn inverse_unit(&self) -> Option<Poly> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        for (v, &e) in m.0.iter().enumerate() {
            if e != 0 && !self.sig.invertible(v) {
                return None;
            }
        }
        let inv = Monomial(m.0.iter().map(|e| -e).collect());
        Some(Poly::monomial(&self.sig, inv, c.recip()))
    }

    pub fn is_unit(&self) -> bool {
        self.inverse_unit().is_some()
    }

    /// Constant term.
    pub fn constant_term(&self) -> Q {
        self.terms.get(&Monomial::one(self.sig.nvars())).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Monomial, &Q) -> Option<(Monomial, Q)>) -> Poly {
        let mut out = Poly::zero(&self.sig);
        for (m, c) in &self.terms {
            if let Some((m2, c2)) = f(m, c) {
                if valid_mono(&self.sig, &m2) {
                    out.add_term(m2, c2);
                }
            }
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Poly {
        self.map_terms(|m, c| if keep(m) { Some((m.clone(), c.clone())) } else { None })
    }

    /// Koszul parity of a homogeneous polynomial (`None` if mixed or zero).
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(|m| m.odd(&self.sig));
        let first = it.next()?;
        if it.all(|p| p == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Split into even and odd parts.
    pub fn parity_parts(&self) -> (Poly, Poly) {
        let s = &self.sig;
        (self.filter(|m| !m.odd(s)), self.filter(|m| m.odd(s)))
    }

    /// Number of `dg` factors if all terms agree.
    pub fn form_weight(&self) -> Option<i32> {
        self.uniform(|m| m.count(&self.sig, VarKind::Form))
    }

    /// Number of `pd(g)` factors if all terms agree.
    pub fn vector_weight(&self) -> Option<i32> {
        self.uniform(|m| m.count(&self.sig, VarKind::Vector))
    }

    pub fn max_vector_weight(&self) -> i32 {
        self.terms.keys().map(|m| m.count(&self.sig, VarKind::Vector)).max().unwrap_or(0)
    }

    pub fn max_form_weight(&self) -> i32 {
        self.terms.keys().map(|m| m.count(&self.sig, VarKind::Form)).max().unwrap_or(0)
    }

    pub fn uniform(&self, f: impl Fn(&Monomial) -> i32) -> Option<i32> {
        let mut it = self.terms.keys().map(f);
        let first = it.next()?;
        if it.all(|x| x == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Polyvector degree `deg(coeff) - sum deg g_i` of each term, if uniform.
    pub fn pol_degree(&self) -> Option<i32> {
        self.uniform(|m| mono_pol_degree(&self.sig, m))
    }

    /// Total de Rham degree of each term, if uniform.
    pub fn form_degree(&self) -> Option<i32> {
        self.uniform(|m| mono_form_degree(&self.sig, m))
    }

    /// Degree of a function (no symbols), if homogeneous.
    pub fn degree(&self) -> Option<i32> {
        self.pol_degree()
    }

    pub fn weight_part(&self, kind: VarKind, w: i32) -> Poly {
        let s = &self.sig;
        self.filter(|m| m.count(s, kind) == w)
    }

    /// Only generators appear.
    pub fn is_function(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().enumerate().all(|(v, &e)| e == 0 || self.sig.kind(v) == VarKind::Gen))
    }

    pub fn has_kind(&self, kind: VarKind) -> bool {
        self.terms.keys().any(|m| m.0.iter().enumerate().any(|(v, &e)| e != 0 && self.sig.kind(v) == kind))
    }

    /// Largest total absolute exponent over generators.
    pub fn poly_degree(&self) -> i32 {
        self.terms
            .keys()
            .map(|m| (0..self.sig.ngens()).map(|v| m.0[v].abs()).sum::<i32>())
            .max()
            .unwrap_or(0)
    }

    /// Left partial derivative with respect to variable `v`.
    pub fn dleft(&self, v: usize) -> Poly {
        let s = self.sig.clone();
        let odd_v = s.odd(v);
        self.map_terms(|m, c| {
            let e = m.0[v];
            if e == 0 {
                return None;
            }
            let mut neg = false;
            if odd_v {
                let before = (0..v).filter(|&w| m.0[w] != 0 && s.odd(w)).count();
                neg = before % 2 == 1;
            }
            let mut m2 = m.clone();
            m2.0[v] -= 1;
            let c2 = c * q(e as i64);
            Some((m2, if neg { -c2 } else { c2 }))
        })
    }

    /// Right partial derivative with respect to variable `v`.
    pub fn dright(&self, v: usize) -> Poly {
        let s = self.sig.clone();
        let odd_v = s.odd(v);
        let n = s.nvars();
        self.map_terms(|m, c| {
            let e = m.0[v];
            if e == 0 {
                return None;
            }
            let mut neg = false;
            if odd_v {
                let after = (v + 1..n).filter(|&w| m.0[w] != 0 && s.odd(w)).count();
                neg = after % 2 == 1;
            }
            let mut m2 = m.clone();
            m2.0[v] -= 1;
            let c2 = c * q(e as i64);
            Some((m2, if neg { -c2 } else { c2 }))
        })
    }

    /// Apply the (left) derivation of the given parity determined by its values on variables.
    pub fn derive(&self, odd: bool, value: &dyn Fn(usize) -> Option<Poly>) -> Poly {
        let s = self.sig.clone();
        let n = s.nvars();
        let cache: Vec<Option<Poly>> = (0..n).map(value).collect();
        let mut out = Poly::zero(&s);
        for (m, c) in &self.terms {
            let mut prefix_odd = false;
            for v in 0..n {
                let e = m.0[v];
                if e == 0 {
                    continue;
                }
                if let Some(dv) = &cache[v] {
                    if !dv.is_zero() {
                        let mut left = Monomial::one(n);
                        left.0[..v].copy_from_slice(&m.0[..v]);
                        left.0[v] = e - 1;
                        let mut right = Monomial::one(n);
                        right.0[v + 1..].copy_from_slice(&m.0[v + 1..]);
                        let mut coef = c * q(e as i64);
                        if odd && prefix_odd {
                            coef = -coef;
                        }
                        let l = Poly::monomial(&s, left, coef);
                        let r = Poly::monomial(&s, right, Q::one());
                        out = out + &(&(&l * dv) * &r);
                    }
                }
                if s.odd(v) {
                    prefix_odd = !prefix_odd;
                }
            }
        }
        out
    }

    /// Substitute each variable by a polynomial (an algebra map). Variables with
    /// `None` are kept. Negative exponents require an invertible image.
    pub fn substitute(&self, image: &dyn Fn(usize) -> Option<Poly>) -> Poly {
        let s = self.sig.clone();
        let n = s.nvars();
        let cache: Vec<Option<Poly>> = (0..n).map(image).collect();
        let mut out = Poly::zero(&s);
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(&s, c.clone());
            for v in 0..n {
                let e = m.0[v];
                if e == 0 {
                    continue;
                }
                let f = match &cache[v] {
                    Some(p) => p.clone(),
                    None => Poly::var(&s, v),
                };
                let f = if e < 0 {
                    f.inverse_unit().expect("negative exponent needs a unit image").pow((-e) as u32)
                } else {
                    f.pow(e as u32)
                };
                acc = &acc * &f;
            }
            out = out + &acc;
        }
        out
    }

    /// Leading (first in canonical order) term.
    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    /// Largest absolute numerator or denominator among coefficients.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs().max(c.denom().abs()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

pub fn valid_mono(sig: &Signature, m: &Monomial) -> bool {
    m.0.iter().enumerate().all(|(v, &e)| {
        if e < 0 {
            sig.invertible(v)
        } else {
            !(sig.odd(v) && e > 1)
        }
    })
}

pub fn mono_pol_degree(sig: &Signature, m: &Monomial) -> i32 {
    m.0.iter().enumerate().map(|(v, &e)| sig.pol_degree(v) * e).sum()
}

pub fn mono_form_degree(sig: &Signature, m: &Monomial) -> i32 {
    m.0.iter().enumerate().map(|(v, &e)| sig.form_degree(v) * e).sum()
}

impl<'a> Add<&'a Poly> for Poly {
    type Output = Poly;
    fn add(mut self, rhs: &'a Poly) -> Poly {
        self.check(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
        self
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        self.clone() + rhs
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        self + &rhs
    }
}

impl<'a> Sub<&'a Poly> for Poly {
    type Output = Poly;
    fn sub(mut self, rhs: &'a Poly) -> Poly {
        self.check(rhs);
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
        self
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.clone() - rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self - &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

/// Panics on mismatched signatures; use [`Poly::multiply`] for a checked product.
impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.check(rhs);
        self.mul_unchecked(rhs)
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::serialize(self))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::serialize(self))
    }
}
