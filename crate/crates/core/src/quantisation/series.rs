//! Truncated `hbar` series of polyvectors.
//!
//! Exponents are stored raw: the term `hbar^k u` with `u` of weight `w` sits
//! at normalised index `j = k + 1` of `prod_j hbar^{j-1} F_j`. The `G`-level of
//! such a term is `k + 1 - w`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::One;
use serde::{Serialize, Serializer};

use crate::algebra::{serialize_series, Monomial, Poly, Series, Signature, VarKind, Q};

use super::QuantisationError;

#[derive(Clone, PartialEq, Eq)]
pub struct HbarSeries {
    sig: Arc<Signature>,
    terms: BTreeMap<i64, Poly>,
    order: i64,
}

fn weight(sig: &Signature, m: &Monomial) -> i64 {
    m.count(sig, VarKind::Vector) as i64
}

impl HbarSeries {
    pub fn zero(sig: &Arc<Signature>, order: i64) -> Self {
        HbarSeries { sig: sig.clone(), terms: BTreeMap::new(), order }
    }

    pub fn one(sig: &Arc<Signature>, order: i64) -> Self {
        Self::term(0, Poly::one(sig), order)
    }

    /// The single term `hbar^k p`.
    pub fn term(k: i64, p: Poly, order: i64) -> Self {
        let mut s = Self::zero(p.sig(), order);
        s.add_at(k, &p);
        s
    }

    pub fn from_series(sig: &Arc<Signature>, series: &Series, order: i64) -> Self {
        let mut s = Self::zero(sig, order);
        for (k, p) in series {
            s.add_at(*k, p);
        }
        s
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    /// Truncation order `N`: terms with `hbar^k`, `k > N`, are dropped.
    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<i64, Poly> {
        &self.terms
    }

    pub fn coeff(&self, k: i64) -> Poly {
        self.terms.get(&k).cloned().unwrap_or_else(|| Poly::zero(&self.sig))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn add_at(&mut self, k: i64, p: &Poly) {
        if k > self.order || p.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(|| Poly::zero(&self.sig));
        *e = e.clone() + p;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn with_order(&self, order: i64) -> Self {
        let mut s = Self::zero(&self.sig, order);
        for (k, p) in &self.terms {
            s.add_at(*k, p);
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.with_order(self.order.min(other.order));
        for (k, p) in &other.terms {
            s.add_at(*k, p);
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|p| -p)
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Apply a linear map to every coefficient.
    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> Self {
        let mut s = Self::zero(&self.sig, self.order);
        for (k, p) in &self.terms {
            s.add_at(*k, &f(p));
        }
        s
    }

    /// Multiply by `hbar^k`.
    pub fn shift(&self, k: i64) -> Self {
        let mut s = Self::zero(&self.sig, self.order);
        for (e, p) in &self.terms {
            s.add_at(e + k, p);
        }
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut s = Self::zero(&self.sig, order);
        for (a, p) in &self.terms {
            for (b, r) in &other.terms {
                if a + b <= order {
                    s.add_at(a + b, &(p * r));
                }
            }
        }
        s
    }

    pub fn mul_poly(&self, p: &Poly) -> Self {
        self.map(|c| c * p)
    }

    /// `exp(self)` truncated at the order; every term must carry `hbar^k`, `k >= 1`.
    pub fn exp(&self) -> Result<Self, QuantisationError> {
        if self.min_exponent().is_some_and(|k| k < 1) {
            return Err(QuantisationError::NotNilpotent);
        }
        let mut out = Self::one(&self.sig, self.order);
        let mut power = Self::one(&self.sig, self.order);
        let mut n = 0i64;
        loop {
            n += 1;
            power = power.mul(self).scale(&Q::new(One::one(), n.into()));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        Ok(out)
    }

    /// Formal derivative in `hbar`.
    pub fn d_hbar(&self) -> Self {
        let mut s = Self::zero(&self.sig, self.order);
        for (k, p) in &self.terms {
            if *k != 0 {
                s.add_at(k - 1, &p.scale(&Q::from_integer((*k).into())));
            }
        }
        s
    }

    /// Terms at `G`-level `i`, i.e. `hbar^k` with weight `k + 1 - i`.
    pub fn level_part(&self, i: i64) -> Self {
        self.filter(|k, w| k + 1 - w == i)
    }

    /// Smallest `G`-level among the terms.
    pub fn min_level(&self) -> Option<i64> {
        self.iter_terms().map(|(k, m)| k + 1 - weight(&self.sig, m)).min()
    }

    pub fn filter(&self, keep: impl Fn(i64, i64) -> bool) -> Self {
        let mut s = Self::zero(&self.sig, self.order);
        for (k, p) in &self.terms {
            let sig = &self.sig;
            s.add_at(*k, &p.filter(|m| keep(*k, weight(sig, m))));
        }
        s
    }

    /// `(raw exponent, monomial)` pairs of all terms.
    pub fn iter_terms(&self) -> impl Iterator<Item = (i64, &Monomial)> {
        self.terms.iter().flat_map(|(k, p)| p.terms().keys().map(move |m| (*k, m)))
    }

    fn all_terms(&self, pred: impl Fn(i64, i64) -> bool) -> bool {
        self.iter_terms().all(|(k, m)| pred(k, weight(&self.sig, m)))
    }

    /// Membership in `F~^i = prod_{j >= i} hbar^{j-1} F_j`.
    pub fn in_f_tilde(&self, i: i64) -> bool {
        self.all_terms(|k, w| k + 1 >= i && w <= k + 1)
    }

    /// Membership in `G^i = hbar^i QPol`.
    pub fn in_g(&self, i: i64) -> bool {
        self.all_terms(|k, w| w <= k + 1 - i)
    }

    /// Membership in `(G*F~)^p = prod_{j<p} hbar^{j-1} F_{2j-p} x prod_{j>=p} hbar^{j-1} F_j`.
    pub fn in_g_conv(&self, p: i64) -> bool {
        self.all_terms(|k, w| {
            let j = k + 1;
            if j < p {
                w <= 2 * j - p
            } else {
                w <= j
            }
        })
    }

    /// Membership in the tangent filtration `prod_{p >= i} hbar^p F_p`.
    pub fn in_tangent_f_tilde(&self, i: i64) -> bool {
        self.all_terms(|k, w| k >= i && w <= k)
    }

    /// Membership in `(G*F~)^p` of the tangent complex, `prod_k hbar^k F_{2k-p}`.
    pub fn in_tangent_g_conv(&self, p: i64) -> bool {
        self.all_terms(|k, w| w <= 2 * k - p)
    }

    /// Every term has the given `DR^r`-degree (polyvector degree minus weight).
    pub fn has_dr_degree(&self, d: i32) -> bool {
        self.terms.values().all(|p| p.terms().keys().all(|m| dr_degree(&self.sig, m) == d))
    }

    pub fn to_series(&self) -> Series {
        self.terms.clone()
    }

    /// Flatten to a sparse vector keyed by `(exponent, monomial)`.
    pub fn to_sparse(&self) -> BTreeMap<(i64, Monomial), Q> {
        let mut out = BTreeMap::new();
        for (k, p) in &self.terms {
            for (m, c) in p.terms() {
                out.insert((*k, m.clone()), c.clone());
            }
        }
        out
    }

    pub fn from_sparse(sig: &Arc<Signature>, v: &BTreeMap<(i64, Monomial), Q>, order: i64) -> Self {
        let mut s = Self::zero(sig, order);
        for ((k, m), c) in v {
            s.add_at(*k, &Poly::monomial(sig, m.clone(), c.clone()));
        }
        s
    }
}

/// `DR^r`-degree of a monomial: polyvector degree minus weight.
pub fn dr_degree(sig: &Signature, m: &Monomial) -> i32 {
    crate::algebra::mono_pol_degree(sig, m) - m.count(sig, VarKind::Vector)
}

impl fmt::Display for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_series(&self.sig, &self.terms))
    }
}

impl Serialize for HbarSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Debug for HbarSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod hbar^{})", self, self.order + 1)
    }
}

/// An element `base + eps * tangent` with `eps^2 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TangentElement {
    pub base: HbarSeries,
    pub epsilon_part: HbarSeries,
}

impl TangentElement {
    pub fn mul(&self, other: &Self) -> Self {
        TangentElement {
            base: self.base.mul(&other.base),
            epsilon_part: self.base.mul(&other.epsilon_part).add(&self.epsilon_part.mul(&other.base)),
        }
    }
}

/// `sigma(a) = a + eps hbar^2 da/dhbar`.
pub fn sigma(s: &HbarSeries) -> TangentElement {
    let eps = s.d_hbar().shift(2);
    TangentElement { base: s.clone(), epsilon_part: eps }
}
