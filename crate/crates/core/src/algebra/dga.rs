use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::poly::Poly;
use super::signature::{GeneratorSpec, Signature};
use super::AlgebraError;

/// A free (or Laurent) CDGA: generators plus the differential on each generator.
#[derive(Clone, Debug)]
pub struct DGAlgebra {
    sig: Arc<Signature>,
    delta: Vec<Poly>,
}

impl DGAlgebra {
    /// Build from generators with zero differential.
    pub fn free(gens: Vec<GeneratorSpec>) -> Result<Self, AlgebraError> {
        let sig = Signature::new(gens)?;
        let delta = (0..sig.ngens()).map(|_| Poly::zero(&sig)).collect();
        Ok(DGAlgebra { sig, delta })
    }

    /// Attach differential values (unlisted generators map to zero).
    pub fn with_differential(sig: &Arc<Signature>, values: BTreeMap<String, Poly>) -> Result<Self, AlgebraError> {
        let mut delta: Vec<Poly> = (0..sig.ngens()).map(|_| Poly::zero(sig)).collect();
        for (name, v) in values {
            let i = sig.gen_index(&name).ok_or_else(|| AlgebraError::UnknownGenerator(name.clone()))?;
            if !Signature::same(v.sig(), sig) {
                return Err(AlgebraError::SignatureMismatch);
            }
            if !v.is_function() {
                return Err(AlgebraError::BadDifferential(name));
            }
            delta[i] = v;
        }
        Ok(DGAlgebra { sig: sig.clone(), delta })
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn delta_of(&self, gen: usize) -> &Poly {
        &self.delta[gen]
    }

    pub fn is_delta_zero(&self) -> bool {
        self.delta.iter().all(|d| d.is_zero())
    }

    /// The differential as a polyvector `sum_g delta(g) pd(g)`.
    pub fn delta_polyvector(&self) -> Poly {
        let mut out = Poly::zero(&self.sig);
        for (i, d) in self.delta.iter().enumerate() {
            out = out + &(d * &Poly::var(&self.sig, self.sig.vector_var(i)));
        }
        out
    }

    pub fn zero(&self) -> Poly {
        Poly::zero(&self.sig)
    }

    pub fn one(&self) -> Poly {
        Poly::one(&self.sig)
    }

    pub fn gen(&self, name: &str) -> Poly {
        Poly::gen(&self.sig, name).expect("known generator")
    }

    pub fn dd(&self, name: &str) -> Poly {
        Poly::dd(&self.sig, name).expect("known generator")
    }

    pub fn pd(&self, name: &str) -> Poly {
        Poly::pd(&self.sig, name).expect("known generator")
    }
}

/// The differential on functions; on symbols it acts by zero (see `delta_form` for forms).
pub fn apply_delta(alg: &DGAlgebra, x: &Poly) -> Poly {
    let sig = alg.sig.clone();
    x.derive(true, &|v| if sig.kind(v) == super::VarKind::Gen { Some(alg.delta[v].clone()) } else { None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CdgaViolation {
    /// `delta(g)` is not homogeneous of degree `deg g + 1`.
    Degree { generator: String, value: String },
    /// `delta(delta(g))` is nonzero.
    SquareNonzero { generator: String, value: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CdgaReport {
    pub pass: bool,
    pub violations: Vec<CdgaViolation>,
}

pub fn verify_cdga(alg: &DGAlgebra) -> CdgaReport {
    let mut violations = Vec::new();
    for (i, g) in alg.sig.generators().iter().enumerate() {
        let d = &alg.delta[i];
        if !d.is_zero() && d.degree() != Some(g.degree + 1) {
            violations.push(CdgaViolation::Degree { generator: g.name.clone(), value: d.to_string() });
        }
        let dd = apply_delta(alg, d);
        if !dd.is_zero() {
            violations.push(CdgaViolation::SquareNonzero { generator: g.name.clone(), value: dd.to_string() });
        }
    }
    CdgaReport { pass: violations.is_empty(), violations }
}
