//! Bundle data on a coordinate ring and its curvature.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{de_rham_d, parse, DGAlgebra, GeneratorSpec, Poly, Signature};
use crate::polyvector::{determinant, invert_matrix, Matrix};

use super::ToyError;

/// JSON form of a toy geometry. Entries are expressions in the base coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToyGeometrySpec {
    pub base: Vec<String>,
    pub e_rank: usize,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<String>>,
    /// `nablaE[l][j][i]` is `c_{lji}`, so `nabla(e_j) = sum e_l c_{lji} dx_i`.
    #[serde(rename = "nablaE", default)]
    pub nabla_e: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    pub phi: Vec<String>,
    #[serde(default)]
    pub invertible: Vec<String>,
}

/// Coordinates `x_i` (degree 0), a frame `e_j` (degree -1) of `E` and
/// `xi_i` (degree -2) dual to `dx_i`, with the pairing, connection and section.
#[derive(Clone, Debug)]
pub struct ToyGeometry {
    spec: ToyGeometrySpec,
    sig: Arc<Signature>,
    base_sig: Arc<Signature>,
    q: Matrix,
    c: Vec<Vec<Vec<Poly>>>,
    phi: Vec<Poly>,
}

/// Curvature `kappa = dA + A ^ A` of the connection matrix and its image
/// `Q(kappa) = kappa Q^{-1}` in `E (x) E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curvature {
    pub kappa: Matrix,
    pub q_kappa: Matrix,
}

pub fn xi_name(base: &str) -> String {
    format!("xi_{base}")
}

pub fn e_name(j: usize) -> String {
    format!("e{}", j + 1)
}

impl ToyGeometry {
    pub fn new(spec: ToyGeometrySpec) -> Result<Self, ToyError> {
        let n = spec.base.len();
        let r = spec.e_rank;
        for name in &spec.invertible {
            if !spec.base.contains(name) {
                return Err(ToyError::Shape(format!("invertible coordinate `{name}` is not a base coordinate")));
            }
        }
        let spec_of = |name: &str, degree: i32| {
            if spec.invertible.iter().any(|v| v == name) {
                GeneratorSpec::invertible(name)
            } else {
                GeneratorSpec::new(name, degree)
            }
        };
        let base_gens: Vec<GeneratorSpec> = spec.base.iter().map(|b| spec_of(b, 0)).collect();
        let mut gens = base_gens.clone();
        gens.extend((0..r).map(|j| GeneratorSpec::new(&e_name(j), -1)));
        gens.extend(spec.base.iter().map(|b| GeneratorSpec::new(&xi_name(b), -2)));
        let sig = Signature::new(gens)?;
        let base_sig = Signature::new(base_gens)?;

        let entry = |src: &str| -> Result<Poly, ToyError> {
            let p = parse(&sig, src).map_err(|e| ToyError::Parse(format!("{src}: {e}")))?;
            if !p.is_function() || p.terms().keys().any(|m| (n..sig.ngens()).any(|v| m.0[v] != 0)) {
                return Err(ToyError::Shape(format!("`{src}` is not a function of the base coordinates")));
            }
            Ok(p)
        };
        if spec.q.len() != r || spec.q.iter().any(|row| row.len() != r) {
            return Err(ToyError::Shape(format!("Q must be {r} x {r}")));
        }
        let q = spec.q.iter().map(|row| row.iter().map(|s| entry(s)).collect()).collect::<Result<Matrix, _>>()?;
        let zero = Poly::zero(&sig);
        let c = if spec.nabla_e.is_empty() {
            vec![vec![vec![zero.clone(); n]; r]; r]
        } else {
            if spec.nabla_e.len() != r || spec.nabla_e.iter().any(|row| row.len() != r || row.iter().any(|x| x.len() != n)) {
                return Err(ToyError::Shape(format!("nablaE must be {r} x {r} x {n}")));
            }
            spec.nabla_e
                .iter()
                .map(|row| row.iter().map(|x| x.iter().map(|s| entry(s)).collect()).collect())
                .collect::<Result<_, ToyError>>()?
        };
        let phi = if spec.phi.is_empty() {
            vec![zero; r]
        } else {
            if spec.phi.len() != r {
                return Err(ToyError::Shape(format!("phi must have {r} entries")));
            }
            spec.phi.iter().map(|s| entry(s)).collect::<Result<_, _>>()?
        };
        Ok(ToyGeometry { spec, sig, base_sig, q, c, phi })
    }

    pub fn spec(&self) -> &ToyGeometrySpec {
        &self.spec
    }

    pub fn sig(&self) -> &Arc<Signature> {
        &self.sig
    }

    /// The signature of the base coordinate ring alone.
    pub fn base_sig(&self) -> &Arc<Signature> {
        &self.base_sig
    }

    /// The base coordinate ring with zero differential.
    pub fn base_algebra(&self) -> DGAlgebra {
        DGAlgebra::with_differential(&self.base_sig, Default::default()).expect("empty differential")
    }

    pub fn n(&self) -> usize {
        self.spec.base.len()
    }

    pub fn r(&self) -> usize {
        self.spec.e_rank
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn phi(&self) -> &[Poly] {
        &self.phi
    }

    /// `c_{lji}`.
    pub fn c(&self, l: usize, j: usize, i: usize) -> &Poly {
        &self.c[l][j][i]
    }

    pub fn x(&self, i: usize) -> Poly {
        Poly::var(&self.sig, self.sig.gen_var(i))
    }

    pub fn e(&self, j: usize) -> Poly {
        Poly::var(&self.sig, self.sig.gen_var(self.n() + j))
    }

    pub fn xi(&self, i: usize) -> Poly {
        Poly::var(&self.sig, self.sig.gen_var(self.n() + self.r() + i))
    }

    pub fn dx(&self, i: usize) -> Poly {
        Poly::var(&self.sig, self.sig.form_var(i))
    }

    pub fn pd_x(&self, i: usize) -> Poly {
        Poly::var(&self.sig, self.sig.vector_var(i))
    }

    pub fn pd_e(&self, j: usize) -> Poly {
        Poly::var(&self.sig, self.sig.vector_var(self.n() + j))
    }

    pub fn pd_xi(&self, i: usize) -> Poly {
        Poly::var(&self.sig, self.sig.vector_var(self.n() + self.r() + i))
    }

    /// Connection matrix of 1-forms `A[l][j] = sum_i c_{lji} dx_i`.
    pub fn connection_matrix(&self) -> Matrix {
        let (n, r) = (self.n(), self.r());
        (0..r)
            .map(|l| {
                (0..r).map(|j| (0..n).fold(Poly::zero(&self.sig), |acc, i| acc + &(&self.c[l][j][i] * &self.dx(i)))).collect()
            })
            .collect()
    }

    /// `tr A`, a 1-form.
    pub fn trace(&self) -> Poly {
        let a = self.connection_matrix();
        (0..self.r()).fold(Poly::zero(&self.sig), |acc, l| acc + &a[l][l])
    }

    /// `Q(u, v)` for sections given by their components.
    pub fn pair(&self, u: &[Poly], v: &[Poly]) -> Poly {
        let r = self.r();
        let mut out = Poly::zero(&self.sig);
        for j in 0..r {
            for l in 0..r {
                out = out + &(&(&u[j] * &self.q[j][l]) * &v[l]);
            }
        }
        out
    }

    /// Components of the covariant derivative `nabla_{d/dx_i} phi`.
    pub fn nabla_phi(&self, i: usize) -> Vec<Poly> {
        let xv = self.sig.gen_var(i);
        (0..self.r())
            .map(|l| {
                (0..self.r()).fold(self.phi[l].dleft(xv), |acc, j| acc + &(&self.c[l][j][i] * &self.phi[j]))
            })
            .collect()
    }

    /// `nabla_E(phi) = sum_{l,i} (nabla_i phi)_l dx_i e_l`.
    pub fn nabla_phi_element(&self) -> Poly {
        let mut out = Poly::zero(&self.sig);
        for i in 0..self.n() {
            for (l, f) in self.nabla_phi(i).iter().enumerate() {
                out = out + &(&(f * &self.dx(i)) * &self.e(l));
            }
        }
        out
    }

    pub fn curvature(&self) -> Result<Curvature, ToyError> {
        let r = self.r();
        let a = self.connection_matrix();
        let kappa: Matrix = (0..r)
            .map(|l| {
                (0..r)
                    .map(|j| (0..r).fold(de_rham_d(&a[l][j]), |acc, m| acc + &(&a[l][m] * &a[m][j])))
                    .collect()
            })
            .collect();
        let qinv = self.q_inverse()?;
        let q_kappa: Matrix = (0..r)
            .map(|l| (0..r).map(|m| (0..r).fold(Poly::zero(&self.sig), |acc, j| acc + &(&kappa[l][j] * &qinv[j][m]))).collect())
            .collect();
        Ok(Curvature { kappa, q_kappa })
    }

    pub fn q_inverse(&self) -> Result<Matrix, ToyError> {
        if self.r() == 0 {
            return Ok(vec![]);
        }
        invert_matrix(&self.q).1.ok_or_else(|| ToyError::NotUnit(self.det_q().to_string()))
    }

    pub fn det_q(&self) -> Poly {
        determinant(&self.q).unwrap_or_else(|| Poly::one(&self.sig))
    }

    /// Check symmetry and invertibility of `Q`, its compatibility with the
    /// connection and constancy of `Q(phi, phi)`.
    pub fn validate(&self) -> Result<(), ToyError> {
        let r = self.r();
        for j in 0..r {
            for l in 0..j {
                if self.q[j][l] != self.q[l][j] {
                    return Err(ToyError::Shape(format!("Q is not symmetric at ({}, {})", j + 1, l + 1)));
                }
            }
        }
        if !self.det_q().is_unit() {
            return Err(ToyError::NotUnit(self.det_q().to_string()));
        }
        let a = self.connection_matrix();
        for j in 0..r {
            for l in 0..r {
                let rhs = (0..r).fold(Poly::zero(&self.sig), |acc, m| acc + &(&a[m][j] * &self.q[m][l]) + &(&self.q[j][m] * &a[m][l]));
                let defect = de_rham_d(&self.q[j][l]) - &rhs;
                if !defect.is_zero() {
                    return Err(ToyError::NotCompatible { j: j + 1, l: l + 1, defect: defect.to_string() });
                }
            }
        }
        let dqpp = de_rham_d(&self.pair(&self.phi, &self.phi));
        if !dqpp.is_zero() {
            return Err(ToyError::PhiNotIsotropic(dqpp.to_string()));
        }
        Ok(())
    }

    pub fn is_trace_free(&self) -> bool {
        self.trace().is_zero()
    }

    /// Move a polynomial in base coordinates and their differentials to the base ring.
    pub fn to_base(&self, p: &Poly) -> Result<Poly, ToyError> {
        parse(&self.base_sig, &p.to_string()).map_err(|e| ToyError::Shape(format!("`{p}` is not on the base: {e}")))
    }
}

impl Curvature {
    /// `Q(kappa)` as an element of `O[e] (x) Omega^2`; `e_l (x) e_m` is written
    /// `e_m e_l`, so this is `sum_{l<m} K^{lm} e_m e_l`.
    pub fn q_kappa_element(&self, g: &ToyGeometry) -> Poly {
        let r = g.r();
        let mut out = Poly::zero(g.sig());
        for l in 0..r {
            for m in l + 1..r {
                out = out + &(&(&g.e(m) * &g.e(l)) * &self.q_kappa[l][m]);
            }
        }
        out
    }

    /// Is `Q(kappa)` antisymmetric?
    pub fn is_antisymmetric(&self) -> bool {
        let r = self.q_kappa.len();
        (0..r).all(|l| (0..r).all(|m| (&self.q_kappa[l][m] + &self.q_kappa[m][l]).is_zero()))
    }
}
