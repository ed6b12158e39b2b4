//! Exact graded-commutative algebra: generators, Koszul-signed polynomials,
//! differentials and de Rham forms over the rationals.
//!
//! Functions, de Rham forms and polyvectors are all [`Poly`] values over one
//! [`Signature`]; they differ only in which variables occur.

mod dga;
mod forms;
mod parse;
mod poly;
mod signature;

use thiserror::Error;

pub use dga::{apply_delta, verify_cdga, CdgaReport, CdgaViolation, DGAlgebra};
pub use forms::{de_rham_d, delta_form, total_d};
pub use parse::{parse, parse_series, serialize, serialize_series, ParseError, Series};
pub use poly::{mono_form_degree, mono_mul, mono_pol_degree, q, qf, valid_mono, Monomial, Poly, Q};
pub use signature::{GeneratorSpec, Signature, VarKind};

/// Alias used where a value is a function on the algebra.
pub type Element = Poly;
/// Alias used where a value is a de Rham form.
pub type DeRhamForm = Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("generator name `{0}` is not a valid identifier or is reserved")]
    BadGenerator(String),
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("invertible generator `{0}` must have degree 0, not {1}")]
    InvertibleDegree(String, i32),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("operands belong to different algebras")]
    SignatureMismatch,
    #[error("differential of `{0}` is not a function of the generators")]
    BadDifferential(String),
}
