//! Quantised polyvectors: truncated `hbar` series, the quantum master
//! equation, obstruction classes, order-by-order lifting, the compatibility
//! map and bounded cohomology by exact linear algebra.

mod cohomology;
pub mod linalg;
mod mu;
mod qme;
mod series;
mod solve;

use thiserror::Error;

use crate::connection::ConnectionError;

pub use cohomology::{
    cochain_slice, cohomology_basis, cohomology_class_test, Bounds, ClassVerdict, CohomologyClass, Complex, ComplexTag,
};
pub use mu::{compatibility_check, mu_dual, mu_quantised, nu, CompatibilityReport, CompatibilityVerdict};
pub use qme::{
    apply_d_series, bracket_power, mc_expression, obstruction, obstruction_cochain, poisson_from_series, poisson_series,
    qme_mc_equivalence, qme_residual, twisted_differential, Obstruction, QmeMcReport, Quantisation, TwistedDifferential,
};
pub use series::{dr_degree, sigma, HbarSeries, TangentElement};
pub use solve::{solve_qme, SolveOutcome, TieBreak};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuantisationError {
    #[error("series has a term without a positive power of hbar; exp does not truncate")]
    NotNilpotent,
    #[error("input is not a Maurer-Cartan element: {0}")]
    NotMaurerCartan(String),
    #[error("series is not in F~^2 or has terms of nonzero DR^r-degree")]
    NotQuantisation,
    #[error("term `{0}` is not of the form hbar^(j-1) times a weight-j polyvector")]
    NotClassical(String),
    #[error("representative is not a cocycle: differential is `{0}`")]
    NotCocycle(String),
    #[error("inconclusive: bounds exhausted")]
    Inconclusive,
    #[error("form `{0}` must be built from generators and dd() symbols")]
    BadForm(String),
    #[error("residual below level {0} did not vanish: `{1}`")]
    LowerLevel(i64, String),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
}
