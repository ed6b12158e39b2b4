//! Problem files: JSON descriptions of an algebra or a toy geometry with the
//! optional Poisson structure, connection and series attached to it.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use bvquant::algebra::{parse, parse_series, DGAlgebra, GeneratorSpec, Poly, Signature};
use bvquant::connection::{canonical_connection, RightConnection};
use bvquant::polyvector::PoissonStructure;
use bvquant::quantisation::{Bounds, HbarSeries};
use bvquant::toy_models::{build_dg_scheme, build_poisson, ToyGeometry, ToyGeometrySpec};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid problem file at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl InputError {
    pub fn field(field: &str, message: impl ToString) -> Self {
        InputError::Field { field: field.to_string(), message: message.to_string() }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub category: String,
    /// Commands this problem is meant for.
    #[serde(default)]
    pub commands: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToyGeometrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poisson: Option<PoissonBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connection: Option<ConnectionBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantisation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<CohomologyBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Bounds>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar_order: Option<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraBlock {
    pub generators: Vec<GeneratorSpec>,
    #[serde(default)]
    pub differential: BTreeMap<String, String>,
}

/// A strict bivector, or components indexed by weight.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PoissonBlock {
    Strict(String),
    Components { components: BTreeMap<usize, String> },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectionKind {
    #[default]
    Coordinate,
    Canonical,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionBlock {
    #[serde(default)]
    pub kind: ConnectionKind,
    /// `nabla_2(pd(g))` by generator name.
    #[serde(default)]
    pub nabla2: BTreeMap<String, String>,
    /// Values on longer words of `pd` symbols.
    #[serde(default)]
    pub higher: Vec<TableEntry>,
    /// Closed 1-form to twist by, applied last.
    #[serde(default)]
    pub twist: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub word: Vec<String>,
    pub value: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexKind {
    DeRham,
    RightDeRham,
    PoissonTangent,
    FilteredPoissonTangent,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohomologyBlock {
    pub complex: ComplexKind,
    pub degree: i32,
    #[serde(default)]
    pub representative: Option<String>,
}

/// A problem file with every expression parsed and every object built.
pub struct Problem {
    pub file: ProblemFile,
    pub alg: DGAlgebra,
    pub toy: Option<ToyGeometry>,
    pub pi: Option<PoissonStructure>,
    pub conn: RightConnection,
    pub quantisation: Option<HbarSeries>,
    pub omega: Option<HbarSeries>,
    pub representative: Option<Poly>,
    pub order: i64,
    pub bounds: Bounds,
}

pub fn read_problem(src: &str) -> Result<ProblemFile, InputError> {
    serde_json::from_str(src).map_err(|e| {
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        let message = e.to_string();
        let message = message.strip_suffix(&suffix).unwrap_or(&message).to_string();
        InputError::Json { line: e.line(), column: e.column(), message }
    })
}

fn expr(sig: &Arc<Signature>, field: &str, src: &str) -> Result<Poly, InputError> {
    parse(sig, src).map_err(|e| InputError::field(field, e))
}

fn series(sig: &Arc<Signature>, field: &str, src: &str, order: i64) -> Result<HbarSeries, InputError> {
    let s = parse_series(sig, src).map_err(|e| InputError::field(field, e))?;
    Ok(HbarSeries::from_series(sig, &s, order))
}

impl Problem {
    pub fn build(file: ProblemFile, order: i64, bounds: Bounds) -> Result<Self, InputError> {
        let (alg, toy, toy_pi) = match (&file.algebra, &file.toy) {
            (Some(a), None) => {
                let sig = Signature::new(a.generators.clone()).map_err(|e| InputError::field("algebra.generators", e))?;
                let mut values = BTreeMap::new();
                for (name, v) in &a.differential {
                    values.insert(name.clone(), expr(&sig, &format!("algebra.differential.{name}"), v)?);
                }
                let alg = DGAlgebra::with_differential(&sig, values).map_err(|e| InputError::field("algebra.differential", e))?;
                (alg, None, None)
            }
            (None, Some(spec)) => {
                let g = ToyGeometry::new(spec.clone()).map_err(|e| InputError::field("toy", e))?;
                let alg = build_dg_scheme(&g).map_err(|e| InputError::field("toy", e))?;
                let pi = build_poisson(&g).map_err(|e| InputError::field("toy", e))?;
                (alg, Some(g), Some(pi))
            }
            _ => return Err(InputError::Invalid("exactly one of `algebra` and `toy` must be given".into())),
        };
        let sig = alg.sig().clone();
        let pi = match (&file.poisson, toy_pi) {
            (Some(_), Some(_)) => return Err(InputError::field("poisson", "not allowed together with `toy`")),
            (None, pi) => pi,
            (Some(PoissonBlock::Strict(s)), None) => Some(PoissonStructure::strict(expr(&sig, "poisson", s)?)),
            (Some(PoissonBlock::Components { components }), None) => {
                let mut parsed = BTreeMap::new();
                for (w, s) in components {
                    parsed.insert(*w, expr(&sig, &format!("poisson.components.{w}"), s)?);
                }
                Some(PoissonStructure::from_components(parsed).map_err(|e| InputError::field("poisson", e))?)
            }
        };
        let conn = build_connection(&alg, pi.as_ref(), file.connection.as_ref())?;
        let quantisation = file.quantisation.as_deref().map(|s| series(&sig, "quantisation", s, order)).transpose()?;
        let omega = file.omega.as_deref().map(|s| series(&sig, "omega", s, order)).transpose()?;
        let representative = file
            .cohomology
            .as_ref()
            .and_then(|c| c.representative.as_deref())
            .map(|s| expr(&sig, "cohomology.representative", s))
            .transpose()?;
        Ok(Problem { file, alg, toy, pi, conn, quantisation, omega, representative, order, bounds })
    }

    pub fn require_pi(&self) -> Result<&PoissonStructure, InputError> {
        self.pi.as_ref().ok_or_else(|| InputError::field("poisson", "required by this command"))
    }
}

fn build_connection(alg: &DGAlgebra, pi: Option<&PoissonStructure>, block: Option<&ConnectionBlock>) -> Result<RightConnection, InputError> {
    let default = ConnectionBlock::default();
    let block = block.unwrap_or(&default);
    let sig = alg.sig().clone();
    let conn = match block.kind {
        ConnectionKind::Canonical => {
            if !block.nabla2.is_empty() || !block.higher.is_empty() {
                return Err(InputError::field("connection", "a canonical connection takes no explicit values"));
            }
            let pi = pi.ok_or_else(|| InputError::field("connection", "the canonical connection needs `poisson`"))?;
            canonical_connection(alg, pi).map_err(|e| InputError::field("connection", e))?
        }
        ConnectionKind::Coordinate => {
            let mut nabla2 = BTreeMap::new();
            for (name, v) in &block.nabla2 {
                nabla2.insert(name.clone(), expr(&sig, &format!("connection.nabla2.{name}"), v)?);
            }
            let mut higher = Vec::new();
            for (i, t) in block.higher.iter().enumerate() {
                higher.push((t.word.clone(), expr(&sig, &format!("connection.higher[{i}].value"), &t.value)?));
            }
            RightConnection::new(alg, nabla2, higher).map_err(|e| InputError::field("connection", e))?
        }
    };
    match &block.twist {
        Some(t) => conn.twist(&expr(&sig, "connection.twist", t)?).map_err(|e| InputError::field("connection.twist", e)),
        None => Ok(conn),
    }
}
