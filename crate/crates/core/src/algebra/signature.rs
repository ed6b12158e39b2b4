//! Generators and the variable layout shared by functions, forms and polyvectors.
//!
//! A signature with `n` generators owns `3n` variables: the generators
//! themselves, their de Rham symbols `dg`, and their vector symbols `pd(g)`.
//! Every exact object in the crate is a polynomial in this one variable set.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::AlgebraError;

/// One generator of a free (or Laurent-localised) graded-commutative algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub degree: i32,
    #[serde(default)]
    pub invertible: bool,
}

impl GeneratorSpec {
    pub fn new(name: &str, degree: i32) -> Self {
        GeneratorSpec { name: name.to_string(), degree, invertible: false }
    }

    pub fn invertible(name: &str) -> Self {
        GeneratorSpec { name: name.to_string(), degree: 0, invertible: true }
    }
}

/// Which family a variable belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// The generator `g` itself.
    Gen,
    /// The de Rham symbol `dg`.
    Form,
    /// The vector symbol `pd(g)`.
    Vector,
}

/// Ordered generator list together with the derived variable layout.
#[derive(Debug, PartialEq, Eq)]
pub struct Signature {
    gens: Vec<GeneratorSpec>,
    index: BTreeMap<String, usize>,
}

pub(crate) const RESERVED: &[&str] = &["hbar", "pd", "dd"];

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Signature {
    pub fn new(gens: Vec<GeneratorSpec>) -> Result<Arc<Signature>, AlgebraError> {
        let mut index = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            if !valid_identifier(&g.name) || RESERVED.contains(&g.name.as_str()) {
                return Err(AlgebraError::BadGenerator(g.name.clone()));
            }
            if g.invertible && g.degree != 0 {
                return Err(AlgebraError::InvertibleDegree(g.name.clone(), g.degree));
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(AlgebraError::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Arc::new(Signature { gens, index }))
    }

    pub fn generators(&self) -> &[GeneratorSpec] {
        &self.gens
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn nvars(&self) -> usize {
        3 * self.gens.len()
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn gen(&self, i: usize) -> &GeneratorSpec {
        &self.gens[i]
    }

    /// Variable index of generator `i`.
    pub fn gen_var(&self, i: usize) -> usize {
        i
    }

    /// Variable index of `d(g_i)`.
    pub fn form_var(&self, i: usize) -> usize {
        self.gens.len() + i
    }

    /// Variable index of `pd(g_i)`.
    pub fn vector_var(&self, i: usize) -> usize {
        2 * self.gens.len() + i
    }

    pub fn kind(&self, v: usize) -> VarKind {
        let n = self.gens.len();
        match v / n.max(1) {
            0 => VarKind::Gen,
            1 => VarKind::Form,
            _ => VarKind::Vector,
        }
    }

    /// Generator underlying variable `v`.
    pub fn base(&self, v: usize) -> usize {
        v % self.gens.len()
    }

    /// Koszul parity of a variable. Symbols `dg` and `pd(g)` carry the shifted
    /// parity `deg g + 1`.
    pub fn odd(&self, v: usize) -> bool {
        let d = self.gens[self.base(v)].degree;
        match self.kind(v) {
            VarKind::Gen => d.rem_euclid(2) == 1,
            _ => (d + 1).rem_euclid(2) == 1,
        }
    }

    pub fn invertible(&self, v: usize) -> bool {
        self.kind(v) == VarKind::Gen && self.gens[v].invertible
    }

    /// Polyvector degree contribution: `deg g` for generators, `-deg g` for `pd(g)`.
    pub fn pol_degree(&self, v: usize) -> i32 {
        let d = self.gens[self.base(v)].degree;
        match self.kind(v) {
            VarKind::Gen => d,
            VarKind::Form => 0,
            VarKind::Vector => -d,
        }
    }

    /// Total de Rham degree contribution: `deg g` for generators, `deg g + 1` for `dg`.
    pub fn form_degree(&self, v: usize) -> i32 {
        let d = self.gens[self.base(v)].degree;
        match self.kind(v) {
            VarKind::Gen => d,
            VarKind::Form => d + 1,
            VarKind::Vector => 0,
        }
    }

    pub fn var_name(&self, v: usize) -> String {
        let g = &self.gens[self.base(v)].name;
        match self.kind(v) {
            VarKind::Gen => g.clone(),
            VarKind::Form => format!("dd({g})"),
            VarKind::Vector => format!("pd({g})"),
        }
    }

    pub fn same(a: &Arc<Signature>, b: &Arc<Signature>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}
