//! Exact sparse Gaussian elimination over the rationals.
//!
//! Vectors are maps from an ordered key to a nonzero coefficient. Each stored
//! row keeps its pivot at its smallest key, so reduction sweeps keys upward.

use std::collections::BTreeMap;

use num::Zero;

use crate::algebra::Q;

pub type SparseVec<K> = BTreeMap<K, Q>;

fn axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Q, x: &SparseVec<K>) {
    for (k, c) in x {
        let e = y.entry(k.clone()).or_insert_with(Q::zero);
        *e += a * c;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

/// Incremental row echelon form that remembers how each row was built from
/// the inserted columns.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    rows: BTreeMap<K, (SparseVec<K>, SparseVec<usize>)>,
    inserted: usize,
    kernel: Vec<SparseVec<usize>>,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon { rows: BTreeMap::new(), inserted: 0, kernel: Vec::new() }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns inserted so far.
    pub fn len(&self) -> usize {
        self.inserted
    }

    pub fn is_empty(&self) -> bool {
        self.inserted == 0
    }

    /// Kernel relations among inserted columns, one per dependent column.
    pub fn kernel(&self) -> &[SparseVec<usize>] {
        &self.kernel
    }

    /// Reduce `v` against the stored rows; returns the remainder and the
    /// column combination that was subtracted.
    fn reduce(&self, mut v: SparseVec<K>) -> (SparseVec<K>, SparseVec<usize>) {
        let mut combo = SparseVec::new();
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().next().cloned(),
                Some(c) => v.range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded)).next().map(|(k, _)| k.clone()),
            };
            let Some(k) = next else { break };
            if let Some((row, rc)) = self.rows.get(&k) {
                let f = -(&v[&k] / &row[&k]);
                axpy(&mut v, &f, row);
                axpy(&mut combo, &f, rc);
            }
            cursor = Some(k);
        }
        (v, combo)
    }

    /// Insert a column; returns `true` when it is independent of the previous ones.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let (rem, mut combo) = self.reduce(v);
        combo.insert(idx, Q::from_integer(1.into()));
        match rem.keys().next().cloned() {
            Some(p) => {
                self.rows.insert(p, (rem, combo));
                true
            }
            None => {
                self.kernel.push(combo);
                false
            }
        }
    }

    /// Coefficients `c` with `sum_j c_j col_j = target`, if any. Columns that
    /// were dependent when inserted get coefficient zero.
    pub fn solve(&self, target: &SparseVec<K>) -> Option<SparseVec<usize>> {
        let (rem, combo) = self.reduce(target.clone());
        if !rem.is_empty() {
            return None;
        }
        Some(combo.into_iter().map(|(j, c)| (j, -c)).collect())
    }

    /// Does `v` lie in the span of the inserted columns?
    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v.clone()).0.is_empty()
    }
}

/// Solve `sum_j c_j columns[j] = target` preferring earlier columns.
pub fn solve_columns<K: Ord + Clone>(columns: &[SparseVec<K>], target: &SparseVec<K>) -> Option<Vec<Q>> {
    let mut ech = Echelon::new();
    for c in columns {
        ech.insert(c.clone());
    }
    let sol = ech.solve(target)?;
    let mut out = vec![Q::zero(); columns.len()];
    for (j, c) in sol {
        out[j] = c;
    }
    Some(out)
}
