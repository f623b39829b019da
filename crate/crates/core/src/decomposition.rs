//! Splitting a sparse term into one-sparse colour classes and locating the
//! invariant 1D/2D subspace of each row.

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianTerm, SparsityPattern};
use crate::linalg::CMatrix;

/// One colour class: at most one entry per row and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneSparseTerm {
    pub parent: usize,
    pub color: usize,
    /// Unordered pairs `(min, max)`; `(x, x)` for diagonal entries.
    pairs: Vec<(usize, usize)>,
    partner: Vec<Option<usize>>,
}

impl OneSparseTerm {
    fn new(parent: usize, color: usize, dim: usize) -> Self {
        Self {
            parent,
            color,
            pairs: Vec::new(),
            partner: vec![None; dim],
        }
    }

    fn insert(&mut self, x: usize, y: usize) {
        self.pairs.push((x.min(y), x.max(y)));
        self.partner[x] = Some(y);
        self.partner[y] = Some(x);
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The column paired with row `x`, if any.
    pub fn partner(&self, x: usize) -> Option<usize> {
        self.partner.get(x).copied().flatten()
    }

    /// Ordered `(row, col)` entries, both orientations of off-diagonal pairs.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2 * self.pairs.len());
        for &(x, y) in &self.pairs {
            out.push((x, y));
            if x != y {
                out.push((y, x));
            }
        }
        out.sort_unstable();
        out
    }

    /// `H_{α,j}(t)`: the parent's matrix restricted to this class.
    pub fn matrix(&self, term: &HamiltonianTerm, t: f64) -> CMatrix {
        let full = term.evaluate(t);
        self.restrict(&full)
    }

    /// Keeps only this class's entries of `m`.
    pub fn restrict(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for (x, y) in self.entries() {
            out[(x, y)] = m[(x, y)];
        }
        out
    }
}

/// Greedy first-fit edge colouring of the pattern graph.
///
/// Edges are visited in ascending `(min, max)` order; a diagonal entry
/// occupies its single vertex. The result uses at most `2d − 1` colours.
pub fn decompose_one_sparse(term_id: usize, pattern: &SparsityPattern) -> Result<Vec<OneSparseTerm>> {
    if !pattern.is_symmetric() {
        return Err(Error::InvalidInput("pattern is not symmetric".into()));
    }
    let dim = pattern.dim();
    let mut classes: Vec<OneSparseTerm> = Vec::new();
    for &(x, y) in pattern.entries().iter().filter(|(x, y)| x <= y) {
        let slot = classes
            .iter()
            .position(|c| c.partner[x].is_none() && c.partner[y].is_none());
        let idx = match slot {
            Some(i) => i,
            None => {
                classes.push(OneSparseTerm::new(term_id, classes.len(), dim));
                classes.len() - 1
            }
        };
        classes[idx].insert(x, y);
    }
    if let Ok(d) = pattern.degree() {
        debug_assert!(classes.len() <= 6 * d * d);
    }
    Ok(classes)
}

/// Per-row record of the subspace a one-sparse exponential acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubspaceRecord {
    pub row: usize,
    pub m: usize,
    pub big_m: usize,
    /// An element of the class touches this row.
    pub xi: bool,
    /// `x = M_x`.
    pub dim_flag: bool,
    /// `m_x = M_x` (one-dimensional subspace).
    pub one_dim_flag: bool,
}

pub fn classify_subspace(class: &OneSparseTerm, x: usize) -> SubspaceRecord {
    match class.partner(x) {
        None => SubspaceRecord {
            row: x,
            m: x,
            big_m: x,
            xi: false,
            dim_flag: false,
            one_dim_flag: false,
        },
        Some(y) => {
            let (m, big_m) = (x.min(y), x.max(y));
            SubspaceRecord {
                row: x,
                m,
                big_m,
                xi: true,
                dim_flag: x == big_m,
                one_dim_flag: m == big_m,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_is_one_class() {
        let p = SparsityPattern::new(4, (0..4).map(|x| (x, x))).unwrap();
        let classes = decompose_one_sparse(0, &p).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].pairs().len(), 4);
    }

    #[test]
    fn matching_is_one_class() {
        let p = SparsityPattern::new(4, [(0, 3), (3, 0), (1, 2), (2, 1)]).unwrap();
        assert_eq!(decompose_one_sparse(0, &p).unwrap().len(), 1);
    }

    #[test]
    fn asymmetric_rejected() {
        let p = SparsityPattern::new(4, [(0, 1)]).unwrap();
        assert!(decompose_one_sparse(0, &p).is_err());
    }

    #[test]
    fn subspace_cases() {
        let p = SparsityPattern::new(8, [(3, 3), (2, 5), (5, 2)]).unwrap();
        let classes = decompose_one_sparse(0, &p).unwrap();
        assert_eq!(classes.len(), 1);
        let c = &classes[0];
        let r = classify_subspace(c, 3);
        assert_eq!((r.m, r.big_m, r.dim_flag, r.one_dim_flag), (3, 3, true, true));
        let r = classify_subspace(c, 5);
        assert_eq!((r.m, r.big_m, r.dim_flag, r.one_dim_flag), (2, 5, true, false));
        let r = classify_subspace(c, 2);
        assert_eq!((r.m, r.big_m, r.dim_flag, r.one_dim_flag), (2, 5, false, false));
        assert!(!classify_subspace(c, 0).xi);
    }
}
