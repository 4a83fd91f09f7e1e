//! Signed adjacency matrices over item pairs.

use serde::{Deserialize, Serialize};

use crate::model::pair_index;
use crate::scalar::Scalar;
use crate::{Error, Result};

/// A `p` by `p` matrix with entries in `{-1, 0, +1}`, zero diagonal, and
/// symmetric off-diagonal: the sign pattern of an item network.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedAdjacency {
    p: usize,
    /// Row-major `p` by `p`.
    entries: Vec<i8>,
}

impl SignedAdjacency {
    /// All-zero (empty) network over `p` items.
    pub fn empty(p: usize) -> Self {
        Self {
            p,
            entries: vec![0; p * p],
        }
    }

    /// Build from a full row-major entry buffer, validating shape, entry
    /// range, symmetry, and a zero diagonal.
    pub fn from_entries(p: usize, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != p * p {
            return Err(Error::DimensionMismatch(format!(
                "expected {p} x {p} = {} entries, got {}",
                p * p,
                entries.len()
            )));
        }
        for j in 0..p {
            if entries[j * p + j] != 0 {
                return Err(Error::InvalidData(format!(
                    "diagonal entry ({j}, {j}) must be 0"
                )));
            }
            for k in 0..p {
                let e = entries[j * p + k];
                if !(-1..=1).contains(&e) {
                    return Err(Error::InvalidData(format!(
                        "entry ({j}, {k}) is {e}, expected -1, 0, or +1"
                    )));
                }
                if entries[k * p + j] != e {
                    return Err(Error::InvalidData(format!(
                        "entries ({j}, {k}) and ({k}, {j}) disagree"
                    )));
                }
            }
        }
        Ok(Self { p, entries })
    }

    /// Sign pattern of an interaction block in lexicographic pair order.
    pub fn from_gamma_signs<F: Scalar>(p: usize, gamma: &[F]) -> Result<Self> {
        if gamma.len() != p * (p - 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "{p} items need {} interactions, got {}",
                p * (p - 1) / 2,
                gamma.len()
            )));
        }
        let mut adj = Self::empty(p);
        for j in 0..p {
            for k in (j + 1)..p {
                let g = gamma[pair_index(p, j, k)];
                let s = if g > F::zero() {
                    1
                } else if g < F::zero() {
                    -1
                } else {
                    0
                };
                adj.set(j, k, s);
            }
        }
        Ok(adj)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, j: usize, k: usize) -> i8 {
        self.entries[j * self.p + k]
    }

    /// Set one off-diagonal entry and its mirror.
    pub fn set(&mut self, j: usize, k: usize, sign: i8) {
        assert!(j != k, "diagonal entries stay zero");
        assert!((-1..=1).contains(&sign));
        self.entries[j * self.p + k] = sign;
        self.entries[k * self.p + j] = sign;
    }

    /// Full row-major entry buffer, length `p * p`.
    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// Number of nonzero edges (unordered pairs).
    pub fn edge_count(&self) -> usize {
        let mut count = 0;
        for j in 0..self.p {
            for k in (j + 1)..self.p {
                if self.get(j, k) != 0 {
                    count += 1;
                }
            }
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_signs_map_to_symmetric_entries() {
        // p = 3, gamma = (g01, g02, g12).
        let adj = SignedAdjacency::from_gamma_signs(3, &[2.5f64, 0.0, -0.1]).unwrap();
        assert_eq!(adj.get(0, 1), 1);
        assert_eq!(adj.get(1, 0), 1);
        assert_eq!(adj.get(0, 2), 0);
        assert_eq!(adj.get(1, 2), -1);
        assert_eq!(adj.get(2, 1), -1);
        for j in 0..3 {
            assert_eq!(adj.get(j, j), 0);
        }
        assert_eq!(adj.edge_count(), 2);
    }

    #[test]
    fn entry_validation_catches_bad_matrices() {
        assert!(SignedAdjacency::from_entries(2, vec![0, 1, 1, 1]).is_err());
        assert!(SignedAdjacency::from_entries(2, vec![0, 1, -1, 0]).is_err());
        assert!(SignedAdjacency::from_entries(2, vec![0, 2, 2, 0]).is_err());
        assert!(SignedAdjacency::from_entries(2, vec![0, 1, 1]).is_err());
        let ok = SignedAdjacency::from_entries(2, vec![0, -1, -1, 0]).unwrap();
        assert_eq!(ok.get(0, 1), -1);
    }
}
