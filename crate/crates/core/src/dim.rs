//! Problem size and the flattening of (basis, state) labels.
//!
//! States are numbered basis-major: state `i` of basis `μ` (both 0-based)
//! sits at flat index `μ·d + i`. Every basis therefore occupies a contiguous
//! block of `d` rows of the Gram matrix, and for two states in different
//! bases the one in the lower-numbered basis always has the smaller flat
//! index.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::DimensionError;

/// Hilbert-space dimension `d ≥ 2` of a complete set of `d + 1` bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(d: usize) -> Result<Self, DimensionError> {
        if d < 2 {
            return Err(DimensionError::TooSmall(d));
        }
        // d = 64 already needs ~8.6M phases; anything larger is a typo.
        if d > 64 {
            return Err(DimensionError::TooLarge(d));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Number of bases, `d + 1`.
    #[inline]
    pub fn bases(self) -> usize {
        self.0 + 1
    }

    /// Number of states `N = d(d+1)`.
    #[inline]
    pub fn states(self) -> usize {
        self.0 * (self.0 + 1)
    }

    /// Number of free relative phases `d³(d+1)/2`.
    #[inline]
    pub fn phase_count(self) -> usize {
        self.0 * self.0 * self.0 * (self.0 + 1) / 2
    }

    /// Flat index of state `state` of basis `basis` (0-based).
    #[inline]
    pub fn flat(self, basis: usize, state: usize) -> usize {
        debug_assert!(basis < self.bases() && state < self.0);
        basis * self.0 + state
    }

    /// Inverse of [`Dimension::flat`]: `(basis, state)`.
    #[inline]
    pub fn split(self, flat: usize) -> (usize, usize) {
        (flat / self.0, flat % self.0)
    }

    #[inline]
    pub fn basis_of(self, flat: usize) -> usize {
        flat / self.0
    }

    #[inline]
    pub fn same_basis(self, a: usize, b: usize) -> bool {
        self.basis_of(a) == self.basis_of(b)
    }

    /// `1/(d+1)`, the diagonal Gram entry.
    pub fn diagonal_entry(self) -> f64 {
        1.0 / (self.0 as f64 + 1.0)
    }

    /// `1/((d+1)√d)`, the modulus of every inter-basis Gram entry.
    pub fn overlap_modulus(self) -> f64 {
        1.0 / ((self.0 as f64 + 1.0) * (self.0 as f64).sqrt())
    }
}

impl TryFrom<usize> for Dimension {
    type Error = DimensionError;
    fn try_from(d: usize) -> Result<Self, Self::Error> {
        Dimension::new(d)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Storage layout of the free phases: the inter-basis pairs `(a, b)`,
/// `a < b`, in lexicographic order of flat indices.
#[derive(Clone, Debug)]
pub struct PhaseLayout {
    d: Dimension,
    pairs: Vec<(usize, usize)>,
    // slot[a * N + b] for a < b, usize::MAX for intra-basis pairs.
    slot: Vec<usize>,
}

impl PhaseLayout {
    pub fn new(d: Dimension) -> Self {
        let n = d.states();
        let mut pairs = Vec::with_capacity(d.phase_count());
        let mut slot = vec![usize::MAX; n * n];
        for a in 0..n {
            for b in (a + 1)..n {
                if !d.same_basis(a, b) {
                    slot[a * n + b] = pairs.len();
                    pairs.push((a, b));
                }
            }
        }
        debug_assert_eq!(pairs.len(), d.phase_count());
        PhaseLayout { d, pairs, slot }
    }

    pub fn dim(&self) -> Dimension {
        self.d
    }

    /// Pairs in storage order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Storage slot of the pair `a < b`, if the two states lie in different bases.
    #[inline]
    pub fn slot(&self, a: usize, b: usize) -> Option<usize> {
        debug_assert!(a < b);
        let s = self.slot[a * self.d.states() + b];
        (s != usize::MAX).then_some(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_dimensions() {
        assert!(Dimension::new(0).is_err());
        assert!(Dimension::new(1).is_err());
        assert!(Dimension::new(2).is_ok());
    }

    #[test]
    fn derived_counts() {
        let d = Dimension::new(3).unwrap();
        assert_eq!(d.states(), 12);
        assert_eq!(d.phase_count(), 54);
        assert_eq!(Dimension::new(4).unwrap().phase_count(), 160);
        assert_eq!(Dimension::new(5).unwrap().phase_count(), 375);
    }

    #[test]
    fn flattening_is_a_bijection() {
        for d in 2..=6 {
            let dim = Dimension::new(d).unwrap();
            let mut seen = vec![false; dim.states()];
            for mu in 0..dim.bases() {
                for i in 0..d {
                    let a = dim.flat(mu, i);
                    assert!(!seen[a], "collision at d={d} ({mu},{i})");
                    seen[a] = true;
                    assert_eq!(dim.split(a), (mu, i));
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn layout_covers_every_inter_basis_pair_once() {
        for d in 2..=5 {
            let dim = Dimension::new(d).unwrap();
            let layout = PhaseLayout::new(dim);
            assert_eq!(layout.pairs().len(), dim.phase_count());
            for (s, &(a, b)) in layout.pairs().iter().enumerate() {
                assert!(a < b);
                assert!(!dim.same_basis(a, b));
                assert_eq!(layout.slot(a, b), Some(s));
            }
            assert!(layout.pairs().windows(2).all(|w| w[0] < w[1]));
        }
    }
}
