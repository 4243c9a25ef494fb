use std::fmt;

use crate::error::{DppError, Result};

/// A subset of the ground set `{0, .., n-1}`: sorted, duplicate-free indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset {
    indices: Vec<usize>,
}

impl Subset {
    /// Validates bounds and uniqueness; the indices are sorted internally.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(DppError::DuplicateIndex { index: w[0] });
            }
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(DppError::IndexOutOfBounds { index: last, n });
            }
        }
        Ok(Subset { indices })
    }

    pub fn empty() -> Self {
        Subset::default()
    }

    /// Subset encoded by the low `n` bits of `mask` (bit i set => item i in).
    pub fn from_bitmask(mask: u64, n: usize) -> Self {
        debug_assert!(n <= 64);
        let indices = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        Subset { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    /// Union of two disjoint subsets; errors if they overlap.
    pub fn union_disjoint(&self, other: &Subset) -> Result<Subset> {
        let mut merged = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.indices.len() && j < other.indices.len() {
            match self.indices[i].cmp(&other.indices[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(self.indices[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push(other.indices[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    return Err(DppError::OverlappingSubsets {
                        index: self.indices[i],
                    })
                }
            }
        }
        merged.extend_from_slice(&self.indices[i..]);
        merged.extend_from_slice(&other.indices[j..]);
        Ok(Subset { indices: merged })
    }
}

impl fmt::Display for Subset {
    /// Space-separated indices, e.g. `0 2 5`; empty subset prints nothing.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in &self.indices {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        Ok(())
    }
}

impl From<Subset> for Vec<usize> {
    fn from(s: Subset) -> Self {
        s.indices
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_validates() {
        let s = Subset::new(vec![3, 1, 2], 4).unwrap();
        assert_eq!(s.indices(), &[1, 2, 3]);
        assert!(s.contains(2));
        assert!(!s.contains(0));
    }

    #[test]
    fn rejects_duplicates_and_bounds() {
        assert!(matches!(
            Subset::new(vec![1, 1], 4),
            Err(DppError::DuplicateIndex { index: 1 })
        ));
        assert!(matches!(
            Subset::new(vec![4], 4),
            Err(DppError::IndexOutOfBounds { index: 4, n: 4 })
        ));
    }

    #[test]
    fn bitmask_roundtrip() {
        let s = Subset::from_bitmask(0b1011, 4);
        assert_eq!(s.indices(), &[0, 1, 3]);
        assert_eq!(Subset::from_bitmask(0, 4), Subset::empty());
    }

    #[test]
    fn union_disjoint_merges() {
        let a = Subset::new(vec![0, 3], 6).unwrap();
        let b = Subset::new(vec![1, 5], 6).unwrap();
        assert_eq!(a.union_disjoint(&b).unwrap().indices(), &[0, 1, 3, 5]);
        assert!(a.union_disjoint(&a).is_err());
    }

    #[test]
    fn display_is_space_separated() {
        let s = Subset::new(vec![2, 0], 3).unwrap();
        assert_eq!(s.to_string(), "0 2");
        assert_eq!(Subset::empty().to_string(), "");
    }
}
