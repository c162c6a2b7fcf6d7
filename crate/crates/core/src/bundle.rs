//! Bundles of goods and allocations.
//!
//! Goods are 0-indexed internally. Everything that faces a user (JSON, CLI,
//! `Display`) uses 1-indexed labels.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of goods (bitmask width).
pub const MAX_GOODS: usize = 63;

/// A set of goods as a bitmask; bit `j` is good `j + 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle(u64);

impl Bundle {
    pub const EMPTY: Bundle = Bundle(0);

    pub const fn from_mask(mask: u64) -> Self {
        Bundle(mask)
    }

    pub const fn mask(self) -> u64 {
        self.0
    }

    /// All goods `0..m`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_GOODS);
        Bundle(if m == 0 { 0 } else { u64::MAX >> (64 - m) })
    }

    pub fn singleton(good: usize) -> Self {
        Bundle(1 << good)
    }

    pub fn from_goods<I: IntoIterator<Item = usize>>(goods: I) -> Self {
        Bundle(goods.into_iter().fold(0, |acc, g| acc | (1 << g)))
    }

    /// Parses 1-indexed labels, rejecting labels outside `1..=m`.
    pub fn from_labels(labels: &[usize], m: usize) -> Result<Self> {
        let mut mask = 0u64;
        for &label in labels {
            if label == 0 || label > m {
                return Err(Error::Parse(format!(
                    "good label {label} outside 1..={m}"
                )));
            }
            mask |= 1 << (label - 1);
        }
        Ok(Bundle(mask))
    }

    pub fn labels(self) -> Vec<usize> {
        self.goods().map(|g| g + 1).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, good: usize) -> bool {
        self.0 >> good & 1 == 1
    }

    pub fn is_subset_of(self, other: Bundle) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Bundle) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Bundle) -> Bundle {
        Bundle(self.0 | other.0)
    }

    pub fn intersection(self, other: Bundle) -> Bundle {
        Bundle(self.0 & other.0)
    }

    pub fn difference(self, other: Bundle) -> Bundle {
        Bundle(self.0 & !other.0)
    }

    pub fn with(self, good: usize) -> Bundle {
        Bundle(self.0 | 1 << good)
    }

    pub fn without(self, good: usize) -> Bundle {
        Bundle(self.0 & !(1 << good))
    }

    /// Whether every good lies in `0..m`.
    pub fn fits(self, m: usize) -> bool {
        self.is_subset_of(Bundle::full(m))
    }

    pub fn check_fits(self, m: usize) -> Result<()> {
        if self.fits(m) {
            Ok(())
        } else {
            Err(Error::BundleOutOfRange { mask: self.0, m })
        }
    }

    /// Goods in ascending order.
    pub fn goods(self) -> Goods {
        Goods(self.0)
    }

    /// The canonical order used for serialization: cardinality, then mask.
    pub fn canonical_cmp(&self, other: &Bundle) -> Ordering {
        (self.len(), self.0).cmp(&(other.len(), other.0))
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, label) in self.labels().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{label}")?;
        }
        f.write_str("}")
    }
}

pub struct Goods(u64);

impl Iterator for Goods {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let g = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

/// Iterates all subsets of `0..m` in ascending mask order.
pub fn all_bundles(m: usize) -> impl Iterator<Item = Bundle> {
    (0..1u64 << m).map(Bundle)
}

/// Iterates all subsets of `set`, ascending by mask.
pub fn subsets_of(set: Bundle) -> impl Iterator<Item = Bundle> {
    let full = set.0;
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == full {
            None
        } else {
            Some((cur.wrapping_sub(full)) & full)
        };
        Some(Bundle(cur))
    })
}

/// Sorts by the canonical (cardinality, mask) order and removes duplicates.
pub fn canonicalize(bundles: &mut Vec<Bundle>) {
    bundles.sort_by(Bundle::canonical_cmp);
    bundles.dedup();
}

/// An ordered n-tuple of pairwise disjoint bundles covering all `m` goods.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation {
    bundles: Vec<Bundle>,
}

impl Allocation {
    pub fn new(bundles: Vec<Bundle>, m: usize) -> Result<Self> {
        if bundles.is_empty() {
            return Err(Error::InvalidAllocation("no agents".into()));
        }
        let mut seen = Bundle::EMPTY;
        for (i, b) in bundles.iter().enumerate() {
            if !b.fits(m) {
                return Err(Error::InvalidAllocation(format!(
                    "bundle of agent {} uses goods outside 1..={m}",
                    i + 1
                )));
            }
            if !seen.is_disjoint(*b) {
                return Err(Error::InvalidAllocation(format!(
                    "bundle of agent {} overlaps an earlier bundle",
                    i + 1
                )));
            }
            seen = seen.union(*b);
        }
        if seen != Bundle::full(m) {
            return Err(Error::InvalidAllocation(format!(
                "goods {} are unallocated",
                Bundle::full(m).difference(seen)
            )));
        }
        Ok(Allocation { bundles })
    }

    /// Builds from the owner of each good (`owners[j]` is the 0-based agent of good `j`).
    pub fn from_owners(owners: &[usize], n: usize) -> Self {
        let mut bundles = vec![Bundle::EMPTY; n];
        for (good, &agent) in owners.iter().enumerate() {
            bundles[agent] = bundles[agent].with(good);
        }
        Allocation { bundles }
    }

    /// Builds from 1-indexed good labels per agent.
    pub fn from_labels(labels: &[Vec<usize>], m: usize) -> Result<Self> {
        let bundles = labels
            .iter()
            .map(|l| Bundle::from_labels(l, m))
            .collect::<Result<Vec<_>>>()?;
        Allocation::new(bundles, m)
    }

    pub fn agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, agent: usize) -> Bundle {
        self.bundles[agent]
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn labels(&self) -> Vec<Vec<usize>> {
        self.bundles.iter().map(|b| b.labels()).collect()
    }

    /// Position in the canonical scan order: the base-`n` digit string of
    /// owners, good 1 most significant.
    pub fn canonical_index(&self, m: usize) -> u128 {
        let n = self.bundles.len() as u128;
        (0..m).fold(0u128, |acc, good| {
            let owner = self
                .bundles
                .iter()
                .position(|b| b.contains(good))
                .unwrap_or(0) as u128;
            acc * n + owner
        })
    }
}

impl fmt::Display for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, b) in self.bundles.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        let b = Bundle::from_labels(&[1, 3], 4).unwrap();
        assert_eq!(b.mask(), 0b101);
        assert_eq!(b.labels(), vec![1, 3]);
        assert_eq!(b.to_string(), "{1,3}");
        assert!(Bundle::from_labels(&[5], 4).is_err());
        assert!(Bundle::from_labels(&[0], 4).is_err());
    }

    #[test]
    fn subset_enumeration() {
        let set = Bundle::from_goods([0, 2, 5]);
        let subs: Vec<_> = subsets_of(set).collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset_of(set)));
        assert_eq!(subsets_of(Bundle::EMPTY).count(), 1);
        assert_eq!(Bundle::full(63).len(), 63);
        assert_eq!(Bundle::full(0), Bundle::EMPTY);
    }

    #[test]
    fn allocation_validation() {
        let a = Allocation::from_labels(&[vec![1, 2], vec![3, 4]], 4).unwrap();
        assert_eq!(a.canonical_index(4), 0b0011);
        assert!(Allocation::from_labels(&[vec![1, 2], vec![2, 3, 4]], 4).is_err());
        assert!(Allocation::from_labels(&[vec![1], vec![3, 4]], 4).is_err());
        let owners = Allocation::from_owners(&[1, 0, 2], 3);
        assert_eq!(owners.labels(), vec![vec![2], vec![1], vec![3]]);
        // owners 1, 0, 2 read in base 3, first good most significant
        assert_eq!(owners.canonical_index(3), 9 + 2);
    }

    #[test]
    fn canonical_order() {
        let mut v = vec![
            Bundle::from_goods([2]),
            Bundle::from_goods([0, 1]),
            Bundle::from_goods([0]),
            Bundle::from_goods([0]),
        ];
        canonicalize(&mut v);
        assert_eq!(v, vec![Bundle::from_goods([0]), Bundle::from_goods([2]), Bundle::from_goods([0, 1])]);
    }
}
