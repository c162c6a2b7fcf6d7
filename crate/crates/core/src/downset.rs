//! Downward-closed bundle families over at most six goods, stored as 64-bit
//! sets of bundle masks.
//!
//! A down-set is the zero set of a monotone 0/1 valuation, so enumerating
//! down-sets enumerates those valuations.

use rand::Rng;

use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::valuation::{minimal_members, Valuation};

/// Largest `m` whose bundle families fit a `u64`.
pub const DOWNSET_GOODS: usize = 6;

pub fn check_goods(m: usize) -> Result<()> {
    if m > DOWNSET_GOODS {
        return Err(Error::Precondition(format!(
            "bundle families are limited to {DOWNSET_GOODS} goods, got {m}"
        )));
    }
    Ok(())
}

fn all_masks(m: usize) -> u64 {
    if m == DOWNSET_GOODS {
        u64::MAX
    } else {
        (1u64 << (1 << m)) - 1
    }
}

pub fn contains(family: u64, bundle: Bundle) -> bool {
    family >> bundle.mask() & 1 == 1
}

pub fn is_down_closed(m: usize, family: u64) -> bool {
    (0..1u64 << m)
        .filter(|&s| family >> s & 1 == 1)
        .all(|s| (0..m).all(|j| s >> j & 1 == 0 || family >> (s ^ 1 << j) & 1 == 1))
}

/// Smallest down-set containing `family`.
pub fn down_closure(m: usize, mut family: u64) -> u64 {
    for s in (0..1u64 << m).rev() {
        if family >> s & 1 == 1 {
            for j in 0..m {
                if s >> j & 1 == 1 {
                    family |= 1 << (s ^ 1 << j);
                }
            }
        }
    }
    family
}

pub fn bundles(family: u64) -> Vec<Bundle> {
    let mut out = Vec::with_capacity(family.count_ones() as usize);
    let mut rest = family;
    while rest != 0 {
        let s = rest.trailing_zeros() as u64;
        out.push(Bundle::from_mask(s));
        rest &= rest - 1;
    }
    out
}

pub fn from_bundles(bundles: &[Bundle]) -> u64 {
    bundles.iter().fold(0, |acc, b| acc | 1 << b.mask())
}

/// `Σ_{S ∈ family} (n-1)^(m-|S|)`: the number of allocations in which the
/// owner's bundle lies in the family.
pub fn weight(m: usize, n: usize, family: u64) -> u128 {
    let pow: Vec<u128> = (0..=m).map(|e| ((n - 1) as u128).pow(e as u32)).collect();
    bundles(family).iter().map(|b| pow[m - b.len()]).sum()
}

/// The monotone 0/1 valuation whose zero set is `family`.
pub fn to_valuation(m: usize, family: u64) -> Result<Valuation> {
    let ones: Vec<Bundle> = bundles(all_masks(m) & !family);
    Valuation::explicit01(m, minimal_members(ones))
}

/// Calls `f` on every down-set over `m` goods whose weight is at most
/// `max_weight` (weights use `n`), in a fixed order.
pub fn for_each_down_set(m: usize, n: usize, max_weight: Option<u128>, mut f: impl FnMut(u64)) -> Result<()> {
    check_goods(m)?;
    let pow: Vec<u128> = (0..=m).map(|e| ((n.max(1) - 1) as u128).pow(e as u32)).collect();
    let cap = max_weight.unwrap_or(u128::MAX);
    fn go(m: usize, s: u64, family: u64, w: u128, cap: u128, pow: &[u128], f: &mut dyn FnMut(u64)) {
        if s == 1 << m {
            f(family);
            return;
        }
        go(m, s + 1, family, w, cap, pow, f);
        let closed = (0..m).all(|j| s >> j & 1 == 0 || family >> (s ^ 1 << j) & 1 == 1);
        let w2 = w + pow[m - s.count_ones() as usize];
        if closed && w2 <= cap {
            go(m, s + 1, family | 1 << s, w2, cap, pow, f);
        }
    }
    go(m, 0, 0, 0, cap, &pow, &mut f);
    Ok(())
}

/// A random down-set: the closure of a random set of generators.
pub fn random_down_set<R: Rng>(m: usize, rng: &mut R) -> u64 {
    let density: f64 = rng.random::<f64>() * 0.5;
    let mut gens = 0u64;
    for s in 0..1u64 << m {
        if rng.random::<f64>() < density / (1 + (s.count_ones() as usize).abs_diff(m / 2)) as f64 {
            gens |= 1 << s;
        }
    }
    down_closure(m, gens)
}

/// Image of the family under the permutation of goods `perm`.
pub fn permute(m: usize, family: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    for b in bundles(family) {
        let image = b.goods().fold(0u64, |acc, g| acc | 1 << perm[g]);
        out |= 1 << image;
    }
    debug_assert!(m <= DOWNSET_GOODS);
    out
}

/// All permutations of `0..m` in lexicographic order.
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..m).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..m).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Whether `family` is the least member (as an integer) of its orbit under
/// permutations of the goods.
pub fn is_canonical(m: usize, family: u64, perms: &[Vec<usize>]) -> bool {
    perms.iter().all(|p| permute(m, family, p) >= family)
}

fn image_table(m: usize, perm: &[usize]) -> Vec<u8> {
    (0..1u64 << m)
        .map(|s| (0..m).filter(|&g| s >> g & 1 == 1).fold(0u8, |acc, g| acc | 1 << perm[g]))
        .collect()
}

fn apply_table(table: &[u8], family: u64) -> u64 {
    let mut out = 0u64;
    let mut rest = family;
    while rest != 0 {
        out |= 1 << table[rest.trailing_zeros() as usize];
        rest &= rest - 1;
    }
    out
}

/// Calls `f` on one down-set per orbit under permutations of the goods: the
/// least member of each orbit.
pub fn for_each_canonical_down_set(m: usize, mut f: impl FnMut(u64)) -> Result<()> {
    check_goods(m)?;
    // Adjacent transpositions reject most non-canonical sets cheaply.
    let mut tables: Vec<Vec<u8>> = (1..m)
        .map(|i| {
            let mut p: Vec<usize> = (0..m).collect();
            p.swap(i - 1, i);
            image_table(m, &p)
        })
        .collect();
    tables.extend(permutations(m).iter().skip(1).map(|p| image_table(m, p)));
    for_each_down_set(m, 2, None, |fam| {
        if tables.iter().all(|t| apply_table(t, fam) >= fam) {
            f(fam);
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::count_zero_allocations;
    use num_bigint::BigUint;

    #[test]
    fn dedekind_numbers() {
        for (m, d) in [(0, 2u64), (1, 3), (2, 6), (3, 20), (4, 168), (5, 7581)] {
            let mut count = 0u64;
            for_each_down_set(m, 2, None, |_| count += 1).unwrap();
            assert_eq!(count, d, "m = {m}");
        }
    }

    #[test]
    fn weights_match_zero_counts() {
        let mut checked = 0;
        for_each_down_set(3, 3, None, |fam| {
            assert!(is_down_closed(3, fam));
            let v = to_valuation(3, fam).unwrap();
            assert_eq!(count_zero_allocations(&v, 3).unwrap(), BigUint::from(weight(3, 3, fam)));
            checked += 1;
        })
        .unwrap();
        assert_eq!(checked, 20);
    }

    #[test]
    fn budget_filter_and_closure() {
        let mut count = 0;
        for_each_down_set(2, 2, Some(1), |fam| {
            assert!(weight(2, 2, fam) <= 1);
            count += 1;
        })
        .unwrap();
        // ∅-family, {∅} has weight 1.
        assert_eq!(count, 2);
        let closed = down_closure(3, 1 << 0b011);
        assert_eq!(bundles(closed).len(), 4);
    }

    #[test]
    fn canonical_orbits() {
        let perms = permutations(3);
        assert_eq!(perms.len(), 6);
        let mut canon = 0;
        for_each_down_set(3, 2, None, |fam| {
            if is_canonical(3, fam, &perms) {
                canon += 1;
            }
        })
        .unwrap();
        // Monotone Boolean functions of 3 variables up to permutation.
        assert_eq!(canon, 10);
        for (m, orbits) in [(0, 2), (1, 3), (2, 5), (3, 10), (4, 30), (5, 210)] {
            let mut count = 0;
            for_each_canonical_down_set(m, |fam| {
                assert!(is_canonical(m, fam, &permutations(m)));
                count += 1;
            })
            .unwrap();
            assert_eq!(count, orbits, "m = {m}");
        }
    }
}
