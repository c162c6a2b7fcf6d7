use num_bigint::BigInt;

use crate::bundle::{Allocation, Bundle, MAX_GOODS};
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::quantile::exact_distribution;
use crate::rational::Rational;
use crate::valuation::Valuation;

use super::intersection::matroid_intersection;

/// Largest number of set partitions the brute-force path will enumerate.
pub const MMS_PARTITION_BUDGET: u128 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmsResult {
    pub value: Rational,
    /// A partition into `n` bundles whose worst bundle is worth `value`.
    pub witness: Allocation,
    pub method: &'static str,
}

/// The maximin share. Matroid-rank valuations use matroid intersection when
/// `n·m` fits a bitmask; everything else is enumerated.
pub fn mms_value(valuation: &Valuation, n: usize) -> Result<MmsResult> {
    match valuation {
        Valuation::MatroidRank(matroid) if n >= 1 && n * matroid.ground_size() <= MAX_GOODS => {
            matroid_mms(matroid, n)
        }
        _ => mms_brute_force(valuation, n),
    }
}

/// Number of partitions of `m` goods into at most `n` non-empty parts.
fn partition_count(m: usize, n: usize) -> u128 {
    let mut s = vec![vec![0u128; n + 1]; m + 1];
    s[0][0] = 1;
    for i in 1..=m {
        for k in 1..=n.min(i) {
            s[i][k] = s[i - 1][k - 1].saturating_add((k as u128).saturating_mul(s[i - 1][k]));
        }
    }
    s[m].iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Enumerates partitions into at most `n` parts as restricted growth strings,
/// with a monotone upper bound when the valuation allows it.
pub fn mms_brute_force(valuation: &Valuation, n: usize) -> Result<MmsResult> {
    if n == 0 {
        return Err(Error::InvalidInstance("n must be positive".into()));
    }
    let m = valuation.goods();
    let count = partition_count(m, n);
    if count > MMS_PARTITION_BUDGET {
        return Err(Error::budget("set partitions to enumerate", count, MMS_PARTITION_BUDGET));
    }
    let scores = valuation.scores()?;
    let search = PartitionSearch {
        keys: &scores.keys,
        n,
        m,
        full: Bundle::full(m).mask(),
        monotone: valuation.is_monotone(),
    };
    let mut best = None;
    search.dfs(0, &mut Vec::with_capacity(n), &mut best);
    let (key, mut parts) = best.expect("some partition exists");
    parts.resize(n, 0);
    let witness = Allocation::new(parts.into_iter().map(Bundle::from_mask).collect(), m)?;
    Ok(MmsResult { value: scores.value(key), witness, method: "brute_force" })
}

struct PartitionSearch<'a> {
    keys: &'a [i128],
    n: usize,
    m: usize,
    full: u64,
    monotone: bool,
}

impl PartitionSearch<'_> {
    fn worst(&self, parts: &[u64], extra: u64) -> i128 {
        let mut worst = parts
            .iter()
            .map(|&p| self.keys[(p | extra) as usize])
            .min()
            .unwrap_or(i128::MAX);
        if parts.len() < self.n {
            worst = worst.min(self.keys[extra as usize]);
        }
        worst
    }

    fn dfs(&self, depth: usize, parts: &mut Vec<u64>, best: &mut Option<(i128, Vec<u64>)>) {
        let remaining = self.full & !((1u64 << depth) - 1);
        if self.monotone {
            if let Some((b, _)) = best {
                if self.worst(parts, remaining) <= *b {
                    return;
                }
            }
        }
        if depth == self.m {
            let value = self.worst(parts, 0);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                *best = Some((value, parts.clone()));
            }
            return;
        }
        let bit = 1u64 << depth;
        for p in 0..parts.len() {
            parts[p] |= bit;
            self.dfs(depth + 1, parts, best);
            parts[p] &= !bit;
        }
        if parts.len() < self.n {
            parts.push(bit);
            self.dfs(depth + 1, parts, best);
            parts.pop();
        }
    }
}

/// Maximin share of a matroid-rank valuation: the largest `k` such that the
/// ground set holds `n` disjoint independent sets of size `k`, found as a
/// common independent set of size `n·k` in the direct sum of `n` truncated
/// copies and the partition matroid allowing each good once.
pub fn matroid_mms(matroid: &Matroid, n: usize) -> Result<MmsResult> {
    if n == 0 {
        return Err(Error::InvalidInstance("n must be positive".into()));
    }
    let m = matroid.ground_size();
    if n * m > MAX_GOODS {
        return Err(Error::Precondition(format!(
            "n·m = {} exceeds the {MAX_GOODS}-element limit of the product ground set",
            n * m
        )));
    }
    let copies = Matroid::partition(
        n * m,
        (0..m)
            .map(|j| (Bundle::from_goods((0..n).map(|i| i * m + j)), 1))
            .collect(),
    )?;
    let mut best_k = 0;
    let mut best_sets = vec![0u64; n];
    for k in 1..=m / n {
        let sum = Matroid::direct_sum(vec![Matroid::truncation(matroid.clone(), k); n])?;
        let common = matroid_intersection(&sum, &copies)?;
        if common.len() < n * k {
            break;
        }
        best_k = k;
        best_sets = (0..n)
            .map(|i| (common.mask() >> (i * m)) & Bundle::full(m).mask())
            .collect();
    }
    let used = best_sets.iter().fold(0, |a, b| a | b);
    best_sets[0] |= Bundle::full(m).mask() & !used;
    let witness = Allocation::new(best_sets.into_iter().map(Bundle::from_mask).collect(), m)?;
    Ok(MmsResult {
        value: Rational::from_integer(BigInt::from(best_k)),
        witness,
        method: "matroid_intersection",
    })
}

/// `P[v(X) <= MMS]`.
pub fn mms_quantile(valuation: &Valuation, n: usize) -> Result<Rational> {
    let mms = mms_value(valuation, n)?;
    Ok(exact_distribution(valuation, n)?.cdf(&mms.value))
}
