//! Value distributions under the uniformly random allocation, quantile
//! shares and fairness verdicts.
//!
//! Under the random allocation every good lands in a given agent's bundle
//! independently with probability `1/n`, so bundle `S` has probability
//! `(n-1)^(m-|S|) / n^m`. All weights below are those integer numerators.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bundle::{Allocation, Bundle};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, from_biguints, Rational, Q};
use crate::valuation::Valuation;

pub const DEFAULT_EXACT_CAP: usize = 24;
/// Hard ceiling for the exact cap; tables are indexed by `u32`.
pub const MAX_EXACT_CAP: usize = 30;

static EXACT_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_EXACT_CAP);

/// Largest `m` for which exact `2^m` enumeration is attempted.
pub fn exact_cap() -> usize {
    EXACT_CAP.load(Ordering::Relaxed)
}

/// Sets the process-wide exact cap, clamped to [`MAX_EXACT_CAP`].
pub fn set_exact_cap(cap: usize) {
    EXACT_CAP.store(cap.min(MAX_EXACT_CAP), Ordering::Relaxed);
}

fn check_cap(m: usize) -> Result<()> {
    let cap = exact_cap();
    if m > cap {
        Err(Error::ExactCapExceeded { m, cap })
    } else {
        Ok(())
    }
}

/// `n^m`.
pub fn total_weight(n: usize, m: usize) -> BigUint {
    BigUint::from(n).pow(m as u32)
}

/// Weight of a single bundle of size `size`: `(n-1)^(m-size)`.
pub fn bundle_weight(n: usize, m: usize, size: usize) -> BigUint {
    BigUint::from(n - 1).pow((m - size) as u32)
}

/// The exact law of `v(X)`, as atoms over the common denominator `n^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueDistribution {
    pub n: usize,
    pub m: usize,
    /// `(value, weight)`, values strictly ascending, weights positive.
    pub atoms: Vec<(Rational, BigUint)>,
    cumulative: Vec<BigUint>,
}

impl ValueDistribution {
    pub fn denominator(&self) -> BigUint {
        total_weight(self.n, self.m)
    }

    /// Cumulative weight up to and including atom `i`.
    pub fn cumulative(&self, i: usize) -> &BigUint {
        &self.cumulative[i]
    }

    /// Total weight of values `<= value`.
    pub fn weight_at_most(&self, value: &Rational) -> BigUint {
        match self.atoms.partition_point(|(v, _)| v <= value) {
            0 => BigUint::zero(),
            i => self.cumulative[i - 1].clone(),
        }
    }

    /// `P[v(X) <= value]`.
    pub fn cdf(&self, value: &Rational) -> Rational {
        from_biguints(self.weight_at_most(value), self.denominator())
    }

    /// The least value whose cumulative weight reaches `q * n^m`.
    pub fn quantile(&self, q: &Rational) -> Result<Rational> {
        check_q(q)?;
        let need = rational::ceil_times(q, &self.denominator());
        let i = self.cumulative.partition_point(|c| *c < need);
        Ok(self.atoms[i].0.clone())
    }
}

pub fn check_q(q: &Rational) -> Result<()> {
    if *q <= Rational::zero() || *q > Rational::one() {
        return Err(Error::QuantileDomain(q.clone()));
    }
    Ok(())
}

/// Distribution plus the value group of every bundle.
pub(crate) struct Analysis {
    pub dist: ValueDistribution,
    group_of_mask: Vec<u32>,
    /// Cumulative weight through each distinct value, zero-weight values included.
    group_cum: Vec<BigUint>,
}

impl Analysis {
    /// Satisfaction numerators per mask as `u64`, when `n^m` fits.
    pub fn satisfaction_table(&self) -> Result<Vec<u64>> {
        let cum = self
            .group_cum
            .iter()
            .map(|c| c.to_u64().ok_or(Error::Overflow("tabulating satisfaction")))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.group_of_mask.iter().map(|&a| cum[a as usize]).collect())
    }
}

pub(crate) fn analyze(valuation: &Valuation, n: usize) -> Result<Analysis> {
    if n == 0 {
        return Err(Error::InvalidInstance("n must be positive".into()));
    }
    let m = valuation.goods();
    check_cap(m)?;
    let scores = valuation.scores()?;
    let mut order: Vec<(i128, u32)> = scores
        .keys
        .iter()
        .enumerate()
        .map(|(mask, &k)| (k, mask as u32))
        .collect();
    order.sort_unstable();

    let small = (n as u128).checked_pow(m as u32).is_some();
    let pow_small: Vec<u128> = if small {
        (0..=m).map(|e| ((n - 1) as u128).pow(e as u32)).collect()
    } else {
        Vec::new()
    };
    let pow_big: Vec<BigUint> = if small {
        Vec::new()
    } else {
        (0..=m).map(|e| BigUint::from(n - 1).pow(e as u32)).collect()
    };

    let mut atoms: Vec<(Rational, BigUint)> = Vec::new();
    let mut cumulative = Vec::new();
    let mut group_of_mask = vec![0u32; order.len()];
    let mut group_cum = Vec::new();
    let mut running = BigUint::zero();
    let mut start = 0;
    while start < order.len() {
        let key = order[start].0;
        let mut end = start;
        let mut counts = vec![0u64; m + 1];
        while end < order.len() && order[end].0 == key {
            let mask = order[end].1;
            counts[mask.count_ones() as usize] += 1;
            group_of_mask[mask as usize] = group_cum.len() as u32;
            end += 1;
        }
        let weight = if small {
            BigUint::from(
                counts
                    .iter()
                    .enumerate()
                    .map(|(size, &c)| c as u128 * pow_small[m - size])
                    .sum::<u128>(),
            )
        } else {
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(size, &c)| &pow_big[m - size] * c)
                .sum()
        };
        running += &weight;
        group_cum.push(running.clone());
        // Zero-weight groups only arise for n = 1.
        if !weight.is_zero() {
            atoms.push((scores.value(key), weight));
            cumulative.push(running.clone());
        }
        start = end;
    }
    Ok(Analysis {
        dist: ValueDistribution { n, m, atoms, cumulative },
        group_of_mask,
        group_cum,
    })
}

pub fn exact_distribution(valuation: &Valuation, n: usize) -> Result<ValueDistribution> {
    Ok(analyze(valuation, n)?.dist)
}

pub fn quantile_share(valuation: &Valuation, n: usize, q: &Rational) -> Result<Rational> {
    check_q(q)?;
    exact_distribution(valuation, n)?.quantile(q)
}

/// `P[v(X) <= v(bundle)]`, exact over the denominator `n^m`.
pub fn satisfaction(valuation: &Valuation, n: usize, bundle: Bundle) -> Result<Rational> {
    let value = valuation.evaluate(bundle)?;
    Ok(exact_distribution(valuation, n)?.cdf(&value))
}

pub fn is_q_fair(valuation: &Valuation, n: usize, q: &Rational, bundle: Bundle) -> Result<bool> {
    let value = valuation.evaluate(bundle)?;
    let dist = exact_distribution(valuation, n)?;
    let fair = value >= dist.quantile(q)?;
    debug_assert_eq!(fair, dist.cdf(&value) >= *q);
    Ok(fair)
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleEstimate {
    pub estimate: f64,
    pub half_width: f64,
    pub samples: u64,
}

/// Monte Carlo estimate of `P[v(X) <= v(bundle)]` with a Hoeffding half-width.
pub fn sample_satisfaction(
    valuation: &Valuation,
    n: usize,
    bundle: Bundle,
    samples: u64,
    delta: f64,
    seed: u64,
) -> Result<SampleEstimate> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("delta must lie in (0, 1), got {delta}")));
    }
    let target = valuation.evaluate(bundle)?;
    let m = valuation.goods();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut mask = 0u64;
        for j in 0..m {
            if rng.random_range(0..n) == 0 {
                mask |= 1 << j;
            }
        }
        if valuation.value_of(Bundle::from_mask(mask)) <= target {
            hits += 1;
        }
    }
    Ok(SampleEstimate {
        estimate: hits as f64 / samples as f64,
        half_width: ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt(),
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub agent: usize,
    pub bundle: Vec<usize>,
    pub bundle_value: Q,
    pub quantile_share: Q,
    pub satisfaction: Q,
    pub fair: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AllocationReport {
    pub q: Q,
    pub verdicts: Vec<Verdict>,
    pub min_satisfaction: Q,
    pub fair: bool,
}

pub fn allocation_report(instance: &Instance, allocation: &Allocation, q: &Rational) -> Result<AllocationReport> {
    check_q(q)?;
    let n = instance.agents();
    if allocation.agents() != n {
        return Err(Error::InvalidAllocation(format!(
            "{} bundles for {n} agents",
            allocation.agents()
        )));
    }
    let m = instance.goods();
    Allocation::new(allocation.bundles().to_vec(), m)?;
    let mut verdicts = Vec::with_capacity(n);
    for (agent, valuation) in instance.valuations().iter().enumerate() {
        let dist = exact_distribution(valuation, n)?;
        let bundle = allocation.bundle(agent);
        let value = valuation.value_of(bundle);
        let share = dist.quantile(q)?;
        let sat = dist.cdf(&value);
        let fair = value >= share;
        debug_assert_eq!(fair, sat >= *q);
        verdicts.push(Verdict {
            agent: agent + 1,
            bundle: bundle.labels(),
            bundle_value: Q(value),
            quantile_share: Q(share),
            satisfaction: Q(sat),
            fair,
        });
    }
    let min_satisfaction = verdicts
        .iter()
        .map(|v| v.satisfaction.clone())
        .min()
        .expect("at least one agent");
    Ok(AllocationReport {
        q: Q(q.clone()),
        fair: verdicts.iter().all(|v| v.fair),
        verdicts,
        min_satisfaction,
    })
}

/// Number of the `n^m` allocations that leave this agent with value 0.
pub fn count_zero_allocations(valuation: &Valuation, n: usize) -> Result<BigUint> {
    if !matches!(valuation, Valuation::Explicit01 { .. }) {
        return Err(Error::UnsupportedValuation {
            op: "count_zero_allocations",
            variant: valuation.kind(),
        });
    }
    let dist = exact_distribution(valuation, n)?;
    Ok(dist.weight_at_most(&Rational::zero()))
}

/// `num / n^m` as a rational.
pub(crate) fn over_total(num: u64, n: usize, m: usize) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(total_weight(n, m)))
}
