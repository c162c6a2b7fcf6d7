use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use crate::allocate::exhaustive_fair_allocation;
use crate::bundle::Bundle;
use crate::downset::{self, down_closure, for_each_down_set, is_canonical, permutations};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::quantile::{count_zero_allocations, total_weight};
use crate::rational::{Rational, Q};

/// `n^(m-n+1) (n-1)^(n-1) - 1`: the largest per-agent count of zero-value
/// allocations that still leaves each agent's share at 1 for
/// `q = (1-1/n)^(n-1)`.
pub fn budget(n: usize, m: usize) -> Result<BigUint> {
    if n == 0 || m + 1 < n {
        return Err(Error::Precondition(format!("need n ≥ 1 and m ≥ n - 1, got n = {n}, m = {m}")));
    }
    let value = BigUint::from(n).pow((m + 1 - n) as u32) * BigUint::from(n - 1).pow((n - 1) as u32);
    Ok(value - BigUint::one())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub n: usize,
    pub m: usize,
    /// Per-agent cap on allocations in which the agent has value 0.
    pub budget: BigUint,
    /// Canonicalize the first agent's family under permutations of goods.
    pub symmetry: bool,
    pub time_limit: Option<Duration>,
}

impl SearchSpec {
    /// Default budget, symmetry breaking on, no time limit.
    pub fn new(n: usize, m: usize) -> Result<Self> {
        Ok(SearchSpec { n, m, budget: budget(n, m)?, symmetry: true, time_limit: None })
    }

    pub fn with_budget(mut self, budget: impl Into<BigUint>) -> Self {
        self.budget = budget.into();
        self
    }

    pub fn with_symmetry(mut self, symmetry: bool) -> Self {
        self.symmetry = symmetry;
        self
    }
}

/// A profile in which every agent has value 0 in at most `budget`
/// allocations, yet every allocation leaves some agent with value 0.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub n: usize,
    pub m: usize,
    pub budget: String,
    /// Each agent's zero-valued bundles, as 1-indexed labels.
    pub zero_families: Vec<Vec<Vec<usize>>>,
    pub zero_counts: Vec<String>,
    /// The level `(budget + 1) / n^m` at which every share equals 1.
    pub q: Q,
    /// Independently confirmed: valid, within budget, and no q-fair allocation.
    pub verified: bool,
    #[serde(skip)]
    pub instance: Instance,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustionCertificate {
    pub n: usize,
    pub m: usize,
    pub budget: String,
    pub symmetry: bool,
    /// Down-sets over `m` goods within the budget.
    pub families_within_budget: usize,
    /// Families tried for agent 1 (canonical ones when symmetry is on).
    pub first_agent_families: usize,
    /// Profiles of agents `1..n-1` examined; agent `n` is then forced.
    pub profiles_examined: u64,
    pub allocations: u64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchOutcome {
    Counterexample(Witness),
    Exhausted(ExhaustionCertificate),
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        matches!(self, SearchOutcome::Counterexample(_))
    }
}

fn builtin_size(n: usize, m: usize) -> bool {
    (2..=3).contains(&n) && (1..=4).contains(&m)
}

struct Space {
    n: usize,
    m: usize,
    cap: u128,
    /// `owners[a * n + i]`: agent `i`'s bundle mask in allocation `a`.
    bundles: Vec<u64>,
    families: Vec<u64>,
}

impl Space {
    fn allocations(&self) -> usize {
        self.bundles.len() / self.n
    }

    /// Extends `chosen` over agents `depth..n-1`; returns the first profile
    /// (in candidate order) whose forced last family fits the budget.
    fn extend(&self, depth: usize, uncovered: &[u32], chosen: &mut Vec<u64>, leaves: &mut u64) -> Option<Vec<u64>> {
        let n = self.n;
        if depth == n - 1 {
            *leaves += 1;
            let gens = uncovered
                .iter()
                .fold(0u64, |acc, &a| acc | 1 << self.bundles[a as usize * n + depth]);
            let forced = down_closure(self.m, gens);
            if downset::weight(self.m, n, forced) <= self.cap {
                let mut profile = chosen.clone();
                profile.push(forced);
                return Some(profile);
            }
            return None;
        }
        for &fam in &self.families {
            let rest: Vec<u32> = uncovered
                .iter()
                .copied()
                .filter(|&a| fam >> self.bundles[a as usize * n + depth] & 1 == 0)
                .collect();
            chosen.push(fam);
            let hit = self.extend(depth + 1, &rest, chosen, leaves);
            chosen.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
}

/// Searches for a profile of monotone 0/1 valuations in which every agent
/// has value 0 in at most `budget` allocations but no allocation gives every
/// agent value 1. Agents `1..n-1` range over down-sets within the budget;
/// the last agent must then contain every bundle it receives in a still
/// uncovered allocation, so its family is forced.
pub fn search_counterexample(spec: &SearchSpec) -> Result<SearchOutcome> {
    let (n, m) = (spec.n, spec.m);
    if !builtin_size(n, m) {
        return Err(Error::budget(
            "built-in search size (n ∈ {2,3}, m ≤ 4); use export_ip for larger sizes",
            format!("n = {n}, m = {m}"),
            "n ≤ 3, m ≤ 4",
        ));
    }
    let total = total_weight(n, m);
    if spec.budget >= total {
        return Err(Error::Precondition(format!(
            "budget {} must be below n^m = {total}",
            spec.budget
        )));
    }
    let cap = spec.budget.to_u128().expect("below n^m");
    let mut families = Vec::new();
    for_each_down_set(m, n, Some(cap), |f| families.push(f))?;
    let perms = permutations(m);
    let first: Vec<u64> = families
        .iter()
        .copied()
        .filter(|&f| !spec.symmetry || is_canonical(m, f, &perms))
        .collect();
    let count = n.pow(m as u32);
    let mut bundles = vec![0u64; count * n];
    for a in 0..count {
        let mut rest = a;
        // good 1 is the most significant digit
        for good in (0..m).rev() {
            bundles[a * n + rest % n] |= 1 << good;
            rest /= n;
        }
    }
    let space = Space { n, m, cap, bundles, families };
    let all: Vec<u32> = (0..space.allocations() as u32).collect();
    let start = Instant::now();
    let timed_out = AtomicBool::new(false);
    let shards: Vec<(u64, Option<Vec<u64>>)> = first
        .par_iter()
        .map(|&fam| {
            if spec.time_limit.is_some_and(|t| start.elapsed() > t) {
                timed_out.store(true, Ordering::Relaxed);
                return (0, None);
            }
            let rest: Vec<u32> = all.iter().copied().filter(|&a| fam >> space.bundles[a as usize * n] & 1 == 0).collect();
            let mut leaves = 0;
            let hit = space.extend(1, &rest, &mut vec![fam], &mut leaves);
            (leaves, hit)
        })
        .collect();
    if timed_out.load(Ordering::Relaxed) {
        let limit = spec.time_limit.expect("set when timed out");
        return Err(Error::budget("search time in milliseconds", start.elapsed().as_millis(), limit.as_millis()));
    }
    let examined = shards.iter().map(|s| s.0).sum();
    match shards.into_iter().find_map(|s| s.1) {
        Some(profile) => Ok(SearchOutcome::Counterexample(witness(spec, &profile)?)),
        None => Ok(SearchOutcome::Exhausted(ExhaustionCertificate {
            n,
            m,
            budget: spec.budget.to_string(),
            symmetry: spec.symmetry,
            families_within_budget: space.families.len(),
            first_agent_families: first.len(),
            profiles_examined: examined,
            allocations: count as u64,
        })),
    }
}

fn witness(spec: &SearchSpec, profile: &[u64]) -> Result<Witness> {
    let (n, m) = (spec.n, spec.m);
    let valuations = profile
        .iter()
        .map(|&f| downset::to_valuation(m, f))
        .collect::<Result<Vec<_>>>()?;
    let instance = Instance::new(m, valuations)?;
    let counts = instance
        .valuations()
        .iter()
        .map(|v| count_zero_allocations(v, n))
        .collect::<Result<Vec<_>>>()?;
    let q = Rational::new(
        BigInt::from(&spec.budget + BigUint::one()),
        BigInt::from(total_weight(n, m)),
    );
    let within = counts.iter().all(|c| *c <= spec.budget);
    let unsatisfiable = !exhaustive_fair_allocation(&instance, &q)?.is_fair();
    Ok(Witness {
        n,
        m,
        budget: spec.budget.to_string(),
        zero_families: profile
            .iter()
            .map(|&f| downset::bundles(f).into_iter().map(Bundle::labels).collect())
            .collect(),
        zero_counts: counts.iter().map(BigUint::to_string).collect(),
        q: Q(q),
        verified: instance.validate().is_valid() && within && unsatisfiable,
        instance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_formula() {
        assert_eq!(budget(3, 6).unwrap(), BigUint::from(323u32));
        assert_eq!(budget(3, 4).unwrap(), BigUint::from(35u32));
        assert_eq!(budget(4, 8).unwrap(), BigUint::from(27647u32));
        assert!(budget(4, 2).is_err());
    }

    #[test]
    fn reduced_scale_threshold() {
        let spec = SearchSpec::new(3, 4).unwrap();
        assert!(!search_counterexample(&spec).unwrap().found());
        match search_counterexample(&spec.with_budget(36u32)).unwrap() {
            SearchOutcome::Counterexample(w) => assert!(w.verified),
            other => panic!("expected a witness, got {other:?}"),
        }
        let tiny = SearchSpec::new(2, 2).unwrap().with_budget(1u32);
        assert!(!search_counterexample(&tiny).unwrap().found());
    }

    #[test]
    fn refuses_large_sizes() {
        let err = search_counterexample(&SearchSpec::new(3, 5).unwrap()).unwrap_err();
        assert!(err.is_budget_refusal());
        assert!(err.to_string().contains("export_ip"));
    }
}
