//! Exhaustive scans over all `n^m` allocations.
//!
//! Allocations are visited in canonical order: the owner of each good is a
//! base-`n` digit, good 1 most significant, ascending. Searches split on the
//! owner of good 1 and merge branch results in that order, so the answer does
//! not depend on the thread count.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{Allocation, Bundle};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::quantile::{analyze, check_q, over_total, total_weight};
use crate::rational::{self, Rational, Q};

pub const DEFAULT_ALLOCATION_BUDGET: u64 = 100_000_000;

static ALLOCATION_BUDGET: AtomicU64 = AtomicU64::new(DEFAULT_ALLOCATION_BUDGET);

/// Largest `n^m` an exhaustive scan will attempt.
pub fn allocation_budget() -> u64 {
    ALLOCATION_BUDGET.load(Ordering::Relaxed)
}

pub fn set_allocation_budget(budget: u64) {
    ALLOCATION_BUDGET.store(budget, Ordering::Relaxed);
}

/// Returns `n^m` if it is within the allocation budget.
pub(crate) fn check_allocation_budget(n: usize, m: usize) -> Result<u64> {
    let total = total_weight(n, m);
    let budget = allocation_budget();
    match total.to_u64() {
        Some(t) if t <= budget => Ok(t),
        _ => Err(Error::budget("allocations to scan", total, budget)),
    }
}

/// Stored classes per certificate; the totals are always exact.
const CERTIFICATE_LIMIT: usize = 10_000;

/// Below this many allocations the scan stays on the calling thread.
const PARALLEL_THRESHOLD: u64 = 1 << 12;

/// All allocations whose first `prefix.len()` goods go to the listed agents,
/// and an agent who is unhappy in every one of them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverClass {
    pub prefix: Vec<usize>,
    pub agent: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfeasibilityCertificate {
    pub q: Q,
    pub thresholds: Vec<Q>,
    pub classes: Vec<CoverClass>,
    pub classes_total: u64,
    /// Allocations covered by all classes; equals `n^m`.
    pub covered: u64,
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FairSearch {
    Fair(Allocation),
    Infeasible(InfeasibilityCertificate),
}

impl FairSearch {
    pub fn allocation(&self) -> Option<&Allocation> {
        match self {
            FairSearch::Fair(a) => Some(a),
            FairSearch::Infeasible(_) => None,
        }
    }

    pub fn is_fair(&self) -> bool {
        matches!(self, FairSearch::Fair(_))
    }
}

/// Which bundles each agent accepts.
pub(crate) struct Acceptance {
    pub n: usize,
    pub m: usize,
    pub ok: Vec<Vec<bool>>,
    /// Every superset of an accepted bundle is accepted; enables pruning.
    pub up_closed: bool,
}

#[derive(Default)]
pub(crate) struct Scan {
    pub witness: Option<Vec<usize>>,
    pub classes: Vec<CoverClass>,
    pub classes_total: u64,
    pub covered: u64,
}

impl Scan {
    fn record(&mut self, owners: &[usize], agent: usize, covered: u64) {
        if self.classes.len() < CERTIFICATE_LIMIT {
            self.classes.push(CoverClass {
                prefix: owners.iter().map(|a| a + 1).collect(),
                agent: agent + 1,
            });
        }
        self.classes_total += 1;
        self.covered += covered;
    }

    fn absorb(&mut self, other: Scan) {
        let room = CERTIFICATE_LIMIT - self.classes.len();
        self.classes.extend(other.classes.into_iter().take(room));
        self.classes_total += other.classes_total;
        self.covered += other.covered;
    }
}

struct AcceptScan<'a> {
    acc: &'a Acceptance,
    full: u64,
    pow: Vec<u64>,
}

impl AcceptScan<'_> {
    fn dfs(&self, depth: usize, bundles: &mut [u64], owners: &mut Vec<usize>, out: &mut Scan) -> bool {
        let m = self.acc.m;
        let remaining = self.full & !((1u64 << depth) - 1);
        let check = |extra: u64| (0..self.acc.n).find(|&i| !self.acc.ok[i][(bundles[i] | extra) as usize]);
        if self.acc.up_closed || depth == m {
            let extra = if self.acc.up_closed { remaining } else { 0 };
            if let Some(agent) = check(extra) {
                out.record(owners, agent, self.pow[m - depth]);
                return false;
            }
            if depth == m {
                out.witness = Some(owners.clone());
                return true;
            }
        }
        for a in 0..self.acc.n {
            bundles[a] |= 1 << depth;
            owners.push(a);
            let found = self.dfs(depth + 1, bundles, owners, out);
            owners.pop();
            bundles[a] &= !(1 << depth);
            if found {
                return true;
            }
        }
        false
    }
}

/// First allocation in canonical order where every agent accepts her bundle,
/// or the classes covering all allocations.
pub(crate) fn first_acceptable(acc: &Acceptance) -> Scan {
    let n = acc.n;
    let m = acc.m;
    let pow: Vec<u64> = (0..=m).map(|e| (n as u64).pow(e as u32)).collect();
    let scan = AcceptScan { acc, full: Bundle::full(m).mask(), pow };
    let total = scan.pow[m];

    let mut root = Scan::default();
    if acc.up_closed {
        if let Some(agent) = (0..n).find(|&i| !acc.ok[i][scan.full as usize]) {
            root.record(&[], agent, total);
            return root;
        }
    }
    if m == 0 || total < PARALLEL_THRESHOLD {
        scan.dfs(0, &mut vec![0; n], &mut Vec::new(), &mut root);
        return root;
    }
    let branches: Vec<Scan> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut bundles = vec![0u64; n];
            bundles[first] = 1;
            let mut out = Scan::default();
            scan.dfs(1, &mut bundles, &mut vec![first], &mut out);
            out
        })
        .collect();
    for branch in branches {
        if branch.witness.is_some() {
            return branch;
        }
        root.absorb(branch);
    }
    root
}

struct Tables {
    n: usize,
    m: usize,
    sat: Vec<Vec<u64>>,
    monotone: bool,
}

fn satisfaction_tables(instance: &Instance) -> Result<Tables> {
    let n = instance.agents();
    let m = instance.goods();
    check_allocation_budget(n, m)?;
    let mut sat: Vec<Vec<u64>> = Vec::with_capacity(n);
    for (i, v) in instance.valuations().iter().enumerate() {
        match instance.valuations()[..i].iter().position(|u| u == v) {
            Some(j) => {
                let copy = sat[j].clone();
                sat.push(copy)
            }
            None => sat.push(analyze(v, n)?.satisfaction_table()?),
        }
    }
    let monotone = instance.valuations().iter().all(|v| v.is_monotone());
    Ok(Tables { n, m, sat, monotone })
}

/// First q-fair allocation in canonical order, or a certificate that none exists.
pub fn exhaustive_fair_allocation(instance: &Instance, q: &Rational) -> Result<FairSearch> {
    check_q(q)?;
    let tables = satisfaction_tables(instance)?;
    let (n, m) = (tables.n, tables.m);
    let total = total_weight(n, m);
    let need = rational::ceil_times(q, &total)
        .to_u64()
        .expect("need is at most n^m");
    let acc = Acceptance {
        n,
        m,
        ok: tables
            .sat
            .iter()
            .map(|s| s.iter().map(|&x| x >= need).collect())
            .collect(),
        up_closed: tables.monotone,
    };
    let scan = first_acceptable(&acc);
    if let Some(owners) = scan.witness {
        return Ok(FairSearch::Fair(Allocation::from_owners(&owners, n)));
    }
    let thresholds = instance
        .valuations()
        .iter()
        .map(|v| crate::quantile::quantile_share(v, n, q).map(Q))
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(BigUint::from(scan.covered), total);
    Ok(FairSearch::Infeasible(InfeasibilityCertificate {
        q: Q(q.clone()),
        thresholds,
        truncated: scan.classes_total as usize > scan.classes.len(),
        classes: scan.classes,
        classes_total: scan.classes_total,
        covered: scan.covered,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximinResult {
    pub allocation: Allocation,
    /// The largest q for which the instance admits a q-fair allocation.
    pub q_star: Rational,
}

struct MaxScan<'a> {
    t: &'a Tables,
    full: u64,
    sizes: Option<(usize, usize)>,
}

impl MaxScan<'_> {
    fn dfs(&self, depth: usize, bundles: &mut [u64], owners: &mut Vec<usize>, best: &mut Option<(u64, Vec<usize>)>) {
        let m = self.t.m;
        let remaining = self.full & !((1u64 << depth) - 1);
        if let Some((lo, hi)) = self.sizes {
            let left = (m - depth) as u32;
            if bundles.iter().any(|b| b.count_ones() as usize > hi || ((b.count_ones() + left) as usize) < lo) {
                return;
            }
        }
        if self.t.monotone {
            if let Some((b, _)) = best {
                let ub = (0..self.t.n)
                    .map(|i| self.t.sat[i][(bundles[i] | remaining) as usize])
                    .min()
                    .unwrap_or(u64::MAX);
                if ub <= *b {
                    return;
                }
            }
        }
        if depth == m {
            let value = (0..self.t.n)
                .map(|i| self.t.sat[i][bundles[i] as usize])
                .min()
                .unwrap_or(u64::MAX);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                *best = Some((value, owners.clone()));
            }
            return;
        }
        for a in 0..self.t.n {
            bundles[a] |= 1 << depth;
            owners.push(a);
            self.dfs(depth + 1, bundles, owners, best);
            owners.pop();
            bundles[a] &= !(1 << depth);
        }
    }
}

fn maximin_scan(t: &Tables, sizes: Option<(usize, usize)>) -> Option<(u64, Vec<usize>)> {
    let n = t.n;
    let scan = MaxScan { t, full: Bundle::full(t.m).mask(), sizes };
    let total = (n as u64).pow(t.m as u32);
    if total < PARALLEL_THRESHOLD {
        let mut best = None;
        scan.dfs(0, &mut vec![0; n], &mut Vec::new(), &mut best);
        return best;
    }
    let branches: Vec<Option<(u64, Vec<usize>)>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut bundles = vec![0u64; n];
            bundles[first] = 1;
            let mut best = None;
            scan.dfs(1, &mut bundles, &mut vec![first], &mut best);
            best
        })
        .collect();
    let mut best: Option<(u64, Vec<usize>)> = None;
    for b in branches.into_iter().flatten() {
        if best.as_ref().is_none_or(|(v, _)| b.0 > *v) {
            best = Some(b);
        }
    }
    best
}

/// The allocation maximizing the least satisfaction, first in canonical order.
pub fn maximin_satisfaction_allocation(instance: &Instance) -> Result<MaximinResult> {
    Ok(maximin_satisfaction_with_sizes(instance, None)?.expect("unconstrained scans always find an allocation"))
}

/// As [`maximin_satisfaction_allocation`], restricted to allocations whose
/// bundle sizes all lie in `sizes = (lo, hi)`.
pub fn maximin_satisfaction_with_sizes(
    instance: &Instance,
    sizes: Option<(usize, usize)>,
) -> Result<Option<MaximinResult>> {
    let t = satisfaction_tables(instance)?;
    Ok(maximin_scan(&t, sizes).map(|(value, owners)| MaximinResult {
        allocation: Allocation::from_owners(&owners, t.n),
        q_star: over_total(value, t.n, t.m),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::valuation::Valuation;

    fn prop3() -> Instance {
        let v = Valuation::additive(vec![int(1), int(1), int(0), int(0), int(0), int(0)]).unwrap();
        Instance::identical(v, 3).unwrap()
    }

    pub(crate) fn example1() -> Instance {
        let b = |l: &[usize]| Bundle::from_labels(l, 4).unwrap();
        let table = |pairs: [&[usize]; 2]| {
            let values = (0..16u64)
                .map(|mask| {
                    let s = Bundle::from_mask(mask);
                    int((s.len() >= 3 || pairs.iter().any(|p| b(p) == s)) as i64)
                })
                .collect();
            Valuation::table(4, values).unwrap()
        };
        Instance::new(4, vec![table([&[1, 2], &[3, 4]]), table([&[1, 3], &[2, 4]])]).unwrap()
    }

    #[test]
    fn prop3_threshold() {
        let inst = prop3();
        let r = maximin_satisfaction_allocation(&inst).unwrap();
        assert_eq!(r.q_star, ratio(4, 9));
        assert!(exhaustive_fair_allocation(&inst, &ratio(4, 9)).unwrap().is_fair());
        match exhaustive_fair_allocation(&inst, &ratio(325, 729)).unwrap() {
            FairSearch::Infeasible(c) => {
                assert_eq!(c.covered, 729);
                assert!(c.classes.iter().all(|k| k.agent >= 1 && k.agent <= 3));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn example1_is_infeasible_at_positive_shares() {
        let inst = example1();
        let share = |q: &Rational| crate::quantile::quantile_share(inst.valuation(0), 2, q).unwrap();
        // q where both agents' share is 1.
        let q = ratio(3, 4);
        assert_eq!(share(&q), int(1));
        assert!(!exhaustive_fair_allocation(&inst, &q).unwrap().is_fair());
    }

    #[test]
    fn trivial_cases() {
        let single = Instance::identical(Valuation::additive(vec![int(1)]).unwrap(), 2).unwrap();
        assert_eq!(maximin_satisfaction_allocation(&single).unwrap().q_star, ratio(1, 2));
        let solo = Instance::identical(Valuation::additive(vec![int(1), int(2)]).unwrap(), 1).unwrap();
        let r = exhaustive_fair_allocation(&solo, &int(1)).unwrap();
        assert_eq!(r.allocation().unwrap().bundle(0), Bundle::full(2));
        let constant = Instance::identical(Valuation::constant(3, int(2)).unwrap(), 2).unwrap();
        assert_eq!(maximin_satisfaction_allocation(&constant).unwrap().q_star, int(1));
    }

    #[test]
    fn budget_refusal() {
        let inst = Instance::identical(Valuation::additive(vec![int(1); 24]).unwrap(), 3).unwrap();
        let err = exhaustive_fair_allocation(&inst, &ratio(1, 2)).unwrap_err();
        assert!(err.is_budget_refusal());
    }

    #[test]
    fn size_constrained_scan() {
        let inst = prop3();
        let r = maximin_satisfaction_with_sizes(&inst, Some((2, 2))).unwrap().unwrap();
        assert!(r.allocation.bundles().iter().all(|b| b.len() == 2));
        assert!(maximin_satisfaction_with_sizes(&inst, Some((3, 3))).unwrap().is_none());
    }
}
