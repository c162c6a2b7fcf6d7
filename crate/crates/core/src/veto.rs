//! Veto lists: each agent vetoes the allocations in which her own bundle
//! lies in a downward-closed family.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::allocate::{check_allocation_budget, exhaustive_fair_allocation, first_acceptable, Acceptance};
use crate::bundle::{all_bundles, canonicalize, Allocation, Bundle};
use crate::downset;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::quantile::{bundle_weight, exact_distribution, total_weight};
use crate::rational::{Rational, Q};
use crate::valuation::{minimal_members, Valuation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VetoList {
    /// 0-based agent index.
    pub owner: usize,
    pub n: usize,
    pub m: usize,
    /// Vetoed bundles, canonical order.
    pub family: Vec<Bundle>,
}

impl VetoList {
    pub fn new(owner: usize, n: usize, m: usize, mut family: Vec<Bundle>) -> Result<Self> {
        for b in &family {
            b.check_fits(m)?;
        }
        canonicalize(&mut family);
        Ok(VetoList { owner, n, m, family })
    }

    /// Number of the `n^m` allocations this list vetoes.
    pub fn size(&self) -> BigUint {
        self.family
            .iter()
            .map(|b| bundle_weight(self.n, self.m, b.len()))
            .sum()
    }

    pub fn vetoes(&self, bundle: Bundle) -> bool {
        self.family.binary_search_by(|b| b.canonical_cmp(&bundle)).is_ok()
    }

    fn mask_table(&self) -> Vec<bool> {
        let mut t = vec![false; 1 << self.m];
        for b in &self.family {
            t[b.mask() as usize] = true;
        }
        t
    }
}

/// Bundles worth strictly less than the q-quantile share.
pub fn veto_from_valuation(valuation: &Valuation, n: usize, q: &Rational, owner: usize) -> Result<VetoList> {
    let dist = exact_distribution(valuation, n)?;
    let share = dist.quantile(q)?;
    let m = valuation.goods();
    let family = all_bundles(m).filter(|&b| valuation.value_of(b) < share).collect();
    VetoList::new(owner, n, m, family)
}

pub fn is_monotonicity_consistent(list: &VetoList) -> bool {
    inconsistency(list).is_none()
}

fn inconsistency(list: &VetoList) -> Option<(Bundle, Bundle)> {
    let table = list.mask_table();
    for b in &list.family {
        for g in b.goods() {
            let sub = b.without(g);
            if !table[sub.mask() as usize] {
                return Some((sub, *b));
            }
        }
    }
    None
}

/// The monotone 0/1 valuation that is 0 exactly on the family.
pub fn valuation_from_veto(list: &VetoList) -> Result<Valuation> {
    if let Some((sub, b)) = inconsistency(list) {
        return Err(Error::InconsistentVetoList(format!("{b} is vetoed but its subset {sub} is not")));
    }
    let table = list.mask_table();
    let ones = all_bundles(list.m).filter(|b| !table[b.mask() as usize]).collect();
    Valuation::explicit01(list.m, minimal_members(ones))
}

/// First allocation in canonical order that no agent vetoes.
pub fn find_unvetoed_allocation(lists: &[VetoList]) -> Result<Option<Allocation>> {
    let n = lists.len();
    let Some(first) = lists.first() else {
        return Err(Error::InvalidInstance("no veto lists".into()));
    };
    let m = first.m;
    for (i, l) in lists.iter().enumerate() {
        if l.m != m || l.n != n {
            return Err(Error::InvalidInstance(format!(
                "list {} is over (n, m) = ({}, {}), expected ({n}, {m})",
                i + 1,
                l.n,
                l.m
            )));
        }
    }
    check_allocation_budget(n, m)?;
    let acc = Acceptance {
        n,
        m,
        ok: lists.iter().map(|l| l.mask_table().into_iter().map(|v| !v).collect()).collect(),
        up_closed: lists.iter().all(is_monotonicity_consistent),
    };
    Ok(first_acceptable(&acc).witness.map(|owners| Allocation::from_owners(&owners, n)))
}

/// Serialized form: one list of good lists per agent.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VetoListsDoc {
    pub n: usize,
    pub m: usize,
    pub lists: Vec<Vec<Vec<usize>>>,
}

impl VetoListsDoc {
    pub fn from_lists(lists: &[VetoList]) -> Self {
        VetoListsDoc {
            n: lists.first().map_or(0, |l| l.n),
            m: lists.first().map_or(0, |l| l.m),
            lists: lists.iter().map(|l| l.family.iter().map(|b| b.labels()).collect()).collect(),
        }
    }

    pub fn into_lists(self) -> Result<Vec<VetoList>> {
        if self.lists.len() != self.n {
            return Err(Error::InvalidInstance(format!(
                "n = {} but {} lists given",
                self.n,
                self.lists.len()
            )));
        }
        self.lists
            .iter()
            .enumerate()
            .map(|(owner, fam)| {
                let family = fam
                    .iter()
                    .map(|l| Bundle::from_labels(l, self.m))
                    .collect::<Result<Vec<_>>>()?;
                VetoList::new(owner, self.n, self.m, family)
            })
            .collect()
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EquivalenceReport {
    pub n: usize,
    pub m: usize,
    pub profiles: u64,
    pub checks: u64,
    pub feasible: u64,
    pub infeasible: u64,
    pub failures: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, msg: String) {
        if self.failures.len() < 20 {
            self.failures.push(msg);
        }
    }
}

/// Quantile levels at which some 0/1 agent's share changes: `P0` and
/// `P0 + 1/n^m` for every agent, where `P0` is her zero probability.
pub fn breakpoint_levels(instance: &Instance) -> Result<Vec<Rational>> {
    let n = instance.agents();
    let total = total_weight(n, instance.goods());
    let mut out = Vec::new();
    for v in instance.valuations() {
        let zeros = exact_distribution(v, n)?.weight_at_most(&Rational::zero());
        for w in [zeros.clone(), zeros + 1u32] {
            if !w.is_zero() && w <= total {
                out.push(Rational::new(w.into(), total.clone().into()));
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Checks both directions of the veto-list equivalence on one profile at
/// one level `q`, recording any disagreement in `report`.
pub fn check_equivalence_at(instance: &Instance, q: &Rational, report: &mut EquivalenceReport) -> Result<()> {
    let n = instance.agents();
    let m = instance.goods();
    let total = total_weight(n, m);
    report.checks += 1;
    let tag = || format!("profile {:?} at q = {q}", instance.to_json().replace(char::is_whitespace, ""));

    // Quantile infeasibility ⟺ the induced lists cover every allocation.
    let feasible = exhaustive_fair_allocation(instance, q)?.is_fair();
    if feasible {
        report.feasible += 1;
    } else {
        report.infeasible += 1;
    }
    let lists = instance
        .valuations()
        .iter()
        .enumerate()
        .map(|(i, v)| veto_from_valuation(v, n, q, i))
        .collect::<Result<Vec<_>>>()?;
    let bound = crate::rational::ceil_times(q, &total) - 1u32;
    for l in &lists {
        if !is_monotonicity_consistent(l) {
            report.fail(format!("{}: list of agent {} is not down-closed", tag(), l.owner + 1));
        }
        if l.size() > bound {
            report.fail(format!("{}: list of agent {} has size {} > {bound}", tag(), l.owner + 1, l.size()));
        }
    }
    let unvetoed = find_unvetoed_allocation(&lists)?.is_some();
    if unvetoed != feasible {
        report.fail(format!("{}: feasible = {feasible} but unvetoed = {unvetoed}", tag()));
    }

    // Lists back to valuations: same verdict, and the lists are recovered.
    let back = lists.iter().map(valuation_from_veto).collect::<Result<Vec<_>>>()?;
    let rebuilt = Instance::new(m, back)?;
    for (i, (u, l)) in rebuilt.valuations().iter().zip(&lists).enumerate() {
        let size = l.size();
        if size < total {
            let level = Rational::new((size + 1u32).into(), total.clone().into());
            let again = veto_from_valuation(u, n, &level, i)?;
            if again.family != l.family {
                report.fail(format!("{}: round trip changed the list of agent {}", tag(), i + 1));
            }
        }
    }
    let rebuilt_feasible = exhaustive_fair_allocation(&rebuilt, q)?.is_fair();
    if rebuilt_feasible != unvetoed {
        report.fail(format!(
            "{}: rebuilt valuations give feasible = {rebuilt_feasible}, lists give {unvetoed}",
            tag()
        ));
    }
    Ok(())
}

/// Runs [`check_equivalence_at`] on random monotone 0/1 profiles at every
/// breakpoint level.
pub fn equivalence_suite(n: usize, m: usize, trials: u64, seed: u64) -> Result<EquivalenceReport> {
    if n > 3 || m > 6 || n == 0 || m == 0 {
        return Err(Error::Precondition(format!(
            "the equivalence suite runs at 1 ≤ n ≤ 3 and 1 ≤ m ≤ 6, got n = {n}, m = {m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = EquivalenceReport { n, m, ..Default::default() };
    for _ in 0..trials {
        let profile = (0..n)
            .map(|_| downset::to_valuation(m, downset::random_down_set(m, &mut rng)))
            .collect::<Result<Vec<_>>>()?;
        let instance = Instance::new(m, profile)?;
        report.profiles += 1;
        for q in breakpoint_levels(&instance)? {
            check_equivalence_at(&instance, &q, &mut report)?;
        }
    }
    Ok(report)
}

/// Largest list size covered by the union bound: `n^(m-1) - 1`.
pub fn union_bound_size(n: usize, m: usize) -> BigUint {
    total_weight(n, m - 1) - 1u32
}

/// Serializable summary of one list.
#[derive(Clone, Debug, Serialize)]
pub struct VetoSummary {
    pub agent: usize,
    pub size: String,
    pub fraction: Q,
    pub family: Vec<Vec<usize>>,
}

impl From<&VetoList> for VetoSummary {
    fn from(l: &VetoList) -> Self {
        let size = l.size();
        let total = total_weight(l.n, l.m);
        VetoSummary {
            agent: l.owner + 1,
            fraction: Q(Rational::new(size.clone().into(), total.into())),
            size: size.to_u128().map_or_else(|| size.to_string(), |s| s.to_string()),
            family: l.family.iter().map(|b| b.labels()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn prop3() -> Valuation {
        Valuation::additive(vec![int(1), int(1), int(0), int(0), int(0), int(0)]).unwrap()
    }

    #[test]
    fn lists_from_valuations() {
        let single = Valuation::additive(vec![int(1)]).unwrap();
        assert!(veto_from_valuation(&single, 2, &ratio(1, 2), 0).unwrap().family.is_empty());
        let l = veto_from_valuation(&prop3(), 3, &ratio(325, 729), 0).unwrap();
        assert_eq!(l.size(), BigUint::from(324u32));
        assert!(l.family.iter().all(|b| !b.contains(0) && !b.contains(1)));
        assert_eq!(l.family.len(), 16);
        assert!(is_monotonicity_consistent(&l));
        let c = Valuation::constant(3, int(1)).unwrap();
        assert!(veto_from_valuation(&c, 2, &int(1), 0).unwrap().family.is_empty());
    }

    #[test]
    fn consistency_and_inversion() {
        let ok = VetoList::new(0, 2, 1, vec![Bundle::EMPTY, Bundle::singleton(0)]).unwrap();
        assert!(is_monotonicity_consistent(&ok));
        let bad = VetoList::new(0, 2, 1, vec![Bundle::singleton(0)]).unwrap();
        assert!(!is_monotonicity_consistent(&bad));
        assert!(valuation_from_veto(&bad).is_err());

        let empty = VetoList::new(0, 2, 2, vec![]).unwrap();
        assert_eq!(valuation_from_veto(&empty).unwrap(), Valuation::explicit01(2, vec![Bundle::EMPTY]).unwrap());
        let all = VetoList::new(0, 2, 2, all_bundles(2).collect()).unwrap();
        assert_eq!(valuation_from_veto(&all).unwrap(), Valuation::explicit01(2, vec![]).unwrap());

        let l = veto_from_valuation(&prop3(), 3, &ratio(325, 729), 0).unwrap();
        let u = valuation_from_veto(&l).unwrap();
        assert_eq!(u, Valuation::explicit01(6, vec![Bundle::singleton(0), Bundle::singleton(1)]).unwrap());
    }

    #[test]
    fn unvetoed_search() {
        let empty = |i| VetoList::new(i, 2, 2, vec![]).unwrap();
        let a = find_unvetoed_allocation(&[empty(0), empty(1)]).unwrap().unwrap();
        assert_eq!(a.labels(), vec![vec![1, 2], vec![]]);
        let zero = |i| VetoList::new(i, 2, 1, vec![Bundle::EMPTY]).unwrap();
        assert!(find_unvetoed_allocation(&[zero(0), zero(1)]).unwrap().is_none());
    }

    #[test]
    fn prop3_cover() {
        let inst = Instance::identical(prop3(), 3).unwrap();
        let mut report = EquivalenceReport::default();
        check_equivalence_at(&inst, &ratio(325, 729), &mut report).unwrap();
        check_equivalence_at(&inst, &ratio(4, 9), &mut report).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert_eq!((report.feasible, report.infeasible), (1, 1));
    }

    #[test]
    fn small_suite() {
        let r = equivalence_suite(2, 1, 10, 0).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let r = equivalence_suite(3, 3, 30, 1).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn lists_round_trip_through_json() {
        let l = veto_from_valuation(&prop3(), 3, &ratio(325, 729), 0).unwrap();
        let doc = VetoListsDoc::from_lists(&[l.clone(), l.clone(), l.clone()]);
        let text = serde_json::to_string(&doc).unwrap();
        let back: VetoListsDoc = serde_json::from_str(&text).unwrap();
        let lists = back.into_lists().unwrap();
        assert_eq!(lists[0].family, l.family);
        assert!(find_unvetoed_allocation(&lists).unwrap().is_none());
    }
}
