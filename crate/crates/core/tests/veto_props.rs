mod common;

use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use qshare_core::allocate::exhaustive_fair_allocation;
use qshare_core::downset;
use qshare_core::quantile::total_weight;
use qshare_core::veto::{find_unvetoed_allocation, valuation_from_veto, veto_from_valuation, VetoList};
use qshare_core::{Instance, Rational, Valuation};

fn lists(inst: &Instance, q: &Rational) -> Vec<VetoList> {
    (0..inst.agents())
        .map(|i| veto_from_valuation(inst.valuation(i), inst.agents(), q, i).unwrap())
        .collect()
}

fn brute_vetoed(list: &VetoList) -> u64 {
    let (n, m) = (list.n, list.m);
    (0..n.pow(m as u32))
        .filter(|&a| {
            let mut rest = a;
            let mut mask = 0u64;
            for g in 0..m {
                if rest % n == list.owner {
                    mask |= 1 << g;
                }
                rest /= n;
            }
            list.vetoes(qshare_core::Bundle::from_mask(mask))
        })
        .count() as u64
}

fn profile(n: usize, m: usize) -> impl Strategy<Value = Vec<Valuation>> {
    prop::collection::vec(common::explicit01(m), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fair_iff_unvetoed(vals in (1..=6usize, 2..=3usize).prop_flat_map(|(m, n)| profile(n, m))) {
        let n = vals.len();
        let m = vals[0].goods();
        let inst = Instance::new(m, vals).unwrap();
        let total = BigInt::from(total_weight(n, m));
        let step = (n.pow(m as u32) / 40).max(1);
        for k in (1..=n.pow(m as u32)).step_by(step) {
            let q = Rational::new(k.into(), total.clone());
            let fair = exhaustive_fair_allocation(&inst, &q).unwrap().is_fair();
            prop_assert_eq!(fair, find_unvetoed_allocation(&lists(&inst, &q)).unwrap().is_some());
        }
    }

    #[test]
    fn list_size_counts_vetoed_allocations(v in (1..=8usize).prop_flat_map(common::table), n in 2..=3usize, k in 1..100u32) {
        let m = v.goods();
        let q = Rational::new(k.into(), 100.into());
        for owner in 0..n {
            let list = veto_from_valuation(&v, n, &q, owner).unwrap();
            prop_assert_eq!(list.size(), BigUint::from(brute_vetoed(&list)));
        }
        let _ = m;
    }

    #[test]
    fn round_trip_through_valuations(f in (1..=6usize).prop_flat_map(|m| (Just(m), common::down_set(m)))) {
        let (m, fam) = f;
        let list = VetoList::new(0, 2, m, downset::bundles(fam)).unwrap();
        let v = valuation_from_veto(&list).unwrap();
        let zeros: Vec<_> = qshare_core::bundle::all_bundles(m).filter(|&b| v.evaluate(b).unwrap() == Rational::from_integer(0.into())).collect();
        prop_assert_eq!(VetoList::new(0, 2, m, zeros).unwrap(), list);
    }
}

/// Lists each vetoing fewer than n^(m-1) allocations always leave one free.
fn union_bound_holds(n: usize, m: usize, families: &[u64]) {
    let limit = BigUint::from(n).pow(m as u32 - 1);
    let small: Vec<u64> = families
        .iter()
        .copied()
        .filter(|&f| BigUint::from(downset::weight(m, n, f)) < limit)
        .collect();
    let mut idx = vec![0usize; n];
    loop {
        let lists: Vec<VetoList> = (0..n)
            .map(|i| VetoList::new(i, n, m, downset::bundles(small[idx[i]])).unwrap())
            .collect();
        assert!(find_unvetoed_allocation(&lists).unwrap().is_some(), "n = {n}, m = {m}, {idx:?}");
        let Some(pos) = (0..n).find(|&i| idx[i] + 1 < small.len()) else { break };
        idx[pos] += 1;
        idx[..pos].fill(0);
    }
}

#[test]
fn union_bound_exhaustive() {
    for (n, m) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 3)] {
        let mut fams = Vec::new();
        downset::for_each_down_set(m, n, None, |f| fams.push(f)).unwrap();
        union_bound_holds(n, m, &fams);
    }
}

/// Drops top-layer members until the list vetoes fewer than `n^(m-1)` allocations.
fn shrink_below_limit(m: usize, n: usize, mut fam: u64) -> u64 {
    let limit = (n as u128).pow(m as u32 - 1);
    while downset::weight(m, n, fam) >= limit {
        let top = downset::bundles(fam).into_iter().max_by_key(|b| (b.len(), b.mask())).expect("nonempty");
        fam &= !(1 << top.mask());
    }
    fam
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn union_bound_on_random_lists(
        case in (1..=6usize, 2..=3usize).prop_flat_map(|(m, n)| (Just(m), prop::collection::vec(common::down_set(m), n)))
    ) {
        let (m, fams) = case;
        let n = fams.len();
        let lists: Vec<VetoList> = fams
            .iter()
            .enumerate()
            .map(|(i, &f)| VetoList::new(i, n, m, downset::bundles(shrink_below_limit(m, n, f))).unwrap())
            .collect();
        prop_assert!(find_unvetoed_allocation(&lists).unwrap().is_some());
    }
}
