use num_bigint::BigUint;
use proptest::prelude::*;
use qshare_core::bundle::Bundle;
use qshare_core::downset;
use qshare_core::extremal::{
    binomial, emc_extremal_families, k_subsets, matching_number, rainbow_matching, shadow, theorem_chain_check,
    SetFamily,
};

fn naive_nu(sets: &[Bundle], used: Bundle) -> usize {
    match sets.split_first() {
        None => 0,
        Some((first, rest)) => {
            let skip = naive_nu(rest, used);
            if first.is_disjoint(used) {
                skip.max(1 + naive_nu(rest, used.union(*first)))
            } else {
                skip
            }
        }
    }
}

fn family(max_sets: usize) -> impl Strategy<Value = SetFamily> {
    (2..=9usize)
        .prop_flat_map(|m| (Just(m), 1..=m.min(4)))
        .prop_flat_map(move |(m, k)| {
            let layer: Vec<Bundle> = k_subsets(m, k).collect();
            let len = layer.len();
            (Just(m), Just(k), prop::sample::subsequence(layer, 0..=len.min(max_sets)))
        })
        .prop_map(|(m, k, sets)| SetFamily::new(m, k, sets).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matching_number_matches_naive(f in family(12)) {
        prop_assert_eq!(matching_number(&f).unwrap().size, naive_nu(f.sets(), Bundle::EMPTY));
    }

    #[test]
    fn shadow_is_monotone(f in family(40), keep in prop::collection::vec(any::<bool>(), 40), k_prime in 0..=4usize) {
        let k_prime = k_prime.min(f.uniformity());
        let sub: Vec<Bundle> = f.sets().iter().zip(keep.iter().cycle()).filter(|(_, &b)| b).map(|(s, _)| *s).collect();
        let a = SetFamily::new(f.universe(), f.uniformity(), sub).unwrap();
        let (sa, sb) = (shadow(&a, k_prime).unwrap(), shadow(&f, k_prime).unwrap());
        prop_assert!(sa.sets().iter().all(|&s| sb.contains(s)));
    }

    #[test]
    fn single_set_shadow_is_binomial(m in 1..=10usize, k_raw in 0..=10usize, k_prime_raw in 0..=10usize) {
        let k = k_raw.min(m);
        let k_prime = k_prime_raw.min(k);
        let f = SetFamily::new(m, k, vec![Bundle::full(k)]).unwrap();
        prop_assert_eq!(BigUint::from(shadow(&f, k_prime).unwrap().len()), binomial(k, k_prime));
    }

    #[test]
    fn identical_rainbow_is_matching(f in family(14), n in 1..=3usize) {
        let rainbow = rainbow_matching(&vec![f.clone(); n]).unwrap().is_some();
        prop_assert_eq!(rainbow, matching_number(&f).unwrap().size >= n);
    }
}

#[test]
fn extremal_families_have_matching_number_n_minus_one() {
    for n in 2..=4 {
        for k in 1..=3 {
            for m in k * n..=k * n + 3 {
                let (cover, clique) = emc_extremal_families(m, k, n).unwrap();
                assert_eq!(matching_number(&cover).unwrap().size, n - 1);
                assert_eq!(matching_number(&clique).unwrap().size, (k * n - 1) / k);
            }
        }
    }
}

/// The chain at n = 3, m = 6 reads only the empty set and singletons, so the
/// 65 patterns there cover every valuation; orbit representatives are swept too.
#[test]
fn no_emc_violation_at_three_agents_six_goods() {
    let m = 6;
    let mut patterns = vec![0u64];
    for singles in 0..1u64 << m {
        let fam = (0..m).filter(|&j| singles >> j & 1 == 1).fold(1u64, |acc, j| acc | 1 << (1u64 << j));
        patterns.push(fam);
    }
    downset::for_each_canonical_down_set(m, |f| patterns.push(f)).unwrap();
    for fam in patterns {
        let v = downset::to_valuation(m, fam).unwrap();
        let r = theorem_chain_check(&v, 3).unwrap();
        assert!(!r.emc_violation && r.ok, "zero family {fam:#x}: {r:?}");
    }
}
