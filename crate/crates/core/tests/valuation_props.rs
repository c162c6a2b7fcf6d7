mod common;

use proptest::prelude::*;
use qshare_core::bundle::{all_bundles, subsets_of, Bundle};
use qshare_core::Valuation;

fn brute_rank(m: &qshare_core::Matroid, set: Bundle) -> usize {
    subsets_of(set)
        .filter(|&s| m.is_independent(s).unwrap())
        .map(Bundle::len)
        .max()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evaluate_is_monotone(v in (1..=12usize).prop_flat_map(common::any_valuation)) {
        let m = v.goods();
        for s in all_bundles(m) {
            let value = v.evaluate(s).unwrap();
            for g in s.goods() {
                prop_assert!(v.evaluate(s.without(g)).unwrap() <= value);
            }
        }
    }

    #[test]
    fn matroid_rank_has_unit_increments(mat in (1..=10usize).prop_flat_map(common::matroid)) {
        let m = mat.ground_size();
        prop_assert_eq!(mat.rank(Bundle::EMPTY).unwrap(), 0);
        for s in all_bundles(m) {
            let r = mat.rank(s).unwrap();
            for j in 0..m {
                let gain = mat.rank(s.with(j)).unwrap() - r;
                prop_assert!(gain <= 1);
            }
        }
        prop_assert!(mat.axiom_violations().is_empty());
    }

    #[test]
    fn matroid_rank_matches_brute_force(mat in (1..=9usize).prop_flat_map(common::matroid)) {
        let v = Valuation::matroid_rank(mat.clone());
        for s in all_bundles(mat.ground_size()) {
            prop_assert_eq!(v.evaluate(s).unwrap(), qshare_core::rational::int(brute_rank(&mat, s) as i64));
        }
    }
}
