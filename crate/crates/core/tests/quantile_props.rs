mod common;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;
use qshare_core::bundle::{all_bundles, Bundle};
use qshare_core::quantile::{
    exact_distribution, is_q_fair, quantile_share, sample_satisfaction, satisfaction, total_weight,
};
use qshare_core::rational::{int, to_f64};
use qshare_core::{Rational, Valuation};

fn grid(n: usize, m: usize) -> impl Iterator<Item = Rational> {
    let total = BigInt::from(total_weight(n, m));
    (1..=n.pow(m as u32)).map(move |k| Rational::new(k.into(), total.clone()))
}

/// Counts allocations giving the agent (agent 0) a bundle worth at most `v(bundle)`.
fn direct_count(v: &Valuation, n: usize, bundle: Bundle) -> u64 {
    let m = v.goods();
    let mine = v.evaluate(bundle).unwrap();
    let mut hits = 0;
    for a in 0..n.pow(m as u32) {
        let mut rest = a;
        let mut mask = 0u64;
        for g in 0..m {
            if rest % n == 0 {
                mask |= 1 << g;
            }
            rest /= n;
        }
        if v.evaluate(Bundle::from_mask(mask)).unwrap() <= mine {
            hits += 1;
        }
    }
    hits
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn weights_sum_to_total(v in (1..=12usize).prop_flat_map(common::any_valuation), n in 1..=5usize) {
        let d = exact_distribution(&v, n).unwrap();
        let sum: BigUint = d.atoms.iter().map(|(_, w)| w.clone()).sum();
        prop_assert_eq!(sum, total_weight(n, v.goods()));
    }

    #[test]
    fn fair_iff_satisfied(v in (1..=5usize).prop_flat_map(common::any_valuation), n in 2..=3usize) {
        let m = v.goods();
        for b in all_bundles(m) {
            let s = satisfaction(&v, n, b).unwrap();
            for q in grid(n, m) {
                prop_assert_eq!(is_q_fair(&v, n, &q, b).unwrap(), s >= q);
            }
        }
    }

    #[test]
    fn satisfaction_matches_direct_count(v in (1..=7usize).prop_flat_map(common::any_valuation), n in 2..=3usize) {
        let m = v.goods();
        let total = BigInt::from(total_weight(n, m));
        for b in all_bundles(m).step_by(3) {
            let s = satisfaction(&v, n, b).unwrap();
            prop_assert_eq!(s * Rational::from_integer(total.clone()), int(direct_count(&v, n, b) as i64));
        }
    }

    #[test]
    fn verdicts_are_ordinal(values in (1..=5usize).prop_flat_map(common::monotone_values), n in 2..=3usize, scale in 1i64..5, shift in -3i64..3) {
        let m = values.len().trailing_zeros() as usize;
        let v = Valuation::table(m, values.iter().map(|&x| int(x)).collect()).unwrap();
        // strictly increasing: x ↦ scale·x³ + shift
        let w = Valuation::table(m, values.iter().map(|&x| int(scale * x * x * x + shift)).collect()).unwrap();
        for b in all_bundles(m) {
            for q in grid(n, m) {
                prop_assert_eq!(is_q_fair(&v, n, &q, b).unwrap(), is_q_fair(&w, n, &q, b).unwrap());
            }
        }
    }

    #[test]
    fn share_is_monotone_in_q(v in (1..=8usize).prop_flat_map(common::any_valuation), n in 2..=4usize) {
        let m = v.goods();
        let mut prev: Option<Rational> = None;
        for q in grid(n, m).step_by((n.pow(m as u32) / 64).max(1)) {
            let t = quantile_share(&v, n, &q).unwrap();
            if let Some(p) = &prev {
                prop_assert!(*p <= t);
            }
            prev = Some(t);
        }
    }
}

#[test]
fn hoeffding_interval_covers_exact_value() {
    let v = Valuation::additive([3, 1, 4, 1, 5, 9, 2, 6].map(int).to_vec()).unwrap();
    let n = 3;
    let bundle = Bundle::from_goods([0, 2, 5]);
    let exact = to_f64(&satisfaction(&v, n, bundle).unwrap());
    let runs = 400;
    let mut missed = 0;
    for seed in 0..runs {
        let e = sample_satisfaction(&v, n, bundle, 500, 0.01, seed).unwrap();
        if (e.estimate - exact).abs() > e.half_width {
            missed += 1;
        }
    }
    assert!(missed * 100 <= runs, "{missed} of {runs} intervals missed");
}

#[test]
fn q_zero_is_rejected() {
    let v = Valuation::additive(vec![int(1)]).unwrap();
    assert!(quantile_share(&v, 2, &Rational::zero()).is_err());
}
