//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//!
//! `cargo test -p qshare-core --test acceptance`

use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qshare_core::repro::{run_criterion, CRITERIA};

/// Independent brute force: satisfaction of `value(bundle)` against every
/// one of the `n^m` allocations.
fn naive_satisfaction(value: impl Fn(u64) -> i64, n: usize, m: usize, bundle: u64) -> BigRational {
    let mine = value(bundle);
    let total = n.pow(m as u32);
    let mut hits = 0u64;
    for a in 0..total {
        let mut rest = a;
        let mut mask = 0u64;
        for good in 0..m {
            if rest % n == 0 {
                mask |= 1 << good;
            }
            rest /= n;
        }
        if value(mask) <= mine {
            hits += 1;
        }
    }
    BigRational::new(hits.into(), (total as u64).into())
}

/// Best least satisfaction over all allocations, by brute force.
fn naive_critical(values: &[&dyn Fn(u64) -> i64], m: usize) -> BigRational {
    let n = values.len();
    let mut best = BigRational::zero();
    for a in 0..n.pow(m as u32) {
        let mut bundles = vec![0u64; n];
        let mut rest = a;
        for good in 0..m {
            bundles[rest % n] |= 1 << good;
            rest /= n;
        }
        let least = (0..n)
            .map(|i| naive_satisfaction(values[i], n, m, bundles[i]))
            .min()
            .expect("n ≥ 1");
        best = best.max(least);
    }
    best
}

fn binom(n: u64, k: u64) -> BigUint {
    (0..k).fold(BigUint::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn oracles_agree_with_stated_values() {
    // identical two-good instance over six goods
    let prop3 = |s: u64| (s & 0b11 != 0) as i64;
    assert_eq!(naive_critical(&[&prop3, &prop3, &prop3], 6), BigRational::new(4.into(), 9.into()));
    // single chore
    for n in 1..=6 {
        let chore = |s: u64| -((s & 1) as i64);
        let agents: Vec<&dyn Fn(u64) -> i64> = vec![&chore; n];
        assert_eq!(naive_critical(&agents, 1), BigRational::new(1.into(), (n as i64).into()));
    }
    // two-agent example with positive maximin shares
    let t1 = |s: u64| (s.count_ones() >= 3 || s == 0b0011 || s == 0b1100) as i64;
    let t2 = |s: u64| (s.count_ones() >= 3 || s == 0b0101 || s == 0b1010) as i64;
    assert!((0..16u64).all(|s| t1(s) == 0 || t2(15 ^ s) == 0));
    // LP closed forms
    for (n, m, counts) in [(3u64, 6u32, (192, 576, 3, 729)), (2, 1, (4, 2, 2, 2))] {
        let mono = n * (m as u64) * (1 << (m - 1));
        assert_eq!((n << m, mono, n, n.pow(m)), counts);
    }
    // threshold budgets
    for (n, m, b) in [(3u32, 6u32, 323u64), (3, 4, 35), (4, 8, 27647)] {
        assert_eq!(
            (n as u64).pow(m - n + 1) * ((n - 1) as u64).pow(n - 1) - 1,
            b
        );
    }
    // binomial inequality at k = 1: both sides equal 1
    for n in 2..=20u64 {
        let m = 2 * n;
        assert_eq!(binom(m, 1) - binom(m - n + 1, 1), binom(n - 1, 1));
    }
}

fn main() {
    oracles_agree_with_stated_values();
    println!("independent oracles agree with the stated values");
    let seed = 0;
    let mut failed = Vec::new();
    for k in 1..=CRITERIA {
        let start = Instant::now();
        let report = run_criterion(k, seed).expect("criterion runs");
        println!("{report}");
        println!("    ({:.1}s)", start.elapsed().as_secs_f64());
        if !report.passed {
            failed.push(k);
        }
    }
    println!("{} of {CRITERIA} criteria passed", CRITERIA - failed.len());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
