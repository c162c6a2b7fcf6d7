//! Exact lower-tail probabilities of weighted Bernoulli sums.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantile::exact_cap;
use crate::rational::{ratio, Rational, Q};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeviationCheck {
    pub prob: Q,
    pub bound: Q,
    pub ok: bool,
}

/// Exact `P[Σ w_j b_j <= p Σ w_j]` for independent `b_j ~ Bernoulli(p)`,
/// compared against `(14/100)(1 - p)`.
pub fn bernoulli_deviation_check(weights: &[Rational], p: &Rational) -> Result<DeviationCheck> {
    if *p <= Rational::zero() || *p >= Rational::one() {
        return Err(Error::Precondition(format!("p must lie in (0, 1), got {p}")));
    }
    let m = weights.len();
    let cap = exact_cap();
    if m > cap {
        return Err(Error::ExactCapExceeded { m, cap });
    }
    if weights.iter().any(|w| w.is_negative()) {
        return Err(Error::Precondition("weights must be non-negative".into()));
    }
    let prob = lower_tail(weights, p)?;
    let bound = ratio(14, 100) * (Rational::one() - p);
    Ok(DeviationCheck { ok: prob >= bound, prob: Q(prob), bound: Q(bound) })
}

/// The `p = 1/n` case: the chance that a random bundle is worth at most the
/// proportional share.
pub fn proportional_quantile_check(weights: &[Rational], n: usize) -> Result<DeviationCheck> {
    if n < 2 {
        return Err(Error::Precondition("n must be at least 2".into()));
    }
    bernoulli_deviation_check(weights, &ratio(1, n as i64))
}

fn lower_tail(weights: &[Rational], p: &Rational) -> Result<Rational> {
    let m = weights.len();
    let scale = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let ints = weights
        .iter()
        .map(|w| {
            (w.numer() * (&scale / w.denom()))
                .to_u128()
                .ok_or(Error::Overflow("scaling weights"))
        })
        .collect::<Result<Vec<u128>>>()?;
    let total = ints
        .iter()
        .try_fold(0u128, |a, &b| a.checked_add(b))
        .ok_or(Error::Overflow("summing weights"))?;
    // Σ w b <= (a/d) Σ w  ⟺  Σ w b <= floor(a Σ w / d) over integers.
    let (a, d) = (p.numer(), p.denom());
    let threshold = (BigInt::from(total) * a).div_floor(d);
    let threshold = threshold.to_u128().ok_or(Error::Overflow("scaling the threshold"))?;

    let (left, right) = ints.split_at(m / 2);
    let left = sums_by_count(left);
    let right = sums_by_count(right);
    // counts[k] = number of outcomes with k successes below the threshold.
    let mut counts = vec![0u64; m + 1];
    for (kl, ls) in left.iter().enumerate() {
        for (kr, rs) in right.iter().enumerate() {
            // ls ascending, rs ascending: two pointers.
            let mut j = rs.len();
            let mut c = 0u64;
            for &x in ls {
                if x > threshold {
                    break;
                }
                while j > 0 && rs[j - 1] > threshold - x {
                    j -= 1;
                }
                c += j as u64;
            }
            counts[kl + kr] += c;
        }
    }
    let a = a.to_biguint().expect("p positive");
    let d = d.to_biguint().expect("p positive");
    let fail = &d - &a;
    let mut num = BigUint::zero();
    for (k, &c) in counts.iter().enumerate() {
        if c > 0 {
            num += BigUint::from(c) * a.pow(k as u32) * fail.pow((m - k) as u32);
        }
    }
    Ok(Rational::new(BigInt::from(num), BigInt::from(d.pow(m as u32))))
}

/// Subset sums grouped by subset size, each group sorted.
fn sums_by_count(ints: &[u128]) -> Vec<Vec<u128>> {
    let h = ints.len();
    let mut groups = vec![Vec::new(); h + 1];
    let mut sums = vec![0u128; 1 << h];
    for mask in 1usize..1 << h {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + ints[low];
    }
    for (mask, &s) in sums.iter().enumerate() {
        groups[mask.count_ones() as usize].push(s);
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn brute(weights: &[Rational], p: &Rational) -> Rational {
        let m = weights.len();
        let total: Rational = weights.iter().sum();
        let mut prob = Rational::zero();
        for mask in 0u32..1 << m {
            let s: Rational = (0..m).filter(|j| mask >> j & 1 == 1).map(|j| &weights[j]).sum();
            if s <= p * &total {
                let k = mask.count_ones() as i32;
                prob += num_traits::pow(p.clone(), k as usize)
                    * num_traits::pow(Rational::one() - p, m - k as usize);
            }
        }
        prob
    }

    #[test]
    fn examples() {
        let r = bernoulli_deviation_check(&[int(1), int(1), int(1)], &ratio(1, 2)).unwrap();
        assert_eq!(r.prob, Q(ratio(1, 2)));
        assert_eq!(r.bound, Q(ratio(7, 100)));
        assert!(r.ok);
        let r = bernoulli_deviation_check(&[int(1)], &ratio(1, 3)).unwrap();
        assert_eq!(r.prob, Q(ratio(2, 3)));
        let r = bernoulli_deviation_check(&[int(0), int(0)], &ratio(1, 4)).unwrap();
        assert_eq!(r.prob, Q(int(1)));
        let r = proportional_quantile_check(&[int(1), int(1)], 2).unwrap();
        assert_eq!(r.prob, Q(ratio(3, 4)));
        assert!(proportional_quantile_check(&[int(1)], 3).unwrap().ok);
    }

    #[test]
    fn matches_brute_force() {
        let w: Vec<Rational> = [3, 1, 4, 1, 5, 9, 2].iter().map(|&x| ratio(x, 7)).collect();
        for p in [ratio(1, 2), ratio(1, 3), ratio(2, 5)] {
            let r = bernoulli_deviation_check(&w, &p).unwrap();
            assert_eq!(r.prob.0, brute(&w, &p));
        }
    }
}
