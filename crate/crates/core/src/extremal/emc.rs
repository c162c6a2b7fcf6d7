use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::family::{k_subsets, matching_at_least, matching_number, rainbow_matching, shadow, SetFamily, FAMILY_BUDGET};
use super::probability::binomial;
use crate::bundle::Bundle;
use crate::error::{Error, Result};
use crate::rational::{Rational, Q};
use crate::valuation::Valuation;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmcBounds {
    /// `C(m,k) - C(m-n+1,k)`: sets meeting `[n-1]`.
    pub cover: String,
    /// `C(kn-1,k)`: all `k`-subsets of `[kn-1]`.
    pub clique: String,
    pub max: String,
}

fn emc_numbers(m: usize, k: usize, n: usize) -> Result<(BigUint, BigUint)> {
    if n == 0 || m < k * n {
        return Err(Error::Precondition(format!("need m ≥ kn, got m = {m}, k = {k}, n = {n}")));
    }
    let cover = binomial(m, k) - binomial(m + 1 - n, k);
    let clique = if k == 0 { BigUint::zero() } else { binomial(k * n - 1, k) };
    Ok((cover, clique))
}

pub fn emc_bounds(m: usize, k: usize, n: usize) -> Result<EmcBounds> {
    let (cover, clique) = emc_numbers(m, k, n)?;
    let max = (&cover).max(&clique).to_string();
    Ok(EmcBounds { cover: cover.to_string(), clique: clique.to_string(), max })
}

fn layer_budget(m: usize, k: usize) -> Result<()> {
    let size = binomial(m, k);
    if size > BigUint::from(FAMILY_BUDGET) {
        return Err(Error::budget("k-subsets of the universe", size, FAMILY_BUDGET));
    }
    Ok(())
}

/// The two extremal families: `k`-sets meeting `[n-1]`, and `k`-subsets of
/// `[kn-1]`. Both have matching number `n-1`.
pub fn emc_extremal_families(m: usize, k: usize, n: usize) -> Result<(SetFamily, SetFamily)> {
    let (cover_size, clique_size) = emc_numbers(m, k, n)?;
    layer_budget(m, k)?;
    let head = Bundle::full(n - 1);
    let cover = SetFamily::new(m, k, k_subsets(m, k).filter(|s| !s.is_disjoint(head)).collect())?;
    let clique_universe = if k == 0 { 0 } else { k * n - 1 };
    let clique = SetFamily::new(
        m,
        k,
        if k == 0 { Vec::new() } else { k_subsets(clique_universe, k).collect() },
    )?;
    if BigUint::from(cover.len()) != cover_size || BigUint::from(clique.len()) != clique_size {
        return Err(Error::Precondition("extremal family sizes disagree with the bounds".into()));
    }
    if k > 0 {
        for f in [&cover, &clique] {
            if matching_at_least(f, n)?.is_some() {
                return Err(Error::Precondition("an extremal family has an n-matching".into()));
            }
        }
    }
    Ok((cover, clique))
}

#[derive(Clone, Debug, Serialize)]
pub struct FalsifyReport {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub family_size: usize,
    pub trials: u64,
    pub seed: u64,
    /// A family of `family_size` sets with no `n`-matching.
    pub matching_counterexample: Option<Vec<Vec<usize>>>,
    /// `n` families of `family_size` sets with no rainbow matching.
    pub rainbow_counterexample: Option<Vec<Vec<Vec<usize>>>>,
    pub note: &'static str,
}

/// Samples random families one set above the conjectured bound and looks for
/// one without an `n`-matching (and `n`-tuples without a rainbow matching).
/// Heuristic: finding nothing is not evidence of a proof.
pub fn emc_falsify(m: usize, k: usize, n: usize, trials: u64, seed: u64) -> Result<FalsifyReport> {
    let (cover, clique) = emc_numbers(m, k, n)?;
    layer_budget(m, k)?;
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let layer: Vec<Bundle> = k_subsets(m, k).collect();
    let size = cover.max(clique).to_usize().expect("bounded by the layer") + 1;
    let mut report = FalsifyReport {
        m,
        k,
        n,
        family_size: size,
        trials,
        seed,
        matching_counterexample: None,
        rainbow_counterexample: None,
        note: "random search; absence of a counterexample proves nothing",
    };
    if size > layer.len() {
        return Ok(report);
    }
    let draw = |rng: &mut ChaCha8Rng| -> Result<SetFamily> {
        let picked = sample(rng, layer.len(), size).into_iter().map(|i| layer[i]).collect();
        SetFamily::new(m, k, picked)
    };
    type Outcome = (Option<SetFamily>, Option<Vec<SetFamily>>);
    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Outcome> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(t.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let single = draw(&mut rng)?;
            let miss = matching_at_least(&single, n)?.is_none().then_some(single);
            let tuple = (0..n).map(|_| draw(&mut rng)).collect::<Result<Vec<_>>>()?;
            let rainbow_miss = rainbow_matching(&tuple)?.is_none().then_some(tuple);
            Ok((miss, rainbow_miss))
        })
        .collect::<Result<_>>()?;
    for (miss, rainbow_miss) in outcomes {
        if report.matching_counterexample.is_none() {
            report.matching_counterexample = miss.map(|f| f.labels());
        }
        if report.rainbow_counterexample.is_none() {
            report.rainbow_counterexample = rainbow_miss.map(|t| t.iter().map(SetFamily::labels).collect());
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainLayer {
    pub k: usize,
    /// `|G_{k'}|`: zero-valued `k'`-sets.
    pub zeros: usize,
    /// `|∂_{k'} G_k|`.
    pub shadow: usize,
    /// `C(m-n+1, k')`.
    pub bound: String,
    pub ratio: Q,
    pub ratio_float: f64,
    pub shadow_contained: bool,
    pub meets_bound: bool,
    pub ratio_at_least_target: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// `ν(F_k)`, capped at `n`.
    pub nu: usize,
    pub skipped: bool,
    /// `(1 - 1/n)^(n-1)`.
    pub target: Q,
    pub layers: Vec<ChainLayer>,
    /// `ν(F_k) < n` but `|G_k| < C(m-n+1, k)`.
    pub emc_violation: bool,
    pub ok: bool,
}

/// Walks the identical-valuation argument on one 0/1 valuation: with
/// `k = m/n - 1`, if the value-1 `k`-sets have no `n`-matching then the
/// zero `k`-sets number at least `C(m-n+1,k)`, and shadows carry the bound
/// down to every `k' <= k`.
pub fn theorem_chain_check(valuation: &Valuation, n: usize) -> Result<ChainReport> {
    let Valuation::Explicit01 { m, .. } = valuation else {
        return Err(Error::UnsupportedValuation { op: "theorem_chain_check", variant: valuation.kind() });
    };
    let m = *m;
    if n < 2 || m % n != 0 || m / n < 2 {
        return Err(Error::Precondition(format!(
            "need n ≥ 2, n | m and m/n - 1 ≥ 1, got n = {n}, m = {m}"
        )));
    }
    let k = m / n - 1;
    layer_budget(m, k)?;
    let layer = |j: usize, value: bool| -> Result<SetFamily> {
        let sets = k_subsets(m, j)
            .filter(|&s| valuation.value_of(s).is_zero() != value)
            .collect();
        SetFamily::new(m, j, sets)
    };
    let ones = layer(k, true)?;
    let nu = matching_at_least(&ones, n)?.map_or_else(|| matching_number(&ones).map(|x| x.size), |_| Ok(n))?;
    let nf = Rational::from_integer(n.into());
    let target = num_traits::pow(Rational::one() - Rational::one() / nf, n - 1);
    let mut report = ChainReport {
        n,
        m,
        k,
        nu,
        skipped: nu >= n,
        target: Q(target.clone()),
        layers: Vec::new(),
        emc_violation: false,
        ok: true,
    };
    if report.skipped {
        return Ok(report);
    }
    let zeros_k = layer(k, false)?;
    for j in (0..=k).rev() {
        let zeros = layer(j, false)?;
        let sh = shadow(&zeros_k, j)?;
        let bound = binomial(m + 1 - n, j);
        let ratio = Rational::new(zeros.len().into(), binomial(m, j).into());
        let layer = ChainLayer {
            k: j,
            zeros: zeros.len(),
            shadow: sh.len(),
            bound: bound.to_string(),
            ratio_float: crate::rational::to_f64(&ratio),
            ratio_at_least_target: ratio >= target,
            ratio: Q(ratio),
            shadow_contained: sh.sets().iter().all(|&s| zeros.contains(s)),
            meets_bound: BigUint::from(zeros.len()) >= bound,
        };
        if j == k && !layer.meets_bound {
            report.emc_violation = true;
        }
        report.ok &= layer.shadow_contained && layer.meets_bound && layer.ratio_at_least_target;
        report.layers.push(layer);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_examples() {
        let b = emc_bounds(4, 1, 2).unwrap();
        assert_eq!((b.cover.as_str(), b.clique.as_str(), b.max.as_str()), ("1", "1", "1"));
        let b = emc_bounds(9, 2, 3).unwrap();
        assert_eq!((b.cover.as_str(), b.clique.as_str(), b.max.as_str()), ("15", "10", "15"));
        let b = emc_bounds(5, 0, 3).unwrap();
        assert_eq!((b.cover.as_str(), b.clique.as_str()), ("0", "0"));
        assert!(emc_bounds(5, 2, 3).is_err());
    }

    #[test]
    fn extremal_families() {
        let (cover, _) = emc_extremal_families(6, 1, 3).unwrap();
        assert_eq!(cover.labels(), vec![vec![1], vec![2]]);
        let (_, clique) = emc_extremal_families(9, 2, 3).unwrap();
        assert_eq!(clique.len(), 10);
        assert_eq!(matching_number(&clique).unwrap().size, 2);
        let (star, _) = emc_extremal_families(8, 2, 2).unwrap();
        assert!(star.sets().iter().all(|s| s.contains(0)));
    }

    #[test]
    fn falsify_finds_nothing_at_small_sizes() {
        let r = emc_falsify(6, 1, 3, 50, 3).unwrap();
        assert_eq!(r.family_size, 3);
        assert!(r.matching_counterexample.is_none() && r.rainbow_counterexample.is_none());
        let r = emc_falsify(8, 2, 2, 50, 3).unwrap();
        assert_eq!(r.family_size, 8);
        assert!(r.matching_counterexample.is_none());
    }

    #[test]
    fn chain_on_named_cases() {
        let prop3 = Valuation::explicit01(6, vec![Bundle::singleton(0), Bundle::singleton(1)]).unwrap();
        let r = theorem_chain_check(&prop3, 3).unwrap();
        assert_eq!((r.k, r.nu, r.skipped, r.emc_violation), (1, 2, false, false));
        assert_eq!(r.layers[0].zeros, 4);
        assert!(r.ok);
        let one = Valuation::explicit01(6, vec![Bundle::EMPTY]).unwrap();
        assert!(theorem_chain_check(&one, 3).unwrap().skipped);
        let zero = Valuation::explicit01(6, vec![]).unwrap();
        let r = theorem_chain_check(&zero, 3).unwrap();
        assert!(r.ok && r.layers[0].zeros == 6);
    }
}
