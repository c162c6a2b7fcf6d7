use num_traits::{One, Zero};
use serde::Serialize;

use crate::allocate::{maximin_satisfaction_allocation, maximin_satisfaction_with_sizes};
use crate::bundle::{Allocation, Bundle};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::quantile::allocation_report;
use crate::rational::{int, ratio, to_f64, Rational, Q};
use crate::valuation::Valuation;

pub const NAMED_INSTANCES: [&str; 5] = ["prop3", "unequal_bundles", "mms_gap", "identical_goods", "single_chore"];

/// Optional parameters; each generator fills in its own defaults.
#[derive(Clone, Debug, Default)]
pub struct NamedParams {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub epsilon: Option<Rational>,
}

fn need(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}

fn unequal_bundles(n: usize, m: usize, epsilon: &Rational) -> Result<Instance> {
    need(n >= 2 && m >= n, || format!("unequal_bundles needs n ≥ 2 and m ≥ n, got n = {n}, m = {m}"))?;
    need(*epsilon > Rational::zero(), || format!("epsilon must be positive, got {epsilon}"))?;
    let weights = (0..m)
        .map(|j| if j < n - 1 { Rational::one() } else { epsilon.clone() })
        .collect();
    Instance::identical(Valuation::additive(weights)?, n)
}

/// Two 0/1 tables over four goods: agent 1 values `{1,2}`, `{3,4}` and
/// every bundle of three or more goods; agent 2 the same with `{1,3}`, `{2,4}`.
fn mms_gap() -> Result<Instance> {
    let table = |pairs: [[usize; 2]; 2]| {
        let values = (0..16u64)
            .map(|mask| {
                let s = Bundle::from_mask(mask);
                let hit = pairs.iter().any(|p| s == Bundle::from_goods(p.iter().map(|g| g - 1)));
                int((s.len() >= 3 || hit) as i64)
            })
            .collect();
        Valuation::table(4, values)
    };
    Instance::new(4, vec![table([[1, 2], [3, 4]])?, table([[1, 3], [2, 4]])?])
}

pub fn generate_named_instance(name: &str, params: &NamedParams) -> Result<Instance> {
    match name {
        "prop3" => {
            let n = params.n.unwrap_or(3);
            let m = params.m.unwrap_or(2 * n);
            need(n >= 2 && m + 1 >= n, || format!("prop3 needs n ≥ 2 and m ≥ n - 1, got n = {n}, m = {m}"))?;
            let weights = (0..m).map(|j| int((j + 1 < n) as i64)).collect();
            Instance::identical(Valuation::additive(weights)?, n)
        }
        "unequal_bundles" => {
            let eps = params.epsilon.clone().unwrap_or_else(|| ratio(1, 100));
            unequal_bundles(params.n.unwrap_or(3), params.m.unwrap_or(6), &eps)
        }
        "mms_gap" => {
            need(params.n.is_none_or(|n| n == 2) && params.m.is_none_or(|m| m == 4), || {
                "mms_gap is fixed at n = 2, m = 4".into()
            })?;
            mms_gap()
        }
        "identical_goods" => {
            let n = params.n.unwrap_or(2);
            let m = params.m.unwrap_or(4);
            Instance::identical(Valuation::additive(vec![Rational::one(); m])?, n)
        }
        "single_chore" => {
            need(params.m.is_none_or(|m| m == 1), || "single_chore has exactly one good".into())?;
            let n = params.n.unwrap_or(2);
            Instance::identical(Valuation::table(1, vec![int(0), int(-1)])?, n)
        }
        other => Err(Error::UnknownInstance(other.to_string())),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub n: usize,
    pub m: usize,
    pub epsilon: Q,
    pub size_slack: usize,
    /// Allowed bundle sizes `[lo, hi]`.
    pub sizes: (usize, usize),
    /// Best least satisfaction over allocations with allowed sizes.
    pub equal_size_optimum: Option<Q>,
    pub equal_size_allocation: Option<Vec<Vec<usize>>>,
    pub unconstrained_optimum: Q,
    pub unconstrained_allocation: Vec<Vec<usize>>,
    pub gap: bool,
    /// One 1-good to each of agents `1..n-1`, every ε-good to agent `n`.
    pub takes_all_allocation: Vec<Vec<usize>>,
    pub takes_all_min_satisfaction: Q,
    pub takes_all_above_inverse_e: bool,
}

/// On the `unequal_bundles` instance, compares the best allocation with
/// near-equal bundle sizes against the unconstrained optimum.
pub fn equal_size_gap_report(n: usize, m: usize, epsilon: &Rational, size_slack: usize) -> Result<GapReport> {
    let inst = unequal_bundles(n, m, epsilon)?;
    // |size - m/n| ≤ slack
    let lo = m.div_ceil(n).saturating_sub(size_slack);
    let hi = m / n + size_slack;
    let constrained = maximin_satisfaction_with_sizes(&inst, Some((lo, hi)))?;
    let free = maximin_satisfaction_allocation(&inst)?;
    let mut bundles: Vec<Bundle> = (0..n - 1).map(Bundle::singleton).collect();
    bundles.push(Bundle::full(m).difference(Bundle::full(n - 1)));
    let takes_all = Allocation::new(bundles, m)?;
    let report = allocation_report(&inst, &takes_all, &Rational::one())?;
    let least = report.min_satisfaction.0.clone();
    Ok(GapReport {
        n,
        m,
        epsilon: Q(epsilon.clone()),
        size_slack,
        sizes: (lo, hi),
        gap: constrained.as_ref().is_none_or(|c| c.q_star < free.q_star),
        equal_size_optimum: constrained.as_ref().map(|c| Q(c.q_star.clone())),
        equal_size_allocation: constrained.map(|c| c.allocation.labels()),
        unconstrained_optimum: Q(free.q_star),
        unconstrained_allocation: free.allocation.labels(),
        takes_all_allocation: takes_all.labels(),
        takes_all_above_inverse_e: to_f64(&least) >= (-1f64).exp(),
        takes_all_min_satisfaction: Q(least),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocate::maximin_satisfaction_allocation;

    #[test]
    fn named_shapes() {
        let p = generate_named_instance("prop3", &NamedParams::default()).unwrap();
        assert_eq!((p.agents(), p.goods()), (3, 6));
        assert_eq!(p.valuation(0), &Valuation::additive([1, 1, 0, 0, 0, 0].map(int).to_vec()).unwrap());
        let gap = generate_named_instance("mms_gap", &NamedParams::default()).unwrap();
        let v = gap.valuation(1);
        assert_eq!(v.evaluate(Bundle::from_labels(&[2, 4], 4).unwrap()).unwrap(), int(1));
        assert_eq!(v.evaluate(Bundle::from_labels(&[1, 2], 4).unwrap()).unwrap(), int(0));
        assert!(matches!(
            generate_named_instance("nope", &NamedParams::default()),
            Err(Error::UnknownInstance(_))
        ));
    }

    #[test]
    fn single_chore_threshold() {
        for n in 1..=6 {
            let params = NamedParams { n: Some(n), ..Default::default() };
            let inst = generate_named_instance("single_chore", &params).unwrap();
            assert_eq!(maximin_satisfaction_allocation(&inst).unwrap().q_star, ratio(1, n as i64));
        }
    }

    #[test]
    fn gap_at_small_scale() {
        let r = equal_size_gap_report(3, 6, &ratio(1, 100), 0).unwrap();
        assert!(r.gap);
        assert!(r.takes_all_above_inverse_e);
        let wide = equal_size_gap_report(3, 6, &ratio(1, 100), 6).unwrap();
        assert_eq!(wide.equal_size_optimum, Some(wide.unconstrained_optimum.clone()));
        assert!(!wide.gap);
    }
}
