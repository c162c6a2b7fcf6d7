use crate::bundle::{Allocation, Bundle};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::Rational;
use crate::valuation::Valuation;

/// Agents pick in instance order; each takes her highest-weight remaining
/// good, ties going to the lowest-indexed good.
pub fn round_robin(instance: &Instance) -> Result<Allocation> {
    let weights: Vec<&[Rational]> = instance
        .valuations()
        .iter()
        .map(|v| match v {
            Valuation::Additive(w) | Valuation::UnitDemand(w) => Ok(w.as_slice()),
            other => Err(Error::UnsupportedValuation {
                op: "round_robin",
                variant: other.kind(),
            }),
        })
        .collect::<Result<_>>()?;
    let n = instance.agents();
    let m = instance.goods();
    let mut bundles = vec![Bundle::EMPTY; n];
    let mut remaining: Vec<usize> = (0..m).collect();
    for step in 0..m {
        let agent = step % n;
        let w = weights[agent];
        let mut best = 0;
        for (pos, &good) in remaining.iter().enumerate().skip(1) {
            if w[good] > w[remaining[best]] {
                best = pos;
            }
        }
        let good = remaining.remove(best);
        bundles[agent] = bundles[agent].with(good);
    }
    Allocation::new(bundles, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn hand_trace() {
        let inst = Instance::new(
            3,
            vec![
                Valuation::additive(ints(&[5, 3, 1])).unwrap(),
                Valuation::additive(ints(&[4, 2, 6])).unwrap(),
            ],
        )
        .unwrap();
        let a = round_robin(&inst).unwrap();
        assert_eq!(a.labels(), vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn ties_take_lowest_good() {
        let inst = Instance::new(
            3,
            vec![
                Valuation::unit_demand(ints(&[2, 2, 1])).unwrap(),
                Valuation::unit_demand(ints(&[0, 0, 0])).unwrap(),
            ],
        )
        .unwrap();
        let a = round_robin(&inst).unwrap();
        assert!(a.bundle(0).contains(0));
        assert_eq!(a.bundle(1), Bundle::singleton(1));

        let sym = Instance::identical(Valuation::additive(ints(&[1, 1, 1])).unwrap(), 3).unwrap();
        assert!(round_robin(&sym).unwrap().bundles().iter().all(|b| b.len() == 1));
    }

    #[test]
    fn rejects_other_classes() {
        let inst = Instance::identical(Valuation::constant(2, int(1)).unwrap(), 2).unwrap();
        assert!(matches!(round_robin(&inst), Err(Error::UnsupportedValuation { .. })));
    }
}
