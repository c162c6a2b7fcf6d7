//! Valuation classes and exact evaluation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bundle::{canonicalize, Bundle, MAX_GOODS};
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::rational::Rational;

/// Tables are stored densely, so they are limited to this many goods.
pub const TABLE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    Additive(Vec<Rational>),
    UnitDemand(Vec<Rational>),
    MatroidRank(Matroid),
    /// Value 1 iff the bundle contains one of `minimal_ones`.
    Explicit01 { m: usize, minimal_ones: Vec<Bundle> },
    /// `values[mask]` is the value of the bundle with that mask.
    Table { m: usize, values: Vec<Rational> },
}

impl Valuation {
    pub fn additive(weights: Vec<Rational>) -> Result<Self> {
        check_goods(weights.len())?;
        Ok(Valuation::Additive(weights))
    }

    pub fn unit_demand(weights: Vec<Rational>) -> Result<Self> {
        check_goods(weights.len())?;
        Ok(Valuation::UnitDemand(weights))
    }

    pub fn matroid_rank(matroid: Matroid) -> Self {
        Valuation::MatroidRank(matroid)
    }

    /// Stores `minimal_ones` in canonical order, deduplicated. Members that
    /// contain other members are kept (and reported by validation).
    pub fn explicit01(m: usize, mut minimal_ones: Vec<Bundle>) -> Result<Self> {
        check_goods(m)?;
        if let Some(b) = minimal_ones.iter().find(|b| !b.fits(m)) {
            return Err(Error::BundleOutOfRange { mask: b.mask(), m });
        }
        canonicalize(&mut minimal_ones);
        Ok(Valuation::Explicit01 { m, minimal_ones })
    }

    /// Like [`Valuation::explicit01`] but reduces the generators to their
    /// minimal members first.
    pub fn explicit01_from_generators(m: usize, generators: Vec<Bundle>) -> Result<Self> {
        let minimal = minimal_members(generators);
        Valuation::explicit01(m, minimal)
    }

    pub fn table(m: usize, values: Vec<Rational>) -> Result<Self> {
        if m > TABLE_LIMIT {
            return Err(Error::InvalidInstance(format!(
                "table valuations support at most {TABLE_LIMIT} goods"
            )));
        }
        if values.len() != 1 << m {
            return Err(Error::InvalidInstance(format!(
                "table over {m} goods needs {} entries, got {}",
                1u64 << m,
                values.len()
            )));
        }
        Ok(Valuation::Table { m, values })
    }

    pub fn constant(m: usize, value: Rational) -> Result<Self> {
        Valuation::table(m, vec![value; 1 << m])
    }

    /// Number of goods the valuation is defined on.
    pub fn goods(&self) -> usize {
        match self {
            Valuation::Additive(w) | Valuation::UnitDemand(w) => w.len(),
            Valuation::MatroidRank(matroid) => matroid.ground_size(),
            Valuation::Explicit01 { m, .. } | Valuation::Table { m, .. } => *m,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Valuation::Additive(_) => "additive",
            Valuation::UnitDemand(_) => "unit_demand",
            Valuation::MatroidRank(_) => "matroid_rank",
            Valuation::Explicit01 { .. } => "explicit01",
            Valuation::Table { .. } => "table",
        }
    }

    pub fn evaluate(&self, bundle: Bundle) -> Result<Rational> {
        bundle.check_fits(self.goods())?;
        Ok(self.value_of(bundle))
    }

    pub(crate) fn value_of(&self, bundle: Bundle) -> Rational {
        match self {
            Valuation::Additive(w) => bundle.goods().map(|g| &w[g]).sum(),
            Valuation::UnitDemand(w) => bundle
                .goods()
                .map(|g| &w[g])
                .max()
                .cloned()
                .unwrap_or_else(Rational::zero),
            Valuation::MatroidRank(matroid) => {
                Rational::from_integer(BigInt::from(matroid.rank_of(bundle)))
            }
            Valuation::Explicit01 { minimal_ones, .. } => {
                if minimal_ones.iter().any(|s| s.is_subset_of(bundle)) {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }
            Valuation::Table { values, .. } => values[bundle.mask() as usize].clone(),
        }
    }

    /// Whether `v(S') <= v(S)` for all `S' ⊆ S`. Exhaustive for tables,
    /// structural for the other variants.
    pub fn is_monotone(&self) -> bool {
        match self {
            Valuation::Additive(w) => w.iter().all(|x| !x.is_negative()),
            Valuation::Table { .. } => self.monotonicity_witness().is_none(),
            _ => true,
        }
    }

    /// A pair `S' ⊂ S` differing in one good with `v(S') > v(S)`.
    pub fn monotonicity_witness(&self) -> Option<(Bundle, Bundle)> {
        match self {
            Valuation::Table { m, values } => {
                for mask in 0..values.len() {
                    for j in 0..*m {
                        if mask >> j & 1 == 0 && values[mask] > values[mask | 1 << j] {
                            return Some((
                                Bundle::from_mask(mask as u64),
                                Bundle::from_mask((mask | 1 << j) as u64),
                            ));
                        }
                    }
                }
                None
            }
            Valuation::Additive(w) => w
                .iter()
                .position(|x| x.is_negative())
                .map(|g| (Bundle::EMPTY, Bundle::singleton(g))),
            _ => None,
        }
    }

    /// Integer keys, one per bundle mask, ordered exactly like the values.
    pub(crate) fn scores(&self) -> Result<Scores> {
        let m = self.goods();
        let cap = crate::quantile::exact_cap();
        if m > cap {
            return Err(Error::ExactCapExceeded { m, cap });
        }
        let size = 1usize << m;
        match self {
            Valuation::Additive(w) | Valuation::UnitDemand(w) => {
                let (scale, ints) = common_scale(w)?;
                let mut keys = vec![0i128; size];
                let additive = matches!(self, Valuation::Additive(_));
                for mask in 1..size {
                    let low = mask.trailing_zeros() as usize;
                    let rest = keys[mask & (mask - 1)];
                    keys[mask] = if additive {
                        rest.checked_add(ints[low])
                            .ok_or(Error::Overflow("summing additive weights"))?
                    } else {
                        rest.max(ints[low])
                    };
                }
                Ok(Scores { keys, decode: Decode::Scaled(scale) })
            }
            Valuation::MatroidRank(matroid) => {
                let keys = (0..size as u64)
                    .map(|mask| matroid.rank_of(Bundle::from_mask(mask)) as i128)
                    .collect();
                Ok(Scores { keys, decode: Decode::Scaled(BigInt::one()) })
            }
            Valuation::Explicit01 { minimal_ones, .. } => {
                let mut up = vec![false; size];
                for s in minimal_ones {
                    up[s.mask() as usize] = true;
                }
                for j in 0..m {
                    for mask in 0..size {
                        if mask >> j & 1 == 1 && up[mask ^ 1 << j] {
                            up[mask] = true;
                        }
                    }
                }
                let keys = up.into_iter().map(i128::from).collect();
                Ok(Scores { keys, decode: Decode::Scaled(BigInt::one()) })
            }
            Valuation::Table { values, .. } => {
                let mut levels = values.clone();
                levels.sort();
                levels.dedup();
                let keys = values
                    .iter()
                    .map(|v| levels.binary_search(v).map(|i| i as i128).unwrap_or(0))
                    .collect();
                Ok(Scores { keys, decode: Decode::Levels(levels) })
            }
        }
    }
}

/// Order-preserving integer encoding of all bundle values.
pub(crate) struct Scores {
    pub keys: Vec<i128>,
    decode: Decode,
}

enum Decode {
    /// value = key / scale
    Scaled(BigInt),
    /// value = levels[key]
    Levels(Vec<Rational>),
}

impl Scores {
    pub fn value(&self, key: i128) -> Rational {
        match &self.decode {
            Decode::Scaled(scale) => Rational::new(BigInt::from(key), scale.clone()),
            Decode::Levels(levels) => levels[key as usize].clone(),
        }
    }
}

/// Least common multiple of the denominators, and the weights scaled by it.
fn common_scale(weights: &[Rational]) -> Result<(BigInt, Vec<i128>)> {
    let scale = weights
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let ints = weights
        .iter()
        .map(|w| {
            (w.numer() * (&scale / w.denom()))
                .to_i128()
                .ok_or(Error::Overflow("scaling weights to a common denominator"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((scale, ints))
}

/// Members not containing another member, in canonical order.
pub fn minimal_members(mut sets: Vec<Bundle>) -> Vec<Bundle> {
    canonicalize(&mut sets);
    let mut out: Vec<Bundle> = Vec::new();
    for s in sets {
        if !out.iter().any(|t| t.is_subset_of(s)) {
            out.push(s);
        }
    }
    out
}

fn check_goods(m: usize) -> Result<()> {
    if m > MAX_GOODS {
        return Err(Error::InvalidInstance(format!(
            "{m} goods exceed the limit of {MAX_GOODS}"
        )));
    }
    Ok(())
}
