use serde::Serialize;

use crate::bundle::{Bundle, MAX_GOODS};
use crate::error::{Error, Result};

/// Largest family size the matching searches accept.
pub const FAMILY_BUDGET: usize = 100_000;

/// Node limit for a single branch-and-bound search.
const NODE_BUDGET: u64 = 50_000_000;

/// A deduplicated family of `k`-subsets of `[m]`, sorted by (least element, mask).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    m: usize,
    k: usize,
    sets: Vec<Bundle>,
}

fn search_order(a: &Bundle, b: &Bundle) -> std::cmp::Ordering {
    let key = |s: &Bundle| (s.mask().trailing_zeros(), s.mask());
    key(a).cmp(&key(b))
}

impl SetFamily {
    pub fn new(m: usize, k: usize, mut sets: Vec<Bundle>) -> Result<Self> {
        if m > MAX_GOODS || k > m {
            return Err(Error::Precondition(format!("invalid family shape m = {m}, k = {k}")));
        }
        for s in &sets {
            s.check_fits(m)?;
            if s.len() != k {
                return Err(Error::Precondition(format!("{s} does not have {k} elements")));
            }
        }
        sets.sort_by(search_order);
        sets.dedup();
        Ok(SetFamily { m, k, sets })
    }

    pub fn from_labels(m: usize, k: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let sets = sets
            .iter()
            .map(|s| Bundle::from_labels(s, m))
            .collect::<Result<Vec<_>>>()?;
        SetFamily::new(m, k, sets)
    }

    /// All `k`-subsets of `[m]`.
    pub fn layer(m: usize, k: usize) -> Result<Self> {
        SetFamily::new(m, k, k_subsets(m, k).collect())
    }

    pub fn universe(&self) -> usize {
        self.m
    }

    pub fn uniformity(&self) -> usize {
        self.k
    }

    pub fn sets(&self) -> &[Bundle] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn labels(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(|s| s.labels()).collect()
    }

    pub fn contains(&self, set: Bundle) -> bool {
        self.sets.binary_search_by(|s| search_order(s, &set)).is_ok()
    }

    fn check_budget(&self) -> Result<()> {
        if self.sets.len() > FAMILY_BUDGET {
            return Err(Error::budget("family size", self.sets.len(), FAMILY_BUDGET));
        }
        Ok(())
    }
}

/// All `k`-subsets of `0..m` in ascending mask order.
pub fn k_subsets(m: usize, k: usize) -> impl Iterator<Item = Bundle> {
    let limit = if m >= 64 { u64::MAX } else { 1u64 << m };
    let mut next = if k > m {
        None
    } else if k == 0 {
        Some(0u64)
    } else {
        Some((1u64 << k) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack.
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let n = (((r ^ cur) >> 2) / c) | r;
            (r != 0 && n < limit).then_some(n)
        };
        Some(Bundle::from_mask(cur))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub size: usize,
    pub sets: Vec<Vec<usize>>,
}

struct Packing<'a> {
    sets: &'a [Bundle],
    k: usize,
    m: usize,
    target: usize,
    best: Vec<usize>,
    nodes: u64,
}

impl Packing<'_> {
    fn run(&mut self, cands: &[usize], used: u64, chosen: &mut Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(Error::budget("branch-and-bound nodes", self.nodes, NODE_BUDGET));
        }
        if chosen.len() > self.best.len() {
            self.best = chosen.clone();
        }
        if self.best.len() >= self.target {
            return Ok(());
        }
        let free = self.m - used.count_ones() as usize;
        let room = free.checked_div(self.k).unwrap_or(cands.len());
        if chosen.len() + room.min(cands.len()) <= self.best.len() {
            return Ok(());
        }
        let Some((&first, rest)) = cands.split_first() else {
            return Ok(());
        };
        let s = self.sets[first].mask();
        let with: Vec<usize> = rest
            .iter()
            .copied()
            .filter(|&i| self.sets[i].mask() & s == 0)
            .collect();
        chosen.push(first);
        self.run(&with, used | s, chosen)?;
        chosen.pop();
        self.run(rest, used, chosen)
    }
}

fn greedy(sets: &[Bundle]) -> Vec<usize> {
    let mut used = 0u64;
    let mut out = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        if s.mask() & used == 0 && !(s.is_empty() && out.iter().any(|&j: &usize| sets[j].is_empty())) {
            used |= s.mask();
            out.push(i);
        }
    }
    out
}

fn pack(family: &SetFamily, target: usize) -> Result<Matching> {
    family.check_budget()?;
    let mut p = Packing {
        sets: &family.sets,
        k: family.k,
        m: family.m,
        target,
        best: greedy(&family.sets),
        nodes: 0,
    };
    let all: Vec<usize> = (0..family.sets.len()).collect();
    p.run(&all, 0, &mut Vec::new())?;
    Ok(Matching {
        size: p.best.len(),
        sets: p.best.iter().map(|&i| family.sets[i].labels()).collect(),
    })
}

/// Maximum number of pairwise disjoint members, with a witness.
pub fn matching_number(family: &SetFamily) -> Result<Matching> {
    pack(family, usize::MAX)
}

/// Whether `ν(F) >= t`, stopping at the first `t`-matching.
pub fn matching_at_least(family: &SetFamily, t: usize) -> Result<Option<Matching>> {
    let m = pack(family, t)?;
    Ok((m.size >= t).then_some(m))
}

/// Pairwise disjoint `S_1..S_n` with `S_i` from family `i`, if any.
pub fn rainbow_matching(families: &[SetFamily]) -> Result<Option<Vec<Bundle>>> {
    let Some(first) = families.first() else {
        return Ok(Some(Vec::new()));
    };
    for f in families {
        f.check_budget()?;
        if f.m != first.m {
            return Err(Error::GroundMismatch(first.m, f.m));
        }
    }
    // Scarcest families first; results are reported in the given order.
    let mut order: Vec<usize> = (0..families.len()).collect();
    order.sort_by_key(|&i| (families[i].len(), i));
    let mut picks = vec![Bundle::EMPTY; families.len()];
    let mut nodes = 0u64;
    fn go(
        families: &[SetFamily],
        order: &[usize],
        depth: usize,
        used: u64,
        picks: &mut [Bundle],
        nodes: &mut u64,
    ) -> Result<bool> {
        *nodes += 1;
        if *nodes > NODE_BUDGET {
            return Err(Error::budget("rainbow search nodes", *nodes, NODE_BUDGET));
        }
        let Some(&fi) = order.get(depth) else {
            return Ok(true);
        };
        for s in &families[fi].sets {
            if s.mask() & used == 0 {
                picks[fi] = *s;
                if go(families, order, depth + 1, used | s.mask(), picks, nodes)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
    let found = go(families, &order, 0, 0, &mut picks, &mut nodes)?;
    Ok(found.then_some(picks))
}

/// `∂_{k'}F`: every `k'`-subset of some member.
pub fn shadow(family: &SetFamily, k_prime: usize) -> Result<SetFamily> {
    if k_prime > family.k {
        return Err(Error::Precondition(format!(
            "shadow level {k_prime} exceeds the uniformity {}",
            family.k
        )));
    }
    let mut out = Vec::new();
    for s in &family.sets {
        let goods: Vec<usize> = s.goods().collect();
        for sub in k_subsets(goods.len(), k_prime) {
            out.push(Bundle::from_goods(sub.goods().map(|i| goods[i])));
        }
    }
    SetFamily::new(family.m, k_prime, out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KkCheck {
    pub family_size: usize,
    pub shadow_size: usize,
    pub hypothesis: bool,
    pub conclusion: bool,
    /// The implication `hypothesis ⟹ conclusion`.
    pub holds: bool,
}

/// If `|F| >= C(m', k)` then `|∂_{k'}F| >= C(m', k')`.
pub fn kruskal_katona_check(family: &SetFamily, m_prime: usize, k_prime: usize) -> Result<KkCheck> {
    let k = family.k;
    if !(k_prime <= k && k <= m_prime && m_prime <= family.m) {
        return Err(Error::Precondition(format!(
            "need k' ≤ k ≤ m' ≤ m, got k' = {k_prime}, k = {k}, m' = {m_prime}, m = {}",
            family.m
        )));
    }
    let sh = shadow(family, k_prime)?;
    let hypothesis = super::binomial(m_prime, k) <= family.len().into();
    let conclusion = super::binomial(m_prime, k_prime) <= sh.len().into();
    Ok(KkCheck {
        family_size: family.len(),
        shadow_size: sh.len(),
        hypothesis,
        conclusion,
        holds: !hypothesis || conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(m: usize, k: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_labels(m, k, &sets.iter().map(|s| s.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    pub(crate) fn naive_nu(f: &SetFamily) -> usize {
        let sets = f.sets();
        let mut best = 0;
        for pick in 0u32..1 << sets.len() {
            let mut used = 0u64;
            let mut ok = true;
            for (i, s) in sets.iter().enumerate() {
                if pick >> i & 1 == 1 {
                    ok &= s.mask() & used == 0 && !(s.is_empty() && pick.count_ones() > 1);
                    used |= s.mask();
                }
            }
            if ok {
                best = best.max(pick.count_ones() as usize);
            }
        }
        best
    }

    #[test]
    fn subsets_enumerate_layers() {
        assert_eq!(k_subsets(5, 2).count(), 10);
        assert_eq!(k_subsets(4, 0).count(), 1);
        assert_eq!(k_subsets(3, 4).count(), 0);
        assert_eq!(k_subsets(63, 63).count(), 1);
        assert!(k_subsets(6, 3).all(|b| b.len() == 3 && b.fits(6)));
    }

    #[test]
    fn matching_examples() {
        let star = SetFamily::new(5, 2, k_subsets(5, 2).filter(|b| b.contains(0)).collect()).unwrap();
        assert_eq!(matching_number(&star).unwrap().size, 1);
        assert_eq!(matching_number(&fam(6, 2, &[&[1, 2], &[3, 4], &[5, 6]])).unwrap().size, 3);
        assert_eq!(matching_number(&SetFamily::layer(3, 2).unwrap()).unwrap().size, 1);
        let f = SetFamily::layer(7, 2).unwrap();
        assert_eq!(matching_number(&f).unwrap().size, naive_nu(&f).min(3));
    }

    #[test]
    fn rainbow_examples() {
        let one = fam(1, 1, &[&[1]]);
        assert_eq!(rainbow_matching(&[one.clone(), one]).unwrap(), None);
        let found = rainbow_matching(&[fam(4, 2, &[&[1, 2]]), fam(4, 2, &[&[3, 4]])]).unwrap().unwrap();
        assert_eq!(found[1].labels(), vec![3, 4]);
        let layer = SetFamily::layer(6, 2).unwrap();
        assert!(rainbow_matching(&[layer.clone(), layer.clone(), layer]).unwrap().is_some());
    }

    #[test]
    fn shadows_and_kk() {
        let s = shadow(&fam(3, 3, &[&[1, 2, 3]]), 2).unwrap();
        assert_eq!(s.labels(), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        let full = SetFamily::layer(5, 3).unwrap();
        assert_eq!(shadow(&full, 2).unwrap(), SetFamily::layer(5, 2).unwrap());
        let triples = SetFamily::new(6, 3, k_subsets(4, 3).collect()).unwrap();
        let kk = kruskal_katona_check(&triples, 4, 2).unwrap();
        assert!(kk.hypothesis && kk.conclusion && kk.shadow_size == 6);
        let small = fam(6, 3, &[&[1, 2, 3]]);
        assert!(!kruskal_katona_check(&small, 5, 2).unwrap().hypothesis);
        assert!(shadow(&small, 4).is_err());
    }
}
