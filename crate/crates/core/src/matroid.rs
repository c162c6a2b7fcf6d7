//! Matroids given by rank oracles over at most 63 elements.

use std::collections::HashSet;

use crate::bundle::{all_bundles, Bundle, MAX_GOODS};
use crate::error::{Error, Result};

/// Exhaustive axiom checks run only up to this ground size.
pub const AXIOM_CHECK_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Matroid {
    Uniform {
        ground: usize,
        rank: usize,
    },
    /// Each block may contribute at most `cap` elements. Elements outside
    /// every block are loops.
    Partition {
        ground: usize,
        blocks: Vec<(Bundle, usize)>,
    },
    /// Cycle matroid of a multigraph; element `j` is edge `j`.
    Graphic {
        vertices: usize,
        edges: Vec<(usize, usize)>,
    },
    /// Independent sets are the subsets of the listed bases.
    ExplicitBases {
        ground: usize,
        bases: Vec<Bundle>,
    },
    Truncation {
        inner: Box<Matroid>,
        cap: usize,
    },
    /// Components occupy consecutive element ranges in order.
    DirectSum(Vec<Matroid>),
    /// Element `j` of this matroid is element `perm[j]` of `inner`.
    Relabel {
        inner: Box<Matroid>,
        perm: Vec<usize>,
    },
}

impl Matroid {
    pub fn uniform(ground: usize, rank: usize) -> Result<Self> {
        check_ground(ground)?;
        Ok(Matroid::Uniform { ground, rank: rank.min(ground) })
    }

    pub fn partition(ground: usize, blocks: Vec<(Bundle, usize)>) -> Result<Self> {
        check_ground(ground)?;
        for (block, _) in &blocks {
            if !block.fits(ground) {
                return Err(Error::InvalidMatroid(format!(
                    "partition block {block} exceeds ground set of size {ground}"
                )));
            }
        }
        for (i, (a, _)) in blocks.iter().enumerate() {
            for (b, _) in &blocks[i + 1..] {
                if !a.is_disjoint(*b) {
                    return Err(Error::InvalidMatroid(format!(
                        "partition blocks {a} and {b} overlap"
                    )));
                }
            }
        }
        Ok(Matroid::Partition { ground, blocks })
    }

    pub fn graphic(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_ground(edges.len())?;
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::InvalidMatroid(format!(
                "edge ({}, {}) references a vertex outside 1..={vertices}",
                u + 1,
                v + 1
            )));
        }
        Ok(Matroid::Graphic { vertices, edges })
    }

    /// Bases are stored as given; [`Matroid::axiom_violations`] reports
    /// unequal sizes or failed exchange.
    pub fn explicit_bases(ground: usize, mut bases: Vec<Bundle>) -> Result<Self> {
        check_ground(ground)?;
        if bases.is_empty() {
            return Err(Error::InvalidMatroid("no bases given".into()));
        }
        if let Some(b) = bases.iter().find(|b| !b.fits(ground)) {
            return Err(Error::InvalidMatroid(format!(
                "basis {b} exceeds ground set of size {ground}"
            )));
        }
        crate::bundle::canonicalize(&mut bases);
        Ok(Matroid::ExplicitBases { ground, bases })
    }

    pub fn truncation(inner: Matroid, cap: usize) -> Self {
        Matroid::Truncation { inner: Box::new(inner), cap }
    }

    pub fn direct_sum(parts: Vec<Matroid>) -> Result<Self> {
        let total: usize = parts.iter().map(Matroid::ground_size).sum();
        check_ground(total)?;
        Ok(Matroid::DirectSum(parts))
    }

    pub fn relabel(inner: Matroid, perm: Vec<usize>) -> Result<Self> {
        let ground = inner.ground_size();
        let mut seen = vec![false; ground];
        if perm.len() != ground {
            return Err(Error::InvalidMatroid(format!(
                "relabelling has {} entries for a ground set of size {ground}",
                perm.len()
            )));
        }
        for &p in &perm {
            if p >= ground || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidMatroid("relabelling is not a permutation".into()));
            }
        }
        Ok(Matroid::Relabel { inner: Box::new(inner), perm })
    }

    pub fn ground_size(&self) -> usize {
        match self {
            Matroid::Uniform { ground, .. }
            | Matroid::Partition { ground, .. }
            | Matroid::ExplicitBases { ground, .. } => *ground,
            Matroid::Graphic { edges, .. } => edges.len(),
            Matroid::Truncation { inner, .. } | Matroid::Relabel { inner, .. } => {
                inner.ground_size()
            }
            Matroid::DirectSum(parts) => parts.iter().map(Matroid::ground_size).sum(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Matroid::Uniform { .. } => "uniform",
            Matroid::Partition { .. } => "partition",
            Matroid::Graphic { .. } => "graphic",
            Matroid::ExplicitBases { .. } => "explicit_bases",
            Matroid::Truncation { .. } => "truncation",
            Matroid::DirectSum(_) => "direct_sum",
            Matroid::Relabel { .. } => "relabel",
        }
    }

    pub fn rank(&self, set: Bundle) -> Result<usize> {
        set.check_fits(self.ground_size())?;
        Ok(self.rank_of(set))
    }

    pub fn is_independent(&self, set: Bundle) -> Result<bool> {
        Ok(self.rank(set)? == set.len())
    }

    /// Rank of the whole ground set.
    pub fn full_rank(&self) -> usize {
        self.rank_of(Bundle::full(self.ground_size()))
    }

    /// Rank without the range check; callers guarantee `set` fits.
    pub(crate) fn rank_of(&self, set: Bundle) -> usize {
        match self {
            Matroid::Uniform { rank, .. } => set.len().min(*rank),
            Matroid::Partition { blocks, .. } => blocks
                .iter()
                .map(|(b, cap)| set.intersection(*b).len().min(*cap))
                .sum(),
            Matroid::Graphic { vertices, edges } => forest_size(*vertices, edges, set),
            Matroid::ExplicitBases { bases, .. } => bases
                .iter()
                .map(|b| b.intersection(set).len())
                .max()
                .unwrap_or(0),
            Matroid::Truncation { inner, cap } => inner.rank_of(set).min(*cap),
            Matroid::DirectSum(parts) => {
                let mut offset = 0;
                let mut total = 0;
                for part in parts {
                    let size = part.ground_size();
                    let window = Bundle::full(size);
                    total += part.rank_of(Bundle::from_mask(set.mask() >> offset).intersection(window));
                    offset += size;
                }
                total
            }
            Matroid::Relabel { inner, perm } => {
                inner.rank_of(Bundle::from_goods(set.goods().map(|g| perm[g])))
            }
        }
    }

    pub(crate) fn independent(&self, set: Bundle) -> bool {
        self.rank_of(set) == set.len()
    }

    /// Checks rank normalization, unit increase and (local) submodularity
    /// exhaustively for ground sets up to [`AXIOM_CHECK_LIMIT`], plus equal
    /// cardinality and basis exchange for explicit bases.
    pub fn axiom_violations(&self) -> Vec<MatroidViolation> {
        let mut out = Vec::new();
        self.collect_structural(&mut out);
        let m = self.ground_size();
        if m > AXIOM_CHECK_LIMIT {
            return out;
        }
        let size = 1usize << m;
        let ranks: Vec<usize> = all_bundles(m).map(|s| self.rank_of(s)).collect();
        if ranks[0] != 0 {
            out.push(MatroidViolation::EmptyRank(ranks[0]));
        }
        for s in 0..size {
            for j in 0..m {
                if s >> j & 1 == 1 {
                    continue;
                }
                let with_j = s | 1 << j;
                let gain = ranks[with_j] as i64 - ranks[s] as i64;
                if !(0..=1).contains(&gain) {
                    out.push(MatroidViolation::UnitIncrease {
                        set: Bundle::from_mask(s as u64),
                        element: j,
                        gain,
                    });
                    continue;
                }
                for k in j + 1..m {
                    if s >> k & 1 == 1 {
                        continue;
                    }
                    let with_k = s | 1 << k;
                    let with_both = with_j | 1 << k;
                    if ranks[with_j] + ranks[with_k] < ranks[with_both] + ranks[s] {
                        out.push(MatroidViolation::Submodularity {
                            set: Bundle::from_mask(s as u64),
                            a: j,
                            b: k,
                        });
                    }
                }
            }
        }
        out
    }

    fn collect_structural(&self, out: &mut Vec<MatroidViolation>) {
        match self {
            Matroid::ExplicitBases { bases, .. } => {
                let first = bases[0];
                if let Some(&b) = bases.iter().find(|b| b.len() != first.len()) {
                    out.push(MatroidViolation::BasisCardinality { first, other: b });
                    return;
                }
                let set: HashSet<Bundle> = bases.iter().copied().collect();
                for &b1 in bases {
                    for &b2 in bases {
                        for x in b1.difference(b2).goods() {
                            let ok = b2
                                .difference(b1)
                                .goods()
                                .any(|y| set.contains(&b1.without(x).with(y)));
                            if !ok {
                                out.push(MatroidViolation::BasisExchange { first: b1, second: b2, element: x });
                            }
                        }
                    }
                }
            }
            Matroid::Truncation { inner, .. } | Matroid::Relabel { inner, .. } => {
                inner.collect_structural(out)
            }
            Matroid::DirectSum(parts) => parts.iter().for_each(|p| p.collect_structural(out)),
            _ => {}
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatroidViolation {
    EmptyRank(usize),
    UnitIncrease { set: Bundle, element: usize, gain: i64 },
    Submodularity { set: Bundle, a: usize, b: usize },
    BasisCardinality { first: Bundle, other: Bundle },
    BasisExchange { first: Bundle, second: Bundle, element: usize },
}

impl std::fmt::Display for MatroidViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatroidViolation::EmptyRank(r) => write!(f, "rank of the empty set is {r}"),
            MatroidViolation::UnitIncrease { set, element, gain } => write!(
                f,
                "adding element {} to {set} changes the rank by {gain}",
                element + 1
            ),
            MatroidViolation::Submodularity { set, a, b } => write!(
                f,
                "submodularity fails at {set} with elements {} and {}",
                a + 1,
                b + 1
            ),
            MatroidViolation::BasisCardinality { first, other } => {
                write!(f, "bases {first} and {other} have different sizes")
            }
            MatroidViolation::BasisExchange { first, second, element } => write!(
                f,
                "basis exchange fails removing {} from {first} towards {second}",
                element + 1
            ),
        }
    }
}

fn check_ground(ground: usize) -> Result<()> {
    if ground > MAX_GOODS {
        return Err(Error::InvalidMatroid(format!(
            "ground set of size {ground} exceeds the limit of {MAX_GOODS}"
        )));
    }
    Ok(())
}

fn forest_size(vertices: usize, edges: &[(usize, usize)], set: Bundle) -> usize {
    let mut parent: Vec<usize> = (0..vertices).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut size = 0;
    for e in set.goods() {
        let (u, v) = edges[e];
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        if ru != rv {
            parent[ru] = rv;
            size += 1;
        }
    }
    size
}
