use std::collections::VecDeque;

use serde::Serialize;

use crate::bundle::{all_bundles, Bundle};
use crate::error::{Error, Result};
use crate::matroid::Matroid;

/// Ground sets up to this size are certified by scanning every `A ⊆ E`.
pub const EXHAUSTIVE_CERTIFICATE_LIMIT: usize = 20;

/// A maximum-cardinality common independent set, by shortest augmenting paths.
pub fn matroid_intersection(m1: &Matroid, m2: &Matroid) -> Result<Bundle> {
    let ground = m1.ground_size();
    if ground != m2.ground_size() {
        return Err(Error::GroundMismatch(ground, m2.ground_size()));
    }
    let mut current = Bundle::EMPTY;
    while let Some(path) = augmenting_path(m1, m2, current) {
        for x in path {
            current = if current.contains(x) { current.without(x) } else { current.with(x) };
        }
    }
    Ok(current)
}

/// Exchange graph arcs: `y -> x` when `I - y + x` is independent in `m1`,
/// `x -> y` when it is independent in `m2` (`y ∈ I`, `x ∉ I`).
struct ExchangeGraph {
    sources: Vec<usize>,
    sinks: Vec<bool>,
    adj: Vec<Vec<usize>>,
}

fn exchange_graph(m1: &Matroid, m2: &Matroid, current: Bundle) -> ExchangeGraph {
    let ground = m1.ground_size();
    let outside: Vec<usize> = (0..ground).filter(|&x| !current.contains(x)).collect();
    let sources = outside
        .iter()
        .copied()
        .filter(|&x| m1.independent(current.with(x)))
        .collect();
    let mut sinks = vec![false; ground];
    for &x in &outside {
        sinks[x] = m2.independent(current.with(x));
    }
    let mut adj = vec![Vec::new(); ground];
    for y in current.goods() {
        let base = current.without(y);
        for &x in &outside {
            let swapped = base.with(x);
            if m1.independent(swapped) {
                adj[y].push(x);
            }
            if m2.independent(swapped) {
                adj[x].push(y);
            }
        }
    }
    ExchangeGraph { sources, sinks, adj }
}

fn augmenting_path(m1: &Matroid, m2: &Matroid, current: Bundle) -> Option<Vec<usize>> {
    let g = exchange_graph(m1, m2, current);
    let ground = m1.ground_size();
    let mut pred = vec![usize::MAX; ground];
    let mut seen = vec![false; ground];
    let mut queue = VecDeque::new();
    for &s in &g.sources {
        seen[s] = true;
        queue.push_back(s);
    }
    while let Some(v) = queue.pop_front() {
        if g.sinks[v] {
            let mut path = vec![v];
            let mut cur = v;
            while pred[cur] != usize::MAX {
                cur = pred[cur];
                path.push(cur);
            }
            return Some(path);
        }
        for &w in &g.adj[v] {
            if !seen[w] {
                seen[w] = true;
                pred[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EdmondsCertificate {
    /// `rank1(A) + rank2(E \ A) = |I|`, so `I` is maximum.
    Certified { a: Vec<usize>, bound: usize },
    NotIndependent { matroid: usize },
    /// Some common independent set is larger than `I`.
    NotMaximum { size: usize, maximum: usize, a: Vec<usize> },
}

/// Certifies that `set` is a maximum common independent set of `m1` and `m2`
/// via the min-max formula, or refutes it. `supplied` is tried first.
pub fn edmonds_certificate(
    m1: &Matroid,
    m2: &Matroid,
    set: Bundle,
    supplied: Option<Bundle>,
) -> Result<EdmondsCertificate> {
    let ground = m1.ground_size();
    if ground != m2.ground_size() {
        return Err(Error::GroundMismatch(ground, m2.ground_size()));
    }
    set.check_fits(ground)?;
    if !m1.independent(set) {
        return Ok(EdmondsCertificate::NotIndependent { matroid: 1 });
    }
    if !m2.independent(set) {
        return Ok(EdmondsCertificate::NotIndependent { matroid: 2 });
    }
    let full = Bundle::full(ground);
    let bound = |a: Bundle| m1.rank_of(a) + m2.rank_of(full.difference(a));
    let size = set.len();
    if let Some(a) = supplied {
        a.check_fits(ground)?;
        if bound(a) == size {
            return Ok(EdmondsCertificate::Certified { a: a.labels(), bound: size });
        }
    }
    // Elements that can reach a sink in the exchange graph form a tight A
    // whenever no augmenting path exists.
    let reach = can_reach_sink(m1, m2, set);
    for a in [reach, full.difference(reach)] {
        if bound(a) == size {
            return Ok(EdmondsCertificate::Certified { a: a.labels(), bound: size });
        }
    }
    if ground <= EXHAUSTIVE_CERTIFICATE_LIMIT {
        let (best, a) = all_bundles(ground)
            .map(|a| (bound(a), a))
            .min_by_key(|&(b, a)| (b, a.mask()))
            .expect("at least the empty set");
        if best == size {
            return Ok(EdmondsCertificate::Certified { a: a.labels(), bound: size });
        }
        return Ok(EdmondsCertificate::NotMaximum { size, maximum: best, a: a.labels() });
    }
    let maximum = matroid_intersection(m1, m2)?.len();
    Ok(EdmondsCertificate::NotMaximum { size, maximum, a: reach.labels() })
}

fn can_reach_sink(m1: &Matroid, m2: &Matroid, set: Bundle) -> Bundle {
    let g = exchange_graph(m1, m2, set);
    let ground = m1.ground_size();
    let mut rev = vec![Vec::new(); ground];
    for (v, outs) in g.adj.iter().enumerate() {
        for &w in outs {
            rev[w].push(v);
        }
    }
    let mut seen = g.sinks.clone();
    let mut queue: VecDeque<usize> = (0..ground).filter(|&v| seen[v]).collect();
    while let Some(v) = queue.pop_front() {
        for &w in &rev[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    Bundle::from_goods((0..ground).filter(|&v| seen[v]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(labels: &[usize]) -> Bundle {
        Bundle::from_labels(labels, 4).unwrap()
    }

    fn blocks() -> Matroid {
        Matroid::partition(4, vec![(b(&[1, 2]), 1), (b(&[3, 4]), 1)]).unwrap()
    }

    #[test]
    fn uniform_and_partition() {
        let u = Matroid::uniform(4, 2).unwrap();
        let i = matroid_intersection(&u, &blocks()).unwrap();
        assert_eq!(i.len(), 2);
        assert!(u.independent(i) && blocks().independent(i));
        match edmonds_certificate(&u, &blocks(), b(&[1, 3]), None).unwrap() {
            EdmondsCertificate::Certified { bound, .. } => assert_eq!(bound, 2),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            edmonds_certificate(&u, &blocks(), b(&[1, 2]), None).unwrap(),
            EdmondsCertificate::NotIndependent { matroid: 2 }
        );
        assert!(matches!(
            edmonds_certificate(&u, &blocks(), b(&[1]), None).unwrap(),
            EdmondsCertificate::NotMaximum { maximum: 2, .. }
        ));
    }

    #[test]
    fn degenerate_cases() {
        let g = Matroid::graphic(4, vec![(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert_eq!(matroid_intersection(&g, &g).unwrap().len(), 3);
        let zero = Matroid::uniform(4, 0).unwrap();
        assert_eq!(matroid_intersection(&zero, &blocks()).unwrap(), Bundle::EMPTY);
        let empty = Matroid::uniform(0, 0).unwrap();
        assert_eq!(
            edmonds_certificate(&empty, &empty, Bundle::EMPTY, None).unwrap(),
            EdmondsCertificate::Certified { a: vec![], bound: 0 }
        );
        assert!(matroid_intersection(&zero, &Matroid::uniform(3, 1).unwrap()).is_err());
    }
}
