//! Instances, validation reports and the JSON instance format.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::bundle::{all_bundles, Bundle};
use crate::error::{Error, Result};
use crate::matroid::{Matroid, MatroidViolation};
use crate::rational::{Rational, Q};
use crate::valuation::Valuation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    m: usize,
    valuations: Vec<Valuation>,
}

impl Instance {
    /// One valuation per agent, all over the same `m` goods.
    pub fn new(m: usize, valuations: Vec<Valuation>) -> Result<Self> {
        if valuations.is_empty() {
            return Err(Error::InvalidInstance("at least one agent is required".into()));
        }
        if m == 0 {
            return Err(Error::InvalidInstance("at least one good is required".into()));
        }
        for (i, v) in valuations.iter().enumerate() {
            if v.goods() != m {
                return Err(Error::InvalidInstance(format!(
                    "valuation of agent {} is defined on {} goods, expected {m}",
                    i + 1,
                    v.goods()
                )));
            }
        }
        Ok(Instance { n: valuations.len(), m, valuations })
    }

    /// `n` copies of the same valuation.
    pub fn identical(valuation: Valuation, n: usize) -> Result<Self> {
        Instance::new(valuation.goods(), vec![valuation; n])
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn goods(&self) -> usize {
        self.m
    }

    pub fn valuation(&self, agent: usize) -> &Valuation {
        &self.valuations[agent]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    /// Every violated invariant with a witness; empty means valid.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        for (agent, v) in self.valuations.iter().enumerate() {
            for kind in valuation_issues(v) {
                issues.push(Issue { agent, kind });
            }
        }
        ValidationReport { issues }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDoc = serde_json::from_str(text)?;
        doc.into_instance()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceDoc::from(self)).expect("instance serializes")
    }
}

fn valuation_issues(v: &Valuation) -> Vec<IssueKind> {
    let mut out = Vec::new();
    match v {
        Valuation::Additive(w) | Valuation::UnitDemand(w) => {
            for (good, weight) in w.iter().enumerate() {
                if weight.is_negative() {
                    out.push(IssueKind::NegativeWeight { good, weight: weight.clone() });
                }
            }
        }
        Valuation::MatroidRank(matroid) => {
            out.extend(matroid.axiom_violations().into_iter().map(IssueKind::Matroid))
        }
        Valuation::Explicit01 { minimal_ones, .. } => {
            for (i, a) in minimal_ones.iter().enumerate() {
                for b in &minimal_ones[i + 1..] {
                    if a.is_subset_of(*b) {
                        out.push(IssueKind::NotAntichain { smaller: *a, larger: *b });
                    }
                }
            }
        }
        Valuation::Table { m, values } => {
            if let Some(neg) = values.iter().position(|x| x.is_negative()) {
                out.push(IssueKind::NegativeValue {
                    bundle: Bundle::from_mask(neg as u64),
                    value: values[neg].clone(),
                });
            }
            for s in all_bundles(*m) {
                for j in 0..*m {
                    if s.contains(j) {
                        continue;
                    }
                    let t = s.with(j);
                    let (vs, vt) = (&values[s.mask() as usize], &values[t.mask() as usize]);
                    if vs > vt {
                        out.push(IssueKind::NotMonotone {
                            subset: s,
                            superset: t,
                            subset_value: vs.clone(),
                            superset_value: vt.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Issue {
    pub agent: usize,
    pub kind: IssueKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IssueKind {
    NotMonotone {
        subset: Bundle,
        superset: Bundle,
        subset_value: Rational,
        superset_value: Rational,
    },
    NegativeWeight { good: usize, weight: Rational },
    NegativeValue { bundle: Bundle, value: Rational },
    NotAntichain { smaller: Bundle, larger: Bundle },
    Matroid(MatroidViolation),
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "agent {}: ", self.agent + 1)?;
        match &self.kind {
            IssueKind::NotMonotone { subset, superset, subset_value, superset_value } => write!(
                f,
                "not monotone: v({subset}) = {subset_value} > v({superset}) = {superset_value}"
            ),
            IssueKind::NegativeWeight { good, weight } => {
                write!(f, "negative weight {weight} on good {}", good + 1)
            }
            IssueKind::NegativeValue { bundle, value } => {
                write!(f, "negative value {value} at {bundle}")
            }
            IssueKind::NotAntichain { smaller, larger } => {
                write!(f, "minimal ones {smaller} and {larger} are nested")
            }
            IssueKind::Matroid(v) => write!(f, "matroid axiom: {v}"),
        }
    }
}

// ---- JSON documents -------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    n: usize,
    m: usize,
    valuations: Vec<ValuationDoc>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ValuationDoc {
    Additive { weights: Vec<Q> },
    UnitDemand { weights: Vec<Q> },
    MatroidRank { matroid: MatroidDoc },
    Explicit01 {
        /// Needed only when it cannot be inferred from the surrounding instance.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
        minimal_ones: Vec<Vec<usize>>,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
        values: BTreeMap<String, Q>,
    },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidDoc {
    Uniform { ground: usize, rank: usize },
    Partition { ground: usize, blocks: Vec<BlockDoc> },
    Graphic { vertices: usize, edges: Vec<[usize; 2]> },
    ExplicitBases { ground: usize, bases: Vec<Vec<usize>> },
    Truncation { inner: Box<MatroidDoc>, cap: usize },
    DirectSum { parts: Vec<MatroidDoc> },
    Relabel { inner: Box<MatroidDoc>, perm: Vec<usize> },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    goods: Vec<usize>,
    cap: usize,
}

impl InstanceDoc {
    fn into_instance(self) -> Result<Instance> {
        if self.valuations.len() != self.n {
            return Err(Error::InvalidInstance(format!(
                "n = {} but {} valuations given",
                self.n,
                self.valuations.len()
            )));
        }
        let valuations = self
            .valuations
            .into_iter()
            .map(|v| v.into_valuation(self.m))
            .collect::<Result<Vec<_>>>()?;
        Instance::new(self.m, valuations)
    }
}

impl ValuationDoc {
    pub fn into_valuation(self, m: usize) -> Result<Valuation> {
        match self {
            ValuationDoc::Additive { weights } => {
                Valuation::additive(weights.into_iter().map(|q| q.0).collect())
            }
            ValuationDoc::UnitDemand { weights } => {
                Valuation::unit_demand(weights.into_iter().map(|q| q.0).collect())
            }
            ValuationDoc::MatroidRank { matroid } => Ok(Valuation::matroid_rank(matroid.into_matroid()?)),
            ValuationDoc::Explicit01 { m: own, minimal_ones } => {
                let m = own.unwrap_or(m);
                let sets = minimal_ones
                    .iter()
                    .map(|s| Bundle::from_labels(s, m))
                    .collect::<Result<Vec<_>>>()?;
                Valuation::explicit01(m, sets)
            }
            ValuationDoc::Table { m: own, values } => {
                let m = own.unwrap_or(m);
                if m > crate::valuation::TABLE_LIMIT {
                    return Err(Error::InvalidInstance(format!("table over {m} goods is too large")));
                }
                let mut dense: Vec<Option<Rational>> = vec![None; 1 << m];
                for (key, value) in values {
                    let bundle = Bundle::from_labels(&parse_labels(&key)?, m)?;
                    dense[bundle.mask() as usize] = Some(value.0);
                }
                let missing = dense.iter().position(Option::is_none);
                if let Some(mask) = missing {
                    return Err(Error::InvalidInstance(format!(
                        "table has no value for bundle {}",
                        Bundle::from_mask(mask as u64)
                    )));
                }
                Valuation::table(m, dense.into_iter().flatten().collect())
            }
        }
    }
}

impl From<&Valuation> for ValuationDoc {
    fn from(v: &Valuation) -> Self {
        let qs = |w: &[Rational]| w.iter().cloned().map(Q).collect();
        match v {
            Valuation::Additive(w) => ValuationDoc::Additive { weights: qs(w) },
            Valuation::UnitDemand(w) => ValuationDoc::UnitDemand { weights: qs(w) },
            Valuation::MatroidRank(matroid) => ValuationDoc::MatroidRank { matroid: matroid.into() },
            Valuation::Explicit01 { minimal_ones, .. } => ValuationDoc::Explicit01 {
                m: None,
                minimal_ones: minimal_ones.iter().map(|b| b.labels()).collect(),
            },
            Valuation::Table { values, .. } => ValuationDoc::Table {
                m: None,
                values: values
                    .iter()
                    .enumerate()
                    .map(|(mask, x)| (label_key(Bundle::from_mask(mask as u64)), Q(x.clone())))
                    .collect(),
            },
        }
    }
}

impl MatroidDoc {
    pub fn into_matroid(self) -> Result<Matroid> {
        match self {
            MatroidDoc::Uniform { ground, rank } => Matroid::uniform(ground, rank),
            MatroidDoc::Partition { ground, blocks } => {
                let blocks = blocks
                    .into_iter()
                    .map(|b| Ok((Bundle::from_labels(&b.goods, ground)?, b.cap)))
                    .collect::<Result<Vec<_>>>()?;
                Matroid::partition(ground, blocks)
            }
            MatroidDoc::Graphic { vertices, edges } => {
                if edges.iter().flatten().any(|&v| v == 0) {
                    return Err(Error::InvalidMatroid("vertices are 1-indexed".into()));
                }
                Matroid::graphic(vertices, edges.into_iter().map(|[u, v]| (u - 1, v - 1)).collect())
            }
            MatroidDoc::ExplicitBases { ground, bases } => {
                let bases = bases
                    .iter()
                    .map(|b| Bundle::from_labels(b, ground))
                    .collect::<Result<Vec<_>>>()?;
                Matroid::explicit_bases(ground, bases)
            }
            MatroidDoc::Truncation { inner, cap } => Ok(Matroid::truncation(inner.into_matroid()?, cap)),
            MatroidDoc::DirectSum { parts } => Matroid::direct_sum(
                parts.into_iter().map(MatroidDoc::into_matroid).collect::<Result<Vec<_>>>()?,
            ),
            MatroidDoc::Relabel { inner, perm } => {
                if perm.contains(&0) {
                    return Err(Error::InvalidMatroid("relabelling is 1-indexed".into()));
                }
                Matroid::relabel(inner.into_matroid()?, perm.into_iter().map(|p| p - 1).collect())
            }
        }
    }
}

impl From<&Matroid> for MatroidDoc {
    fn from(m: &Matroid) -> Self {
        match m {
            Matroid::Uniform { ground, rank } => MatroidDoc::Uniform { ground: *ground, rank: *rank },
            Matroid::Partition { ground, blocks } => MatroidDoc::Partition {
                ground: *ground,
                blocks: blocks
                    .iter()
                    .map(|(b, cap)| BlockDoc { goods: b.labels(), cap: *cap })
                    .collect(),
            },
            Matroid::Graphic { vertices, edges } => MatroidDoc::Graphic {
                vertices: *vertices,
                edges: edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect(),
            },
            Matroid::ExplicitBases { ground, bases } => MatroidDoc::ExplicitBases {
                ground: *ground,
                bases: bases.iter().map(|b| b.labels()).collect(),
            },
            Matroid::Truncation { inner, cap } => {
                MatroidDoc::Truncation { inner: Box::new(inner.as_ref().into()), cap: *cap }
            }
            Matroid::DirectSum(parts) => MatroidDoc::DirectSum { parts: parts.iter().map(Into::into).collect() },
            Matroid::Relabel { inner, perm } => MatroidDoc::Relabel {
                inner: Box::new(inner.as_ref().into()),
                perm: perm.iter().map(|p| p + 1).collect(),
            },
        }
    }
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        InstanceDoc {
            n: inst.n,
            m: inst.m,
            valuations: inst.valuations.iter().map(Into::into).collect(),
        }
    }
}

/// `"1,3"` for the bundle {1,3}; `""` for the empty bundle.
pub fn label_key(bundle: Bundle) -> String {
    bundle
        .labels()
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn parse_labels(key: &str) -> Result<Vec<usize>> {
    key.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("`{s}` is not a good label")))
        })
        .collect()
}
