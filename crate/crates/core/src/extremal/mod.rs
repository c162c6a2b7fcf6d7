//! Set-family combinatorics and the probability bounds that sit next to them.

mod emc;
mod family;
mod probability;

pub use emc::{
    emc_bounds, emc_extremal_families, emc_falsify, theorem_chain_check, ChainLayer, ChainReport,
    EmcBounds, FalsifyReport,
};
pub use family::{
    k_subsets, kruskal_katona_check, matching_at_least, matching_number, rainbow_matching, shadow,
    KkCheck, Matching, SetFamily, FAMILY_BUDGET,
};
pub use probability::{
    binomial, binomial_qn, binomial_tail_below, lemma9_check, poisson_below_mean, qn_bound,
    Lemma9Report, PoissonReport, QnReport, Verdict3, DEFAULT_PRECISION,
};
