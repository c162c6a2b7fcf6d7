//! Critical-threshold experiments: exhaustive search over profiles of
//! monotone 0/1 valuations, integer-program export, and named instances.

mod lp;
mod named;
mod search;

pub use lp::{expected_lp_counts, export_ip, lp_counts, render_lp, LpCounts, LP_ROW_BUDGET};
pub use named::{
    equal_size_gap_report, generate_named_instance, GapReport, NamedParams, NAMED_INSTANCES,
};
pub use search::{
    budget, search_counterexample, ExhaustionCertificate, SearchOutcome, SearchSpec, Witness,
};
