//! Allocation algorithms and maximin-share machinery.

mod bernoulli;
mod exhaustive;
mod intersection;
mod mms;
mod round_robin;

pub use bernoulli::{bernoulli_deviation_check, proportional_quantile_check, DeviationCheck};
pub use exhaustive::{
    allocation_budget, exhaustive_fair_allocation, maximin_satisfaction_allocation,
    maximin_satisfaction_with_sizes, set_allocation_budget, CoverClass, FairSearch,
    InfeasibilityCertificate, MaximinResult, DEFAULT_ALLOCATION_BUDGET,
};
pub(crate) use exhaustive::{check_allocation_budget, first_acceptable, Acceptance};
pub use intersection::{edmonds_certificate, matroid_intersection, EdmondsCertificate};
pub use mms::{matroid_mms, mms_brute_force, mms_quantile, mms_value, MmsResult, MMS_PARTITION_BUDGET};
pub use round_robin::round_robin;
