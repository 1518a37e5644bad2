//! Monte-Carlo engine for the delayed-access protocol.
//!
//! Each trial draws a Poisson field of small cells around a UE at the
//! origin, resolves the access event and samples the SINR of the resulting
//! link under Rayleigh fading.

mod access;
mod estimate;
mod field;
mod ks;

pub use access::{resolve_access, sample_sinr, sinr_against, AccessOutcome};
pub use estimate::{
    coverage_from_records, estimate_conditional_coverage, estimate_coverage, estimate_rate, rate_from_records, run_trials, trial_rng,
    Estimate, InterferenceModel, SimOptions, TrialRecord, Z95, Z99,
};
pub use field::{default_r_sim, reference_radius, sample_field, Cell, CellField, CellMode};
pub use ks::{kolmogorov_survival, ks_p_value, ks_statistic, ks_test, KsResult};
