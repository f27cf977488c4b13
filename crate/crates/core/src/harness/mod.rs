//! Monte Carlo drivers for the membership and attribute experiments,
//! advantage estimation with uncertainty, and parameter sweeps.

mod audit;
mod config;
mod estimate;
mod mu;
mod run;
mod sweep;

pub use audit::{audit_dp_bound, DpAuditRow};
pub use config::{
    AdversarySpec, AttributeAdversarySpec, ChallengeLaw, ExperimentConfig,
    MembershipAdversarySpec, SigmaGuessSource, SigmaSource, MIN_TRIALS,
};
pub use estimate::{branch_counts, AdvantageEstimate};
pub use mu::{estimate_mu, MuEstimate, MuMethod};
pub use run::{
    run_attribute_experiment, run_attribute_reduction_with_oracle, run_membership_experiment,
    run_membership_with_oracle, run_membership_with_scores,
    run_paired_membership_from_attribute, setup_snapshot, AttributeExperimentResult,
    PairedReductionOutcome, SetupSnapshot, TrialRecord,
};
pub use sweep::{sweep, SweepDelta, SweepRow};
