//! Auditing the differential-privacy advantage bound.

use serde::{Deserialize, Serialize};

use crate::analytic::bound_dp_advantage;
use crate::error::{Error, Result};
use crate::models::Trainer;

use super::config::{AdversarySpec, ExperimentConfig, MembershipAdversarySpec};
use super::estimate::AdvantageEstimate;
use super::run::run_membership_experiment;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DpAuditRow {
    /// The epsilon the trainer is labeled with (and, for the dp-finite
    /// trainer, actually run at).
    pub epsilon: f64,
    pub estimate: AdvantageEstimate,
    /// `e^epsilon - 1`.
    pub bound: f64,
    /// Empirical advantage exceeds the bound by more than three standard
    /// errors: the label is not credible.
    pub violation: bool,
}

/// For each labeled epsilon, measure the configured adversary's advantage
/// and compare against `e^eps - 1`. A dp-finite trainer is re-parameterized
/// to each epsilon; any other trainer keeps its behavior, which is exactly
/// the mislabeled-trainer scenario the violation flag exists for.
pub fn audit_dp_bound(base: &ExperimentConfig, epsilons: &[f64]) -> Result<Vec<DpAuditRow>> {
    if epsilons.is_empty() {
        return Err(Error::Config("audit needs at least one epsilon".into()));
    }
    if !matches!(
        base.adversary,
        AdversarySpec::Membership(MembershipAdversarySpec::BoundedLoss { .. })
    ) {
        return Err(Error::Config(
            "dp audit uses the bounded-loss adversary".into(),
        ));
    }
    epsilons
        .iter()
        .enumerate()
        .map(|(i, &epsilon)| {
            let mut cfg = base.clone();
            cfg.seed = base.seed.child(i as u64);
            if let Trainer::DpFinite { dp_epsilon, .. } = &mut cfg.trainer {
                *dp_epsilon = epsilon;
            }
            let estimate = run_membership_experiment(&cfg)?;
            let bound = bound_dp_advantage(epsilon)?;
            Ok(DpAuditRow {
                epsilon,
                estimate,
                bound,
                violation: estimate.value > bound + 3.0 * estimate.stderr,
            })
        })
        .collect()
}
