//! Experiment configuration and validation.

use serde::{Deserialize, Serialize};

use crate::analytic::ThresholdMode;
use crate::data::LossSpec;
use crate::dist::SyntheticDistribution;
use crate::error::{Error, Result};
use crate::models::Trainer;
use crate::rng::MasterSeed;

/// Which law the challenge point follows on top of the standard experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChallengeLaw {
    /// `z ~ S` or `z ~ D` as drawn.
    Standard,
    /// Post-process the challenge through the public view: reconstruct
    /// `phi_inverse(phi(z))` and restore the true target. Used to estimate
    /// the modified membership advantage.
    ModifiedDPrime,
}

/// Where the threshold adversary's sigmas come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum SigmaSource {
    /// Read the configured `(sigma_S, sigma_D)` off the idealized channel.
    Channel,
    /// Measure on the trained split: `sigma_S = sqrt(R_emp)`,
    /// `sigma_D = sqrt(R_cv)` (leave-one-out).
    Measured,
    Fixed { sigma_s: f64, sigma_d: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum SigmaGuessSource {
    /// The channel's `sigma_S` (the published training error).
    Channel,
    /// `sqrt(R_emp)` of the trained split.
    Measured,
    Fixed { sigma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MembershipAdversarySpec {
    /// Always claims "member"; advantage 0 baseline.
    ConstantZero,
    BoundedLoss {
        loss: LossSpec,
    },
    Threshold {
        mode: ThresholdMode,
        sigma_source: SigmaSource,
    },
    /// Uses the keys of the colluding trainer in the same config.
    Colluding,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AttributeAdversarySpec {
    General {
        sigma_guess: SigmaGuessSource,
    },
    /// Ignores the model and always answers the prior argmax.
    PriorArgmax,
    UniformReduction {
        oracle: Box<MembershipAdversarySpec>,
    },
    MultiQueryReduction {
        oracle: Box<MembershipAdversarySpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum AdversarySpec {
    Membership(MembershipAdversarySpec),
    Attribute(AttributeAdversarySpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub distribution: SyntheticDistribution,
    pub n: usize,
    pub trainer: Trainer,
    pub adversary: AdversarySpec,
    pub trials: usize,
    pub seed: MasterSeed,
    /// `true`: redraw `S` and retrain every trial (the definitional
    /// expectation over `S`); `false`: one training set for all trials (the
    /// fixed-split methodology).
    #[serde(default = "default_true")]
    pub fresh_s_per_trial: bool,
    #[serde(default = "default_challenge_law")]
    pub challenge_law: ChallengeLaw,
    /// Also report the simulator-relative metric on attribute runs.
    #[serde(default)]
    pub def6_metric: bool,
}

fn default_true() -> bool {
    true
}

fn default_challenge_law() -> ChallengeLaw {
    ChallengeLaw::Standard
}

/// Minimum trials for the normal-approximation confidence intervals.
pub const MIN_TRIALS: usize = 100;

impl ExperimentConfig {
    /// Reject bad configurations before any trial runs. Returns every
    /// violation found, not just the first.
    pub fn validate(&self) -> std::result::Result<(), Vec<String>> {
        let mut problems = Vec::new();
        if let Err(e) = self.distribution.validate() {
            problems.push(e.to_string());
        }
        if self.n == 0 {
            problems.push("n must be >= 1".into());
        }
        if self.trials < MIN_TRIALS {
            problems.push(format!(
                "trials = {} too low for CI validity (minimum {MIN_TRIALS})",
                self.trials
            ));
        }
        match &self.adversary {
            AdversarySpec::Membership(spec) => {
                self.check_membership_spec(spec, &mut problems);
                if self.def6_metric {
                    problems
                        .push("def6-metric applies only to attribute experiments".into());
                }
            }
            AdversarySpec::Attribute(spec) => {
                if self.distribution.attribute().is_none() {
                    problems.push(
                        "attribute experiment needs a distribution with a sensitive attribute"
                            .into(),
                    );
                }
                if self.challenge_law == ChallengeLaw::ModifiedDPrime {
                    problems.push(
                        "modified-d-prime challenge law applies to membership experiments".into(),
                    );
                }
                match spec {
                    AttributeAdversarySpec::UniformReduction { oracle }
                    | AttributeAdversarySpec::MultiQueryReduction { oracle } => {
                        self.check_membership_spec(oracle, &mut problems);
                    }
                    AttributeAdversarySpec::General { sigma_guess } => {
                        if matches!(sigma_guess, SigmaGuessSource::Channel)
                            && !matches!(
                                self.distribution,
                                SyntheticDistribution::IdealizedRegressionChannel { .. }
                            )
                        {
                            problems.push(
                                "channel sigma-guess needs an idealized regression channel".into(),
                            );
                        }
                    }
                    AttributeAdversarySpec::PriorArgmax => {}
                }
            }
        }
        if self.challenge_law == ChallengeLaw::ModifiedDPrime
            && self.distribution.attribute().is_none()
        {
            problems.push("modified-d-prime challenge law needs a sensitive attribute".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems)
        }
    }

    fn check_membership_spec(&self, spec: &MembershipAdversarySpec, problems: &mut Vec<String>) {
        match spec {
            MembershipAdversarySpec::ConstantZero => {}
            MembershipAdversarySpec::BoundedLoss { loss } => {
                if !loss.is_bounded() {
                    problems.push("bounded-loss adversary requires a finite loss bound".into());
                }
            }
            MembershipAdversarySpec::Threshold { mode, sigma_source } => {
                match sigma_source {
                    SigmaSource::Channel => {
                        match &self.distribution {
                            SyntheticDistribution::IdealizedRegressionChannel {
                                sigma_s,
                                sigma_d,
                                ..
                            } => {
                                if *mode == ThresholdMode::Known && sigma_d < sigma_s {
                                    problems.push(format!(
                                        "known-sigma threshold needs sigma_D >= sigma_S, channel has ({sigma_s}, {sigma_d})"
                                    ));
                                }
                            }
                            _ => problems.push(
                                "channel sigma source needs an idealized regression channel"
                                    .into(),
                            ),
                        }
                    }
                    SigmaSource::Fixed { sigma_s, sigma_d } => {
                        if !(*sigma_s > 0.0) {
                            problems.push("fixed sigma_S must be > 0".into());
                        }
                        if *mode == ThresholdMode::Known && sigma_d < sigma_s {
                            problems.push(
                                "known-sigma threshold needs sigma_D >= sigma_S".into(),
                            );
                        }
                    }
                    SigmaSource::Measured => {}
                }
                if matches!(
                    self.distribution,
                    SyntheticDistribution::IdealizedClassificationChannel { .. }
                ) {
                    problems.push(
                        "threshold adversary is regression-only; classification channel refused"
                            .into(),
                    );
                }
            }
            MembershipAdversarySpec::Colluding => {
                if !matches!(self.trainer, Trainer::Colluding { .. }) {
                    problems.push("colluding adversary requires the colluding trainer".into());
                }
            }
        }
    }

    /// `validate` folded into a single config error.
    pub fn validated(&self) -> Result<()> {
        self.validate()
            .map_err(|problems| Error::Config(problems.join("; ")))
    }
}
