//! Monte Carlo drivers for the membership and attribute experiments.
//!
//! Each trial reads from its own derived stream `(seed, scope, trial)`, so
//! results are bit-identical under any rayon worker count: the parallel
//! map preserves trial order and the aggregation consumes integer counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attribute::{
    adv_general_attribute, simulator_optimal, AttributeGuess, AttributeSchema, PublicView,
};
use crate::data::{DataPoint, Dataset, LossSpec};
use crate::dist::draw_challenge;
use crate::error::{Error, Result};
use crate::membership::{adv_bounded_loss, adv_colluding, adv_threshold, MembershipGuess};
use crate::models::{measure_split_stats, CollusionKeys, Model, SplitStats, Trainer};
use crate::reductions::{
    red_attribute_multiquery, red_attribute_uniform, AttributeOracle, MembershipOracle,
    OracleHandle,
};
use crate::rng::{scope, Stream};

use super::config::{
    AdversarySpec, AttributeAdversarySpec, ChallengeLaw, ExperimentConfig,
    MembershipAdversarySpec, SigmaGuessSource, SigmaSource,
};
use super::estimate::{branch_counts, AdvantageEstimate};

/// Everything one trial needs besides its stream.
pub(crate) struct TrialResources {
    pub s: Dataset,
    pub model: Model,
    pub split_stats: Option<SplitStats>,
    pub keys: Option<CollusionKeys>,
}

fn spec_needs_split_stats(spec: &MembershipAdversarySpec) -> bool {
    matches!(
        spec,
        MembershipAdversarySpec::Threshold {
            sigma_source: SigmaSource::Measured,
            ..
        }
    )
}

fn needs_split_stats(cfg: &ExperimentConfig) -> bool {
    match &cfg.adversary {
        AdversarySpec::Membership(spec) => spec_needs_split_stats(spec),
        AdversarySpec::Attribute(spec) => match spec {
            AttributeAdversarySpec::General {
                sigma_guess: SigmaGuessSource::Measured,
            } => true,
            AttributeAdversarySpec::UniformReduction { oracle }
            | AttributeAdversarySpec::MultiQueryReduction { oracle } => {
                spec_needs_split_stats(oracle)
            }
            _ => false,
        },
    }
}

pub(crate) fn build_resources(
    cfg: &ExperimentConfig,
    stream: &mut Stream,
) -> Result<TrialResources> {
    let s = cfg.distribution.sample_training_set(cfg.n, stream)?;
    let keys = match &cfg.trainer {
        Trainer::Colluding { keys, .. } => Some(keys.materialize()),
        _ => None,
    };
    let model = cfg.trainer.train(&s, &cfg.distribution, stream)?;
    let split_stats = if needs_split_stats(cfg) {
        Some(measure_split_stats(
            &cfg.trainer,
            &s,
            &cfg.distribution,
            &LossSpec::squared_error(),
            stream,
        )?)
    } else {
        None
    };
    Ok(TrialResources {
        s,
        model,
        split_stats,
        keys,
    })
}

/// A membership adversary with all parameters pinned for one model.
pub(crate) enum ResolvedMembership {
    ConstantZero,
    Bounded(LossSpec),
    Threshold { sigma_s: f64, sigma_d: Option<f64> },
    Colluding(CollusionKeys),
}

impl ResolvedMembership {
    pub fn guess(&self, z: &DataPoint, model: &Model, rng: &mut Stream) -> Result<MembershipGuess> {
        match self {
            ResolvedMembership::ConstantZero => Ok(MembershipGuess::member(None)),
            ResolvedMembership::Bounded(loss) => adv_bounded_loss(z, model, loss, rng),
            ResolvedMembership::Threshold { sigma_s, sigma_d } => {
                adv_threshold(z, model, *sigma_s, *sigma_d)
            }
            ResolvedMembership::Colluding(keys) => adv_colluding(z, model, keys),
        }
    }
}

impl MembershipOracle for ResolvedMembership {
    fn query(&self, z: &DataPoint, model: &Model, rng: &mut Stream) -> Result<MembershipGuess> {
        self.guess(z, model, rng)
    }
}

pub(crate) fn resolve_membership(
    spec: &MembershipAdversarySpec,
    cfg: &ExperimentConfig,
    res: &TrialResources,
) -> Result<ResolvedMembership> {
    Ok(match spec {
        MembershipAdversarySpec::ConstantZero => ResolvedMembership::ConstantZero,
        MembershipAdversarySpec::BoundedLoss { loss } => ResolvedMembership::Bounded(*loss),
        MembershipAdversarySpec::Threshold { mode, sigma_source } => {
            let (sigma_s, sigma_d) = resolve_sigmas(sigma_source, cfg, res)?;
            let sigma_d = match mode {
                crate::analytic::ThresholdMode::Known => Some(sigma_d),
                crate::analytic::ThresholdMode::Unknown => None,
            };
            ResolvedMembership::Threshold { sigma_s, sigma_d }
        }
        MembershipAdversarySpec::Colluding => {
            let keys = res.keys.clone().ok_or_else(|| {
                Error::Config("colluding adversary without colluding trainer keys".into())
            })?;
            ResolvedMembership::Colluding(keys)
        }
    })
}

fn resolve_sigmas(
    source: &SigmaSource,
    cfg: &ExperimentConfig,
    res: &TrialResources,
) -> Result<(f64, f64)> {
    match source {
        SigmaSource::Channel => match &cfg.distribution {
            crate::dist::SyntheticDistribution::IdealizedRegressionChannel {
                sigma_s,
                sigma_d,
                ..
            } => Ok((*sigma_s, *sigma_d)),
            _ => Err(Error::Config(
                "channel sigma source needs an idealized regression channel".into(),
            )),
        },
        SigmaSource::Measured => {
            let stats = res.split_stats.as_ref().ok_or_else(|| {
                Error::Config("split statistics were not computed for this run".into())
            })?;
            let es = stats.error_stats.ok_or_else(|| {
                Error::Precondition("measured sigmas need squared-error residuals".into())
            })?;
            if es.sigma_s == 0.0 {
                return Err(Error::Precondition(
                    "training residuals are exactly zero; threshold adversary undefined".into(),
                ));
            }
            Ok((es.sigma_s, es.sigma_d))
        }
        SigmaSource::Fixed { sigma_s, sigma_d } => Ok((*sigma_s, *sigma_d)),
    }
}

fn schema_for(cfg: &ExperimentConfig) -> Result<Option<AttributeSchema>> {
    if cfg.challenge_law == ChallengeLaw::ModifiedDPrime {
        Ok(Some(AttributeSchema::from_distribution(&cfg.distribution)?))
    } else {
        Ok(None)
    }
}

fn apply_challenge_law(
    law: ChallengeLaw,
    schema: Option<&AttributeSchema>,
    z: DataPoint,
) -> Result<DataPoint> {
    match law {
        ChallengeLaw::Standard => Ok(z),
        ChallengeLaw::ModifiedDPrime => {
            let schema = schema.ok_or_else(|| {
                Error::Config("modified-d-prime law needs an attribute schema".into())
            })?;
            let truth = schema.target_of(&z)?;
            Ok(schema.with_target(&schema.public_view(&z), truth))
        }
    }
}

/// Run trials in parallel with per-trial derived streams; `eval` maps one
/// challenge to a success bit given the branch coin.
fn run_trials<F>(cfg: &ExperimentConfig, trial_scope: u64, eval: F) -> Result<Vec<(u8, bool)>>
where
    F: Fn(&TrialResources, u8, DataPoint, &mut Stream) -> Result<bool> + Sync,
{
    let shared = if cfg.fresh_s_per_trial {
        None
    } else {
        let mut setup = cfg.seed.stream(scope::SETUP, 0);
        Some(build_resources(cfg, &mut setup)?)
    };
    let law_schema = schema_for(cfg)?;

    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut stream = cfg.seed.stream(trial_scope, trial as u64);
            let owned;
            let res = match &shared {
                Some(r) => r,
                None => {
                    owned = build_resources(cfg, &mut stream)?;
                    &owned
                }
            };
            let (b, z) = draw_challenge(&res.s, &cfg.distribution, &mut stream);
            let z = apply_challenge_law(cfg.challenge_law, law_schema.as_ref(), z)?;
            Ok((b, eval(res, b, z, &mut stream)?))
        })
        .collect()
}

/// The resources a fixed-split run (`fresh_s_per_trial = false`) would use:
/// the training set, the trained model, and the measured split statistics
/// when the configured adversary asks for them.
pub struct SetupSnapshot {
    pub dataset: Dataset,
    pub model: Model,
    pub split_stats: Option<SplitStats>,
}

/// Reproduce the setup of a fixed-split run without running any trials.
pub fn setup_snapshot(cfg: &ExperimentConfig) -> Result<SetupSnapshot> {
    let mut setup = cfg.seed.stream(scope::SETUP, 0);
    let res = build_resources(cfg, &mut setup)?;
    Ok(SetupSnapshot {
        dataset: res.s,
        model: res.model,
        split_stats: res.split_stats,
    })
}

/// Experiment 1: estimate the membership advantage of the configured
/// adversary. Per trial: (optionally fresh) training set and model, fair
/// coin, challenge draw, adversary guess.
pub fn run_membership_experiment(cfg: &ExperimentConfig) -> Result<AdvantageEstimate> {
    cfg.validated()?;
    let spec = match &cfg.adversary {
        AdversarySpec::Membership(spec) => spec,
        AdversarySpec::Attribute(_) => {
            return Err(Error::Config(
                "run_membership_experiment needs a membership adversary".into(),
            ))
        }
    };
    let outcomes = run_trials(cfg, scope::MEMBERSHIP_TRIAL, |res, _b, z, stream| {
        let adv = resolve_membership(spec, cfg, res)?;
        let guess = adv.guess(&z, &res.model, stream)?;
        Ok(guess.bit == 0)
    })?;
    let (c0, n0, c1, n1) = branch_counts(outcomes);
    AdvantageEstimate::from_branch_counts(c0, n0, c1, n1)
}

/// Per-trial diagnostic record: the challenge coin, the adversary's guess,
/// and its score (loss or residual magnitude), for residual-histogram
/// emission.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub b: u8,
    pub guess: u8,
    pub score: Option<f64>,
}

/// [`run_membership_experiment`] variant that also returns the per-trial
/// records. Same streams, so the estimate is identical to the plain run.
pub fn run_membership_with_scores(
    cfg: &ExperimentConfig,
) -> Result<(AdvantageEstimate, Vec<TrialRecord>)> {
    cfg.validated()?;
    let spec = match &cfg.adversary {
        AdversarySpec::Membership(spec) => spec,
        AdversarySpec::Attribute(_) => {
            return Err(Error::Config(
                "run_membership_with_scores needs a membership adversary".into(),
            ))
        }
    };
    let shared = if cfg.fresh_s_per_trial {
        None
    } else {
        let mut setup = cfg.seed.stream(scope::SETUP, 0);
        Some(build_resources(cfg, &mut setup)?)
    };
    let law_schema = schema_for(cfg)?;
    let records: Result<Vec<TrialRecord>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut stream = cfg.seed.stream(scope::MEMBERSHIP_TRIAL, trial as u64);
            let owned;
            let res = match &shared {
                Some(r) => r,
                None => {
                    owned = build_resources(cfg, &mut stream)?;
                    &owned
                }
            };
            let (b, z) = draw_challenge(&res.s, &cfg.distribution, &mut stream);
            let z = apply_challenge_law(cfg.challenge_law, law_schema.as_ref(), z)?;
            let adv = resolve_membership(spec, cfg, res)?;
            let guess = adv.guess(&z, &res.model, &mut stream)?;
            Ok(TrialRecord {
                b,
                guess: guess.bit,
                score: guess.score,
            })
        })
        .collect();
    let records = records?;
    let (c0, n0, c1, n1) = branch_counts(records.iter().map(|r| (r.b, r.guess == 0)));
    Ok((
        AdvantageEstimate::from_branch_counts(c0, n0, c1, n1)?,
        records,
    ))
}

/// Membership experiment against an externally supplied oracle (used for
/// constructed oracles and modified-advantage estimation).
pub fn run_membership_with_oracle<O: MembershipOracle>(
    cfg: &ExperimentConfig,
    oracle: &O,
) -> Result<AdvantageEstimate> {
    let outcomes = run_trials(cfg, scope::MEMBERSHIP_TRIAL, |res, _b, z, stream| {
        let guess = oracle.query(&z, &res.model, stream)?;
        Ok(guess.bit == 0)
    })?;
    let (c0, n0, c1, n1) = branch_counts(outcomes);
    AdvantageEstimate::from_branch_counts(c0, n0, c1, n1)
}

/// Attribute experiment result: the training-vs-population advantage, plus
/// the optional simulator-relative metric.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttributeExperimentResult {
    pub def5: AdvantageEstimate,
    /// Present when requested; `Err` explains why it was not computable.
    pub def6: Option<std::result::Result<AdvantageEstimate, String>>,
}

enum ResolvedAttribute {
    General { sigma_guess: f64 },
    PriorArgmax,
    UniformRed(ResolvedMembership),
    MultiRed(ResolvedMembership),
}

impl ResolvedAttribute {
    fn guess(
        &self,
        view: &PublicView,
        model: &Model,
        schema: &AttributeSchema,
        rng: &mut Stream,
    ) -> Result<AttributeGuess> {
        match self {
            ResolvedAttribute::General { sigma_guess } => {
                adv_general_attribute(view, model, schema, *sigma_guess)
            }
            ResolvedAttribute::PriorArgmax => {
                let mut best = 0;
                for i in 1..schema.m() {
                    if schema.prior[i] > schema.prior[best] {
                        best = i;
                    }
                }
                Ok(AttributeGuess {
                    value: Some(schema.targets[best]),
                    posterior_scores: schema.prior.clone(),
                })
            }
            ResolvedAttribute::UniformRed(inner) => {
                let handle = OracleHandle::new(inner);
                red_attribute_uniform(view, model, &handle, schema, rng)
            }
            ResolvedAttribute::MultiRed(inner) => {
                let handle = OracleHandle::new(inner);
                red_attribute_multiquery(view, model, &handle, schema, rng)
            }
        }
    }
}

fn resolve_attribute(
    spec: &AttributeAdversarySpec,
    cfg: &ExperimentConfig,
    res: &TrialResources,
) -> Result<ResolvedAttribute> {
    Ok(match spec {
        AttributeAdversarySpec::General { sigma_guess } => {
            let sigma_guess = match sigma_guess {
                SigmaGuessSource::Channel => match &cfg.distribution {
                    crate::dist::SyntheticDistribution::IdealizedRegressionChannel {
                        sigma_s,
                        ..
                    } => *sigma_s,
                    _ => {
                        return Err(Error::Config(
                            "channel sigma-guess needs an idealized regression channel".into(),
                        ))
                    }
                },
                SigmaGuessSource::Measured => {
                    let stats = res.split_stats.as_ref().and_then(|s| s.error_stats);
                    let es = stats.ok_or_else(|| {
                        Error::Precondition("measured sigma-guess needs residual stats".into())
                    })?;
                    if es.sigma_s == 0.0 {
                        return Err(Error::Precondition(
                            "training residuals are exactly zero; sigma-guess undefined".into(),
                        ));
                    }
                    es.sigma_s
                }
                SigmaGuessSource::Fixed { sigma } => *sigma,
            };
            ResolvedAttribute::General { sigma_guess }
        }
        AttributeAdversarySpec::PriorArgmax => ResolvedAttribute::PriorArgmax,
        AttributeAdversarySpec::UniformReduction { oracle } => {
            ResolvedAttribute::UniformRed(resolve_membership(oracle, cfg, res)?)
        }
        AttributeAdversarySpec::MultiQueryReduction { oracle } => {
            ResolvedAttribute::MultiRed(resolve_membership(oracle, cfg, res)?)
        }
    })
}

fn simulator_supported(d: &crate::dist::SyntheticDistribution) -> bool {
    use crate::dist::SyntheticDistribution as D;
    match d {
        D::FiniteClassification { .. } => true,
        D::GaussianLinear { attribute, .. } => attribute.is_some(),
        D::IdealizedRegressionChannel { attribute, .. } => attribute.is_some(),
        D::IdealizedClassificationChannel { .. } => false,
    }
}

/// Experiment 2: estimate the attribute advantage of the configured
/// adversary; optionally also the simulator-relative metric, whose
/// population branch replaces the adversary with the Bayes-optimal
/// simulator.
pub fn run_attribute_experiment(
    cfg: &ExperimentConfig,
    schema: &AttributeSchema,
) -> Result<AttributeExperimentResult> {
    cfg.validated()?;
    let spec = match &cfg.adversary {
        AdversarySpec::Attribute(spec) => spec,
        AdversarySpec::Membership(_) => {
            return Err(Error::Config(
                "run_attribute_experiment needs an attribute adversary".into(),
            ))
        }
    };
    let want_def6 = cfg.def6_metric;
    let def6_supported = simulator_supported(&cfg.distribution);

    // (b, adversary correct, simulator correct on the b = 1 branch)
    let outcomes: Vec<(u8, bool, Option<bool>)> = {
        let results: Result<Vec<_>> = run_trials_attr(cfg, schema, spec, want_def6 && def6_supported);
        results?
    };

    let (c0, n0, c1, n1) = branch_counts(outcomes.iter().map(|(b, ok, _)| (*b, *ok)));
    let def5 = AdvantageEstimate::from_branch_counts(c0, n0, c1, n1)?;

    let def6 = if !want_def6 {
        None
    } else if !def6_supported {
        Some(Err(
            "Bayes simulator has no conditional for this distribution kind".to_string(),
        ))
    } else {
        let (sim_c1, sim_n1) = outcomes
            .iter()
            .filter_map(|(_, _, sim)| *sim)
            .fold((0u64, 0u64), |(c, n), ok| (c + u64::from(ok), n + 1));
        Some(
            AdvantageEstimate::from_branch_counts(c0, n0, sim_c1, sim_n1)
                .map_err(|e| e.to_string()),
        )
    };

    Ok(AttributeExperimentResult { def5, def6 })
}

fn run_trials_attr(
    cfg: &ExperimentConfig,
    schema: &AttributeSchema,
    spec: &AttributeAdversarySpec,
    run_simulator: bool,
) -> Result<Vec<(u8, bool, Option<bool>)>> {
    let shared = if cfg.fresh_s_per_trial {
        None
    } else {
        let mut setup = cfg.seed.stream(scope::SETUP, 0);
        Some(build_resources(cfg, &mut setup)?)
    };
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut stream = cfg.seed.stream(scope::ATTRIBUTE_TRIAL, trial as u64);
            let owned;
            let res = match &shared {
                Some(r) => r,
                None => {
                    owned = build_resources(cfg, &mut stream)?;
                    &owned
                }
            };
            let (b, z) = draw_challenge(&res.s, &cfg.distribution, &mut stream);
            let truth = schema.target_of(&z)?;
            let view = schema.public_view(&z);
            let adv = resolve_attribute(spec, cfg, res)?;
            let guess = adv.guess(&view, &res.model, schema, &mut stream)?;
            let correct = guess.value == Some(truth);
            let sim_correct = if run_simulator && b == 1 {
                let sim = simulator_optimal(&view, &cfg.distribution, schema)?;
                Some(sim.value == Some(truth))
            } else {
                None
            };
            Ok((b, correct, sim_correct))
        })
        .collect()
}

/// Attribute experiment driven by an externally supplied membership oracle
/// through the uniform or multi-query reduction.
pub fn run_attribute_reduction_with_oracle<O: MembershipOracle>(
    cfg: &ExperimentConfig,
    schema: &AttributeSchema,
    oracle: &O,
    multi_query: bool,
) -> Result<AdvantageEstimate> {
    let outcomes = run_trials(cfg, scope::ATTRIBUTE_TRIAL, |res, _b, z, stream| {
        let truth = schema.target_of(&z)?;
        let view = schema.public_view(&z);
        let handle = OracleHandle::new(oracle);
        let guess = if multi_query {
            red_attribute_multiquery(&view, &res.model, &handle, schema, stream)?
        } else {
            red_attribute_uniform(&view, &res.model, &handle, schema, stream)?
        };
        Ok(guess.value == Some(truth))
    })?;
    let (c0, n0, c1, n1) = branch_counts(outcomes);
    AdvantageEstimate::from_branch_counts(c0, n0, c1, n1)
}

/// Paired evaluation of the membership-from-attribute reduction and its
/// oracle: one oracle query per trial feeds both estimators, so the
/// reduction's membership advantage and the oracle's attribute advantage
/// are computed from the same outcome vector and are equal exactly, not
/// just statistically.
#[derive(Clone, Debug)]
pub struct PairedReductionOutcome {
    pub reduction_estimate: AdvantageEstimate,
    pub oracle_estimate: AdvantageEstimate,
    pub coin: Vec<u8>,
    pub oracle_correct: Vec<bool>,
    /// Experiment success of the reduction (`guess == b`); equals
    /// `oracle_correct XOR (b == 1)` trial by trial.
    pub reduction_success: Vec<bool>,
}

pub fn run_paired_membership_from_attribute<O: AttributeOracle>(
    cfg: &ExperimentConfig,
    schema: &AttributeSchema,
    oracle: &O,
) -> Result<PairedReductionOutcome> {
    // one oracle query per trial, issued by the reduction itself; the
    // reduction's guess bit doubles as the oracle-correctness record since
    // the reduction claims membership exactly when the oracle was right
    let rows: Vec<(u8, u8)> = run_trials_raw(cfg, scope::MEMBERSHIP_TRIAL, |res, z, stream| {
        let handle = OracleHandle::new(oracle);
        let guess =
            crate::reductions::red_membership_from_attribute(&z, &res.model, &handle, schema, stream)?;
        Ok(guess.bit)
    })?;

    let coin: Vec<u8> = rows.iter().map(|(b, _)| *b).collect();
    let oracle_correct: Vec<bool> = rows.iter().map(|(_, bit)| *bit == 0).collect();
    let reduction_success: Vec<bool> = rows.iter().map(|(b, bit)| bit == b).collect();

    let mem_counts = branch_counts(rows.iter().map(|(b, bit)| (*b, *bit == 0)));
    let reduction_estimate =
        AdvantageEstimate::from_branch_counts(mem_counts.0, mem_counts.1, mem_counts.2, mem_counts.3)?;
    let attr_counts = branch_counts(coin.iter().zip(&oracle_correct).map(|(b, ok)| (*b, *ok)));
    let oracle_estimate =
        AdvantageEstimate::from_branch_counts(attr_counts.0, attr_counts.1, attr_counts.2, attr_counts.3)?;

    Ok(PairedReductionOutcome {
        reduction_estimate,
        oracle_estimate,
        coin,
        oracle_correct,
        reduction_success,
    })
}

/// Like [`run_trials`] but records the raw guess bit instead of a success
/// predicate.
fn run_trials_raw<F>(cfg: &ExperimentConfig, trial_scope: u64, eval: F) -> Result<Vec<(u8, u8)>>
where
    F: Fn(&TrialResources, DataPoint, &mut Stream) -> Result<u8> + Sync,
{
    let shared = if cfg.fresh_s_per_trial {
        None
    } else {
        let mut setup = cfg.seed.stream(scope::SETUP, 0);
        Some(build_resources(cfg, &mut setup)?)
    };
    let law_schema = schema_for(cfg)?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut stream = cfg.seed.stream(trial_scope, trial as u64);
            let owned;
            let res = match &shared {
                Some(r) => r,
                None => {
                    owned = build_resources(cfg, &mut stream)?;
                    &owned
                }
            };
            let (b, z) = draw_challenge(&res.s, &cfg.distribution, &mut stream);
            let z = apply_challenge_law(cfg.challenge_law, law_schema.as_ref(), z)?;
            Ok((b, eval(res, z, &mut stream)?))
        })
        .collect()
}
