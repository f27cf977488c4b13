//! Parameter sweeps pairing Monte Carlo estimates with analytic curves.

use serde::{Deserialize, Serialize};

use crate::analytic::{
    bound_dp_advantage, curve_attribute_general, curve_membership_bounded,
    curve_membership_threshold, expected_colluding_advantage, CurveId, CurvePoint,
};
use crate::attribute::AttributeSchema;
use crate::dist::SyntheticDistribution;
use crate::error::{Error, Result};
use crate::models::Trainer;

use super::config::{
    AdversarySpec, AttributeAdversarySpec, ExperimentConfig, MembershipAdversarySpec,
};
use super::estimate::AdvantageEstimate;
use super::mu::estimate_mu;
use super::run::{run_attribute_experiment, run_membership_experiment};

/// One knob change relative to the base configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "parameter", content = "value", rename_all = "kebab-case")]
pub enum SweepDelta {
    /// Set `sigma_D = ratio * sigma_S` on the regression channel.
    ChannelRatio(f64),
    /// Set the attribute influence `tau`.
    ChannelTau(f64),
    RidgeLambda(f64),
    TreeMaxDepth(Option<u32>),
    DpEpsilon(f64),
    SampleSize(usize),
    /// Set the classification channel's `(p_S, p_D)`.
    ClassificationRates { p_s: f64, p_d: f64 },
}

impl SweepDelta {
    fn abscissa(&self, cfg: &ExperimentConfig) -> f64 {
        match self {
            SweepDelta::ChannelRatio(r) => *r,
            SweepDelta::ChannelTau(t) => *t,
            SweepDelta::RidgeLambda(l) => *l,
            SweepDelta::TreeMaxDepth(d) => d.map_or(f64::INFINITY, f64::from),
            SweepDelta::DpEpsilon(e) => *e,
            SweepDelta::SampleSize(n) => *n as f64,
            SweepDelta::ClassificationRates { p_s, p_d } => {
                let _ = cfg;
                p_d - p_s
            }
        }
    }

    fn label(&self) -> &'static str {
        match self {
            SweepDelta::ChannelRatio(_) => "sigma_d_over_sigma_s",
            SweepDelta::ChannelTau(_) => "tau",
            SweepDelta::RidgeLambda(_) => "lambda",
            SweepDelta::TreeMaxDepth(_) => "max_depth",
            SweepDelta::DpEpsilon(_) => "dp_epsilon",
            SweepDelta::SampleSize(_) => "n",
            SweepDelta::ClassificationRates { .. } => "r_gen",
        }
    }

    fn apply(&self, base: &ExperimentConfig) -> Result<ExperimentConfig> {
        let mut cfg = base.clone();
        match self {
            SweepDelta::ChannelRatio(ratio) => match &mut cfg.distribution {
                SyntheticDistribution::IdealizedRegressionChannel {
                    sigma_s, sigma_d, ..
                } => {
                    if !(*ratio >= 1.0) {
                        return Err(Error::Config(format!(
                            "channel ratio must be >= 1, got {ratio}"
                        )));
                    }
                    *sigma_d = *ratio * *sigma_s;
                }
                _ => {
                    return Err(Error::Config(
                        "channel-ratio delta needs an idealized regression channel".into(),
                    ))
                }
            },
            SweepDelta::ChannelTau(tau) => match &mut cfg.distribution {
                SyntheticDistribution::IdealizedRegressionChannel {
                    attribute: Some(a), ..
                }
                | SyntheticDistribution::GaussianLinear {
                    attribute: Some(a), ..
                } => a.tau = *tau,
                _ => {
                    return Err(Error::Config(
                        "tau delta needs a distribution with a sensitive attribute".into(),
                    ))
                }
            },
            SweepDelta::RidgeLambda(lambda) => match &mut cfg.trainer {
                Trainer::Ridge { lambda: l } => *l = *lambda,
                _ => return Err(Error::Config("lambda delta needs the ridge trainer".into())),
            },
            SweepDelta::TreeMaxDepth(depth) => match &mut cfg.trainer {
                Trainer::Tree { max_depth, .. } => *max_depth = *depth,
                _ => return Err(Error::Config("depth delta needs the tree trainer".into())),
            },
            SweepDelta::DpEpsilon(eps) => match &mut cfg.trainer {
                Trainer::DpFinite { dp_epsilon, .. } => *dp_epsilon = *eps,
                _ => {
                    return Err(Error::Config(
                        "dp-epsilon delta needs the dp-finite trainer".into(),
                    ))
                }
            },
            SweepDelta::SampleSize(n) => cfg.n = *n,
            SweepDelta::ClassificationRates { p_s, p_d } => match &mut cfg.distribution {
                SyntheticDistribution::IdealizedClassificationChannel {
                    p_s: ps, p_d: pd,
                } => {
                    *ps = *p_s;
                    *pd = *p_d;
                }
                _ => {
                    return Err(Error::Config(
                        "classification-rates delta needs the classification channel".into(),
                    ))
                }
            },
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepRow {
    pub abscissa: f64,
    pub parameter: String,
    pub estimate: Option<AdvantageEstimate>,
    pub analytic: Option<CurvePoint>,
    /// Reference ceiling `1 - mu(n, D)` on membership advantage.
    pub max_advantage_cap: Option<f64>,
    /// Per-cell failure, recorded without aborting the sweep.
    pub error: Option<String>,
}

/// Trials spent estimating `mu` for the advantage-cap reference line.
const MU_CAP_TRIALS: usize = 10_000;

/// Run every configuration in the grid, join each estimate with its
/// matching analytic curve where one exists, and return rows sorted by
/// abscissa. Per-cell failures are recorded in the row.
pub fn sweep(base: &ExperimentConfig, grid: &[SweepDelta]) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid must be nonempty".into()));
    }
    let mut rows: Vec<SweepRow> = grid
        .iter()
        .enumerate()
        .map(|(i, delta)| {
            let mut row = SweepRow {
                abscissa: f64::NAN,
                parameter: delta.label().to_string(),
                estimate: None,
                analytic: None,
                max_advantage_cap: None,
                error: None,
            };
            match delta.apply(base) {
                Ok(mut cfg) => {
                    cfg.seed = base.seed.child(i as u64);
                    row.abscissa = delta.abscissa(&cfg);
                    match run_cell(&cfg) {
                        Ok(estimate) => row.estimate = Some(estimate),
                        Err(e) => row.error = Some(e.to_string()),
                    }
                    match analytic_reference(&cfg, delta, row.abscissa) {
                        Ok(point) => row.analytic = point,
                        Err(e) => {
                            if row.error.is_none() {
                                row.error = Some(e.to_string());
                            }
                        }
                    }
                    if matches!(cfg.adversary, AdversarySpec::Membership(_)) {
                        row.max_advantage_cap =
                            estimate_mu(&cfg.distribution, cfg.n, MU_CAP_TRIALS, cfg.seed.child(u64::MAX - 1))
                                .ok()
                                .map(|m| crate::analytic::max_advantage_cap(m.mu));
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect();
    rows.sort_by(|a, b| a.abscissa.partial_cmp(&b.abscissa).unwrap_or(std::cmp::Ordering::Equal));
    Ok(rows)
}

fn run_cell(cfg: &ExperimentConfig) -> Result<AdvantageEstimate> {
    match &cfg.adversary {
        AdversarySpec::Membership(_) => run_membership_experiment(cfg),
        AdversarySpec::Attribute(_) => {
            let schema = AttributeSchema::from_distribution(&cfg.distribution)?;
            Ok(run_attribute_experiment(cfg, &schema)?.def5)
        }
    }
}

/// The analytic curve matching a sweep cell, when the (adversary,
/// distribution, delta) combination has a closed form.
fn analytic_reference(
    cfg: &ExperimentConfig,
    delta: &SweepDelta,
    abscissa: f64,
) -> Result<Option<CurvePoint>> {
    match (&cfg.adversary, &cfg.distribution) {
        (
            AdversarySpec::Membership(MembershipAdversarySpec::Threshold { mode, .. }),
            SyntheticDistribution::IdealizedRegressionChannel {
                sigma_s, sigma_d, ..
            },
        ) => {
            let ratio = sigma_d / sigma_s;
            let value = curve_membership_threshold(ratio, *mode)?;
            let id = match mode {
                crate::analytic::ThresholdMode::Known => CurveId::MembershipThresholdKnown,
                crate::analytic::ThresholdMode::Unknown => CurveId::MembershipThresholdUnknown,
            };
            Ok(Some(CurvePoint::new(abscissa, value, id)))
        }
        (
            AdversarySpec::Membership(MembershipAdversarySpec::BoundedLoss { loss }),
            SyntheticDistribution::IdealizedClassificationChannel { p_s, p_d },
        ) => {
            let value = curve_membership_bounded(p_d - p_s, loss.bound)?;
            Ok(Some(CurvePoint::new(
                abscissa,
                value,
                CurveId::MembershipBounded,
            )))
        }
        (
            AdversarySpec::Attribute(AttributeAdversarySpec::General { .. }),
            SyntheticDistribution::IdealizedRegressionChannel {
                sigma_s,
                sigma_d,
                attribute: Some(attr),
            },
        ) => {
            let schema = AttributeSchema::new(attr.targets.clone(), attr.prior.clone())?;
            let predictions: Vec<f64> = attr.targets.iter().map(|t| attr.tau * t).collect();
            // the channel-published sigma_S is the adversary's density guess
            let value =
                curve_attribute_general(&schema, &predictions, *sigma_s, *sigma_d, *sigma_s)?;
            Ok(Some(CurvePoint::new(
                abscissa,
                value,
                CurveId::AttributeGeneral,
            )))
        }
        (AdversarySpec::Membership(MembershipAdversarySpec::BoundedLoss { .. }), _)
            if matches!(delta, SweepDelta::DpEpsilon(_)) =>
        {
            let value = bound_dp_advantage(abscissa)?;
            Ok(Some(CurvePoint::new(abscissa, value, CurveId::DpBound)))
        }
        (
            AdversarySpec::Membership(MembershipAdversarySpec::Colluding),
            _,
        ) => {
            if let Trainer::Colluding { keys, .. } = &cfg.trainer {
                let mu = estimate_mu(&cfg.distribution, cfg.n, 10_000, cfg.seed.child(u64::MAX))?;
                let value =
                    expected_colluding_advantage(keys.m_bits, keys.k as u32, mu.mu)?;
                Ok(Some(CurvePoint::new(
                    abscissa,
                    value,
                    CurveId::ColludingExpected,
                )))
            } else {
                Ok(None)
            }
        }
        _ => Ok(None),
    }
}
