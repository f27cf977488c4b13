//! Repeated random train/test splits of a fixed dataset: train on one side,
//! compare the adversary's rates on training members against held-out rows,
//! and average the advantage over the splits.

use serde::{Deserialize, Serialize};

use leakbench_core::analytic::ThresholdMode;
use leakbench_core::attribute::{adv_general_attribute, AttributeSchema};
use leakbench_core::harness::{
    AdversarySpec, AttributeAdversarySpec, MembershipAdversarySpec, SigmaGuessSource, SigmaSource,
};
use leakbench_core::membership::{adv_bounded_loss, adv_threshold};
use leakbench_core::models::{measure_split_stats, Model};
use leakbench_core::{
    Dataset, Error, Provenance, Result, Stream, SyntheticDistribution,
};

use crate::config::DatasetSection;
use crate::csv_load::LoadReport;

const SPLIT_SCOPE: u64 = 100;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitOutcome {
    /// Mean advantage over the splits.
    pub advantage: f64,
    /// Standard error of the mean over splits.
    pub stderr: f64,
    pub repeats: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Mean measured overfitting ratio `sqrt(R_cv) / sqrt(R_emp)` across
    /// splits, when the threshold adversary measured it.
    pub mean_ratio: Option<f64>,
    pub per_repeat: Vec<f64>,
}

fn shuffled_indices(n: usize, rng: &mut Stream) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}

fn subset(data: &Dataset, idx: &[usize]) -> Result<Dataset> {
    Dataset::new(
        idx.iter().map(|&i| data.point(i).clone()).collect(),
        Provenance::Csv,
    )
}

enum SplitAdversary {
    Membership(MembershipAdversarySpec),
    Attribute {
        spec: AttributeAdversarySpec,
        schema: AttributeSchema,
    },
}

/// Rate at which the adversary answers "member" (membership) or answers
/// correctly (attribute) over a set of points.
fn success_rate(
    adversary: &SplitAdversary,
    points: &Dataset,
    model: &Model,
    sigmas: Option<(f64, f64)>,
    rng: &mut Stream,
) -> Result<f64> {
    let mut hits = 0usize;
    for z in points.points() {
        let ok = match adversary {
            SplitAdversary::Membership(spec) => {
                let guess = match spec {
                    MembershipAdversarySpec::ConstantZero => {
                        leakbench_core::membership::MembershipGuess::member(None)
                    }
                    MembershipAdversarySpec::BoundedLoss { loss } => {
                        adv_bounded_loss(z, model, loss, rng)?
                    }
                    MembershipAdversarySpec::Threshold { mode, .. } => {
                        let (sigma_s, sigma_d) = sigmas.ok_or_else(|| {
                            Error::Config("threshold adversary needs measured sigmas".into())
                        })?;
                        let sd = match mode {
                            ThresholdMode::Known => Some(sigma_d),
                            ThresholdMode::Unknown => None,
                        };
                        adv_threshold(z, model, sigma_s, sd)?
                    }
                    MembershipAdversarySpec::Colluding => {
                        return Err(Error::Config(
                            "colluding adversary is not available in split mode".into(),
                        ))
                    }
                };
                guess.bit == 0
            }
            SplitAdversary::Attribute { spec, schema } => {
                let truth = schema.target_of(z)?;
                let view = schema.public_view(z);
                let guess = match spec {
                    AttributeAdversarySpec::General { sigma_guess } => {
                        let sigma = match sigma_guess {
                            SigmaGuessSource::Measured => {
                                sigmas
                                    .ok_or_else(|| {
                                        Error::Config(
                                            "measured sigma-guess needs split stats".into(),
                                        )
                                    })?
                                    .0
                            }
                            SigmaGuessSource::Fixed { sigma } => *sigma,
                            SigmaGuessSource::Channel => {
                                return Err(Error::Config(
                                    "channel sigma-guess is not available in split mode".into(),
                                ))
                            }
                        };
                        adv_general_attribute(&view, model, schema, sigma)?
                    }
                    _ => {
                        return Err(Error::Config(
                            "split mode supports the general attribute adversary only".into(),
                        ))
                    }
                };
                guess.value == Some(truth)
            }
        };
        hits += usize::from(ok);
    }
    Ok(hits as f64 / points.len() as f64)
}

fn needs_measured_sigmas(spec: &AdversarySpec) -> bool {
    matches!(
        spec,
        AdversarySpec::Membership(MembershipAdversarySpec::Threshold {
            sigma_source: SigmaSource::Measured,
            ..
        }) | AdversarySpec::Attribute(AttributeAdversarySpec::General {
            sigma_guess: SigmaGuessSource::Measured,
        })
    )
}

fn fixed_sigmas(spec: &AdversarySpec) -> Option<(f64, f64)> {
    match spec {
        AdversarySpec::Membership(MembershipAdversarySpec::Threshold {
            sigma_source: SigmaSource::Fixed { sigma_s, sigma_d },
            ..
        }) => Some((*sigma_s, *sigma_d)),
        AdversarySpec::Attribute(AttributeAdversarySpec::General {
            sigma_guess: SigmaGuessSource::Fixed { sigma },
        }) => Some((*sigma, *sigma)),
        _ => None,
    }
}

/// Run the repeated-split experiment over a loaded CSV dataset.
pub fn run_split_experiment(
    section: &DatasetSection,
    data: &Dataset,
    load: &LoadReport,
) -> Result<SplitOutcome> {
    let n = data.len();
    let train_size = ((n as f64) * section.train_fraction).round() as usize;
    if train_size == 0 || train_size >= n {
        return Err(Error::Config(format!(
            "train fraction {} leaves an empty split for n = {n}",
            section.train_fraction
        )));
    }

    let adversary = match &section.adversary {
        AdversarySpec::Membership(spec) => SplitAdversary::Membership(spec.clone()),
        AdversarySpec::Attribute(spec) => {
            let levels = load.target_levels.as_ref().ok_or_else(|| {
                Error::Config("attribute adversary needs a target-attribute column".into())
            })?;
            let targets: Vec<f64> = (0..levels.len()).map(|i| i as f64).collect();
            let prior = load.target_prior.clone().expect("levels imply a prior");
            SplitAdversary::Attribute {
                spec: spec.clone(),
                schema: AttributeSchema::new(targets, prior)?,
            }
        }
    };

    // the empirical distribution, for trainers that consult it
    let empirical = SyntheticDistribution::FiniteClassification {
        support: data.points().to_vec(),
        probs: vec![1.0 / n as f64; n],
    };

    let measured = needs_measured_sigmas(&section.adversary);
    let fixed = fixed_sigmas(&section.adversary);
    let mut per_repeat = Vec::with_capacity(section.repeats);
    let mut ratios = Vec::new();
    for r in 0..section.repeats {
        let mut rng = section.seed.stream(SPLIT_SCOPE, r as u64);
        let idx = shuffled_indices(n, &mut rng);
        let train = subset(data, &idx[..train_size])?;
        let test = subset(data, &idx[train_size..])?;
        let model = section.trainer.train(&train, &empirical, &mut rng)?;

        let sigmas = if measured {
            let stats = measure_split_stats(
                &section.trainer,
                &train,
                &empirical,
                &leakbench_core::LossSpec::squared_error(),
                &mut rng,
            )?;
            let es = stats.error_stats.ok_or_else(|| {
                Error::Precondition("measured sigmas need squared-error residuals".into())
            })?;
            if es.sigma_s == 0.0 {
                return Err(Error::Precondition(
                    "training residuals are exactly zero; threshold undefined".into(),
                ));
            }
            ratios.push(es.ratio());
            Some((es.sigma_s, es.sigma_d))
        } else {
            fixed
        };

        let rate_train = success_rate(&adversary, &train, &model, sigmas, &mut rng)?;
        let rate_test = success_rate(&adversary, &test, &model, sigmas, &mut rng)?;
        per_repeat.push(rate_train - rate_test);
    }

    let repeats = per_repeat.len();
    let mean = per_repeat.iter().sum::<f64>() / repeats as f64;
    let stderr = if repeats > 1 {
        let var = per_repeat
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (repeats as f64 - 1.0);
        (var / repeats as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(SplitOutcome {
        advantage: mean,
        stderr,
        repeats,
        train_size,
        test_size: n - train_size,
        mean_ratio: if ratios.is_empty() {
            None
        } else {
            Some(ratios.iter().sum::<f64>() / ratios.len() as f64)
        },
        per_repeat,
    })
}
