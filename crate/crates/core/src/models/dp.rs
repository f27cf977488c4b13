//! Exponential-mechanism learner over a finite hypothesis class.

use crate::data::{Dataset, LossSpec};
use crate::dist::sample_index;
use crate::error::{Error, Result};
use crate::rng::Stream;

use super::{mean_loss, Model};

#[derive(Clone, Debug)]
pub struct DpParams {
    pub dp_epsilon: f64,
    pub hypothesis_class: Vec<Model>,
}

/// Selection probabilities of the exponential mechanism:
/// `Pr[h] proportional to exp(-epsilon * n * R_emp(h) / (2B))`.
///
/// The score is `-sum_i loss(h, z_i)`, whose replace-one sensitivity is the
/// loss bound `B`; the standard exponential-mechanism argument then gives
/// `epsilon`-differential privacy of the selection.
pub fn exponential_mechanism_weights(
    empirical_losses: &[f64],
    dp_epsilon: f64,
    n: usize,
    bound: f64,
) -> Vec<f64> {
    let scores: Vec<f64> = empirical_losses
        .iter()
        .map(|r| -dp_epsilon * n as f64 * r / (2.0 * bound))
        .collect();
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = unnorm.iter().sum();
    unnorm.iter().map(|w| w / total).collect()
}

/// Train by sampling a hypothesis with probability proportional to
/// `exp(-epsilon n R_emp(h) / 2B)`. `epsilon -> 0` degenerates to a uniform
/// choice, `epsilon -> inf` to the empirical risk minimizer.
pub fn train_dp_finite(
    s: &Dataset,
    params: &DpParams,
    loss: &LossSpec,
    rng: &mut Stream,
) -> Result<Model> {
    if !(params.dp_epsilon > 0.0) || !params.dp_epsilon.is_finite() {
        return Err(Error::Precondition(format!(
            "dp_epsilon must be positive and finite, got {}",
            params.dp_epsilon
        )));
    }
    if params.hypothesis_class.is_empty() {
        return Err(Error::Precondition("hypothesis class must be nonempty".into()));
    }
    if !loss.is_bounded() {
        return Err(Error::LossContract(
            "exponential mechanism requires a bounded loss".into(),
        ));
    }
    let losses: Vec<f64> = params
        .hypothesis_class
        .iter()
        .map(|h| mean_loss(h, s, loss))
        .collect::<Result<_>>()?;
    let probs = exponential_mechanism_weights(&losses, params.dp_epsilon, s.len(), loss.bound);
    let chosen = sample_index(&probs, rng);
    Ok(params.hypothesis_class[chosen].clone())
}
