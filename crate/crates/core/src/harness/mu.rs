//! Estimation of `mu(n, D)`, the probability that a fresh population draw
//! collides with a member of `S ~ D^n`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::SyntheticDistribution;
use crate::error::{Error, Result};
use crate::rng::{scope, MasterSeed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuMethod {
    /// Continuous response: collisions have probability zero.
    AnalyticZero,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub mu: f64,
    pub method: MuMethod,
    pub stderr: f64,
}

/// `mu(n, D) = Pr[z in S]` over `S ~ D^n, z ~ D`. Continuous distributions
/// report an exact zero; finite ones are sampled.
pub fn estimate_mu(
    d: &SyntheticDistribution,
    n: usize,
    trials: usize,
    seed: MasterSeed,
) -> Result<MuEstimate> {
    if trials < 1 {
        return Err(Error::Precondition("estimate_mu needs trials >= 1".into()));
    }
    if n == 0 {
        return Err(Error::Precondition("estimate_mu needs n >= 1".into()));
    }
    if d.mu_is_analytically_zero() {
        return Ok(MuEstimate {
            mu: 0.0,
            method: MuMethod::AnalyticZero,
            stderr: 0.0,
        });
    }
    let hits: Result<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut stream = seed.stream(scope::MU_TRIAL, trial as u64);
            let s = d.sample_training_set(n, &mut stream)?;
            let z = d.sample_population(&mut stream);
            Ok(s.contains(&z))
        })
        .collect();
    let hits = hits?;
    let mu = hits.iter().filter(|h| **h).count() as f64 / trials as f64;
    Ok(MuEstimate {
        mu,
        method: MuMethod::MonteCarlo,
        stderr: (mu * (1.0 - mu) / trials as f64).sqrt(),
    })
}
