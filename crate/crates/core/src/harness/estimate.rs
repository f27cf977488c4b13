//! Advantage estimates with uncertainty.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monte Carlo advantage estimate.
///
/// `value` is the difference between the two branch rates (the
/// true-positive/false-positive decomposition); `accuracy()` recovers the
/// `2 Pr[experiment = 1] - 1` form with the fair-coin weighting, so the two
/// forms agree identically on every run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdvantageEstimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: usize,
    pub ci95: (f64, f64),
    /// (success rate given b = 0, success rate given b = 1); for membership
    /// these are the guess-0 rates, for attribute the correctness rates.
    pub components: (f64, f64),
}

impl AdvantageEstimate {
    /// Build from per-branch success counts: `c0 / n0` and `c1 / n1`.
    pub fn from_branch_counts(c0: u64, n0: u64, c1: u64, n1: u64) -> Result<Self> {
        if n0 == 0 || n1 == 0 {
            return Err(Error::Precondition(
                "both challenge branches need at least one trial".into(),
            ));
        }
        let rate0 = c0 as f64 / n0 as f64;
        let rate1 = c1 as f64 / n1 as f64;
        let value = rate0 - rate1;
        let stderr =
            (rate0 * (1.0 - rate0) / n0 as f64 + rate1 * (1.0 - rate1) / n1 as f64).sqrt();
        Ok(AdvantageEstimate {
            value,
            stderr,
            trials: (n0 + n1) as usize,
            ci95: (value - 1.96 * stderr, value + 1.96 * stderr),
            components: (rate0, rate1),
        })
    }

    /// Estimated success probability of the experiment under the fair coin:
    /// `(rate0 + (1 - rate1)) / 2`.
    pub fn accuracy(&self) -> f64 {
        (self.components.0 + 1.0 - self.components.1) / 2.0
    }

    /// The `2 accuracy - 1` form; equal to `value` by construction.
    pub fn advantage_from_accuracy(&self) -> f64 {
        2.0 * self.accuracy() - 1.0
    }
}

/// Fold an ordered iterator of `(b, success)` outcomes into per-branch counts.
pub fn branch_counts(outcomes: impl IntoIterator<Item = (u8, bool)>) -> (u64, u64, u64, u64) {
    let (mut c0, mut n0, mut c1, mut n1) = (0, 0, 0, 0);
    for (b, success) in outcomes {
        if b == 0 {
            n0 += 1;
            c0 += u64::from(success);
        } else {
            n1 += 1;
            c1 += u64::from(success);
        }
    }
    (c0, n0, c1, n1)
}
