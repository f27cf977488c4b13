//! Synthetic data distributions and the membership-challenge sampler.
//!
//! The two idealized channels draw model residuals directly from the member
//! or population law depending on which branch of the challenge they serve.
//! That realizes the distributional hypotheses behind the closed-form curves
//! (Gaussian residuals with std `sigma_S` on members and `sigma_D` off them;
//! 0-1 losses with rates `p_S` / `p_D`) without a training confound.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{DataPoint, Dataset, Provenance, Value};
use crate::error::{Error, Result};
use crate::rng::Stream;

const PROB_SUM_TOL: f64 = 1e-9;

/// Sensitive-attribute part of a distribution: the finite target domain,
/// its prior, and the target's additive effect on the response (`tau`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributePart {
    pub targets: Vec<f64>,
    pub prior: Vec<f64>,
    pub tau: f64,
}

impl AttributePart {
    pub fn validate(&self) -> Result<()> {
        if self.targets.len() < 2 {
            return Err(Error::Precondition(
                "attribute needs at least two target values".into(),
            ));
        }
        if self.targets.len() != self.prior.len() {
            return Err(Error::Precondition(
                "attribute prior length must match target count".into(),
            ));
        }
        check_probability_vector(&self.prior)?;
        for w in &self.targets {
            if !w.is_finite() {
                return Err(Error::Precondition("target values must be finite".into()));
            }
        }
        Ok(())
    }

    /// Uniform binary attribute on {0, 1} with influence `tau`.
    pub fn binary_uniform(tau: f64) -> Self {
        AttributePart {
            targets: vec![0.0, 1.0],
            prior: vec![0.5, 0.5],
            tau,
        }
    }

    pub fn sample_target(&self, rng: &mut Stream) -> f64 {
        self.targets[sample_index(&self.prior, rng)]
    }

    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.targets.iter().position(|&v| v == t)
    }
}

fn check_probability_vector(p: &[f64]) -> Result<()> {
    if p.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(Error::Precondition(
            "probabilities must lie in [0, 1]".into(),
        ));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::Precondition(format!(
            "probabilities sum to {sum}, expected 1 within {PROB_SUM_TOL}"
        )));
    }
    Ok(())
}

/// Draw an index according to a probability vector.
pub fn sample_index(probs: &[f64], rng: &mut Stream) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SyntheticDistribution {
    /// `v ~ N(0, I)`, optional `t ~ prior`, `y = w.v + intercept + tau t + N(0, sigma)`.
    GaussianLinear {
        weights: Vec<f64>,
        intercept: f64,
        noise_sigma: f64,
        attribute: Option<AttributePart>,
    },
    /// Enumerated support with point probabilities.
    FiniteClassification {
        support: Vec<DataPoint>,
        probs: Vec<f64>,
    },
    /// Regression residual channel: `y = tau t + eps`, with
    /// `eps ~ N(0, sigma_s^2)` on the member branch and `N(0, sigma_d^2)` on
    /// the population branch.
    IdealizedRegressionChannel {
        sigma_s: f64,
        sigma_d: f64,
        attribute: Option<AttributePart>,
    },
    /// 0-1 loss channel against the constant label-0 model: the response is
    /// wrong (label 1) with probability `p_s` on members, `p_d` off them.
    IdealizedClassificationChannel { p_s: f64, p_d: f64 },
}

impl SyntheticDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            SyntheticDistribution::GaussianLinear {
                weights,
                noise_sigma,
                attribute,
                ..
            } => {
                if !(*noise_sigma > 0.0) {
                    return Err(Error::Precondition(format!(
                        "gaussian-linear noise sigma must be > 0, got {noise_sigma}"
                    )));
                }
                if weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::Precondition("weights must be finite".into()));
                }
                if let Some(a) = attribute {
                    a.validate()?;
                }
                Ok(())
            }
            SyntheticDistribution::FiniteClassification { support, probs } => {
                if support.is_empty() {
                    return Err(Error::Precondition("finite support must be nonempty".into()));
                }
                if support.len() != probs.len() {
                    return Err(Error::Precondition(
                        "finite support and probability lengths differ".into(),
                    ));
                }
                check_probability_vector(probs)
            }
            SyntheticDistribution::IdealizedRegressionChannel {
                sigma_s,
                sigma_d,
                attribute,
            } => {
                if !(*sigma_s > 0.0 && *sigma_d > 0.0) {
                    return Err(Error::Precondition(format!(
                        "channel sigmas must be > 0, got ({sigma_s}, {sigma_d})"
                    )));
                }
                if let Some(a) = attribute {
                    a.validate()?;
                }
                Ok(())
            }
            SyntheticDistribution::IdealizedClassificationChannel { p_s, p_d } => {
                check_probability_vector(&[*p_s, 1.0 - p_s])?;
                check_probability_vector(&[*p_d, 1.0 - p_d])?;
                Ok(())
            }
        }
    }

    /// Anomalies worth surfacing but not refusing: currently the
    /// anti-overfitting configurations (member losses above population ones).
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            SyntheticDistribution::IdealizedClassificationChannel { p_s, p_d } if p_s > p_d => {
                out.push(format!(
                    "classification channel has p_S = {p_s} > p_D = {p_d}: anti-overfitting regime"
                ));
            }
            SyntheticDistribution::IdealizedRegressionChannel {
                sigma_s, sigma_d, ..
            } if sigma_s > sigma_d => {
                out.push(format!(
                    "regression channel has sigma_S = {sigma_s} > sigma_D = {sigma_d}: anti-overfitting regime"
                ));
            }
            _ => {}
        }
        out
    }

    pub fn attribute(&self) -> Option<&AttributePart> {
        match self {
            SyntheticDistribution::GaussianLinear { attribute, .. }
            | SyntheticDistribution::IdealizedRegressionChannel { attribute, .. } => {
                attribute.as_ref()
            }
            _ => None,
        }
    }

    /// Whether a fresh draw collides with a given finite set with probability
    /// zero (continuous response), making `mu(n, D)` analytically zero.
    pub fn mu_is_analytically_zero(&self) -> bool {
        matches!(
            self,
            SyntheticDistribution::GaussianLinear { .. }
                | SyntheticDistribution::IdealizedRegressionChannel { .. }
        )
    }

    /// Sample one point on the member branch (used when building `S ~ D^n`).
    pub fn sample_member(&self, rng: &mut Stream) -> DataPoint {
        self.sample(rng, true)
    }

    /// Sample one point from the general population (the `b = 1` branch).
    pub fn sample_population(&self, rng: &mut Stream) -> DataPoint {
        self.sample(rng, false)
    }

    fn sample(&self, rng: &mut Stream, member: bool) -> DataPoint {
        match self {
            SyntheticDistribution::GaussianLinear {
                weights,
                intercept,
                noise_sigma,
                attribute,
            } => {
                let v: Vec<f64> = (0..weights.len())
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let mut y = *intercept;
                for (w, x) in weights.iter().zip(&v) {
                    y += w * x;
                }
                let t = attribute.as_ref().map(|a| a.sample_target(rng));
                if let (Some(a), Some(tv)) = (attribute.as_ref(), t) {
                    y += a.tau * tv;
                }
                y += noise_sigma * rng.sample::<f64, _>(StandardNormal);
                DataPoint::regression(v, t, y)
            }
            SyntheticDistribution::FiniteClassification { support, probs } => {
                support[sample_index(probs, rng)].clone()
            }
            SyntheticDistribution::IdealizedRegressionChannel {
                sigma_s,
                sigma_d,
                attribute,
            } => {
                let sigma = if member { *sigma_s } else { *sigma_d };
                let t = attribute.as_ref().map(|a| a.sample_target(rng));
                let mut y = sigma * rng.sample::<f64, _>(StandardNormal);
                if let (Some(a), Some(tv)) = (attribute.as_ref(), t) {
                    y += a.tau * tv;
                }
                DataPoint::regression(vec![], t, y)
            }
            SyntheticDistribution::IdealizedClassificationChannel { p_s, p_d } => {
                let p = if member { *p_s } else { *p_d };
                let wrong = rng.random_bool(p);
                DataPoint::classification(vec![], None, u32::from(wrong))
            }
        }
    }

    /// Draw `S ~ D^n` (member branch for the idealized channels).
    pub fn sample_training_set(&self, n: usize, rng: &mut Stream) -> Result<Dataset> {
        if n == 0 {
            return Err(Error::Precondition("training set size must be >= 1".into()));
        }
        let points = (0..n).map(|_| self.sample_member(rng)).collect();
        Dataset::new(points, Provenance::Synthetic)
    }
}

/// One membership challenge: flip a fair coin `b`, then draw `z ~ S` (uniform
/// index) when `b = 0` or `z ~ D` (fresh sample) when `b = 1`.
pub fn draw_challenge(
    s: &Dataset,
    d: &SyntheticDistribution,
    rng: &mut Stream,
) -> (u8, DataPoint) {
    let b = u8::from(rng.random_bool(0.5));
    let z = if b == 0 {
        let i = rng.random_range(0..s.len());
        s.point(i).clone()
    } else {
        d.sample_population(rng)
    };
    (b, z)
}

/// Constant-label value used by the idealized classification channel's model.
pub const CLASSIFICATION_CHANNEL_PREDICTION: Value = Value::Label(0);
