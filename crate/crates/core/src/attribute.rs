//! Attribute-inference adversaries and the Bayes-optimal simulator baseline.
//!
//! The public view is the model-inversion projection `phi(z) = (v, y)`: the
//! adversary knows every feature except the sensitive target, plus the true
//! response. `pi(z) = t` extracts the target; `phi_inverse` rebuilds a point
//! from a view with a placeholder target, so `phi(phi_inverse(w)) = w`.

use serde::{Deserialize, Serialize};

use crate::data::{DataPoint, Value};
use crate::dist::{AttributePart, SyntheticDistribution};
use crate::error::{Error, Result};
use crate::models::Model;
use crate::special::normal_ln_pdf;

/// What the attribute adversary sees: `phi(z) = (v, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublicView {
    pub known: Vec<f64>,
    pub response: Value,
}

/// The attribute-inference problem definition: the finite target domain
/// `{t_1..t_m}`, its prior, and the model-inversion view functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub targets: Vec<f64>,
    pub prior: Vec<f64>,
}

impl AttributeSchema {
    pub fn new(targets: Vec<f64>, prior: Vec<f64>) -> Result<Self> {
        let part = AttributePart {
            targets,
            prior,
            tau: 0.0,
        };
        part.validate()?;
        let mut sorted = part.targets.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        if sorted.len() != part.targets.len() {
            return Err(Error::Precondition("target values must be distinct".into()));
        }
        Ok(AttributeSchema {
            targets: part.targets,
            prior: part.prior,
        })
    }

    pub fn from_distribution(d: &SyntheticDistribution) -> Result<Self> {
        let part = d.attribute().ok_or_else(|| {
            Error::Config("distribution has no sensitive attribute part".into())
        })?;
        AttributeSchema::new(part.targets.clone(), part.prior.clone())
    }

    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.targets.iter().position(|&v| v == t)
    }

    /// `phi(z)`: drop the sensitive attribute, keep `(v, y)`.
    pub fn public_view(&self, z: &DataPoint) -> PublicView {
        PublicView {
            known: z.known.clone(),
            response: z.response,
        }
    }

    /// `pi(z)`: the sensitive target value.
    pub fn target_of(&self, z: &DataPoint) -> Result<f64> {
        z.target
            .ok_or_else(|| Error::Precondition("point has no sensitive attribute".into()))
    }

    /// `phi_inverse(w)`: rebuild a point with a placeholder target (the
    /// first declared value).
    pub fn reconstruct(&self, view: &PublicView) -> DataPoint {
        self.with_target(view, self.targets[0])
    }

    /// Reconstruction with a chosen target value.
    pub fn with_target(&self, view: &PublicView, t: f64) -> DataPoint {
        DataPoint {
            known: view.known.clone(),
            target: Some(t),
            response: view.response,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeGuess {
    /// Guessed target value, or `None` for an abstention.
    pub value: Option<f64>,
    /// Normalized per-target posterior diagnostics (empty on abstention
    /// paths that never scored the targets).
    pub posterior_scores: Vec<f64>,
}

fn argmax_first(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

fn normalize_ln_scores(ln_scores: &[f64]) -> Vec<f64> {
    let max = ln_scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return vec![1.0 / ln_scores.len() as f64; ln_scores.len()];
    }
    let unnorm: Vec<f64> = ln_scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = unnorm.iter().sum();
    unnorm.iter().map(|u| u / total).collect()
}

/// General attribute adversary: query the model at every candidate target,
/// weight each residual's Gaussian likelihood by the prior, return the
/// argmax (ties to the lowest target index).
pub fn adv_general_attribute(
    view: &PublicView,
    model: &Model,
    schema: &AttributeSchema,
    sigma_guess: f64,
) -> Result<AttributeGuess> {
    if !(sigma_guess > 0.0) || !sigma_guess.is_finite() {
        return Err(Error::Precondition(format!(
            "sigma_guess must be positive and finite, got {sigma_guess}"
        )));
    }
    let y = view.response.as_real()?;
    let mut ln_scores = Vec::with_capacity(schema.m());
    for (i, &t) in schema.targets.iter().enumerate() {
        let z = schema.with_target(view, t);
        let prediction = model.predict_point(&z).as_real()?;
        let eps = y - prediction;
        let ln_prior = if schema.prior[i] > 0.0 {
            schema.prior[i].ln()
        } else {
            f64::NEG_INFINITY
        };
        ln_scores.push(ln_prior + normal_ln_pdf(eps, sigma_guess));
    }
    let best = argmax_first(&ln_scores);
    Ok(AttributeGuess {
        value: Some(schema.targets[best]),
        posterior_scores: normalize_ln_scores(&ln_scores),
    })
}

/// Bayes-optimal simulator (no model access): `argmax_t Pr[pi(z) = t |
/// phi(z) = view]` under the synthetic distribution. Computable for the
/// finite, gaussian-linear, and regression-channel kinds.
pub fn simulator_optimal(
    view: &PublicView,
    d: &SyntheticDistribution,
    schema: &AttributeSchema,
) -> Result<AttributeGuess> {
    let scores = match d {
        SyntheticDistribution::FiniteClassification { support, probs } => {
            let mut mass = vec![0.0; schema.m()];
            for (z, p) in support.iter().zip(probs) {
                if z.known == view.known && z.response == view.response {
                    if let Some(t) = z.target {
                        if let Some(i) = schema.index_of(t) {
                            mass[i] += p;
                        }
                    }
                }
            }
            if mass.iter().sum::<f64>() == 0.0 {
                // view has no support mass: condition degenerates to the prior
                schema.prior.clone()
            } else {
                mass
            }
        }
        SyntheticDistribution::GaussianLinear {
            weights,
            intercept,
            noise_sigma,
            attribute: Some(attr),
        } => gaussian_posterior(view, schema, attr, *noise_sigma, |v| {
            let mut base = *intercept;
            for (w, x) in weights.iter().zip(v) {
                base += w * x;
            }
            base
        })?,
        SyntheticDistribution::IdealizedRegressionChannel {
            sigma_d,
            attribute: Some(attr),
            ..
        } => gaussian_posterior(view, schema, attr, *sigma_d, |_| 0.0)?,
        _ => {
            return Err(Error::NotComputable(format!(
                "Bayes simulator has no conditional for this distribution kind"
            )))
        }
    };
    let best = argmax_first(&scores);
    let total: f64 = scores.iter().sum();
    Ok(AttributeGuess {
        value: Some(schema.targets[best]),
        posterior_scores: scores.iter().map(|s| s / total).collect(),
    })
}

fn gaussian_posterior(
    view: &PublicView,
    schema: &AttributeSchema,
    attr: &AttributePart,
    sigma: f64,
    base_of: impl Fn(&[f64]) -> f64,
) -> Result<Vec<f64>> {
    let y = view.response.as_real()?;
    let base = base_of(&view.known);
    let ln_scores: Vec<f64> = schema
        .targets
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let ln_prior = if schema.prior[i] > 0.0 {
                schema.prior[i].ln()
            } else {
                f64::NEG_INFINITY
            };
            ln_prior + normal_ln_pdf(y - base - attr.tau * t, sigma)
        })
        .collect();
    Ok(normalize_ln_scores(&ln_scores))
}

/// One maximal interval on which a single target wins the prior-weighted
/// likelihood comparison. `tied` lists other targets whose scoring function
/// coincides everywhere with the winner's (the argmax tie-break hides them).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub target: usize,
    pub lo: f64,
    pub hi: f64,
    pub tied: Vec<usize>,
}

/// Partition the response line into the regions where
/// [`adv_general_attribute`] selects each target, given the model's
/// per-target predictions. With equal-variance Gaussian likelihoods each
/// pairwise comparison has one linear boundary in `y`, so each target's
/// region is an interval; the regions tile the real line with no gaps.
pub fn decision_regions(
    schema: &AttributeSchema,
    predictions: &[f64],
    sigma_guess: f64,
) -> Result<Vec<Region>> {
    if predictions.len() != schema.m() {
        return Err(Error::Precondition(format!(
            "need one prediction per target: got {} for m = {}",
            predictions.len(),
            schema.m()
        )));
    }
    if !(sigma_guess > 0.0) || !sigma_guess.is_finite() {
        return Err(Error::Precondition(format!(
            "sigma_guess must be positive and finite, got {sigma_guess}"
        )));
    }
    let var = sigma_guess * sigma_guess;
    // ln score_i(y) = -y^2/2var + slope_i y + offset_i
    struct Line {
        target: usize,
        slope: f64,
        offset: f64,
        tied: Vec<usize>,
    }
    let mut lines: Vec<Line> = Vec::new();
    for (i, &p) in predictions.iter().enumerate() {
        if schema.prior[i] == 0.0 {
            continue; // a zero-prior target never wins
        }
        lines.push(Line {
            target: i,
            slope: p / var,
            offset: schema.prior[i].ln() - p * p / (2.0 * var),
            tied: Vec::new(),
        });
    }
    if lines.is_empty() {
        return Err(Error::Precondition("all targets have zero prior".into()));
    }

    // collapse identical and dominated parallel lines; lowest index wins ties
    lines.sort_by(|a, b| {
        a.slope
            .partial_cmp(&b.slope)
            .unwrap()
            .then(b.offset.partial_cmp(&a.offset).unwrap())
            .then(a.target.cmp(&b.target))
    });
    let mut unique: Vec<Line> = Vec::new();
    for line in lines {
        match unique.last_mut() {
            Some(last) if last.slope == line.slope => {
                if last.offset == line.offset {
                    if line.target < last.target {
                        last.tied.push(last.target);
                        last.target = line.target;
                        last.tied.sort_unstable();
                    } else {
                        last.tied.push(line.target);
                    }
                }
                // strictly smaller offset at the same slope: dominated, drop
            }
            _ => unique.push(line),
        }
    }

    // upper envelope of lines sorted by slope (convex-hull style)
    let crossing = |a: &Line, b: &Line| (a.offset - b.offset) / (b.slope - a.slope);
    let mut hull: Vec<Line> = Vec::new();
    for line in unique {
        while hull.len() >= 2 {
            let last = &hull[hull.len() - 1];
            let prev = &hull[hull.len() - 2];
            if crossing(prev, &line) <= crossing(prev, last) {
                hull.pop();
            } else {
                break;
            }
        }
        if hull.len() == 1 && hull[0].slope == line.slope {
            // parallel survivor handled above; keep the better offset
            if line.offset > hull[0].offset {
                hull[0] = line;
            }
            continue;
        }
        hull.push(line);
    }

    let mut regions = Vec::with_capacity(hull.len());
    for (i, line) in hull.iter().enumerate() {
        let lo = if i == 0 {
            f64::NEG_INFINITY
        } else {
            crossing(&hull[i - 1], line)
        };
        let hi = if i + 1 == hull.len() {
            f64::INFINITY
        } else {
            crossing(line, &hull[i + 1])
        };
        regions.push(Region {
            target: line.target,
            lo,
            hi,
            tied: line.tied.clone(),
        });
    }
    Ok(regions)
}

/// Which target the regions assign to response `y`.
pub fn region_choice(regions: &[Region], y: f64) -> usize {
    for r in regions {
        if y < r.hi {
            return r.target;
        }
    }
    regions.last().expect("regions tile the line").target
}
