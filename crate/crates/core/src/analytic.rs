//! Closed-form advantage curves and bounds, used as ground truth against
//! Monte Carlo estimates.

use serde::{Deserialize, Serialize};

use crate::attribute::{decision_regions, AttributeSchema};
use crate::error::{Error, Result};
use crate::special::{erf_unchecked, normal_cdf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveId {
    MembershipBounded,
    MembershipThresholdKnown,
    MembershipThresholdUnknown,
    AttributeBinary,
    AttributeGeneral,
    DpBound,
    ColludingExpected,
    /// `1 - mu(n, D)`, the ceiling on any membership advantage.
    MaxAdvantageCap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub abscissa: f64,
    pub value: f64,
    pub curve_id: CurveId,
}

impl CurvePoint {
    pub fn new(abscissa: f64, value: f64, curve_id: CurveId) -> Self {
        CurvePoint {
            abscissa,
            value,
            curve_id,
        }
    }
}

/// Advantage of the bounded-loss adversary: `R_gen / B`.
pub fn curve_membership_bounded(r_gen: f64, bound: f64) -> Result<f64> {
    if !(bound > 0.0) {
        return Err(Error::Domain(format!("loss bound must be > 0, got {bound}")));
    }
    Ok(r_gen / bound)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// Both sigmas known; threshold at the density crossing.
    Known,
    /// Only `sigma_S` known; threshold fixed at `|eps| = sigma_S`.
    Unknown,
}

/// Advantage of the Gaussian threshold adversary as a function of the
/// overfitting ratio `r = sigma_D / sigma_S >= 1`.
///
/// Known mode: `erf(r sqrt(ln r / (r^2 - 1))) - erf(sqrt(ln r / (r^2 - 1)))`.
/// Unknown mode: `erf(1/sqrt 2) - erf(1/(sqrt 2 r))`.
/// Both are 0 at `r = 1` (taken as the defined limit) and approach their
/// suprema as `r -> inf`.
pub fn curve_membership_threshold(ratio: f64, mode: ThresholdMode) -> Result<f64> {
    if !(ratio >= 1.0) {
        return Err(Error::Domain(format!(
            "threshold curve needs ratio >= 1, got {ratio}"
        )));
    }
    if ratio == 1.0 {
        return Ok(0.0);
    }
    match mode {
        ThresholdMode::Known => {
            if ratio == f64::INFINITY {
                return Ok(1.0);
            }
            let u = ratio - 1.0;
            // ln(r) / (r^2 - 1), stable near r = 1
            let s = (u.ln_1p() / (u * (2.0 + u))).sqrt();
            Ok(erf_unchecked(ratio * s) - erf_unchecked(s))
        }
        ThresholdMode::Unknown => {
            let inv_sqrt2 = 1.0 / std::f64::consts::SQRT_2;
            Ok(erf_unchecked(inv_sqrt2) - erf_unchecked(inv_sqrt2 / ratio))
        }
    }
}

/// Advantage of the general attribute adversary in the binary uniform-prior
/// setting: `(erf(tau / (2 sqrt 2 sigma_S)) - erf(tau / (2 sqrt 2 sigma_D))) / 2`.
pub fn curve_attribute_binary(tau: f64, sigma_s: f64, sigma_d: f64) -> Result<f64> {
    if tau < 0.0 {
        return Err(Error::Domain(format!("tau must be >= 0, got {tau}")));
    }
    if !(sigma_s > 0.0 && sigma_d > 0.0) {
        return Err(Error::Domain(format!(
            "sigmas must be > 0, got ({sigma_s}, {sigma_d})"
        )));
    }
    let scale = 2.0 * std::f64::consts::SQRT_2;
    Ok(0.5 * (erf_unchecked(tau / (scale * sigma_s)) - erf_unchecked(tau / (scale * sigma_d))))
}

/// Advantage of the general attribute adversary in the equal-variance
/// Gaussian setting, for arbitrary target count and prior: build the
/// decision regions from the per-target predictions, integrate the member
/// (`sigma_S`) and population (`sigma_D`) residual laws over each target's
/// own region, and combine with the prior.
pub fn curve_attribute_general(
    schema: &AttributeSchema,
    predictions: &[f64],
    sigma_s: f64,
    sigma_d: f64,
    sigma_guess: f64,
) -> Result<f64> {
    if !(sigma_s > 0.0 && sigma_d > 0.0) {
        return Err(Error::Domain(format!(
            "sigmas must be > 0, got ({sigma_s}, {sigma_d})"
        )));
    }
    let regions = decision_regions(schema, predictions, sigma_guess)?;
    let mut advantage = 0.0;
    for (i, &p) in predictions.iter().enumerate() {
        // Pr[adversary outputs t_i | t = t_i] = mass of region(t_i) under
        // y ~ N(p_i, sigma^2)
        let correct_mass = |sigma: f64| -> f64 {
            regions
                .iter()
                .filter(|r| r.target == i)
                .map(|r| normal_cdf((r.hi - p) / sigma) - normal_cdf((r.lo - p) / sigma))
                .sum()
        };
        advantage += schema.prior[i] * (correct_mass(sigma_s) - correct_mass(sigma_d));
    }
    Ok(advantage)
}

/// Differential-privacy ceiling on membership advantage: `e^eps - 1`.
pub fn bound_dp_advantage(dp_epsilon: f64) -> Result<f64> {
    if dp_epsilon < 0.0 {
        return Err(Error::Domain(format!(
            "dp_epsilon must be >= 0, got {dp_epsilon}"
        )));
    }
    Ok(dp_epsilon.exp_m1())
}

/// Expected advantage of the colluding adversary: `1 - mu - 2^(-m_bits k)`.
pub fn expected_colluding_advantage(m_bits: u32, k: u32, mu: f64) -> Result<f64> {
    if m_bits == 0 || k == 0 {
        return Err(Error::Domain("m_bits and k must be positive".into()));
    }
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("mu must be in [0, 1], got {mu}")));
    }
    let chance = (-(f64::from(m_bits) * f64::from(k)) * std::f64::consts::LN_2).exp();
    Ok(1.0 - mu - chance)
}

/// Reference ceiling `1 - mu(n, D)` on achievable membership advantage.
pub fn max_advantage_cap(mu: f64) -> f64 {
    1.0 - mu
}
