//! Data points, datasets, and loss functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A model response: real-valued for regression, a label for classification.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Value {
    Real(f64),
    Label(u32),
}

impl Value {
    pub fn as_real(&self) -> Result<f64> {
        match self {
            Value::Real(v) => Ok(*v),
            Value::Label(l) => Err(Error::TypeMismatch(format!(
                "expected real response, got label {l}"
            ))),
        }
    }
}

/// A labeled example. `known` is the public feature part `v`; `target` is
/// the sensitive attribute value `t` (absent for problems without one); the
/// model input is `v` with `t` appended when present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub known: Vec<f64>,
    pub target: Option<f64>,
    pub response: Value,
}

impl DataPoint {
    pub fn regression(known: Vec<f64>, target: Option<f64>, y: f64) -> Self {
        DataPoint {
            known,
            target,
            response: Value::Real(y),
        }
    }

    pub fn classification(known: Vec<f64>, target: Option<f64>, label: u32) -> Self {
        DataPoint {
            known,
            target,
            response: Value::Label(label),
        }
    }

    /// Feature vector the model sees: `v ++ [t]`.
    pub fn model_input(&self) -> Vec<f64> {
        let mut x = self.known.clone();
        if let Some(t) = self.target {
            x.push(t);
        }
        x
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Synthetic,
    Csv,
}

/// An ordered list of points; sampling `z ~ S` picks a uniform index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dataset {
    points: Vec<DataPoint>,
    pub provenance: Provenance,
}

impl Dataset {
    /// Validates that the dataset is nonempty and dimensionally consistent
    /// (same `v` length and same target presence on every point).
    pub fn new(points: Vec<DataPoint>, provenance: Provenance) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::Precondition("dataset must contain at least one point".into()))?;
        let dim = first.known.len();
        let has_target = first.target.is_some();
        for (i, p) in points.iter().enumerate() {
            if p.known.len() != dim {
                return Err(Error::Precondition(format!(
                    "point {i} has {} known features, expected {dim}",
                    p.known.len()
                )));
            }
            if p.target.is_some() != has_target {
                return Err(Error::Precondition(format!(
                    "point {i} target presence differs from the rest of the dataset"
                )));
            }
        }
        Ok(Dataset { points, provenance })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees n >= 1
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &DataPoint {
        &self.points[i]
    }

    /// Dimension of the model input vector.
    pub fn input_dim(&self) -> usize {
        self.points[0].model_input().len()
    }

    pub fn contains(&self, z: &DataPoint) -> bool {
        self.points.iter().any(|p| p == z)
    }

    /// Dataset with point `i` removed, for leave-one-out retraining.
    pub fn without(&self, i: usize) -> Dataset {
        let mut points = self.points.clone();
        points.remove(i);
        Dataset {
            points,
            provenance: self.provenance,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    ZeroOne,
    SquaredError,
    BoundedCustom,
}

/// Loss function with its declared bound `B` (`+inf` for plain squared error).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    pub bound: f64,
}

impl LossSpec {
    pub fn zero_one() -> Self {
        LossSpec {
            kind: LossKind::ZeroOne,
            bound: 1.0,
        }
    }

    pub fn squared_error() -> Self {
        LossSpec {
            kind: LossKind::SquaredError,
            bound: f64::INFINITY,
        }
    }

    /// Squared error clamped at `bound`, giving a bounded regression loss.
    pub fn bounded_custom(bound: f64) -> Result<Self> {
        if !(bound.is_finite() && bound > 0.0) {
            return Err(Error::Precondition(format!(
                "bounded-custom loss requires finite positive bound, got {bound}"
            )));
        }
        Ok(LossSpec {
            kind: LossKind::BoundedCustom,
            bound,
        })
    }

    pub fn is_bounded(&self) -> bool {
        self.bound.is_finite()
    }

    /// Loss of a prediction against the true response.
    pub fn eval(&self, prediction: &Value, response: &Value) -> Result<f64> {
        match self.kind {
            LossKind::ZeroOne => Ok(if prediction == response { 0.0 } else { 1.0 }),
            LossKind::SquaredError => {
                let d = response.as_real()? - prediction.as_real()?;
                Ok(d * d)
            }
            LossKind::BoundedCustom => {
                let d = response.as_real()? - prediction.as_real()?;
                Ok((d * d).min(self.bound))
            }
        }
    }
}

/// Residual standard deviations on members (`sigma_S`) and the population
/// (`sigma_D`); their ratio is the overfitting measure for regression.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub sigma_s: f64,
    pub sigma_d: f64,
}

impl ErrorStats {
    pub fn new(sigma_s: f64, sigma_d: f64) -> Result<Self> {
        if sigma_s < 0.0 || !(sigma_d > 0.0) {
            return Err(Error::Precondition(format!(
                "ErrorStats requires sigma_s >= 0 and sigma_d > 0, got ({sigma_s}, {sigma_d})"
            )));
        }
        Ok(ErrorStats { sigma_s, sigma_d })
    }

    /// `sigma_D / sigma_S`, `+inf` when the training residuals are exactly zero.
    pub fn ratio(&self) -> f64 {
        if self.sigma_s == 0.0 {
            f64::INFINITY
        } else {
            self.sigma_d / self.sigma_s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_one_loss_matches_then_misses() {
        let loss = LossSpec::zero_one();
        assert_eq!(
            loss.eval(&Value::Label(3), &Value::Label(3)).unwrap(),
            0.0
        );
        assert_eq!(
            loss.eval(&Value::Label(3), &Value::Label(4)).unwrap(),
            1.0
        );
    }

    #[test]
    fn squared_error_loss() {
        let loss = LossSpec::squared_error();
        let v = loss
            .eval(&Value::Real(0.5), &Value::Real(2.0))
            .unwrap();
        assert!((v - 2.25).abs() < 1e-15);
    }

    #[test]
    fn bounded_custom_respects_bound() {
        let loss = LossSpec::bounded_custom(4.0).unwrap();
        for d in [0.0, 0.5, 1.9, 2.0, 3.0, 100.0] {
            let v = loss
                .eval(&Value::Real(0.0), &Value::Real(d))
                .unwrap();
            assert!(v <= 4.0);
        }
        assert!(LossSpec::bounded_custom(f64::INFINITY).is_err());
        assert!(LossSpec::bounded_custom(0.0).is_err());
    }

    #[test]
    fn loss_type_mismatch_is_an_error() {
        let loss = LossSpec::squared_error();
        assert!(loss.eval(&Value::Label(1), &Value::Real(0.0)).is_err());
    }

    #[test]
    fn dataset_rejects_empty_and_ragged() {
        assert!(Dataset::new(vec![], Provenance::Synthetic).is_err());
        let ragged = vec![
            DataPoint::regression(vec![1.0], None, 0.0),
            DataPoint::regression(vec![1.0, 2.0], None, 0.0),
        ];
        assert!(Dataset::new(ragged, Provenance::Synthetic).is_err());
    }

    #[test]
    fn model_input_appends_target() {
        let z = DataPoint::regression(vec![1.0, 2.0], Some(5.0), 0.0);
        assert_eq!(z.model_input(), vec![1.0, 2.0, 5.0]);
        let z = DataPoint::regression(vec![1.0], None, 0.0);
        assert_eq!(z.model_input(), vec![1.0]);
    }

    #[test]
    fn error_stats_ratio_handles_zero_sigma_s() {
        let s = ErrorStats::new(0.0, 1.0).unwrap();
        assert_eq!(s.ratio(), f64::INFINITY);
        let s = ErrorStats::new(1.0, 2.0).unwrap();
        assert!((s.ratio() - 2.0).abs() < 1e-15);
    }
}
