//! Trainable predictors and trainers.

mod collusion;
mod dp;
mod ridge;
mod stats;
mod tree;

pub use collusion::{
    train_colluding, CollusionKeys, CollusionKeysConfig, CollusionMode, CollusionWrapped,
    FeatureCodec,
};
pub use dp::{exponential_mechanism_weights, train_dp_finite, DpParams};
pub use ridge::{train_ridge, RidgeFit};
pub use stats::{estimate_generalization, measure_split_stats, GenStats, SplitStats};
pub use tree::{train_tree, TreeModel, TreeParams};

use serde::{Deserialize, Serialize};

use crate::data::{DataPoint, Dataset, LossSpec, Value};
use crate::dist::SyntheticDistribution;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// A trained (or fixed) predictor. Prediction is deterministic for every
/// variant; the collusion wrapper's table lookups are keyed but fixed at
/// training time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    /// `y = w . x + intercept`. Ridge fits, fixed hypotheses, and the
    /// idealized regression channel's canonical predictor all live here.
    Linear { weights: Vec<f64>, intercept: f64 },
    /// Constant response regardless of input.
    Constant { value: Value },
    Tree(TreeModel),
    CollusionWrapped(CollusionWrapped),
}

impl Model {
    pub fn linear(weights: Vec<f64>, intercept: f64) -> Self {
        Model::Linear { weights, intercept }
    }

    pub fn constant(value: Value) -> Self {
        Model::Constant { value }
    }

    pub fn predict(&self, x: &[f64]) -> Value {
        match self {
            Model::Linear { weights, intercept } => {
                let mut y = *intercept;
                for (w, v) in weights.iter().zip(x) {
                    y += w * v;
                }
                Value::Real(y)
            }
            Model::Constant { value } => *value,
            Model::Tree(tree) => Value::Real(tree.predict(x)),
            Model::CollusionWrapped(wrapped) => wrapped.predict(x),
        }
    }

    pub fn predict_point(&self, z: &DataPoint) -> Value {
        self.predict(&z.model_input())
    }
}

/// Loss of a model on one point under a loss spec.
pub fn loss_eval(model: &Model, z: &DataPoint, spec: &LossSpec) -> Result<f64> {
    spec.eval(&model.predict_point(z), &z.response)
}

/// Mean loss of a model over a dataset.
pub fn mean_loss(model: &Model, s: &Dataset, spec: &LossSpec) -> Result<f64> {
    let mut total = 0.0;
    for z in s.points() {
        total += loss_eval(model, z, spec)?;
    }
    Ok(total / s.len() as f64)
}

/// Training algorithms the harness can instantiate from configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Trainer {
    Ridge {
        lambda: f64,
    },
    Tree {
        max_depth: Option<u32>,
        min_leaf: usize,
    },
    DpFinite {
        dp_epsilon: f64,
        hypothesis_class: Vec<Model>,
        loss: LossSpec,
    },
    /// The canonical fixed predictor paired with an idealized channel.
    Channel,
    /// Ignores the training data entirely; useful as a no-overfitting
    /// baseline.
    Fixed {
        model: Model,
    },
    Colluding {
        base: Box<Trainer>,
        keys: CollusionKeysConfig,
        mode: CollusionMode,
    },
}

impl Trainer {
    /// Train on `S`. The distribution is consulted only by the channel
    /// trainer (for its canonical predictor) and by nothing else.
    pub fn train(
        &self,
        s: &Dataset,
        d: &SyntheticDistribution,
        rng: &mut Stream,
    ) -> Result<Model> {
        match self {
            Trainer::Ridge { lambda } => Ok(train_ridge(s, *lambda)?.into_model()),
            Trainer::Tree {
                max_depth,
                min_leaf,
            } => {
                let params = TreeParams {
                    max_depth: *max_depth,
                    min_leaf: *min_leaf,
                };
                Ok(Model::Tree(train_tree(s, &params)?))
            }
            Trainer::DpFinite {
                dp_epsilon,
                hypothesis_class,
                loss,
            } => {
                let params = DpParams {
                    dp_epsilon: *dp_epsilon,
                    hypothesis_class: hypothesis_class.clone(),
                };
                train_dp_finite(s, &params, loss, rng)
            }
            Trainer::Channel => channel_model(d),
            Trainer::Fixed { model } => Ok(model.clone()),
            Trainer::Colluding { base, keys, mode } => {
                let keys = keys.materialize();
                train_colluding(s, base, &keys, *mode, d, rng)
            }
        }
    }
}

/// Canonical predictor realized by an idealized channel: the regression
/// channel's residuals are defined against `y_hat = tau * t`, and the
/// classification channel's against the constant label-0 model.
pub fn channel_model(d: &SyntheticDistribution) -> Result<Model> {
    match d {
        SyntheticDistribution::IdealizedRegressionChannel { attribute, .. } => {
            let weights = match attribute {
                Some(a) => vec![a.tau],
                None => vec![],
            };
            Ok(Model::linear(weights, 0.0))
        }
        SyntheticDistribution::IdealizedClassificationChannel { .. } => {
            Ok(Model::constant(crate::dist::CLASSIFICATION_CHANNEL_PREDICTION))
        }
        _ => Err(Error::Config(
            "channel trainer requires an idealized channel distribution".into(),
        )),
    }
}
