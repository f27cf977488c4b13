//! Colluding trainer: plants keyed pseudorandom query-response pairs so that
//! a keyed adversary can extract exact membership from black-box access.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::{DataPoint, Dataset, Value};
use crate::dist::SyntheticDistribution;
use crate::error::{Error, Result};
use crate::rng::{splitmix, Stream};

use super::{Model, Trainer};

/// Fixed-width grid quantization of real features, used to encode a model
/// input into a `d`-bit integer. The grid resolution (`bits_per_feature`)
/// is a configuration knob; feature values must lie in `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureCodec {
    pub bits_per_feature: u32,
    pub lo: f64,
    pub hi: f64,
}

impl FeatureCodec {
    fn levels(&self) -> u64 {
        1u64 << self.bits_per_feature
    }

    pub fn encode_feature(&self, x: f64) -> Result<u64> {
        if !(self.lo..=self.hi).contains(&x) {
            return Err(Error::DomainTooSmall(format!(
                "feature {x} outside codec range [{}, {}]",
                self.lo, self.hi
            )));
        }
        let span = self.hi - self.lo;
        let max = (self.levels() - 1) as f64;
        Ok(((x - self.lo) / span * max).round() as u64)
    }

    pub fn decode_feature(&self, level: u64) -> f64 {
        let span = self.hi - self.lo;
        let max = (self.levels() - 1) as f64;
        self.lo + level as f64 / max * span
    }

    /// Concatenate per-feature codes into one `dim * bits_per_feature`-bit
    /// integer (low feature index in the low bits).
    pub fn encode(&self, x: &[f64]) -> Result<u64> {
        let total_bits = self.bits_per_feature as usize * x.len();
        if total_bits > 64 {
            return Err(Error::DomainTooSmall(format!(
                "{total_bits}-bit encoding exceeds the 64-bit code space"
            )));
        }
        let mut code = 0u64;
        for (i, v) in x.iter().enumerate() {
            code |= self.encode_feature(*v)? << (i as u32 * self.bits_per_feature);
        }
        Ok(code)
    }

    pub fn decode(&self, code: u64, dim: usize) -> Vec<f64> {
        let mask = self.levels() - 1;
        (0..dim)
            .map(|i| self.decode_feature((code >> (i as u32 * self.bits_per_feature)) & mask))
            .collect()
    }
}

/// Keys and encodings shared between the colluding trainer and adversary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollusionKeys {
    pub keys: Vec<u64>,
    pub codec: FeatureCodec,
    /// Number of model-input features being encoded.
    pub feature_dim: usize,
    /// Response encoding width (`m` in the advantage formula).
    pub m_bits: u32,
}

impl CollusionKeys {
    pub fn validate(&self) -> Result<()> {
        if self.keys.is_empty() {
            return Err(Error::Precondition("need at least one collusion key".into()));
        }
        if self.m_bits == 0 || self.m_bits > 32 || self.codec.bits_per_feature == 0 {
            return Err(Error::Precondition(
                "encoding widths must be in 1..=32 bits".into(),
            ));
        }
        if self.codec.bits_per_feature as usize * self.feature_dim > 64 {
            return Err(Error::DomainTooSmall(
                "feature encoding exceeds 64 bits".into(),
            ));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.keys.len()
    }

    /// Total feature-encoding width `d = log2 |X|`.
    pub fn d_bits(&self) -> u32 {
        self.codec.bits_per_feature * self.feature_dim as u32
    }

    fn code_mask(&self) -> u64 {
        if self.d_bits() == 64 {
            u64::MAX
        } else {
            (1u64 << self.d_bits()) - 1
        }
    }

    /// Keyed pseudorandom map `F_K : X -> X` on feature codes. Only the
    /// uniformity of the outputs matters for the advantage bound, so a
    /// counter-style mix of (key, code, domain tag) suffices.
    pub fn f_map(&self, key_index: usize, code: u64) -> u64 {
        prf(self.keys[key_index], code, 0) & self.code_mask()
    }

    /// Keyed pseudorandom map `G_K : X -> Y` onto `m_bits`-bit responses.
    pub fn g_map(&self, key_index: usize, code: u64) -> u64 {
        prf(self.keys[key_index], code, 1) & ((1u64 << self.m_bits) - 1)
    }

    /// The planted response as a `Value` (real-encoded label).
    pub fn g_value(&self, key_index: usize, code: u64) -> Value {
        Value::Real(self.g_map(key_index, code) as f64)
    }

    /// Draw `k` fresh keys from a stream.
    pub fn generate(
        k: usize,
        codec: FeatureCodec,
        feature_dim: usize,
        m_bits: u32,
        rng: &mut Stream,
    ) -> Result<Self> {
        use rand::Rng;
        let keys = (0..k).map(|_| rng.random()).collect();
        let out = CollusionKeys {
            keys,
            codec,
            feature_dim,
            m_bits,
        };
        out.validate()?;
        Ok(out)
    }
}

fn prf(key: u64, code: u64, domain: u64) -> u64 {
    splitmix(splitmix(splitmix(key) ^ code) ^ domain)
}

/// Serializable recipe for building [`CollusionKeys`] deterministically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollusionKeysConfig {
    pub key_seed: u64,
    pub k: usize,
    pub codec: FeatureCodec,
    pub feature_dim: usize,
    pub m_bits: u32,
}

impl CollusionKeysConfig {
    pub fn materialize(&self) -> CollusionKeys {
        let keys = (1..=self.k as u64)
            .map(|i| splitmix(self.key_seed.wrapping_add(i)))
            .collect();
        CollusionKeys {
            keys,
            codec: self.codec,
            feature_dim: self.feature_dim,
            m_bits: self.m_bits,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollusionMode {
    /// Wrap the base model with a lookup table of the `k n` planted pairs.
    /// This realizes the construction behind the advantage equality exactly:
    /// black-box behavior differs from the base model only on planted codes.
    Wrapped,
    /// Literally append the planted pairs to `S` and retrain the base
    /// trainer on the supplemented set. Best effort only: nothing forces the
    /// retrained model to reproduce the planted responses.
    RetrainSupplemented,
}

/// The wrapped model: planted code -> response table in front of the base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollusionWrapped {
    pub base: Box<Model>,
    pub codec: FeatureCodec,
    pub feature_dim: usize,
    table: BTreeMap<u64, Value>,
}

impl CollusionWrapped {
    pub fn predict(&self, x: &[f64]) -> Value {
        // un-encodable queries cannot hit a planted code; fall through
        if let Ok(code) = self.codec.encode(x) {
            if let Some(v) = self.table.get(&code) {
                return *v;
            }
        }
        self.base.predict(x)
    }

    pub fn planted_count(&self) -> usize {
        self.table.len()
    }

    pub fn is_planted(&self, code: u64) -> bool {
        self.table.contains_key(&code)
    }
}

/// Train the base algorithm and plant the `k n` keyed pairs
/// `(F_Kj(x_i), G_Kj(x_i))`. Earlier (key, point) pairs win code collisions,
/// which occur with probability on the order of `(kn)^2 2^-d`.
pub fn train_colluding(
    s: &Dataset,
    base: &Trainer,
    keys: &CollusionKeys,
    mode: CollusionMode,
    d: &SyntheticDistribution,
    rng: &mut Stream,
) -> Result<Model> {
    keys.validate()?;
    if s.input_dim() != keys.feature_dim {
        return Err(Error::Precondition(format!(
            "codec expects {} features, dataset has {}",
            keys.feature_dim,
            s.input_dim()
        )));
    }
    let mut planted: Vec<(u64, Value)> = Vec::with_capacity(keys.k() * s.len());
    for z in s.points() {
        let code = keys.codec.encode(&z.model_input())?;
        for j in 0..keys.k() {
            planted.push((keys.f_map(j, code), keys.g_value(j, code)));
        }
    }

    match mode {
        CollusionMode::Wrapped => {
            let base_model = base.train(s, d, rng)?;
            let mut table = BTreeMap::new();
            for (code, value) in planted {
                table.entry(code).or_insert(value);
            }
            Ok(Model::CollusionWrapped(CollusionWrapped {
                base: Box::new(base_model),
                codec: keys.codec,
                feature_dim: keys.feature_dim,
                table,
            }))
        }
        CollusionMode::RetrainSupplemented => {
            let has_target = s.point(0).target.is_some();
            let mut points = s.points().to_vec();
            for (code, value) in planted {
                let x = keys.codec.decode(code, keys.feature_dim);
                let point = if has_target {
                    let mut known = x;
                    let target = known.pop().unwrap();
                    DataPoint {
                        known,
                        target: Some(target),
                        response: value,
                    }
                } else {
                    DataPoint {
                        known: x,
                        target: None,
                        response: value,
                    }
                };
                points.push(point);
            }
            let supplemented = Dataset::new(points, s.provenance)?;
            base.train(&supplemented, d, rng)
        }
    }
}
