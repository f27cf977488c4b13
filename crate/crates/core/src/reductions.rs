//! Oracle-based reductions between membership and attribute inference.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use crate::attribute::{adv_general_attribute, AttributeGuess, AttributeSchema, PublicView};
use crate::data::{DataPoint, Dataset, LossSpec};
use crate::error::Result;
use crate::membership::{adv_bounded_loss, adv_threshold, MembershipGuess};
use crate::models::{CollusionKeys, Model};
use crate::rng::{splitmix, Stream};

/// A membership adversary usable as a reduction oracle.
pub trait MembershipOracle: Sync {
    fn query(&self, z: &DataPoint, model: &Model, rng: &mut Stream) -> Result<MembershipGuess>;
}

/// An attribute adversary usable as a reduction oracle.
pub trait AttributeOracle: Sync {
    fn query(&self, view: &PublicView, model: &Model, rng: &mut Stream)
        -> Result<AttributeGuess>;
}

impl<O: MembershipOracle + ?Sized> MembershipOracle for &O {
    fn query(&self, z: &DataPoint, model: &Model, rng: &mut Stream) -> Result<MembershipGuess> {
        (**self).query(z, model, rng)
    }
}

impl<O: AttributeOracle + ?Sized> AttributeOracle for &O {
    fn query(
        &self,
        view: &PublicView,
        model: &Model,
        rng: &mut Stream,
    ) -> Result<AttributeGuess> {
        (**self).query(view, model, rng)
    }
}

/// Wraps an oracle and counts queries (one increment per call).
pub struct OracleHandle<T> {
    inner: T,
    calls: AtomicU64,
}

impl<T> OracleHandle<T> {
    pub fn new(inner: T) -> Self {
        OracleHandle {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn into_inner(self) -> T {
        self.inner
    }
}

impl<T: MembershipOracle> OracleHandle<T> {
    pub fn query_membership(
        &self,
        z: &DataPoint,
        model: &Model,
        rng: &mut Stream,
    ) -> Result<MembershipGuess> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.query(z, model, rng)
    }
}

impl<T: AttributeOracle> OracleHandle<T> {
    pub fn query_attribute(
        &self,
        view: &PublicView,
        model: &Model,
        rng: &mut Stream,
    ) -> Result<AttributeGuess> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.query(view, model, rng)
    }
}

/// Membership from an attribute oracle: predict the target from the public
/// view; claim membership iff the prediction matches the true target. One
/// oracle query per challenge; its membership advantage equals the oracle's
/// attribute advantage identically.
pub fn red_membership_from_attribute<T: AttributeOracle>(
    z: &DataPoint,
    model: &Model,
    oracle: &OracleHandle<T>,
    schema: &AttributeSchema,
    rng: &mut Stream,
) -> Result<MembershipGuess> {
    let truth = schema.target_of(z)?;
    let guess = oracle.query_attribute(&schema.public_view(z), model, rng)?;
    let correct = guess.value == Some(truth);
    Ok(MembershipGuess {
        bit: u8::from(!correct),
        score: None,
    })
}

/// Attribute from a membership oracle, uniform variant: draw a target
/// uniformly, rebuild the point with it, and output that target iff the
/// oracle claims membership. One oracle query per challenge.
pub fn red_attribute_uniform<T: MembershipOracle>(
    view: &PublicView,
    model: &Model,
    oracle: &OracleHandle<T>,
    schema: &AttributeSchema,
    rng: &mut Stream,
) -> Result<AttributeGuess> {
    let i = rng.random_range(0..schema.m());
    let candidate = schema.with_target(view, schema.targets[i]);
    let answer = oracle.query_membership(&candidate, model, rng)?;
    Ok(AttributeGuess {
        value: (answer.bit == 0).then_some(schema.targets[i]),
        posterior_scores: Vec::new(),
    })
}

/// Attribute from a membership oracle, multi-query variant: try every
/// target completion (exactly `m` oracle queries), collect the accepted
/// ones, and return the accepted target with the largest prior (ties to the
/// lowest index); abstain if none is accepted.
pub fn red_attribute_multiquery<T: MembershipOracle>(
    view: &PublicView,
    model: &Model,
    oracle: &OracleHandle<T>,
    schema: &AttributeSchema,
    rng: &mut Stream,
) -> Result<AttributeGuess> {
    let mut best: Option<usize> = None;
    for i in 0..schema.m() {
        let candidate = schema.with_target(view, schema.targets[i]);
        let answer = oracle.query_membership(&candidate, model, rng)?;
        if answer.bit == 0 && best.is_none_or(|b| schema.prior[i] > schema.prior[b]) {
            best = Some(i);
        }
    }
    Ok(AttributeGuess {
        value: best.map(|i| schema.targets[i]),
        posterior_scores: Vec::new(),
    })
}

// ---- built-in oracle adapters -------------------------------------------

/// Threshold membership adversary with fixed sigmas.
pub struct ThresholdOracle {
    pub sigma_s: f64,
    pub sigma_d: Option<f64>,
}

impl MembershipOracle for ThresholdOracle {
    fn query(&self, z: &DataPoint, model: &Model, _rng: &mut Stream) -> Result<MembershipGuess> {
        adv_threshold(z, model, self.sigma_s, self.sigma_d)
    }
}

/// Bounded-loss membership adversary.
pub struct BoundedLossOracle {
    pub loss: LossSpec,
}

impl MembershipOracle for BoundedLossOracle {
    fn query(&self, z: &DataPoint, model: &Model, rng: &mut Stream) -> Result<MembershipGuess> {
        adv_bounded_loss(z, model, &self.loss, rng)
    }
}

/// Colluding membership adversary.
pub struct CollusionOracle {
    pub keys: CollusionKeys,
}

impl MembershipOracle for CollusionOracle {
    fn query(&self, z: &DataPoint, model: &Model, _rng: &mut Stream) -> Result<MembershipGuess> {
        crate::membership::adv_colluding(z, model, &self.keys)
    }
}

/// The general attribute adversary as an oracle.
pub struct GeneralAttributeOracle {
    pub schema: AttributeSchema,
    pub sigma_guess: f64,
}

impl AttributeOracle for GeneralAttributeOracle {
    fn query(
        &self,
        view: &PublicView,
        model: &Model,
        _rng: &mut Stream,
    ) -> Result<AttributeGuess> {
        adv_general_attribute(view, model, &self.schema, self.sigma_guess)
    }
}

/// Always answers the same target; advantage 0 by construction.
pub struct ConstantAttributeOracle {
    pub value: f64,
}

impl AttributeOracle for ConstantAttributeOracle {
    fn query(&self, _: &PublicView, _: &Model, _: &mut Stream) -> Result<AttributeGuess> {
        Ok(AttributeGuess {
            value: Some(self.value),
            posterior_scores: Vec::new(),
        })
    }
}

/// Deterministic pseudorandom target choice keyed on the view; a nontrivial
/// deterministic oracle for exactness checks.
pub struct HashAttributeOracle {
    pub schema: AttributeSchema,
    pub key: u64,
}

impl AttributeOracle for HashAttributeOracle {
    fn query(&self, view: &PublicView, _: &Model, _: &mut Stream) -> Result<AttributeGuess> {
        let mut h = splitmix(self.key);
        for v in &view.known {
            h = splitmix(h ^ v.to_bits());
        }
        if let crate::data::Value::Real(y) = view.response {
            h = splitmix(h ^ y.to_bits());
        }
        let i = (h % self.schema.m() as u64) as usize;
        Ok(AttributeGuess {
            value: Some(self.schema.targets[i]),
            posterior_scores: Vec::new(),
        })
    }
}

/// Test oracle with exact membership knowledge and tunable accept rates:
/// answers "member" with probability `accept_member` on actual members of
/// the reference set and `accept_nonmember` elsewhere. Its modified
/// membership advantage is `accept_member - accept_nonmember` up to the
/// resampling mass `mu`.
pub struct PlantedMembershipOracle<'a> {
    pub members: &'a Dataset,
    pub accept_member: f64,
    pub accept_nonmember: f64,
}

impl MembershipOracle for PlantedMembershipOracle<'_> {
    fn query(&self, z: &DataPoint, _: &Model, rng: &mut Stream) -> Result<MembershipGuess> {
        let p = if self.members.contains(z) {
            self.accept_member
        } else {
            self.accept_nonmember
        };
        Ok(MembershipGuess {
            bit: u8::from(!rng.random_bool(p)),
            score: None,
        })
    }
}
