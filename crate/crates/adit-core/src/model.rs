//! Domain types and scoring semantics shared by every other module.
//!
//! A relation is a flat schema of numeric and categorical attributes.
//! Queries carry weighted restrictions; the objective is a weighted average
//! of per-restriction similarities, which is monotone non-decreasing in each
//! similarity. That monotonicity is what makes the publish threshold exact.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Identifier of a peer in the network. Peers are always iterated in
/// ascending id order so executions are deterministic.
pub type PeerId = u32;

/// Globally unique object identifier.
pub type ObjectId = u64;

/// A single attribute value. Categorical values are stored as an index into
/// the declared domain of the attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AttributeValue {
    Numeric(f64),
    Categorical(u32),
}

impl AttributeValue {
    pub fn is_numeric(&self) -> bool {
        matches!(self, AttributeValue::Numeric(_))
    }
}

/// Declared kind of one attribute in the relation schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttributeKind {
    /// Numeric attribute with a declared domain. The range comes from schema
    /// metadata, not observed data, so scores are stable under partitioning.
    Numeric { min: f64, max: f64 },
    /// Categorical attribute over a finite token domain.
    Categorical { domain: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeDef {
    pub name: String,
    #[serde(flatten)]
    pub kind: AttributeKind,
}

/// Schema of the single horizontally partitioned relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSchema {
    pub name: String,
    pub attributes: Vec<AttributeDef>,
}

impl RelationSchema {
    pub fn arity(&self) -> usize {
        self.attributes.len()
    }
}

/// A tuple with an id and an attribute vector; the unit being ranked.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRecord {
    pub object_id: ObjectId,
    pub attributes: Vec<AttributeValue>,
}

/// One weighted restriction of a query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Restriction {
    pub attribute_index: usize,
    pub target: AttributeValue,
    pub weight: f64,
}

/// A top-k query: how many objects, which restrictions, which objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub relation: String,
    pub k: usize,
    pub restrictions: Vec<Restriction>,
    pub objective: ObjectiveKind,
}

/// Kind of monotone objective. Only the weighted average is implemented;
/// the enum keeps the contract extensible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    WeightedAverage,
}

impl Query {
    /// Checks the query against a schema: k >= 1, indices in range, target
    /// kinds matching, and at least one positive weight.
    pub fn validate(&self, schema: &RelationSchema) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("query k must be >= 1".into()));
        }
        if self.relation != schema.name {
            return Err(Error::RelationMismatch {
                query: self.relation.clone(),
                store: schema.name.clone(),
            });
        }
        let arity = schema.arity();
        let mut any_positive = false;
        for r in &self.restrictions {
            if r.attribute_index >= arity {
                return Err(Error::AttributeOutOfRange {
                    index: r.attribute_index,
                    arity,
                });
            }
            if r.weight < 0.0 || !r.weight.is_finite() {
                return Err(Error::Config(format!(
                    "restriction on attribute {} has invalid weight {}",
                    r.attribute_index, r.weight
                )));
            }
            let numeric_attr = matches!(
                schema.attributes[r.attribute_index].kind,
                AttributeKind::Numeric { .. }
            );
            if numeric_attr != r.target.is_numeric() {
                return Err(Error::KindMismatch {
                    attribute: r.attribute_index,
                });
            }
            if r.weight > 0.0 {
                any_positive = true;
            }
        }
        if !any_positive {
            return Err(Error::AllWeightsZero);
        }
        Ok(())
    }
}

/// An object together with its score and the peer it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredObject {
    pub object: ObjectRecord,
    pub score: f64,
    pub origin_peer: PeerId,
}

impl ScoredObject {
    /// Total order used everywhere ordering matters: score descending, then
    /// peer id ascending, then object id ascending.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .partial_cmp(&self.score)
            .unwrap_or(Ordering::Equal)
            .then(self.origin_peer.cmp(&other.origin_peer))
            .then(self.object.object_id.cmp(&other.object.object_id))
    }
}

/// Similarity of one attribute value against one restriction, in [0, 1].
///
/// Numeric: `1 - |value - target| / domain_range`, clamped to [0, 1]; a zero
/// domain range degenerates to equality. Categorical: 1 iff equal.
pub fn similarity(
    value: AttributeValue,
    restriction: &Restriction,
    attr: &AttributeDef,
) -> Result<f64> {
    match (value, restriction.target) {
        (AttributeValue::Numeric(v), AttributeValue::Numeric(t)) => {
            let range = match &attr.kind {
                AttributeKind::Numeric { min, max } => max - min,
                AttributeKind::Categorical { .. } => {
                    return Err(Error::KindMismatch {
                        attribute: restriction.attribute_index,
                    })
                }
            };
            if range == 0.0 {
                Ok(if v == t { 1.0 } else { 0.0 })
            } else {
                Ok((1.0 - (v - t).abs() / range).clamp(0.0, 1.0))
            }
        }
        (AttributeValue::Categorical(v), AttributeValue::Categorical(t)) => {
            Ok(if v == t { 1.0 } else { 0.0 })
        }
        _ => Err(Error::KindMismatch {
            attribute: restriction.attribute_index,
        }),
    }
}

/// Scores an object against a query: `sum(w_i * sim_i) / sum(w_i)`.
///
/// Pure and deterministic; monotone non-decreasing in every per-restriction
/// similarity because all weights are nonnegative.
pub fn score(object: &ObjectRecord, query: &Query, schema: &RelationSchema) -> Result<f64> {
    if object.attributes.len() != schema.arity() {
        return Err(Error::ArityMismatch {
            object_id: object.object_id,
            expected: schema.arity(),
            actual: object.attributes.len(),
        });
    }
    let mut num = 0.0;
    let mut denom = 0.0;
    for r in &query.restrictions {
        let attr = schema
            .attributes
            .get(r.attribute_index)
            .ok_or(Error::AttributeOutOfRange {
                index: r.attribute_index,
                arity: schema.arity(),
            })?;
        let sim = similarity(object.attributes[r.attribute_index], r, attr)?;
        num += r.weight * sim;
        denom += r.weight;
    }
    if denom == 0.0 {
        return Err(Error::AllWeightsZero);
    }
    Ok(num / denom)
}
