//! Exhaustive reference answer for exactness checks.

use crate::local_engine::PeerStore;
use crate::model::{score, Query, RelationSchema, ScoredObject};

/// Full scan over every peer store: score everything, sort by the global
/// deterministic order, take k. Independent of the iterative protocol path.
pub fn brute_force_top_k(
    stores: &[PeerStore],
    query: &Query,
    schema: &RelationSchema,
    k: usize,
) -> crate::error::Result<Vec<ScoredObject>> {
    let mut all = Vec::new();
    for store in stores {
        for obj in &store.objects {
            all.push(ScoredObject {
                object: obj.clone(),
                score: score(obj, query, schema)?,
                origin_peer: store.peer_id,
            });
        }
    }
    all.sort_by(|a, b| a.rank_cmp(b));
    all.truncate(k);
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        AttributeDef, AttributeKind, AttributeValue, ObjectRecord, ObjectiveKind, Restriction,
    };

    fn schema() -> RelationSchema {
        RelationSchema {
            name: "r".into(),
            attributes: vec![AttributeDef {
                name: "x".into(),
                kind: AttributeKind::Numeric { min: 0.0, max: 1.0 },
            }],
        }
    }

    fn stores() -> Vec<PeerStore> {
        let mk = |peer, ids: &[(u64, f64)]| {
            PeerStore::new(
                peer,
                ids.iter()
                    .map(|(id, v)| ObjectRecord {
                        object_id: *id,
                        attributes: vec![AttributeValue::Numeric(*v)],
                    })
                    .collect(),
            )
            .unwrap()
        };
        vec![
            mk(0, &[(0, 0.3), (1, 0.9)]),
            mk(1, &[(2, 0.9), (3, 0.1)]),
        ]
    }

    fn query(k: usize) -> Query {
        Query {
            relation: "r".into(),
            k,
            restrictions: vec![Restriction {
                attribute_index: 0,
                target: AttributeValue::Numeric(1.0),
                weight: 1.0,
            }],
            objective: ObjectiveKind::WeightedAverage,
        }
    }

    #[test]
    fn takes_global_argmax() {
        let top = brute_force_top_k(&stores(), &query(1), &schema(), 1).unwrap();
        assert_eq!(top.len(), 1);
        // ties at 0.9 break toward the lower peer id
        assert_eq!(top[0].origin_peer, 0);
        assert_eq!(top[0].object.object_id, 1);
    }

    #[test]
    fn k_beyond_size_returns_everything_sorted() {
        let top = brute_force_top_k(&stores(), &query(100), &schema(), 100).unwrap();
        assert_eq!(top.len(), 4);
        assert!(top.windows(2).all(|w| w[0].score >= w[1].score));
    }
}
