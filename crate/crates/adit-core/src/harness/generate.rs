//! Deterministic generation of networks, schemas, datasets and queries,
//! plus CSV ingestion and partitioning.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::heuristics::{NetworkProfile, PeerProfile};
use crate::local_engine::PeerStore;
use crate::model::{
    AttributeDef, AttributeKind, AttributeValue, ObjectRecord, ObjectiveKind, Query, Restriction,
};
use crate::model::RelationSchema;

use super::config::{DatasetSpec, ExperimentConfig, PartitionStrategy, QuerySpec};

// Distinct rng streams per generation stage, so adding a stage never shifts
// the draws of another.
const STREAM_NETWORK: u64 = 0x4e45_5457;
const STREAM_DATA: u64 = 0x4441_5441;
const STREAM_QUERY: u64 = 0x5155_4552;
const STREAM_PARTITION: u64 = 0x5041_5254;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn uniform_usize(rng: &mut ChaCha8Rng, range: [usize; 2]) -> usize {
    rng.gen_range(range[0]..=range[1])
}

fn uniform_f64(rng: &mut ChaCha8Rng, range: [f64; 2]) -> f64 {
    if range[0] == range[1] {
        range[0]
    } else {
        rng.gen_range(range[0]..range[1])
    }
}

/// Draws peer profiles from the configured ranges. Same seed, same network.
pub fn generate_network(config: &ExperimentConfig, seed: u64) -> Result<NetworkProfile> {
    config.validate()?;
    let mut rng = rng_for(seed, STREAM_NETWORK);
    let peers = (0..config.peer_count as u32)
        .map(|peer_id| PeerProfile {
            peer_id,
            objects_stored: uniform_usize(&mut rng, config.per_peer_size_range),
            speed: uniform_f64(&mut rng, config.speed_range),
            trans_rate_mbit: uniform_f64(&mut rng, config.trans_rate_range),
            msg_cost_seconds: uniform_f64(&mut rng, config.msg_cost_range),
            object_size_bytes: config.object_size_bytes,
        })
        .collect();
    NetworkProfile::new(peers)
}

/// Builds the schema implied by a synthetic dataset spec: the first
/// `round(arity * categorical_fraction)` attributes categorical, the rest
/// numeric over [0, 100].
pub fn synthetic_schema(spec: &DatasetSpec) -> Result<RelationSchema> {
    let DatasetSpec::UniformRandom {
        arity,
        categorical_fraction,
        domain_size,
    } = spec
    else {
        return Err(Error::Config(
            "synthetic_schema requires a uniform_random dataset".into(),
        ));
    };
    let categorical_count = (*arity as f64 * categorical_fraction).round() as usize;
    let attributes = (0..*arity)
        .map(|i| {
            if i < categorical_count {
                AttributeDef {
                    name: format!("c{i}"),
                    kind: AttributeKind::Categorical {
                        domain: (0..*domain_size).map(|t| format!("t{t}")).collect(),
                    },
                }
            } else {
                AttributeDef {
                    name: format!("n{i}"),
                    kind: AttributeKind::Numeric {
                        min: 0.0,
                        max: 100.0,
                    },
                }
            }
        })
        .collect();
    Ok(RelationSchema {
        name: "census".into(),
        attributes,
    })
}

/// Generates `count` objects with uniform per-attribute draws.
pub fn generate_dataset(schema: &RelationSchema, count: usize, seed: u64) -> Vec<ObjectRecord> {
    let mut rng = rng_for(seed, STREAM_DATA);
    (0..count as u64)
        .map(|object_id| ObjectRecord {
            object_id,
            attributes: schema
                .attributes
                .iter()
                .map(|attr| match &attr.kind {
                    AttributeKind::Categorical { domain } => {
                        AttributeValue::Categorical(rng.gen_range(0..domain.len() as u32))
                    }
                    AttributeKind::Numeric { min, max } => {
                        AttributeValue::Numeric(rng.gen_range(*min..*max))
                    }
                })
                .collect(),
        })
        .collect()
}

/// Draws one query: `restriction_count` distinct attributes with uniform
/// targets and weights in [0.5, 2.0].
pub fn generate_query(
    schema: &RelationSchema,
    spec: &QuerySpec,
    seed: u64,
) -> Result<Query> {
    if spec.restriction_count > schema.arity() {
        return Err(Error::Config(format!(
            "query needs {} restrictions but relation has arity {}",
            spec.restriction_count,
            schema.arity()
        )));
    }
    let mut rng = rng_for(seed.wrapping_add(spec.k as u64), STREAM_QUERY);
    let mut indices: Vec<usize> = (0..schema.arity()).collect();
    indices.shuffle(&mut rng);
    indices.truncate(spec.restriction_count);
    indices.sort_unstable();
    let restrictions = indices
        .into_iter()
        .map(|attribute_index| {
            let target = match &schema.attributes[attribute_index].kind {
                AttributeKind::Categorical { domain } => {
                    AttributeValue::Categorical(rng.gen_range(0..domain.len() as u32))
                }
                AttributeKind::Numeric { min, max } => {
                    AttributeValue::Numeric(rng.gen_range(*min..*max))
                }
            };
            Restriction {
                attribute_index,
                target,
                weight: rng.gen_range(0.5..2.0),
            }
        })
        .collect();
    let query = Query {
        relation: schema.name.clone(),
        k: spec.k,
        restrictions,
        objective: ObjectiveKind::WeightedAverage,
    };
    query.validate(schema)?;
    Ok(query)
}

/// Parses a dataset CSV: header of attribute names, one record per line.
/// A leading `object_id` column is optional; ids are auto-assigned when it
/// is absent.
pub fn load_csv(text: &str, schema: &RelationSchema) -> Result<Vec<ObjectRecord>> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let has_id = columns.first() == Some(&"object_id");
    let attr_columns = if has_id { &columns[1..] } else { &columns[..] };
    if attr_columns.len() != schema.arity() {
        return Err(Error::Csv {
            line: 1,
            message: format!(
                "header has {} attribute columns, schema declares {}",
                attr_columns.len(),
                schema.arity()
            ),
        });
    }
    for (i, (col, attr)) in attr_columns.iter().zip(&schema.attributes).enumerate() {
        if *col != attr.name {
            return Err(Error::Csv {
                line: 1,
                message: format!(
                    "column {} is `{}`, schema declares `{}`",
                    i + 1,
                    col,
                    attr.name
                ),
            });
        }
    }

    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, row) in lines {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(Error::Csv {
                line,
                message: format!("expected {} fields, found {}", columns.len(), fields.len()),
            });
        }
        let (object_id, values) = if has_id {
            let id = fields[0].parse::<u64>().map_err(|e| Error::Csv {
                line,
                message: format!("bad object id `{}`: {e}", fields[0]),
            })?;
            (id, &fields[1..])
        } else {
            (records.len() as u64, &fields[..])
        };
        if !seen.insert(object_id) {
            return Err(Error::DuplicateObjectId(object_id));
        }
        let attributes = values
            .iter()
            .zip(&schema.attributes)
            .map(|(field, attr)| match &attr.kind {
                AttributeKind::Numeric { .. } => {
                    field.parse::<f64>().map(AttributeValue::Numeric).map_err(
                        |e| Error::Csv {
                            line,
                            message: format!("bad numeric value `{field}`: {e}"),
                        },
                    )
                }
                AttributeKind::Categorical { domain } => domain
                    .iter()
                    .position(|t| t == field)
                    .map(|i| AttributeValue::Categorical(i as u32))
                    .ok_or_else(|| Error::UnknownToken {
                        attribute: attr.name.clone(),
                        token: field.to_string(),
                    }),
            })
            .collect::<Result<Vec<_>>>()?;
        records.push(ObjectRecord {
            object_id,
            attributes,
        });
    }
    Ok(records)
}

/// Distributes the dataset over the peers as a disjoint cover and updates
/// the profiles' `objects_stored` to the actual counts.
pub fn partition_data(
    dataset: Vec<ObjectRecord>,
    network: &mut NetworkProfile,
    strategy: PartitionStrategy,
    seed: u64,
) -> Result<Vec<PeerStore>> {
    let n = network.peers.len();
    let mut buckets: Vec<Vec<ObjectRecord>> = (0..n).map(|_| Vec::new()).collect();
    match strategy {
        PartitionStrategy::RoundRobin => {
            for (i, obj) in dataset.into_iter().enumerate() {
                buckets[i % n].push(obj);
            }
        }
        PartitionStrategy::SizeWeighted => {
            // Largest-remainder allocation proportional to the profile's
            // objects_stored targets, then contiguous assignment.
            let total_target: usize = network.peers.iter().map(|p| p.objects_stored).sum();
            let count = dataset.len();
            let mut quotas: Vec<(usize, f64)> = network
                .peers
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let exact = if total_target == 0 {
                        count as f64 / n as f64
                    } else {
                        count as f64 * p.objects_stored as f64 / total_target as f64
                    };
                    (i, exact)
                })
                .collect();
            let mut alloc: Vec<usize> = quotas.iter().map(|(_, q)| q.floor() as usize).collect();
            let mut assigned: usize = alloc.iter().sum();
            quotas.sort_by(|a, b| {
                (b.1 - b.1.floor())
                    .partial_cmp(&(a.1 - a.1.floor()))
                    .unwrap()
                    .then(a.0.cmp(&b.0))
            });
            let mut qi = 0;
            while assigned < count {
                alloc[quotas[qi % n].0] += 1;
                assigned += 1;
                qi += 1;
            }
            let mut it = dataset.into_iter();
            for (i, take) in alloc.into_iter().enumerate() {
                buckets[i] = it.by_ref().take(take).collect();
            }
        }
        PartitionStrategy::Shuffled => {
            let mut rng = rng_for(seed, STREAM_PARTITION);
            for obj in dataset {
                buckets[rng.gen_range(0..n)].push(obj);
            }
        }
    }
    let stores = network
        .peers
        .iter()
        .zip(buckets)
        .map(|(p, objects)| PeerStore::new(p.peer_id, objects))
        .collect::<Result<Vec<_>>>()?;
    for (profile, store) in network.peers.iter_mut().zip(&stores) {
        profile.objects_stored = store.len();
    }
    network.refresh_aggregates();
    Ok(stores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::default_config;

    #[test]
    fn same_seed_same_network() {
        let config = default_config();
        let a = generate_network(&config, 7).unwrap();
        let b = generate_network(&config, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_network(&config, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn network_sizes_within_range() {
        let mut config = default_config();
        config.peer_count = 49;
        config.per_peer_size_range = [5000, 500_000];
        let net = generate_network(&config, 1).unwrap();
        assert_eq!(net.peers.len(), 49);
        for p in &net.peers {
            assert!((5000..=500_000).contains(&p.objects_stored));
            assert!((1.0..=10.0).contains(&p.speed));
        }
    }

    #[test]
    fn singleton_network_aggregates() {
        let mut config = default_config();
        config.peer_count = 1;
        let net = generate_network(&config, 3).unwrap();
        assert_eq!(net.max_speed_n, net.peers[0].speed);
        assert_eq!(net.objects_stored_n, net.peers[0].objects_stored);
    }

    #[test]
    fn synthetic_dataset_shape() {
        let spec = DatasetSpec::UniformRandom {
            arity: 68,
            categorical_fraction: 1.0,
            domain_size: 16,
        };
        let schema = synthetic_schema(&spec).unwrap();
        assert_eq!(schema.arity(), 68);
        let data = generate_dataset(&schema, 1000, 5);
        assert_eq!(data.len(), 1000);
        for obj in &data {
            assert_eq!(obj.attributes.len(), 68);
        }
        assert_eq!(data, generate_dataset(&schema, 1000, 5));
    }

    fn small_schema() -> RelationSchema {
        RelationSchema {
            name: "r".into(),
            attributes: vec![
                AttributeDef {
                    name: "color".into(),
                    kind: AttributeKind::Categorical {
                        domain: vec!["red".into(), "blue".into()],
                    },
                },
                AttributeDef {
                    name: "size".into(),
                    kind: AttributeKind::Numeric {
                        min: 0.0,
                        max: 10.0,
                    },
                },
            ],
        }
    }

    #[test]
    fn csv_round_trip() {
        let schema = small_schema();
        let text = "object_id,color,size\n7,red,3.5\n9,blue,1.0\n";
        let records = load_csv(text, &schema).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].object_id, 7);
        assert_eq!(records[1].attributes[0], AttributeValue::Categorical(1));
    }

    #[test]
    fn csv_without_id_column() {
        let schema = small_schema();
        let records = load_csv("color,size\nred,1\nblue,2\n", &schema).unwrap();
        assert_eq!(records[0].object_id, 0);
        assert_eq!(records[1].object_id, 1);
    }

    #[test]
    fn csv_empty_is_empty() {
        let schema = small_schema();
        assert!(load_csv("", &schema).unwrap().is_empty());
        assert!(load_csv("object_id,color,size\n", &schema).unwrap().is_empty());
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let schema = small_schema();
        let err = load_csv("object_id,color,size\n1,red,3.5\n2,red\n", &schema).unwrap_err();
        assert!(matches!(err, Error::Csv { line: 3, .. }), "{err}");
        let err = load_csv("object_id,color,size\n1,green,3.5\n", &schema).unwrap_err();
        assert!(
            matches!(err, Error::UnknownToken { ref attribute, .. } if attribute == "color"),
            "{err}"
        );
        let err = load_csv("object_id,color,size\n1,red,3\n1,blue,4\n", &schema).unwrap_err();
        assert!(matches!(err, Error::DuplicateObjectId(1)));
    }

    #[test]
    fn partition_is_disjoint_cover() {
        let config = default_config();
        for strategy in [
            PartitionStrategy::RoundRobin,
            PartitionStrategy::SizeWeighted,
            PartitionStrategy::Shuffled,
        ] {
            let mut net = generate_network(&config, 11).unwrap();
            let schema = synthetic_schema(&config.dataset).unwrap();
            let data = generate_dataset(&schema, 537, 11);
            let stores = partition_data(data.clone(), &mut net, strategy, 11).unwrap();
            let mut ids: Vec<u64> = stores
                .iter()
                .flat_map(|s| s.objects.iter().map(|o| o.object_id))
                .collect();
            ids.sort_unstable();
            let mut expected: Vec<u64> = data.iter().map(|o| o.object_id).collect();
            expected.sort_unstable();
            assert_eq!(ids, expected);
            for (p, s) in net.peers.iter().zip(&stores) {
                assert_eq!(p.objects_stored, s.len());
            }
        }
    }

    #[test]
    fn round_robin_exact_division() {
        let mut config = default_config();
        config.peer_count = 5;
        let mut net = generate_network(&config, 2).unwrap();
        let schema = synthetic_schema(&config.dataset).unwrap();
        let data = generate_dataset(&schema, 10, 2);
        let stores = partition_data(data, &mut net, PartitionStrategy::RoundRobin, 2).unwrap();
        for s in &stores {
            assert_eq!(s.len(), 2);
        }
    }

    #[test]
    fn single_peer_gets_everything() {
        let mut config = default_config();
        config.peer_count = 1;
        let mut net = generate_network(&config, 2).unwrap();
        let schema = synthetic_schema(&config.dataset).unwrap();
        let data = generate_dataset(&schema, 37, 2);
        let stores = partition_data(data, &mut net, PartitionStrategy::SizeWeighted, 2).unwrap();
        assert_eq!(stores[0].len(), 37);
    }
}
