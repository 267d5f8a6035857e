//! JSON formats for spaces, maps, partitions of unity, groups and
//! homomorphisms.

use std::sync::Arc;

use num_rational::Rational64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactness::PartitionOfUnity;
use crate::groups::{Element, Group, GroupHom, PermGroup};
use crate::maps::LsMap;
use crate::scalar::{parse_scalar, Extended, Scalar};
use crate::space::{FiniteMetricSpace, PointMetric};

/// A loaded space: exact for graph and explicit metrics, floating for point
/// clouds.
#[derive(Clone, Debug)]
pub enum LoadedSpace {
    Exact(FiniteMetricSpace<Rational64>),
    Float(FiniteMetricSpace<f64>),
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum SpaceJson {
    Graph {
        nodes: Vec<Value>,
        edges: Vec<(usize, usize, Value)>,
        basepoint: Option<usize>,
    },
    Points {
        metric: String,
        coords: Vec<Vec<f64>>,
        basepoint: Option<usize>,
    },
    Explicit {
        dist: Vec<Vec<Value>>,
        labels: Option<Vec<String>>,
        basepoint: Option<usize>,
    },
}

fn value_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Reads a scale from a JSON number or string (`"p/q"`, decimals, `"inf"`).
pub fn parse_extended<T: Scalar>(v: &Value) -> Result<Extended<T>> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => return Err(Error::Parse(format!("expected a distance, got {other}"))),
    };
    if matches!(text.trim(), "inf" | "Infinity" | "infinity") {
        return Ok(Extended::Infinite);
    }
    parse_scalar(&text)
        .map(Extended::Finite)
        .ok_or_else(|| Error::Parse(format!("cannot read `{text}` as a distance")))
}

pub fn parse_space(text: &str) -> Result<LoadedSpace> {
    let json: SpaceJson = serde_json::from_str(text)?;
    match json {
        SpaceJson::Graph {
            nodes,
            edges,
            basepoint,
        } => {
            let labels = nodes.iter().map(value_label).collect();
            let edges = edges
                .iter()
                .map(|(a, b, w)| match parse_extended::<Rational64>(w)? {
                    Extended::Finite(w) => Ok((*a, *b, w)),
                    Extended::Infinite => Err(Error::Parse("edge weights must be finite".into())),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(LoadedSpace::Exact(FiniteMetricSpace::graph(labels, &edges, basepoint)?))
        }
        SpaceJson::Points {
            metric,
            coords,
            basepoint,
        } => {
            let metric = match metric.as_str() {
                "euclidean" => PointMetric::Euclidean,
                "linf" => PointMetric::Linf,
                "l1" => PointMetric::L1,
                other => return Err(Error::Parse(format!("unknown point metric `{other}`"))),
            };
            Ok(LoadedSpace::Float(FiniteMetricSpace::points(&coords, metric, basepoint)?))
        }
        SpaceJson::Explicit {
            dist,
            labels,
            basepoint,
        } => {
            let n = dist.len();
            let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
            let matrix = dist
                .iter()
                .map(|row| row.iter().map(parse_extended).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(LoadedSpace::Exact(FiniteMetricSpace::from_matrix(labels, matrix, basepoint)?))
        }
    }
}

fn scale_json<T: Scalar>(d: Extended<T>) -> Value {
    match d {
        Extended::Infinite => json!("inf"),
        Extended::Finite(v) => {
            let text = v.to_string();
            serde_json::from_str::<serde_json::Number>(&text)
                .map(Value::Number)
                .unwrap_or(Value::String(text))
        }
    }
}

/// Explicit-metric JSON for any space.
pub fn space_to_json<T: Scalar>(space: &FiniteMetricSpace<T>) -> Value {
    let n = space.len();
    let dist: Vec<Vec<Value>> = (0..n)
        .map(|i| (0..n).map(|j| scale_json(space.dist(i, j))).collect())
        .collect();
    let mut out = json!({
        "type": "explicit",
        "labels": space.labels(),
        "dist": dist,
    });
    if let Some(b) = space.basepoint() {
        out["basepoint"] = json!(b);
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapJson {
    values: Vec<usize>,
}

/// Reads `{"values": [...]}` between two given spaces.
pub fn parse_map<T: Scalar>(
    text: &str,
    domain: Arc<FiniteMetricSpace<T>>,
    codomain: Arc<FiniteMetricSpace<T>>,
) -> Result<LsMap<T>> {
    let json: MapJson = serde_json::from_str(text)?;
    LsMap::new(domain, codomain, json.values)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PouJson {
    vertices: Vec<Value>,
    rows: Vec<Vec<(usize, f64)>>,
}

pub fn parse_pou(text: &str) -> Result<PartitionOfUnity> {
    let json: PouJson = serde_json::from_str(text)?;
    PartitionOfUnity::new(json.vertices.iter().map(value_label).collect(), json.rows)
}

pub fn pou_to_json(phi: &PartitionOfUnity) -> Value {
    json!({ "vertices": phi.vertices, "rows": phi.rows })
}

fn param_usize(params: &Value, key: &str) -> Result<usize> {
    params
        .get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::InvalidGroup(format!("missing integer parameter `{key}`")))
}

/// Reads `{"builtin": "...", "params": {...}}`.
pub fn group_from_value(v: &Value) -> Result<Group> {
    let name = v
        .get("builtin")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidGroup("group needs a `builtin` tag".into()))?;
    let empty = json!({});
    let params = v.get("params").unwrap_or(&empty);
    match name {
        "zn" => Ok(Group::Zn(param_usize(params, "n")?)),
        "free" => Ok(Group::Free(param_usize(params, "k")?)),
        "lamplighter" => Ok(Group::Lamplighter),
        "perm" => {
            let degree = param_usize(params, "degree")?;
            let gens: Vec<Vec<u32>> = serde_json::from_value(
                params
                    .get("generators")
                    .cloned()
                    .ok_or_else(|| Error::InvalidGroup("missing `generators`".into()))?,
            )?;
            Ok(Group::Perm(Arc::new(PermGroup::new(degree, gens)?)))
        }
        "product" => {
            let factors = params
                .get("factors")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidGroup("missing `factors`".into()))?;
            Ok(Group::Product(factors.iter().map(group_from_value).collect::<Result<_>>()?))
        }
        other => Err(Error::InvalidGroup(format!("unknown builtin group `{other}`"))),
    }
}

pub fn parse_group(text: &str) -> Result<Group> {
    group_from_value(&serde_json::from_str(text)?)
}

/// Reads an element in the JSON form of its group.
pub fn element_from_value(group: &Group, v: &Value) -> Result<Element> {
    let bad = || Error::InvalidGroup(format!("cannot read element {v}"));
    let x = match group {
        Group::Zn(_) => Element::Zn(serde_json::from_value(v.clone()).map_err(|_| bad())?),
        Group::Free(_) => {
            let letters: Vec<i32> = serde_json::from_value(v.clone()).map_err(|_| bad())?;
            letters
                .iter()
                .map(|&l| Element::Free(vec![l]))
                .try_fold(group.identity(), |acc, l| {
                    if l == Element::Free(vec![0]) {
                        Err(bad())
                    } else {
                        group.validate(&l)?;
                        Ok(group.multiply(&acc, &l))
                    }
                })?
        }
        Group::Lamplighter => {
            #[derive(Deserialize)]
            struct Lamp {
                lamps: Vec<i64>,
                pos: i64,
            }
            let lamp: Lamp = serde_json::from_value(v.clone()).map_err(|_| bad())?;
            let mut lamps = lamp.lamps;
            lamps.sort_unstable();
            // Toggling twice switches a lamp off.
            let mut canonical: Vec<i64> = Vec::new();
            for s in lamps {
                if canonical.last() == Some(&s) {
                    canonical.pop();
                } else {
                    canonical.push(s);
                }
            }
            Element::Lamp {
                lamps: canonical,
                pos: lamp.pos,
            }
        }
        Group::Perm(_) => Element::Perm(serde_json::from_value(v.clone()).map_err(|_| bad())?),
        Group::Product(gs) => {
            let parts = v.as_array().ok_or_else(bad)?;
            if parts.len() != gs.len() {
                return Err(bad());
            }
            Element::Product(
                gs.iter()
                    .zip(parts)
                    .map(|(g, p)| element_from_value(g, p))
                    .collect::<Result<_>>()?,
            )
        }
    };
    group.validate(&x)?;
    Ok(x)
}

/// Reads `{"source": group, "target": group, "gen_images": [...]}`.
pub fn parse_hom(text: &str) -> Result<GroupHom> {
    let v: Value = serde_json::from_str(text)?;
    let source = group_from_value(v.get("source").ok_or_else(|| Error::InvalidHom("missing `source`".into()))?)?;
    let target = group_from_value(v.get("target").ok_or_else(|| Error::InvalidHom("missing `target`".into()))?)?;
    let images = v
        .get("gen_images")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidHom("missing `gen_images`".into()))?
        .iter()
        .map(|x| element_from_value(&target, x))
        .collect::<Result<Vec<_>>>()?;
    GroupHom::new(source, target, images)
}
