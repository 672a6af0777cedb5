//! JSON file formats for metrics, host point sets, trees, line embeddings
//! and duel transcripts.
//!
//! Rationals are written as `"p/q"` strings and floats as JSON numbers;
//! both decoders accept either form.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use crate::adversary::DuelTranscript;
use crate::host::{HostError, HostPointSet, Norm};
use crate::line::LineState;
use crate::metric::{MetricError, MetricSpace, PointId};
use crate::scalar::{Backend, ParseScalarError, Rational, Scalar};
use crate::tree::{TreeError, VertexId, VertexKind, WeightedTree};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Scalar(#[from] ParseScalarError),
    #[error("bad file format: {0}")]
    Format(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Host(#[from] HostError),
}

fn format_err(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

pub fn read_json(path: &Path) -> Result<Value, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|source| IoError::File { path: path.display().to_string(), source })
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, IoError> {
    v.as_array().ok_or_else(|| format_err(format!("{what} must be an array")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, IoError> {
    v.get(key).ok_or_else(|| format_err(format!("missing field {key:?}")))
}

fn decode_row<S: Scalar>(row: &Value, what: &str) -> Result<Vec<S>, IoError> {
    array(row, what)?.iter().map(|x| Ok(S::decode(x)?)).collect()
}

fn encode_row<S: Scalar>(row: &[S]) -> Value {
    Value::Array(row.iter().map(Scalar::encode).collect())
}

/// A metric read from a file, in the backend the file declares.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMetric {
    Rational(MetricSpace<Rational>),
    Float(MetricSpace<f64>),
}

impl AnyMetric {
    pub fn backend(&self) -> Backend {
        match self {
            AnyMetric::Rational(_) => Backend::Rational,
            AnyMetric::Float(_) => Backend::Float,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnyMetric::Rational(m) => m.len(),
            AnyMetric::Float(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn metric_to_json<S: Scalar>(space: &MetricSpace<S>) -> Value {
    let rows: Vec<Value> = space.to_matrix().iter().map(|r| encode_row(r)).collect();
    json!({ "backend": S::BACKEND.to_string(), "dist": rows })
}

/// Reads the full distance matrix into backend `S`, ignoring the declared
/// backend.
pub fn metric_from_json_as<S: Scalar>(v: &Value) -> Result<MetricSpace<S>, IoError> {
    let rows = array(field(v, "dist")?, "dist")?;
    let matrix = rows.iter().map(|r| decode_row(r, "dist row")).collect::<Result<Vec<_>, _>>()?;
    Ok(MetricSpace::from_matrix(matrix)?)
}

pub fn metric_from_json(v: &Value) -> Result<AnyMetric, IoError> {
    let backend: Backend = match v.get("backend") {
        None => Backend::Rational,
        Some(b) => b.as_str().ok_or_else(|| format_err("backend must be a string"))?.parse().map_err(IoError::Format)?,
    };
    Ok(match backend {
        Backend::Rational => AnyMetric::Rational(metric_from_json_as(v)?),
        Backend::Float => AnyMetric::Float(metric_from_json_as(v)?),
    })
}

pub fn tree_to_json<S: Scalar>(tree: &WeightedTree<S>) -> Value {
    let vertices: Vec<Value> = (0..tree.vertex_count())
        .map(|i| match tree.kind(VertexId(i)) {
            VertexKind::Exposed(p) => json!({ "id": i, "kind": "exposed", "point": p.0 }),
            VertexKind::Steiner(serial) => json!({ "id": i, "kind": "steiner", "serial": serial }),
        })
        .collect();
    let edges: Vec<Value> = tree.edges().into_iter().map(|(u, v, w)| json!([u.0, v.0, w.encode()])).collect();
    json!({ "vertices": vertices, "edges": edges })
}

fn as_index(v: &Value, what: &str) -> Result<usize, IoError> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| format_err(format!("{what} must be a non-negative integer")))
}

pub fn tree_from_json<S: Scalar>(v: &Value) -> Result<WeightedTree<S>, IoError> {
    let vertices = array(field(v, "vertices")?, "vertices")?;
    let mut kinds = Vec::with_capacity(vertices.len());
    let mut steiner_seen = 0;
    for (i, vert) in vertices.iter().enumerate() {
        if as_index(field(vert, "id")?, "vertex id")? != i {
            return Err(format_err(format!("vertex ids must be 0..n in order, found a mismatch at {i}")));
        }
        let kind = match field(vert, "kind")?.as_str() {
            Some("exposed") => VertexKind::Exposed(PointId(as_index(field(vert, "point")?, "point")?)),
            Some("steiner") => {
                let serial = match vert.get("serial") {
                    Some(s) => as_index(s, "serial")?,
                    None => steiner_seen,
                };
                steiner_seen += 1;
                VertexKind::Steiner(serial)
            }
            _ => return Err(format_err("vertex kind must be \"exposed\" or \"steiner\"")),
        };
        kinds.push(kind);
    }
    let edges = array(field(v, "edges")?, "edges")?
        .iter()
        .map(|e| {
            let e = array(e, "edge")?;
            if e.len() != 3 {
                return Err(format_err("edges are [u, v, w] triples"));
            }
            Ok((VertexId(as_index(&e[0], "edge endpoint")?), VertexId(as_index(&e[1], "edge endpoint")?), S::decode(&e[2])?))
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(WeightedTree::from_parts(kinds, edges)?)
}

/// `{"norm", "coords"}` for coordinate hosts; trees use `"norm": "tree"`
/// and carry the tree under `"tree"`.
pub fn host_to_json<S: Scalar>(host: &HostPointSet<S>) -> Value {
    match host {
        HostPointSet::Vectors { norm, coords } => {
            json!({ "norm": norm.to_string(), "coords": coords.iter().map(|c| encode_row(c)).collect::<Vec<_>>() })
        }
        HostPointSet::Tree(t) => json!({ "norm": "tree", "tree": tree_to_json(t) }),
    }
}

pub fn host_from_json<S: Scalar>(v: &Value) -> Result<HostPointSet<S>, IoError> {
    let norm = field(v, "norm")?.as_str().ok_or_else(|| format_err("norm must be a string"))?;
    if norm == "tree" {
        return Ok(HostPointSet::Tree(tree_from_json(field(v, "tree")?)?));
    }
    let norm: Norm = norm.parse().map_err(IoError::Format)?;
    let coords = if let Some(pos) = v.get("pos") {
        decode_row::<S>(pos, "pos")?.into_iter().map(|p| vec![p]).collect()
    } else {
        array(field(v, "coords")?, "coords")?.iter().map(|r| decode_row(r, "coordinate tuple")).collect::<Result<Vec<_>, _>>()?
    };
    Ok(HostPointSet::vectors(norm, coords)?)
}

/// Positions and fathers of a line embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct LineEmbeddingFile<S> {
    pub pos: Vec<S>,
    pub father: Vec<Option<PointId>>,
}

impl<S: Scalar> From<&LineState<S>> for LineEmbeddingFile<S> {
    fn from(state: &LineState<S>) -> Self {
        LineEmbeddingFile { pos: state.positions().to_vec(), father: state.fathers().to_vec() }
    }
}

impl<S: Scalar> LineEmbeddingFile<S> {
    pub fn to_json(&self) -> Value {
        let father: Vec<Value> = self.father.iter().map(|f| f.map_or(Value::Null, |p| json!(p.0))).collect();
        json!({ "norm": "line", "pos": encode_row(&self.pos), "father": father })
    }

    pub fn from_json(v: &Value) -> Result<Self, IoError> {
        if field(v, "norm")?.as_str() != Some("line") {
            return Err(format_err("a line embedding has \"norm\": \"line\""));
        }
        let pos = decode_row(field(v, "pos")?, "pos")?;
        let father = array(field(v, "father")?, "father")?
            .iter()
            .map(|f| if f.is_null() { Ok(None) } else { as_index(f, "father").map(|p| Some(PointId(p))) })
            .collect::<Result<Vec<_>, _>>()?;
        if father.len() != pos.len() {
            return Err(format_err("pos and father differ in length"));
        }
        Ok(LineEmbeddingFile { pos, father })
    }
}

pub fn read_transcript(path: &Path) -> Result<DuelTranscript, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })?;
    Ok(DuelTranscript::from_json_str(&text)?)
}

pub fn write_transcript(path: &Path, t: &DuelTranscript) -> Result<(), IoError> {
    fs::write(path, t.to_json_string() + "\n").map_err(|source| IoError::File { path: path.display().to_string(), source })
}
