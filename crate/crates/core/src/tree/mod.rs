//! Weighted trees with exposed and Steiner vertices, and the online
//! embedders whose host is a tree.

mod greedy;
mod lift;
pub(crate) mod steiner;

pub use greedy::{greedy_expansion_bound, GreedyTreeState};
pub use lift::{l1_to_linf_lift, lift_point, L1Embedding, LinfLift, TreeL1Embedder};
pub use steiner::{
    four_point_check, four_point_check_point, realize_tree_metric, Attachment, EdgeSplit, FourPointViolation,
    SteinerRealizer,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{MetricError, PointId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Exposed(PointId),
    /// Auxiliary vertex; the payload is a serial number among Steiner vertices.
    Steiner(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("vertex {0:?} does not exist")]
    UnknownVertex(VertexId),
    #[error("point {0} has no vertex in the tree")]
    UnknownPoint(PointId),
    #[error("edge weights must be positive")]
    NonPositiveWeight,
    #[error("({0:?}, {1:?}) is not an edge")]
    NotAnEdge(VertexId, VertexId),
    #[error("split offset must lie strictly inside the edge")]
    OffsetOutOfRange,
    #[error("expected point {expected} next, got {got}")]
    OutOfOrder { expected: PointId, got: PointId },
    #[error("vertex {0:?} is not a Steiner vertex")]
    NotSteiner(VertexId),
    #[error("not a tree metric: four-point condition fails on ({}, {}, {}, {})", .0[0], .0[1], .0[2], .0[3])]
    NotATreeMetric([PointId; 4]),
    #[error("tree realization does not reproduce d({0}, {1})")]
    RealizationMismatch(PointId, PointId),
    #[error("the l-infinity lift needs the l1 dimension before the first exposure")]
    DimensionUnknown,
    #[error("l1 dimension {got} exceeds the declared dimension {declared}")]
    DimensionExceeded { declared: usize, got: usize },
    #[error("adjacent vertices {0:?} and {1:?} differ in more than one coordinate")]
    NotSingleCoordinate(VertexId, VertexId),
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// The unique path between two tree vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct TreePath<S> {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId, S)>,
}

impl<S: Scalar> TreePath<S> {
    pub fn length(&self) -> S {
        self.edges.iter().fold(S::zero(), |acc, e| acc + e.2.clone())
    }
}

/// A positively weighted tree. Vertices are either exposed points or
/// Steiner points; the first exposed point is the root.
#[derive(Debug, Clone)]
pub struct WeightedTree<S> {
    kinds: Vec<VertexKind>,
    adj: Vec<Vec<(VertexId, S)>>,
    point_vertex: Vec<Option<VertexId>>,
    steiner_serial: usize,
}

/// Trees are equal when they have the same vertex kinds and edge sets,
/// whatever order the adjacency lists were built in.
impl<S: PartialEq> PartialEq for WeightedTree<S> {
    fn eq(&self, other: &Self) -> bool {
        self.kinds == other.kinds && self.point_vertex == other.point_vertex && sorted_edges(&self.adj) == sorted_edges(&other.adj)
    }
}

fn sorted_edges<S>(adj: &[Vec<(VertexId, S)>]) -> Vec<(VertexId, VertexId, &S)> {
    let mut out = Vec::new();
    for (u, nbrs) in adj.iter().enumerate() {
        for (v, w) in nbrs {
            if u < v.0 {
                out.push((VertexId(u), *v, w));
            }
        }
    }
    out.sort_by_key(|e| (e.0, e.1));
    out
}

impl<S: Scalar> Default for WeightedTree<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> WeightedTree<S> {
    pub fn new() -> Self {
        WeightedTree { kinds: Vec::new(), adj: Vec::new(), point_vertex: Vec::new(), steiner_serial: 0 }
    }

    /// Builds a tree from vertex kinds and an edge list, checking that it is
    /// connected and acyclic with positive weights and that the exposed
    /// points are numbered `0..m` without repeats.
    pub fn from_parts(kinds: Vec<VertexKind>, edges: Vec<(VertexId, VertexId, S)>) -> Result<Self, TreeError> {
        let mut t = WeightedTree::new();
        let mut points: Vec<Option<VertexId>> = Vec::new();
        for kind in kinds {
            let v = t.push_vertex(kind);
            match kind {
                VertexKind::Exposed(p) => {
                    if points.len() <= p.0 {
                        points.resize(p.0 + 1, None);
                    }
                    if points[p.0].replace(v).is_some() {
                        return Err(TreeError::Malformed(format!("point {p} appears twice")));
                    }
                }
                VertexKind::Steiner(serial) => t.steiner_serial = t.steiner_serial.max(serial + 1),
            }
        }
        if let Some(p) = points.iter().position(Option::is_none) {
            return Err(TreeError::UnknownPoint(PointId(p)));
        }
        t.point_vertex = points;
        for (u, v, w) in edges {
            t.check_vertex(u)?;
            t.check_vertex(v)?;
            if w <= S::zero() {
                return Err(TreeError::NonPositiveWeight);
            }
            if u == v || t.edge_weight(u, v).is_some() {
                return Err(TreeError::Malformed(format!("repeated edge ({u:?}, {v:?})")));
            }
            t.adj[u.0].push((v, w.clone()));
            t.adj[v.0].push((u, w));
        }
        if !t.is_connected_acyclic() {
            return Err(TreeError::Malformed("not connected and acyclic".into()));
        }
        Ok(t)
    }

    pub fn vertex_count(&self) -> usize {
        self.kinds.len()
    }

    pub fn point_count(&self) -> usize {
        self.point_vertex.len()
    }

    pub fn steiner_count(&self) -> usize {
        self.kinds.iter().filter(|k| matches!(k, VertexKind::Steiner(_))).count()
    }

    pub fn root(&self) -> Option<VertexId> {
        self.point_vertex.first().copied().flatten()
    }

    pub fn kind(&self, v: VertexId) -> VertexKind {
        self.kinds[v.0]
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, S)] {
        &self.adj[v.0]
    }

    pub fn vertex_of(&self, p: PointId) -> Result<VertexId, TreeError> {
        self.point_vertex.get(p.0).copied().flatten().ok_or(TreeError::UnknownPoint(p))
    }

    /// Every edge once, as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId, S)> {
        sorted_edges(&self.adj).into_iter().map(|(u, v, w)| (u, v, w.clone())).collect()
    }

    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<&S> {
        self.adj.get(u.0)?.iter().find(|(x, _)| *x == v).map(|(_, w)| w)
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), TreeError> {
        if v.0 < self.kinds.len() {
            Ok(())
        } else {
            Err(TreeError::UnknownVertex(v))
        }
    }

    fn check_next_point(&self, p: PointId) -> Result<(), TreeError> {
        let expected = PointId(self.point_vertex.len());
        if p == expected {
            Ok(())
        } else {
            Err(TreeError::OutOfOrder { expected, got: p })
        }
    }

    fn push_vertex(&mut self, kind: VertexKind) -> VertexId {
        self.kinds.push(kind);
        self.adj.push(Vec::new());
        VertexId(self.kinds.len() - 1)
    }

    pub fn add_root(&mut self, p: PointId) -> Result<VertexId, TreeError> {
        self.check_next_point(p)?;
        if !self.kinds.is_empty() {
            return Err(TreeError::OutOfOrder { expected: PointId(self.point_vertex.len()), got: p });
        }
        let v = self.push_vertex(VertexKind::Exposed(p));
        self.point_vertex.push(Some(v));
        Ok(v)
    }

    /// Attaches the next exposed point to `parent` by an edge of weight `w > 0`.
    pub fn attach_point(&mut self, p: PointId, parent: VertexId, w: S) -> Result<VertexId, TreeError> {
        self.check_next_point(p)?;
        self.check_vertex(parent)?;
        if w <= S::zero() {
            return Err(TreeError::NonPositiveWeight);
        }
        let v = self.push_vertex(VertexKind::Exposed(p));
        self.adj[parent.0].push((v, w.clone()));
        self.adj[v.0].push((parent, w));
        self.point_vertex.push(Some(v));
        Ok(v)
    }

    /// Inserts a Steiner vertex on edge `(u, v)` at distance `offset` from `u`.
    pub fn split_edge(&mut self, u: VertexId, v: VertexId, offset: S) -> Result<VertexId, TreeError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let w = self.edge_weight(u, v).cloned().ok_or(TreeError::NotAnEdge(u, v))?;
        if offset <= S::zero() || offset >= w {
            return Err(TreeError::OffsetOutOfRange);
        }
        let serial = self.steiner_serial;
        self.steiner_serial += 1;
        let s = self.push_vertex(VertexKind::Steiner(serial));
        let rest = w - offset.clone();
        for (x, wx) in self.adj[u.0].iter_mut() {
            if *x == v {
                *x = s;
                *wx = offset.clone();
            }
        }
        for (x, wx) in self.adj[v.0].iter_mut() {
            if *x == u {
                *x = s;
                *wx = rest.clone();
            }
        }
        self.adj[s.0].push((u, offset));
        self.adj[s.0].push((v, rest));
        Ok(s)
    }

    /// Turns a Steiner vertex into the vertex of the next exposed point (a
    /// zero-length attachment).
    pub fn mark_exposed(&mut self, v: VertexId, p: PointId) -> Result<(), TreeError> {
        self.check_next_point(p)?;
        self.check_vertex(v)?;
        match self.kinds[v.0] {
            VertexKind::Steiner(_) => {
                self.kinds[v.0] = VertexKind::Exposed(p);
                self.point_vertex.push(Some(v));
                Ok(())
            }
            VertexKind::Exposed(_) => Err(TreeError::NotSteiner(v)),
        }
    }

    /// Parent pointers of a traversal rooted at `from`.
    fn parents_from(&self, from: VertexId) -> Vec<Option<(VertexId, S)>> {
        let mut parent: Vec<Option<(VertexId, S)>> = vec![None; self.kinds.len()];
        let mut seen = vec![false; self.kinds.len()];
        let mut stack = vec![from];
        seen[from.0] = true;
        while let Some(x) = stack.pop() {
            for (y, w) in &self.adj[x.0] {
                if !seen[y.0] {
                    seen[y.0] = true;
                    parent[y.0] = Some((x, w.clone()));
                    stack.push(*y);
                }
            }
        }
        parent
    }

    pub fn path(&self, u: VertexId, v: VertexId) -> Result<TreePath<S>, TreeError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        let parent = self.parents_from(u);
        let mut vertices = vec![v];
        let mut edges = Vec::new();
        let mut cur = v;
        while cur != u {
            let (p, w) = parent[cur.0].clone().ok_or(TreeError::UnknownVertex(cur))?;
            edges.push((p, cur, w));
            vertices.push(p);
            cur = p;
        }
        vertices.reverse();
        edges.reverse();
        Ok(TreePath { vertices, edges })
    }

    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<S, TreeError> {
        Ok(self.path(u, v)?.length())
    }

    pub fn point_distance(&self, a: PointId, b: PointId) -> Result<S, TreeError> {
        self.distance(self.vertex_of(a)?, self.vertex_of(b)?)
    }

    /// Distances from `from` to every vertex.
    pub fn distances_from(&self, from: VertexId) -> Vec<S> {
        let mut dist = vec![S::zero(); self.kinds.len()];
        let mut seen = vec![false; self.kinds.len()];
        let mut stack = vec![from];
        seen[from.0] = true;
        while let Some(x) = stack.pop() {
            for (y, w) in &self.adj[x.0] {
                if !seen[y.0] {
                    seen[y.0] = true;
                    dist[y.0] = dist[x.0].clone() + w.clone();
                    stack.push(*y);
                }
            }
        }
        dist
    }

    /// Pairwise tree distances between all exposed points.
    pub fn point_distance_matrix(&self) -> Result<Vec<Vec<S>>, TreeError> {
        (0..self.point_count())
            .map(|a| {
                let from = self.vertex_of(PointId(a))?;
                let all = self.distances_from(from);
                (0..self.point_count())
                    .map(|b| Ok(all[self.vertex_of(PointId(b))?.0].clone()))
                    .collect()
            })
            .collect()
    }

    /// Whether the paths `a–b` and `c–d` share at least one vertex.
    pub fn paths_intersect(&self, (a, b): (VertexId, VertexId), (c, d): (VertexId, VertexId)) -> Result<bool, TreeError> {
        let first = self.path(a, b)?.vertices;
        let second = self.path(c, d)?.vertices;
        let mut mark = vec![false; self.kinds.len()];
        for v in first {
            mark[v.0] = true;
        }
        Ok(second.iter().any(|v| mark[v.0]))
    }

    pub fn point_paths_intersect(&self, (a, b): (PointId, PointId), (c, d): (PointId, PointId)) -> Result<bool, TreeError> {
        self.paths_intersect(
            (self.vertex_of(a)?, self.vertex_of(b)?),
            (self.vertex_of(c)?, self.vertex_of(d)?),
        )
    }

    pub fn is_connected_acyclic(&self) -> bool {
        let n = self.kinds.len();
        if n == 0 {
            return true;
        }
        let edges: usize = self.adj.iter().map(Vec::len).sum::<usize>() / 2;
        let reached = self.parents_from(VertexId(0)).iter().filter(|p| p.is_some()).count() + 1;
        edges + 1 == n && reached == n
    }
}
