//! Online isometric realization of tree metrics with Steiner points.
//!
//! For a new point `x` the attachment point `s_x` is the projection of `x`
//! onto the subtree spanned by the exposed points. Its distance from `x` is
//! the smallest Gromov product `g(u, v) = (d(u,x) + d(v,x) - d(u,v)) / 2`
//! over exposed pairs, and it sits on the `u–v` path at distance
//! `d(u,x) - g` from `u`. Among minimizing pairs the one with the largest
//! `d(u, v)` is used, then the lexicographically first.

use crate::metric::{MetricSpace, PointId};
use crate::scalar::Scalar;

use super::{TreeError, VertexId, VertexKind, WeightedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourPointViolation(pub [PointId; 4]);

impl From<FourPointViolation> for TreeError {
    fn from(v: FourPointViolation) -> Self {
        TreeError::NotATreeMetric(v.0)
    }
}

fn quadruple_ok<S: Scalar>(space: &MetricSpace<S>, a: usize, b: usize, c: usize, e: usize) -> bool {
    let d = |i, j| space.d(i, j).clone();
    let mut sums = [d(a, b) + d(c, e), d(a, c) + d(b, e), d(a, e) + d(b, c)];
    sums.sort_by(|x, y| x.partial_cmp(y).expect("comparable distances"));
    sums[2].tol_eq(&sums[1])
}

/// Checks the four-point condition on every quadruple: among the three
/// pairing sums, the two largest coincide.
pub fn four_point_check<S: Scalar>(space: &MetricSpace<S>) -> Result<(), FourPointViolation> {
    for x in 3..space.len() {
        four_point_check_point(space, PointId(x))?;
    }
    Ok(())
}

/// Four-point condition on the quadruples made of `x` and three earlier points.
pub fn four_point_check_point<S: Scalar>(space: &MetricSpace<S>, x: PointId) -> Result<(), FourPointViolation> {
    let x = x.0;
    for a in 0..x {
        for b in (a + 1)..x {
            for c in (b + 1)..x {
                if !quadruple_ok(space, a, b, c, x) {
                    return Err(FourPointViolation([PointId(a), PointId(b), PointId(c), PointId(x)]));
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit<S> {
    pub u: VertexId,
    pub v: VertexId,
    /// Distance of the new vertex from `u`.
    pub offset: S,
    pub vertex: VertexId,
}

/// How one exposed point entered the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Attachment<S> {
    pub point: PointId,
    pub vertex: VertexId,
    /// `s_x`; `None` for the root.
    pub anchor: Option<VertexId>,
    /// `w_x`; zero when the point landed on the tree (root, or merged).
    pub weight: S,
    /// Set when `s_x` was created by splitting an edge.
    pub split: Option<EdgeSplit<S>>,
    /// The exposed pair whose path carries `s_x`.
    pub pair: Option<(PointId, PointId)>,
}

impl<S: Scalar> Attachment<S> {
    /// True when the point coincides with its attachment point.
    pub fn merged(&self) -> bool {
        self.anchor == Some(self.vertex)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteinerRealizer<S> {
    tree: WeightedTree<S>,
    attachments: Vec<Attachment<S>>,
}

impl<S: Scalar> Default for SteinerRealizer<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> SteinerRealizer<S> {
    pub fn new() -> Self {
        SteinerRealizer { tree: WeightedTree::new(), attachments: Vec::new() }
    }

    pub fn tree(&self) -> &WeightedTree<S> {
        &self.tree
    }

    pub fn attachments(&self) -> &[Attachment<S>] {
        &self.attachments
    }

    /// Places `x`, the newest point of `space`. Fails with `NotATreeMetric`
    /// when a quadruple through `x` breaks the four-point condition; the
    /// state is unchanged on error.
    pub fn extend(&mut self, space: &MetricSpace<S>, x: PointId) -> Result<&Attachment<S>, TreeError> {
        if x.0 != self.tree.point_count() || x.0 >= space.len() {
            return Err(TreeError::OutOfOrder { expected: PointId(self.tree.point_count()), got: x });
        }
        four_point_check_point(space, x)?;
        let mut tree = self.tree.clone();
        let attachment = place(&mut tree, space, x)?;
        let xv = attachment.vertex;
        let from_x = tree.distances_from(xv);
        for p in 0..x.0 {
            let pv = tree.vertex_of(PointId(p))?;
            if !from_x[pv.0].tol_eq(space.d(x.0, p)) {
                return Err(TreeError::RealizationMismatch(x, PointId(p)));
            }
        }
        self.tree = tree;
        self.attachments.push(attachment);
        Ok(self.attachments.last().expect("just pushed"))
    }
}

fn place<S: Scalar>(tree: &mut WeightedTree<S>, space: &MetricSpace<S>, x: PointId) -> Result<Attachment<S>, TreeError> {
    let k = x.0;
    if k == 0 {
        let v = tree.add_root(x)?;
        return Ok(Attachment { point: x, vertex: v, anchor: None, weight: S::zero(), split: None, pair: None });
    }
    let d = |i: usize, j: usize| space.d(i, j).clone();
    // (g, d(u,v), u, v) of the chosen pair; a single earlier point acts as the pair (0, 0).
    let (g, u, v) = if k == 1 {
        (d(0, k), 0, 0)
    } else {
        let mut best: Option<(S, S, usize, usize)> = None;
        for u in 0..k {
            for v in (u + 1)..k {
                let g = (d(u, k) + d(v, k) - d(u, v)).half();
                let duv = d(u, v);
                let better = match &best {
                    None => true,
                    Some((bg, bd, _, _)) => g < *bg || (g == *bg && duv > *bd),
                };
                if better {
                    best = Some((g, duv, u, v));
                }
            }
        }
        let (g, _, u, v) = best.expect("k >= 2");
        (g, u, v)
    };
    let uv = tree.vertex_of(PointId(u))?;
    let vv = tree.vertex_of(PointId(v))?;
    let offset = d(u, k) - g.clone();
    let (anchor, split) = locate(tree, uv, vv, offset)?;
    let pair = Some((PointId(u), PointId(v)));
    let zero = S::zero();
    if g.tol_eq(&zero) || g <= zero {
        match tree.kind(anchor) {
            VertexKind::Steiner(_) => {
                tree.mark_exposed(anchor, x)?;
                Ok(Attachment { point: x, vertex: anchor, anchor: Some(anchor), weight: zero, split, pair })
            }
            VertexKind::Exposed(p) => Err(TreeError::RealizationMismatch(x, p)),
        }
    } else {
        let vertex = tree.attach_point(x, anchor, g.clone())?;
        Ok(Attachment { point: x, vertex, anchor: Some(anchor), weight: g, split, pair })
    }
}

/// Finds (or creates) the vertex at distance `offset` from `from` on the path
/// to `to`.
pub(crate) fn locate<S: Scalar>(
    tree: &mut WeightedTree<S>,
    from: VertexId,
    to: VertexId,
    offset: S,
) -> Result<(VertexId, Option<EdgeSplit<S>>), TreeError> {
    let path = tree.path(from, to)?;
    let mut walked = S::zero();
    if offset.tol_eq(&walked) || offset < walked {
        return Ok((from, None));
    }
    for (a, b, w) in path.edges {
        let end = walked.clone() + w.clone();
        if offset.tol_eq(&end) {
            return Ok((b, None));
        }
        if offset < end {
            let local = offset - walked;
            let s = tree.split_edge(a, b, local.clone())?;
            return Ok((s, Some(EdgeSplit { u: a, v: b, offset: local, vertex: s })));
        }
        walked = end;
    }
    Ok((to, None))
}

/// Realizes a whole tree metric, exposing its points in order.
pub fn realize_tree_metric<S: Scalar>(space: &MetricSpace<S>) -> Result<SteinerRealizer<S>, TreeError> {
    let mut r = SteinerRealizer::new();
    for x in space.points() {
        r.extend(space, x)?;
    }
    Ok(r)
}
