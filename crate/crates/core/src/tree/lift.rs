//! Isometric online lifts of tree metrics into l1 and l-infinity.
//!
//! Every tree vertex carries an l1 tuple; adjacent vertices differ in exactly
//! one coordinate. A point hanging off `s_x` by weight `w_x` copies the tuple
//! of `s_x` and appends a fresh coordinate equal to `w_x`. A vertex created on
//! an edge interpolates the single coordinate in which the edge's endpoints
//! differ.

use crate::host::{HostPointSet, Norm};
use crate::metric::{MetricSpace, PointId};
use crate::scalar::Scalar;

use super::{Attachment, SteinerRealizer, TreeError, VertexId, WeightedTree};

#[derive(Debug, Clone, PartialEq)]
pub struct L1Embedding<S> {
    /// Tuple per tree vertex; shorter tuples are implicitly zero-padded.
    vertex_coords: Vec<Vec<S>>,
    dim: usize,
}

fn coord<S: Scalar>(t: &[S], i: usize) -> S {
    t.get(i).cloned().unwrap_or_else(S::zero)
}

impl<S: Scalar> Default for L1Embedding<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> L1Embedding<S> {
    pub fn new() -> Self {
        L1Embedding { vertex_coords: Vec::new(), dim: 0 }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    fn set(&mut self, v: VertexId, t: Vec<S>) {
        if self.vertex_coords.len() <= v.0 {
            self.vertex_coords.resize(v.0 + 1, Vec::new());
        }
        self.vertex_coords[v.0] = t;
    }

    /// Tuple of vertex `v` padded to the current dimension.
    pub fn vertex_tuple(&self, v: VertexId) -> Vec<S> {
        let t = &self.vertex_coords[v.0];
        (0..self.dim).map(|i| coord(t, i)).collect()
    }

    pub fn point_tuple(&self, tree: &WeightedTree<S>, p: PointId) -> Result<Vec<S>, TreeError> {
        Ok(self.vertex_tuple(tree.vertex_of(p)?))
    }

    /// Applies the tree update for the newest point.
    pub fn extend(&mut self, att: &Attachment<S>) -> Result<(), TreeError> {
        if let Some(split) = &att.split {
            let (a, b) = (&self.vertex_coords[split.u.0], &self.vertex_coords[split.v.0]);
            let len = a.len().max(b.len());
            let differing: Vec<usize> = (0..len).filter(|&i| coord(a, i) != coord(b, i)).collect();
            let [c] = differing[..] else {
                return Err(TreeError::NotSingleCoordinate(split.u, split.v));
            };
            let (ac, bc) = (coord(a, c), coord(b, c));
            let step = if bc > ac { split.offset.clone() } else { -split.offset.clone() };
            let mut t = a.clone();
            if t.len() <= c {
                t.resize(c + 1, S::zero());
            }
            t[c] = ac + step;
            self.set(split.vertex, t);
        }
        match att.anchor {
            None => self.set(att.vertex, Vec::new()),
            Some(_) if att.merged() => {}
            Some(anchor) => {
                let mut t = self.vertex_tuple(anchor);
                t.push(att.weight.clone());
                self.dim += 1;
                self.set(att.vertex, t);
            }
        }
        Ok(())
    }

    /// The l1 images of all exposed points, padded to the current dimension.
    pub fn host(&self, tree: &WeightedTree<S>) -> Result<HostPointSet<S>, TreeError> {
        let coords = (0..tree.point_count())
            .map(|p| self.point_tuple(tree, PointId(p)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HostPointSet::Vectors { norm: Norm::L1, coords })
    }
}

/// Steiner realization followed by the l1 lift, advanced together.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeL1Embedder<S> {
    realizer: SteinerRealizer<S>,
    l1: L1Embedding<S>,
}

impl<S: Scalar> Default for TreeL1Embedder<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> TreeL1Embedder<S> {
    pub fn new() -> Self {
        TreeL1Embedder { realizer: SteinerRealizer::new(), l1: L1Embedding::new() }
    }

    pub fn extend(&mut self, space: &MetricSpace<S>, x: PointId) -> Result<Vec<S>, TreeError> {
        let att = self.realizer.extend(space, x)?.clone();
        self.l1.extend(&att)?;
        self.l1.point_tuple(self.realizer.tree(), x)
    }

    pub fn run(space: &MetricSpace<S>) -> Result<Self, TreeError> {
        let mut e = Self::new();
        for x in space.points() {
            e.extend(space, x)?;
        }
        Ok(e)
    }

    pub fn realizer(&self) -> &SteinerRealizer<S> {
        &self.realizer
    }

    pub fn l1(&self) -> &L1Embedding<S> {
        &self.l1
    }

    pub fn l1_host(&self) -> Result<HostPointSet<S>, TreeError> {
        self.l1.host(self.realizer.tree())
    }

    /// Exposed points' l1 tuples, each padded to `dim` coordinates.
    pub fn point_tuples(&self, dim: usize) -> Result<Vec<Vec<S>>, TreeError> {
        let tree = self.realizer.tree();
        (0..tree.point_count())
            .map(|p| {
                let mut t = self.l1.point_tuple(tree, PointId(p))?;
                if t.len() > dim {
                    return Err(TreeError::DimensionExceeded { declared: dim, got: t.len() });
                }
                t.resize(dim, S::zero());
                Ok(t)
            })
            .collect()
    }
}

/// Image of an l1 tuple under `x -> (<x, e>)_e` over all sign vectors `e`
/// whose first entry is `+1`. Coordinate `m` uses the sign vector whose
/// entries `1..dim` are the bits of `m` (bit set means `-1`).
pub fn lift_point<S: Scalar>(x: &[S], dim: usize) -> Vec<S> {
    let dim = dim.max(1);
    let count = 1usize << (dim - 1);
    (0..count)
        .map(|mask| {
            let mut acc = coord(x, 0);
            for i in 1..dim {
                let v = coord(x, i);
                if mask & (1 << (i - 1)) != 0 {
                    acc = acc - v;
                } else {
                    acc = acc + v;
                }
            }
            acc
        })
        .collect()
}

/// Online l-infinity lift with an l1 dimension fixed before the first point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinfLift {
    dim: usize,
}

impl LinfLift {
    pub fn new(declared_dim: Option<usize>) -> Result<Self, TreeError> {
        declared_dim.map(|dim| LinfLift { dim }).ok_or(TreeError::DimensionUnknown)
    }

    /// Number of l-infinity coordinates, `2^(D-1)`.
    pub fn output_dimension(&self) -> usize {
        1usize << (self.dim.max(1) - 1)
    }

    pub fn lift<S: Scalar>(&self, x: &[S]) -> Result<Vec<S>, TreeError> {
        if x.len() > self.dim && x[self.dim..].iter().any(|v| !v.is_zero()) {
            return Err(TreeError::DimensionExceeded { declared: self.dim, got: x.len() });
        }
        Ok(lift_point(x, self.dim))
    }
}

/// Lifts every tuple of an l1 point set into `l_inf^(2^(D-1))`.
pub fn l1_to_linf_lift<S: Scalar>(points: &[Vec<S>], declared_dim: Option<usize>) -> Result<HostPointSet<S>, TreeError> {
    let lift = LinfLift::new(declared_dim)?;
    let coords = points.iter().map(|p| lift.lift(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(HostPointSet::Vectors { norm: Norm::Linf, coords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::host::host_distance;
    use crate::scalar::{ratio, Rational};

    fn m(rows: &[&[i64]]) -> MetricSpace<Rational> {
        MetricSpace::from_matrix(rows.iter().map(|r| r.iter().map(|v| ratio(*v, 1)).collect()).collect()).unwrap()
    }

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|x| ratio(*x, 1)).collect()
    }

    #[test]
    fn star_metric_l1_coordinates() {
        let space = m(&[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]]);
        let e = TreeL1Embedder::run(&space).unwrap();
        let pts = e.point_tuples(2).unwrap();
        assert_eq!(pts, vec![r(&[0, 0]), r(&[2, 0]), r(&[1, 1])]);
        let tree = e.realizer().tree();
        let s = (0..tree.vertex_count()).map(VertexId).find(|v| e.realizer().attachments()[2].anchor == Some(*v)).unwrap();
        assert_eq!(e.l1().vertex_tuple(s), r(&[1, 0]));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(host_distance(&pts[i], &pts[j], Norm::L1).unwrap(), *space.d(i, j));
            }
        }
    }

    #[test]
    fn two_points() {
        let mut space = MetricSpace::<Rational>::new();
        space.expose_point(vec![]).unwrap();
        space.expose_point(vec![ratio(5, 2)]).unwrap();
        let e = TreeL1Embedder::run(&space).unwrap();
        assert_eq!(e.point_tuples(1).unwrap(), vec![r(&[0]), vec![ratio(5, 2)]]);
    }

    #[test]
    fn chain_is_exact() {
        let space = m(&[&[0, 1, 3], &[1, 0, 2], &[3, 2, 0]]);
        let e = TreeL1Embedder::run(&space).unwrap();
        assert_eq!(e.l1().dimension(), 2);
        let pts = e.point_tuples(2).unwrap();
        assert_eq!(pts[0], r(&[0, 0]));
        assert_eq!(pts[1], r(&[1, 0]));
        assert_eq!(pts[2], r(&[1, 2]));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(host_distance(&pts[i], &pts[j], Norm::L1).unwrap(), *space.d(i, j));
            }
        }
    }

    #[test]
    fn lift_in_one_dimension_is_identity() {
        assert_eq!(lift_point(&r(&[3]), 1), r(&[3]));
        assert_eq!(LinfLift::new(Some(1)).unwrap().output_dimension(), 1);
    }

    #[test]
    fn lift_in_two_dimensions() {
        let a = lift_point(&r(&[0, 0]), 2);
        let c = lift_point(&r(&[1, 1]), 2);
        let b = lift_point(&r(&[2, 0]), 2);
        assert_eq!(a, r(&[0, 0]));
        assert_eq!(c, r(&[2, 0]));
        assert_eq!(b, r(&[2, 2]));
        assert_eq!(host_distance(&a, &c, Norm::Linf).unwrap(), ratio(2, 1));
    }

    #[test]
    fn lift_needs_declared_dimension() {
        let pts = vec![r(&[0, 0])];
        assert_eq!(l1_to_linf_lift(&pts, None), Err(TreeError::DimensionUnknown));
        assert!(matches!(
            l1_to_linf_lift(&[r(&[1, 1, 1])], Some(2)),
            Err(TreeError::DimensionExceeded { .. })
        ));
    }
}
