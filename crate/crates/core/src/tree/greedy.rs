use crate::host::HostPointSet;
use crate::metric::{MetricSpace, PointId};
use crate::scalar::Scalar;

use super::{TreeError, VertexId, WeightedTree};

/// Greedy online tree embedding without Steiner points: every new point is
/// joined to its closest predecessor by an edge of the true distance.
///
/// The resulting tree metric dominates `d`, and after `k` points its
/// expansion is at most `2^(k-1) - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTreeState<S> {
    tree: WeightedTree<S>,
    father: Vec<Option<PointId>>,
}

impl<S: Scalar> Default for GreedyTreeState<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> GreedyTreeState<S> {
    pub fn new() -> Self {
        GreedyTreeState { tree: WeightedTree::new(), father: Vec::new() }
    }

    pub fn tree(&self) -> &WeightedTree<S> {
        &self.tree
    }

    pub fn father(&self, x: PointId) -> Option<PointId> {
        self.father.get(x.0).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.father.len()
    }

    pub fn is_empty(&self) -> bool {
        self.father.is_empty()
    }

    /// Attaches `x`, which must be the newest point of `space`.
    pub fn extend(&mut self, space: &MetricSpace<S>, x: PointId) -> Result<VertexId, TreeError> {
        if x.0 != self.father.len() || x.0 >= space.len() {
            return Err(TreeError::OutOfOrder { expected: PointId(self.father.len()), got: x });
        }
        let v = match space.closest_predecessor(x) {
            None => self.tree.add_root(x)?,
            Some(f) => {
                let at = self.tree.vertex_of(f)?;
                self.tree.attach_point(x, at, space.dist(x, f).clone())?
            }
        };
        self.father.push(space.closest_predecessor(x));
        Ok(v)
    }

    /// Embeds every point of `space` in exposure order.
    pub fn run(space: &MetricSpace<S>) -> Result<Self, TreeError> {
        let mut state = Self::new();
        for x in space.points() {
            state.extend(space, x)?;
        }
        Ok(state)
    }

    pub fn host(&self) -> HostPointSet<S> {
        HostPointSet::Tree(self.tree.clone())
    }
}

/// Upper bound `2^(k-1) - 1` on the expansion after `k >= 2` points
/// (`alpha_2 = 1`, `alpha_{k+1} <= 2 alpha_k + 1`).
pub fn greedy_expansion_bound<S: Scalar>(k: usize) -> S {
    assert!(k >= 2, "the bound starts at two points");
    S::pow2(k as i32 - 1) - S::one()
}
