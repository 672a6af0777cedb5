//! Incrementally exposed finite metric spaces.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Index of a point in exposure order (0-based). Never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("new point needs {expected} distances, got {got}")]
    WrongRowLength { expected: usize, got: usize },
    #[error("distance between {i} and {j} is not positive")]
    NonPositiveDistance { i: PointId, j: PointId },
    #[error("triangle inequality fails: d({i},{j}) > d({i},{k}) + d({k},{j})")]
    TriangleViolation { i: PointId, j: PointId, k: PointId },
    #[error("matrix is not symmetric at ({i},{j})")]
    Asymmetric { i: PointId, j: PointId },
    #[error("diagonal entry for {0} is not zero")]
    NonZeroDiagonal(PointId),
    #[error("matrix is not square")]
    NotSquare,
    #[error("point {0} is not in the space")]
    UnknownPoint(PointId),
}

/// A finite metric that grows one point at a time.
///
/// Stored as a full symmetric matrix. Every exposure is validated against all
/// existing triples before the space is mutated, so an `Err` leaves the space
/// untouched.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> Default for MetricSpace<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> MetricSpace<S> {
    pub fn new() -> Self {
        MetricSpace { rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distance by raw index.
    pub fn d(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    pub fn dist(&self, a: PointId, b: PointId) -> &S {
        &self.rows[a.0][b.0]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.rows[i]
    }

    /// Distances from point `i` to every point exposed before it.
    pub fn history_row(&self, i: usize) -> &[S] {
        &self.rows[i][..i]
    }

    pub fn newest(&self) -> Option<PointId> {
        self.len().checked_sub(1).map(PointId)
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.len()).map(PointId)
    }

    /// Exposes a new point given its distances to all existing points, in
    /// exposure order.
    pub fn expose_point(&mut self, dists: Vec<S>) -> Result<PointId, MetricError> {
        let n = self.len();
        if dists.len() != n {
            return Err(MetricError::WrongRowLength { expected: n, got: dists.len() });
        }
        for (j, dj) in dists.iter().enumerate() {
            if *dj <= S::zero() {
                return Err(MetricError::NonPositiveDistance { i: PointId(n), j: PointId(j) });
            }
        }
        let x = PointId(n);
        for i in 0..n {
            for j in (i + 1)..n {
                let (dij, dix, djx) = (&self.rows[i][j], &dists[i], &dists[j]);
                if !dix.tol_le(&(dij.clone() + djx.clone())) {
                    return Err(MetricError::TriangleViolation { i: PointId(i), j: x, k: PointId(j) });
                }
                if !djx.tol_le(&(dij.clone() + dix.clone())) {
                    return Err(MetricError::TriangleViolation { i: PointId(j), j: x, k: PointId(i) });
                }
                if !dij.tol_le(&(dix.clone() + djx.clone())) {
                    return Err(MetricError::TriangleViolation { i: PointId(i), j: PointId(j), k: x });
                }
            }
        }
        for (row, dj) in self.rows.iter_mut().zip(dists.iter()) {
            row.push(dj.clone());
        }
        let mut new_row = dists;
        new_row.push(S::zero());
        self.rows.push(new_row);
        Ok(x)
    }

    /// Builds a space from a full matrix by exposing rows in order.
    pub fn from_matrix(matrix: Vec<Vec<S>>) -> Result<Self, MetricError> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(MetricError::NotSquare);
        }
        for i in 0..n {
            if !matrix[i][i].is_zero() {
                return Err(MetricError::NonZeroDiagonal(PointId(i)));
            }
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(MetricError::Asymmetric { i: PointId(j), j: PointId(i) });
                }
            }
        }
        let mut space = MetricSpace::new();
        for row in matrix {
            let k = space.len();
            space.expose_point(row[..k].to_vec())?;
        }
        Ok(space)
    }

    pub fn to_matrix(&self) -> Vec<Vec<S>> {
        self.rows.clone()
    }

    /// The submetric on the first `n` exposed points.
    pub fn prefix(&self, n: usize) -> Self {
        MetricSpace { rows: self.rows[..n].iter().map(|r| r[..n].to_vec()).collect() }
    }

    /// The same metric re-exposed in the order given by `perm` (new point `k` is
    /// old point `perm[k]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let rows = perm
            .iter()
            .map(|&a| perm.iter().map(|&b| self.rows[a][b].clone()).collect())
            .collect();
        MetricSpace { rows }
    }

    /// Re-checks every triple. Returns the first violation found.
    pub fn check_triangle(&self) -> Result<(), MetricError> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let bound = self.rows[i][k].clone() + self.rows[k][j].clone();
                    if !self.rows[i][j].tol_le(&bound) {
                        return Err(MetricError::TriangleViolation {
                            i: PointId(i),
                            j: PointId(j),
                            k: PointId(k),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Converts to another backend.
    pub fn convert<T: Scalar>(&self) -> MetricSpace<T> {
        MetricSpace {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|v| T::from_rational(&v.to_rational())).collect())
                .collect(),
        }
    }

    /// Index of the closest earlier point to `x` (ties by smallest id).
    pub fn closest_predecessor(&self, x: PointId) -> Option<PointId> {
        let row = self.history_row(x.0);
        let mut best: Option<usize> = None;
        for (j, dj) in row.iter().enumerate() {
            match best {
                Some(b) if *dj >= row[b] => {}
                _ => best = Some(j),
            }
        }
        best.map(PointId)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn first_point_has_no_constraints() {
        let mut space = MetricSpace::<Rational>::new();
        assert_eq!(space.expose_point(vec![]).unwrap(), PointId(0));
    }

    #[test]
    fn triangle_violation_is_rejected_and_space_unchanged() {
        let mut space = MetricSpace::<Rational>::new();
        space.expose_point(vec![]).unwrap();
        space.expose_point(vec![ratio(1, 1)]).unwrap();
        let err = space.expose_point(vec![ratio(1, 1), ratio(5, 1)]).unwrap_err();
        assert!(matches!(err, MetricError::TriangleViolation { .. }));
        assert_eq!(space.len(), 2);
    }

    #[test]
    fn non_positive_and_wrong_length() {
        let mut space = MetricSpace::<f64>::new();
        space.expose_point(vec![]).unwrap();
        assert_eq!(
            space.expose_point(vec![0.0]).unwrap_err(),
            MetricError::NonPositiveDistance { i: PointId(1), j: PointId(0) }
        );
        assert_eq!(
            space.expose_point(vec![1.0, 2.0]).unwrap_err(),
            MetricError::WrongRowLength { expected: 1, got: 2 }
        );
    }

    #[test]
    fn four_cycle_replacement_graph_is_accepted() {
        // v, u, x, y with d(v,u) = d(x,y) = 1 and every cross pair 1/2.
        let h = ratio(1, 2);
        let one = ratio(1, 1);
        let mut space = MetricSpace::<Rational>::new();
        space.expose_point(vec![]).unwrap();
        space.expose_point(vec![one.clone()]).unwrap();
        space.expose_point(vec![h.clone(), h.clone()]).unwrap();
        space.expose_point(vec![h.clone(), h.clone(), one]).unwrap();
        assert_eq!(space.len(), 4);
        space.check_triangle().unwrap();
    }

    #[test]
    fn float_tolerance_accepts_rounding_noise() {
        let mut space = MetricSpace::<f64>::new();
        space.expose_point(vec![]).unwrap();
        space.expose_point(vec![0.1]).unwrap();
        space.expose_point(vec![0.3 + 1e-12, 0.2]).unwrap();
    }

    #[test]
    fn from_matrix_checks_shape() {
        let m = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(matches!(MetricSpace::from_matrix(m), Err(MetricError::Asymmetric { .. })));
        let m = vec![vec![1.0]];
        assert!(matches!(MetricSpace::from_matrix(m), Err(MetricError::NonZeroDiagonal(_))));
    }

    #[test]
    fn closest_predecessor_breaks_ties_by_id() {
        let space = MetricSpace::from_matrix(vec![
            vec![0.0, 2.0, 1.0],
            vec![2.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(space.closest_predecessor(PointId(2)), Some(PointId(0)));
        assert_eq!(space.closest_predecessor(PointId(0)), None);
    }
}
