//! Host spaces: normed coordinate spaces and weighted trees.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::PointId;
use crate::scalar::Scalar;
use crate::tree::{TreeError, WeightedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        })
    }
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "l1" | "line" => Ok(Norm::L1),
            "l2" => Ok(Norm::L2),
            "linf" => Ok(Norm::Linf),
            other => Err(format!("unknown norm {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HostError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("host point {0} is missing")]
    MissingPoint(PointId),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Distance between two coordinate tuples under `norm`.
pub fn host_distance<S: Scalar>(a: &[S], b: &[S], norm: Norm) -> Result<S, HostError> {
    if a.len() != b.len() {
        return Err(HostError::DimensionMismatch(a.len(), b.len()));
    }
    let diffs = a.iter().zip(b).map(|(x, y)| (x.clone() - y.clone()).abs());
    Ok(match norm {
        Norm::L1 => diffs.fold(S::zero(), |acc, v| acc + v),
        Norm::Linf => diffs.fold(S::zero(), |acc, v| if v > acc { v } else { acc }),
        Norm::L2 => diffs.fold(S::zero(), |acc, v| acc + v.clone() * v).sqrt(),
    })
}

/// The images of the exposed points in a host space.
#[derive(Debug, Clone, PartialEq)]
pub enum HostPointSet<S> {
    /// One coordinate tuple per point, all of the same dimension.
    Vectors { norm: Norm, coords: Vec<Vec<S>> },
    /// Distances are path lengths between the points' tree vertices.
    Tree(WeightedTree<S>),
}

impl<S: Scalar> HostPointSet<S> {
    pub fn vectors(norm: Norm, coords: Vec<Vec<S>>) -> Result<Self, HostError> {
        if let Some(first) = coords.first() {
            if let Some(bad) = coords.iter().find(|c| c.len() != first.len()) {
                return Err(HostError::DimensionMismatch(first.len(), bad.len()));
            }
        }
        Ok(HostPointSet::Vectors { norm, coords })
    }

    /// Points on the real line.
    pub fn line(pos: &[S]) -> Self {
        HostPointSet::Vectors { norm: Norm::L1, coords: pos.iter().map(|p| vec![p.clone()]).collect() }
    }

    pub fn len(&self) -> usize {
        match self {
            HostPointSet::Vectors { coords, .. } => coords.len(),
            HostPointSet::Tree(t) => t.point_count(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dimension(&self) -> Option<usize> {
        match self {
            HostPointSet::Vectors { coords, .. } => coords.first().map(Vec::len),
            HostPointSet::Tree(_) => None,
        }
    }

    pub fn distance(&self, i: PointId, j: PointId) -> Result<S, HostError> {
        match self {
            HostPointSet::Vectors { norm, coords } => {
                let a = coords.get(i.0).ok_or(HostError::MissingPoint(i))?;
                let b = coords.get(j.0).ok_or(HostError::MissingPoint(j))?;
                host_distance(a, b, *norm)
            }
            HostPointSet::Tree(t) => Ok(t.point_distance(i, j)?),
        }
    }

    /// All pairwise host distances, computed once.
    pub fn distance_matrix(&self) -> Result<Vec<Vec<S>>, HostError> {
        match self {
            HostPointSet::Tree(t) => Ok(t.point_distance_matrix()?),
            HostPointSet::Vectors { .. } => {
                let n = self.len();
                (0..n)
                    .map(|i| (0..n).map(|j| self.distance(PointId(i), PointId(j))).collect())
                    .collect()
            }
        }
    }

    /// Every coordinate multiplied by `c` (tree edge weights scaled likewise).
    pub fn scaled(&self, c: &S) -> Self {
        match self {
            HostPointSet::Vectors { norm, coords } => HostPointSet::Vectors {
                norm: *norm,
                coords: coords.iter().map(|r| r.iter().map(|v| v.clone() * c.clone()).collect()).collect(),
            },
            HostPointSet::Tree(_) => unimplemented!("scaling is only offered for coordinate hosts"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_on_three_four_five() {
        let o = [0.0, 0.0];
        let p = [3.0, 4.0];
        for norm in [Norm::L1, Norm::L2, Norm::Linf] {
            assert_eq!(host_distance(&o, &o, norm).unwrap(), 0.0);
        }
        assert_eq!(host_distance(&o, &p, Norm::L2).unwrap(), 5.0);
        assert_eq!(host_distance(&o, &p, Norm::Linf).unwrap(), 4.0);
        assert_eq!(host_distance(&o, &p, Norm::L1).unwrap(), 7.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert_eq!(host_distance(&[1.0], &[1.0, 2.0], Norm::L1), Err(HostError::DimensionMismatch(1, 2)));
        assert!(HostPointSet::vectors(Norm::L1, vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
