//! Expansion, contraction and multiplicative distortion of an embedding.

use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::host::{HostError, HostPointSet};
use crate::metric::{MetricSpace, PointId};
use crate::scalar::Scalar;

/// A nonnegative quantity that may be infinite (a contracted-to-zero pair).
#[derive(Debug, Clone, PartialEq)]
pub enum Extended<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Extended<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// `self <= bound` under the backend tolerance; infinity is never bounded.
    pub fn tol_le(&self, bound: &S) -> bool {
        self.finite().is_some_and(|v| v.tol_le(bound))
    }

    /// `self >= bound` under the backend tolerance; infinity bounds everything.
    pub fn tol_ge(&self, bound: &S) -> bool {
        self.finite().is_none_or(|v| bound.tol_le(v))
    }

    pub fn encode(&self) -> Value {
        match self {
            Extended::Finite(v) => v.encode(),
            Extended::Infinite => Value::String("inf".into()),
        }
    }

    pub fn to_f64_lossy(&self) -> f64 {
        match self {
            Extended::Finite(v) => v.to_f64_lossy(),
            Extended::Infinite => f64::INFINITY,
        }
    }
}

impl<S: fmt::Display> fmt::Display for Extended<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport<S> {
    pub expansion: S,
    pub contraction: Extended<S>,
    pub distortion: Extended<S>,
    pub expansion_witness: (PointId, PointId),
    pub contraction_witness: (PointId, PointId),
}

impl<S: Scalar> DistortionReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "expansion": self.expansion.encode(),
            "contraction": self.contraction.encode(),
            "distortion": self.distortion.encode(),
            "expansion_witness": [self.expansion_witness.0, self.expansion_witness.1],
            "contraction_witness": [self.contraction_witness.0, self.contraction_witness.1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistortionError {
    #[error("distortion needs at least two points, got {0}")]
    TooFewPoints(usize),
    #[error("metric has {metric} points but host has {host}")]
    PointCountMismatch { metric: usize, host: usize },
    #[error(transparent)]
    Host(#[from] HostError),
}

/// Distortion of `host` as an embedding of `space`.
pub fn distortion_report<S: Scalar>(
    space: &MetricSpace<S>,
    host: &HostPointSet<S>,
) -> Result<DistortionReport<S>, DistortionError> {
    if space.len() != host.len() {
        return Err(DistortionError::PointCountMismatch { metric: space.len(), host: host.len() });
    }
    let dh = host.distance_matrix()?;
    distortion_report_with(space, |i, j| Ok(dh[i][j].clone()))
}

/// Distortion where host distances come from a callback `(i, j) -> d_H`.
pub fn distortion_report_with<S, F>(space: &MetricSpace<S>, host_dist: F) -> Result<DistortionReport<S>, DistortionError>
where
    S: Scalar,
    F: Fn(usize, usize) -> Result<S, DistortionError>,
{
    let n = space.len();
    if n < 2 {
        return Err(DistortionError::TooFewPoints(n));
    }
    let mut expansion: Option<(S, (usize, usize))> = None;
    let mut contraction: Option<(Extended<S>, (usize, usize))> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.d(i, j).clone();
            let h = host_dist(i, j)?;
            let e = h.clone() / d.clone();
            if expansion.as_ref().is_none_or(|(best, _)| e > *best) {
                expansion = Some((e, (i, j)));
            }
            let c = if h.is_zero() { Extended::Infinite } else { Extended::Finite(d / h) };
            let better = match (&contraction, &c) {
                (None, _) => true,
                (Some((Extended::Infinite, _)), _) => false,
                (Some((Extended::Finite(_), _)), Extended::Infinite) => true,
                (Some((Extended::Finite(best), _)), Extended::Finite(v)) => v > best,
            };
            if better {
                contraction = Some((c, (i, j)));
            }
        }
    }
    let (expansion, ew) = expansion.expect("n >= 2");
    let (contraction, cw) = contraction.expect("n >= 2");
    let distortion = match &contraction {
        Extended::Finite(c) => Extended::Finite(expansion.clone() * c.clone()),
        Extended::Infinite => Extended::Infinite,
    };
    Ok(DistortionReport {
        expansion,
        contraction,
        distortion,
        expansion_witness: (PointId(ew.0), PointId(ew.1)),
        contraction_witness: (PointId(cw.0), PointId(cw.1)),
    })
}

/// Largest host/source ratio over pairs that involve point `x` and an earlier point.
pub fn max_expansion_to<S: Scalar>(space: &MetricSpace<S>, x: usize, host_dist: impl Fn(usize) -> S) -> Option<S> {
    (0..x)
        .map(|j| host_dist(j) / space.d(x, j).clone())
        .fold(None, |acc: Option<S>, e| match acc {
            Some(a) if a >= e => Some(a),
            _ => Some(e),
        })
}
