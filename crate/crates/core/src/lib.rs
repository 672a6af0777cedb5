//! Deterministic online metric embeddings.
//!
//! Points of a finite metric arrive one at a time with their distances to
//! earlier points; each embedder places the new point without moving any
//! earlier image. This crate provides:
//!
//! * [`tree`]: the greedy dominating tree, exact Steiner realization of tree
//!   metrics, and its isometric lifts into l1 and l-infinity;
//! * [`line`]: an online embedding of arbitrary metrics into the real line;
//! * [`linf`]: the branching family of 1-Lipschitz line maps giving a
//!   low-distortion embedding into l-infinity;
//! * [`adversary`]: adaptive adversaries that force distortion lower bounds,
//!   baseline opponents, and replayable duel transcripts;
//! * [`suites`]: randomized property suites that check every bound.
//!
//! All algorithms are generic over [`Scalar`], with an exact rational
//! backend and an `f64` backend.

pub mod adversary;
pub mod distortion;
pub mod generate;
pub mod host;
pub mod io;
pub mod line;
pub mod linf;
pub mod metric;
pub mod scalar;
pub mod suites;
pub mod tree;

pub use distortion::{distortion_report, DistortionReport, Extended};
pub use host::{host_distance, HostPointSet, Norm};
pub use metric::{MetricError, MetricSpace, PointId};
pub use scalar::{Backend, Rational, Scalar};
