//! Adaptive adversaries, the opponents they play against, and duel
//! orchestration.
//!
//! An adversary exposes one point at a time, lets the opponent place it, and
//! inspects the placement before choosing the next point. Every duel is
//! recorded as a [`DuelTranscript`] that can be replayed from its config.

pub mod baseline;
pub mod cycle;
pub mod l2;
pub mod linf_dim;
pub mod transcript;

use serde_json::Value;
use thiserror::Error;

use crate::distortion::DistortionError;
use crate::host::{HostError, Norm};
use crate::line::LineState;
use crate::linf::LinfError;
use crate::metric::{MetricError, MetricSpace, PointId};
use crate::scalar::{parse_rational, Backend, Rational, Scalar};
use crate::tree::{GreedyTreeState, TreeError, WeightedTree};

pub use baseline::{BestEffortSteiner, L2Placer, LinfBranches, RandomFeasible};
pub use cycle::{tree_adversary_run, CycleArc};
pub use l2::{l2_adversary_run, parallelogram_certificate, ParallelogramOutcome, SeriesParallelState};
pub use linf_dim::{linf_dim_adversary_run, longest_gap_midpoint, AntipodalMetric};
pub use transcript::{AdversaryKind, DuelConfig, DuelTranscript, EmbedderKind, Event, Recorder};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdversaryError {
    #[error("embedder contracted the pair ({point}, {other}): host/source ratio {ratio}")]
    NonContractionBreach { point: PointId, other: PointId, ratio: f64 },
    #[error("embedder expanded the pair ({point}, {other}) in coordinate {coordinate}")]
    LipschitzBreach { point: PointId, other: PointId, coordinate: usize },
    #[error("certificate failed: {0}")]
    CertificateFailure(String),
    #[error("the {adversary} adversary cannot play against the {embedder} embedder")]
    Incompatible { adversary: AdversaryKind, embedder: EmbedderKind },
    #[error("no sub-arc pairing intersects in phase {phase}")]
    NoIntersectingPairing { phase: usize },
    #[error("no non-contracting placement found for {0}")]
    PlacementInfeasible(PointId),
    #[error("embedder returned {got} coordinates, expected {expected}")]
    WrongDimension { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Linf(#[from] LinfError),
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error(transparent)]
    Host(#[from] HostError),
}

/// An online embedder into a normed coordinate space.
pub trait VectorEmbedder<S: Scalar>: Send {
    fn name(&self) -> &'static str;

    fn norm(&self) -> Norm;

    /// Places the newest point of `space` and returns its coordinates.
    fn place(&mut self, space: &MetricSpace<S>) -> Result<Vec<S>, AdversaryError>;
}

/// An online embedder into a weighted tree whose current tree can be
/// inspected between exposures.
pub trait TreeEmbedder<S: Scalar>: Send {
    fn name(&self) -> &'static str;

    /// Places the newest point of `space`.
    fn place(&mut self, space: &MetricSpace<S>) -> Result<(), AdversaryError>;

    fn tree(&self) -> &WeightedTree<S>;
}

fn newest<S: Scalar>(space: &MetricSpace<S>) -> Result<PointId, AdversaryError> {
    space.newest().ok_or(AdversaryError::Metric(MetricError::UnknownPoint(PointId(0))))
}

impl<S: Scalar> TreeEmbedder<S> for GreedyTreeState<S> {
    fn name(&self) -> &'static str {
        "greedy-tree"
    }

    fn place(&mut self, space: &MetricSpace<S>) -> Result<(), AdversaryError> {
        self.extend(space, newest(space)?)?;
        Ok(())
    }

    fn tree(&self) -> &WeightedTree<S> {
        GreedyTreeState::tree(self)
    }
}

impl<S: Scalar> VectorEmbedder<S> for LineState<S> {
    fn name(&self) -> &'static str {
        "line"
    }

    fn norm(&self) -> Norm {
        Norm::L1
    }

    fn place(&mut self, space: &MetricSpace<S>) -> Result<Vec<S>, AdversaryError> {
        let p = LineState::place(self, space, newest(space)?)
            .map_err(|e| AdversaryError::CertificateFailure(e.to_string()))?;
        Ok(vec![p])
    }
}

/// What an adversary run produces besides the config.
#[derive(Debug, Clone, PartialEq)]
pub struct DuelOutcome {
    pub events: Vec<Event>,
    pub report: Value,
    pub passed: bool,
}

impl DuelOutcome {
    pub(crate) fn finish(rec: Recorder, report: Value) -> Self {
        let passed = rec.all_passed();
        DuelOutcome { events: rec.events, report, passed }
    }
}

fn incompatible(config: &DuelConfig) -> AdversaryError {
    AdversaryError::Incompatible { adversary: config.adversary, embedder: config.embedder }
}

fn parse_delta<S: Scalar>(config: &DuelConfig) -> Result<S, AdversaryError> {
    let text = config.delta.as_deref().unwrap_or("1/10");
    let r = parse_rational(text).map_err(|e| AdversaryError::InvalidParameter(e.to_string()))?;
    if r <= Rational::from_integer(0.into()) || r > Rational::from_integer(1.into()) {
        return Err(AdversaryError::InvalidParameter(format!("delta must lie in (0, 1], got {text}")));
    }
    Ok(S::from_rational(&r))
}

fn tree_duel<S: Scalar>(config: &DuelConfig) -> Result<DuelOutcome, AdversaryError> {
    let mut embedder: Box<dyn TreeEmbedder<S>> = match config.embedder {
        EmbedderKind::GreedyTree => Box::new(GreedyTreeState::<S>::new()),
        EmbedderKind::SteinerBestEffort => Box::new(BestEffortSteiner::<S>::new()),
        _ => return Err(incompatible(config)),
    };
    tree_adversary_run(embedder.as_mut(), config.size)
}

fn linf_dim_duel<S: Scalar>(config: &DuelConfig) -> Result<DuelOutcome, AdversaryError> {
    let k = config.size;
    let mut embedder: Box<dyn VectorEmbedder<S>> = match config.embedder {
        EmbedderKind::RandomFeasible => Box::new(RandomFeasible::<S>::new(k, config.seed)),
        EmbedderKind::LinfBranches => Box::new(LinfBranches::<S>::new(k, parse_delta(config)?, config.seed)?),
        _ => return Err(incompatible(config)),
    };
    linf_dim_adversary_run(embedder.as_mut(), k)
}

/// Runs the duel described by `config`.
///
/// The l2 adversary always plays with exact distances against the
/// float-valued placer, whatever the configured backend.
pub fn run_duel(config: &DuelConfig) -> Result<DuelTranscript, AdversaryError> {
    if config.size == 0 {
        return Err(AdversaryError::InvalidParameter("duel size must be positive".into()));
    }
    let outcome = match (config.adversary, config.backend) {
        (AdversaryKind::L2, _) => {
            if config.embedder != EmbedderKind::L2Placer {
                return Err(incompatible(config));
            }
            let mut placer = L2Placer::new(2 * config.size, config.restarts, config.seed);
            l2_adversary_run(&mut placer, config.size)?
        }
        (AdversaryKind::Tree, Backend::Rational) => tree_duel::<Rational>(config)?,
        (AdversaryKind::Tree, Backend::Float) => tree_duel::<f64>(config)?,
        (AdversaryKind::LinfDim, Backend::Rational) => linf_dim_duel::<Rational>(config)?,
        (AdversaryKind::LinfDim, Backend::Float) => linf_dim_duel::<f64>(config)?,
    };
    Ok(DuelTranscript { config: config.clone(), events: outcome.events, report: outcome.report, passed: outcome.passed })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayCheck {
    pub identical: bool,
    /// Index of the first event that differs, or the shorter length.
    pub first_mismatch: Option<usize>,
    pub replayed: DuelTranscript,
}

/// Reruns the duel stored in `transcript` and compares every event and the
/// final report.
pub fn replay(transcript: &DuelTranscript) -> Result<ReplayCheck, AdversaryError> {
    let replayed = run_duel(&transcript.config)?;
    let a = &transcript.events;
    let b = &replayed.events;
    let first_mismatch = a.iter().zip(b).position(|(x, y)| x != y).or_else(|| (a.len() != b.len()).then(|| a.len().min(b.len())));
    let identical = first_mismatch.is_none() && transcript.report == replayed.report && transcript.passed == replayed.passed;
    Ok(ReplayCheck { identical, first_mismatch, replayed })
}

pub(crate) fn encode_all<S: Scalar>(v: &[S]) -> Vec<Value> {
    v.iter().map(Scalar::encode).collect()
}

pub(crate) fn tree_json<S: Scalar>(tree: &WeightedTree<S>) -> Value {
    crate::io::tree_to_json(tree)
}
