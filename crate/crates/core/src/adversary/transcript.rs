//! Duel transcripts: the ordered record of a game between an adversary and
//! an online embedder.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::scalar::Backend;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    /// Series-parallel doubling against Euclidean embedders.
    L2,
    /// Nested cycle arcs against tree embedders.
    Tree,
    /// Antipodal four-point metrics against l-infinity embedders of fixed dimension.
    LinfDim,
}

impl AdversaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AdversaryKind::L2 => "l2",
            AdversaryKind::Tree => "tree",
            AdversaryKind::LinfDim => "linf-dim",
        }
    }

    /// The opponent a duel uses when none is named.
    pub fn default_embedder(self) -> EmbedderKind {
        match self {
            AdversaryKind::L2 => EmbedderKind::L2Placer,
            AdversaryKind::Tree => EmbedderKind::GreedyTree,
            AdversaryKind::LinfDim => EmbedderKind::RandomFeasible,
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdversaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "l2" => Ok(AdversaryKind::L2),
            "tree" => Ok(AdversaryKind::Tree),
            "linf-dim" | "linf" => Ok(AdversaryKind::LinfDim),
            other => Err(format!("unknown adversary {other:?} (expected l2, tree or linf-dim)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedderKind {
    GreedyTree,
    SteinerBestEffort,
    Line,
    RandomFeasible,
    LinfBranches,
    L2Placer,
}

impl EmbedderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbedderKind::GreedyTree => "greedy-tree",
            EmbedderKind::SteinerBestEffort => "steiner-best-effort",
            EmbedderKind::Line => "line",
            EmbedderKind::RandomFeasible => "random-feasible",
            EmbedderKind::LinfBranches => "linf-branches",
            EmbedderKind::L2Placer => "l2-placer",
        }
    }
}

impl fmt::Display for EmbedderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmbedderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy-tree" | "greedy" => Ok(EmbedderKind::GreedyTree),
            "steiner-best-effort" | "steiner" => Ok(EmbedderKind::SteinerBestEffort),
            "line" => Ok(EmbedderKind::Line),
            "random-feasible" | "random" => Ok(EmbedderKind::RandomFeasible),
            "linf-branches" | "linf" => Ok(EmbedderKind::LinfBranches),
            "l2-placer" | "l2" => Ok(EmbedderKind::L2Placer),
            other => Err(format!("unknown embedder {other:?}")),
        }
    }
}

/// Everything needed to rerun a duel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuelConfig {
    pub adversary: AdversaryKind,
    pub embedder: EmbedderKind,
    /// Generations (l2), phases (tree) or host dimension `k` (linf-dim).
    pub size: usize,
    pub seed: u64,
    pub backend: Backend,
    /// Scale parameter of the linf-branches opponent, as a rational string.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<String>,
    /// Restart budget of the l2 placer.
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_restarts() -> usize {
    8
}

impl DuelConfig {
    pub fn new(adversary: AdversaryKind, size: usize) -> Self {
        DuelConfig {
            adversary,
            embedder: adversary.default_embedder(),
            size,
            seed: 0,
            backend: if adversary == AdversaryKind::L2 { Backend::Float } else { Backend::Rational },
            delta: None,
            restarts: default_restarts(),
        }
    }

    pub fn with_embedder(mut self, e: EmbedderKind) -> Self {
        self.embedder = e;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_delta(mut self, delta: impl Into<String>) -> Self {
        self.delta = Some(delta.into());
        self
    }
}

/// One transcript entry. Numbers are encoded by the run's backend
/// (`"p/q"` strings for rationals, JSON numbers for floats).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum Event {
    Expose { step: usize, point: usize, dists: Vec<Value> },
    Respond { step: usize, point: usize, response: Value },
    Decide { step: usize, decision: String, detail: Value },
    Certify { step: usize, name: String, bound: Value, measured: Value, pass: bool },
}

impl Event {
    pub fn step(&self) -> usize {
        match self {
            Event::Expose { step, .. }
            | Event::Respond { step, .. }
            | Event::Decide { step, .. }
            | Event::Certify { step, .. } => *step,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Event::Expose { .. } => "expose",
            Event::Respond { .. } => "respond",
            Event::Decide { .. } => "decide",
            Event::Certify { .. } => "certify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuelTranscript {
    pub config: DuelConfig,
    pub events: Vec<Event>,
    /// Final distortion report of the opponent's embedding.
    pub report: Value,
    pub passed: bool,
}

impl DuelTranscript {
    pub fn certificates(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| matches!(e, Event::Certify { .. }))
    }

    pub fn exposures(&self) -> usize {
        self.events.iter().filter(|e| matches!(e, Event::Expose { .. })).count()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Collects events while a duel runs.
#[derive(Debug, Default)]
pub struct Recorder {
    pub events: Vec<Event>,
    failed: bool,
}

impl Recorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, e: Event) {
        self.events.push(e);
    }

    pub fn expose(&mut self, step: usize, point: usize, dists: Vec<Value>) {
        self.push(Event::Expose { step, point, dists });
    }

    pub fn respond(&mut self, step: usize, point: usize, response: Value) {
        self.push(Event::Respond { step, point, response });
    }

    pub fn decide(&mut self, step: usize, decision: impl Into<String>, detail: Value) {
        self.push(Event::Decide { step, decision: decision.into(), detail });
    }

    /// Records a certificate and returns whether it passed.
    pub fn certify(&mut self, step: usize, name: impl Into<String>, bound: Value, measured: Value, pass: bool) -> bool {
        self.failed |= !pass;
        self.push(Event::Certify { step, name: name.into(), bound, measured, pass });
        pass
    }

    pub fn all_passed(&self) -> bool {
        !self.failed
    }
}
