//! Randomized property suites.
//!
//! Each suite runs `trials` independent instances. Trial `i` draws its
//! randomness from `split_seed(master, i)`, trials run in parallel, and the
//! summary lists them by trial index. Failures, including errors raised
//! inside a trial, are reported in the summary rather than aborting the run.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::adversary::{replay, run_duel, AdversaryKind, DuelConfig, EmbedderKind};
use crate::distortion::distortion_report;
use crate::generate::{random_metric, rng_from_seed, split_seed, GeneratorKind};
use crate::host::{HostPointSet, Norm};
use crate::io::{host_to_json, LineEmbeddingFile};
use crate::line::{contraction_bound, expansion_bound, LineState};
use crate::linf::{child_bound, dimension_bound, BranchFamily, LinfMode};
use crate::metric::MetricSpace;
use crate::scalar::{ratio, Backend, Rational, Scalar};
use crate::tree::{four_point_check, greedy_expansion_bound, l1_to_linf_lift, GreedyTreeState, TreeL1Embedder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SuiteName {
    TreeBounds,
    LineBounds,
    LinfCertificates,
    Isometry,
    AdversaryCertificates,
}

impl SuiteName {
    pub const ALL: [SuiteName; 5] = [
        SuiteName::TreeBounds,
        SuiteName::LineBounds,
        SuiteName::LinfCertificates,
        SuiteName::Isometry,
        SuiteName::AdversaryCertificates,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SuiteName::TreeBounds => "tree-bounds",
            SuiteName::LineBounds => "line-bounds",
            SuiteName::LinfCertificates => "linf-certificates",
            SuiteName::Isometry => "isometry",
            SuiteName::AdversaryCertificates => "adversary-certificates",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SuiteName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| format!("unknown suite {s:?}; expected one of tree-bounds, line-bounds, linf-certificates, isometry, adversary-certificates"))
    }
}

/// One bound check: the bound, the measured value and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub bound: Value,
    pub measured: Value,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, bound: Value, measured: Value, pass: bool) -> Self {
        Check { name: name.into(), bound, measured, pass }
    }

    fn error(msg: impl fmt::Display) -> Self {
        Check::new("error", Value::Null, json!(msg.to_string()), false)
    }

    pub fn to_json(&self) -> Value {
        json!({ "name": self.name, "bound": self.bound, "measured": self.measured, "pass": self.pass })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    /// Instance description, e.g. generator and size.
    pub label: String,
    pub checks: Vec<Check>,
    /// Suite-specific measurements that are reported but not checked.
    pub extra: Value,
}

impl TrialResult {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "trial": self.trial,
            "seed": self.seed,
            "label": self.label,
            "pass": self.pass(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "extra": self.extra,
        })
    }
}

/// Parameters of a suite run. Fields a suite does not use are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: SuiteName,
    pub seed: u64,
    pub trials: usize,
    /// Fixed instance size; each suite has its own default.
    pub n: Option<usize>,
    pub backend: Backend,
    pub linf: Option<LinfMode<Rational>>,
    pub dedup: bool,
    pub max_branches: Option<usize>,
}

impl SuiteConfig {
    pub fn new(suite: SuiteName, seed: u64, trials: usize) -> Self {
        SuiteConfig { suite, seed, trials, n: None, backend: Backend::Rational, linf: None, dedup: false, max_branches: None }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_linf(mut self, mode: LinfMode<Rational>) -> Self {
        self.linf = Some(mode);
        self
    }

    pub fn with_dedup(mut self, on: bool) -> Self {
        self.dedup = on;
        self
    }

    pub fn with_max_branches(mut self, cap: Option<usize>) -> Self {
        self.max_branches = cap;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub config: SuiteConfig,
    /// Checks that do not depend on a trial.
    pub fixed: Vec<Check>,
    pub results: Vec<TrialResult>,
    pub seconds: f64,
}

impl SuiteSummary {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.pass()).count()
    }

    pub fn all_pass(&self) -> bool {
        self.fixed.iter().all(|c| c.pass) && self.results.iter().all(TrialResult::pass)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.config.suite.as_str(),
            "seed": self.config.seed,
            "trials": self.config.trials,
            "passed": self.passed(),
            "failed": self.results.len() - self.passed(),
            "all_pass": self.all_pass(),
            "seconds": self.seconds,
            "fixed_checks": self.fixed.iter().map(Check::to_json).collect::<Vec<_>>(),
            "results": self.results.iter().map(TrialResult::to_json).collect::<Vec<_>>(),
        })
    }
}

pub fn run_suite(config: &SuiteConfig) -> SuiteSummary {
    let start = Instant::now();
    let results: Vec<TrialResult> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let seed = split_seed(config.seed, trial as u64);
            let (label, checks, extra) = match run_trial(config, trial, seed) {
                Ok(out) => out,
                Err(e) => (String::new(), vec![Check::error(e)], Value::Null),
            };
            TrialResult { trial, seed, label, checks, extra }
        })
        .collect();
    let fixed = match config.suite {
        SuiteName::Isometry => vec![four_cycle_rejected()],
        _ => Vec::new(),
    };
    SuiteSummary { config: config.clone(), fixed, results, seconds: start.elapsed().as_secs_f64() }
}

type TrialOutput = (String, Vec<Check>, Value);

fn run_trial(config: &SuiteConfig, trial: usize, seed: u64) -> Result<TrialOutput, String> {
    match (config.suite, config.backend) {
        (SuiteName::TreeBounds, Backend::Rational) => tree_bounds::<Rational>(config, trial, seed),
        (SuiteName::TreeBounds, Backend::Float) => tree_bounds::<f64>(config, trial, seed),
        (SuiteName::LineBounds, Backend::Rational) => line_bounds::<Rational>(config, seed),
        (SuiteName::LineBounds, Backend::Float) => line_bounds::<f64>(config, seed),
        (SuiteName::LinfCertificates, _) => linf_certificates(config, trial, seed),
        (SuiteName::Isometry, _) => isometry(config, seed),
        (SuiteName::AdversaryCertificates, _) => adversary_certificates(trial, seed),
    }
}

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn generator_for(trial: usize) -> GeneratorKind {
    GeneratorKind::ALL[trial % GeneratorKind::ALL.len()]
}

/// Checks of one embedder run together with its output.
#[derive(Debug, Clone, PartialEq)]
pub struct Checked {
    pub checks: Vec<Check>,
    /// The embedding in its file format.
    pub embedding: Value,
    /// Distortion report and run statistics.
    pub report: Value,
}

impl Checked {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Runs the greedy tree embedder over `space`, checking the expansion bound
/// after every point, the final distortion bound and dominance.
pub fn check_greedy<S: Scalar>(space: &MetricSpace<S>) -> Result<Checked, String> {
    let n = space.len();
    let mut state = GreedyTreeState::new();
    let mut checks = Vec::new();
    for x in space.points() {
        state.extend(space, x).map_err(err)?;
        let k = x.0 + 1;
        if k >= 2 {
            let report = distortion_report(&space.prefix(k), &state.host()).map_err(err)?;
            let bound: S = greedy_expansion_bound(k);
            checks.push(Check::new(format!("expansion@{k}"), bound.encode(), report.expansion.encode(), report.expansion.tol_le(&bound)));
        }
    }
    let report = distortion_report(space, &state.host()).map_err(err)?;
    let bound: S = greedy_expansion_bound(n.max(2));
    checks.push(Check::new("distortion", bound.encode(), report.distortion.encode(), report.distortion.tol_le(&bound)));
    let one = S::one();
    checks.push(Check::new("dominating", one.encode(), report.contraction.encode(), report.contraction.tol_le(&one)));
    let shape = state.tree().is_connected_acyclic();
    checks.push(Check::new("tree_shape", json!(true), json!(shape), shape));
    Ok(Checked { checks, embedding: host_to_json(&state.host()), report: report.to_json() })
}

/// Runs the line embedder over `space`, checking the expansion bound after
/// every point, the gap structure and the final contraction bound.
pub fn check_line<S: Scalar>(space: &MetricSpace<S>) -> Result<Checked, String> {
    let n = space.len();
    let mut state = LineState::new();
    let mut checks = Vec::new();
    let mut gap_ok = true;
    let mut gap_detail = Value::Null;
    for x in space.points() {
        state.place(space, x).map_err(err)?;
        if let Err(e) = state.check_gap_structure() {
            gap_ok = false;
            gap_detail = json!(e.to_string());
        }
        let k = x.0 + 1;
        if k >= 2 {
            let report = distortion_report(&space.prefix(k), &state.host()).map_err(err)?;
            let bound: S = expansion_bound(k);
            checks.push(Check::new(format!("expansion@{k}"), bound.encode(), report.expansion.encode(), report.expansion.tol_le(&bound)));
        }
    }
    checks.push(Check::new("gap_structure", json!(true), if gap_ok { json!(true) } else { gap_detail }, gap_ok));
    let report = distortion_report(space, &state.host()).map_err(err)?;
    let bound: S = contraction_bound(n);
    checks.push(Check::new("contraction", bound.encode(), report.contraction.encode(), report.contraction.tol_le(&bound)));
    Ok(Checked { checks, embedding: LineEmbeddingFile::from(&state).to_json(), report: report.to_json() })
}

/// Builds the branch family over `space`, checking per-step and global
/// branch counts, 1-Lipschitzness and, in guarantee mode, the pair
/// certificate and the distortion guarantee.
pub fn check_linf(space: &MetricSpace<Rational>, mode: &LinfMode<Rational>, dedup: bool, max_branches: Option<usize>) -> Result<Checked, String> {
    let n = space.len();
    let delta = mode.delta().map_err(err)?;
    let mut fam = BranchFamily::new(delta.clone()).map_err(err)?.with_dedup(dedup).with_max_branches(max_branches);
    let mut checks = Vec::new();
    for x in space.points() {
        let stats = fam.extend(space, x).map_err(err)?.clone();
        let t = x.0 + 1;
        if t >= 2 {
            let bound: Rational = child_bound(t, &delta);
            let measured = Rational::from_integer(stats.max_children.into());
            checks.push(Check::new(format!("children@{t}"), bound.encode(), json!(stats.max_children), measured <= bound));
        }
    }
    let total = fam.steps().last().map_or(0, |s| s.branches);
    let global = dimension_bound(n, &delta);
    checks.push(Check::new("branches", json!(global.to_string()), json!(total), BigUint::from(total) <= global));
    let lipschitz = fam.check_lipschitz(space);
    checks.push(Check::new("lipschitz", Value::Null, json!(lipschitz.map(|(b, x, y)| [b, x.0, y.0])), lipschitz.is_none()));
    let report = fam.distortion(space).map_err(err)?;
    let mut out = json!({
        "branches": total,
        "kept": fam.branch_count(),
        "delta": delta.encode(),
        "empty_ranges": fam.steps().iter().map(|s| s.empty_ranges).sum::<usize>(),
        "distortion": report.to_json(),
    });
    if let Some(guarantee) = mode.guarantee() {
        let declared = mode.declared_n().unwrap_or(n);
        let cert = fam.pair_certificate(space, declared);
        let passing = cert.entries.iter().filter(|e| e.pass).count();
        checks.push(Check::new("pair_certificate", json!(cert.entries.len()), json!(passing), cert.all_pass()));
        checks.push(Check::new("distortion", guarantee.encode(), report.distortion.encode(), report.distortion.tol_le(&guarantee)));
        out["certificate"] = cert.to_json();
    } else {
        checks.push(Check::new("distortion", Value::Null, report.distortion.encode(), report.distortion.is_finite()));
    }
    Ok(Checked { checks, embedding: host_to_json(&fam.finalize()), report: out })
}

fn isometric<S: Scalar>(space: &MetricSpace<S>, host: &HostPointSet<S>) -> Result<(bool, Value), String> {
    let report = distortion_report(space, host).map_err(err)?;
    let one = S::one();
    let ok = report.expansion == one && report.contraction.finite() == Some(&one);
    Ok((ok, report.distortion.encode()))
}

/// Realizes a tree metric by a Steiner tree and lifts it into
/// `l1^(n-1)` and, when `with_linf`, into `l_inf^(2^(n-2))`, checking that
/// each is exact. The embedding is `{"tree", "l1", "linf"}`.
pub fn check_tree_lifts<S: Scalar>(space: &MetricSpace<S>, with_linf: bool) -> Result<Checked, String> {
    let n = space.len();
    let embedder = TreeL1Embedder::run(space).map_err(err)?;
    let mut checks = Vec::new();
    let tree_host = HostPointSet::Tree(embedder.realizer().tree().clone());
    let (ok, d) = isometric(space, &tree_host)?;
    checks.push(Check::new("steiner", json!("1/1"), d, ok));
    let dim = n.saturating_sub(1).max(1);
    checks.push(Check::new("l1_dimension", json!(dim), json!(embedder.l1().dimension()), embedder.l1().dimension() <= dim));
    let tuples = embedder.point_tuples(dim).map_err(err)?;
    let l1 = HostPointSet::vectors(Norm::L1, tuples.clone()).map_err(err)?;
    let (ok, d) = isometric(space, &l1)?;
    checks.push(Check::new("l1", json!("1/1"), d, ok));
    let mut linf_json = Value::Null;
    if with_linf {
        let linf = l1_to_linf_lift(&tuples, Some(dim)).map_err(err)?;
        let want = 1usize << (dim - 1);
        checks.push(Check::new("linf_dimension", json!(want), json!(linf.dimension()), linf.dimension() == Some(want)));
        let (ok, d) = isometric(space, &linf)?;
        checks.push(Check::new("linf", json!("1/1"), d, ok));
        linf_json = host_to_json(&linf);
    }
    Ok(Checked {
        checks,
        embedding: json!({ "tree": host_to_json(&tree_host), "l1": host_to_json(&l1), "linf": linf_json }),
        report: json!({ "steiner_vertices": embedder.realizer().tree().steiner_count() }),
    })
}

fn tree_bounds<S: Scalar>(config: &SuiteConfig, trial: usize, seed: u64) -> Result<TrialOutput, String> {
    let n = config.n.unwrap_or(8);
    let kind = generator_for(trial);
    let space: MetricSpace<S> = random_metric(&mut rng_from_seed(seed), n, kind);
    let c = check_greedy(&space)?;
    Ok((format!("{kind} n={n}"), c.checks, c.report))
}

fn line_bounds<S: Scalar>(config: &SuiteConfig, seed: u64) -> Result<TrialOutput, String> {
    let mut rng = rng_from_seed(seed);
    let n = config.n.unwrap_or_else(|| rng.gen_range(4..=10));
    let kind = GeneratorKind::ALL[rng.gen_range(0..GeneratorKind::ALL.len())];
    let space: MetricSpace<S> = random_metric(&mut rng, n, kind);
    let c = check_line(&space)?;
    Ok((format!("{kind} n={n}"), c.checks, c.report))
}

fn linf_certificates(config: &SuiteConfig, trial: usize, seed: u64) -> Result<TrialOutput, String> {
    let default_n = config.n.unwrap_or(3);
    let mode = config.linf.clone().unwrap_or(LinfMode::Guarantee { n: default_n, epsilon: ratio(1, 2) });
    let n = mode.declared_n().unwrap_or(default_n);
    let kind = generator_for(trial);
    let space: MetricSpace<Rational> = random_metric(&mut rng_from_seed(seed), n, kind);
    let c = check_linf(&space, &mode, config.dedup, config.max_branches)?;
    Ok((format!("{kind} n={n}"), c.checks, c.report))
}

fn isometry(config: &SuiteConfig, seed: u64) -> Result<TrialOutput, String> {
    let mut rng = rng_from_seed(seed);
    let n = config.n.unwrap_or_else(|| rng.gen_range(2..=12));
    let base: MetricSpace<Rational> = random_metric(&mut rng, n, GeneratorKind::Tree);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let space = base.permuted(&perm);
    let mut c = check_tree_lifts(&space, n <= 10)?;
    c.report["order"] = json!(perm);
    Ok((format!("tree n={n}"), c.checks, c.report))
}

fn four_cycle_rejected() -> Check {
    let d = |i: usize, j: usize| -> Rational {
        let k = i.abs_diff(j);
        ratio(k.min(4 - k) as i64, 1)
    };
    let space = MetricSpace::from_matrix((0..4).map(|i| (0..4).map(|j| d(i, j)).collect()).collect()).expect("the 4-cycle is a metric");
    let rejected = four_point_check(&space).is_err();
    Check::new("four_cycle_rejected", json!(true), json!(rejected), rejected)
}

/// Duels whose parameters cycle with the trial index: tree phases 2..4,
/// l-infinity dimensions 1..4 and l2 generations 2..6. Every transcript is
/// also replayed.
fn adversary_certificates(trial: usize, seed: u64) -> Result<TrialOutput, String> {
    let phases = 2 + trial % 3;
    let k = 1 + trial % 4;
    let gens = 2 + trial % 5;
    let tree_embedder = if trial % 2 == 0 { EmbedderKind::GreedyTree } else { EmbedderKind::SteinerBestEffort };
    let linf_embedder = if trial % 2 == 0 { EmbedderKind::RandomFeasible } else { EmbedderKind::LinfBranches };
    let configs = [
        DuelConfig::new(AdversaryKind::Tree, phases).with_embedder(tree_embedder).with_seed(seed),
        DuelConfig::new(AdversaryKind::LinfDim, k).with_embedder(linf_embedder).with_seed(seed),
        DuelConfig::new(AdversaryKind::L2, gens).with_seed(seed),
    ];
    let mut checks = Vec::new();
    let mut label = Vec::new();
    for c in &configs {
        let name = format!("{}:{}:{}", c.adversary.as_str(), c.embedder, c.size);
        let t = run_duel(c).map_err(|e| format!("{name}: {e}"))?;
        for cert in t.certificates() {
            if let crate::adversary::Event::Certify { step, name: cname, bound, measured, pass } = cert {
                checks.push(Check::new(format!("{name}:{cname}@{step}"), bound.clone(), measured.clone(), *pass));
            }
        }
        let r = replay(&t).map_err(|e| format!("{name}: {e}"))?;
        checks.push(Check::new(format!("{name}:replay"), json!(true), json!(r.identical), r.identical));
        label.push(name);
    }
    Ok((label.join(" "), checks, Value::Null))
}

/// Seconds taken by `f`, for reports.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in SuiteName::ALL {
            assert_eq!(s.as_str().parse::<SuiteName>().unwrap(), s);
        }
        assert!("nope".parse::<SuiteName>().is_err());
    }

    #[test]
    fn small_runs_pass_and_are_ordered() {
        for suite in [SuiteName::TreeBounds, SuiteName::LineBounds, SuiteName::Isometry] {
            let s = run_suite(&SuiteConfig::new(suite, 3, 6));
            assert!(s.all_pass(), "{}", s.to_json());
            assert_eq!(s.results.iter().map(|r| r.trial).collect::<Vec<_>>(), (0..6).collect::<Vec<_>>());
        }
    }

    #[test]
    fn float_tree_bounds() {
        let s = run_suite(&SuiteConfig::new(SuiteName::TreeBounds, 1, 6).with_backend(Backend::Float));
        assert!(s.all_pass(), "{}", s.to_json());
    }

    #[test]
    fn small_linf_suite() {
        let c = SuiteConfig::new(SuiteName::LinfCertificates, 2, 3).with_linf(LinfMode::Guarantee { n: 2, epsilon: ratio(1, 2) });
        let s = run_suite(&c);
        assert!(s.all_pass(), "{}", s.to_json());
    }

    #[test]
    fn errors_become_failures() {
        let c = SuiteConfig::new(SuiteName::LinfCertificates, 2, 1)
            .with_linf(LinfMode::Empirical { delta: ratio(1, 4) })
            .with_n(4)
            .with_max_branches(Some(3));
        let s = run_suite(&c);
        assert!(!s.all_pass());
        assert_eq!(s.results[0].checks[0].name, "error");
    }

    #[test]
    fn same_seed_same_summary() {
        let c = SuiteConfig::new(SuiteName::LineBounds, 11, 4);
        let a = run_suite(&c).to_json();
        let b = run_suite(&c).to_json();
        assert_eq!(a["results"], b["results"]);
    }
}
