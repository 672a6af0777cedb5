//! Online `(1 + eps)`-distortion embedding into l-infinity.
//!
//! The embedding is a family of 1-Lipschitz maps into the line, one per
//! coordinate. When `x_t` arrives every map `phi` branches into one child per
//! value of the feasible range `P^t`: the admissible values (multiples of
//! `delta d(x_i, x_t)` for every earlier `x_i`, plus the values `phi` already
//! uses) that keep the child 1-Lipschitz. Children never change the values of
//! earlier points, so the family is stored as a prefix tree with one level per
//! exposed point.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::distortion::{distortion_report_with, DistortionError, DistortionReport};
use crate::host::{HostPointSet, Norm};
use crate::metric::{MetricSpace, PointId};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinfError {
    #[error("epsilon must lie in (0, 1], got {0}")]
    InvalidEpsilon(String),
    #[error("delta must lie in (0, 1], got {0}")]
    InvalidDelta(String),
    #[error("need at least two declared points, got {0}")]
    TooFewPoints(usize),
    #[error("expected point {expected} next, got {got}")]
    OutOfOrder { expected: PointId, got: PointId },
    #[error("branch cap {cap} exceeded while exposing {point}")]
    BranchCapExceeded { cap: usize, point: PointId },
    #[error("feasible interval for {0} is empty")]
    EmptyInterval(PointId),
    #[error("branch tuples must all have the same positive length")]
    RaggedTuples,
    #[error(transparent)]
    Distortion(#[from] DistortionError),
}

/// `[max_y phi(y) - d(y, x), min_y phi(y) + d(y, x)]` over the points `y`
/// exposed before `x`; `values[y]` is `phi(y)`. The first point gets `[0, 0]`.
pub fn feasible_interval<S: Scalar>(values: &[S], space: &MetricSpace<S>, x: PointId) -> Result<(S, S), LinfError> {
    if x.0 == 0 {
        return Ok((S::zero(), S::zero()));
    }
    let mut lo: Option<S> = None;
    let mut hi: Option<S> = None;
    for (y, v) in values.iter().enumerate().take(x.0) {
        let d = space.d(y, x.0);
        let a = v.clone() - d.clone();
        let b = v.clone() + d.clone();
        if lo.as_ref().is_none_or(|l| a > *l) {
            lo = Some(a);
        }
        if hi.as_ref().is_none_or(|h| b < *h) {
            hi = Some(b);
        }
    }
    let (lo, hi) = (lo.expect("x > 0"), hi.expect("x > 0"));
    if lo <= hi {
        Ok((lo, hi))
    } else if lo.tol_eq(&hi) {
        Ok((hi.clone(), hi))
    } else {
        Err(LinfError::EmptyInterval(x))
    }
}

/// The feasible range `P^t` of `x` for the map with earlier values `values`,
/// ascending and without duplicates. For the first point it is `{0}`.
pub fn admissible_points<S: Scalar>(
    space: &MetricSpace<S>,
    x: PointId,
    delta: &S,
    values: &[S],
) -> Result<Vec<S>, LinfError> {
    if x.0 == 0 {
        return Ok(vec![S::zero()]);
    }
    let (lo, hi) = feasible_interval(values, space, x)?;
    let mut out = Vec::new();
    for i in 0..x.0 {
        let s = delta.clone() * space.d(i, x.0).clone();
        let first = (lo.clone() / s.clone()).ceil();
        let last = (hi.clone() / s.clone()).floor();
        let mut k = first;
        while k <= last {
            out.push(k.clone() * s.clone());
            k = k + S::one();
        }
    }
    out.extend(values[..x.0].iter().filter(|v| lo <= **v && **v <= hi).cloned());
    out.sort_by(|a, b| a.partial_cmp(b).expect("comparable values"));
    out.dedup();
    Ok(out)
}

/// `delta = eps / (20 n^2)`.
pub fn delta_for_epsilon<S: Scalar>(n: usize, epsilon: &S) -> Result<S, LinfError> {
    if n < 2 {
        return Err(LinfError::TooFewPoints(n));
    }
    if *epsilon <= S::zero() || *epsilon > S::one() {
        return Err(LinfError::InvalidEpsilon(epsilon.to_string()));
    }
    Ok(epsilon.clone() / S::from_count(20 * n * n))
}

/// `floor((n-1)! (2/delta + 2)^(n-1))`, the pre-dedup family size bound.
pub fn dimension_bound(n: usize, delta: &Rational) -> BigUint {
    let m = n.saturating_sub(1);
    let mut fact = Rational::one();
    for i in 2..=m {
        fact *= Rational::from_integer(i.into());
    }
    let two = Rational::from_integer(2.into());
    let base = two.clone() / delta + two;
    let mut value = fact;
    for _ in 0..m {
        value *= base.clone();
    }
    value.floor().to_integer().to_biguint().unwrap_or_default()
}

/// Per-branch child bound `(t-1)(2/delta + 2)` at step `t` (1-based).
pub fn child_bound<S: Scalar>(t: usize, delta: &S) -> S {
    S::from_count(t.saturating_sub(1)) * (S::from_count(2) / delta.clone() + S::from_count(2))
}

#[derive(Debug, Clone, PartialEq)]
struct Node<S> {
    parent: usize,
    value: S,
}

/// One map of the family, materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<S> {
    pub values: Vec<S>,
    /// Index of the parent branch in the previous level.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepStats {
    pub point: PointId,
    pub branches: usize,
    pub max_children: usize,
    pub empty_ranges: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchFamily<S> {
    delta: S,
    dedup: bool,
    max_branches: Option<usize>,
    levels: Vec<Vec<Node<S>>>,
    steps: Vec<StepStats>,
}

impl<S: Scalar> BranchFamily<S> {
    pub fn new(delta: S) -> Result<Self, LinfError> {
        if delta <= S::zero() || delta > S::one() {
            return Err(LinfError::InvalidDelta(delta.to_string()));
        }
        Ok(BranchFamily { delta, dedup: false, max_branches: None, levels: Vec::new(), steps: Vec::new() })
    }

    pub fn with_dedup(mut self, on: bool) -> Self {
        self.dedup = on;
        self
    }

    pub fn with_max_branches(mut self, cap: Option<usize>) -> Self {
        self.max_branches = cap;
        self
    }

    /// A family whose branches are exactly `tuples` (values of points `0..t`),
    /// one chain per tuple, with no sharing of prefixes.
    pub fn from_tuples(delta: S, tuples: Vec<Vec<S>>) -> Result<Self, LinfError> {
        let mut fam = Self::new(delta)?;
        let t = tuples.first().map_or(0, Vec::len);
        if t == 0 || tuples.iter().any(|v| v.len() != t) {
            return Err(LinfError::RaggedTuples);
        }
        for lvl in 0..t {
            let level = tuples
                .iter()
                .enumerate()
                .map(|(i, tup)| Node { parent: if lvl == 0 { 0 } else { i }, value: tup[lvl].clone() })
                .collect();
            fam.levels.push(level);
        }
        Ok(fam)
    }

    pub fn delta(&self) -> &S {
        &self.delta
    }

    /// Number of points exposed so far.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn branch_count(&self) -> usize {
        self.levels.last().map_or(0, Vec::len)
    }

    pub fn steps(&self) -> &[StepStats] {
        &self.steps
    }

    /// Values of branch `b` on every exposed point.
    pub fn branch_values(&self, b: usize) -> Vec<S> {
        let mut out = vec![S::zero(); self.levels.len()];
        let mut idx = b;
        for (lvl, level) in self.levels.iter().enumerate().rev() {
            out[lvl] = level[idx].value.clone();
            idx = level[idx].parent;
        }
        out
    }

    pub fn branch(&self, b: usize) -> Branch<S> {
        let parent = (self.levels.len() > 1).then(|| self.levels.last().expect("nonempty")[b].parent);
        Branch { values: self.branch_values(b), parent }
    }

    /// Ancestor index of leaf `b` at every level, root first.
    fn ancestry(&self, b: usize) -> Vec<usize> {
        let mut out = vec![0; self.levels.len()];
        let mut idx = b;
        for (lvl, level) in self.levels.iter().enumerate().rev() {
            out[lvl] = idx;
            idx = level[idx].parent;
        }
        out
    }

    /// Exposes `x`, the newest point of `space`, branching every map.
    pub fn extend(&mut self, space: &MetricSpace<S>, x: PointId) -> Result<&StepStats, LinfError> {
        if x.0 != self.levels.len() || x.0 >= space.len() {
            return Err(LinfError::OutOfOrder { expected: PointId(self.levels.len()), got: x });
        }
        if x.0 == 0 {
            self.levels.push(vec![Node { parent: 0, value: S::zero() }]);
            self.steps.push(StepStats { point: x, branches: 1, max_children: 1, empty_ranges: 0 });
            return Ok(self.steps.last().expect("just pushed"));
        }
        let produced = AtomicUsize::new(0);
        let cap = self.max_branches.unwrap_or(usize::MAX);
        let children: Vec<(Vec<S>, bool)> = (0..self.branch_count())
            .into_par_iter()
            .map(|b| {
                let values = self.branch_values(b);
                let mut p = admissible_points(space, x, &self.delta, &values)?;
                let empty = p.is_empty();
                if empty {
                    let (lo, hi) = feasible_interval(&values, space, x)?;
                    p.push((lo + hi).half());
                }
                if produced.fetch_add(p.len(), Ordering::Relaxed) + p.len() > cap {
                    return Err(LinfError::BranchCapExceeded { cap, point: x });
                }
                Ok((p, empty))
            })
            .collect::<Result<_, _>>()?;
        let mut level = Vec::with_capacity(produced.into_inner());
        let mut max_children = 0;
        let mut empty_ranges = 0;
        for (parent, (values, empty)) in children.into_iter().enumerate() {
            max_children = max_children.max(values.len());
            empty_ranges += usize::from(empty);
            level.extend(values.into_iter().map(|value| Node { parent, value }));
        }
        let branches = level.len();
        self.levels.push(level);
        if self.dedup {
            self.dedup();
        }
        self.steps.push(StepStats { point: x, branches, max_children, empty_ranges });
        Ok(self.steps.last().expect("just pushed"))
    }

    /// Runs the whole stream of `space`.
    pub fn run(mut self, space: &MetricSpace<S>) -> Result<Self, LinfError> {
        for x in space.points() {
            self.extend(space, x)?;
        }
        Ok(self)
    }

    /// Merges branches with identical value tuples, keeping the first copy.
    /// Returns the number of branches removed.
    pub fn dedup(&mut self) -> usize {
        let before = self.branch_count();
        let mut remap: Vec<usize> = vec![0];
        for lvl in 0..self.levels.len() {
            let level = std::mem::take(&mut self.levels[lvl]);
            let mut order: Vec<usize> = (0..level.len()).collect();
            let key = |i: usize| if lvl == 0 { 0 } else { remap[level[i].parent] };
            order.sort_by(|&a, &b| {
                key(a).cmp(&key(b)).then_with(|| level[a].value.partial_cmp(&level[b].value).expect("comparable")).then(a.cmp(&b))
            });
            let same = |a: usize, b: usize| key(a) == key(b) && level[a].value == level[b].value;
            let mut rep = vec![0usize; level.len()];
            for (pos, &i) in order.iter().enumerate() {
                rep[i] = if pos > 0 && same(i, order[pos - 1]) { rep[order[pos - 1]] } else { i };
            }
            let mut new_level = Vec::new();
            let mut new_index = vec![usize::MAX; level.len()];
            for i in 0..level.len() {
                if rep[i] == i {
                    new_index[i] = new_level.len();
                    new_level.push(Node { parent: key(i), value: level[i].value.clone() });
                }
            }
            let canonical = (0..level.len()).map(|i| new_index[rep[i]]).collect();
            remap = canonical;
            self.levels[lvl] = new_level;
        }
        before - self.branch_count()
    }

    /// Exact 1-Lipschitz check of every branch; returns the first offending
    /// `(branch, x, y)`.
    pub fn check_lipschitz(&self, space: &MetricSpace<S>) -> Option<(usize, PointId, PointId)> {
        (0..self.branch_count()).into_par_iter().find_map_first(|b| {
            let v = self.branch_values(b);
            for i in 0..v.len() {
                for j in (i + 1)..v.len() {
                    let h = (v[i].clone() - v[j].clone()).abs();
                    if !h.tol_le(space.d(i, j)) {
                        return Some((b, PointId(i), PointId(j)));
                    }
                }
            }
            None
        })
    }

    /// `max_b (phi_b(y) - phi_b(x))` for every ordered pair, as `m[x][y]`.
    pub fn max_differences(&self) -> Vec<Vec<S>> {
        let n = self.levels.len();
        let empty = || vec![vec![None::<S>; n]; n];
        let merged = (0..self.branch_count())
            .into_par_iter()
            .fold(empty, |mut acc, b| {
                let anc = self.ancestry(b);
                for x in 0..n {
                    for y in 0..n {
                        if x == y {
                            continue;
                        }
                        let diff = self.levels[y][anc[y]].value.clone() - self.levels[x][anc[x]].value.clone();
                        if acc[x][y].as_ref().is_none_or(|m| diff > *m) {
                            acc[x][y] = Some(diff);
                        }
                    }
                }
                acc
            })
            .reduce(empty, |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(b) {
                    for (ea, eb) in ra.iter_mut().zip(rb) {
                        if let Some(v) = eb {
                            if ea.as_ref().is_none_or(|m| v > *m) {
                                *ea = Some(v);
                            }
                        }
                    }
                }
                a
            });
        merged.into_iter().map(|row| row.into_iter().map(|v| v.unwrap_or_else(S::zero)).collect()).collect()
    }

    /// l-infinity distance matrix of the finalized embedding.
    pub fn host_distances(&self) -> Vec<Vec<S>> {
        let m = self.max_differences();
        let n = m.len();
        (0..n)
            .map(|x| (0..n).map(|y| if x == y { S::zero() } else { crate::scalar::smax(m[x][y].clone(), m[y][x].clone()) }).collect())
            .collect()
    }

    pub fn distortion(&self, space: &MetricSpace<S>) -> Result<DistortionReport<S>, LinfError> {
        let dh = self.host_distances();
        Ok(distortion_report_with(&space.prefix(self.len()), |i, j| Ok(dh[i][j].clone()))?)
    }

    /// One coordinate per branch.
    pub fn finalize(&self) -> HostPointSet<S> {
        let n = self.levels.len();
        let mut coords = vec![Vec::with_capacity(self.branch_count()); n];
        for b in 0..self.branch_count() {
            let anc = self.ancestry(b);
            for (x, c) in coords.iter_mut().enumerate() {
                c.push(self.levels[x][anc[x]].value.clone());
            }
        }
        HostPointSet::Vectors { norm: Norm::Linf, coords }
    }

    /// For every ordered pair checks `max_b (phi_b(y) - phi_b(x)) >= (1 - 20 n^2 delta) d(x, y)`
    /// with `n` the declared point count.
    pub fn pair_certificate(&self, space: &MetricSpace<S>, n_declared: usize) -> PairCertificate<S> {
        let m = self.max_differences();
        let factor = S::one() - S::from_count(20 * n_declared * n_declared) * self.delta.clone();
        let mut entries = Vec::new();
        for (x, row) in m.iter().enumerate() {
            for (y, best) in row.iter().enumerate() {
                if x == y {
                    continue;
                }
                let d = space.d(x, y).clone();
                let required = factor.clone() * d.clone();
                let pass = required.tol_le(best);
                entries.push(PairEntry {
                    x: PointId(x),
                    y: PointId(y),
                    best: best.clone(),
                    required,
                    slack: d - best.clone(),
                    pass,
                });
            }
        }
        PairCertificate { factor, entries }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEntry<S> {
    pub x: PointId,
    pub y: PointId,
    /// `max_b (phi_b(y) - phi_b(x))`.
    pub best: S,
    pub required: S,
    /// `d(x, y) - best`.
    pub slack: S,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairCertificate<S> {
    /// `1 - 20 n^2 delta`.
    pub factor: S,
    pub entries: Vec<PairEntry<S>>,
}

impl<S: Scalar> PairCertificate<S> {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    /// `1 / factor` when the factor is positive.
    pub fn distortion_guarantee(&self) -> Option<S> {
        (self.factor > S::zero()).then(|| S::one() / self.factor.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "factor": self.factor.encode(),
            "pairs": self.entries.iter().map(|e| json!({
                "x": e.x, "y": e.y,
                "best": e.best.encode(),
                "required": e.required.encode(),
                "slack": e.slack.encode(),
                "pass": e.pass,
            })).collect::<Vec<_>>(),
        })
    }
}

/// How `delta` was chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum LinfMode<S> {
    /// `delta = eps / (20 n^2)`, with distortion at most `1 / (1 - eps)`.
    Guarantee { n: usize, epsilon: S },
    /// Free `delta`; distortion is only measured.
    Empirical { delta: S },
}

impl<S: Scalar> LinfMode<S> {
    pub fn delta(&self) -> Result<S, LinfError> {
        match self {
            LinfMode::Guarantee { n, epsilon } => delta_for_epsilon(*n, epsilon),
            LinfMode::Empirical { delta } => Ok(delta.clone()),
        }
    }

    /// `1 / (1 - eps)` in guarantee mode.
    pub fn guarantee(&self) -> Option<S> {
        match self {
            LinfMode::Guarantee { epsilon, .. } if *epsilon < S::one() => Some(S::one() / (S::one() - epsilon.clone())),
            _ => None,
        }
    }

    pub fn declared_n(&self) -> Option<usize> {
        match self {
            LinfMode::Guarantee { n, .. } => Some(*n),
            LinfMode::Empirical { .. } => None,
        }
    }
}

/// `eps / (1 + eps)`: the parameter that turns the `1 / (1 - eps')` guarantee
/// into a `1 + eps` one.
pub fn epsilon_for_target<S: Scalar>(target: &S) -> S {
    target.clone() / (S::one() + target.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_traits::Zero;

    fn r(p: i64, q: i64) -> Rational {
        ratio(p, q)
    }

    fn two_points(d: Rational) -> MetricSpace<Rational> {
        MetricSpace::from_matrix(vec![vec![r(0, 1), d.clone()], vec![d, r(0, 1)]]).unwrap()
    }

    #[test]
    fn feasible_interval_cases() {
        let s = two_points(r(1, 1));
        assert_eq!(feasible_interval(&[r(0, 1)], &s, PointId(1)).unwrap(), (r(-1, 1), r(1, 1)));
        let s3 = MetricSpace::from_matrix(vec![
            vec![r(0, 1), r(1, 1), r(1, 1)],
            vec![r(1, 1), r(0, 1), r(2, 1)],
            vec![r(1, 1), r(2, 1), r(0, 1)],
        ])
        .unwrap();
        assert_eq!(feasible_interval(&[r(0, 1), r(1, 1)], &s3, PointId(2)).unwrap(), (r(-1, 1), r(1, 1)));
        // Tight: x_1 at 0, x_2 at -1 with d(x_1, x_2) = 1 and the new point halfway.
        let tight = MetricSpace::from_matrix(vec![
            vec![r(0, 1), r(1, 1), r(1, 2)],
            vec![r(1, 1), r(0, 1), r(1, 2)],
            vec![r(1, 2), r(1, 2), r(0, 1)],
        ])
        .unwrap();
        assert_eq!(feasible_interval(&[r(0, 1), r(-1, 1)], &tight, PointId(2)).unwrap(), (r(-1, 2), r(-1, 2)));
    }

    #[test]
    fn admissible_point_sets() {
        let s = two_points(r(1, 1));
        let half = admissible_points(&s, PointId(1), &r(1, 2), &[r(0, 1)]).unwrap();
        assert_eq!(half, vec![r(-1, 1), r(-1, 2), r(0, 1), r(1, 2), r(1, 1)]);
        let one = admissible_points(&s, PointId(1), &r(1, 1), &[r(0, 1)]).unwrap();
        assert_eq!(one, vec![r(-1, 1), r(0, 1), r(1, 1)]);
        assert_eq!(admissible_points(&s, PointId(0), &r(1, 2), &[]).unwrap(), vec![r(0, 1)]);
    }

    #[test]
    fn delta_and_dimension_bound() {
        assert_eq!(delta_for_epsilon(3, &r(1, 1)).unwrap(), r(1, 180));
        assert_eq!(delta_for_epsilon(3, &r(1, 2)).unwrap(), r(1, 360));
        assert_eq!(delta_for_epsilon(2, &r(1, 1)).unwrap(), r(1, 80));
        assert!(delta_for_epsilon(3, &r(3, 2)).is_err());
        assert!(delta_for_epsilon(3, &r(0, 1)).is_err());
        assert_eq!(dimension_bound(2, &r(1, 1)), BigUint::from(4u32));
        assert_eq!(dimension_bound(3, &r(1, 2)), BigUint::from(72u32));
        assert_eq!(dimension_bound(3, &r(1, 360)), BigUint::from(1_042_568u32));
    }

    #[test]
    fn two_point_family() {
        let s = two_points(r(1, 1));
        let fam = BranchFamily::new(r(1, 2)).unwrap().run(&s).unwrap();
        assert_eq!(fam.branch_count(), 5);
        let host = fam.finalize();
        assert_eq!(host.dimension(), Some(5));
        let HostPointSet::Vectors { coords, .. } = &host else { panic!("vector host") };
        assert!(coords[0].iter().all(Zero::is_zero));
        let seconds: Vec<_> = (0..5).map(|b| fam.branch_values(b)[1].clone()).collect();
        assert_eq!(seconds, vec![r(-1, 1), r(-1, 2), r(0, 1), r(1, 2), r(1, 1)]);
        let report = fam.distortion(&s).unwrap();
        assert_eq!(report.expansion, r(1, 1));
        assert!(fam.check_lipschitz(&s).is_none());
        let cert = fam.pair_certificate(&s, 2);
        assert!(cert.all_pass());
        assert!(cert.entries.iter().all(|e| e.slack.is_zero()));
    }

    #[test]
    fn empty_range_falls_back_to_midpoint() {
        let s = MetricSpace::from_matrix(vec![
            vec![r(0, 1), r(1, 1), r(1, 3)],
            vec![r(1, 1), r(0, 1), r(2, 3)],
            vec![r(1, 3), r(2, 3), r(0, 1)],
        ])
        .unwrap();
        let delta = r(2, 3);
        let values = [r(0, 1), r(-1, 1)];
        assert!(admissible_points(&s, PointId(2), &delta, &values).unwrap().is_empty());
        let mut fam = BranchFamily::from_tuples(delta, vec![values.to_vec()]).unwrap();
        let stats = fam.extend(&s, PointId(2)).unwrap().clone();
        assert_eq!(stats.empty_ranges, 1);
        assert_eq!(fam.branch_count(), 1);
        assert_eq!(fam.branch_values(0), vec![r(0, 1), r(-1, 1), r(-1, 3)]);
        assert!(fam.check_lipschitz(&s).is_none());
    }

    #[test]
    fn dedup_merges_identical_tuples() {
        let tuples = vec![
            vec![r(0, 1), r(1, 1), r(2, 1)],
            vec![r(0, 1), r(1, 2), r(1, 1)],
            vec![r(0, 1), r(1, 1), r(2, 1)],
            vec![r(0, 1), r(1, 1), r(1, 1)],
        ];
        let mut fam = BranchFamily::from_tuples(r(1, 2), tuples).unwrap();
        assert_eq!(fam.dedup(), 1);
        assert_eq!(fam.branch_count(), 3);
        let mut got: Vec<_> = (0..3).map(|b| fam.branch_values(b)).collect();
        got.sort();
        assert_eq!(got, vec![
            vec![r(0, 1), r(1, 2), r(1, 1)],
            vec![r(0, 1), r(1, 1), r(1, 1)],
            vec![r(0, 1), r(1, 1), r(2, 1)],
        ]);
        assert_eq!(fam.dedup(), 0);
    }

    #[test]
    fn branch_cap_is_enforced() {
        let s = two_points(r(1, 1));
        let mut fam = BranchFamily::new(r(1, 2)).unwrap().with_max_branches(Some(4));
        fam.extend(&s, PointId(0)).unwrap();
        assert_eq!(fam.extend(&s, PointId(1)), Err(LinfError::BranchCapExceeded { cap: 4, point: PointId(1) }));
    }

    #[test]
    fn float_backend_matches_rational_two_points() {
        let s = MetricSpace::<f64>::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let fam = BranchFamily::new(0.5).unwrap().run(&s).unwrap();
        assert_eq!(fam.branch_count(), 5);
    }

    #[test]
    fn child_bound_values() {
        assert_eq!(child_bound(2, &r(1, 2)), r(6, 1));
        assert_eq!(epsilon_for_target(&r(1, 1)), r(1, 2));
    }
}
