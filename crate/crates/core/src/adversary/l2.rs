//! The series-parallel doubling adversary against non-contracting Euclidean
//! embedders.
//!
//! The graph starts as a single unit edge. In generation `g >= 2` the
//! adversary takes the generation-`(g-1)` edge `(v, u)` that the opponent
//! currently stretches most, replaces it by the 4-cycle `v-x-u-y-v` whose
//! edges weigh half as much, and exposes `x` and `y` with their
//! shortest-path distances. The parallelogram law then forces one of the new
//! edges to be stretched by at least `sqrt(g)`.

use serde_json::json;

use crate::distortion::distortion_report;
use crate::host::HostPointSet;
use crate::metric::{MetricSpace, PointId};
use crate::scalar::{Rational, Scalar};

use super::baseline::L2_NON_CONTRACTION_TOL;
use super::{encode_all, AdversaryError, DuelOutcome, Recorder, VectorEmbedder};

/// Relative slack on the expansion certificates against the float placer.
pub const L2_CERTIFICATE_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SpEdge {
    pub u: usize,
    pub v: usize,
    pub weight: Rational,
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesParallelState {
    edges: Vec<SpEdge>,
    n: usize,
    generation: usize,
    dist: Vec<Vec<Rational>>,
}

impl Default for SeriesParallelState {
    fn default() -> Self {
        Self::new()
    }
}

impl SeriesParallelState {
    /// The unit-weight `K_2` (generation 1).
    pub fn new() -> Self {
        let one = Rational::from_integer(1.into());
        let edges = vec![SpEdge { u: 0, v: 1, weight: one.clone(), generation: 1 }];
        let dist = vec![vec![Rational::from_integer(0.into()), one.clone()], vec![one, Rational::from_integer(0.into())]];
        SeriesParallelState { edges, n: 2, generation: 1, dist }
    }

    /// Weight `2^(1-g)` of edges created in generation `g`.
    pub fn edge_weight(g: usize) -> Rational {
        Rational::pow2(1 - g as i32)
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[SpEdge] {
        &self.edges
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn metric(&self) -> MetricSpace<Rational> {
        MetricSpace::from_matrix(self.dist.clone()).expect("shortest-path distances form a metric")
    }

    /// Indices of the edges created in the current generation, i.e. the
    /// candidates for the next replacement.
    pub fn newest_edges(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&i| self.edges[i].generation == self.generation).collect()
    }

    /// Replaces edge `idx` (which must belong to the current generation) by a
    /// 4-cycle and returns the new points `(x, y)`.
    pub fn replace(&mut self, idx: usize) -> Result<(usize, usize), AdversaryError> {
        let e = self.edges.get(idx).cloned().ok_or_else(|| AdversaryError::InvalidParameter(format!("no edge {idx}")))?;
        if e.generation != self.generation {
            return Err(AdversaryError::InvalidParameter(format!("edge {idx} is not from generation {}", self.generation)));
        }
        let g = self.generation + 1;
        let w = Self::edge_weight(g);
        let (x, y) = (self.n, self.n + 1);
        self.edges.remove(idx);
        for (a, b) in [(e.v, x), (x, e.u), (e.u, y), (y, e.v)] {
            self.edges.push(SpEdge { u: a.min(b), v: a.max(b), weight: w.clone(), generation: g });
        }
        self.n += 2;
        self.generation = g;
        self.dist = apsp_floyd(self.n, &self.edges);
        Ok((x, y))
    }
}

/// Exact all-pairs shortest paths by Floyd-Warshall. Unreachable pairs stay
/// absent, which cannot happen for the connected graphs built here.
pub fn apsp_floyd(n: usize, edges: &[SpEdge]) -> Vec<Vec<Rational>> {
    let mut d: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(Rational::from_integer(0.into()));
    }
    for e in edges {
        let better = d[e.u][e.v].as_ref().is_none_or(|c| e.weight < *c);
        if better {
            d[e.u][e.v] = Some(e.weight.clone());
            d[e.v][e.u] = Some(e.weight.clone());
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(dik) = d[i][k].clone() else { continue };
            for j in 0..n {
                let Some(dkj) = d[k][j].as_ref() else { continue };
                let via = dik.clone() + dkj;
                if d[i][j].as_ref().is_none_or(|c| via < *c) {
                    d[i][j] = Some(via);
                }
            }
        }
    }
    d.into_iter().map(|row| row.into_iter().map(|v| v.expect("connected graph")).collect()).collect()
}

/// Exact all-pairs shortest paths by Dijkstra from every source.
pub fn apsp_dijkstra(n: usize, edges: &[SpEdge]) -> Vec<Vec<Rational>> {
    let mut adj: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); n];
    for e in edges {
        adj[e.u].push((e.v, &e.weight));
        adj[e.v].push((e.u, &e.weight));
    }
    (0..n)
        .map(|s| {
            let mut dist: Vec<Option<Rational>> = vec![None; n];
            let mut done = vec![false; n];
            dist[s] = Some(Rational::from_integer(0.into()));
            for _ in 0..n {
                let next = (0..n).filter(|&i| !done[i] && dist[i].is_some()).min_by(|&a, &b| dist[a].cmp(&dist[b]));
                let Some(u) = next else { break };
                done[u] = true;
                let du = dist[u].clone().expect("reached");
                for &(v, w) in &adj[u] {
                    let via = du.clone() + w;
                    if dist[v].as_ref().is_none_or(|c| via < *c) {
                        dist[v] = Some(via);
                    }
                }
            }
            dist.into_iter().map(|v| v.expect("connected graph")).collect()
        })
        .collect()
}

fn norm2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelogramOutcome {
    /// The most stretched of the four new edges.
    pub edge: (usize, usize),
    pub expansion: f64,
    /// `|vx|^2 + |xu|^2 + |uy|^2 + |yv|^2`.
    pub sides_sq: f64,
    /// `|vu|^2 + |xy|^2`.
    pub diagonals_sq: f64,
}

/// Certificate for one replacement of `(v, u)` (weight `w_prev`) by the
/// 4-cycle through `x` and `y` in generation `g`.
///
/// Checks the premise `|phi v - phi u| >= sqrt(g-1) w_prev`, the
/// parallelogram inequality, and that some new edge (weight `w_prev / 2`) is
/// stretched by at least `sqrt(g)`; both stretch checks allow a relative
/// slack of `1e-3`.
pub fn parallelogram_certificate(
    ids: [usize; 4],
    images: [&[f64]; 4],
    w_prev: f64,
    g: usize,
) -> Result<ParallelogramOutcome, AdversaryError> {
    let [v, u, x, y] = images;
    let [iv, iu, ix, iy] = ids;
    let slack = 1.0 - L2_CERTIFICATE_SLACK;
    let premise = norm2(v, u) / w_prev;
    if premise < ((g - 1) as f64).sqrt() * slack {
        return Err(AdversaryError::CertificateFailure(format!(
            "premise: edge ({iv}, {iu}) is stretched by {premise}, below sqrt({})",
            g - 1
        )));
    }
    let sides = [(iv, ix, norm2(v, x)), (ix, iu, norm2(x, u)), (iu, iy, norm2(u, y)), (iy, iv, norm2(y, v))];
    let sides_sq: f64 = sides.iter().map(|s| s.2 * s.2).sum();
    let diagonals_sq = norm2(v, u).powi(2) + norm2(x, y).powi(2);
    if sides_sq < diagonals_sq * (1.0 - 1e-9) {
        return Err(AdversaryError::CertificateFailure(format!(
            "parallelogram inequality: sides {sides_sq} < diagonals {diagonals_sq}"
        )));
    }
    let w_new = w_prev / 2.0;
    let (a, b, len) = sides.iter().cloned().fold((0, 0, f64::MIN), |acc, s| if s.2 > acc.2 { s } else { acc });
    let expansion = len / w_new;
    if expansion < (g as f64).sqrt() * slack {
        return Err(AdversaryError::CertificateFailure(format!(
            "new edges stretched by at most {expansion}, below sqrt({g})"
        )));
    }
    Ok(ParallelogramOutcome { edge: (a.min(b), a.max(b)), expansion, sides_sq, diagonals_sq })
}

fn expose_and_place(
    state: &SeriesParallelState,
    space: &mut MetricSpace<f64>,
    images: &mut Vec<Vec<f64>>,
    embedder: &mut dyn VectorEmbedder<f64>,
    rec: &mut Recorder,
    step: usize,
    p: usize,
) -> Result<(), AdversaryError> {
    let exact: Vec<Rational> = (0..p).map(|j| state.dist(p, j).clone()).collect();
    rec.expose(step, p, encode_all(&exact));
    space.expose_point(exact.iter().map(Rational::to_f64_lossy).collect())?;
    let img = embedder.place(space)?;
    for (j, q) in images.iter().enumerate() {
        let d = space.d(p, j);
        let ratio = norm2(&img, q) / d;
        if ratio < 1.0 - L2_NON_CONTRACTION_TOL {
            return Err(AdversaryError::NonContractionBreach { point: PointId(p), other: PointId(j), ratio });
        }
    }
    rec.respond(step, p, json!(img));
    images.push(img);
    Ok(())
}

fn max_expansion(space: &MetricSpace<f64>, images: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..images.len() {
        for j in (i + 1)..images.len() {
            best = best.max(norm2(&images[i], &images[j]) / space.d(i, j));
        }
    }
    best
}

/// Plays `generations` generations against a non-contracting Euclidean
/// embedder and certifies a final expansion of at least
/// `sqrt(generations) (1 - 1e-3)`.
pub fn l2_adversary_run(embedder: &mut dyn VectorEmbedder<f64>, generations: usize) -> Result<DuelOutcome, AdversaryError> {
    let mut rec = Recorder::new();
    let mut state = SeriesParallelState::new();
    let mut space = MetricSpace::<f64>::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    let slack = 1.0 - L2_CERTIFICATE_SLACK;
    for p in 0..2 {
        expose_and_place(&state, &mut space, &mut images, embedder, &mut rec, 1, p)?;
    }
    let m = max_expansion(&space, &images);
    let mut ok = rec.certify(1, "max_expansion", json!(slack), json!(m), m >= slack);
    for g in 2..=generations {
        if !ok {
            break;
        }
        let w_prev = SeriesParallelState::edge_weight(g - 1).to_f64_lossy();
        let mut chosen: Option<(usize, f64, (usize, usize))> = None;
        let mut cands: Vec<usize> = state.newest_edges();
        cands.sort_by_key(|&i| (state.edges()[i].u, state.edges()[i].v));
        for i in cands {
            let e = &state.edges()[i];
            let stretch = norm2(&images[e.u], &images[e.v]) / w_prev;
            if chosen.as_ref().is_none_or(|c| stretch > c.1) {
                chosen = Some((i, stretch, (e.u, e.v)));
            }
        }
        let (idx, stretch, (a, b)) = chosen.expect("every generation has new edges");
        // The replaced edge is oriented v = a, u = b.
        rec.decide(g, "replace_edge", json!({ "v": a, "u": b, "expansion": stretch }));
        let (x, y) = state.replace(idx)?;
        expose_and_place(&state, &mut space, &mut images, embedder, &mut rec, g, x)?;
        expose_and_place(&state, &mut space, &mut images, embedder, &mut rec, g, y)?;
        let bound = (g as f64).sqrt() * slack;
        ok = match parallelogram_certificate([a, b, x, y], [&images[a], &images[b], &images[x], &images[y]], w_prev, g) {
            Ok(out) => rec.certify(
                g,
                "parallelogram",
                json!(bound),
                json!({ "edge": [out.edge.0, out.edge.1], "expansion": out.expansion, "sides_sq": out.sides_sq, "diagonals_sq": out.diagonals_sq }),
                true,
            ),
            Err(e) => rec.certify(g, "parallelogram", json!(bound), json!(e.to_string()), false),
        };
        if ok {
            let m = max_expansion(&space, &images);
            ok = rec.certify(g, "max_expansion", json!(bound), json!(m), m >= bound);
        }
    }
    let host = HostPointSet::vectors(embedder.norm(), images)?;
    let report = distortion_report(&space, &host)?;
    Ok(DuelOutcome::finish(rec, report.to_json()))
}
