//! Acceptance checks. Every measured quantity is recomputed here from raw
//! outputs (distance matrices, tree edge lists, coordinates, transcripts)
//! rather than taken from the library's own reports.

use std::ops::{Add, Div, Mul, Sub};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::Value;

use online_embed::adversary::{replay, run_duel, AdversaryKind, DuelConfig, DuelTranscript, EmbedderKind, Event};
use online_embed::generate::{random_metric, rng_from_seed, split_seed, GeneratorKind};
use online_embed::io::{host_to_json, tree_to_json};
use online_embed::line::LineState;
use online_embed::linf::BranchFamily;
use online_embed::tree::{four_point_check, l1_to_linf_lift, GreedyTreeState, TreeL1Embedder};
use online_embed::{HostPointSet, MetricSpace, Rational};

const MASTER_SEED: u64 = 20_240_601;

trait Num: Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> {
    fn zero() -> Self;
    fn int(n: i64) -> Self;
    fn parse(v: &Value) -> Self;
    fn abs(&self) -> Self;
    fn f64(&self) -> f64;
}

impl Num for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn parse(v: &Value) -> Self {
        let s = v.as_str().expect("rationals are strings");
        let (p, q) = s.split_once('/').unwrap_or((s, "1"));
        Rational::new(p.parse().unwrap(), q.parse().unwrap())
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap()
    }
}

impl Num for f64 {
    fn zero() -> Self {
        0.0
    }
    fn int(n: i64) -> Self {
        n as f64
    }
    fn parse(v: &Value) -> Self {
        match v {
            Value::String(_) => Rational::parse(v).f64(),
            _ => v.as_f64().expect("number"),
        }
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn f64(&self) -> f64 {
        *self
    }
}

fn pow2<T: Num>(k: u32) -> T {
    T::int(1i64 << k)
}

/// Exposed-point distances of a tree given as `{"vertices", "edges"}` JSON,
/// by Floyd-Warshall over the edge list.
fn tree_oracle<T: Num>(tree: &Value) -> Vec<Vec<T>> {
    let verts = tree["vertices"].as_array().unwrap();
    let nv = verts.len();
    let mut d: Vec<Vec<Option<T>>> = vec![vec![None; nv]; nv];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(T::zero());
    }
    for e in tree["edges"].as_array().unwrap() {
        let (u, v) = (e[0].as_u64().unwrap() as usize, e[1].as_u64().unwrap() as usize);
        let w = T::parse(&e[2]);
        assert!(w > T::zero(), "non-positive edge weight");
        d[u][v] = Some(w.clone());
        d[v][u] = Some(w);
    }
    for k in 0..nv {
        for i in 0..nv {
            for j in 0..nv {
                if let (Some(a), Some(b)) = (d[i][k].clone(), d[k][j].clone()) {
                    let via = a + b;
                    if d[i][j].as_ref().is_none_or(|c| via < *c) {
                        d[i][j] = Some(via);
                    }
                }
            }
        }
    }
    let mut point_vertex: Vec<(usize, usize)> = verts
        .iter()
        .filter(|v| v["kind"] == "exposed")
        .map(|v| (v["point"].as_u64().unwrap() as usize, v["id"].as_u64().unwrap() as usize))
        .collect();
    point_vertex.sort();
    let pv: Vec<usize> = point_vertex.iter().map(|p| p.1).collect();
    pv.iter().map(|&a| pv.iter().map(|&b| d[a][b].clone().expect("tree is connected")).collect()).collect()
}

fn norm_oracle<T: Num>(coords: &[Vec<T>], norm: &str) -> Vec<Vec<T>> {
    coords
        .iter()
        .map(|a| {
            coords
                .iter()
                .map(|b| {
                    let diffs = a.iter().zip(b).map(|(x, y)| Num::abs(&(x.clone() - y.clone())));
                    match norm {
                        "l1" => diffs.fold(T::zero(), |s, v| s + v),
                        "linf" => diffs.fold(T::zero(), |s, v| if v > s { v } else { s }),
                        _ => panic!("norm {norm}"),
                    }
                })
                .collect()
        })
        .collect()
}

fn host_oracle<T: Num>(host: &Value) -> Vec<Vec<T>> {
    let norm = host["norm"].as_str().unwrap();
    if norm == "tree" {
        return tree_oracle(&host["tree"]);
    }
    let coords: Vec<Vec<T>> = host["coords"].as_array().unwrap().iter().map(|r| r.as_array().unwrap().iter().map(T::parse).collect()).collect();
    norm_oracle(&coords, norm)
}

fn matrix<T: Num>(space: &MetricSpace<T>) -> Vec<Vec<T>>
where
    T: online_embed::Scalar,
{
    space.to_matrix()
}

/// `(expansion, contraction)`; contraction is `None` when a pair collapses.
fn distortion_oracle<T: Num>(d: &[Vec<T>], h: &[Vec<T>]) -> (T, Option<T>) {
    let mut exp = T::zero();
    let mut con = Some(T::zero());
    for i in 0..d.len() {
        for j in 0..i {
            let e = h[i][j].clone() / d[i][j].clone();
            if e > exp {
                exp = e;
            }
            if h[i][j] == T::zero() {
                con = None;
            } else if let Some(c) = &con {
                let r = d[i][j].clone() / h[i][j].clone();
                if r > *c {
                    con = Some(r);
                }
            }
        }
    }
    (exp, con)
}

fn distortion_value<T: Num>(d: &[Vec<T>], h: &[Vec<T>]) -> Option<T> {
    let (e, c) = distortion_oracle(d, h);
    c.map(|c| e * c)
}

/// Full source matrix and responses rebuilt from a transcript.
fn transcript_metric<T: Num>(t: &DuelTranscript) -> Vec<Vec<T>> {
    let rows: Vec<Vec<T>> = t
        .events
        .iter()
        .filter_map(|e| match e {
            Event::Expose { dists, .. } => Some(dists.iter().map(T::parse).collect()),
            _ => None,
        })
        .collect();
    let n = rows.len();
    let mut d = vec![vec![T::zero(); n]; n];
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), i, "exposure {i} lists {} distances", row.len());
        for (j, v) in row.iter().enumerate() {
            d[i][j] = v.clone();
            d[j][i] = v.clone();
        }
    }
    d
}

fn responses(t: &DuelTranscript) -> Vec<&Value> {
    t.events
        .iter()
        .filter_map(|e| match e {
            Event::Respond { response, .. } => Some(response),
            _ => None,
        })
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: usize, title: &str, o: &Outcome) {
    println!("criterion {id} [{}] {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

fn criterion_1() -> Outcome {
    let n = 8;
    let bound = (1i64 << (n - 1)) - 1;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for trial in 0..200u64 {
        let seed = split_seed(MASTER_SEED, trial);
        let kind = GeneratorKind::ALL[trial as usize % 3];
        let exact: MetricSpace<Rational> = random_metric(&mut rng_from_seed(seed), n, kind);
        let tree = tree_to_json(GreedyTreeState::run(&exact).unwrap().tree());
        let d = matrix(&exact);
        let h: Vec<Vec<Rational>> = tree_oracle(&tree);
        let dominates = (0..n).all(|i| (0..n).all(|j| h[i][j] >= d[i][j]));
        let dist = distortion_value(&d, &h).expect("dominating trees never collapse");
        worst = worst.max(dist.f64());
        if !dominates || dist > Rational::int(bound) {
            failures.push(format!("rational trial {trial}"));
        }

        let float: MetricSpace<f64> = random_metric(&mut rng_from_seed(seed), n, kind);
        let tree = tree_to_json(GreedyTreeState::run(&float).unwrap().tree());
        let d = matrix(&float);
        let h: Vec<Vec<f64>> = tree_oracle(&tree);
        let dominates = (0..n).all(|i| (0..n).all(|j| h[i][j] >= d[i][j] * (1.0 - 1e-9)));
        let dist = distortion_value(&d, &h).unwrap_or(f64::INFINITY);
        worst = worst.max(dist);
        if !dominates || dist > bound as f64 * (1.0 + 1e-9) {
            failures.push(format!("float trial {trial}"));
        }
    }
    Outcome { pass: failures.is_empty(), detail: format!("200 metrics x 2 backends, n=8, worst distortion {worst:.3} <= {bound}; failures {failures:?}") }
}

fn criterion_2(transcripts: &mut Vec<DuelTranscript>) -> Outcome {
    let mut failures = Vec::new();
    let mut measured = Vec::new();
    for embedder in [EmbedderKind::GreedyTree, EmbedderKind::SteinerBestEffort] {
        for t in 2..=4usize {
            let config = DuelConfig::new(AdversaryKind::Tree, t).with_embedder(embedder);
            let tr = match run_duel(&config) {
                Ok(tr) => tr,
                Err(e) => {
                    failures.push(format!("{embedder} t={t}: {e}"));
                    continue;
                }
            };
            let d: Vec<Vec<Rational>> = transcript_metric(&tr);
            let last = responses(&tr).last().copied().cloned().unwrap();
            let h: Vec<Vec<Rational>> = tree_oracle(&last);
            let bound: Rational = pow2((t - 1) as u32);
            let dist = distortion_value(&d, &h);
            let ok = d.len() == 2 * t + 2 && dist.as_ref().is_none_or(|v| *v >= bound) && tr.passed;
            measured.push(format!("{embedder} t={t}: {}", dist.map_or("inf".into(), |v| v.to_string())));
            if !ok {
                failures.push(format!("{embedder} t={t}"));
            }
            transcripts.push(tr);
        }
    }
    Outcome { pass: failures.is_empty(), detail: format!("{}; failures {failures:?}", measured.join(", ")) }
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_ratio = 0.0f64;
    for trial in 0..100u64 {
        let n = 4 + trial as usize % 7;
        let kind = GeneratorKind::ALL[trial as usize % 3];
        let space: MetricSpace<Rational> = random_metric(&mut rng_from_seed(split_seed(MASTER_SEED ^ 3, trial)), n, kind);
        let d = matrix(&space);
        let mut state = LineState::new();
        let mut ok = true;
        for x in space.points() {
            state.place(&space, x).unwrap();
            ok &= state.check_gap_structure().is_ok();
            let k = x.0 + 1;
            let pos: Vec<Vec<Rational>> = state.positions().iter().map(|p| vec![p.clone()]).collect();
            let h = norm_oracle(&pos, "l1");
            let sub: Vec<Vec<Rational>> = d[..k].iter().map(|r| r[..k].to_vec()).collect();
            let (exp, _) = distortion_oracle(&sub, &h);
            ok &= exp <= pow2((k + 1) as u32);
        }
        let pos: Vec<Vec<Rational>> = state.positions().iter().map(|p| vec![p.clone()]).collect();
        let (_, con) = distortion_oracle(&d, &norm_oracle(&pos, "l1"));
        let bound = Rational::int(n as i64) * pow2::<Rational>((n + 1) as u32);
        match con {
            Some(c) => {
                worst_ratio = worst_ratio.max((c.clone() / bound.clone()).f64());
                ok &= c <= bound;
            }
            None => ok = false,
        }
        if !ok {
            failures.push(trial);
        }
    }
    Outcome { pass: failures.is_empty(), detail: format!("100 metrics n=4..10, max contraction / bound = {worst_ratio:.2e}; failing trials {failures:?}") }
}

fn linf_coords(fam: &BranchFamily<Rational>) -> Vec<Vec<Rational>> {
    match fam.finalize() {
        HostPointSet::Vectors { coords, .. } => coords,
        HostPointSet::Tree(_) => unreachable!(),
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let n = 3;
    let epsilon = Rational::new(1.into(), 2.into());
    let delta = epsilon.clone() / Rational::int(20 * (n * n) as i64);
    assert_eq!(delta, Rational::new(1.into(), 360.into()));
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (i, kind) in GeneratorKind::ALL.into_iter().enumerate() {
        let space: MetricSpace<Rational> = random_metric(&mut rng_from_seed(split_seed(MASTER_SEED ^ 4, i as u64)), n, kind);
        let fam = BranchFamily::new(delta.clone()).unwrap().run(&space).unwrap();
        let pre = fam.branch_count();
        let cert = fam.pair_certificate(&space, n);
        let d = matrix(&space);
        let h = norm_oracle(&linf_coords(&fam), "linf");
        let dist = distortion_value(&d, &h);
        let mut deduped = fam.clone();
        deduped.dedup();
        let ok = pre <= 1_042_568 && cert.all_pass() && dist.as_ref().is_some_and(|v| *v <= Rational::int(2));
        notes.push(format!(
            "{kind}: {pre} branches pre-dedup, {} post-dedup, distortion {:.6}",
            deduped.branch_count(),
            dist.as_ref().map_or(f64::INFINITY, Num::f64)
        ));
        if !ok {
            failures.push(format!("guarantee {kind}"));
        }
    }
    let guarantee_secs = start.elapsed().as_secs_f64();
    if guarantee_secs > 300.0 {
        failures.push(format!("guarantee mode took {guarantee_secs:.0}s"));
    }

    let delta = Rational::new(1.into(), 20.into());
    let n = 4;
    for (i, kind) in GeneratorKind::ALL.into_iter().enumerate() {
        let space: MetricSpace<Rational> = random_metric(&mut rng_from_seed(split_seed(MASTER_SEED ^ 40, i as u64)), n, kind);
        let fam = BranchFamily::new(delta.clone()).unwrap().run(&space).unwrap();
        let d = matrix(&space);
        let coords = linf_coords(&fam);
        let lipschitz = (0..n).all(|a| (0..n).all(|b| coords[a].iter().zip(&coords[b]).all(|(x, y)| Num::abs(&(x.clone() - y.clone())) <= d[a][b])));
        let per_step = fam.steps().iter().enumerate().skip(1).all(|(i, s)| Rational::int(s.max_children as i64) <= Rational::int(i as i64) * (Rational::int(2) / delta.clone() + Rational::int(2)));
        let dist = distortion_value(&d, &norm_oracle(&coords, "linf"));
        notes.push(format!("empirical {kind}: {} branches, distortion {:.4}", fam.branch_count(), dist.as_ref().map_or(f64::INFINITY, Num::f64)));
        if !lipschitz || !per_step {
            failures.push(format!("empirical {kind}"));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: format!("guarantee mode {guarantee_secs:.1}s; {}; failures {failures:?}", notes.join("; ")),
    }
}

fn criterion_5(transcripts: &mut Vec<DuelTranscript>) -> Outcome {
    let mut failures = Vec::new();
    let mut min_margin = f64::INFINITY;
    for k in 1..=4usize {
        let bound = Rational::int(1) + Rational::new(1.into(), BigInt::from(2 * k + 1)) - Rational::new(1.into(), BigInt::from(1_000_000_000));
        for embedder in [EmbedderKind::RandomFeasible, EmbedderKind::LinfBranches] {
            for seed in 0..100u64 {
                let config = DuelConfig::new(AdversaryKind::LinfDim, k).with_embedder(embedder).with_seed(seed);
                let tr = match run_duel(&config) {
                    Ok(tr) => tr,
                    Err(e) => {
                        failures.push(format!("{embedder} k={k} seed={seed}: {e}"));
                        continue;
                    }
                };
                let d: Vec<Vec<Rational>> = transcript_metric(&tr);
                let coords: Vec<Vec<Rational>> = responses(&tr).iter().map(|r| r.as_array().unwrap().iter().map(Rational::parse).collect()).collect();
                let ok_dim = coords.iter().all(|c| c.len() == k);
                let h = norm_oracle(&coords, "linf");
                let lipschitz = (0..4).all(|a| (0..4).all(|b| h[a][b] <= d[a][b]));
                let (_, con) = distortion_oracle(&d, &h);
                let ok = match &con {
                    Some(c) => {
                        min_margin = min_margin.min((c.clone() - bound.clone()).f64());
                        *c >= bound
                    }
                    None => true,
                };
                if !(ok && ok_dim && lipschitz && tr.passed) {
                    failures.push(format!("{embedder} k={k} seed={seed}"));
                }
                transcripts.push(tr);
            }
        }
    }
    Outcome { pass: failures.is_empty(), detail: format!("800 duels, smallest contraction minus bound {min_margin:.4}; failures {failures:?}") }
}

fn criterion_6(transcripts: &mut Vec<DuelTranscript>) -> Outcome {
    let mut failures = Vec::new();
    let mut measured = Vec::new();
    for g in 2..=6usize {
        let mut lowest = f64::INFINITY;
        for seed in 0..5u64 {
            let tr = match run_duel(&DuelConfig::new(AdversaryKind::L2, g).with_seed(seed)) {
                Ok(tr) => tr,
                Err(e) => {
                    failures.push(format!("gen {g} seed {seed}: {e}"));
                    continue;
                }
            };
            let d: Vec<Vec<f64>> = transcript_metric(&tr);
            let coords: Vec<Vec<f64>> = responses(&tr).iter().map(|r| r.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect()).collect();
            let e2 = |a: usize, b: usize| coords[a].iter().zip(&coords[b]).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            let n = d.len();
            let mut ok = n == 2 * g;
            let mut expansion = 0.0f64;
            for a in 0..n {
                for b in 0..a {
                    ok &= e2(a, b) >= d[a][b] * (1.0 - 1e-7);
                    expansion = expansion.max(e2(a, b) / d[a][b]);
                }
            }
            ok &= expansion >= (g as f64).sqrt() * (1.0 - 1e-3);
            // Each generation replaces edge (v, u) by the 4-cycle v-x-u-y.
            let mut next_point = 2;
            let mut gen = 1;
            for e in &tr.events {
                if let Event::Decide { decision, detail, .. } = e {
                    if decision != "replace_edge" {
                        continue;
                    }
                    gen += 1;
                    let (v, u) = (detail["v"].as_u64().unwrap() as usize, detail["u"].as_u64().unwrap() as usize);
                    let (x, y) = (next_point, next_point + 1);
                    next_point += 2;
                    let sides = [e2(v, x), e2(x, u), e2(u, y), e2(y, v)];
                    let sides_sq: f64 = sides.iter().map(|s| s * s).sum();
                    let diag_sq = e2(v, u).powi(2) + e2(x, y).powi(2);
                    ok &= sides_sq >= diag_sq * (1.0 - 1e-9);
                    ok &= e2(v, u) / d[v][u] >= ((gen - 1) as f64).sqrt() * (1.0 - 1e-3);
                    let stretch = [(v, x), (x, u), (u, y), (y, v)].iter().map(|&(a, b)| e2(a, b) / d[a][b]).fold(0.0, f64::max);
                    ok &= stretch >= (gen as f64).sqrt() * (1.0 - 1e-3);
                }
            }
            ok &= gen == g && tr.passed;
            lowest = lowest.min(expansion / (g as f64).sqrt());
            if !ok {
                failures.push(format!("gen {g} seed {seed}"));
            }
            transcripts.push(tr);
        }
        measured.push(format!("n={g}: min expansion/sqrt(n) {lowest:.3}"));
    }
    Outcome { pass: failures.is_empty(), detail: format!("{}; failures {failures:?}", measured.join(", ")) }
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    for trial in 0..50u64 {
        let mut rng = rng_from_seed(split_seed(MASTER_SEED ^ 7, trial));
        let n = 2 + trial as usize % 11;
        let base: MetricSpace<Rational> = random_metric(&mut rng, n, GeneratorKind::Tree);
        let mut perm: Vec<usize> = (0..n).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let space = base.permuted(&perm);
        let d = matrix(&space);
        let e = TreeL1Embedder::run(&space).unwrap();
        let mut ok = tree_oracle::<Rational>(&tree_to_json(e.realizer().tree())) == d;
        let dim = (n - 1).max(1);
        let tuples = e.point_tuples(dim).unwrap();
        ok &= tuples.iter().all(|t| t.len() == dim);
        ok &= norm_oracle(&tuples, "l1") == d;
        if n <= 10 {
            let lifted = host_to_json(&l1_to_linf_lift(&tuples, Some(dim)).unwrap());
            let coords = lifted["coords"].as_array().unwrap();
            ok &= coords.iter().all(|c| c.as_array().unwrap().len() == 1 << (dim - 1));
            ok &= host_oracle::<Rational>(&lifted) == d;
        }
        if !ok {
            failures.push(trial);
        }
    }
    let c4 = MetricSpace::from_matrix(
        (0..4i64).map(|i| (0..4i64).map(|j| Rational::int((i - j).abs().min(4 - (i - j).abs()))).collect()).collect(),
    )
    .unwrap();
    let rejected = four_point_check(&c4).is_err();
    Outcome {
        pass: failures.is_empty() && rejected,
        detail: format!("50 trees n=2..12, failing trials {failures:?}; unit 4-cycle rejected: {rejected}"),
    }
}

fn criterion_8(transcripts: &[DuelTranscript]) -> Outcome {
    let mut mismatches = 0;
    for t in transcripts {
        let reparsed = DuelTranscript::from_json_str(&t.to_json_string()).unwrap();
        let r = replay(&reparsed).unwrap();
        if !(reparsed == *t && r.identical && r.replayed.to_json_string() == t.to_json_string()) {
            mismatches += 1;
        }
    }
    Outcome { pass: mismatches == 0, detail: format!("{} transcripts replayed, {mismatches} mismatches", transcripts.len()) }
}

#[test]
fn acceptance() {
    let mut transcripts = Vec::new();
    let results = [
        ("greedy tree upper bound", criterion_1()),
        ("tree adversary lower bound", criterion_2(&mut transcripts)),
        ("line embedder bounds", criterion_3()),
        ("l-infinity guarantee and empirical modes", criterion_4()),
        ("l-infinity dimension adversary", criterion_5(&mut transcripts)),
        ("l2 adversary", criterion_6(&mut transcripts)),
        ("isometry suite", criterion_7()),
        ("determinism and replay", criterion_8(&transcripts)),
    ];
    for (i, (title, o)) in results.iter().enumerate() {
        report(i + 1, title, o);
    }
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, (_, o))| !o.pass).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
