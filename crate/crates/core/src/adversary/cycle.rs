//! The nested-arc adversary against online tree embeddings of the cycle.
//!
//! Points live on the cycle of length one. Phase 1 exposes the quarter
//! points; one of the two opposite pairings of quarter arcs must have
//! intersecting tree paths. Every later phase exposes the medians of the two
//! current arcs and keeps a pair of half-arcs whose tree paths still
//! intersect. After `t` phases the arcs have length `2^-(t+1)` while staying
//! at least `1/4` apart, which forces distortion at least `2^(t-1)`.

use serde_json::json;

use crate::distortion::distortion_report;
use crate::generate::cycle_distance;
use crate::host::HostPointSet;
use crate::metric::{MetricSpace, PointId};
use crate::scalar::{Rational, Scalar};

use super::{encode_all, tree_json, AdversaryError, DuelOutcome, Recorder, TreeEmbedder};

/// A clockwise arc of the cycle between two exposed points.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleArc<S> {
    pub from: PointId,
    pub to: PointId,
    pub start: S,
    pub len: S,
}

fn wrap<S: Scalar>(p: S) -> S {
    if p >= S::one() {
        p - S::one()
    } else if p < S::zero() {
        p + S::one()
    } else {
        p
    }
}

impl<S: Scalar> CycleArc<S> {
    pub fn median(&self) -> S {
        wrap(self.start.clone() + self.len.half())
    }

    /// Whether `self` lies inside `outer` (both clockwise).
    pub fn inside(&self, outer: &CycleArc<S>) -> bool {
        let offset = wrap(self.start.clone() - outer.start.clone());
        offset + self.len.clone() <= outer.len
    }

    fn split(&self, mid: PointId, mid_pos: S) -> (CycleArc<S>, CycleArc<S>) {
        let half = self.len.half();
        (
            CycleArc { from: self.from, to: mid, start: self.start.clone(), len: half.clone() },
            CycleArc { from: mid, to: self.to, start: mid_pos, len: half },
        )
    }

    fn json(&self) -> serde_json::Value {
        json!({ "from": self.from, "to": self.to, "start": self.start.encode(), "len": self.len.encode() })
    }
}

struct Game<'a, S: Scalar> {
    embedder: &'a mut dyn TreeEmbedder<S>,
    space: MetricSpace<S>,
    pos: Vec<S>,
    rec: Recorder,
}

impl<S: Scalar> Game<'_, S> {
    fn expose(&mut self, step: usize, p: S) -> Result<PointId, AdversaryError> {
        let dists: Vec<S> = self.pos.iter().map(|q| cycle_distance(&p, q)).collect();
        let id = self.pos.len();
        self.rec.expose(step, id, encode_all(&dists));
        self.space.expose_point(dists)?;
        self.pos.push(p);
        self.embedder.place(&self.space)?;
        self.rec.respond(step, id, tree_json(self.embedder.tree()));
        Ok(PointId(id))
    }

    fn intersect(&self, a: &CycleArc<S>, b: &CycleArc<S>) -> Result<bool, AdversaryError> {
        Ok(self.embedder.tree().point_paths_intersect((a.from, a.to), (b.from, b.to))?)
    }
}

/// Distortion of cutting the cycle at `cut` and laying it on the line.
pub fn cut_map_distortion<S: Scalar>(space: &MetricSpace<S>, pos: &[S], cut: &S) -> Result<crate::Extended<S>, AdversaryError> {
    let line: Vec<S> = pos.iter().map(|p| wrap(p.clone() - cut.clone())).collect();
    Ok(distortion_report(space, &HostPointSet::line(&line))?.distortion)
}

/// Plays `phases` phases (`2 phases + 2` points) against a tree embedder.
pub fn tree_adversary_run<S: Scalar>(embedder: &mut dyn TreeEmbedder<S>, phases: usize) -> Result<DuelOutcome, AdversaryError> {
    let mut game = Game { embedder, space: MetricSpace::new(), pos: Vec::new(), rec: Recorder::new() };
    let quarter = S::pow2(-2);
    let mut ids = Vec::new();
    for i in 0..4 {
        ids.push(game.expose(1, S::from_count(i) * quarter.clone())?);
    }
    let arc = |a: usize, b: usize| CycleArc { from: ids[a], to: ids[b], start: game.pos[a].clone(), len: quarter.clone() };
    let first = (arc(0, 1), arc(2, 3));
    let second = (arc(1, 2), arc(3, 0));
    let (mut a, mut b) = if game.intersect(&first.0, &first.1)? {
        first
    } else if game.intersect(&second.0, &second.1)? {
        second
    } else {
        return Err(AdversaryError::NoIntersectingPairing { phase: 1 });
    };
    game.rec.decide(1, "pairing", json!({ "a": a.json(), "b": b.json() }));
    let (outer_a, outer_b) = (a.clone(), b.clone());
    let mut ok = true;
    for t in 1..=phases {
        if t > 1 {
            let ma = a.median();
            let ia = game.expose(t, ma.clone())?;
            let mb = b.median();
            let ib = game.expose(t, mb.clone())?;
            let (a1, a2) = a.split(ia, ma);
            let (b1, b2) = b.split(ib, mb);
            let mut next = None;
            for (x, y) in [(&a1, &b1), (&a1, &b2), (&a2, &b1), (&a2, &b2)] {
                if game.intersect(x, y)? {
                    next = Some((x.clone(), y.clone()));
                    break;
                }
            }
            let (na, nb) = next.ok_or(AdversaryError::NoIntersectingPairing { phase: t })?;
            game.rec.decide(t, "pairing", json!({ "a": na.json(), "b": nb.json() }));
            a = na;
            b = nb;
        }
        let want_len = S::pow2(-(t as i32) - 1);
        let holds = a.len == want_len && b.len == want_len && a.inside(&outer_a) && b.inside(&outer_b) && game.intersect(&a, &b)?;
        ok &= game.rec.certify(t, "quadruple", want_len.encode(), a.len.encode(), holds);
        let bound = S::pow2(t as i32 - 1);
        let host = HostPointSet::Tree(game.embedder.tree().clone());
        let measured = distortion_report(&game.space, &host)?.distortion;
        let pass = measured.tol_ge(&bound);
        ok &= game.rec.certify(t, "distortion", bound.encode(), measured.encode(), pass);
        if !ok {
            break;
        }
    }
    let cut = S::from_rational(&Rational::new(51.into(), 100.into()));
    let reference = cut_map_distortion(&game.space, &game.pos, &cut)?;
    game.rec.decide(phases, "reference_cut", json!({ "cut": cut.encode(), "distortion": reference.encode() }));
    let report = distortion_report(&game.space, &HostPointSet::Tree(game.embedder.tree().clone()))?;
    Ok(DuelOutcome::finish(game.rec, report.to_json()))
}
