//! The antipodal adversary against 1-Lipschitz embeddings into `l_inf^k`.
//!
//! Two antipodal points `a, b` (distance 1) are exposed first. Each
//! coordinate `i` of the response gives `v_i = |phi_i(b) - phi_i(a)|` in
//! `[0, 1]`; the adversary takes the midpoint `p` of the longest gap these
//! values leave in `[0, 1]`, sets `alpha = (1 - p) / 2`, and exposes a second
//! antipodal pair `c, q` with `d(a, c) = d(b, q) = alpha`. No coordinate can
//! then separate `c` and `q` by more than `1 - 1/(2(k+1))`.

use serde_json::json;

use crate::distortion::distortion_report;
use crate::host::HostPointSet;
use crate::metric::{MetricSpace, PointId};
use crate::scalar::{Rational, Scalar};

use super::{encode_all, AdversaryError, DuelOutcome, Recorder, VectorEmbedder};

/// The four-point metric on `a, b, c, q` with `d(a,b) = d(c,q) = 1`,
/// `d(a,c) = d(b,q) = alpha` and `d(a,q) = d(b,c) = 1 - alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntipodalMetric<S> {
    pub alpha: S,
}

impl<S: Scalar> AntipodalMetric<S> {
    pub fn new(alpha: S) -> Result<Self, AdversaryError> {
        if alpha <= S::zero() || alpha > S::one().half() {
            return Err(AdversaryError::InvalidParameter(format!("alpha must lie in (0, 1/2], got {alpha}")));
        }
        Ok(AntipodalMetric { alpha })
    }

    /// Distance rows in exposure order `a, b, c, q`, each listing the
    /// distances to earlier points.
    pub fn rows(&self) -> [Vec<S>; 4] {
        let one = S::one();
        let a = self.alpha.clone();
        let b = one.clone() - a.clone();
        [vec![], vec![one.clone()], vec![a.clone(), b.clone()], vec![b, a, one]]
    }

    pub fn metric(&self) -> MetricSpace<S> {
        let mut m = MetricSpace::new();
        for row in self.rows() {
            m.expose_point(row).expect("antipodal metrics are valid for alpha in (0, 1/2]");
        }
        m
    }
}

/// Midpoint of the longest interval into which `values` (all in `[0, 1]`)
/// cut `[0, 1]`, with the leftmost interval winning ties. Returns the
/// midpoint and the interval.
pub fn longest_gap_midpoint<S: Scalar>(values: &[S]) -> (S, (S, S)) {
    let mut cuts: Vec<S> = values.to_vec();
    cuts.push(S::zero());
    cuts.push(S::one());
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("comparable values"));
    let mut best = (S::zero(), S::zero());
    let mut best_len: Option<S> = None;
    for w in cuts.windows(2) {
        let len = w[1].clone() - w[0].clone();
        if best_len.as_ref().is_none_or(|b| len > *b) {
            best_len = Some(len);
            best = (w[0].clone(), w[1].clone());
        }
    }
    ((best.0.clone() + best.1.clone()).half(), best)
}

struct Duel<'a, S: Scalar> {
    embedder: &'a mut dyn VectorEmbedder<S>,
    k: usize,
    space: MetricSpace<S>,
    images: Vec<Vec<S>>,
    rec: Recorder,
}

impl<S: Scalar> Duel<'_, S> {
    fn expose(&mut self, step: usize, row: Vec<S>) -> Result<(), AdversaryError> {
        let p = self.space.len();
        self.rec.expose(step, p, encode_all(&row));
        self.space.expose_point(row)?;
        let img = self.embedder.place(&self.space)?;
        if img.len() != self.k {
            return Err(AdversaryError::WrongDimension { expected: self.k, got: img.len() });
        }
        for (j, q) in self.images.iter().enumerate() {
            let d = self.space.d(p, j);
            for (c, (x, y)) in img.iter().zip(q).enumerate() {
                if !(x.clone() - y.clone()).abs().tol_le(d) {
                    return Err(AdversaryError::LipschitzBreach { point: PointId(p), other: PointId(j), coordinate: c });
                }
            }
        }
        self.rec.respond(step, p, json!(encode_all(&img)));
        self.images.push(img);
        Ok(())
    }
}

/// Plays one duel against a 1-Lipschitz embedder into `l_inf^k` and
/// certifies contraction at least `1 + 1/(2k+1) - 1e-9`.
pub fn linf_dim_adversary_run<S: Scalar>(embedder: &mut dyn VectorEmbedder<S>, k: usize) -> Result<DuelOutcome, AdversaryError> {
    let norm = embedder.norm();
    let mut duel = Duel { embedder, k, space: MetricSpace::new(), images: Vec::new(), rec: Recorder::new() };
    duel.expose(1, vec![])?;
    duel.expose(1, vec![S::one()])?;
    let (a, b) = (&duel.images[0], &duel.images[1]);
    let normalized: Vec<S> = b.iter().zip(a).map(|(y, x)| (y.clone() - x.clone()).abs()).collect();
    let (p, gap) = longest_gap_midpoint(&normalized);
    let alpha = (S::one() - p.clone()).half();
    duel.rec.decide(
        2,
        "alpha",
        json!({ "normalized": encode_all(&normalized), "gap": [gap.0.encode(), gap.1.encode()], "p": p.encode(), "alpha": alpha.encode() }),
    );
    let sep_bound = S::one() / S::from_count(2 * (k + 1));
    let sep = normalized.iter().map(|v| (p.clone() - v.clone()).abs()).reduce(crate::scalar::smin).unwrap_or_else(S::one);
    duel.rec.certify(2, "gap", sep_bound.encode(), sep.encode(), sep_bound.tol_le(&sep));
    let metric = AntipodalMetric::new(alpha)?;
    let [_, _, row_c, row_q] = metric.rows();
    duel.expose(2, row_c)?;
    duel.expose(2, row_q)?;
    let host = HostPointSet::vectors(norm, duel.images)?;
    let report = distortion_report(&duel.space, &host)?;
    let bound = S::one() + S::one() / S::from_count(2 * k + 1) - S::from_rational(&Rational::new(1.into(), 1_000_000_000.into()));
    let pass = report.contraction.tol_ge(&bound);
    duel.rec.certify(2, "contraction", bound.encode(), report.contraction.encode(), pass);
    Ok(DuelOutcome::finish(duel.rec, report.to_json()))
}
