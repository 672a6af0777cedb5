//! Online embedding of an arbitrary metric into the real line.
//!
//! `x_1` goes to 0. The `k`-th point `x_k` finds its closest predecessor `z`
//! (its father), takes the leftmost empty open interval of length
//! `2^-k d(z, x_k)` starting at or to the right of `z`, and sits at the
//! middle of that interval. Expansion after `k` points is at most `2^(k+1)`;
//! contraction after `n` points is at most `n 2^(n+1)`.

use thiserror::Error;

use crate::host::HostPointSet;
use crate::metric::{MetricSpace, PointId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LineError {
    #[error("expected point {expected} next, got {got}")]
    OutOfOrder { expected: PointId, got: PointId },
    #[error("gap structure fails around {point}: {detail}")]
    GapViolation { point: PointId, detail: String },
    #[error("father offset bound fails for {0}")]
    FatherOffset(PointId),
}

/// Smallest `s >= start` such that the open interval `(s, s + length)`
/// contains none of `sorted` (ascending). Candidates are `start` and every
/// position to its right.
pub fn leftmost_gap<S: Scalar>(sorted: &[S], start: &S, length: &S) -> S {
    let first_right = sorted.partition_point(|p| p <= start);
    let mut cand = start.clone();
    for p in &sorted[first_right..] {
        if *p >= cand.clone() + length.clone() {
            return cand;
        }
        cand = p.clone();
    }
    cand
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementInterval<S> {
    pub start: S,
    pub length: S,
}

impl<S: Scalar> PlacementInterval<S> {
    pub fn mid(&self) -> S {
        self.start.clone() + self.length.half()
    }

    pub fn end(&self) -> S {
        self.start.clone() + self.length.clone()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineState<S> {
    pos: Vec<S>,
    father: Vec<Option<PointId>>,
    sorted: Vec<S>,
    intervals: Vec<Option<PlacementInterval<S>>>,
}

impl<S: Scalar> Default for LineState<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> LineState<S> {
    pub fn new() -> Self {
        LineState { pos: Vec::new(), father: Vec::new(), sorted: Vec::new(), intervals: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    pub fn positions(&self) -> &[S] {
        &self.pos
    }

    pub fn position(&self, x: PointId) -> &S {
        &self.pos[x.0]
    }

    pub fn father(&self, x: PointId) -> Option<PointId> {
        self.father[x.0]
    }

    pub fn fathers(&self) -> &[Option<PointId>] {
        &self.father
    }

    /// `ord(x)`: 1-based exposure time.
    pub fn ord(x: PointId) -> usize {
        x.0 + 1
    }

    pub fn interval(&self, x: PointId) -> Option<&PlacementInterval<S>> {
        self.intervals[x.0].as_ref()
    }

    /// Places `x`, the newest point of `space`, and returns its position.
    pub fn place(&mut self, space: &MetricSpace<S>, x: PointId) -> Result<S, LineError> {
        if x.0 != self.pos.len() || x.0 >= space.len() {
            return Err(LineError::OutOfOrder { expected: PointId(self.pos.len()), got: x });
        }
        let (p, father, interval) = match space.closest_predecessor(x) {
            None => (S::zero(), None, None),
            Some(z) => {
                let k = Self::ord(x);
                let length = space.dist(z, x).clone() * S::pow2(-(k as i32));
                let start = leftmost_gap(&self.sorted, &self.pos[z.0], &length);
                let iv = PlacementInterval { start, length };
                (iv.mid(), Some(z), Some(iv))
            }
        };
        let at = self.sorted.partition_point(|q| *q < p);
        self.sorted.insert(at, p.clone());
        self.pos.push(p.clone());
        self.father.push(father);
        self.intervals.push(interval);
        Ok(p)
    }

    pub fn run(space: &MetricSpace<S>) -> Result<Self, LineError> {
        let mut s = Self::new();
        for x in space.points() {
            s.place(space, x)?;
        }
        Ok(s)
    }

    pub fn host(&self) -> HostPointSet<S> {
        HostPointSet::line(&self.pos)
    }

    /// `0 <= pos(x) - pos(father(x)) <= (k - 1.5) 2^-k d(x, father(x))`.
    pub fn check_father_offset(&self, space: &MetricSpace<S>, x: PointId) -> Result<(), LineError> {
        let Some(f) = self.father[x.0] else {
            return if self.pos[x.0].is_zero() { Ok(()) } else { Err(LineError::FatherOffset(x)) };
        };
        let k = Self::ord(x);
        let diff = self.pos[x.0].clone() - self.pos[f.0].clone();
        let factor = S::from_count(2 * k - 3).half();
        let bound = factor * S::pow2(-(k as i32)) * space.dist(x, f).clone();
        if S::zero().tol_le(&diff) && diff.tol_le(&bound) {
            Ok(())
        } else {
            Err(LineError::FatherOffset(x))
        }
    }

    /// Checks, for every placed point `x` and the current positions, that the
    /// left half of `x`'s placement interval keeps an empty subinterval of
    /// length `|I_L| / 2^p` ending at `pos(x)` (`p` hits in the left half) and
    /// the right half keeps an empty subinterval of length `|I_R| / (r + 1)`
    /// (`r` hits in the right half).
    pub fn check_gap_structure(&self) -> Result<(), LineError> {
        for (i, iv) in self.intervals.iter().enumerate() {
            let Some(iv) = iv else { continue };
            let x = PointId(i);
            let (start, mid, end) = (iv.start.clone(), iv.mid(), iv.end());
            let half = iv.length.half();
            let lo = self.sorted.partition_point(|q| *q <= start);
            let m = self.sorted.partition_point(|q| *q < mid);
            let hits_left = &self.sorted[lo..m];
            let left_edge = hits_left.last().cloned().unwrap_or(start);
            let need_left = half.clone() * S::pow2(-(hits_left.len() as i32));
            if !need_left.tol_le(&(mid.clone() - left_edge)) {
                return Err(LineError::GapViolation {
                    point: x,
                    detail: format!("left half has {} hits and too short a gap next to the point", hits_left.len()),
                });
            }
            let r0 = self.sorted.partition_point(|q| *q <= mid);
            let r1 = self.sorted.partition_point(|q| *q < end);
            let hits_right = &self.sorted[r0..r1];
            let mut prev = mid.clone();
            let mut widest = S::zero();
            for q in hits_right.iter().chain(std::iter::once(&end)) {
                let gap = q.clone() - prev;
                if gap > widest {
                    widest = gap;
                }
                prev = q.clone();
            }
            let need_right = half / S::from_count(hits_right.len() + 1);
            if !need_right.tol_le(&widest) {
                return Err(LineError::GapViolation {
                    point: x,
                    detail: format!("right half has {} hits and no gap of the guaranteed length", hits_right.len()),
                });
            }
        }
        Ok(())
    }
}

/// Expansion bound `2^(k+1)` after `k` points.
pub fn expansion_bound<S: Scalar>(k: usize) -> S {
    S::pow2(k as i32 + 1)
}

/// Contraction bound `n 2^(n+1)` after `n` points.
pub fn contraction_bound<S: Scalar>(n: usize) -> S {
    S::from_count(n) * S::pow2(n as i32 + 1)
}
