//! Baseline opponents for the adversaries.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::generate::{rng_from_seed, unit_dyadic};
use crate::host::Norm;
use crate::linf::{admissible_points, feasible_interval};
use crate::metric::{MetricSpace, PointId};
use crate::scalar::{smax, Scalar};
use crate::tree::steiner::locate;
use crate::tree::WeightedTree;

use super::{newest, AdversaryError, TreeEmbedder, VectorEmbedder};

/// Places every new point, coordinate by coordinate, uniformly at random
/// (on a `2^-32` grid) inside its 1-Lipschitz feasible interval.
#[derive(Debug, Clone)]
pub struct RandomFeasible<S> {
    k: usize,
    rng: ChaCha8Rng,
    /// `values[i][x]` is coordinate `i` of point `x`.
    values: Vec<Vec<S>>,
}

impl<S: Scalar> RandomFeasible<S> {
    pub fn new(k: usize, seed: u64) -> Self {
        RandomFeasible { k, rng: rng_from_seed(seed), values: vec![Vec::new(); k] }
    }
}

impl<S: Scalar> VectorEmbedder<S> for RandomFeasible<S> {
    fn name(&self) -> &'static str {
        "random-feasible"
    }

    fn norm(&self) -> Norm {
        Norm::Linf
    }

    fn place(&mut self, space: &MetricSpace<S>) -> Result<Vec<S>, AdversaryError> {
        let x = newest(space)?;
        let mut out = Vec::with_capacity(self.k);
        for coord in &mut self.values {
            let (lo, hi) = feasible_interval(coord, space, x)?;
            let u: S = unit_dyadic(&mut self.rng);
            let v = lo.clone() + (hi - lo) * u;
            coord.push(v.clone());
            out.push(v);
        }
        Ok(out)
    }
}

/// `k` coordinates, each following one branch of the l-infinity branching
/// family: at every exposure each coordinate moves to a random element of its
/// feasible range. Coordinates that currently share a branch move to
/// distinct elements whenever the range is large enough.
#[derive(Debug, Clone)]
pub struct LinfBranches<S> {
    k: usize,
    delta: S,
    rng: ChaCha8Rng,
    values: Vec<Vec<S>>,
}

impl<S: Scalar> LinfBranches<S> {
    pub fn new(k: usize, delta: S, seed: u64) -> Result<Self, AdversaryError> {
        if delta <= S::zero() || delta > S::one() {
            return Err(AdversaryError::InvalidParameter(format!("delta must lie in (0, 1], got {delta}")));
        }
        Ok(LinfBranches { k, delta, rng: rng_from_seed(seed), values: vec![Vec::new(); k] })
    }
}

impl<S: Scalar> VectorEmbedder<S> for LinfBranches<S> {
    fn name(&self) -> &'static str {
        "linf-branches"
    }

    fn norm(&self) -> Norm {
        Norm::Linf
    }

    fn place(&mut self, space: &MetricSpace<S>) -> Result<Vec<S>, AdversaryError> {
        let x = newest(space)?;
        let mut assigned: Vec<Option<S>> = vec![None; self.k];
        for i in 0..self.k {
            if assigned[i].is_some() {
                continue;
            }
            let group: Vec<usize> = (i..self.k).filter(|&j| self.values[j] == self.values[i]).collect();
            let mut range = admissible_points(space, x, &self.delta, &self.values[i])?;
            if range.is_empty() {
                let (lo, hi) = feasible_interval(&self.values[i], space, x)?;
                range.push((lo + hi).half());
            }
            if range.len() >= group.len() {
                let picks = rand::seq::index::sample(&mut self.rng, range.len(), group.len());
                for (j, p) in group.iter().zip(picks) {
                    assigned[*j] = Some(range[p].clone());
                }
            } else {
                for j in &group {
                    assigned[*j] = Some(range[self.rng.gen_range(0..range.len())].clone());
                }
            }
        }
        let out: Vec<S> = assigned.into_iter().map(|v| v.expect("every coordinate assigned")).collect();
        for (coord, v) in self.values.iter_mut().zip(&out) {
            coord.push(v.clone());
        }
        Ok(out)
    }
}

/// Tree opponent for non-tree metrics. Each new point hangs off the tree
/// path of the exposed pair with the smallest Gromov product, at the same
/// relative position the metric suggests, by an edge of length
/// `max(g, min_y d(x, y) / 2)`.
#[derive(Debug, Clone)]
pub struct BestEffortSteiner<S> {
    tree: WeightedTree<S>,
}

impl<S: Scalar> Default for BestEffortSteiner<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> BestEffortSteiner<S> {
    pub fn new() -> Self {
        BestEffortSteiner { tree: WeightedTree::new() }
    }
}

impl<S: Scalar> TreeEmbedder<S> for BestEffortSteiner<S> {
    fn name(&self) -> &'static str {
        "steiner-best-effort"
    }

    fn tree(&self) -> &WeightedTree<S> {
        &self.tree
    }

    fn place(&mut self, space: &MetricSpace<S>) -> Result<(), AdversaryError> {
        let x = newest(space)?;
        let k = x.0;
        if k == 0 {
            self.tree.add_root(x)?;
            return Ok(());
        }
        let d = |i: usize, j: usize| space.d(i, j).clone();
        if k == 1 {
            let root = self.tree.vertex_of(PointId(0))?;
            self.tree.attach_point(x, root, d(0, 1))?;
            return Ok(());
        }
        let mut best: Option<(S, S, usize, usize)> = None;
        for u in 0..k {
            for v in (u + 1)..k {
                let g = (d(u, k) + d(v, k) - d(u, v)).half();
                let duv = d(u, v);
                let better = match &best {
                    None => true,
                    Some((bg, bd, _, _)) => g < *bg || (g == *bg && duv > *bd),
                };
                if better {
                    best = Some((g, duv, u, v));
                }
            }
        }
        let (g, duv, u, v) = best.expect("k >= 2");
        let g = smax(g, S::zero());
        let frac = crate::scalar::smin(smax((d(u, k) - g.clone()) / duv, S::zero()), S::one());
        let (uv, vv) = (self.tree.vertex_of(PointId(u))?, self.tree.vertex_of(PointId(v))?);
        let offset = frac * self.tree.distance(uv, vv)?;
        let (anchor, _) = locate(&mut self.tree, uv, vv, offset)?;
        let nearest = (0..k).map(|y| d(y, k)).reduce(crate::scalar::smin).expect("k >= 1");
        let w = smax(g, nearest.half());
        self.tree.attach_point(x, anchor, w)?;
        Ok(())
    }
}

/// Non-contracting Euclidean placer. A new point starts from an orthogonal
/// lift over one of the earlier images (always non-contracting), then a
/// multi-start local search lowers the largest expansion towards earlier
/// points, repairing contraction by pushing the candidate radially outwards.
#[derive(Debug, Clone)]
pub struct L2Placer {
    dim: usize,
    restarts: usize,
    rng: ChaCha8Rng,
    images: Vec<Vec<f64>>,
}

/// Relative slack allowed on non-contraction.
pub const L2_NON_CONTRACTION_TOL: f64 = 1e-7;

fn norm2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl L2Placer {
    pub fn new(dim: usize, restarts: usize, seed: u64) -> Self {
        L2Placer { dim, restarts: restarts.max(1), rng: rng_from_seed(seed), images: Vec::new() }
    }

    pub fn images(&self) -> &[Vec<f64>] {
        &self.images
    }

    fn objective(&self, x: &[f64], d: &[f64]) -> f64 {
        self.images.iter().zip(d).map(|(p, di)| norm2(x, p) / di).fold(0.0, f64::max)
    }

    fn feasible(&self, x: &[f64], d: &[f64], tol: f64) -> bool {
        self.images.iter().zip(d).all(|(p, di)| norm2(x, p) >= di * (1.0 - tol))
    }

    fn repair(&self, mut x: Vec<f64>, d: &[f64]) -> Option<Vec<f64>> {
        for _ in 0..100 {
            let mut moved = false;
            for (p, di) in self.images.iter().zip(d) {
                let r = norm2(&x, p);
                if r < *di {
                    if r == 0.0 {
                        return None;
                    }
                    let scale = di / r * (1.0 + 1e-12);
                    for (xc, pc) in x.iter_mut().zip(p) {
                        *xc = pc + (*xc - pc) * scale;
                    }
                    moved = true;
                }
            }
            if !moved {
                return Some(x);
            }
        }
        self.feasible(&x, d, 0.0).then_some(x)
    }

    /// Unit vector orthogonal to the affine span of the current images.
    fn orthogonal_direction(&self) -> Option<Vec<f64>> {
        let base = self.images.first()?;
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for p in &self.images[1..] {
            let mut v: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
            for q in &basis {
                let dot: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
            }
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n > 1e-9 {
                basis.push(v.into_iter().map(|a| a / n).collect());
            }
        }
        for j in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[j] = 1.0;
            for q in &basis {
                let dot = q[j];
                e.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
            }
            let n = e.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n > 1e-6 {
                return Some(e.into_iter().map(|a| a / n).collect());
            }
        }
        None
    }

    fn local_search(&mut self, start: Vec<f64>, d: &[f64], scale: f64) -> Vec<f64> {
        let mut x = start;
        let mut fx = self.objective(&x, d);
        let mut step = scale * 0.25;
        let mut iters = 0;
        while step > 1e-9 * scale && iters < 400 {
            iters += 1;
            let worst = self
                .images
                .iter()
                .zip(d)
                .enumerate()
                .map(|(i, (p, di))| (i, norm2(&x, p) / di))
                .fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a })
                .0;
            let p = &self.images[worst];
            let r = norm2(&x, p);
            let mut trial: Vec<f64> = x.iter().zip(p).map(|(xc, pc)| xc + (pc - xc) / r * step).collect();
            if self.rng.gen_bool(0.3) {
                for c in trial.iter_mut() {
                    *c += (self.rng.gen::<f64>() - 0.5) * step * 0.5;
                }
            }
            match self.repair(trial, d) {
                Some(t) => {
                    let ft = self.objective(&t, d);
                    if ft < fx - 1e-12 {
                        x = t;
                        fx = ft;
                        step *= 1.2;
                    } else {
                        step *= 0.5;
                    }
                }
                None => step *= 0.5,
            }
        }
        x
    }
}

impl VectorEmbedder<f64> for L2Placer {
    fn name(&self) -> &'static str {
        "l2-placer"
    }

    fn norm(&self) -> Norm {
        Norm::L2
    }

    fn place(&mut self, space: &MetricSpace<f64>) -> Result<Vec<f64>, AdversaryError> {
        let x = newest(space)?;
        if x.0 >= self.dim + 1 {
            return Err(AdversaryError::PlacementInfeasible(x));
        }
        let d: Vec<f64> = space.history_row(x.0).to_vec();
        if x.0 == 0 {
            let origin = vec![0.0; self.dim];
            self.images.push(origin.clone());
            return Ok(origin);
        }
        let e = self.orthogonal_direction().ok_or(AdversaryError::PlacementInfeasible(x))?;
        let mut centers: Vec<Vec<f64>> = self.images.clone();
        let centroid: Vec<f64> =
            (0..self.dim).map(|c| self.images.iter().map(|p| p[c]).sum::<f64>() / self.images.len() as f64).collect();
        centers.push(centroid);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for c in centers {
            let h = self
                .images
                .iter()
                .zip(&d)
                .map(|(p, di)| {
                    let r = norm2(&c, p);
                    (di * di - r * r).max(0.0).sqrt()
                })
                .fold(0.0, f64::max);
            let cand: Vec<f64> = c.iter().zip(&e).map(|(ci, ei)| ci + h * ei).collect();
            let f = self.objective(&cand, &d);
            if self.feasible(&cand, &d, L2_NON_CONTRACTION_TOL) && best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                best = Some((f, cand));
            }
        }
        let (mut best_f, mut best_x) = best.ok_or(AdversaryError::PlacementInfeasible(x))?;
        let scale = d.iter().cloned().fold(f64::MAX, f64::min);
        for r in 0..self.restarts {
            let mut start = best_x.clone();
            if r > 0 {
                for c in start.iter_mut() {
                    *c += (self.rng.gen::<f64>() - 0.5) * scale * 0.2;
                }
                match self.repair(start, &d) {
                    Some(s) => start = s,
                    None => continue,
                }
            }
            let cand = self.local_search(start, &d, scale);
            let f = self.objective(&cand, &d);
            if f < best_f - 1e-12 && self.feasible(&cand, &d, 0.0) {
                best_f = f;
                best_x = cand;
            }
        }
        if !self.feasible(&best_x, &d, L2_NON_CONTRACTION_TOL) {
            return Err(AdversaryError::PlacementInfeasible(x));
        }
        self.images.push(best_x.clone());
        Ok(best_x)
    }
}
