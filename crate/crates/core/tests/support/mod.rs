//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the crate's algorithms; they only share plain data types.

#![allow(dead_code, clippy::needless_range_loop, clippy::too_many_arguments)]

pub mod scenarios;

use std::collections::VecDeque;

/// Straight-line scalar simulation of one pixel's mixture.
///
/// Components live in parallel arrays; ordering is restored with a full stable
/// insertion sort by `w / σ` after every step.
#[derive(Clone, Debug)]
pub struct ScalarPixel {
    pub k: usize,
    pub alpha: f64,
    pub t: f64,
    pub d: f64,
    pub var_init: f64,
    pub w_init: f64,
    pub var_min: f64,
    pub pdf_rho: bool,
    pub w: Vec<f64>,
    pub mu: Vec<[f64; 3]>,
    pub var: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScalarStep {
    pub background: bool,
    pub position: usize,
    pub b: usize,
}

impl ScalarPixel {
    pub fn new(
        k: usize,
        alpha: f64,
        t: f64,
        d: f64,
        var_init: f64,
        w_init: f64,
        var_min: f64,
        pdf_rho: bool,
        first: [f64; 3],
    ) -> Self {
        Self {
            k,
            alpha,
            t,
            d,
            var_init,
            w_init,
            var_min,
            pdf_rho,
            w: vec![1.0],
            mu: vec![first],
            var: vec![var_init],
        }
    }

    fn gaussian(mu: [f64; 3], var: f64, z: [f64; 3]) -> f64 {
        let mut sq = 0.0;
        for c in 0..3 {
            sq += (z[c] - mu[c]) * (z[c] - mu[c]);
        }
        let norm = (2.0 * std::f64::consts::PI * var).powf(1.5);
        (-0.5 * sq / var).exp() / norm
    }

    pub fn step(&mut self, z: [f64; 3]) -> ScalarStep {
        let n = self.w.len();
        let mut hit = None;
        for i in 0..n {
            let mut sq = 0.0;
            for c in 0..3 {
                sq += (z[c] - self.mu[i][c]).powi(2);
            }
            if sq.sqrt() < self.d * self.var[i].sqrt() {
                hit = Some(i);
                break;
            }
        }
        let absorbed;
        match hit {
            Some(h) => {
                let mut rho = self.alpha;
                if self.pdf_rho {
                    rho = self.alpha * Self::gaussian(self.mu[h], self.var[h], z);
                    if rho > 1.0 {
                        rho = 1.0;
                    }
                }
                for i in 0..n {
                    let m = if i == h { 1.0 } else { 0.0 };
                    self.w[i] = (1.0 - self.alpha) * self.w[i] + self.alpha * m;
                }
                let mut new_mu = [0.0; 3];
                for c in 0..3 {
                    new_mu[c] = (1.0 - rho) * self.mu[h][c] + rho * z[c];
                }
                let mut e = 0.0;
                for c in 0..3 {
                    e += (z[c] - new_mu[c]) * (z[c] - new_mu[c]);
                }
                let mut v = (1.0 - rho) * self.var[h] + rho * e;
                if v < self.var_min {
                    v = self.var_min;
                }
                self.mu[h] = new_mu;
                self.var[h] = v;
                absorbed = h;
            }
            None => {
                for i in 0..n {
                    self.w[i] *= 1.0 - self.alpha;
                }
                if n < self.k {
                    self.w.push(self.w_init);
                    self.mu.push(z);
                    self.var.push(self.var_init);
                    absorbed = n;
                } else {
                    let mut lowest = 0;
                    for i in 1..n {
                        if self.w[i] <= self.w[lowest] {
                            lowest = i;
                        }
                    }
                    self.w[lowest] = self.w_init;
                    self.mu[lowest] = z;
                    self.var[lowest] = self.var_init;
                    absorbed = lowest;
                }
                let total: f64 = self.w.iter().sum();
                for wi in self.w.iter_mut() {
                    *wi /= total;
                }
            }
        }

        // stable insertion sort by rank, tracking the absorbing component
        let mut order: Vec<usize> = (0..self.w.len()).collect();
        let rank = |i: usize, w: &[f64], var: &[f64]| w[i] / var[i].sqrt();
        for i in 1..order.len() {
            let mut j = i;
            while j > 0 && rank(order[j], &self.w, &self.var) > rank(order[j - 1], &self.w, &self.var) {
                order.swap(j, j - 1);
                j -= 1;
            }
        }
        self.w = order.iter().map(|&i| self.w[i]).collect();
        self.mu = order.iter().map(|&i| self.mu[i]).collect();
        self.var = order.iter().map(|&i| self.var[i]).collect();
        let position = order.iter().position(|&i| i == absorbed).unwrap();

        let b = brute_force_background_count(&self.w, self.t);
        ScalarStep { background: position < b, position, b }
    }
}

/// Smallest `b` whose prefix sum (recomputed from scratch) exceeds `t`; `len` if none does.
pub fn brute_force_background_count(weights: &[f64], t: f64) -> usize {
    for b in 1..=weights.len() {
        let s: f64 = weights[..b].iter().sum();
        if s > t {
            return b;
        }
    }
    weights.len()
}

/// Number of steps of constant `to`, after `settle` steps of constant `from`,
/// until the pixel first reports background. `None` if it never does within `limit`.
pub fn scalar_absorption_steps(mut pixel: ScalarPixel, from: [f64; 3], settle: usize, to: [f64; 3], limit: usize) -> Option<usize> {
    for _ in 0..settle {
        pixel.step(from);
    }
    (1..=limit).find(|_| pixel.step(to).background)
}

/// BFS flood-fill labeling; ids assigned in row-major order of first encounter.
pub fn flood_fill_labels(w: usize, h: usize, bits: &[bool], eight: bool) -> Vec<u32> {
    let mut labels = vec![0u32; w * h];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !bits[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    if (dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0) {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let j = ny as usize * w + nx as usize;
                    if bits[j] && labels[j] == 0 {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    labels
}

/// All partial injective track→blob matchings whose pairs lie within `gate`.
pub fn all_matchings(n_tracks: usize, n_blobs: usize, dist: &dyn Fn(usize, usize) -> f64, gate: f64) -> Vec<Vec<(usize, usize)>> {
    fn rec(
        t: usize,
        n_tracks: usize,
        n_blobs: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
        dist: &dyn Fn(usize, usize) -> f64,
        gate: f64,
    ) {
        if t == n_tracks {
            out.push(cur.clone());
            return;
        }
        rec(t + 1, n_tracks, n_blobs, used, cur, out, dist, gate);
        for b in 0..n_blobs {
            if !used[b] && dist(t, b) <= gate {
                used[b] = true;
                cur.push((t, b));
                rec(t + 1, n_tracks, n_blobs, used, cur, out, dist, gate);
                cur.pop();
                used[b] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(0, n_tracks, n_blobs, &mut vec![false; n_blobs], &mut Vec::new(), &mut out, dist, gate);
    out
}

/// Matchings with no blocking pair: no gated `(t, b)` closer than both of their
/// current partners (an unmatched side counts as infinitely far).
pub fn stable_matchings(n_tracks: usize, n_blobs: usize, dist: &dyn Fn(usize, usize) -> f64, gate: f64) -> Vec<Vec<(usize, usize)>> {
    all_matchings(n_tracks, n_blobs, dist, gate)
        .into_iter()
        .filter(|m| {
            let track_cost = |t: usize| m.iter().find(|p| p.0 == t).map_or(f64::INFINITY, |p| dist(p.0, p.1));
            let blob_cost = |b: usize| m.iter().find(|p| p.1 == b).map_or(f64::INFINITY, |p| dist(p.0, p.1));
            !(0..n_tracks).any(|t| {
                (0..n_blobs).any(|b| dist(t, b) <= gate && dist(t, b) < track_cost(t) && dist(t, b) < blob_cost(b))
            })
        })
        .collect()
}

/// Direct confusion counts `(tp, fp, fn)` for `class` over flat code sequences.
pub fn confusion_counts(pred: &[u8], truth: &[u8], class: u8) -> (u64, u64, u64) {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for i in 0..pred.len() {
        if pred[i] == class && truth[i] == class {
            tp += 1;
        } else if pred[i] == class {
            fp += 1;
        } else if truth[i] == class {
            fn_ += 1;
        }
    }
    (tp, fp, fn_)
}
