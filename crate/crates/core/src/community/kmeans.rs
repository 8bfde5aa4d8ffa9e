use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::seed::{stream, SimRng};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub assignments: Vec<usize>,
    /// Row-major `k × dim`.
    pub centroids: Vec<f64>,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
    /// Index of the restart that produced this fit.
    pub restart: usize,
}

#[inline]
fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

struct Points<'a> {
    data: &'a [f64],
    dim: usize,
}

impl Points<'_> {
    fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Lloyd's algorithm from k-means++ seeds, best of `restarts` by WCSS.
///
/// `points` is row-major with `dim` columns. Restart `r` draws from the stream
/// derived from `(seed, r)`; the winner is the lowest `(wcss, r)`. Points tie
/// toward the lowest centroid index. A cluster that empties is reseeded with
/// the point farthest from its current centroid.
pub fn kmeans(
    points: &[f64],
    dim: usize,
    k: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<KMeansFit> {
    if dim == 0 || !points.len().is_multiple_of(dim) {
        return Err(Error::domain("point matrix shape does not match dimension"));
    }
    let pts = Points { data: points, dim };
    let n = pts.len();
    if k == 0 || k > n {
        return Err(Error::domain(format!("k = {k} must lie in 1..={n}")));
    }
    if restarts == 0 {
        return Err(Error::domain("k-means needs at least one restart"));
    }

    let mut best: Option<KMeansFit> = None;
    for r in 0..restarts {
        let mut rng = stream(seed, &[r as u64]);
        let fit = lloyd(&pts, k, max_iters, &mut rng, r);
        if best.as_ref().is_none_or(|b| fit.wcss < b.wcss) {
            best = Some(fit);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

fn plus_plus(pts: &Points, k: usize, rng: &mut SimRng) -> Vec<f64> {
    let n = pts.len();
    let mut centroids = Vec::with_capacity(k * pts.dim);
    centroids.extend_from_slice(pts.row(rng.random_range(0..n)));
    let mut nearest: Vec<f64> = (0..n).map(|i| dist2(pts.row(i), &centroids[..pts.dim])).collect();

    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &w) in nearest.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                acc += w;
                chosen = Some(i);
                if acc > target {
                    break;
                }
            }
            chosen.expect("positive total weight")
        } else {
            // every point coincides with a chosen centroid
            rng.random_range(0..n)
        };
        centroids.extend_from_slice(pts.row(pick));
        let new = &centroids[c * pts.dim..];
        for (i, w) in nearest.iter_mut().enumerate() {
            *w = w.min(dist2(pts.row(i), new));
        }
    }
    centroids
}

fn assign(pts: &Points, centroids: &[f64], k: usize, out: &mut [usize]) -> bool {
    let mut changed = false;
    for (i, slot) in out.iter_mut().enumerate() {
        let p = pts.row(i);
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..k {
            let d = dist2(p, &centroids[c * pts.dim..(c + 1) * pts.dim]);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        if *slot != best {
            *slot = best;
            changed = true;
        }
    }
    changed
}

/// Move the farthest point of a multi-member cluster into each empty cluster.
fn repair(pts: &Points, centroids: &mut [f64], k: usize, assignments: &mut [usize]) -> bool {
    let dim = pts.dim;
    let mut sizes = vec![0usize; k];
    for &c in assignments.iter() {
        sizes[c] += 1;
    }
    let mut repaired = false;
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let mut far = None;
        let mut far_d = -1.0;
        for (i, &c) in assignments.iter().enumerate() {
            if sizes[c] < 2 {
                continue;
            }
            let d = dist2(pts.row(i), &centroids[c * dim..(c + 1) * dim]);
            if d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let i = far.expect("k <= n leaves a cluster with two members");
        sizes[assignments[i]] -= 1;
        assignments[i] = empty;
        sizes[empty] = 1;
        centroids[empty * dim..(empty + 1) * dim].copy_from_slice(pts.row(i));
        repaired = true;
    }
    repaired
}

fn update_centroids(pts: &Points, k: usize, assignments: &[usize], centroids: &mut [f64]) {
    let dim = pts.dim;
    let mut counts = vec![0usize; k];
    centroids.iter_mut().for_each(|x| *x = 0.0);
    for (i, &c) in assignments.iter().enumerate() {
        counts[c] += 1;
        for (acc, x) in centroids[c * dim..(c + 1) * dim].iter_mut().zip(pts.row(i)) {
            *acc += x;
        }
    }
    for c in 0..k {
        let inv = 1.0 / counts[c] as f64;
        centroids[c * dim..(c + 1) * dim].iter_mut().for_each(|x| *x *= inv);
    }
}

fn lloyd(pts: &Points, k: usize, max_iters: usize, rng: &mut SimRng, restart: usize) -> KMeansFit {
    let n = pts.len();
    let mut centroids = plus_plus(pts, k, rng);
    let mut assignments = vec![usize::MAX; n];
    assign(pts, &centroids, k, &mut assignments);
    repair(pts, &mut centroids, k, &mut assignments);
    for _ in 0..max_iters {
        update_centroids(pts, k, &assignments, &mut centroids);
        let changed = assign(pts, &centroids, k, &mut assignments);
        let repaired = repair(pts, &mut centroids, k, &mut assignments);
        if !changed && !repaired {
            break;
        }
    }
    update_centroids(pts, k, &assignments, &mut centroids);
    let wcss = assignments
        .iter()
        .enumerate()
        .map(|(i, &c)| dist2(pts.row(i), &centroids[c * pts.dim..(c + 1) * pts.dim]))
        .sum();
    KMeansFit { assignments, centroids, wcss, restart }
}
