//! Lloyd's k-means with k-means++ seeding and best-of-r restarts.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{HglError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    pub inertia: f64,
}

fn sq_dist(x: &DMatrix<f64>, i: usize, c: &DMatrix<f64>, j: usize) -> f64 {
    let mut s = 0.0;
    for k in 0..x.ncols() {
        let t = x[(i, k)] - c[(j, k)];
        s += t * t;
    }
    s
}

/// Clusters the rows of `x` into `k` groups. Restarts are seeded from one stream.
pub fn kmeans(x: &DMatrix<f64>, k: usize, restarts: usize, max_iters: usize, seed: u64) -> Result<KMeansFit> {
    let n = x.nrows();
    if k == 0 || k > n {
        return Err(HglError::DegenerateInput(format!("k = {k} must lie in 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KMeansFit> = None;
    for _ in 0..restarts.max(1) {
        let fit = lloyd(x, k, max_iters, &mut rng);
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn plusplus(x: &DMatrix<f64>, k: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let n = x.nrows();
    let d = x.ncols();
    let mut centers = DMatrix::zeros(k, d);
    let first = rng.random_range(0..n);
    centers.row_mut(0).copy_from(&x.row(first));
    let mut closest: Vec<f64> = (0..n).map(|i| sq_dist(x, i, &centers, 0)).collect();
    for c in 1..k {
        let total: f64 = closest.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &dd) in closest.iter().enumerate() {
                if r < dd {
                    pick = i;
                    break;
                }
                r -= dd;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.row_mut(c).copy_from(&x.row(pick));
        for (i, cl) in closest.iter_mut().enumerate() {
            *cl = cl.min(sq_dist(x, i, &centers, c));
        }
    }
    centers
}

fn lloyd(x: &DMatrix<f64>, k: usize, max_iters: usize, rng: &mut ChaCha8Rng) -> KMeansFit {
    let n = x.nrows();
    let d = x.ncols();
    let mut centers = plusplus(x, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut dist = vec![0.0; n];
    for _ in 0..max_iters.max(1) {
        let mut changed = false;
        for i in 0..n {
            let (mut bj, mut bd) = (0, f64::INFINITY);
            for j in 0..k {
                let dd = sq_dist(x, i, &centers, j);
                if dd < bd {
                    bj = j;
                    bd = dd;
                }
            }
            dist[i] = bd;
            if labels[i] != bj {
                labels[i] = bj;
                changed = true;
            }
        }
        // refill empty clusters with the point farthest from its center
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for j in 0..k {
            if counts[j] == 0 {
                let far = (0..n)
                    .filter(|&i| counts[labels[i]] > 1)
                    .max_by(|&a, &b| dist[a].total_cmp(&dist[b]))
                    .expect("k <= n leaves a donor cluster");
                counts[labels[far]] -= 1;
                labels[far] = j;
                counts[j] = 1;
                dist[far] = 0.0;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        centers = DMatrix::zeros(k, d);
        for i in 0..n {
            let mut row = centers.row_mut(labels[i]);
            row += x.row(i);
        }
        for j in 0..k {
            let inv = 1.0 / counts[j] as f64;
            centers.row_mut(j).scale_mut(inv);
        }
    }
    let inertia = (0..n).map(|i| sq_dist(x, i, &centers, labels[i])).sum();
    KMeansFit { labels, inertia }
}

/// Mean silhouette coefficient of a labelling under Euclidean distance.
/// Singleton clusters contribute 0.
pub fn silhouette(x: &DMatrix<f64>, labels: &[usize]) -> f64 {
    let n = x.nrows();
    let k = labels.iter().max().map_or(0, |m| m + 1);
    if n < 2 || k < 2 {
        return 0.0;
    }
    let mut size = vec![0usize; k];
    for &l in labels {
        size[l] += 1;
    }
    let mut total = 0.0;
    for i in 0..n {
        if size[labels[i]] < 2 {
            continue;
        }
        let mut sums = vec![0.0; k];
        for j in 0..n {
            if i != j {
                sums[labels[j]] += sq_dist(x, i, x, j).sqrt();
            }
        }
        let a = sums[labels[i]] / (size[labels[i]] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != labels[i] && size[c] > 0)
            .map(|c| sums[c] / size[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 && b.is_finite() {
            total += (b - a) / m;
        }
    }
    total / n as f64
}
