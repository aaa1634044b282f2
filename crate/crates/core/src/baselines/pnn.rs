//! Pairwise nearest neighbor merging: repeatedly merge the closest pair of
//! clusters into their size-weighted mean until k remain.
//!
//! Each cluster caches its nearest neighbor; a merge invalidates only the
//! caches that referenced the merged pair, keeping the run at O(n^2) overall
//! for moderate n.

use crate::baselines::{squared_distance, CentroidCodebook, VectorSet};
use crate::error::{Error, Result};

pub fn pnn(data: &VectorSet, k: usize) -> Result<CentroidCodebook> {
    let weights = vec![1.0; data.len()];
    pnn_weighted(data.vectors(), &weights, k)
}

/// PNN over weighted points (Birch phase 3 passes leaf-entry counts).
pub fn pnn_weighted(points: &[Vec<f64>], weights: &[f64], k: usize) -> Result<CentroidCodebook> {
    let n = points.len();
    if n == 0 || weights.len() != n {
        return Err(Error::Shape("points and weights must align and be non-empty".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InfeasibleK(format!(
            "k must satisfy 1 <= k <= n = {n}, got {k}"
        )));
    }

    let mut centroids: Vec<Vec<f64>> = points.to_vec();
    let mut w: Vec<f64> = weights.to_vec();
    let mut alive: Vec<bool> = vec![true; n];
    // nearest[i] = (distance, partner) over alive clusters with index != i.
    let mut nearest: Vec<Option<(f64, usize)>> = vec![None; n];

    let find_nearest = |i: usize, centroids: &[Vec<f64>], alive: &[bool]| -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for j in 0..centroids.len() {
            if j == i || !alive[j] {
                continue;
            }
            let d = squared_distance(&centroids[i], &centroids[j]);
            let better = match best {
                None => true,
                // Tie on distance resolves to the lowest partner index.
                Some((bd, bj)) => d < bd || (d == bd && j < bj),
            };
            if better {
                best = Some((d, j));
            }
        }
        best
    };

    for i in 0..n {
        nearest[i] = find_nearest(i, &centroids, &alive);
    }

    let mut remaining = n;
    while remaining > k {
        // Globally closest pair; ties resolve to the lowest (i, j) pair.
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            if !alive[i] {
                continue;
            }
            if let Some((d, j)) = nearest[i] {
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                let better = match best {
                    None => true,
                    Some((bd, ba, bb)) => d < bd || (d == bd && (a, b) < (ba, bb)),
                };
                if better {
                    best = Some((d, a, b));
                }
            }
        }
        let (_, a, b) = best.expect("at least two clusters remain");

        // Merge b into a as the size-weighted mean.
        let total = w[a] + w[b];
        for dim in 0..centroids[a].len() {
            centroids[a][dim] =
                (centroids[a][dim] * w[a] + centroids[b][dim] * w[b]) / total;
        }
        w[a] = total;
        alive[b] = false;
        nearest[b] = None;
        remaining -= 1;
        if remaining == 1 {
            break;
        }

        // Refresh caches that referenced either merged cluster, plus a's own.
        for i in 0..n {
            if !alive[i] || i == a {
                continue;
            }
            match nearest[i] {
                Some((_, j)) if j == a || j == b => {
                    nearest[i] = find_nearest(i, &centroids, &alive);
                }
                _ => {
                    // a moved; it may have become i's new nearest.
                    let d = squared_distance(&centroids[i], &centroids[a]);
                    match nearest[i] {
                        Some((bd, bj)) if d < bd || (d == bd && a < bj) => {
                            nearest[i] = Some((d, a));
                        }
                        None => nearest[i] = Some((d, a)),
                        _ => {}
                    }
                }
            }
        }
        nearest[a] = find_nearest(a, &centroids, &alive);
    }

    let survivors: Vec<Vec<f64>> = (0..n).filter(|&i| alive[i]).map(|i| centroids[i].clone()).collect();
    CentroidCodebook::new(survivors)
}
