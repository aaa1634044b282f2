//! Lloyd's algorithm with random-sample initialization.
//!
//! Iterations stop when assignments are unchanged between consecutive
//! passes. An emptied cluster is reseeded to the point farthest from its
//! assigned centroid.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{squared_distance, sse, CentroidCodebook, VectorSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KMeansOutcome {
    pub codebook: CentroidCodebook,
    pub assignments: Vec<usize>,
    pub iterations: usize,
    pub sse: f64,
}

pub fn kmeans(data: &VectorSet, k: usize, seed: u64) -> Result<KMeansOutcome> {
    kmeans_capped(data, k, seed, 300)
}

/// Lloyd iterations with an iteration cap guarding non-terminating
/// assignment cycles on large continuous data.
pub fn kmeans_capped(
    data: &VectorSet,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<KMeansOutcome> {
    let n = data.len();
    if k == 0 || k > n {
        return Err(Error::InfeasibleK(format!(
            "k must satisfy 1 <= k <= n = {n}, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Randomly choose k distinct vectors as the initial codebook.
    let mut centroids: Vec<Vec<f64>> = sample(&mut rng, n, k)
        .into_iter()
        .map(|i| data.vectors()[i].clone())
        .collect();

    let mut assignments = vec![usize::MAX; n];
    let mut iterations = 0;
    let mut prev_sse = f64::INFINITY;
    loop {
        iterations += 1;
        let mut changed = false;
        for (i, v) in data.vectors().iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, c) in centroids.iter().enumerate() {
                let d = squared_distance(c, v);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            if assignments[i] != best {
                assignments[i] = best;
                changed = true;
            }
        }
        if !changed || iterations > max_iter {
            break;
        }

        let dim = data.dim();
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, v) in data.vectors().iter().enumerate() {
            let a = assignments[i];
            counts[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(v) {
                *s += x;
            }
        }
        for j in 0..k {
            if counts[j] == 0 {
                // Reseed to the point farthest from its assigned centroid.
                let far = data
                    .vectors()
                    .iter()
                    .enumerate()
                    .max_by(|(i, v), (i2, v2)| {
                        let d = squared_distance(v, &centroids[assignments[*i]]);
                        let d2 = squared_distance(v2, &centroids[assignments[*i2]]);
                        d.partial_cmp(&d2).expect("finite distances")
                    })
                    .map(|(i, _)| i)
                    .expect("non-empty data");
                centroids[j] = data.vectors()[far].clone();
            } else {
                for (c, s) in centroids[j].iter_mut().zip(&sums[j]) {
                    *c = s / counts[j] as f64;
                }
            }
        }
        let cur_sse = sse(data, &centroids);
        debug_assert!(cur_sse <= prev_sse + 1e-6 * prev_sse.max(1.0));
        prev_sse = cur_sse;
    }

    let final_sse = sse(data, &centroids);
    Ok(KMeansOutcome {
        codebook: CentroidCodebook::new(centroids)?,
        assignments,
        iterations,
        sse: final_sse,
    })
}

/// Best of `restarts` runs by SSE, seeds derived from `seed`.
pub fn kmeans_restarts(
    data: &VectorSet,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<KMeansOutcome> {
    let mut best: Option<KMeansOutcome> = None;
    for r in 0..restarts.max(1) {
        let outcome = kmeans(data, k, seed.wrapping_add(r as u64))?;
        if best.as_ref().map_or(true, |b| outcome.sse < b.sse) {
            best = Some(outcome);
        }
    }
    Ok(best.expect("at least one restart"))
}
