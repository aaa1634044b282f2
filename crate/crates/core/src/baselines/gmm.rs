//! Gaussian mixture fitted by expectation maximization with diagonal
//! covariance and a variance floor. Means are initialized by K-means.
//!
//! Quantization maps a vector to the mean of its most probable component.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::kmeans::kmeans;
use crate::baselines::{CentroidCodebook, VectorSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct GmmParams {
    /// Stop when the mean log-likelihood improves by less than this.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GmmParams {
    fn default() -> Self {
        GmmParams {
            tol: 0.01,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmmModel {
    pub codebook: CentroidCodebook,
    pub weights: Vec<f64>,
    /// Per-component diagonal variances.
    pub covariances: Vec<Vec<f64>>,
    pub iterations: usize,
    pub mean_log_likelihood: f64,
    /// Mean log-likelihood after every iteration.
    pub log_likelihood_trace: Vec<f64>,
}

pub fn gmm_em(data: &VectorSet, k: usize, params: &GmmParams, seed: u64) -> Result<GmmModel> {
    let n = data.len();
    let dim = data.dim();
    if k == 0 || k > n {
        return Err(Error::InfeasibleK(format!(
            "k must satisfy 1 <= k <= n = {n}, got {k}"
        )));
    }
    if params.tol <= 0.0 {
        return Err(Error::Config(format!("tol must be positive, got {}", params.tol)));
    }

    // Variance floor: 1e-6 of the per-dimension data variance.
    let mut data_mean = vec![0.0; dim];
    for v in data.vectors() {
        for (m, x) in data_mean.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in &mut data_mean {
        *m /= n as f64;
    }
    let mut data_var = vec![0.0; dim];
    for v in data.vectors() {
        for ((s, x), m) in data_var.iter_mut().zip(v).zip(&data_mean) {
            *s += (x - m) * (x - m);
        }
    }
    let floor: Vec<f64> = data_var
        .iter()
        .map(|s| (1e-6 * s / n as f64).max(1e-12))
        .collect();

    // K-means initialization of means, weights, and variances.
    let init = kmeans(data, k, seed)?;
    let mut means: Vec<Vec<f64>> = init.codebook.centroids().to_vec();
    let mut weights = vec![0.0f64; k];
    let mut variances = vec![floor.clone(); k];
    {
        let mut counts = vec![0usize; k];
        let mut sq = vec![vec![0.0; dim]; k];
        for (v, &a) in data.vectors().iter().zip(&init.assignments) {
            counts[a] += 1;
            for ((s, x), m) in sq[a].iter_mut().zip(v).zip(&means[a]) {
                *s += (x - m) * (x - m);
            }
        }
        for j in 0..k {
            weights[j] = counts[j] as f64 / n as f64;
            if counts[j] > 0 {
                for d in 0..dim {
                    variances[j][d] = (sq[j][d] / counts[j] as f64).max(floor[d]);
                }
            }
        }
        // Guard degenerate initial weights.
        for w in &mut weights {
            *w = w.max(1e-12);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut trace = Vec::new();
    let mut prev_ll = f64::NEG_INFINITY;
    let mut iterations = 0;

    // Scratch accumulators.
    let mut resp = vec![0.0f64; k];
    loop {
        iterations += 1;
        let mut new_weights = vec![0.0f64; k];
        let mut new_means = vec![vec![0.0; dim]; k];
        let mut new_sq = vec![vec![0.0; dim]; k];
        let mut total_ll = 0.0;

        let log_norms: Vec<f64> = (0..k)
            .map(|j| {
                let log_det: f64 = variances[j].iter().map(|v| v.ln()).sum();
                -0.5 * (dim as f64 * (2.0 * std::f64::consts::PI).ln() + log_det)
                    + weights[j].ln()
            })
            .collect();

        for v in data.vectors() {
            let mut max_log = f64::NEG_INFINITY;
            for j in 0..k {
                let mut quad = 0.0;
                for ((x, m), var) in v.iter().zip(&means[j]).zip(&variances[j]) {
                    quad += (x - m) * (x - m) / var;
                }
                let log_p = log_norms[j] - 0.5 * quad;
                resp[j] = log_p;
                if log_p > max_log {
                    max_log = log_p;
                }
            }
            let mut sum = 0.0;
            for r in resp.iter_mut() {
                *r = (*r - max_log).exp();
                sum += *r;
            }
            total_ll += max_log + sum.ln();
            for j in 0..k {
                let gamma = resp[j] / sum;
                new_weights[j] += gamma;
                for ((nm, x), ns) in new_means[j]
                    .iter_mut()
                    .zip(v)
                    .zip(new_sq[j].iter_mut())
                {
                    *nm += gamma * x;
                    *ns += gamma * x * x;
                }
            }
        }

        let mean_ll = total_ll / n as f64;
        trace.push(mean_ll);

        for j in 0..k {
            if new_weights[j] < 1e-10 {
                // Singular component: reinitialize at a random data point.
                let pick = rng.gen_range(0..n);
                means[j] = data.vectors()[pick].clone();
                variances[j] = data_var.iter().map(|s| (s / n as f64).max(1e-12)).collect();
                weights[j] = 1.0 / n as f64;
                continue;
            }
            for d in 0..dim {
                let m = new_means[j][d] / new_weights[j];
                means[j][d] = m;
                variances[j][d] = (new_sq[j][d] / new_weights[j] - m * m).max(floor[d]);
            }
            weights[j] = new_weights[j] / n as f64;
        }
        let weight_sum: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= weight_sum;
        }

        if (mean_ll - prev_ll).abs() < params.tol || iterations >= params.max_iter {
            prev_ll = mean_ll;
            break;
        }
        prev_ll = mean_ll;
    }

    Ok(GmmModel {
        codebook: CentroidCodebook::new(means)?,
        weights,
        covariances: variances,
        iterations,
        mean_log_likelihood: prev_ll,
        log_likelihood_trace: trace,
    })
}

impl GmmModel {
    /// Index of the most probable component for a vector.
    pub fn assign(&self, v: &[f64]) -> usize {
        let mut best = 0;
        let mut best_lp = f64::NEG_INFINITY;
        for (j, (mean, var)) in self
            .codebook
            .centroids()
            .iter()
            .zip(&self.covariances)
            .enumerate()
        {
            let mut lp = self.weights[j].ln();
            for ((x, m), s2) in v.iter().zip(mean).zip(var) {
                lp += -0.5 * ((x - m) * (x - m) / s2 + s2.ln());
            }
            if lp > best_lp {
                best_lp = lp;
                best = j;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn single_component_recovers_mle_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let values: Vec<f64> = (0..5000).map(|_| rng.gen_range(-3.0..7.0)).collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;

        let data = VectorSet::from_scalars(&values).unwrap();
        let model = gmm_em(&data, 1, &GmmParams { tol: 1e-9, max_iter: 200 }, 0).unwrap();
        assert!((model.codebook.centroids()[0][0] - mean).abs() < 1e-6);
        assert!((model.covariances[0][0] - var).abs() < 1e-4 * var);
        assert!((model.weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_separated_gaussians_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Normal::new(-10.0, 1.0).unwrap();
        let b = Normal::new(10.0, 1.0).unwrap();
        let mut values: Vec<f64> = (0..10_000).map(|_| a.sample(&mut rng)).collect();
        values.extend((0..10_000).map(|_| b.sample(&mut rng)));
        let data = VectorSet::from_scalars(&values).unwrap();
        let model = gmm_em(&data, 2, &GmmParams::default(), 1).unwrap();
        let mut means: Vec<f64> = model.codebook.centroids().iter().map(|c| c[0]).collect();
        means.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((means[0] + 10.0).abs() < 0.1, "got {means:?}");
        assert!((means[1] - 10.0).abs() < 0.1, "got {means:?}");
    }

    #[test]
    fn log_likelihood_is_monotone_non_decreasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..20 {
            let n = rng.gen_range(50..200);
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(-20.0..20.0)).collect();
            let data = VectorSet::from_scalars(&values).unwrap();
            let k = rng.gen_range(1..=4);
            let model = gmm_em(&data, k, &GmmParams { tol: 1e-7, max_iter: 60 }, trial).unwrap();
            for pair in model.log_likelihood_trace.windows(2) {
                assert!(
                    pair[1] >= pair[0] - 1e-9,
                    "trial {trial}: LL decreased {} -> {}",
                    pair[0],
                    pair[1]
                );
            }
        }
    }

    #[test]
    fn assign_matches_nearest_for_equal_spherical_components() {
        let values = vec![-5.0, -4.9, -5.1, 5.0, 4.9, 5.1];
        let data = VectorSet::from_scalars(&values).unwrap();
        let model = gmm_em(&data, 2, &GmmParams::default(), 0).unwrap();
        let a = model.assign(&[-4.8]);
        let b = model.assign(&[4.8]);
        assert_ne!(a, b);
    }

    #[test]
    fn invalid_tolerance_rejected() {
        let data = VectorSet::from_scalars(&[1.0, 2.0]).unwrap();
        let params = GmmParams { tol: 0.0, max_iter: 10 };
        assert!(matches!(
            gmm_em(&data, 1, &params, 0),
            Err(Error::Config(_))
        ));
    }
}
