//! Distortion, entropy, gain, generalization, and timing shared by all
//! quantizers.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which dataset a distortion number was measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub rmse: f64,
    pub n_samples: usize,
    pub phase: Phase,
}

/// Root mean square error between an original and a reconstructed sequence.
pub fn rmse_distortion(original: &[f64], reconstructed: &[f64], phase: Phase) -> Result<DistortionReport> {
    if original.len() != reconstructed.len() {
        return Err(Error::Shape(format!(
            "length mismatch: {} vs {}",
            original.len(),
            reconstructed.len()
        )));
    }
    if original.is_empty() {
        return Err(Error::DegenerateInput("empty sequences".into()));
    }
    let sum: f64 = original
        .iter()
        .zip(reconstructed)
        .map(|(o, r)| (o - r) * (o - r))
        .sum();
    Ok(DistortionReport {
        rmse: (sum / original.len() as f64).sqrt(),
        n_samples: original.len(),
        phase,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// Visit frequencies, summing to one.
    pub probabilities: Vec<f64>,
    pub h: f64,
    pub base: f64,
}

/// Shannon entropy of visit counts with 0 log 0 taken as 0. With the base
/// equal to the outcome count the result is the normalized entropy in [0, 1].
pub fn shannon_entropy(counts: &[u64], base: f64) -> Result<EntropyReport> {
    if base <= 1.0 {
        return Err(Error::Domain(format!("log base must exceed 1, got {base}")));
    }
    let total: u64 = counts.iter().sum();
    if counts.is_empty() || total == 0 {
        return Err(Error::DegenerateInput("no visits recorded".into()));
    }
    let probabilities: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let h: f64 = probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum::<f64>()
        / base.ln();
    Ok(EntropyReport {
        probabilities,
        h,
        base,
    })
}

/// Normalized visit entropy: base equals the number of outcomes.
pub fn normalized_entropy(counts: &[u64]) -> Result<EntropyReport> {
    if counts.len() < 2 {
        return Err(Error::DegenerateInput(
            "normalized entropy needs at least two outcomes".into(),
        ));
    }
    shannon_entropy(counts, counts.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainRecord {
    pub t_alg: f64,
    pub t_cortex: f64,
    pub d_alg: f64,
    pub d_cortex: f64,
    pub gain: f64,
}

/// Combined time-and-distortion advantage: (t_alg * d_alg) / (t_cortex * d_cortex).
pub fn gain(t_alg: f64, d_alg: f64, t_cortex: f64, d_cortex: f64) -> Result<GainRecord> {
    for (name, v) in [
        ("t_alg", t_alg),
        ("d_alg", d_alg),
        ("t_cortex", t_cortex),
        ("d_cortex", d_cortex),
    ] {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(GainRecord {
        t_alg,
        t_cortex,
        d_alg,
        d_cortex,
        gain: (t_alg * d_alg) / (t_cortex * d_cortex),
    })
}

/// Test RMSE over train RMSE; values near one indicate generalization.
pub fn generalization_ratio(train: &DistortionReport, test: &DistortionReport) -> Result<f64> {
    if !(train.rmse > 0.0) {
        return Err(Error::Domain(format!(
            "train rmse must be positive, got {}",
            train.rmse
        )));
    }
    Ok(test.rmse / train.rmse)
}

/// Wall time of `computation` on a monotonic clock.
pub fn timed<T>(computation: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = computation();
    (out, start.elapsed().as_secs_f64())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub mean_s: f64,
    pub variance_s2: f64,
    pub runs: usize,
}

/// Repeats a computation, reporting mean and variance of the wall time. One
/// warm-up run is excluded.
pub fn timed_repeat<T>(runs: usize, mut computation: impl FnMut() -> T) -> (T, TimingStats) {
    assert!(runs >= 1);
    let mut last = computation(); // warm-up
    let mut times = Vec::with_capacity(runs);
    for _ in 0..runs {
        let (out, t) = timed(&mut computation);
        last = out;
        times.push(t);
    }
    let mean = times.iter().sum::<f64>() / runs as f64;
    let variance = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / runs as f64;
    (
        last,
        TimingStats {
            mean_s: mean,
            variance_s2: variance,
            runs,
        },
    )
}
