//! Single-level entropy maximization experiment on the concatenated
//! three-Gaussian stream: cortex against K-means, a uniformly spaced
//! codebook, and the theoretical maximum, plus node-count convergence and a
//! range-limit sweep.

use serde::{Deserialize, Serialize};

use crate::baselines::kmeans_capped;
use crate::baselines::VectorSet;
use crate::bench::train_cortex;
use crate::cortex::CortexParams;
use crate::error::{Error, Result};
use crate::metrics::normalized_entropy;
use crate::signal::{gen_gaussian_mixture, GaussianMixtureConfig};
use crate::transform::NormalizationSpec;

/// Depth-1 cortex settings for the entropy comparison (single pass).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EntropyCortexSection {
    pub r_limit: f64,
    pub maturity_threshold: f64,
    pub k_adapt: f64,
    pub n_power: f64,
    pub l_base: f64,
    pub k_range_power: f64,
    pub k_maturity_base: f64,
    pub epochs: usize,
}

impl Default for EntropyCortexSection {
    fn default() -> Self {
        EntropyCortexSection {
            r_limit: 1.5,
            maturity_threshold: 1000.0,
            k_adapt: 0.5,
            n_power: 0.5,
            l_base: 0.5,
            k_range_power: 1.0,
            k_maturity_base: 1.0,
            epochs: 1,
        }
    }
}

/// Multi-epoch settings for the node-count convergence series. Fast-freezing
/// dynamics (n_power = 1) let the node set stabilize within the horizon.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceSection {
    pub epochs: usize,
    pub r_limit: f64,
    pub maturity_threshold: f64,
    pub k_adapt: f64,
    pub n_power: f64,
    pub l_base: f64,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        ConvergenceSection {
            epochs: 50,
            r_limit: 1.5,
            maturity_threshold: 2.0,
            k_adapt: 0.75,
            n_power: 1.0,
            l_base: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EntropyConfig {
    pub mixture: GaussianMixtureConfig,
    pub comparison: EntropyCortexSection,
    pub convergence: ConvergenceSection,
    /// Range-limit values for the sweep panel.
    pub r_limit_sweep: Vec<f64>,
    pub kmeans_seed: u64,
    pub kmeans_max_iter: usize,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        EntropyConfig {
            mixture: GaussianMixtureConfig {
                seed: 1,
                ..GaussianMixtureConfig::default()
            },
            comparison: EntropyCortexSection::default(),
            convergence: ConvergenceSection::default(),
            r_limit_sweep: vec![3.0, 2.0, 1.5, 1.0, 0.75],
            kmeans_seed: 1,
            kmeans_max_iter: 300,
        }
    }
}

impl EntropyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("config parse: {e}")))
    }

    pub fn load<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RLimitSweepPoint {
    pub r_limit: f64,
    pub k: usize,
    pub h: f64,
    pub node_values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropyExperimentReport {
    pub k_cortex: usize,
    pub h_cortex: f64,
    pub h_kmeans: f64,
    pub h_uniform: f64,
    /// Normalized theoretical maximum.
    pub h_max: f64,
    pub cortex_node_values: Vec<f64>,
    pub cortex_probabilities: Vec<f64>,
    pub uniform_probabilities: Vec<f64>,
    /// Cortex node count after each convergence epoch.
    pub node_counts_per_epoch: Vec<usize>,
    pub new_nodes_per_epoch: Vec<usize>,
    pub r_limit_sweep: Vec<RLimitSweepPoint>,
}

/// K equally spaced nodes spanning [lo, hi].
pub fn uniform_codebook(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..k)
        .map(|i| lo + i as f64 * (hi - lo) / (k - 1) as f64)
        .collect()
}

/// Winner-take-all visit counts of sorted scalar nodes over a sample stream.
pub fn visit_counts_1d(nodes: &[f64], samples: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; nodes.len()];
    for &x in samples {
        let i = nodes.partition_point(|&v| v < x);
        let pick = if i == 0 {
            0
        } else if i == nodes.len() {
            nodes.len() - 1
        } else if (x - nodes[i - 1]).abs() <= (nodes[i] - x).abs() {
            i - 1
        } else {
            i
        };
        counts[pick] += 1;
    }
    counts
}

fn depth1_params(
    samples: &[f64],
    r_limit: f64,
    maturity_threshold: f64,
    k_adapt: f64,
    n_power: f64,
    l_base: f64,
    k_range_power: f64,
    k_maturity_base: f64,
) -> Result<CortexParams> {
    let (lo, hi) = min_max(samples)?;
    let r_init = ((hi - lo) / 2.0).max(r_limit * 2.0);
    CortexParams::new(r_init, r_limit, maturity_threshold)?
        .with_k_adapt(k_adapt)?
        .with_n_power(n_power)?
        .with_l_base(l_base)?
        .with_k_range_power(k_range_power)?
        .with_k_maturity_base(k_maturity_base)
}

fn min_max(samples: &[f64]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::DegenerateInput("empty sample stream".into()));
    }
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Sorted node values of a depth-1 cortex trained on the samples.
fn train_depth1_nodes(samples: &[f64], params: CortexParams, epochs: usize) -> Result<Vec<f64>> {
    let vectors: Vec<Vec<f64>> = samples.iter().map(|&x| vec![x]).collect();
    let tree = train_cortex(&vectors, params, epochs)?;
    let codebook = tree.finalize(NormalizationSpec::identity())?;
    Ok(codebook.codewords().iter().map(|c| c[0]).collect())
}

/// Runs the full suite: entropy comparison, convergence series, and the
/// range-limit sweep.
pub fn entropy_experiment(cfg: &EntropyConfig) -> Result<EntropyExperimentReport> {
    let stream = gen_gaussian_mixture(&cfg.mixture)?;
    let samples = &stream.samples;
    let (lo, hi) = min_max(samples)?;

    // Cortex comparison run.
    let comp = &cfg.comparison;
    let params = depth1_params(
        samples,
        comp.r_limit,
        comp.maturity_threshold,
        comp.k_adapt,
        comp.n_power,
        comp.l_base,
        comp.k_range_power,
        comp.k_maturity_base,
    )?;
    let cortex_nodes = train_depth1_nodes(samples, params, comp.epochs)?;
    let k = cortex_nodes.len();
    if k < 2 {
        return Err(Error::DegenerateInput(
            "cortex produced fewer than two nodes; lower r_limit or the maturity threshold".into(),
        ));
    }
    let cortex_counts = visit_counts_1d(&cortex_nodes, samples);
    let cortex_entropy = normalized_entropy(&cortex_counts)?;

    // K-means with matched K on the same stream.
    let data = VectorSet::from_scalars(samples)?;
    let km = kmeans_capped(&data, k, cfg.kmeans_seed, cfg.kmeans_max_iter)?;
    let mut km_nodes: Vec<f64> = km.codebook.centroids().iter().map(|c| c[0]).collect();
    km_nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite centroids"));
    let km_counts = visit_counts_1d(&km_nodes, samples);
    let h_kmeans = normalized_entropy(&km_counts)?.h;

    // Uniformly spaced nodes over the data range.
    let uniform_nodes = uniform_codebook(lo, hi, k);
    let uniform_counts = visit_counts_1d(&uniform_nodes, samples);
    let uniform_entropy = normalized_entropy(&uniform_counts)?;

    // Node-count convergence series on a fresh tree.
    let conv = &cfg.convergence;
    let conv_params = depth1_params(
        samples,
        conv.r_limit,
        conv.maturity_threshold,
        conv.k_adapt,
        conv.n_power,
        conv.l_base,
        comp.k_range_power,
        comp.k_maturity_base,
    )?;
    let vectors: Vec<Vec<f64>> = samples.iter().map(|&x| vec![x]).collect();
    let mut conv_tree = crate::cortex::CortexTree::new(1, conv_params)?;
    let mut node_counts_per_epoch = Vec::with_capacity(conv.epochs);
    let mut new_nodes_per_epoch = Vec::with_capacity(conv.epochs);
    let mut previous = 0usize;
    for _ in 0..conv.epochs {
        for v in &vectors {
            conv_tree.train_frame(v)?;
        }
        let count = conv_tree.node_count();
        node_counts_per_epoch.push(count);
        new_nodes_per_epoch.push(count - previous);
        previous = count;
    }

    // Range-limit sweep, single pass each.
    let mut sweep = Vec::new();
    for &r_limit in &cfg.r_limit_sweep {
        let params = depth1_params(
            samples,
            r_limit,
            comp.maturity_threshold,
            comp.k_adapt,
            comp.n_power,
            comp.l_base,
            comp.k_range_power,
            comp.k_maturity_base,
        )?;
        let nodes = train_depth1_nodes(samples, params, comp.epochs)?;
        let counts = visit_counts_1d(&nodes, samples);
        let report = normalized_entropy(&counts)?;
        sweep.push(RLimitSweepPoint {
            r_limit,
            k: nodes.len(),
            h: report.h,
            node_values: nodes,
            probabilities: report.probabilities,
        });
    }

    Ok(EntropyExperimentReport {
        k_cortex: k,
        h_cortex: cortex_entropy.h,
        h_kmeans,
        h_uniform: uniform_entropy.h,
        h_max: 1.0,
        cortex_node_values: cortex_nodes,
        cortex_probabilities: cortex_entropy.probabilities,
        uniform_probabilities: uniform_entropy.probabilities,
        node_counts_per_epoch,
        new_nodes_per_epoch,
        r_limit_sweep: sweep,
    })
}

/// Writes the report as JSON plus TSV panels; returns the paths written.
pub fn emit_entropy_report(
    report: &EntropyExperimentReport,
    dir: &std::path::Path,
) -> Result<Vec<std::path::PathBuf>> {
    use std::io::Write;
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let json_path = dir.join("entropy.json");
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(report).map_err(|e| Error::Format(e.to_string()))?,
    )?;
    written.push(json_path);

    let conv_path = dir.join("plot_nodes_vs_epoch.tsv");
    let mut f = std::fs::File::create(&conv_path)?;
    for (epoch, count) in report.node_counts_per_epoch.iter().enumerate() {
        writeln!(f, "{}\t{}", epoch + 1, count)?;
    }
    written.push(conv_path);

    let visit_path = dir.join("plot_visit_probability.tsv");
    let mut f = std::fs::File::create(&visit_path)?;
    for (v, p) in report
        .cortex_node_values
        .iter()
        .zip(&report.cortex_probabilities)
    {
        writeln!(f, "{v}\t{p}")?;
    }
    written.push(visit_path);

    let sweep_path = dir.join("plot_rlimit_sweep.tsv");
    let mut f = std::fs::File::create(&sweep_path)?;
    for point in &report.r_limit_sweep {
        writeln!(f, "{}\t{}\t{}", point.r_limit, point.k, point.h)?;
    }
    written.push(sweep_path);
    Ok(written)
}
