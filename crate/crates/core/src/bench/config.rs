//! TOML-backed experiment configuration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{
    BasicWavesConfig, GaussianMixtureConfig, LorenzConfig, SampleStream,
};
use crate::transform::NormalizationMode;

/// Which quantizer a cell runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Cortex,
    Kmeans,
    Birch,
    Gmm,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Algorithm::Cortex => "cortex",
            Algorithm::Kmeans => "kmeans",
            Algorithm::Birch => "birch",
            Algorithm::Gmm => "gmm",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cortex" => Ok(Algorithm::Cortex),
            "kmeans" => Ok(Algorithm::Kmeans),
            "birch" => Ok(Algorithm::Birch),
            "gmm" => Ok(Algorithm::Gmm),
            other => Err(Error::Format(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    BasicWaves,
    Lorenz,
    GaussianMixture,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSection {
    pub kind: DatasetKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub basic_waves: Option<BasicWavesConfig>,
    #[serde(default)]
    pub lorenz: Option<LorenzConfig>,
    #[serde(default)]
    pub gaussian_mixture: Option<GaussianMixtureConfig>,
}

impl DatasetSection {
    /// Generates a stream with at least `min_samples` samples under `seed`.
    /// Lorenz runs carry the seed as a small perturbation of the initial
    /// condition, since the system itself is deterministic.
    pub fn generate(&self, min_samples: usize, seed: u64) -> Result<SampleStream> {
        match self.kind {
            DatasetKind::BasicWaves => {
                let mut cfg = self.basic_waves.clone().unwrap_or_default();
                cfg.seed = seed;
                let min_period = cfg
                    .periods_in_samples
                    .iter()
                    .copied()
                    .min()
                    .ok_or_else(|| Error::Config("periods_in_samples is empty".into()))?;
                cfg.count = min_samples / min_period + 1;
                crate::signal::gen_basic_waves(&cfg)
            }
            DatasetKind::Lorenz => {
                let mut cfg = self.lorenz.clone().unwrap_or_default();
                cfg.n_steps = min_samples;
                cfg.initial_xyz[0] += seed as f64 * 1e-3;
                let mut stream = crate::signal::gen_lorenz(&cfg)?;
                stream.seed = seed;
                Ok(stream)
            }
            DatasetKind::GaussianMixture => {
                let mut cfg = self.gaussian_mixture.clone().unwrap_or_default();
                let total: usize = cfg.components.iter().map(|c| c.n_samples).sum();
                if total < min_samples {
                    let factor = min_samples.div_ceil(total);
                    for c in &mut cfg.components {
                        c.n_samples *= factor;
                    }
                }
                cfg.seed = seed;
                crate::signal::gen_gaussian_mixture(&cfg)
            }
        }
    }
}

fn default_window() -> usize {
    8
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FramingSection {
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for FramingSection {
    fn default() -> Self {
        FramingSection {
            window: default_window(),
            stride: default_stride(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformSection {
    pub normalization: NormalizationMode,
    /// Required when normalization = "fixed_scale".
    #[serde(default)]
    pub scale: Option<f64>,
}

impl Default for TransformSection {
    fn default() -> Self {
        TransformSection {
            normalization: NormalizationMode::PerStreamMaxAbs,
            scale: None,
        }
    }
}

fn default_repetitions() -> usize {
    3
}

fn default_test_seed_offset() -> u64 {
    1000
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSection {
    /// (n_vectors, target K) pairs.
    pub points: Vec<(usize, usize)>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_test_seed_offset")]
    pub test_seed_offset: u64,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CortexSection {
    #[serde(default = "CortexSection::default_k_adapt")]
    pub k_adapt: f64,
    #[serde(default = "CortexSection::default_n_power")]
    pub n_power: f64,
    #[serde(default = "CortexSection::default_l_base")]
    pub l_base: f64,
    #[serde(default = "CortexSection::default_k_range_power")]
    pub k_range_power: f64,
    #[serde(default = "CortexSection::default_k_maturity_base")]
    pub k_maturity_base: f64,
    #[serde(default = "CortexSection::default_maturity_threshold")]
    pub maturity_threshold: f64,
    /// Fixed range-floor fraction; when absent the harness sweeps it to land
    /// near the target K.
    #[serde(default)]
    pub rho: Option<f64>,
    #[serde(default = "CortexSection::default_epochs")]
    pub epochs: usize,
    /// Acceptable relative deviation of the achieved K from the target.
    #[serde(default = "CortexSection::default_k_tolerance")]
    pub k_tolerance: f64,
}

impl CortexSection {
    fn default_k_adapt() -> f64 {
        0.75
    }
    fn default_n_power() -> f64 {
        0.5
    }
    fn default_l_base() -> f64 {
        1.0
    }
    fn default_k_range_power() -> f64 {
        1.0
    }
    fn default_k_maturity_base() -> f64 {
        1.0
    }
    fn default_maturity_threshold() -> f64 {
        2.0
    }
    fn default_epochs() -> usize {
        1
    }
    fn default_k_tolerance() -> f64 {
        0.10
    }
}

impl Default for CortexSection {
    fn default() -> Self {
        CortexSection {
            k_adapt: Self::default_k_adapt(),
            n_power: Self::default_n_power(),
            l_base: Self::default_l_base(),
            k_range_power: Self::default_k_range_power(),
            k_maturity_base: Self::default_k_maturity_base(),
            maturity_threshold: Self::default_maturity_threshold(),
            rho: None,
            epochs: Self::default_epochs(),
            k_tolerance: Self::default_k_tolerance(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct KmeansSection {
    pub restarts: usize,
    pub max_iter: usize,
}

impl Default for KmeansSection {
    fn default() -> Self {
        KmeansSection {
            restarts: 1,
            max_iter: 300,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BirchSection {
    /// Absorption threshold; estimated from the data when absent.
    pub threshold: Option<f64>,
    pub branching: usize,
}

impl Default for BirchSection {
    fn default() -> Self {
        BirchSection {
            threshold: None,
            branching: 50,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GmmSection {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for GmmSection {
    fn default() -> Self {
        GmmSection {
            tol: 0.01,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmsSection {
    pub names: Vec<Algorithm>,
    #[serde(default)]
    pub cortex: CortexSection,
    #[serde(default)]
    pub kmeans: KmeansSection,
    #[serde(default)]
    pub birch: BirchSection,
    #[serde(default)]
    pub gmm: GmmSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dataset: DatasetSection,
    #[serde(default)]
    pub framing: FramingSection,
    #[serde(default)]
    pub transform: TransformSection,
    pub grid: GridSection,
    pub algorithms: AlgorithmsSection,
    /// Keep comparative timing honest by running cells sequentially.
    #[serde(default = "default_true")]
    pub serial_timing: bool,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Format(format!("config parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load<P: AsRef<std::path::Path>>(path: P) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.names.is_empty() {
            return Err(Error::Config("algorithm list is empty".into()));
        }
        if self.grid.points.is_empty() {
            return Err(Error::Config("grid has no points".into()));
        }
        for &(n, k) in &self.grid.points {
            if k == 0 || k > n {
                return Err(Error::Config(format!(
                    "grid point ({n}, {k}) violates 1 <= K <= n_vectors"
                )));
            }
        }
        if self.grid.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        if self.transform.normalization == NormalizationMode::FixedScale
            && self.transform.scale.is_none()
        {
            return Err(Error::Config(
                "fixed_scale normalization requires a scale value".into(),
            ));
        }
        Ok(())
    }
}
