//! Experiment orchestration: dataset preparation, cortex sweeps, grid runs,
//! and report emission.

mod config;
mod entropy;

pub use config::{
    Algorithm, AlgorithmsSection, BirchSection, CortexSection, DatasetKind, DatasetSection,
    ExperimentConfig, FramingSection, GmmSection, GridSection, KmeansSection, TransformSection,
};
pub use entropy::{
    emit_entropy_report, entropy_experiment, uniform_codebook, visit_counts_1d,
    ConvergenceSection, EntropyConfig, EntropyCortexSection, EntropyExperimentReport,
    RLimitSweepPoint,
};

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::{
    birch, default_birch_threshold, gmm_em, kmeans_restarts, BirchParams, GmmParams, VectorSet,
};
use crate::cortex::{Codebook, CortexParams, CortexTree};
use crate::error::{Error, Result};
use crate::metrics::{
    gain, normalized_entropy, rmse_distortion, timed, DistortionReport, Phase,
};
use crate::signal::SampleStream;
use crate::transform::{
    dwpt_forward, dwpt_inverse, normalize, denormalize, CoefficientVector, NormalizationMode,
    NormalizationSpec,
};

/// A stream framed, normalized, and transformed, ready for quantization.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub stream: SampleStream,
    pub normalization: NormalizationSpec,
    pub frames: Vec<crate::signal::Frame>,
    /// DWPT coefficients of each normalized frame.
    pub coeffs: Vec<Vec<f64>>,
}

/// Frames, normalizes, and transforms a stream, truncating to `max_frames`.
pub fn prepare(
    stream: SampleStream,
    window: usize,
    stride: usize,
    transform: &TransformSection,
    max_frames: Option<usize>,
) -> Result<PreparedData> {
    let normalization = match transform.normalization {
        NormalizationMode::PerStreamMaxAbs => NormalizationSpec::per_stream_max_abs(&stream)?,
        NormalizationMode::FixedScale => NormalizationSpec::fixed(
            transform
                .scale
                .ok_or_else(|| Error::Config("fixed_scale requires a scale".into()))?,
        )?,
    };
    let mut frames = crate::signal::frame_stream(&stream, window, stride)?;
    if let Some(limit) = max_frames {
        if frames.len() < limit {
            return Err(Error::Config(format!(
                "stream yields {} frames, fewer than the {limit} requested",
                frames.len()
            )));
        }
        frames.truncate(limit);
    }
    let coeffs = frames
        .iter()
        .map(|f| {
            dwpt_forward(&normalize(f, &normalization)).map(|c| c.coeffs().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PreparedData {
        stream,
        normalization,
        frames,
        coeffs,
    })
}

/// Half the dynamic range of each coefficient position over the first
/// `sample_cap` vectors.
pub fn estimate_r_init_levels(coeffs: &[Vec<f64>], sample_cap: usize) -> Result<Vec<f64>> {
    let first = coeffs
        .first()
        .ok_or_else(|| Error::DegenerateInput("no coefficient vectors".into()))?;
    let depth = first.len();
    let mut lo = vec![f64::INFINITY; depth];
    let mut hi = vec![f64::NEG_INFINITY; depth];
    let mut max_abs: f64 = 0.0;
    for v in coeffs.iter().take(sample_cap.max(1)) {
        for (i, &x) in v.iter().enumerate() {
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
            max_abs = max_abs.max(x.abs());
        }
    }
    let floor = (max_abs * 1e-6).max(1e-12);
    Ok(lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| ((h - l) / 2.0).max(floor))
        .collect())
}

/// Builds cortex parameters for a dataset from a config section, with the
/// per-level range floors set to `rho` times the estimated initial ranges.
pub fn cortex_params_for(
    section: &CortexSection,
    r_init_levels: Vec<f64>,
    rho: f64,
) -> Result<CortexParams> {
    let r_init = r_init_levels.iter().cloned().fold(f64::MIN, f64::max);
    CortexParams::new(r_init, r_init * rho, section.maturity_threshold)?
        .with_k_adapt(section.k_adapt)?
        .with_n_power(section.n_power)?
        .with_l_base(section.l_base)?
        .with_k_range_power(section.k_range_power)?
        .with_k_maturity_base(section.k_maturity_base)?
        .with_level_ranges(r_init_levels, rho)
}

/// Trains a cortex tree for `epochs` passes over the coefficient vectors.
pub fn train_cortex(
    coeffs: &[Vec<f64>],
    params: CortexParams,
    epochs: usize,
) -> Result<CortexTree> {
    let depth = coeffs
        .first()
        .ok_or_else(|| Error::DegenerateInput("no coefficient vectors".into()))?
        .len();
    let mut tree = CortexTree::new(depth, params)?;
    for _ in 0..epochs.max(1) {
        for v in coeffs {
            tree.train_frame(v)?;
        }
    }
    Ok(tree)
}

/// Searches the range-floor fraction rho so the finalized codeword count
/// lands within `tolerance` of `target_k`. Returns the chosen rho and the
/// achieved K. Cortex K is emergent, so the closest achievable K is kept
/// when the tolerance cannot be met.
pub fn sweep_cortex_rho(
    coeffs: &[Vec<f64>],
    section: &CortexSection,
    r_init_levels: &[f64],
    target_k: usize,
    tolerance: f64,
) -> Result<(f64, usize)> {
    let k_of = |rho: f64| -> Result<usize> {
        let params = cortex_params_for(section, r_init_levels.to_vec(), rho)?;
        let tree = train_cortex(coeffs, params, section.epochs)?;
        match tree.finalize(NormalizationSpec::identity()) {
            Ok(cb) => Ok(cb.len()),
            Err(Error::UndertrainedTree(_)) => Ok(0),
            Err(e) => Err(e),
        }
    };

    // K(rho) is not monotone: a very small floor over-branches shallow
    // levels and starves the deep ones of full paths. Scan a log-spaced
    // grid, then refine around the best point.
    let within = |k: usize| {
        k > 0 && (k as f64 - target_k as f64).abs() <= tolerance * target_k as f64
    };
    let closer = |k: usize, than: usize| {
        (k as f64 - target_k as f64).abs() < (than as f64 - target_k as f64).abs()
    };

    let (lo, hi) = (0.002f64, 0.9f64);
    let grid_points = 13usize;
    let mut best: Option<(f64, usize)> = None;
    let mut evaluated: Vec<(f64, usize)> = Vec::new();
    for i in 0..grid_points {
        let t = i as f64 / (grid_points - 1) as f64;
        let rho = (hi.ln() + t * (lo.ln() - hi.ln())).exp();
        let k = k_of(rho)?;
        evaluated.push((rho, k));
        if best.map_or(true, |(_, bk)| closer(k, bk)) {
            best = Some((rho, k));
        }
        if within(k) {
            return Ok((rho, k));
        }
    }
    let mut best = best.expect("grid evaluated");

    // Refine between the best grid point and its neighbors.
    let pos = evaluated
        .iter()
        .position(|&(rho, _)| rho == best.0)
        .expect("best came from the grid");
    let mut left = if pos + 1 < evaluated.len() {
        evaluated[pos + 1].0 // next point is smaller (grid descends)
    } else {
        lo
    };
    let mut right = if pos > 0 { evaluated[pos - 1].0 } else { hi };
    for _ in 0..12 {
        for rho in [
            (left.ln() * 0.5 + best.0.ln() * 0.5).exp(),
            (right.ln() * 0.5 + best.0.ln() * 0.5).exp(),
        ] {
            let k = k_of(rho)?;
            if closer(k, best.1) {
                if rho < best.0 {
                    right = best.0;
                } else {
                    left = best.0;
                }
                best = (rho, k);
            } else if rho < best.0 {
                left = rho;
            } else {
                right = rho;
            }
            if within(k) {
                return Ok((rho, k));
            }
        }
    }
    Ok(best)
}

/// Reconstruction distortion of a codebook over prepared data: encode,
/// decode, inverse transform, denormalize, and compare sample streams.
pub fn evaluate_distortion(
    codebook: &Codebook,
    data: &PreparedData,
    phase: Phase,
) -> Result<DistortionReport> {
    let mut original = Vec::with_capacity(data.frames.len() * data.frames[0].len());
    let mut reconstructed = Vec::with_capacity(original.capacity());
    for (frame, coeffs) in data.frames.iter().zip(&data.coeffs) {
        let index = codebook.encode(coeffs)?;
        let codeword = codebook.decode(index)?;
        let inv = dwpt_inverse(&CoefficientVector::from_coeffs(codeword.to_vec())?)?;
        let restored = denormalize(&inv, &data.normalization);
        original.extend_from_slice(&frame.values);
        reconstructed.extend_from_slice(&restored.values);
    }
    rmse_distortion(&original, &reconstructed, phase)
}

/// Normalized leaf-visit entropy of encoding the prepared data.
pub fn evaluate_entropy(codebook: &Codebook, data: &PreparedData) -> Result<f64> {
    if codebook.len() < 2 {
        return Ok(0.0);
    }
    let mut counts = vec![0u64; codebook.len()];
    for coeffs in &data.coeffs {
        counts[codebook.encode(coeffs)? as usize] += 1;
    }
    Ok(normalized_entropy(&counts)?.h)
}

/// One (algorithm, grid point, repetition) measurement.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CellResult {
    pub algorithm: Algorithm,
    pub n_vectors: usize,
    pub target_k: usize,
    pub achieved_k: usize,
    pub repetition: usize,
    pub seed: u64,
    pub train_rmse: f64,
    pub test_rmse: f64,
    pub wall_s: f64,
    pub entropy: f64,
    pub gain_vs_cortex: f64,
    /// Failure reason; numeric fields are zero when set.
    pub failed: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExperimentResult {
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    /// Cells in deterministic emission order.
    pub fn sorted_cells(&self) -> Vec<&CellResult> {
        let mut cells: Vec<&CellResult> = self.cells.iter().collect();
        cells.sort_by(|a, b| {
            (a.n_vectors, a.target_k, a.algorithm.to_string(), a.repetition).cmp(&(
                b.n_vectors,
                b.target_k,
                b.algorithm.to_string(),
                b.repetition,
            ))
        });
        cells
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "algorithm,n,K,rep,seed,train_rmse,test_rmse,wall_s,entropy,gain,status\n",
        );
        for c in self.sorted_cells() {
            let status = c.failed.as_deref().unwrap_or("ok").replace(',', ";");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                c.algorithm,
                c.n_vectors,
                c.achieved_k,
                c.repetition,
                c.seed,
                c.train_rmse,
                c.test_rmse,
                c.wall_s,
                c.entropy,
                c.gain_vs_cortex,
                status
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty results csv".into()))?;
        if !header.starts_with("algorithm,n,K,rep,seed") {
            return Err(Error::Format("unexpected results csv header".into()));
        }
        let mut cells = Vec::new();
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 11 {
                return Err(Error::Format(format!("bad results row `{line}`")));
            }
            let parse_f = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Format(format!("bad float `{s}`: {e}")))
            };
            let parse_u = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Format(format!("bad integer `{s}`: {e}")))
            };
            cells.push(CellResult {
                algorithm: fields[0].parse()?,
                n_vectors: parse_u(fields[1])?,
                target_k: parse_u(fields[2])?,
                achieved_k: parse_u(fields[2])?,
                repetition: parse_u(fields[3])?,
                seed: fields[4]
                    .parse::<u64>()
                    .map_err(|e| Error::Format(format!("bad seed: {e}")))?,
                train_rmse: parse_f(fields[5])?,
                test_rmse: parse_f(fields[6])?,
                wall_s: parse_f(fields[7])?,
                entropy: parse_f(fields[8])?,
                gain_vs_cortex: parse_f(fields[9])?,
                failed: if fields[10] == "ok" {
                    None
                } else {
                    Some(fields[10].to_string())
                },
            });
        }
        Ok(ExperimentResult { cells })
    }
}

fn train_codebook_for(
    algorithm: Algorithm,
    cfg: &ExperimentConfig,
    train: &PreparedData,
    target_k: usize,
    seed: u64,
) -> Result<(Codebook, f64)> {
    match algorithm {
        Algorithm::Cortex => {
            let section = &cfg.algorithms.cortex;
            let r_init_levels = estimate_r_init_levels(&train.coeffs, 1000)?;
            // The rho sweep is hyperparameter search and runs untimed; the
            // timed region is one training run plus finalization.
            let rho = match section.rho {
                Some(rho) => rho,
                None => {
                    sweep_cortex_rho(
                        &train.coeffs,
                        section,
                        &r_init_levels,
                        target_k,
                        section.k_tolerance,
                    )?
                    .0
                }
            };
            let params = cortex_params_for(section, r_init_levels, rho)?;
            let (codebook, wall) = timed(|| -> Result<Codebook> {
                let tree = train_cortex(&train.coeffs, params.clone(), section.epochs)?;
                tree.finalize(train.normalization)
            });
            Ok((codebook?, wall))
        }
        Algorithm::Kmeans => {
            let data = VectorSet::new(train.coeffs.clone())?;
            let section = &cfg.algorithms.kmeans;
            let (outcome, wall) = timed(|| kmeans_restarts(&data, target_k, seed, section.restarts));
            Ok((outcome?.codebook.to_codebook(train.normalization)?, wall))
        }
        Algorithm::Birch => {
            let data = VectorSet::new(train.coeffs.clone())?;
            let section = &cfg.algorithms.birch;
            let (outcome, wall) = timed(|| {
                let threshold = section
                    .threshold
                    .unwrap_or_else(|| default_birch_threshold(&data));
                birch(
                    &data,
                    &BirchParams {
                        threshold,
                        branching: section.branching,
                    },
                    target_k,
                )
            });
            Ok((outcome?.codebook.to_codebook(train.normalization)?, wall))
        }
        Algorithm::Gmm => {
            let data = VectorSet::new(train.coeffs.clone())?;
            let section = &cfg.algorithms.gmm;
            let params = GmmParams {
                tol: section.tol,
                max_iter: section.max_iter,
            };
            let (model, wall) = timed(|| gmm_em(&data, target_k, &params, seed));
            Ok((model?.codebook.to_codebook(train.normalization)?, wall))
        }
    }
}

/// Runs the full grid: for each point, generate train/test streams, train
/// every algorithm (timed), and evaluate distortion, entropy, and gain.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &(n_vectors, target_k) in &cfg.grid.points {
        for rep in 0..cfg.grid.repetitions {
            let train_seed = cfg.dataset.seed.wrapping_add(rep as u64);
            let test_seed = train_seed.wrapping_add(cfg.grid.test_seed_offset);
            let min_samples = (n_vectors - 1) * cfg.framing.stride + cfg.framing.window;

            let prepare_pair = || -> Result<(PreparedData, PreparedData)> {
                let train_stream = cfg.dataset.generate(min_samples, train_seed)?;
                let train = prepare(
                    train_stream,
                    cfg.framing.window,
                    cfg.framing.stride,
                    &cfg.transform,
                    Some(n_vectors),
                )?;
                let test_stream = cfg.dataset.generate(min_samples, test_seed)?;
                let test = prepare(
                    test_stream,
                    cfg.framing.window,
                    cfg.framing.stride,
                    &cfg.transform,
                    Some(n_vectors),
                )?;
                Ok((train, test))
            };
            let (train, test) = match prepare_pair() {
                Ok(pair) => pair,
                Err(e) => {
                    for &algorithm in &cfg.algorithms.names {
                        cells.push(failed_cell(algorithm, n_vectors, target_k, rep, train_seed, &e));
                    }
                    continue;
                }
            };

            let mut cortex_time_distortion: Option<(f64, f64)> = None;
            let mut point_cells = Vec::new();
            for &algorithm in &cfg.algorithms.names {
                match run_cell(algorithm, cfg, &train, &test, target_k, train_seed) {
                    Ok(mut cell) => {
                        cell.n_vectors = n_vectors;
                        cell.target_k = target_k;
                        cell.repetition = rep;
                        if algorithm == Algorithm::Cortex {
                            cortex_time_distortion = Some((cell.wall_s, cell.train_rmse));
                        }
                        point_cells.push(cell);
                    }
                    Err(e) => {
                        point_cells.push(failed_cell(
                            algorithm, n_vectors, target_k, rep, train_seed, &e,
                        ));
                    }
                }
            }
            // Gain vs cortex from the same grid point and repetition.
            if let Some((t_cortex, d_cortex)) = cortex_time_distortion {
                for cell in &mut point_cells {
                    if cell.failed.is_none() {
                        if cell.algorithm == Algorithm::Cortex {
                            cell.gain_vs_cortex = 1.0;
                        } else if let Ok(g) =
                            gain(cell.wall_s, cell.train_rmse, t_cortex, d_cortex)
                        {
                            cell.gain_vs_cortex = g.gain;
                        }
                    }
                }
            }
            cells.extend(point_cells);
        }
    }
    Ok(ExperimentResult { cells })
}

fn failed_cell(
    algorithm: Algorithm,
    n_vectors: usize,
    target_k: usize,
    repetition: usize,
    seed: u64,
    err: &Error,
) -> CellResult {
    CellResult {
        algorithm,
        n_vectors,
        target_k,
        achieved_k: 0,
        repetition,
        seed,
        train_rmse: 0.0,
        test_rmse: 0.0,
        wall_s: 0.0,
        entropy: 0.0,
        gain_vs_cortex: 0.0,
        failed: Some(err.to_string()),
    }
}

fn run_cell(
    algorithm: Algorithm,
    cfg: &ExperimentConfig,
    train: &PreparedData,
    test: &PreparedData,
    target_k: usize,
    seed: u64,
) -> Result<CellResult> {
    let (codebook, wall_s) = train_codebook_for(algorithm, cfg, train, target_k, seed)?;
    let train_report = evaluate_distortion(&codebook, train, Phase::Train)?;
    let test_report = evaluate_distortion(&codebook, test, Phase::Test)?;
    let entropy = evaluate_entropy(&codebook, train)?;
    Ok(CellResult {
        algorithm,
        n_vectors: 0,
        target_k: 0,
        achieved_k: codebook.len(),
        repetition: 0,
        seed,
        train_rmse: train_report.rmse,
        test_rmse: test_report.rmse,
        wall_s,
        entropy,
        gain_vs_cortex: 0.0,
        failed: None,
    })
}

/// Median-of-`runs` cortex training time at each size, with a warm-up pass.
pub fn cortex_scaling_probe(
    cfg: &ExperimentConfig,
    sizes: &[usize],
    target_k: usize,
    runs: usize,
) -> Result<Vec<(usize, f64)>> {
    let mut out = Vec::new();
    for &n in sizes {
        let min_samples = (n - 1) * cfg.framing.stride + cfg.framing.window;
        let stream = cfg.dataset.generate(min_samples, cfg.dataset.seed)?;
        let train = prepare(
            stream,
            cfg.framing.window,
            cfg.framing.stride,
            &cfg.transform,
            Some(n),
        )?;
        let section = &cfg.algorithms.cortex;
        let r_init_levels = estimate_r_init_levels(&train.coeffs, 1000)?;
        let rho = match section.rho {
            Some(rho) => rho,
            None => {
                sweep_cortex_rho(&train.coeffs, section, &r_init_levels, target_k, 0.5)?.0
            }
        };
        let params = cortex_params_for(section, r_init_levels, rho)?;
        let mut times = Vec::with_capacity(runs);
        let _ = train_cortex(&train.coeffs, params.clone(), section.epochs)?; // warm-up
        for _ in 0..runs.max(1) {
            let (tree, t) = timed(|| train_cortex(&train.coeffs, params.clone(), section.epochs));
            tree?;
            times.push(t);
        }
        times.sort_by(|a, b| a.partial_cmp(b).expect("finite times"));
        out.push((n, times[times.len() / 2]));
    }
    Ok(out)
}

/// Writes the CSV table, its JSON mirror, and two-column TSV plot panels.
/// Returns the paths written.
pub fn emit_reports(result: &ExperimentResult, dir: &Path, format: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    match format {
        "csv" | "json" => {}
        other => {
            return Err(Error::Config(format!(
                "unknown report format `{other}` (expected csv or json)"
            )))
        }
    }

    let csv_path = dir.join("results.csv");
    std::fs::write(&csv_path, result.to_csv())?;
    written.push(csv_path);

    let json_path = dir.join("results.json");
    let sorted = ExperimentResult {
        cells: result.sorted_cells().into_iter().cloned().collect(),
    };
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&sorted).map_err(|e| Error::Format(e.to_string()))?,
    )?;
    written.push(json_path);

    // Plot panels: per algorithm, n against time / train rmse / test rmse.
    let algorithms: Vec<Algorithm> = {
        let mut seen = Vec::new();
        for c in result.sorted_cells() {
            if !seen.contains(&c.algorithm) {
                seen.push(c.algorithm);
            }
        }
        seen
    };
    for (panel, pick) in [
        ("time", 0usize),
        ("train_rmse", 1),
        ("test_rmse", 2),
    ] {
        for &alg in &algorithms {
            let path = dir.join(format!("plot_{panel}_{alg}.tsv"));
            let mut file = std::fs::File::create(&path)?;
            for c in result.sorted_cells() {
                if c.algorithm != alg || c.failed.is_some() {
                    continue;
                }
                let y = match pick {
                    0 => c.wall_s,
                    1 => c.train_rmse,
                    _ => c.test_rmse,
                };
                writeln!(file, "{}\t{}", c.n_vectors, y)?;
            }
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig::from_toml(
            r#"
            [dataset]
            kind = "basic_waves"
            seed = 5

            [grid]
            points = [[400, 12]]
            repetitions = 1
            test_seed_offset = 100

            [algorithms]
            names = ["cortex", "kmeans", "birch", "gmm"]

            [algorithms.cortex]
            maturity_threshold = 2.0

            [algorithms.gmm]
            max_iter = 25
        "#,
        )
        .unwrap()
    }

    #[test]
    fn grid_is_complete_and_cells_populated() {
        let cfg = tiny_config();
        let result = run_experiment(&cfg).unwrap();
        assert_eq!(result.cells.len(), 4);
        for cell in &result.cells {
            assert!(cell.failed.is_none(), "{:?}", cell.failed);
            assert!(cell.train_rmse > 0.0);
            assert!(cell.test_rmse > 0.0);
            assert!(cell.wall_s >= 0.0);
            assert!(cell.achieved_k >= 2);
        }
        let cortex = result
            .cells
            .iter()
            .find(|c| c.algorithm == Algorithm::Cortex)
            .unwrap();
        assert_eq!(cortex.gain_vs_cortex, 1.0);
        // Cortex K lands within the sweep tolerance of the target.
        assert!((cortex.achieved_k as f64 - 12.0).abs() <= 0.1 * 12.0 + 1.0);
    }

    #[test]
    fn csv_round_trip_preserves_cells() {
        let cfg = tiny_config();
        let result = run_experiment(&cfg).unwrap();
        let text = result.to_csv();
        let back = ExperimentResult::from_csv(&text).unwrap();
        assert_eq!(back.cells.len(), result.cells.len());
        let sorted = result.sorted_cells();
        for (a, b) in back.cells.iter().zip(sorted) {
            assert_eq!(a.algorithm, b.algorithm);
            assert_eq!(a.n_vectors, b.n_vectors);
            // CSV stores the achieved K in the K column.
            assert_eq!(a.achieved_k, b.achieved_k);
            assert_eq!(a.train_rmse, b.train_rmse);
            assert_eq!(a.test_rmse, b.test_rmse);
            assert_eq!(a.wall_s, b.wall_s);
            assert_eq!(a.entropy, b.entropy);
            assert_eq!(a.gain_vs_cortex, b.gain_vs_cortex);
            assert_eq!(a.failed, b.failed);
        }
    }

    #[test]
    fn deterministic_output_ordering() {
        let cfg = tiny_config();
        let a = run_experiment(&cfg).unwrap().to_csv();
        let b = run_experiment(&cfg).unwrap().to_csv();
        // Timing columns differ run to run; compare the deterministic columns.
        let strip = |text: &str| -> Vec<String> {
            text.lines()
                .map(|l| {
                    l.split(',')
                        .enumerate()
                        .filter(|(i, _)| *i != 7 && *i != 9) // wall_s, gain
                        .map(|(_, f)| f.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect()
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn seed_isolation_for_test_stream() {
        let mut cfg = tiny_config();
        let a = run_experiment(&cfg).unwrap();
        cfg.grid.test_seed_offset = 555;
        let b = run_experiment(&cfg).unwrap();
        for (ca, cb) in a.cells.iter().zip(&b.cells) {
            assert_eq!(ca.train_rmse, cb.train_rmse, "train metrics must not move");
            if ca.algorithm != Algorithm::Cortex {
                // identical training, different test stream
                assert_ne!(ca.test_rmse, cb.test_rmse);
            }
        }
    }

    #[test]
    fn infeasible_point_recorded_as_failure_and_run_continues() {
        let mut cfg = tiny_config();
        // Force birch infeasibility: huge threshold collapses to one entry.
        cfg.algorithms.birch.threshold = Some(1e9);
        let result = run_experiment(&cfg).unwrap();
        assert_eq!(result.cells.len(), 4);
        let birch_cell = result
            .cells
            .iter()
            .find(|c| c.algorithm == Algorithm::Birch)
            .unwrap();
        assert!(birch_cell.failed.is_some());
        let kmeans_cell = result
            .cells
            .iter()
            .find(|c| c.algorithm == Algorithm::Kmeans)
            .unwrap();
        assert!(kmeans_cell.failed.is_none());
    }

    #[test]
    fn k_equals_n_reaches_near_zero_distortion_for_kmeans() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            [dataset]
            kind = "basic_waves"
            seed = 2

            [grid]
            points = [[60, 60]]
            repetitions = 1

            [algorithms]
            names = ["kmeans"]
        "#,
        )
        .unwrap();
        let result = run_experiment(&cfg).unwrap();
        let cell = &result.cells[0];
        assert!(cell.failed.is_none());
        // Against the stream's amplitude scale (about 2e4) this is zero.
        assert!(
            cell.train_rmse < 1e-6 * 2e4,
            "train rmse {}",
            cell.train_rmse
        );
    }

    #[test]
    fn emit_reports_writes_all_files() {
        let cfg = tiny_config();
        let result = run_experiment(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let files = emit_reports(&result, dir.path(), "csv").unwrap();
        assert!(files.iter().any(|p| p.ends_with("results.csv")));
        assert!(files.iter().any(|p| p.ends_with("results.json")));
        assert!(files.len() > 2);
        let text = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
        let back = ExperimentResult::from_csv(&text).unwrap();
        assert_eq!(back.cells.len(), result.cells.len());
    }

    #[test]
    fn parseval_links_rmse_and_dissipated_energy_when_frames_tile() {
        // With stride = window and the identity normalization, the summed
        // dissipated energy equals n * rmse^2.
        let cfg = ExperimentConfig::from_toml(
            r#"
            [dataset]
            kind = "basic_waves"
            seed = 9

            [framing]
            window = 8
            stride = 8

            [transform]
            normalization = "fixed_scale"
            scale = 1.0

            [grid]
            points = [[300, 10]]
            repetitions = 1

            [algorithms]
            names = ["kmeans"]
        "#,
        )
        .unwrap();
        let stream = cfg.dataset.generate(8 * 300, cfg.dataset.seed).unwrap();
        let train = prepare(stream, 8, 8, &cfg.transform, Some(300)).unwrap();
        let data = VectorSet::new(train.coeffs.clone()).unwrap();
        let outcome = kmeans_restarts(&data, 10, 1, 1).unwrap();
        let codebook = outcome.codebook.to_codebook(train.normalization).unwrap();

        let report = evaluate_distortion(&codebook, &train, Phase::Train).unwrap();
        let total_energy: f64 = train
            .coeffs
            .iter()
            .map(|c| {
                let idx = codebook.encode(c).unwrap();
                codebook.dissipated_energy(c, idx).unwrap()
            })
            .sum();
        let n = (train.frames.len() * 8) as f64;
        let lhs = report.rmse * report.rmse * n;
        assert!(
            (lhs - total_energy).abs() <= 1e-6 * total_energy.max(1.0),
            "rmse^2*n = {lhs} vs energy sum {total_energy}"
        );
    }
}
