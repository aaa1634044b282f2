//! Command-line front end: dataset generation, codebook training, stream
//! encode/decode, the benchmark grid, and the entropy suite.
//!
//! Exit codes: 0 success, 1 validation failure, 2 runtime failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cortexvq::bench::{
    cortex_params_for, emit_reports, entropy_experiment, estimate_r_init_levels, prepare,
    run_experiment, sweep_cortex_rho, train_cortex, Algorithm, EntropyConfig, ExperimentConfig,
};
use cortexvq::bench::emit_entropy_report;
use cortexvq::baselines::{
    birch, default_birch_threshold, gmm_em, kmeans_restarts, BirchParams, GmmParams, VectorSet,
};
use cortexvq::cortex::{read_indices, write_indices, Codebook};
use cortexvq::error::Error;
use cortexvq::signal::SampleStream;
use cortexvq::transform::{denormalize, dwpt_inverse, CoefficientVector};

#[derive(Parser)]
#[command(name = "cortexvq", version, about = "Streaming vector quantization toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StreamFormat {
    Csv,
    Binary,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset stream from a config file.
    Gen(GenArgs),
    /// Train one algorithm into a codebook file.
    Train(TrainArgs),
    /// Encode a stream into an index file with a codebook.
    Encode(EncodeArgs),
    /// Decode an index file back into a stream.
    Decode(DecodeArgs),
    /// Run the full comparison grid from a config file.
    Bench(BenchArgs),
    /// Run the entropy maximization suite from a config file.
    Entropy(EntropyArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the dataset seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = StreamFormat::Csv)]
    stream_format: StreamFormat,
    /// Minimum number of samples to generate.
    #[arg(long, default_value_t = 16384)]
    samples: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
    /// Algorithm to train; must appear in the config's algorithm list.
    #[arg(long)]
    algorithm: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FileFormat::Json)]
    format: FileFormat,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    codebook: PathBuf,
    /// Input stream file (CSV or binary, detected by magic).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    stride: usize,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    codebook: PathBuf,
    /// Input index file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = StreamFormat::Csv)]
    stream_format: StreamFormat,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FileFormat::Csv)]
    format: FileFormat,
    /// Run timing cells sequentially for comparable numbers.
    #[arg(long, default_value_t = true)]
    serial_timing: bool,
}

#[derive(Args)]
struct EntropyArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Train(args) => run_train(args),
        Command::Encode(args) => run_encode(args),
        Command::Decode(args) => run_decode(args),
        Command::Bench(args) => run_bench(args),
        Command::Entropy(args) => run_entropy(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if err.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn load_stream(path: &Path) -> Result<SampleStream, Error> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(cortexvq::signal::STREAM_MAGIC) {
        SampleStream::read_binary(&bytes[..])
    } else {
        SampleStream::read_csv(&bytes[..])
    }
}

fn load_codebook(path: &Path) -> Result<Codebook, Error> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(cortexvq::cortex::CODEBOOK_MAGIC) {
        Codebook::read_binary(&bytes[..])
    } else {
        Codebook::from_json(
            std::str::from_utf8(&bytes)
                .map_err(|_| Error::Format("codebook file is neither binary nor JSON".into()))?,
        )
    }
}

fn run_gen(args: GenArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.dataset.seed = seed;
    }
    let stream = cfg.dataset.generate(args.samples, cfg.dataset.seed)?;
    std::fs::create_dir_all(&args.out)?;
    let path = match args.stream_format {
        StreamFormat::Csv => {
            let path = args.out.join("stream.csv");
            stream.write_csv_path(&path)?;
            path
        }
        StreamFormat::Binary => {
            let path = args.out.join("stream.bin");
            stream.write_binary_path(&path)?;
            path
        }
    };
    println!("wrote {} samples to {}", stream.len(), path.display());
    Ok(())
}

fn run_train(args: TrainArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.dataset.seed = seed;
    }
    let algorithm: Algorithm = args.algorithm.parse()?;
    if !cfg.algorithms.names.contains(&algorithm) {
        return Err(Error::Config(format!(
            "algorithm `{algorithm}` is not in the config's list"
        )));
    }
    let &(n_vectors, target_k) = cfg
        .grid
        .points
        .first()
        .ok_or_else(|| Error::Config("grid has no points".into()))?;
    let min_samples = (n_vectors - 1) * cfg.framing.stride + cfg.framing.window;
    let stream = cfg.dataset.generate(min_samples, cfg.dataset.seed)?;
    let train = prepare(
        stream,
        cfg.framing.window,
        cfg.framing.stride,
        &cfg.transform,
        Some(n_vectors),
    )?;

    let codebook = match algorithm {
        Algorithm::Cortex => {
            let section = &cfg.algorithms.cortex;
            let r_init_levels = estimate_r_init_levels(&train.coeffs, 1000)?;
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
            let tree = train_cortex(&train.coeffs, params, section.epochs)?;
            tree.finalize(train.normalization)?
        }
        Algorithm::Kmeans => {
            let data = VectorSet::new(train.coeffs.clone())?;
            kmeans_restarts(&data, target_k, cfg.dataset.seed, cfg.algorithms.kmeans.restarts)?
                .codebook
                .to_codebook(train.normalization)?
        }
        Algorithm::Birch => {
            let data = VectorSet::new(train.coeffs.clone())?;
            let threshold = cfg
                .algorithms
                .birch
                .threshold
                .unwrap_or_else(|| default_birch_threshold(&data));
            birch(
                &data,
                &BirchParams {
                    threshold,
                    branching: cfg.algorithms.birch.branching,
                },
                target_k,
            )?
            .codebook
            .to_codebook(train.normalization)?
        }
        Algorithm::Gmm => {
            let data = VectorSet::new(train.coeffs.clone())?;
            let params = GmmParams {
                tol: cfg.algorithms.gmm.tol,
                max_iter: cfg.algorithms.gmm.max_iter,
            };
            gmm_em(&data, target_k, &params, cfg.dataset.seed)?
                .codebook
                .to_codebook(train.normalization)?
        }
    };

    std::fs::create_dir_all(&args.out)?;
    let path = match args.format {
        FileFormat::Json => {
            let path = args.out.join(format!("codebook_{algorithm}.json"));
            codebook.save_json(&path)?;
            path
        }
        FileFormat::Csv => {
            // Binary container; CSV applies to result tables, not codebooks.
            let path = args.out.join(format!("codebook_{algorithm}.cvqcbk"));
            codebook.save_binary(&path)?;
            path
        }
    };
    println!(
        "trained {} codebook: K={} depth={} -> {}",
        algorithm,
        codebook.len(),
        codebook.depth(),
        path.display()
    );
    Ok(())
}

fn run_encode(args: EncodeArgs) -> Result<(), Error> {
    let codebook = load_codebook(&args.codebook)?;
    let stream = load_stream(&args.input)?;
    let window = codebook.depth();
    let frames = cortexvq::signal::frame_stream(&stream, window, args.stride)?;
    let norm = *codebook.normalization();
    let mut indices = Vec::with_capacity(frames.len());
    for frame in &frames {
        let normalized = cortexvq::transform::normalize(frame, &norm);
        let coeffs = cortexvq::transform::dwpt_forward(&normalized)?;
        indices.push(codebook.encode(coeffs.coeffs())?);
    }
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_indices(std::io::BufWriter::new(std::fs::File::create(&args.out)?), &indices)?;
    println!("encoded {} frames to {}", indices.len(), args.out.display());
    Ok(())
}

fn run_decode(args: DecodeArgs) -> Result<(), Error> {
    let codebook = load_codebook(&args.codebook)?;
    let indices = read_indices(std::io::BufReader::new(std::fs::File::open(&args.input)?))?;
    let norm = *codebook.normalization();
    let mut samples = Vec::with_capacity(indices.len() * codebook.depth());
    for &index in &indices {
        let codeword = codebook.decode(index)?;
        let frame = dwpt_inverse(&CoefficientVector::from_coeffs(codeword.to_vec())?)?;
        samples.extend(denormalize(&frame, &norm).values);
    }
    let stream = SampleStream {
        samples,
        sample_rate_hz: 8000.0,
        source: cortexvq::signal::StreamSource::BasicWaves,
        seed: 0,
    };
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    match args.stream_format {
        StreamFormat::Csv => stream.write_csv_path(&args.out)?,
        StreamFormat::Binary => stream.write_binary_path(&args.out)?,
    }
    println!(
        "decoded {} indices into {} samples at {}",
        indices.len(),
        stream.len(),
        args.out.display()
    );
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<(), Error> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.dataset.seed = seed;
    }
    cfg.serial_timing = args.serial_timing;
    let result = run_experiment(&cfg)?;
    let format = match args.format {
        FileFormat::Csv => "csv",
        FileFormat::Json => "json",
    };
    let files = emit_reports(&result, &args.out, format)?;
    for cell in result.sorted_cells() {
        let status = cell.failed.as_deref().unwrap_or("ok");
        println!(
            "{} n={} K={} rep={} train_rmse={:.4} test_rmse={:.4} wall_s={:.4} [{}]",
            cell.algorithm,
            cell.n_vectors,
            cell.achieved_k,
            cell.repetition,
            cell.train_rmse,
            cell.test_rmse,
            cell.wall_s,
            status
        );
    }
    println!("wrote {} report files under {}", files.len(), args.out.display());
    Ok(())
}

fn run_entropy(args: EntropyArgs) -> Result<(), Error> {
    let mut cfg = EntropyConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.mixture.seed = seed;
    }
    let report = entropy_experiment(&cfg)?;
    println!(
        "K={} H_cortex={:.4} H_kmeans={:.4} H_uniform={:.4} H_max={:.1}",
        report.k_cortex, report.h_cortex, report.h_kmeans, report.h_uniform, report.h_max
    );
    let files = emit_entropy_report(&report, &args.out)?;
    println!("wrote {} report files under {}", files.len(), args.out.display());
    Ok(())
}
