//! Synthetic dataset generators and stream framing.
//!
//! Three generators are provided: concatenated basic waves (sinus, square,
//! sawtooth), the x series of a Lorenz system, and concatenated Gaussian
//! components. All generators are deterministic under their seed.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Magic bytes prefixing the binary stream format.
pub const STREAM_MAGIC: &[u8; 8] = b"CVQSTRM1";

/// Origin of a generated stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamSource {
    BasicWaves,
    Lorenz,
    GaussianMixture,
}

impl fmt::Display for StreamSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            StreamSource::BasicWaves => "BasicWaves",
            StreamSource::Lorenz => "Lorenz",
            StreamSource::GaussianMixture => "GaussianMixture",
        };
        f.write_str(name)
    }
}

impl std::str::FromStr for StreamSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "BasicWaves" => Ok(StreamSource::BasicWaves),
            "Lorenz" => Ok(StreamSource::Lorenz),
            "GaussianMixture" => Ok(StreamSource::GaussianMixture),
            other => Err(Error::Format(format!("unknown stream source `{other}`"))),
        }
    }
}

/// A generated 1-D signal with provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStream {
    pub samples: Vec<f64>,
    pub sample_rate_hz: f64,
    pub source: StreamSource,
    pub seed: u64,
}

impl SampleStream {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
    }

    /// One amplitude per line, preceded by a `# source=…;seed=…;rate=…` header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# source={};seed={};rate={}",
            self.source, self.seed, self.sample_rate_hz
        )?;
        for x in &self.samples {
            writeln!(w, "{x}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty stream file".into()))??;
        let meta = header
            .strip_prefix("# ")
            .ok_or_else(|| Error::Format("missing `# ` stream header".into()))?;
        let mut source = None;
        let mut seed = None;
        let mut rate = None;
        for field in meta.split(';') {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("bad header field `{field}`")))?;
            match key {
                "source" => source = Some(value.parse::<StreamSource>()?),
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|e| {
                        Error::Format(format!("bad seed `{value}`: {e}"))
                    })?)
                }
                "rate" => {
                    rate = Some(value.parse::<f64>().map_err(|e| {
                        Error::Format(format!("bad rate `{value}`: {e}"))
                    })?)
                }
                other => return Err(Error::Format(format!("unknown header key `{other}`"))),
            }
        }
        let mut samples = Vec::new();
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            samples.push(
                line.parse::<f64>()
                    .map_err(|e| Error::Format(format!("bad sample `{line}`: {e}")))?,
            );
        }
        if samples.is_empty() {
            return Err(Error::Format("stream file holds no samples".into()));
        }
        Ok(SampleStream {
            samples,
            sample_rate_hz: rate.ok_or_else(|| Error::Format("header missing rate".into()))?,
            source: source.ok_or_else(|| Error::Format("header missing source".into()))?,
            seed: seed.ok_or_else(|| Error::Format("header missing seed".into()))?,
        })
    }

    /// Raw little-endian f64 binary with the `CVQSTRM1` magic.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(STREAM_MAGIC)?;
        w.write_all(&1u32.to_le_bytes())?;
        let tag: u8 = match self.source {
            StreamSource::BasicWaves => 0,
            StreamSource::Lorenz => 1,
            StreamSource::GaussianMixture => 2,
        };
        w.write_all(&[tag])?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.sample_rate_hz.to_le_bytes())?;
        w.write_all(&(self.samples.len() as u64).to_le_bytes())?;
        for x in &self.samples {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != STREAM_MAGIC {
            return Err(Error::Format("bad stream magic".into()));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        if u32::from_le_bytes(u32buf) != 1 {
            return Err(Error::Format("unsupported stream version".into()));
        }
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let source = match tag[0] {
            0 => StreamSource::BasicWaves,
            1 => StreamSource::Lorenz,
            2 => StreamSource::GaussianMixture,
            other => return Err(Error::Format(format!("bad source tag {other}"))),
        };
        let mut u64buf = [0u8; 8];
        r.read_exact(&mut u64buf)?;
        let seed = u64::from_le_bytes(u64buf);
        r.read_exact(&mut u64buf)?;
        let sample_rate_hz = f64::from_le_bytes(u64buf);
        r.read_exact(&mut u64buf)?;
        let n = u64::from_le_bytes(u64buf) as usize;
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut u64buf)?;
            samples.push(f64::from_le_bytes(u64buf));
        }
        if samples.is_empty() {
            return Err(Error::Format("stream file holds no samples".into()));
        }
        Ok(SampleStream {
            samples,
            sample_rate_hz,
            source,
            seed,
        })
    }

    pub fn write_csv_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }

    pub fn write_binary_path<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.write_binary(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn read_binary_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_binary(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Wave shapes available to the basic-waves generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Sinus,
    Square,
    Sawtooth,
}

impl WaveKind {
    /// Amplitude-1 waveform value at normalized phase t in [0, 1).
    fn eval(self, t: f64) -> f64 {
        match self {
            WaveKind::Sinus => (2.0 * std::f64::consts::PI * t).sin(),
            WaveKind::Square => {
                if t < 0.5 {
                    1.0
                } else {
                    -1.0
                }
            }
            // Linear ramp from -1 to +1 over one period.
            WaveKind::Sawtooth => -1.0 + 2.0 * t,
        }
    }
}

/// Configuration for the concatenated basic-waves dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BasicWavesConfig {
    pub wave_kinds: Vec<WaveKind>,
    pub periods_in_samples: Vec<usize>,
    pub amplitudes: Vec<f64>,
    /// Number of single-period segments to concatenate.
    pub count: usize,
    pub seed: u64,
    pub sample_rate_hz: f64,
}

impl Default for BasicWavesConfig {
    fn default() -> Self {
        // Ten amplitudes evenly spanning 1,000..20,000 and four periods give,
        // with the three wave kinds, a cross product of 120 signal types.
        let amplitudes = (0..10)
            .map(|i| 1000.0 + i as f64 * (20000.0 - 1000.0) / 9.0)
            .collect();
        BasicWavesConfig {
            wave_kinds: vec![WaveKind::Sinus, WaveKind::Square, WaveKind::Sawtooth],
            periods_in_samples: vec![6, 8, 10, 12],
            amplitudes,
            count: 2000,
            seed: 0,
            sample_rate_hz: 8000.0,
        }
    }
}

impl BasicWavesConfig {
    fn validate(&self) -> Result<()> {
        if self.wave_kinds.is_empty() {
            return Err(Error::Config("wave_kinds is empty".into()));
        }
        if self.periods_in_samples.is_empty() {
            return Err(Error::Config("periods_in_samples is empty".into()));
        }
        if self.periods_in_samples.iter().any(|&p| p < 2) {
            return Err(Error::Config("periods must be >= 2 samples".into()));
        }
        if self.amplitudes.is_empty() {
            return Err(Error::Config("amplitudes is empty".into()));
        }
        if self.amplitudes.iter().any(|&a| a <= 0.0) {
            return Err(Error::Config("amplitudes must be positive".into()));
        }
        if self.count == 0 {
            return Err(Error::Config("segment count must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of distinct (kind, period, amplitude) signal types.
    pub fn signal_type_count(&self) -> usize {
        self.wave_kinds.len() * self.periods_in_samples.len() * self.amplitudes.len()
    }
}

/// One segment draw used by [`gen_basic_waves`]; exposed for uniformity tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentDraw {
    pub kind: WaveKind,
    pub period: usize,
    pub amplitude: f64,
    /// Phase offset in samples, uniform in [0, period).
    pub phase: f64,
}

fn draw_segment<R: Rng>(cfg: &BasicWavesConfig, rng: &mut R) -> SegmentDraw {
    let kind = cfg.wave_kinds[rng.gen_range(0..cfg.wave_kinds.len())];
    let period = cfg.periods_in_samples[rng.gen_range(0..cfg.periods_in_samples.len())];
    let amplitude = cfg.amplitudes[rng.gen_range(0..cfg.amplitudes.len())];
    let phase = rng.gen_range(0.0..period as f64);
    SegmentDraw {
        kind,
        period,
        amplitude,
        phase,
    }
}

/// Samples of one full period of the drawn wave.
pub fn render_segment(draw: &SegmentDraw) -> Vec<f64> {
    (0..draw.period)
        .map(|k| {
            let t = (k as f64 + draw.phase).rem_euclid(draw.period as f64) / draw.period as f64;
            draw.amplitude * draw.kind.eval(t)
        })
        .collect()
}

/// Concatenates `cfg.count` randomly drawn single-period segments.
pub fn gen_basic_waves(cfg: &BasicWavesConfig) -> Result<SampleStream> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut samples = Vec::new();
    for _ in 0..cfg.count {
        let draw = draw_segment(cfg, &mut rng);
        samples.extend(render_segment(&draw));
    }
    Ok(SampleStream {
        samples,
        sample_rate_hz: cfg.sample_rate_hz,
        source: StreamSource::BasicWaves,
        seed: cfg.seed,
    })
}

/// Draw `n` segment descriptors without rendering; used by uniformity tests.
pub fn draw_segments(cfg: &BasicWavesConfig, n: usize) -> Result<Vec<SegmentDraw>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    Ok((0..n).map(|_| draw_segment(cfg, &mut rng)).collect())
}

/// Integration scheme for the Lorenz generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    #[default]
    Euler,
    Rk4,
}

/// Configuration for the Lorenz x-series dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LorenzConfig {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    pub step: f64,
    pub n_steps: usize,
    pub initial_xyz: [f64; 3],
    pub amplitude_scale: f64,
    #[serde(default)]
    pub integrator: Integrator,
    pub sample_rate_hz: f64,
}

impl Default for LorenzConfig {
    fn default() -> Self {
        LorenzConfig {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            step: 0.01,
            n_steps: 20_000,
            initial_xyz: [1.0, 1.0, 1.0],
            amplitude_scale: 1e3,
            integrator: Integrator::Euler,
            sample_rate_hz: 8000.0,
        }
    }
}

impl LorenzConfig {
    fn validate(&self) -> Result<()> {
        if self.step <= 0.0 {
            return Err(Error::Config("step must be positive".into()));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be >= 1".into()));
        }
        Ok(())
    }

    fn derivatives(&self, [x, y, z]: [f64; 3]) -> [f64; 3] {
        [
            self.sigma * (y - x),
            x * (self.rho - z) - y,
            x * y - self.beta * z,
        ]
    }
}

/// One integration step of the Lorenz system.
pub fn lorenz_step(cfg: &LorenzConfig, state: [f64; 3]) -> [f64; 3] {
    let h = cfg.step;
    match cfg.integrator {
        Integrator::Euler => {
            let d = cfg.derivatives(state);
            [
                state[0] + h * d[0],
                state[1] + h * d[1],
                state[2] + h * d[2],
            ]
        }
        Integrator::Rk4 => {
            let add = |s: [f64; 3], k: [f64; 3], f: f64| {
                [s[0] + f * k[0], s[1] + f * k[1], s[2] + f * k[2]]
            };
            let k1 = cfg.derivatives(state);
            let k2 = cfg.derivatives(add(state, k1, h / 2.0));
            let k3 = cfg.derivatives(add(state, k2, h / 2.0));
            let k4 = cfg.derivatives(add(state, k3, h));
            let mut next = state;
            for i in 0..3 {
                next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            next
        }
    }
}

/// Integrates the Lorenz system and returns the scaled x series.
pub fn gen_lorenz(cfg: &LorenzConfig) -> Result<SampleStream> {
    cfg.validate()?;
    let mut state = cfg.initial_xyz;
    let mut samples = Vec::with_capacity(cfg.n_steps);
    for _ in 0..cfg.n_steps {
        state = lorenz_step(cfg, state);
        samples.push(state[0] * cfg.amplitude_scale);
    }
    Ok(SampleStream {
        samples,
        sample_rate_hz: cfg.sample_rate_hz,
        source: StreamSource::Lorenz,
        seed: 0,
    })
}

/// One Gaussian component: mean, standard deviation, sample count.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub mean: f64,
    pub std: f64,
    pub n_samples: usize,
}

/// Configuration for the concatenated Gaussian dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GaussianMixtureConfig {
    pub components: Vec<GaussianComponent>,
    pub seed: u64,
    pub sample_rate_hz: f64,
}

impl Default for GaussianMixtureConfig {
    fn default() -> Self {
        GaussianMixtureConfig {
            components: vec![
                GaussianComponent {
                    mean: 0.0,
                    std: 5.0,
                    n_samples: 100_000,
                },
                GaussianComponent {
                    mean: -10.0,
                    std: 3.0,
                    n_samples: 100_000,
                },
                GaussianComponent {
                    mean: 10.0,
                    std: 2.0,
                    n_samples: 100_000,
                },
            ],
            seed: 0,
            sample_rate_hz: 8000.0,
        }
    }
}

impl GaussianMixtureConfig {
    fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Config("components is empty".into()));
        }
        for c in &self.components {
            if c.std <= 0.0 {
                return Err(Error::Config(format!("std must be positive, got {}", c.std)));
            }
            if c.n_samples == 0 {
                return Err(Error::Config("n_samples must be >= 1".into()));
            }
        }
        Ok(())
    }
}

/// Concatenates per-component Gaussian draws (components are not interleaved).
pub fn gen_gaussian_mixture(cfg: &GaussianMixtureConfig) -> Result<SampleStream> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total: usize = cfg.components.iter().map(|c| c.n_samples).sum();
    let mut samples = Vec::with_capacity(total);
    for c in &cfg.components {
        let normal = Normal::new(c.mean, c.std)
            .map_err(|e| Error::Config(format!("bad component: {e}")))?;
        samples.extend((0..c.n_samples).map(|_| normal.sample(&mut rng)));
    }
    Ok(SampleStream {
        samples,
        sample_rate_hz: cfg.sample_rate_hz,
        source: StreamSource::GaussianMixture,
        seed: cfg.seed,
    })
}

/// A fixed-length window cut from a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub values: Vec<f64>,
    pub origin_offset: usize,
}

impl Frame {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn is_power_of_two(n: usize) -> bool {
    n >= 2 && n.is_power_of_two()
}

/// Cuts frames at offsets 0, stride, 2*stride, ...; a trailing partial window
/// is dropped.
pub fn frame_stream(stream: &SampleStream, window: usize, stride: usize) -> Result<Vec<Frame>> {
    if !is_power_of_two(window) {
        return Err(Error::Config(format!(
            "window must be a power of two >= 2, got {window}"
        )));
    }
    if stride == 0 || stride > window {
        return Err(Error::Config(format!(
            "stride must satisfy 1 <= stride <= window, got {stride}"
        )));
    }
    let n = stream.samples.len();
    if n < window {
        return Ok(Vec::new());
    }
    Ok((0..=n - window)
        .step_by(stride)
        .map(|offset| Frame {
            values: stream.samples[offset..offset + window].to_vec(),
            origin_offset: offset,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_segment_is_half_positive_half_negative() {
        let draw = SegmentDraw {
            kind: WaveKind::Square,
            period: 8,
            amplitude: 1000.0,
            phase: 0.0,
        };
        let seg = render_segment(&draw);
        assert_eq!(seg, vec![1000.0, 1000.0, 1000.0, 1000.0, -1000.0, -1000.0, -1000.0, -1000.0]);
    }

    #[test]
    fn sinus_segment_matches_sampled_sinusoid() {
        let amplitude = 123.5;
        let draw = SegmentDraw {
            kind: WaveKind::Sinus,
            period: 8,
            amplitude,
            phase: 0.0,
        };
        let seg = render_segment(&draw);
        for (k, &v) in seg.iter().enumerate() {
            let expect = amplitude * (2.0 * std::f64::consts::PI * k as f64 / 8.0).sin();
            assert!((v - expect).abs() < 1e-12, "k={k}: {v} vs {expect}");
        }
    }

    #[test]
    fn sawtooth_ramps_from_minus_a() {
        let draw = SegmentDraw {
            kind: WaveKind::Sawtooth,
            period: 4,
            amplitude: 2.0,
            phase: 0.0,
        };
        assert_eq!(render_segment(&draw), vec![-2.0, -1.0, 0.0, 1.0]);
    }

    #[test]
    fn default_config_has_120_signal_types() {
        let cfg = BasicWavesConfig::default();
        assert_eq!(cfg.signal_type_count(), 120);
        assert_eq!(cfg.amplitudes[0], 1000.0);
        assert_eq!(cfg.amplitudes[9], 20000.0);
    }

    #[test]
    fn empty_amplitudes_rejected() {
        let cfg = BasicWavesConfig {
            amplitudes: vec![],
            ..BasicWavesConfig::default()
        };
        assert!(matches!(gen_basic_waves(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn waves_deterministic_and_bounded() {
        let cfg = BasicWavesConfig {
            count: 200,
            seed: 11,
            ..BasicWavesConfig::default()
        };
        let a = gen_basic_waves(&cfg).unwrap();
        let b = gen_basic_waves(&cfg).unwrap();
        assert_eq!(a, b);
        let max_amp = cfg.amplitudes.iter().cloned().fold(0.0, f64::max);
        assert!(a.max_abs() <= max_amp + 1e-9);
    }

    #[test]
    fn lorenz_single_euler_step() {
        let cfg = LorenzConfig {
            amplitude_scale: 1.0,
            n_steps: 1,
            ..LorenzConfig::default()
        };
        // dx = 0, dy = 26, dz = 1 - 8/3 from (1, 1, 1).
        let next = lorenz_step(&cfg, [1.0, 1.0, 1.0]);
        assert_eq!(next[0], 1.0);
        assert!((next[1] - 1.26).abs() < 1e-15);
        assert!((next[2] - 59.0 / 60.0).abs() < 1e-15);
        let stream = gen_lorenz(&cfg).unwrap();
        assert_eq!(stream.samples, vec![1.0]);
    }

    #[test]
    fn lorenz_zero_step_rejected() {
        let cfg = LorenzConfig {
            step: 0.0,
            ..LorenzConfig::default()
        };
        assert!(matches!(gen_lorenz(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn lorenz_deterministic_and_bounded() {
        let cfg = LorenzConfig {
            n_steps: 100_000,
            amplitude_scale: 1.0,
            ..LorenzConfig::default()
        };
        let a = gen_lorenz(&cfg).unwrap();
        let b = gen_lorenz(&cfg).unwrap();
        assert_eq!(a, b);
        // Attractor bound |x| <= 25 with margin 30 at default parameters.
        assert!(a.max_abs() <= 30.0);
    }

    #[test]
    fn mixture_totals_and_component_means() {
        let cfg = GaussianMixtureConfig {
            seed: 3,
            ..GaussianMixtureConfig::default()
        };
        let stream = gen_gaussian_mixture(&cfg).unwrap();
        assert_eq!(stream.len(), 300_000);
        // CLT bound on the second component: mean within 3 * 3/sqrt(1e5).
        let comp2 = &stream.samples[100_000..200_000];
        let mean: f64 = comp2.iter().sum::<f64>() / comp2.len() as f64;
        assert!((mean - (-10.0)).abs() < 3.0 * 3.0 / (1e5_f64).sqrt());
    }

    #[test]
    fn single_standard_component_has_unit_std() {
        let cfg = GaussianMixtureConfig {
            components: vec![GaussianComponent {
                mean: 0.0,
                std: 1.0,
                n_samples: 100_000,
            }],
            seed: 9,
            sample_rate_hz: 8000.0,
        };
        let stream = gen_gaussian_mixture(&cfg).unwrap();
        let n = stream.len() as f64;
        let mean: f64 = stream.samples.iter().sum::<f64>() / n;
        let var: f64 = stream.samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        assert!((var.sqrt() - 1.0).abs() < 0.02);
    }

    #[test]
    fn non_positive_std_rejected() {
        let cfg = GaussianMixtureConfig {
            components: vec![GaussianComponent {
                mean: 0.0,
                std: 0.0,
                n_samples: 10,
            }],
            seed: 0,
            sample_rate_hz: 8000.0,
        };
        assert!(matches!(gen_gaussian_mixture(&cfg), Err(Error::Config(_))));
    }

    fn toy_stream(n: usize) -> SampleStream {
        SampleStream {
            samples: (0..n).map(|i| i as f64).collect(),
            sample_rate_hz: 8000.0,
            source: StreamSource::BasicWaves,
            seed: 0,
        }
    }

    #[test]
    fn frame_counts() {
        // 16 samples, window 8, stride 1 -> 9 frames at offsets 0..=8.
        let frames = frame_stream(&toy_stream(16), 8, 1).unwrap();
        assert_eq!(frames.len(), 9);
        assert_eq!(frames[8].origin_offset, 8);
        assert_eq!(frame_stream(&toy_stream(8), 8, 1).unwrap().len(), 1);
        assert_eq!(frame_stream(&toy_stream(7), 8, 1).unwrap().len(), 0);
    }

    #[test]
    fn frame_count_formula() {
        for (len, window, stride) in [(100, 8, 3), (64, 16, 16), (31, 4, 1), (9, 8, 2)] {
            let frames = frame_stream(&toy_stream(len), window, stride).unwrap();
            assert_eq!(frames.len(), (len - window) / stride + 1);
        }
    }

    #[test]
    fn non_power_of_two_window_rejected() {
        assert!(matches!(
            frame_stream(&toy_stream(20), 6, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn csv_round_trip_bit_exact() {
        let cfg = GaussianMixtureConfig {
            components: vec![GaussianComponent {
                mean: 0.0,
                std: 1.0,
                n_samples: 500,
            }],
            seed: 17,
            sample_rate_hz: 8000.0,
        };
        let stream = gen_gaussian_mixture(&cfg).unwrap();
        let mut buf = Vec::new();
        stream.write_csv(&mut buf).unwrap();
        let back = SampleStream::read_csv(&buf[..]).unwrap();
        assert_eq!(stream, back);

        let mut buf2 = Vec::new();
        back.write_csv(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn binary_round_trip_bit_exact() {
        let stream = gen_lorenz(&LorenzConfig {
            n_steps: 300,
            ..LorenzConfig::default()
        })
        .unwrap();
        let mut buf = Vec::new();
        stream.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], STREAM_MAGIC);
        let back = SampleStream::read_binary(&buf[..]).unwrap();
        assert_eq!(stream, back);
    }
}
