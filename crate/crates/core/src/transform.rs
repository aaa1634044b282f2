//! Frame normalization and the full-depth discrete wavelet packet transform
//! with the orthonormal Haar kernel.
//!
//! The packet decomposition splits both the approximation and the detail
//! branch at every level, down to single-coefficient packets. Coefficients
//! are laid out in natural (Paley) packet order, so `coeffs[0]` is the
//! full-depth approximation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{is_power_of_two, Frame, SampleStream};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// How frames are scaled before the transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationMode {
    FixedScale,
    PerStreamMaxAbs,
}

/// Scaling applied to frames ahead of the transform; `denormalize` inverts it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSpec {
    pub scale: f64,
    pub mode: NormalizationMode,
}

impl NormalizationSpec {
    pub fn fixed(scale: f64) -> Result<Self> {
        if scale <= 0.0 || !scale.is_finite() {
            return Err(Error::Config(format!("scale must be positive, got {scale}")));
        }
        Ok(NormalizationSpec {
            scale,
            mode: NormalizationMode::FixedScale,
        })
    }

    /// Records the stream's max absolute amplitude as the scale.
    pub fn per_stream_max_abs(stream: &SampleStream) -> Result<Self> {
        let scale = stream.max_abs();
        if scale == 0.0 {
            return Err(Error::DegenerateInput(
                "all-zero stream cannot define a max-abs scale".into(),
            ));
        }
        Ok(NormalizationSpec {
            scale,
            mode: NormalizationMode::PerStreamMaxAbs,
        })
    }

    pub fn identity() -> Self {
        NormalizationSpec {
            scale: 1.0,
            mode: NormalizationMode::FixedScale,
        }
    }
}

pub fn normalize(frame: &Frame, spec: &NormalizationSpec) -> Frame {
    Frame {
        values: frame.values.iter().map(|v| v / spec.scale).collect(),
        origin_offset: frame.origin_offset,
    }
}

pub fn denormalize(frame: &Frame, spec: &NormalizationSpec) -> Frame {
    Frame {
        values: frame.values.iter().map(|v| v * spec.scale).collect(),
        origin_offset: frame.origin_offset,
    }
}

/// DWPT coefficients of one frame in natural packet order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    coeffs: Vec<f64>,
}

impl CoefficientVector {
    /// Wraps raw coefficients; the length must be a power of two >= 2 to be
    /// invertible by [`dwpt_inverse`].
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if !is_power_of_two(coeffs.len()) {
            return Err(Error::Shape(format!(
                "coefficient count must be a power of two >= 2, got {}",
                coeffs.len()
            )));
        }
        Ok(CoefficientVector { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of decomposition levels, log2 of the coefficient count.
    pub fn levels(&self) -> u32 {
        self.coeffs.len().trailing_zeros()
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

impl AsRef<[f64]> for CoefficientVector {
    fn as_ref(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Full-depth Haar packet decomposition of a power-of-two frame.
pub fn dwpt_forward(frame: &Frame) -> Result<CoefficientVector> {
    let n = frame.values.len();
    if !is_power_of_two(n) {
        return Err(Error::Shape(format!(
            "frame length must be a power of two >= 2, got {n}"
        )));
    }
    let mut buf = frame.values.clone();
    let mut scratch = vec![0.0; n];
    let mut block = n;
    while block > 1 {
        let half = block / 2;
        for start in (0..n).step_by(block) {
            for k in 0..half {
                let a = buf[start + 2 * k];
                let b = buf[start + 2 * k + 1];
                scratch[start + k] = (a + b) * FRAC_1_SQRT_2;
                scratch[start + half + k] = (a - b) * FRAC_1_SQRT_2;
            }
        }
        buf[..].copy_from_slice(&scratch);
        block = half;
    }
    Ok(CoefficientVector { coeffs: buf })
}

/// Exact inverse of [`dwpt_forward`] up to floating rounding.
pub fn dwpt_inverse(coeffs: &CoefficientVector) -> Result<Frame> {
    let n = coeffs.coeffs.len();
    if !is_power_of_two(n) {
        return Err(Error::Shape(format!(
            "coefficient count must be a power of two >= 2, got {n}"
        )));
    }
    let mut buf = coeffs.coeffs.clone();
    let mut scratch = vec![0.0; n];
    let mut block = 2;
    while block <= n {
        let half = block / 2;
        for start in (0..n).step_by(block) {
            for k in 0..half {
                let a = buf[start + k];
                let d = buf[start + half + k];
                scratch[start + 2 * k] = (a + d) * FRAC_1_SQRT_2;
                scratch[start + 2 * k + 1] = (a - d) * FRAC_1_SQRT_2;
            }
        }
        buf[..].copy_from_slice(&scratch);
        block *= 2;
    }
    Ok(Frame {
        values: buf,
        origin_offset: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn frame(values: Vec<f64>) -> Frame {
        Frame {
            values,
            origin_offset: 0,
        }
    }

    #[test]
    fn normalize_divides_by_scale() {
        let spec = NormalizationSpec::fixed(2.0).unwrap();
        let out = normalize(&frame(vec![2.0, -4.0]), &spec);
        assert_eq!(out.values, vec![1.0, -2.0]);
        let back = denormalize(&out, &spec);
        assert_eq!(back.values, vec![2.0, -4.0]);
    }

    #[test]
    fn zero_stream_max_abs_rejected() {
        let stream = SampleStream {
            samples: vec![0.0; 16],
            sample_rate_hz: 8000.0,
            source: crate::signal::StreamSource::BasicWaves,
            seed: 0,
        };
        assert!(matches!(
            NormalizationSpec::per_stream_max_abs(&stream),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn constant_frame_has_only_dc() {
        let coeffs = dwpt_forward(&frame(vec![1.0; 8])).unwrap();
        let expect = 2.0 * 2.0_f64.sqrt();
        assert!((coeffs.coeffs()[0] - expect).abs() < 1e-12);
        for &c in &coeffs.coeffs()[1..] {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn nyquist_alternation_hits_top_frequency_packet() {
        let coeffs = dwpt_forward(&frame(vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0])).unwrap();
        let nonzero: Vec<usize> = coeffs
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > 1e-12)
            .map(|(i, _)| i)
            .collect();
        // Natural index 4 (path detail->approx->approx) is the highest
        // frequency packet at depth 3 under the Gray-code frequency map.
        assert_eq!(nonzero, vec![4]);
        assert!((coeffs.coeffs()[4].abs() - 2.0 * 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dc_only_coeffs_invert_to_constant_frame() {
        let mut c = vec![0.0; 8];
        c[0] = 2.0 * 2.0_f64.sqrt();
        let coeffs = CoefficientVector::from_coeffs(c).unwrap();
        let out = dwpt_inverse(&coeffs).unwrap();
        for &v in &out.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn all_zero_coeffs_invert_to_zero_frame() {
        let coeffs = CoefficientVector::from_coeffs(vec![0.0; 16]).unwrap();
        let out = dwpt_inverse(&coeffs).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn non_power_of_two_rejected() {
        assert!(matches!(
            dwpt_forward(&frame(vec![1.0, 2.0, 3.0])),
            Err(Error::Shape(_))
        ));
        assert!(CoefficientVector::from_coeffs(vec![1.0; 6]).is_err());
    }

    #[test]
    fn round_trip_many_random_frames() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [8usize, 16] {
            for _ in 0..1000 {
                let f = frame((0..n).map(|_| rng.gen_range(-1e4..1e4)).collect());
                let coeffs = dwpt_forward(&f).unwrap();
                let back = dwpt_inverse(&coeffs).unwrap();
                for (a, b) in f.values.iter().zip(&back.values) {
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn energy_is_conserved(values in proptest::collection::vec(-1e4f64..1e4, 8)) {
            let f = frame(values);
            let coeffs = dwpt_forward(&f).unwrap();
            let in_energy: f64 = f.values.iter().map(|v| v * v).sum();
            let out_energy = coeffs.energy();
            prop_assert!((in_energy - out_energy).abs() <= 1e-9 * in_energy.max(1.0));
        }

        #[test]
        fn transform_is_linear(
            xs in proptest::collection::vec(-1e3f64..1e3, 8),
            ys in proptest::collection::vec(-1e3f64..1e3, 8),
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
        ) {
            let combined: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| a * x + b * y).collect();
            let lhs = dwpt_forward(&frame(combined)).unwrap();
            let fx = dwpt_forward(&frame(xs)).unwrap();
            let fy = dwpt_forward(&frame(ys)).unwrap();
            for i in 0..8 {
                let rhs = a * fx.coeffs()[i] + b * fy.coeffs()[i];
                prop_assert!((lhs.coeffs()[i] - rhs).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn level_slices_match_direct_filter_application() {
        // The first level of the recursion must equal one direct application
        // of the h/g filter pair to the frame.
        let values = vec![3.0, 1.0, -2.0, 5.0, 0.5, -0.5, 4.0, 2.0];
        let f = frame(values.clone());

        let mut one_level_approx = Vec::new();
        let mut one_level_detail = Vec::new();
        for pair in values.chunks(2) {
            one_level_approx.push((pair[0] + pair[1]) * FRAC_1_SQRT_2);
            one_level_detail.push((pair[0] - pair[1]) * FRAC_1_SQRT_2);
        }
        // Reapply the full transform to each half to obtain depth-3 packets.
        let top = dwpt_forward(&f).unwrap();
        let approx_packets = dwpt_forward(&frame(one_level_approx)).unwrap();
        let detail_packets = dwpt_forward(&frame(one_level_detail)).unwrap();
        for i in 0..4 {
            assert!((top.coeffs()[i] - approx_packets.coeffs()[i]).abs() < 1e-12);
            assert!((top.coeffs()[4 + i] - detail_packets.coeffs()[i]).abs() < 1e-12);
        }
    }
}
