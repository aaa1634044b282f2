//! Streaming vector quantization built around an online cortex-tree codebook
//! generator, with a Haar wavelet packet front end, four reference
//! clustering quantizers, and a benchmark harness for distortion, timing,
//! and entropy comparisons.
//!
//! The main pipeline is: generate or ingest a 1-D stream, cut it into
//! power-of-two frames, normalize, transform with the full-depth wavelet
//! packet decomposition, and feed the coefficient vectors level by level to
//! the cortex tree. Finalizing the tree yields an indexed [`cortex::Codebook`]
//! whose root-to-leaf paths are the codewords.

pub mod baselines;
pub mod bench;
pub mod cortex;
pub mod error;
pub mod metrics;
pub mod signal;
pub mod transform;

pub use error::{Error, Result};
