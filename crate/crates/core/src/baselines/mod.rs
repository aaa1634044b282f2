//! Reference quantizers used for comparison: K-means, pairwise nearest
//! neighbor merging, Birch, and a diagonal-covariance Gaussian mixture.
//!
//! All four emit a [`CentroidCodebook`] so the shared metrics layer can
//! treat them interchangeably.

mod birch;
mod gmm;
mod kmeans;
mod pnn;

pub use birch::{birch, default_birch_threshold, BirchOutcome, BirchParams, CfEntry};
pub use gmm::{gmm_em, GmmModel, GmmParams};
pub use kmeans::{kmeans, kmeans_capped, kmeans_restarts, KMeansOutcome};
pub use pnn::{pnn, pnn_weighted};

use crate::error::{Error, Result};

/// A set of equal-dimension vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet {
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

impl VectorSet {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vectors
            .first()
            .map(|v| v.len())
            .ok_or_else(|| Error::Config("vector set is empty".into()))?;
        if dim == 0 {
            return Err(Error::Config("vectors must have dimension >= 1".into()));
        }
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::Shape("vectors have mixed dimensions".into()));
        }
        Ok(VectorSet { vectors, dim })
    }

    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Output codebook of the baseline quantizers.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidCodebook {
    centroids: Vec<Vec<f64>>,
    dim: usize,
}

impl CentroidCodebook {
    pub fn new(centroids: Vec<Vec<f64>>) -> Result<Self> {
        let dim = centroids
            .first()
            .map(|c| c.len())
            .ok_or_else(|| Error::Config("centroid list is empty".into()))?;
        if centroids.iter().any(|c| c.len() != dim) {
            return Err(Error::Shape("centroids have mixed dimensions".into()));
        }
        Ok(CentroidCodebook { centroids, dim })
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index of the nearest centroid by Euclidean distance.
    pub fn assign(&self, vector: &[f64]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.centroids.iter().enumerate() {
            let d = squared_distance(c, vector);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    pub fn quantize<'a>(&'a self, vector: &[f64]) -> &'a [f64] {
        &self.centroids[self.assign(vector)]
    }

    /// Converts into the shared `CVQCBK1` container.
    pub fn to_codebook(
        &self,
        normalization: crate::transform::NormalizationSpec,
    ) -> Result<crate::cortex::Codebook> {
        crate::cortex::Codebook::from_centroids(self.dim, normalization, self.centroids.clone())
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sum of squared distances from each vector to its nearest centroid.
pub fn sse(data: &VectorSet, centroids: &[Vec<f64>]) -> f64 {
    data.vectors()
        .iter()
        .map(|v| {
            centroids
                .iter()
                .map(|c| squared_distance(c, v))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_set_rejects_mixed_dims() {
        assert!(VectorSet::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(VectorSet::new(vec![]).is_err());
    }

    #[test]
    fn assignment_picks_nearest() {
        let cb = CentroidCodebook::new(vec![vec![0.0, 0.0], vec![4.0, 4.0]]).unwrap();
        assert_eq!(cb.assign(&[1.0, 0.5]), 0);
        assert_eq!(cb.assign(&[3.9, 5.0]), 1);
        assert_eq!(cb.quantize(&[3.9, 5.0]), &[4.0, 4.0]);
    }
}
