//! Finalized codebooks: encode/decode, per-level visit statistics, and the
//! versioned `CVQCBK1` file container (JSON and binary forms).
//!
//! A codebook is canonically the ordered list of codewords; the traversal
//! tree used by `encode` is the prefix trie of that list, so a reloaded file
//! reproduces encode/decode bit for bit.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cortex::CortexParams;
use crate::error::{Error, Result};
use crate::transform::NormalizationSpec;

pub const CODEBOOK_MAGIC: &[u8; 7] = b"CVQCBK1";

/// What the codewords represent: one scalar per tree level, or flat
/// centroids with depth meaning the vector dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookKind {
    Cortex,
    Centroid,
}

#[derive(Debug, Clone, PartialEq)]
struct TrieNode {
    value: f64,
    /// Ordinal of this node among all nodes of its level, traversal order.
    ordinal: u32,
    children: Vec<TrieNode>,
    /// Codeword index for full-depth leaves.
    index: Option<u32>,
}

/// Finalized, index-assigned quantizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    depth: usize,
    kind: CodebookKind,
    params: Option<CortexParams>,
    normalization: NormalizationSpec,
    codewords: Vec<Vec<f64>>,
    trie: Vec<TrieNode>,
    level_counts: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct CodebookFile {
    magic: String,
    version: u32,
    kind: CodebookKind,
    depth: usize,
    k: usize,
    params: Option<CortexParams>,
    normalization: NormalizationSpec,
    codewords: Vec<Vec<f64>>,
}

impl Codebook {
    /// Builds a codebook from sorted codewords. The traversal trie is derived
    /// from the codeword list itself.
    pub fn from_codewords(
        depth: usize,
        params: Option<CortexParams>,
        normalization: NormalizationSpec,
        codewords: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::UndertrainedTree("codebook holds no codewords".into()));
        }
        if depth == 0 {
            return Err(Error::Config("codebook depth must be >= 1".into()));
        }
        for cw in &codewords {
            if cw.len() != depth {
                return Err(Error::Shape(format!(
                    "codeword length {} does not match depth {depth}",
                    cw.len()
                )));
            }
        }
        if codewords.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format(
                "codewords must be in strictly increasing lexicographic order".into(),
            ));
        }
        let mut level_counts = vec![0u32; depth];
        let mut next_index = 0u32;
        let trie = build_trie(&codewords, 0, depth, &mut level_counts, &mut next_index);
        Ok(Codebook {
            depth,
            kind: CodebookKind::Cortex,
            params,
            normalization,
            codewords,
            trie,
            level_counts,
        })
    }

    /// Flat centroid codebook stored in the same container for uniform
    /// tooling; `depth` is the centroid dimension and traversal is one level.
    pub fn from_centroids(
        dim: usize,
        normalization: NormalizationSpec,
        mut centroids: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if centroids.is_empty() {
            return Err(Error::Config("centroid list is empty".into()));
        }
        if centroids.iter().any(|c| c.len() != dim) {
            return Err(Error::Shape("centroid dimension mismatch".into()));
        }
        centroids.sort_by(|a, b| a.partial_cmp(b).expect("finite centroids"));
        Ok(Codebook {
            depth: dim,
            kind: CodebookKind::Centroid,
            params: None,
            normalization,
            codewords: centroids,
            trie: Vec::new(),
            level_counts: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn kind(&self) -> CodebookKind {
        self.kind
    }

    pub fn params(&self) -> Option<&CortexParams> {
        self.params.as_ref()
    }

    pub fn normalization(&self) -> &NormalizationSpec {
        &self.normalization
    }

    pub fn codewords(&self) -> &[Vec<f64>] {
        &self.codewords
    }

    /// Cortex node count per level of the traversal trie.
    pub fn level_node_counts(&self) -> &[u32] {
        &self.level_counts
    }

    /// Winner-take-all descent: at every level the child nearest in value
    /// wins, with covering ranges ignored at inference time.
    pub fn encode(&self, coeffs: &[f64]) -> Result<u32> {
        Ok(*self.encode_path(coeffs)?.last().expect("depth >= 1"))
    }

    /// Ordinals of the chosen node at each level; the last entry of a cortex
    /// path is also the codeword index of the reached leaf.
    pub fn encode_path(&self, coeffs: &[f64]) -> Result<Vec<u32>> {
        if coeffs.len() != self.depth {
            return Err(Error::Shape(format!(
                "input length {} does not match codebook depth {}",
                coeffs.len(),
                self.depth
            )));
        }
        match self.kind {
            CodebookKind::Centroid => {
                let mut best = 0usize;
                let mut best_d = f64::INFINITY;
                for (i, c) in self.codewords.iter().enumerate() {
                    let d: f64 = c
                        .iter()
                        .zip(coeffs)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                Ok(vec![best as u32])
            }
            CodebookKind::Cortex => {
                let mut path = Vec::with_capacity(self.depth);
                let mut nodes = &self.trie;
                let mut leaf_index = None;
                for &coeff in coeffs {
                    let i = nearest_node(nodes, coeff);
                    path.push(nodes[i].ordinal);
                    leaf_index = nodes[i].index;
                    nodes = &nodes[i].children;
                }
                let leaf = leaf_index.expect("full-depth descent reaches a leaf");
                *path.last_mut().expect("depth >= 1") = leaf;
                Ok(path)
            }
        }
    }

    pub fn decode(&self, index: u32) -> Result<&[f64]> {
        self.codewords
            .get(index as usize)
            .map(|v| v.as_slice())
            .ok_or_else(|| {
                Error::Lookup(format!(
                    "index {index} out of bounds for {} codewords",
                    self.codewords.len()
                ))
            })
    }

    /// Sum over levels of the squared error between the input coefficients
    /// and the indexed codeword.
    pub fn dissipated_energy(&self, coeffs: &[f64], index: u32) -> Result<f64> {
        if coeffs.len() != self.depth {
            return Err(Error::Shape(format!(
                "input length {} does not match codebook depth {}",
                coeffs.len(),
                self.depth
            )));
        }
        let codeword = self.decode(index)?;
        Ok(coeffs
            .iter()
            .zip(codeword)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }

    /// Per-level visit counts accumulated by encoding every vector.
    pub fn level_visit_counts<'a, I>(&self, data: I) -> Result<Vec<Vec<u64>>>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut counts: Vec<Vec<u64>> = match self.kind {
            CodebookKind::Cortex => self
                .level_counts
                .iter()
                .map(|&c| vec![0u64; c as usize])
                .collect(),
            CodebookKind::Centroid => vec![vec![0u64; self.codewords.len()]],
        };
        for coeffs in data {
            let path = self.encode_path(coeffs)?;
            for (level, &ordinal) in path.iter().enumerate() {
                counts[level][ordinal as usize] += 1;
            }
        }
        Ok(counts)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = CodebookFile {
            magic: String::from_utf8_lossy(CODEBOOK_MAGIC).into_owned(),
            version: 1,
            kind: self.kind,
            depth: self.depth,
            k: self.codewords.len(),
            params: self.params.clone(),
            normalization: self.normalization,
            codewords: self.codewords.clone(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodebookFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if file.magic.as_bytes() != CODEBOOK_MAGIC {
            return Err(Error::Format(format!("bad codebook magic `{}`", file.magic)));
        }
        if file.version != 1 {
            return Err(Error::Format(format!(
                "unsupported codebook version {}",
                file.version
            )));
        }
        if file.k != file.codewords.len() {
            return Err(Error::Format(format!(
                "header k={} does not match {} codewords",
                file.k,
                file.codewords.len()
            )));
        }
        match file.kind {
            CodebookKind::Cortex => {
                Self::from_codewords(file.depth, file.params, file.normalization, file.codewords)
            }
            CodebookKind::Centroid => {
                Self::from_centroids(file.depth, file.normalization, file.codewords)
            }
        }
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CODEBOOK_MAGIC)?;
        w.write_all(&[1u8])?;
        w.write_all(&[match self.kind {
            CodebookKind::Cortex => 0u8,
            CodebookKind::Centroid => 1u8,
        }])?;
        w.write_all(&(self.depth as u32).to_le_bytes())?;
        w.write_all(&(self.codewords.len() as u32).to_le_bytes())?;
        let mode: u8 = match self.normalization.mode {
            crate::transform::NormalizationMode::FixedScale => 0,
            crate::transform::NormalizationMode::PerStreamMaxAbs => 1,
        };
        w.write_all(&[mode])?;
        w.write_all(&self.normalization.scale.to_le_bytes())?;
        match &self.params {
            None => w.write_all(&[0u8])?,
            Some(p) => {
                w.write_all(&[1u8])?;
                for field in [
                    p.r_init,
                    p.r_limit,
                    p.k_adapt,
                    p.n_power,
                    p.l_base,
                    p.k_range_power,
                    p.k_maturity_base,
                    p.maturity_threshold,
                    p.energy_epsilon,
                ] {
                    w.write_all(&field.to_le_bytes())?;
                }
                for levels in [&p.r_init_levels, &p.r_limit_levels] {
                    match levels {
                        None => w.write_all(&0u32.to_le_bytes())?,
                        Some(v) => {
                            w.write_all(&(v.len() as u32).to_le_bytes())?;
                            for x in v {
                                w.write_all(&x.to_le_bytes())?;
                            }
                        }
                    }
                }
            }
        }
        for (i, cw) in self.codewords.iter().enumerate() {
            w.write_all(&(i as u32).to_le_bytes())?;
            for x in cw {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 7];
        r.read_exact(&mut magic)?;
        if &magic != CODEBOOK_MAGIC {
            return Err(Error::Format("bad codebook magic".into()));
        }
        let mut b = [0u8; 1];
        r.read_exact(&mut b)?;
        if b[0] != 1 {
            return Err(Error::Format(format!("unsupported codebook version {}", b[0])));
        }
        r.read_exact(&mut b)?;
        let kind = match b[0] {
            0 => CodebookKind::Cortex,
            1 => CodebookKind::Centroid,
            other => return Err(Error::Format(format!("bad codebook kind {other}"))),
        };
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf)?;
        let depth = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut u32buf)?;
        let k = u32::from_le_bytes(u32buf) as usize;
        r.read_exact(&mut b)?;
        let mode = match b[0] {
            0 => crate::transform::NormalizationMode::FixedScale,
            1 => crate::transform::NormalizationMode::PerStreamMaxAbs,
            other => return Err(Error::Format(format!("bad normalization mode {other}"))),
        };
        let mut f64buf = [0u8; 8];
        r.read_exact(&mut f64buf)?;
        let normalization = NormalizationSpec {
            scale: f64::from_le_bytes(f64buf),
            mode,
        };
        r.read_exact(&mut b)?;
        let params = match b[0] {
            0 => None,
            1 => {
                let mut fields = [0.0f64; 9];
                for f in &mut fields {
                    r.read_exact(&mut f64buf)?;
                    *f = f64::from_le_bytes(f64buf);
                }
                let mut levels = [None, None];
                for slot in &mut levels {
                    r.read_exact(&mut u32buf)?;
                    let n = u32::from_le_bytes(u32buf) as usize;
                    if n > 0 {
                        let mut v = Vec::with_capacity(n);
                        for _ in 0..n {
                            r.read_exact(&mut f64buf)?;
                            v.push(f64::from_le_bytes(f64buf));
                        }
                        *slot = Some(v);
                    }
                }
                let [r_init_levels, r_limit_levels] = levels;
                Some(CortexParams {
                    r_init: fields[0],
                    r_limit: fields[1],
                    k_adapt: fields[2],
                    n_power: fields[3],
                    l_base: fields[4],
                    k_range_power: fields[5],
                    k_maturity_base: fields[6],
                    maturity_threshold: fields[7],
                    energy_epsilon: fields[8],
                    r_init_levels,
                    r_limit_levels,
                })
            }
            other => return Err(Error::Format(format!("bad params flag {other}"))),
        };
        let mut codewords = Vec::with_capacity(k);
        for expect in 0..k as u32 {
            r.read_exact(&mut u32buf)?;
            let index = u32::from_le_bytes(u32buf);
            if index != expect {
                return Err(Error::Format(format!(
                    "codeword index {index} out of order, expected {expect}"
                )));
            }
            let mut cw = Vec::with_capacity(depth);
            for _ in 0..depth {
                r.read_exact(&mut f64buf)?;
                cw.push(f64::from_le_bytes(f64buf));
            }
            codewords.push(cw);
        }
        match kind {
            CodebookKind::Cortex => Self::from_codewords(depth, params, normalization, codewords),
            CodebookKind::Centroid => Self::from_centroids(depth, normalization, codewords),
        }
    }

    pub fn save_json<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load_json<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save_binary<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.write_binary(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    pub fn load_binary<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::read_binary(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

fn build_trie(
    codewords: &[Vec<f64>],
    level: usize,
    depth: usize,
    level_counts: &mut [u32],
    next_index: &mut u32,
) -> Vec<TrieNode> {
    let mut nodes = Vec::new();
    let mut start = 0;
    while start < codewords.len() {
        let value = codewords[start][level];
        let mut end = start + 1;
        while end < codewords.len() && codewords[end][level] == value {
            end += 1;
        }
        let ordinal = level_counts[level];
        level_counts[level] += 1;
        let (children, index) = if level + 1 == depth {
            let idx = *next_index;
            *next_index += 1;
            (Vec::new(), Some(idx))
        } else {
            (
                build_trie(&codewords[start..end], level + 1, depth, level_counts, next_index),
                None,
            )
        };
        nodes.push(TrieNode {
            value,
            ordinal,
            children,
            index,
        });
        start = end;
    }
    nodes
}

/// Nearest node by value in a sorted list; ties go to the lower value.
fn nearest_node(nodes: &[TrieNode], coeff: f64) -> usize {
    let i = nodes.partition_point(|n| n.value < coeff);
    if i == 0 {
        0
    } else if i == nodes.len() {
        nodes.len() - 1
    } else if (coeff - nodes[i - 1].value).abs() <= (nodes[i].value - coeff).abs() {
        i - 1
    } else {
        i
    }
}

/// Magic bytes prefixing the binary index-file format.
pub const INDEX_MAGIC: &[u8; 7] = b"CVQIDX1";

/// Writes encoded indices as fixed 32-bit little-endian values.
pub fn write_indices<W: Write>(mut w: W, indices: &[u32]) -> Result<()> {
    w.write_all(INDEX_MAGIC)?;
    w.write_all(&[1u8])?;
    w.write_all(&(indices.len() as u64).to_le_bytes())?;
    for &i in indices {
        w.write_all(&i.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_indices<R: Read>(mut r: R) -> Result<Vec<u32>> {
    let mut magic = [0u8; 7];
    r.read_exact(&mut magic)?;
    if &magic != INDEX_MAGIC {
        return Err(Error::Format("bad index magic".into()));
    }
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    if b[0] != 1 {
        return Err(Error::Format(format!("unsupported index version {}", b[0])));
    }
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let n = u64::from_le_bytes(u64buf) as usize;
    let mut out = Vec::with_capacity(n);
    let mut u32buf = [0u8; 4];
    for _ in 0..n {
        r.read_exact(&mut u32buf)?;
        out.push(u32::from_le_bytes(u32buf));
    }
    Ok(out)
}

/// CSV with one centroid per row, comma-separated dimensions.
pub fn write_centroids_csv<W: Write>(mut w: W, centroids: &[Vec<f64>]) -> Result<()> {
    for c in centroids {
        let row: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_centroids_csv<R: Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let reader = BufReader::new(r);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|f| f.parse::<f64>()).collect();
        out.push(row.map_err(|e| Error::Format(format!("bad centroid row: {e}")))?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> NormalizationSpec {
        NormalizationSpec::identity()
    }

    fn small_codebook() -> Codebook {
        // Two level-1 branches, the first with two leaves.
        let codewords = vec![
            vec![-1.0, 0.0, 2.0],
            vec![-1.0, 3.0, -1.0],
            vec![5.0, 1.0, 1.0],
        ];
        Codebook::from_codewords(3, None, spec(), codewords).unwrap()
    }

    #[test]
    fn decode_of_encode_is_identity_on_codewords() {
        let cb = small_codebook();
        for j in 0..cb.len() as u32 {
            let cw = cb.decode(j).unwrap().to_vec();
            assert_eq!(cb.encode(&cw).unwrap(), j);
        }
    }

    #[test]
    fn single_path_codebook_encodes_everything_to_zero() {
        let cb = Codebook::from_codewords(2, None, spec(), vec![vec![1.0, 4.0]]).unwrap();
        for input in [[-100.0, 0.0], [1.0, 4.0], [55.0, -3.0]] {
            assert_eq!(cb.encode(&input).unwrap(), 0);
        }
    }

    #[test]
    fn out_of_bounds_index_is_lookup_error() {
        let cb = small_codebook();
        assert!(matches!(cb.decode(99), Err(Error::Lookup(_))));
    }

    #[test]
    fn dissipated_energy_examples() {
        // Depth-1 codebook [2], input [3] -> 1.
        let cb = Codebook::from_codewords(1, None, spec(), vec![vec![2.0]]).unwrap();
        assert_eq!(cb.dissipated_energy(&[3.0], 0).unwrap(), 1.0);
        // Input equal to a codeword -> 0.
        let cb = small_codebook();
        let cw = cb.decode(1).unwrap().to_vec();
        assert_eq!(cb.dissipated_energy(&cw, 1).unwrap(), 0.0);
    }

    #[test]
    fn dissipated_energy_equals_squared_l2_to_decoded() {
        let cb = small_codebook();
        let input = [0.3, 1.7, -0.2];
        let idx = cb.encode(&input).unwrap();
        let decoded = cb.decode(idx).unwrap();
        let l2: f64 = input
            .iter()
            .zip(decoded)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        assert!((cb.dissipated_energy(&input, idx).unwrap() - l2).abs() < 1e-12);
    }

    #[test]
    fn greedy_path_vs_exhaustive_best_path_on_small_trees() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let mut total_gap = 0.0;
        for _ in 0..200 {
            // Random strictly sorted codeword set: depth 3, up to 4 branches.
            let mut codewords: Vec<Vec<f64>> = (0..rng.gen_range(2..=6))
                .map(|_| (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect())
                .collect();
            codewords.sort_by(|a, b| a.partial_cmp(b).unwrap());
            codewords.dedup();
            let cb = Codebook::from_codewords(3, None, spec(), codewords.clone()).unwrap();
            let input: Vec<f64> = (0..3).map(|_| rng.gen_range(-4.0..4.0)).collect();
            let greedy_idx = cb.encode(&input).unwrap();
            let greedy_e = cb.dissipated_energy(&input, greedy_idx).unwrap();
            let best_e = (0..codewords.len() as u32)
                .map(|j| cb.dissipated_energy(&input, j).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(greedy_e >= best_e - 1e-12);
            total_gap += greedy_e - best_e;
        }
        // The harness reports the greedy-vs-optimal gap; here it only needs
        // to be finite and non-negative.
        assert!(total_gap >= 0.0);
    }

    #[test]
    fn traversal_order_assigns_indices_by_value() {
        let codewords = vec![vec![-2.0, 1.0], vec![3.0, 0.5]];
        let cb = Codebook::from_codewords(2, None, spec(), codewords).unwrap();
        assert_eq!(cb.encode(&[-2.0, 1.0]).unwrap(), 0);
        assert_eq!(cb.encode(&[3.0, 0.5]).unwrap(), 1);
        assert_eq!(cb.level_node_counts(), &[2, 2]);
    }

    #[test]
    fn json_round_trip_reproduces_encode_bit_for_bit() {
        let cb = small_codebook();
        let text = cb.to_json().unwrap();
        let back = Codebook::from_json(&text).unwrap();
        assert_eq!(cb, back);
        let input = [0.123456789e-3, -7.5, 2.25];
        assert_eq!(cb.encode(&input).unwrap(), back.encode(&input).unwrap());
    }

    #[test]
    fn binary_round_trip_with_params() {
        let params = CortexParams::new(8.0, 0.5, 2.0)
            .unwrap()
            .with_level_ranges(vec![4.0, 2.0, 1.0], 0.25)
            .unwrap();
        let codewords = vec![vec![-1.0, 0.0, 2.0], vec![5.0, 1.0, 1.0]];
        let cb = Codebook::from_codewords(3, Some(params), spec(), codewords).unwrap();
        let mut buf = Vec::new();
        cb.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..7], CODEBOOK_MAGIC);
        let back = Codebook::read_binary(&buf[..]).unwrap();
        assert_eq!(cb, back);
    }

    #[test]
    fn index_file_round_trip() {
        let indices = vec![0u32, 5, 2, 2, 7, 4_000_000_000];
        let mut buf = Vec::new();
        write_indices(&mut buf, &indices).unwrap();
        assert_eq!(&buf[..7], INDEX_MAGIC);
        assert_eq!(read_indices(&buf[..]).unwrap(), indices);
    }

    #[test]
    fn centroid_kind_encodes_by_full_vector_distance() {
        let cb = Codebook::from_centroids(
            2,
            spec(),
            vec![vec![0.0, 0.0], vec![10.0, 10.0]],
        )
        .unwrap();
        assert_eq!(cb.encode(&[1.0, -1.0]).unwrap(), 0);
        assert_eq!(cb.encode(&[9.0, 11.0]).unwrap(), 1);
        let mut buf = Vec::new();
        cb.write_binary(&mut buf).unwrap();
        let back = Codebook::read_binary(&buf[..]).unwrap();
        assert_eq!(cb, back);
    }

    #[test]
    fn level_visit_counts_accumulate() {
        let cb = small_codebook();
        let data: Vec<Vec<f64>> = vec![
            vec![-1.0, 0.0, 2.0],
            vec![-1.0, 3.0, -1.0],
            vec![-0.9, 2.9, -1.2],
            vec![5.0, 1.0, 1.0],
        ];
        let slices: Vec<&[f64]> = data.iter().map(|v| v.as_slice()).collect();
        let counts = cb.level_visit_counts(slices).unwrap();
        assert_eq!(counts[0], vec![3, 1]); // level 1: branches -1.0 and 5.0
        assert_eq!(counts[0].iter().sum::<u64>(), 4);
        assert_eq!(counts[2].iter().sum::<u64>(), 4);
    }
}
