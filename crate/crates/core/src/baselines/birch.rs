//! Birch phase 1 (CF-tree insertion) followed by phase 3 (weighted PNN over
//! leaf entries). Phases 2 and 4 are optional in the original formulation
//! and are skipped.

use crate::baselines::{pnn_weighted, squared_distance, CentroidCodebook, VectorSet};
use crate::error::{Error, Result};

/// Clustering feature: count, linear sum, and square sum of absorbed points.
#[derive(Debug, Clone, PartialEq)]
pub struct CfEntry {
    pub n: f64,
    pub linear_sum: Vec<f64>,
    pub square_sum: f64,
}

impl CfEntry {
    pub fn from_point(p: &[f64]) -> Self {
        CfEntry {
            n: 1.0,
            linear_sum: p.to_vec(),
            square_sum: p.iter().map(|x| x * x).sum(),
        }
    }

    /// CF additivity: merging sums (N, LS, SS) componentwise.
    pub fn merge(&self, other: &CfEntry) -> CfEntry {
        CfEntry {
            n: self.n + other.n,
            linear_sum: self
                .linear_sum
                .iter()
                .zip(&other.linear_sum)
                .map(|(a, b)| a + b)
                .collect(),
            square_sum: self.square_sum + other.square_sum,
        }
    }

    pub fn centroid(&self) -> Vec<f64> {
        self.linear_sum.iter().map(|s| s / self.n).collect()
    }

    /// Root mean squared distance of the absorbed points from the centroid.
    pub fn radius(&self) -> f64 {
        let centroid_norm2: f64 = self
            .linear_sum
            .iter()
            .map(|s| (s / self.n) * (s / self.n))
            .sum();
        (self.square_sum / self.n - centroid_norm2).max(0.0).sqrt()
    }

    fn centroid_distance2(&self, other: &CfEntry) -> f64 {
        let ca = self.centroid();
        let cb = other.centroid();
        squared_distance(&ca, &cb)
    }
}

#[derive(Debug, Clone)]
struct CfNode {
    entries: Vec<CfEntry>,
    /// children[i] is summarized by entries[i]; leaves have no children.
    children: Vec<CfNode>,
}

impl CfNode {
    fn leaf() -> Self {
        CfNode {
            entries: Vec::new(),
            children: Vec::new(),
        }
    }

    fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct BirchParams {
    /// Absorption radius threshold of leaf entries.
    pub threshold: f64,
    /// Maximum entries per node before a split.
    pub branching: usize,
}

/// Default threshold from a data sample: a quarter of the RMS pairwise
/// distance of up to 1,000 points.
pub fn default_birch_threshold(data: &VectorSet) -> f64 {
    let step = (data.len() / 1000).max(1);
    let sample: Vec<&Vec<f64>> = data.vectors().iter().step_by(step).take(1000).collect();
    if sample.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut pairs = 0u64;
    for i in 0..sample.len() {
        for j in i + 1..sample.len() {
            total += squared_distance(sample[i], sample[j]);
            pairs += 1;
        }
    }
    0.25 * (total / pairs as f64).sqrt()
}

struct CfTree {
    root: CfNode,
    branching: usize,
    threshold: f64,
}

enum InsertOutcome {
    Done,
    /// The child split; the caller must register the new sibling.
    Split(CfEntry, CfNode),
}

impl CfTree {
    fn new(threshold: f64, branching: usize) -> Self {
        CfTree {
            root: CfNode::leaf(),
            branching,
            threshold,
        }
    }

    fn insert(&mut self, point: &[f64]) {
        let entry = CfEntry::from_point(point);
        if let InsertOutcome::Split(new_summary, new_node) =
            Self::insert_into(&mut self.root, entry, self.threshold, self.branching)
        {
            // Root split grows the tree by one level.
            let old_root = std::mem::replace(&mut self.root, CfNode::leaf());
            let old_summary = summarize(&old_root);
            self.root = CfNode {
                entries: vec![old_summary, new_summary],
                children: vec![old_root, new_node],
            };
        }
    }

    fn insert_into(
        node: &mut CfNode,
        entry: CfEntry,
        threshold: f64,
        branching: usize,
    ) -> InsertOutcome {
        if node.is_leaf() {
            // Absorb into the closest entry when the merged radius stays
            // within the threshold, else add a new entry.
            if let Some(closest) = closest_entry(&node.entries, &entry) {
                let merged = node.entries[closest].merge(&entry);
                if merged.radius() <= threshold {
                    node.entries[closest] = merged;
                    return InsertOutcome::Done;
                }
            }
            node.entries.push(entry);
        } else {
            let target = closest_entry(&node.entries, &entry).expect("internal nodes not empty");
            let child_outcome = Self::insert_into(
                &mut node.children[target],
                entry,
                threshold,
                branching,
            );
            node.entries[target] = summarize(&node.children[target]);
            if let InsertOutcome::Split(summary, sibling) = child_outcome {
                node.entries.push(summary);
                node.children.push(sibling);
            }
        }
        if node.entries.len() > branching {
            let (summary, sibling) = split_node(node);
            return InsertOutcome::Split(summary, sibling);
        }
        InsertOutcome::Done
    }

    fn leaf_entries(&self) -> Vec<CfEntry> {
        let mut out = Vec::new();
        fn walk(node: &CfNode, out: &mut Vec<CfEntry>) {
            if node.is_leaf() {
                out.extend(node.entries.iter().cloned());
            } else {
                for child in &node.children {
                    walk(child, out);
                }
            }
        }
        walk(&self.root, &mut out);
        out
    }
}

fn summarize(node: &CfNode) -> CfEntry {
    node.entries
        .iter()
        .cloned()
        .reduce(|a, b| a.merge(&b))
        .expect("nodes hold at least one entry")
}

fn closest_entry(entries: &[CfEntry], entry: &CfEntry) -> Option<usize> {
    let mut best = None;
    let mut best_d = f64::INFINITY;
    for (i, e) in entries.iter().enumerate() {
        let d = e.centroid_distance2(entry);
        if d < best_d {
            best_d = d;
            best = Some(i);
        }
    }
    best
}

/// Splits an over-full node, seeding the two halves with the farthest pair
/// of entry centroids.
fn split_node(node: &mut CfNode) -> (CfEntry, CfNode) {
    let entries = std::mem::take(&mut node.entries);
    let children = std::mem::take(&mut node.children);

    let mut seed_a = 0;
    let mut seed_b = 1;
    let mut far = -1.0;
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let d = entries[i].centroid_distance2(&entries[j]);
            if d > far {
                far = d;
                seed_a = i;
                seed_b = j;
            }
        }
    }

    let seed_entry_a = entries[seed_a].clone();
    let seed_entry_b = entries[seed_b].clone();
    let mut keep = CfNode::leaf();
    let mut sibling = CfNode::leaf();
    let had_children = !children.is_empty();
    let mut child_iter = children.into_iter();
    for (i, entry) in entries.into_iter().enumerate() {
        let child = if had_children { child_iter.next() } else { None };
        let to_a = if i == seed_a {
            true
        } else if i == seed_b {
            false
        } else {
            entry.centroid_distance2(&seed_entry_a) <= entry.centroid_distance2(&seed_entry_b)
        };
        let target = if to_a { &mut keep } else { &mut sibling };
        target.entries.push(entry);
        if let Some(c) = child {
            target.children.push(c);
        }
    }
    let sibling_summary = summarize(&sibling);
    *node = keep;
    (sibling_summary, sibling)
}

#[derive(Debug, Clone)]
pub struct BirchOutcome {
    pub codebook: CentroidCodebook,
    pub leaf_entry_count: usize,
}

/// Phase 1 CF-tree over the data, phase 3 weighted PNN over leaf entries.
pub fn birch(data: &VectorSet, params: &BirchParams, k: usize) -> Result<BirchOutcome> {
    if params.threshold < 0.0 {
        return Err(Error::Config(format!(
            "threshold must be >= 0, got {}",
            params.threshold
        )));
    }
    if params.branching < 2 {
        return Err(Error::Config(format!(
            "branching must be >= 2, got {}",
            params.branching
        )));
    }
    let mut tree = CfTree::new(params.threshold, params.branching);
    for v in data.vectors() {
        tree.insert(v);
    }
    let entries = tree.leaf_entries();
    if k > entries.len() {
        return Err(Error::InfeasibleK(format!(
            "k = {k} exceeds the {} leaf entries produced at threshold {}",
            entries.len(),
            params.threshold
        )));
    }
    let points: Vec<Vec<f64>> = entries.iter().map(|e| e.centroid()).collect();
    let weights: Vec<f64> = entries.iter().map(|e| e.n).collect();
    let codebook = pnn_weighted(&points, &weights, k)?;
    Ok(BirchOutcome {
        codebook,
        leaf_entry_count: entries.len(),
    })
}
