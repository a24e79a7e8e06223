//! Random-forest binary classifier over the ten hand-crafted features.
//!
//! Greedy Gini-impurity trees on bootstrap resamples, a random feature
//! subset per split, probability output as the mean of leaf positive
//! fractions. Everything is seeded: tree `i` draws from an independent
//! substream of the train seed, so a fitted forest is reproducible
//! bit-for-bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

pub const N_FEATURES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// None = grow until pure.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub features_per_split: usize,
    /// When false every tree sees the full training set (used by the
    /// single-tree determinism checks).
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            // ceil(sqrt(10)) = 4
            features_per_split: 4,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Internal {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        positive_fraction: f64,
        sample_count: usize,
    },
}

impl TreeNode {
    fn score(&self, x: &[f64; N_FEATURES]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf {
                    positive_fraction, ..
                } => return *positive_fraction,
                TreeNode::Internal {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub trees: Vec<TreeNode>,
    pub params: ForestParams,
    pub train_seed: u64,
}

/// Gini impurity of a binary label set: 1 - p0^2 - p1^2.
pub fn gini(labels: &[bool]) -> f64 {
    debug_assert!(!labels.is_empty());
    let pos = labels.iter().filter(|&&l| l).count();
    gini_counts(pos, labels.len())
}

fn gini_counts(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    1.0 - p * p - (1.0 - p) * (1.0 - p)
}

struct BestSplit {
    gain: f64,
    feature: usize,
    threshold: f64,
}

/// Fit one tree on an explicit bootstrap plan (indices into `x`). The tree
/// depends only on the sample multiset selected by the plan and on the
/// feature-subset stream, which is what makes refitting under a row
/// permutation with a correspondingly permuted plan reproduce the tree.
pub fn fit_tree_with_plan(
    x: &[[f64; N_FEATURES]],
    y: &[bool],
    plan: &[usize],
    params: &ForestParams,
    rng: &mut SplitMix64,
) -> TreeNode {
    let mut indices = plan.to_vec();
    fit_node(x, y, &mut indices, params, rng, 0)
}

fn fit_node(
    x: &[[f64; N_FEATURES]],
    y: &[bool],
    indices: &mut [usize],
    params: &ForestParams,
    rng: &mut SplitMix64,
    depth: usize,
) -> TreeNode {
    let n = indices.len();
    let pos = indices.iter().filter(|&&i| y[i]).count();
    let make_leaf = || TreeNode::Leaf {
        positive_fraction: pos as f64 / n as f64,
        sample_count: n,
    };
    if pos == 0
        || pos == n
        || n < params.min_samples_split
        || params.max_depth.is_some_and(|d| depth >= d)
    {
        return make_leaf();
    }

    let features = rng.sample_indices(N_FEATURES, params.features_per_split.min(N_FEATURES));
    let parent_gini = gini_counts(pos, n);
    let mut best: Option<BestSplit> = None;
    let mut pairs: Vec<(f64, bool)> = Vec::with_capacity(n);

    for &f in &features {
        pairs.clear();
        pairs.extend(indices.iter().map(|&i| (x[i][f], y[i])));
        pairs.sort_unstable_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));

        // sweep boundaries between distinct values; equal-value runs are
        // absorbed whole so ordering within a run cannot matter
        let mut left_pos = 0usize;
        let mut left_n = 0usize;
        for k in 0..n - 1 {
            left_n += 1;
            if pairs[k].1 {
                left_pos += 1;
            }
            if pairs[k].0 == pairs[k + 1].0 {
                continue;
            }
            let right_n = n - left_n;
            let right_pos = pos - left_pos;
            let weighted = (left_n as f64 * gini_counts(left_pos, left_n)
                + right_n as f64 * gini_counts(right_pos, right_n))
                / n as f64;
            let gain = parent_gini - weighted;
            let threshold = 0.5 * (pairs[k].0 + pairs[k + 1].0);
            let better = match &best {
                None => true,
                Some(b) => {
                    gain > b.gain
                        || (gain == b.gain
                            && (f < b.feature || (f == b.feature && threshold < b.threshold)))
                }
            };
            if better {
                best = Some(BestSplit {
                    gain,
                    feature: f,
                    threshold,
                });
            }
        }
    }

    // no sampled feature separates the node (all constant): leaf.
    // Zero-gain splits are still taken, which is what lets depth resolve
    // XOR-like label structure.
    let Some(best) = best else { return make_leaf() };

    let mid = partition_in_place(x, indices, best.feature, best.threshold);
    let (left_idx, right_idx) = indices.split_at_mut(mid);
    debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());
    let left = fit_node(x, y, left_idx, params, rng, depth + 1);
    let right = fit_node(x, y, right_idx, params, rng, depth + 1);
    TreeNode::Internal {
        feature: best.feature,
        threshold: best.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Stable partition: indices with x[f] <= t first; returns the boundary.
fn partition_in_place(
    x: &[[f64; N_FEATURES]],
    indices: &mut [usize],
    feature: usize,
    threshold: f64,
) -> usize {
    let mut left: Vec<usize> = Vec::with_capacity(indices.len());
    let mut right: Vec<usize> = Vec::with_capacity(indices.len());
    for &i in indices.iter() {
        if x[i][feature] <= threshold {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    let mid = left.len();
    indices[..mid].copy_from_slice(&left);
    indices[mid..].copy_from_slice(&right);
    mid
}

/// Train a forest. Each tree gets a bootstrap resample of size |x| and an
/// independent seed substream.
pub fn train(
    x: &[[f64; N_FEATURES]],
    y: &[bool],
    params: &ForestParams,
    seed: u64,
) -> Result<Forest> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!(
            "{} feature rows vs {} labels",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::DegenerateData("need at least 2 samples".into()));
    }
    let pos = y.iter().filter(|&&l| l).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::DegenerateData("both classes must be present".into()));
    }
    if params.n_trees == 0 {
        return Err(Error::DegenerateData("n_trees must be >= 1".into()));
    }
    let n = x.len();
    let trees = (0..params.n_trees)
        .map(|t| {
            let mut rng = SplitMix64::derive(seed, t as u64);
            let plan: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.next_below(n as u64) as usize).collect()
            } else {
                (0..n).collect()
            };
            fit_tree_with_plan(x, y, &plan, params, &mut rng)
        })
        .collect();
    Ok(Forest {
        trees,
        params: params.clone(),
        train_seed: seed,
    })
}

/// Probability of the positive class: mean of leaf positive fractions.
pub fn predict_proba(forest: &Forest, x: &[f64; N_FEATURES]) -> f64 {
    let sum: f64 = forest.trees.iter().map(|t| t.score(x)).sum();
    sum / forest.trees.len() as f64
}

/// Score a batch of rows.
pub fn predict_proba_all(forest: &Forest, xs: &[[f64; N_FEATURES]]) -> Vec<f64> {
    xs.iter().map(|x| predict_proba(forest, x)).collect()
}

/// Serialize to the documented JSON text form (node records in pre-order).
pub fn to_json(forest: &Forest) -> String {
    #[derive(Serialize)]
    struct FlatForest<'a> {
        params: &'a ForestParams,
        train_seed: u64,
        trees: Vec<Vec<FlatNode>>,
    }
    let trees = forest
        .trees
        .iter()
        .map(|t| {
            let mut records = Vec::new();
            flatten(t, &mut records);
            records
        })
        .collect();
    serde_json::to_string_pretty(&FlatForest {
        params: &forest.params,
        train_seed: forest.train_seed,
        trees,
    })
    .expect("forest serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<Forest> {
    #[derive(Deserialize)]
    struct FlatForest {
        params: ForestParams,
        train_seed: u64,
        trees: Vec<Vec<FlatNode>>,
    }
    let flat: FlatForest =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("bad forest json: {e}")))?;
    let mut trees = Vec::with_capacity(flat.trees.len());
    for records in &flat.trees {
        let mut pos = 0usize;
        let tree = unflatten(records, &mut pos)?;
        if pos != records.len() {
            return Err(Error::Format("trailing nodes in tree record list".into()));
        }
        trees.push(tree);
    }
    Ok(Forest {
        trees,
        params: flat.params,
        train_seed: flat.train_seed,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum FlatNode {
    Internal { feature: usize, threshold: f64 },
    Leaf { positive_fraction: f64, sample_count: usize },
}

fn flatten(node: &TreeNode, out: &mut Vec<FlatNode>) {
    match node {
        TreeNode::Leaf {
            positive_fraction,
            sample_count,
        } => out.push(FlatNode::Leaf {
            positive_fraction: *positive_fraction,
            sample_count: *sample_count,
        }),
        TreeNode::Internal {
            feature,
            threshold,
            left,
            right,
        } => {
            out.push(FlatNode::Internal {
                feature: *feature,
                threshold: *threshold,
            });
            flatten(left, out);
            flatten(right, out);
        }
    }
}

fn unflatten(records: &[FlatNode], pos: &mut usize) -> Result<TreeNode> {
    let record = records
        .get(*pos)
        .ok_or_else(|| Error::Format("truncated tree record list".into()))?;
    *pos += 1;
    match record {
        FlatNode::Leaf {
            positive_fraction,
            sample_count,
        } => Ok(TreeNode::Leaf {
            positive_fraction: *positive_fraction,
            sample_count: *sample_count,
        }),
        FlatNode::Internal { feature, threshold } => {
            let left = unflatten(records, pos)?;
            let right = unflatten(records, pos)?;
            Ok(TreeNode::Internal {
                feature: *feature,
                threshold: *threshold,
                left: Box::new(left),
                right: Box::new(right),
            })
        }
    }
}
