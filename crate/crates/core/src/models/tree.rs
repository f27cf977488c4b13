//! Regression tree with greedy variance-reduction splits.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` means unlimited depth.
    pub max_depth: Option<u32>,
    /// Minimum number of training points in each leaf.
    pub min_leaf: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub(crate) enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// Arena-stored regression tree; index 0 is the root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    nodes: Vec<Node>,
    pub training_loss: f64,
}

impl TreeModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

struct Builder<'a> {
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    params: &'a TreeParams,
    nodes: Vec<Node>,
}

/// Fit by recursive greedy splitting: at each node pick the (feature,
/// threshold) pair with the largest reduction in summed squared error,
/// thresholds at midpoints of adjacent distinct feature values. With
/// `min_leaf = 1`, unlimited depth, and distinct feature rows the tree
/// memorizes the training responses exactly.
pub fn train_tree(s: &Dataset, params: &TreeParams) -> Result<TreeModel> {
    if params.min_leaf < 1 {
        return Err(Error::Precondition("min_leaf must be >= 1".into()));
    }
    if s.len() < params.min_leaf {
        return Err(Error::Precondition(format!(
            "need n >= min_leaf, got n = {} < {}",
            s.len(),
            params.min_leaf
        )));
    }
    let xs: Vec<Vec<f64>> = s.points().iter().map(|z| z.model_input()).collect();
    let ys: Vec<f64> = s
        .points()
        .iter()
        .map(|z| z.response.as_real())
        .collect::<Result<_>>()?;

    let mut b = Builder {
        xs,
        ys,
        params,
        nodes: Vec::new(),
    };
    let all: Vec<usize> = (0..s.len()).collect();
    b.grow(&all, 0);

    let tree = TreeModel {
        nodes: b.nodes,
        training_loss: 0.0,
    };
    let training_loss = s
        .points()
        .iter()
        .map(|z| {
            let e = z.response.as_real().unwrap() - tree.predict(&z.model_input());
            e * e
        })
        .sum::<f64>()
        / s.len() as f64;
    Ok(TreeModel {
        training_loss,
        ..tree
    })
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Builder<'_> {
    /// Returns the arena index of the subtree built over `idx`.
    fn grow(&mut self, idx: &[usize], depth: u32) -> usize {
        let mean = idx.iter().map(|&i| self.ys[i]).sum::<f64>() / idx.len() as f64;
        let depth_ok = self.params.max_depth.map_or(true, |d| depth < d);
        let size_ok = idx.len() >= 2 * self.params.min_leaf;
        if !(depth_ok && size_ok) {
            self.nodes.push(Node::Leaf { value: mean });
            return self.nodes.len() - 1;
        }
        match self.best_split(idx) {
            Some(split) => {
                let slot = self.nodes.len();
                self.nodes.push(Node::Leaf { value: mean }); // placeholder
                let left = self.grow(&split.left, depth + 1);
                let right = self.grow(&split.right, depth + 1);
                self.nodes[slot] = Node::Split {
                    feature: split.feature,
                    threshold: split.threshold,
                    left,
                    right,
                };
                slot
            }
            None => {
                self.nodes.push(Node::Leaf { value: mean });
                self.nodes.len() - 1
            }
        }
    }

    fn best_split(&self, idx: &[usize]) -> Option<BestSplit> {
        let n = idx.len();
        let total_sum: f64 = idx.iter().map(|&i| self.ys[i]).sum();
        let total_sq: f64 = idx.iter().map(|&i| self.ys[i] * self.ys[i]).sum();
        let node_sse = (total_sq - total_sum * total_sum / n as f64).max(0.0);
        if node_sse == 0.0 {
            return None; // pure node
        }

        let dim = self.xs[idx[0]].len();
        let mut best: Option<(usize, f64, f64, usize, Vec<usize>)> = None;
        for feature in 0..dim {
            let mut order = idx.to_vec();
            order.sort_by(|&a, &b| {
                self.xs[a][feature]
                    .partial_cmp(&self.xs[b][feature])
                    .unwrap()
            });
            let mut left_sum = 0.0;
            let mut left_sq = 0.0;
            for k in 1..n {
                let i = order[k - 1];
                left_sum += self.ys[i];
                left_sq += self.ys[i] * self.ys[i];
                if k < self.params.min_leaf || n - k < self.params.min_leaf {
                    continue;
                }
                let lo = self.xs[order[k - 1]][feature];
                let hi = self.xs[order[k]][feature];
                if lo == hi {
                    continue; // cannot separate equal values
                }
                let right_sum = total_sum - left_sum;
                let right_sq = total_sq - left_sq;
                let sse_l = (left_sq - left_sum * left_sum / k as f64).max(0.0);
                let sse_r = (right_sq - right_sum * right_sum / (n - k) as f64).max(0.0);
                let reduction = node_sse - sse_l - sse_r;
                // strictly-better keeps the first (lowest feature, lowest
                // threshold) candidate, making ties deterministic
                if reduction > best.as_ref().map_or(0.0, |b| b.2) {
                    best = Some((feature, (lo + hi) / 2.0, reduction, k, order.clone()));
                }
            }
        }
        best.filter(|(_, _, reduction, _, _)| *reduction > node_sse * 1e-12)
            .map(|(feature, threshold, _, k, order)| BestSplit {
                feature,
                threshold,
                left: order[..k].to_vec(),
                right: order[k..].to_vec(),
            })
    }
}
