//! Random forest of CART trees grown on Gini impurity.
//!
//! Tree `t` draws everything from `Pcg32::new(seed, t)`: first the
//! bootstrap sample (`n` indices with replacement), then the feature subset
//! at each node (partial Fisher-Yates, depth-first, left child first). Trees
//! are independent, so growing them in parallel gives the same forest.
//!
//! Split search evaluates the sampled columns in ascending index order and
//! candidate thresholds at midpoints between adjacent distinct values,
//! keeping the first strictly better candidate. Rows with
//! `value <= threshold` go left. A node becomes a leaf at `max_depth`,
//! below `min_samples_split`, when pure, or when no sampled column varies.
//! Zero-gain splits are allowed.

use rayon::prelude::*;

use crate::error::Result;
use crate::features::FeatureMatrix;
use crate::models::{Model, TrainConfig, TrainedModel};
use crate::rng::Pcg32;

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    /// Class frequencies of the training samples that reached the leaf, as
    /// `(class, probability)` pairs in ascending class order.
    Leaf { distribution: Vec<(usize, f64)> },
}

/// Nodes in an arena; the root is node 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_for(&self, row: &[f64]) -> &[(usize, f64)] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if row[*feature] <= *threshold { *left } else { *right },
                Node::Leaf { distribution } => return distribution,
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    width: usize,
    classes: usize,
}

impl ForestModel {
    pub fn new(trees: Vec<Tree>, width: usize, classes: usize) -> ForestModel {
        ForestModel { trees, width, classes }
    }

    pub fn input_width(&self) -> usize {
        self.width
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    /// Mean of the per-tree leaf distributions.
    pub(crate) fn row_proba(&self, row: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for tree in &self.trees {
            for &(class, p) in tree.leaf_for(row) {
                out[class] += p;
            }
        }
        let inv = 1.0 / self.trees.len() as f64;
        out.iter_mut().for_each(|v| *v *= inv);
    }
}

/// Gini impurity `1 - sum(p_k^2)` of a class-count vector.
pub fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    /// Trees are grown on the current rayon pool.
    Rayon,
}

pub fn train_forest(x: &FeatureMatrix, config: &TrainConfig) -> Result<TrainedModel> {
    train_forest_with(x, config, Parallelism::Rayon)
}

pub fn train_forest_with(x: &FeatureMatrix, config: &TrainConfig, parallelism: Parallelism) -> Result<TrainedModel> {
    let n_trees = config.forest.n_trees;
    let grow = |t: usize| TreeBuilder::new(x, config, t as u64).build();
    let trees: Vec<Tree> = match parallelism {
        Parallelism::Sequential => (0..n_trees).map(grow).collect(),
        Parallelism::Rayon => (0..n_trees).into_par_iter().map(grow).collect(),
    };
    Ok(TrainedModel {
        config: config.clone(),
        model: Model::Forest(ForestModel::new(trees, x.width(), x.classes())),
    })
}

struct TreeBuilder<'a> {
    x: &'a FeatureMatrix,
    rng: Pcg32,
    max_depth: usize,
    min_samples_split: usize,
    features_per_split: usize,
    nodes: Vec<Node>,
    features: Vec<usize>,
    sorted: Vec<(f64, usize)>,
}

struct Candidate {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl<'a> TreeBuilder<'a> {
    fn new(x: &'a FeatureMatrix, config: &TrainConfig, tree_index: u64) -> TreeBuilder<'a> {
        let p = &config.forest;
        TreeBuilder {
            x,
            rng: Pcg32::new(config.seed, tree_index),
            max_depth: p.max_depth,
            min_samples_split: p.min_samples_split,
            features_per_split: p.features_per_split.min(x.width()),
            nodes: Vec::new(),
            features: (0..x.width()).collect(),
            sorted: Vec::new(),
        }
    }

    fn build(mut self) -> Tree {
        let n = self.x.rows();
        let mut sample: Vec<usize> = (0..n).map(|_| self.rng.index(n)).collect();
        self.grow(&mut sample, 0);
        Tree { nodes: self.nodes }
    }

    fn class_counts(&self, rows: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.x.classes()];
        for &i in rows {
            counts[self.x.labels()[i]] += 1;
        }
        counts
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let counts = self.class_counts(rows);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let id = self.nodes.len();
        if depth >= self.max_depth || rows.len() < self.min_samples_split || pure {
            self.nodes.push(leaf(&counts, rows.len()));
            return id;
        }
        let Some(best) = self.best_split(rows, &counts) else {
            self.nodes.push(leaf(&counts, rows.len()));
            return id;
        };
        // placeholder until the children exist
        self.nodes.push(Node::Leaf { distribution: Vec::new() });
        let mut cut = 0;
        for i in 0..rows.len() {
            if self.x.row(rows[i])[best.feature] <= best.threshold {
                rows.swap(i, cut);
                cut += 1;
            }
        }
        let (l, r) = rows.split_at_mut(cut);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    fn best_split(&mut self, rows: &[usize], counts: &[usize]) -> Option<Candidate> {
        let d = self.features.len();
        for i in 0..self.features_per_split {
            let j = i + self.rng.index(d - i);
            self.features.swap(i, j);
        }
        let mut chosen = self.features[..self.features_per_split].to_vec();
        chosen.sort_unstable();

        let n = rows.len();
        let total_sq: u64 = counts.iter().map(|&c| (c * c) as u64).sum();
        let mut best: Option<Candidate> = None;
        let mut left = vec![0usize; counts.len()];
        let mut right = vec![0usize; counts.len()];
        for feature in chosen {
            self.sorted.clear();
            self.sorted.extend(rows.iter().map(|&i| (self.x.row(i)[feature], self.x.labels()[i])));
            self.sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            if self.sorted[0].0 == self.sorted[n - 1].0 {
                continue;
            }
            left.iter_mut().for_each(|c| *c = 0);
            right.copy_from_slice(counts);
            let (mut sq_left, mut sq_right) = (0u64, total_sq);
            for i in 0..n - 1 {
                let class = self.sorted[i].1;
                sq_left += 2 * left[class] as u64 + 1;
                left[class] += 1;
                sq_right -= 2 * right[class] as u64 - 1;
                right[class] -= 1;
                let (v, next) = (self.sorted[i].0, self.sorted[i + 1].0);
                if v == next {
                    continue;
                }
                // weighted Gini is (n - sq_l/n_l - sq_r/n_r) / n, so maximize the sum
                let (nl, nr) = ((i + 1) as f64, (n - i - 1) as f64);
                let score = sq_left as f64 / nl + sq_right as f64 / nr;
                if best.as_ref().is_none_or(|b| score > b.score) {
                    let mid = 0.5 * (v + next);
                    let threshold = if mid < next { mid } else { v };
                    best = Some(Candidate {
                        feature,
                        threshold,
                        score,
                    });
                }
            }
        }
        best
    }
}

fn leaf(counts: &[usize], n: usize) -> Node {
    let n = n as f64;
    Node::Leaf {
        distribution: counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k, c as f64 / n))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{predict, predict_proba, ModelKind};

    fn xor(copies: usize) -> FeatureMatrix {
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..copies {
            for (a, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
                rows.push(vec![a, b]);
                labels.push((a != b) as usize);
            }
        }
        FeatureMatrix::from_rows(&rows, labels, 2).unwrap()
    }

    fn config(trees: usize, depth: usize) -> TrainConfig {
        let mut c = TrainConfig::new(ModelKind::Forest, 11);
        c.forest.n_trees = trees;
        c.forest.max_depth = depth;
        c.forest.features_per_split = 2;
        c
    }

    fn accuracy(pred: &[usize], truth: &[usize]) -> f64 {
        pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
    }

    /// Best accuracy of any depth-1 stump: every column, every midpoint,
    /// every labelling of the two sides.
    fn best_stump_accuracy(x: &FeatureMatrix) -> f64 {
        let mut best: f64 = 0.0;
        for f in 0..x.width() {
            let mut values: Vec<f64> = (0..x.rows()).map(|i| x.row(i)[f]).collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            for w in values.windows(2) {
                let t = 0.5 * (w[0] + w[1]);
                for lc in 0..x.classes() {
                    for rc in 0..x.classes() {
                        let pred: Vec<usize> = (0..x.rows()).map(|i| if x.row(i)[f] <= t { lc } else { rc }).collect();
                        best = best.max(accuracy(&pred, x.labels()));
                    }
                }
            }
        }
        best
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[5, 5]), 0.5);
        assert_eq!(gini(&[10, 0]), 0.0);
    }

    #[test]
    fn single_class_data() {
        let x = FeatureMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]], vec![2, 2, 2], 4).unwrap();
        let m = train_forest(&x, &config(3, 5)).unwrap();
        assert_eq!(predict(&m, &x).unwrap(), vec![2, 2, 2]);
        let p = predict_proba(&m, &x).unwrap();
        assert_eq!(p.row(0), &[0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn xor_needs_depth_two() {
        let x = xor(10);
        let deep = train_forest(&x, &config(1, 2)).unwrap();
        assert_eq!(accuracy(&predict(&deep, &x).unwrap(), x.labels()), 1.0);

        let oracle = best_stump_accuracy(&x);
        assert!(oracle <= 0.75);
        let stump = train_forest(&x, &config(1, 1)).unwrap();
        assert!(accuracy(&predict(&stump, &x).unwrap(), x.labels()) <= oracle);
    }

    #[test]
    fn trees_respect_depth_and_normalize() {
        let mut rng = Pcg32::new(2, 2);
        let rows: Vec<Vec<f64>> = (0..200).map(|_| (0..4).map(|_| rng.next_unit()).collect()).collect();
        let labels = (0..200).map(|_| rng.index(5)).collect();
        let x = FeatureMatrix::from_rows(&rows, labels, 5).unwrap();
        let m = train_forest(&x, &config(5, 3)).unwrap();
        let Model::Forest(f) = &m.model else { unreachable!() };
        for tree in &f.trees {
            assert!(tree.depth() <= 3);
            for node in &tree.nodes {
                match node {
                    Node::Split { left, right, .. } => assert!(*left < tree.nodes.len() && *right < tree.nodes.len()),
                    Node::Leaf { distribution } => {
                        assert!((distribution.iter().map(|d| d.1).sum::<f64>() - 1.0).abs() < 1e-12)
                    }
                }
            }
        }
        let p = predict_proba(&m, &x).unwrap();
        for i in 0..x.rows() {
            assert!((p.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn identical_trees_vote_like_one() {
        let x = xor(5);
        let m = train_forest(&x, &config(1, 2)).unwrap();
        let Model::Forest(f) = &m.model else { unreachable!() };
        let many = TrainedModel {
            config: m.config.clone(),
            model: Model::Forest(ForestModel::new(vec![f.trees[0].clone(); 7], 2, 2)),
        };
        assert_eq!(predict(&many, &x).unwrap(), predict(&m, &x).unwrap());
    }

    #[test]
    fn parallel_matches_sequential() {
        let x = xor(8);
        let c = config(16, 4);
        let seq = train_forest_with(&x, &c, Parallelism::Sequential).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let par = pool.install(|| train_forest_with(&x, &c, Parallelism::Rayon)).unwrap();
        assert_eq!(seq, par);
    }
}
