use serde::{Deserialize, Serialize};

use super::{LearningError, SymmetryClass};

pub const MAX_DEPTH: usize = 6;

pub trait Classifier: Send + Sync {
    /// Per-class probabilities in [`SymmetryClass::ALL`] order.
    fn predict_proba(&self, x: &[f64]) -> [f64; 4];

    /// Most probable class; ties go to the lower class.
    fn predict(&self, x: &[f64]) -> SymmetryClass {
        let p = self.predict_proba(x);
        let mut best = 0;
        for i in 1..4 {
            if p[i] > p[best] {
                best = i;
            }
        }
        SymmetryClass::from_index(best)
    }
}

pub trait Regressor: Send + Sync {
    /// Predicted mean symmetry, clipped to [0, 1].
    fn predict(&self, x: &[f64]) -> f64;
}

pub trait ClassifierLearner: Send + Sync {
    fn name(&self) -> &str;
    fn fit(
        &self,
        x: &[Vec<f64>],
        y: &[SymmetryClass],
        seed: u64,
    ) -> Result<Box<dyn Classifier>, LearningError>;
}

pub trait RegressorLearner: Send + Sync {
    fn name(&self) -> &str;
    fn fit(
        &self,
        x: &[Vec<f64>],
        y: &[f64],
        seed: u64,
    ) -> Result<Box<dyn Regressor>, LearningError>;
}

trait SplitStats: Clone {
    fn add(&mut self, i: usize);
    fn remove(&mut self, i: usize);
    /// Node size times node impurity.
    fn cost(&self) -> f64;
}

#[derive(Clone)]
struct GiniStats<'a> {
    y: &'a [SymmetryClass],
    counts: [f64; 4],
    n: f64,
}

impl GiniStats<'_> {
    fn probabilities(&self) -> [f64; 4] {
        self.counts.map(|c| c / self.n)
    }
}

#[derive(Clone)]
struct SseStats<'a> {
    y: &'a [f64],
    sum: f64,
    sum_sq: f64,
    n: f64,
}

impl SplitStats for GiniStats<'_> {
    fn add(&mut self, i: usize) {
        self.counts[self.y[i].index()] += 1.0;
        self.n += 1.0;
    }

    fn remove(&mut self, i: usize) {
        self.counts[self.y[i].index()] -= 1.0;
        self.n -= 1.0;
    }

    fn cost(&self) -> f64 {
        if self.n == 0.0 {
            return 0.0;
        }
        self.n - self.counts.iter().map(|c| c * c).sum::<f64>() / self.n
    }
}

impl SplitStats for SseStats<'_> {
    fn add(&mut self, i: usize) {
        self.sum += self.y[i];
        self.sum_sq += self.y[i] * self.y[i];
        self.n += 1.0;
    }

    fn remove(&mut self, i: usize) {
        self.sum -= self.y[i];
        self.sum_sq -= self.y[i] * self.y[i];
        self.n -= 1.0;
    }

    fn cost(&self) -> f64 {
        if self.n == 0.0 {
            return 0.0;
        }
        (self.sum_sq - self.sum * self.sum / self.n).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node<L> {
    Leaf(L),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

fn route<'a, L>(nodes: &'a [Node<L>], x: &[f64]) -> &'a L {
    let mut at = 0;
    loop {
        match &nodes[at] {
            Node::Leaf(l) => return l,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                at = if x[*feature] <= *threshold {
                    *left
                } else {
                    *right
                }
            }
        }
    }
}

/// Best axis-aligned split of `idx`; `None` if no split lowers the cost.
/// Candidates are scanned by feature then threshold and only a strictly
/// lower cost replaces the incumbent, so the result is order-stable.
// `f` indexes the inner rows, not `x`
#[allow(clippy::needless_range_loop)]
fn best_split<S: SplitStats>(x: &[Vec<f64>], idx: &[usize], all: &S) -> Option<(usize, f64)> {
    let dims = x[idx[0]].len();
    let parent = all.cost();
    let mut best: Option<(usize, f64, f64)> = None;
    let mut sorted = idx.to_vec();
    for f in 0..dims {
        sorted.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
        let mut left = all.clone();
        for &i in &sorted {
            left.remove(i);
        }
        let mut right = all.clone();
        for w in 0..sorted.len() - 1 {
            let i = sorted[w];
            left.add(i);
            right.remove(i);
            let (lo, hi) = (x[i][f], x[sorted[w + 1]][f]);
            if lo == hi {
                continue;
            }
            let cost = left.cost() + right.cost();
            if cost < parent - 1e-12 && best.is_none_or(|(_, _, c)| cost < c - 1e-12) {
                best = Some((f, lo + (hi - lo) / 2.0, cost));
            }
        }
    }
    best.map(|(f, t, _)| (f, t))
}

fn grow<S: SplitStats, L>(
    x: &[Vec<f64>],
    idx: Vec<usize>,
    depth: usize,
    stats_of: &impl Fn(&[usize]) -> S,
    leaf_of: &impl Fn(&S, &[usize]) -> L,
    nodes: &mut Vec<Node<L>>,
) -> usize {
    let stats = stats_of(&idx);
    let at = nodes.len();
    nodes.push(Node::Leaf(leaf_of(&stats, &idx)));
    if depth >= MAX_DEPTH || idx.len() < 2 || stats.cost() <= 1e-12 {
        return at;
    }
    let Some((feature, threshold)) = best_split(x, &idx, &stats) else {
        return at;
    };
    let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| x[i][feature] <= threshold);
    let left = grow(x, l, depth + 1, stats_of, leaf_of, nodes);
    let right = grow(x, r, depth + 1, stats_of, leaf_of, nodes);
    nodes[at] = Node::Split {
        feature,
        threshold,
        left,
        right,
    };
    at
}

/// CART classifier: Gini splits, depth cap [`MAX_DEPTH`], leaf class
/// frequencies as probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTreeClassifier {
    nodes: Vec<Node<[f64; 4]>>,
}

impl DecisionTreeClassifier {
    pub fn fit(x: &[Vec<f64>], y: &[SymmetryClass]) -> Result<Self, LearningError> {
        if x.is_empty() || x.len() != y.len() {
            return Err(LearningError::EmptyTrainingSet);
        }
        let stats_of = |idx: &[usize]| {
            let mut s = GiniStats {
                y,
                counts: [0.0; 4],
                n: 0.0,
            };
            idx.iter().for_each(|&i| s.add(i));
            s
        };
        let mut nodes = Vec::new();
        grow(
            x,
            (0..x.len()).collect(),
            0,
            &stats_of,
            &|s: &GiniStats, _: &[usize]| s.probabilities(),
            &mut nodes,
        );
        Ok(Self { nodes })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

impl Classifier for DecisionTreeClassifier {
    fn predict_proba(&self, x: &[f64]) -> [f64; 4] {
        *route(&self.nodes, x)
    }
}

/// Regression tree: squared-error splits, depth cap [`MAX_DEPTH`], leaf
/// mean as prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    nodes: Vec<Node<f64>>,
}

impl RegressionTree {
    pub fn fit(x: &[Vec<f64>], y: &[f64]) -> Result<Self, LearningError> {
        if x.is_empty() || x.len() != y.len() {
            return Err(LearningError::EmptyTrainingSet);
        }
        let stats_of = |idx: &[usize]| {
            let mut s = SseStats {
                y,
                sum: 0.0,
                sum_sq: 0.0,
                n: 0.0,
            };
            idx.iter().for_each(|&i| s.add(i));
            s
        };
        let mut nodes = Vec::new();
        // A pure leaf returns its target exactly rather than a rounded mean.
        let leaf = |s: &SseStats, idx: &[usize]| {
            let first = y[idx[0]];
            if idx.iter().all(|&i| y[i] == first) {
                first
            } else {
                s.sum / s.n
            }
        };
        grow(x, (0..x.len()).collect(), 0, &stats_of, &leaf, &mut nodes);
        Ok(Self { nodes })
    }
}

impl Regressor for RegressionTree {
    fn predict(&self, x: &[f64]) -> f64 {
        route(&self.nodes, x).clamp(0.0, 1.0)
    }
}

/// Always predicts the training class frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorityClassifier {
    probabilities: [f64; 4],
}

impl MajorityClassifier {
    pub fn fit(y: &[SymmetryClass]) -> Result<Self, LearningError> {
        if y.is_empty() {
            return Err(LearningError::EmptyTrainingSet);
        }
        let mut p = [0.0; 4];
        for c in y {
            p[c.index()] += 1.0;
        }
        Ok(Self {
            probabilities: p.map(|c| c / y.len() as f64),
        })
    }
}

impl Classifier for MajorityClassifier {
    fn predict_proba(&self, _x: &[f64]) -> [f64; 4] {
        self.probabilities
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TreeClassifierLearner;

impl ClassifierLearner for TreeClassifierLearner {
    fn name(&self) -> &str {
        "decision_tree"
    }

    fn fit(
        &self,
        x: &[Vec<f64>],
        y: &[SymmetryClass],
        _seed: u64,
    ) -> Result<Box<dyn Classifier>, LearningError> {
        Ok(Box::new(DecisionTreeClassifier::fit(x, y)?))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TreeRegressorLearner;

impl RegressorLearner for TreeRegressorLearner {
    fn name(&self) -> &str {
        "regression_tree"
    }

    fn fit(
        &self,
        x: &[Vec<f64>],
        y: &[f64],
        _seed: u64,
    ) -> Result<Box<dyn Regressor>, LearningError> {
        Ok(Box::new(RegressionTree::fit(x, y)?))
    }
}

impl ClassifierLearner for MajorityClassifier {
    fn name(&self) -> &str {
        "majority"
    }

    fn fit(
        &self,
        _x: &[Vec<f64>],
        y: &[SymmetryClass],
        _seed: u64,
    ) -> Result<Box<dyn Classifier>, LearningError> {
        Ok(Box::new(MajorityClassifier::fit(y)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use SymmetryClass::*;

    #[test]
    fn single_class_predicts_it_with_certainty() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        let t = DecisionTreeClassifier::fit(&x, &[Symmetric; 3]).unwrap();
        assert_eq!(t.predict(&[5.0]), Symmetric);
        assert_eq!(t.predict_proba(&[-5.0]), [0.0, 0.0, 1.0, 0.0]);
        assert_eq!(t.node_count(), 1);
    }

    #[test]
    fn separable_two_class_set_is_fit_exactly() {
        let x: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 7) as f64, i as f64 * 0.1])
            .collect();
        let y: Vec<SymmetryClass> = x
            .iter()
            .map(|v| {
                if v[1] > 1.95 {
                    HighlySymmetric
                } else {
                    NotSymmetric
                }
            })
            .collect();
        let t = DecisionTreeClassifier::fit(&x, &y).unwrap();
        assert!(x.iter().zip(&y).all(|(v, c)| t.predict(v) == *c));
    }

    #[test]
    fn empty_training_set() {
        assert!(matches!(
            DecisionTreeClassifier::fit(&[], &[]),
            Err(LearningError::EmptyTrainingSet)
        ));
        assert!(matches!(
            RegressionTree::fit(&[], &[]),
            Err(LearningError::EmptyTrainingSet)
        ));
        assert!(MajorityClassifier::fit(&[]).is_err());
    }

    #[test]
    fn constant_target_regression() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let t = RegressionTree::fit(&x, &[0.37; 10]).unwrap();
        assert_eq!(t.predict(&[3.0]), 0.37);
        assert_eq!(t.predict(&[-100.0]), 0.37);
    }

    #[test]
    fn regression_learns_step() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..20).map(|i| if i < 10 { 0.2 } else { 0.8 }).collect();
        let t = RegressionTree::fit(&x, &y).unwrap();
        assert_eq!(t.predict(&[3.0]), 0.2);
        assert_eq!(t.predict(&[15.0]), 0.8);
    }

    #[test]
    fn depth_is_capped() {
        // Alternating labels along one axis need one split per point.
        let x: Vec<Vec<f64>> = (0..200).map(|i| vec![i as f64]).collect();
        let y: Vec<SymmetryClass> = (0..200)
            .map(|i| if i % 2 == 0 { NotSymmetric } else { Symmetric })
            .collect();
        let t = DecisionTreeClassifier::fit(&x, &y).unwrap();
        assert!(t.node_count() < 2usize.pow(MAX_DEPTH as u32 + 1));
    }

    #[test]
    fn majority_predicts_frequencies() {
        let m = MajorityClassifier::fit(&[Symmetric, Symmetric, NotSymmetric, HighlySymmetric])
            .unwrap();
        assert_eq!(m.predict_proba(&[]), [0.25, 0.0, 0.5, 0.25]);
        assert_eq!(m.predict(&[]), Symmetric);
    }

    proptest! {
        #[test]
        fn probabilities_sum_to_one(
            rows in proptest::collection::vec((proptest::collection::vec(-5.0..5.0f64, 3), 0usize..4), 1..60),
            probe in proptest::collection::vec(-10.0..10.0f64, 3),
        ) {
            let x: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
            let y: Vec<SymmetryClass> = rows.iter().map(|r| SymmetryClass::from_index(r.1)).collect();
            let t = DecisionTreeClassifier::fit(&x, &y).unwrap();
            let p = t.predict_proba(&probe);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            prop_assert_eq!(t.clone(), DecisionTreeClassifier::fit(&x, &y).unwrap());
        }

        #[test]
        fn regression_stays_in_unit_interval(
            rows in proptest::collection::vec((proptest::collection::vec(-5.0..5.0f64, 2), -0.5..1.5f64), 1..40),
            probe in proptest::collection::vec(-100.0..100.0f64, 2),
        ) {
            let x: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
            let y: Vec<f64> = rows.iter().map(|r| r.1).collect();
            let p = RegressionTree::fit(&x, &y).unwrap().predict(&probe);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
