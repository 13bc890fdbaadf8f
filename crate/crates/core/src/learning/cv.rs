use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    ClassifierLearner, FeatureSelection, LabeledExample, LearningError, RegressorLearner,
    TreeClassifierLearner, TreeRegressorLearner,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub size: usize,
    pub accuracy: f64,
    pub symmetry_mse: f64,
    pub per_class_prob_mse: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub features: FeatureSelection,
    pub classifier: String,
    pub regressor: String,
    pub folds: usize,
    pub seed: u64,
    pub examples: usize,
    /// Mean of per-fold accuracies.
    pub classification_accuracy: f64,
    /// Mean of per-fold squared error of the predicted mean symmetry.
    pub avg_symmetry_mse: f64,
    /// Mean of `per_class_prob_mse`.
    pub class_prob_mse: f64,
    /// Per class, mean of per-fold squared error of predicted probability.
    pub per_class_prob_mse: [f64; 4],
    /// Fold index of each example, in input order.
    pub fold_assignments: Vec<usize>,
    pub per_fold: Vec<FoldReport>,
}

impl EvalReport {
    pub fn summary(&self) -> String {
        format!(
            "features={} folds={} seed={} n={} CA={:.2}% avg_sym_mse={:.4} class_prob_mse={:.4}",
            self.features,
            self.folds,
            self.seed,
            self.examples,
            self.classification_accuracy * 100.0,
            self.avg_symmetry_mse,
            self.class_prob_mse
        )
    }

    pub fn to_json(&self) -> String {
        crate::descriptor::to_json_pretty(self)
    }
}

/// Seeded shuffle dealt round-robin into `k` folds, so sizes differ by at
/// most one.
pub fn fold_assignments(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        folds[i] = pos % k;
    }
    folds
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

pub fn cross_validate(
    examples: &[LabeledExample],
    sel: FeatureSelection,
    k: usize,
    seed: u64,
) -> Result<EvalReport, LearningError> {
    cross_validate_with(
        examples,
        sel,
        k,
        seed,
        &TreeClassifierLearner,
        &TreeRegressorLearner,
    )
}

/// k-fold evaluation of a classifier and a regressor. Folds are trained in
/// parallel; results are reduced in fold order.
pub fn cross_validate_with(
    examples: &[LabeledExample],
    sel: FeatureSelection,
    k: usize,
    seed: u64,
    classifier: &dyn ClassifierLearner,
    regressor: &dyn RegressorLearner,
) -> Result<EvalReport, LearningError> {
    if k < 2 || examples.len() < k {
        return Err(LearningError::TooFewExamples {
            k,
            n: examples.len(),
        });
    }
    let x: Vec<Vec<f64>> = examples
        .iter()
        .map(|e| e.features.select(sel))
        .collect::<Result<_, _>>()?;
    let assignments = fold_assignments(examples.len(), k, seed);

    let per_fold: Vec<FoldReport> = (0..k)
        .into_par_iter()
        .map(|fold| -> Result<FoldReport, LearningError> {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..examples.len()).partition(|&i| assignments[i] == fold);
            let tx: Vec<Vec<f64>> = train.iter().map(|&i| x[i].clone()).collect();
            let ty: Vec<_> = train.iter().map(|&i| examples[i].class).collect();
            let tr: Vec<f64> = train.iter().map(|&i| examples[i].mean_symmetry).collect();
            let fold_seed = seed.wrapping_add(fold as u64);
            let c = classifier.fit(&tx, &ty, fold_seed)?;
            let r = regressor.fit(&tx, &tr, fold_seed)?;

            let accuracy = mean(
                test.iter()
                    .map(|&i| f64::from(u8::from(c.predict(&x[i]) == examples[i].class))),
            );
            let symmetry_mse = mean(
                test.iter()
                    .map(|&i| (r.predict(&x[i]) - examples[i].mean_symmetry).powi(2)),
            );
            let probs: Vec<[f64; 4]> = test.iter().map(|&i| c.predict_proba(&x[i])).collect();
            let mut per_class_prob_mse = [0.0; 4];
            for (cls, slot) in per_class_prob_mse.iter_mut().enumerate() {
                *slot = mean(
                    test.iter()
                        .zip(&probs)
                        .map(|(&i, p)| (p[cls] - examples[i].class_probabilities[cls]).powi(2)),
                );
            }
            Ok(FoldReport {
                fold,
                size: test.len(),
                accuracy,
                symmetry_mse,
                per_class_prob_mse,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut per_class_prob_mse = [0.0; 4];
    for (cls, slot) in per_class_prob_mse.iter_mut().enumerate() {
        *slot = mean(per_fold.iter().map(|f| f.per_class_prob_mse[cls]));
    }
    Ok(EvalReport {
        features: sel,
        classifier: classifier.name().to_string(),
        regressor: regressor.name().to_string(),
        folds: k,
        seed,
        examples: examples.len(),
        classification_accuracy: mean(per_fold.iter().map(|f| f.accuracy)),
        avg_symmetry_mse: mean(per_fold.iter().map(|f| f.symmetry_mse)),
        class_prob_mse: mean(per_class_prob_mse.iter().copied()),
        per_class_prob_mse,
        fold_assignments: assignments,
        per_fold,
    })
}
