//! Image-level feature sets and the classification / regression harness
//! that predicts human symmetry judgements from them.
//!
//! * fs1: cosine similarity of the left half and the mirrored right half of
//!   the image on each configured network layer.
//! * fs2: symmetry aggregates over patches.
//! * fs3: symmetry aggregates over objects and people, plus pose counts.

mod cv;
mod features;
mod io;
mod tree;

pub use cv::{cross_validate, cross_validate_with, fold_assignments, EvalReport, FoldReport};
pub use features::{
    assemble_features, assemble_fs1, assemble_fs2, assemble_fs3, FS2_NAMES, FS3_NAMES,
};
pub use io::{
    join_labels, read_counts_csv, read_feature_csv, read_labels_csv, write_feature_csv, HumanLabel,
    FEATURE_LAYOUT_LINE,
};
pub use tree::{
    Classifier, ClassifierLearner, DecisionTreeClassifier, MajorityClassifier, RegressionTree,
    Regressor, RegressorLearner, TreeClassifierLearner, TreeRegressorLearner, MAX_DEPTH,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::similarity::SimilarityError;

pub const DEFAULT_FS1_LAYERS: [&str; 5] = ["conv1", "conv2", "conv3", "conv4", "conv5"];

#[derive(Debug, Error)]
pub enum LearningError {
    #[error("image `{image}`: {source}")]
    Fs1 {
        image: String,
        #[source]
        source: SimilarityError,
    },
    #[error("image `{image}` has no half features for layer `{layer}`")]
    MissingLayer { image: String, layer: String },
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("{k}-fold cross validation needs k ≥ 2 and at least k examples, got {n}")]
    TooFewExamples { k: usize, n: usize },
    #[error("image `{image}` lacks feature set {set}")]
    MissingFeatureSet { image: String, set: &'static str },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
    #[error("unknown symmetry class `{0}`")]
    UnknownClass(String),
    #[error("no label for image `{0}`")]
    UnlabelledImage(String),
}

/// The four ordered judgement classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    NotSymmetric,
    SomewhatSymmetric,
    Symmetric,
    HighlySymmetric,
}

impl SymmetryClass {
    pub const ALL: [SymmetryClass; 4] = [
        SymmetryClass::NotSymmetric,
        SymmetryClass::SomewhatSymmetric,
        SymmetryClass::Symmetric,
        SymmetryClass::HighlySymmetric,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> SymmetryClass {
        Self::ALL[i]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryClass::NotSymmetric => "not_symmetric",
            SymmetryClass::SomewhatSymmetric => "somewhat_symmetric",
            SymmetryClass::Symmetric => "symmetric",
            SymmetryClass::HighlySymmetric => "highly_symmetric",
        }
    }

    pub fn one_hot(self) -> [f64; 4] {
        let mut p = [0.0; 4];
        p[self.index()] = 1.0;
        p
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SymmetryClass {
    type Err = LearningError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| LearningError::UnknownClass(s.to_string()))
    }
}

/// Which feature sets a vector carries, and which of them came from an
/// empty scope (and so hold sentinel zeros).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureMask {
    pub fs1: bool,
    pub fs2: bool,
    pub fs3: bool,
    pub fs2_empty: bool,
    pub fs3_empty: bool,
    pub fs3_no_pose: bool,
}

impl fmt::Display for FeatureMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flags = [
            (self.fs1, "fs1"),
            (self.fs2, "fs2"),
            (self.fs3, "fs3"),
            (self.fs2_empty, "fs2_empty"),
            (self.fs3_empty, "fs3_empty"),
            (self.fs3_no_pose, "fs3_no_pose"),
        ];
        let on: Vec<&str> = flags.iter().filter(|(b, _)| *b).map(|(_, n)| *n).collect();
        f.write_str(&on.join("|"))
    }
}

impl FromStr for FeatureMask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut m = FeatureMask::default();
        for flag in s.split('|').filter(|f| !f.is_empty()) {
            match flag {
                "fs1" => m.fs1 = true,
                "fs2" => m.fs2 = true,
                "fs3" => m.fs3 = true,
                "fs2_empty" => m.fs2_empty = true,
                "fs3_empty" => m.fs3_empty = true,
                "fs3_no_pose" => m.fs3_no_pose = true,
                other => return Err(format!("unknown mask flag `{other}`")),
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub image_id: String,
    pub fs1: Option<Vec<f64>>,
    pub fs2: Option<Vec<f64>>,
    pub fs3: Option<Vec<f64>>,
    pub mask: FeatureMask,
}

impl FeatureVector {
    /// Concatenates the sets named by `sel`; fails if one is absent.
    pub fn select(&self, sel: FeatureSelection) -> Result<Vec<f64>, LearningError> {
        let mut out = Vec::new();
        let sets: [(&Option<Vec<f64>>, &'static str, bool); 3] = [
            (&self.fs1, "fs1", true),
            (&self.fs2, "fs2", sel >= FeatureSelection::Fs12),
            (&self.fs3, "fs3", sel >= FeatureSelection::Fs123),
        ];
        for (set, name, wanted) in sets {
            if !wanted {
                continue;
            }
            let values = set
                .as_ref()
                .ok_or_else(|| LearningError::MissingFeatureSet {
                    image: self.image_id.clone(),
                    set: name,
                })?;
            out.extend_from_slice(values);
        }
        Ok(out)
    }
}

/// Cumulative feature-set choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureSelection {
    #[serde(rename = "fs1")]
    Fs1,
    #[serde(rename = "fs1+2")]
    Fs12,
    #[serde(rename = "fs1+2+3")]
    Fs123,
}

impl fmt::Display for FeatureSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureSelection::Fs1 => "fs1",
            FeatureSelection::Fs12 => "fs1+2",
            FeatureSelection::Fs123 => "fs1+2+3",
        })
    }
}

impl FromStr for FeatureSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fs1" => Ok(FeatureSelection::Fs1),
            "fs1+2" => Ok(FeatureSelection::Fs12),
            "fs1+2+3" => Ok(FeatureSelection::Fs123),
            other => Err(format!("expected fs1, fs1+2 or fs1+2+3, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: FeatureVector,
    pub class: SymmetryClass,
    pub mean_symmetry: f64,
    pub response_variance: f64,
    /// Per-class response shares; one-hot of `class` when raw counts were
    /// not supplied.
    pub class_probabilities: [f64; 4],
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv() -> FeatureVector {
        FeatureVector {
            image_id: "x".into(),
            fs1: Some(vec![1.0; 5]),
            fs2: Some(vec![2.0; 9]),
            fs3: None,
            mask: FeatureMask {
                fs1: true,
                fs2: true,
                ..Default::default()
            },
        }
    }

    #[test]
    fn selection_concatenates_in_order() {
        assert_eq!(fv().select(FeatureSelection::Fs1).unwrap().len(), 5);
        let v = fv().select(FeatureSelection::Fs12).unwrap();
        assert_eq!((v.len(), v[4], v[5]), (14, 1.0, 2.0));
        assert!(matches!(
            fv().select(FeatureSelection::Fs123),
            Err(LearningError::MissingFeatureSet { set: "fs3", .. })
        ));
    }

    #[test]
    fn names_round_trip() {
        for c in SymmetryClass::ALL {
            assert_eq!(c.as_str().parse::<SymmetryClass>().unwrap(), c);
        }
        for s in ["fs1", "fs1+2", "fs1+2+3"] {
            assert_eq!(s.parse::<FeatureSelection>().unwrap().to_string(), s);
        }
        let m = FeatureMask {
            fs1: true,
            fs3: true,
            fs3_no_pose: true,
            ..Default::default()
        };
        assert_eq!(m.to_string(), "fs1|fs3|fs3_no_pose");
        assert_eq!(m.to_string().parse::<FeatureMask>().unwrap(), m);
        assert_eq!("".parse::<FeatureMask>().unwrap(), FeatureMask::default());
    }
}
