//! Symmetry rules: centred singles, mirror pairs, pose and facing-direction
//! symmetry, divergence from exact reflection, and the thresholding that
//! turns divergences into (a)symmetry hypotheses.

mod config;
mod divergence;
mod pairing;
mod pose;

pub use config::{ConfigError, SymmetryConfig, DEFAULT_JOINT_PAIRS};
pub use divergence::{pair_divergence, DivergenceRecord};
pub use pairing::{check_centered, propose_pairs, CenteredElement, PairingResult, SymmetryPair};
pub use pose::{
    facing_symmetry, lateral_partner, person_center, pose_pair_symmetry, pose_self_symmetry,
    torso_scale, BodyPart, JointDivergence, PoseSymmetryReport, Subject,
};

use thiserror::Error;

use crate::geometry::Side;

#[derive(Debug, Error, PartialEq)]
pub enum SymmetryError {
    #[error("pair ({left}, {right}) is not left/right of the axis (found {found:?})")]
    Side {
        left: String,
        right: String,
        found: (Side, Side),
    },
    #[error("no configured joint pair is complete for {0}")]
    MissingJoints(String),
}

/// Index of a hypothesis inside the pair or single list it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    Pair(usize),
    Single(usize),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StructurePartition {
    pub symmetric: Vec<Hypothesis>,
    pub non_symmetric: Vec<Hypothesis>,
}

pub fn is_symmetric_pair(p: &SymmetryPair, cfg: &SymmetryConfig) -> bool {
    p.divergence.mean <= cfg.divergence_threshold
        && p.perceptual_similarity
            .is_none_or(|s| s >= cfg.similarity_threshold)
}

pub fn is_symmetric_single(s: &CenteredElement, cfg: &SymmetryConfig) -> bool {
    s.divergence.mean <= cfg.divergence_threshold
}

/// Thresholds mean divergence (and perceptual similarity where present)
/// into an exhaustive, exclusive symmetric / non-symmetric partition.
pub fn classify_structure(
    pairs: &[SymmetryPair],
    singles: &[CenteredElement],
    cfg: &SymmetryConfig,
) -> StructurePartition {
    let mut out = StructurePartition::default();
    for (i, p) in pairs.iter().enumerate() {
        let bucket = if is_symmetric_pair(p, cfg) {
            &mut out.symmetric
        } else {
            &mut out.non_symmetric
        };
        bucket.push(Hypothesis::Pair(i));
    }
    for (i, s) in singles.iter().enumerate() {
        let bucket = if is_symmetric_single(s, cfg) {
            &mut out.symmetric
        } else {
            &mut out.non_symmetric
        };
        bucket.push(Hypothesis::Single(i));
    }
    out
}
