use serde::{Deserialize, Serialize};

use super::{pair_divergence, DivergenceRecord, SymmetryConfig};
use crate::descriptor::{ElementDescriptor, ElementKind};
use crate::geometry::{orientation, rel_pos, Side, SymmetryAxis};

/// Two elements on opposite sides of the axis proposed as mirror partners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryPair {
    pub kind: ElementKind,
    pub left_id: String,
    pub right_id: String,
    pub divergence: DivergenceRecord,
    #[serde(default)]
    pub perceptual_similarity: Option<f64>,
    #[serde(default)]
    pub semantic_similarity: Option<f64>,
    #[serde(default)]
    pub unmirrored: bool,
    #[serde(default)]
    pub symmetric: bool,
}

impl SymmetryPair {
    pub fn ids(&self) -> [&str; 2] {
        [&self.left_id, &self.right_id]
    }

    pub fn involves(&self, id: &str) -> bool {
        self.left_id == id || self.right_id == id
    }
}

/// An element whose centre lies on the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteredElement {
    pub kind: ElementKind,
    pub element_id: String,
    pub divergence: DivergenceRecord,
    #[serde(default)]
    pub symmetric: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairingResult {
    pub pairs: Vec<SymmetryPair>,
    pub singles: Vec<CenteredElement>,
    pub unmatched: Vec<String>,
}

pub fn check_centered(
    e: &ElementDescriptor,
    axis: &SymmetryAxis,
    cfg: &SymmetryConfig,
) -> Option<CenteredElement> {
    let eps = cfg.on_eps_fraction * axis.image_width;
    if orientation(&e.bbox, axis, eps) != Side::On {
        return None;
    }
    let offset = rel_pos(&e.bbox, axis).axis_distance.abs() / axis.image_width;
    Some(CenteredElement {
        kind: e.kind,
        element_id: e.id.clone(),
        divergence: DivergenceRecord::position_only(offset),
        symmetric: false,
    })
}

struct Candidate {
    left: usize,
    right: usize,
    divergence: DivergenceRecord,
}

/// Splits elements into centred singles, mirror pairs, and the rest.
///
/// Pairs are formed within one element kind. Every (left, right) candidate
/// whose mean divergence is at most twice the divergence threshold is
/// ranked by mean divergence, ties broken by `(left_id, right_id)`, and
/// accepted greedily while both endpoints are still free.
pub fn propose_pairs(
    elements: &[ElementDescriptor],
    axis: &SymmetryAxis,
    cfg: &SymmetryConfig,
) -> PairingResult {
    let eps = cfg.on_eps_fraction * axis.image_width;
    let sides: Vec<Side> = elements
        .iter()
        .map(|e| orientation(&e.bbox, axis, eps))
        .collect();
    let cutoff = 2.0 * cfg.divergence_threshold;

    let mut candidates = Vec::new();
    for (i, ei) in elements.iter().enumerate() {
        if sides[i] != Side::Left {
            continue;
        }
        for (j, ej) in elements.iter().enumerate() {
            if sides[j] != Side::Right || ej.kind != ei.kind {
                continue;
            }
            let divergence = pair_divergence(ei, ej, axis, cfg).expect("sides checked above");
            if divergence.mean <= cutoff {
                candidates.push(Candidate {
                    left: i,
                    right: j,
                    divergence,
                });
            }
        }
    }
    candidates.sort_by(|a, b| {
        a.divergence
            .mean
            .total_cmp(&b.divergence.mean)
            .then_with(|| elements[a.left].id.cmp(&elements[b.left].id))
            .then_with(|| elements[a.right].id.cmp(&elements[b.right].id))
    });

    let mut taken = vec![false; elements.len()];
    let mut accepted = Vec::new();
    for c in candidates {
        if taken[c.left] || taken[c.right] {
            continue;
        }
        taken[c.left] = true;
        taken[c.right] = true;
        accepted.push(c);
    }
    accepted.sort_by_key(|c| c.left);

    let pairs = accepted
        .into_iter()
        .map(|c| SymmetryPair {
            kind: elements[c.left].kind,
            left_id: elements[c.left].id.clone(),
            right_id: elements[c.right].id.clone(),
            divergence: c.divergence,
            perceptual_similarity: None,
            semantic_similarity: None,
            unmirrored: false,
            symmetric: false,
        })
        .collect();

    let mut singles = Vec::new();
    let mut unmatched = Vec::new();
    for (i, e) in elements.iter().enumerate() {
        if sides[i] == Side::On {
            singles.push(check_centered(e, axis, cfg).expect("side is On"));
        } else if !taken[i] {
            unmatched.push(e.id.clone());
        }
    }

    PairingResult {
        pairs,
        singles,
        unmatched,
    }
}
