//! Perceptual similarity over feature vectors and semantic similarity over
//! class predictions.

mod taxonomy;

pub use taxonomy::{wup_similarity, TaxonomyError, TaxonomyGraph, BUNDLED_TAXONOMY};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptor::{ClassPrediction, ElementDescriptor};

#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("element `{element}` has no features for layer `{layer}`")]
    MissingLayer { element: String, layer: String },
    #[error("empty prediction list")]
    EmptyPredictions,
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
}

/// Per-pair similarity record as exposed by the interpretation model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScores {
    pub perceptual: Option<f64>,
    pub semantic: Option<f64>,
    pub layer: String,
    pub unmirrored: bool,
}

pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64, SimilarityError> {
    if u.len() != v.len() || u.is_empty() {
        return Err(SimilarityError::DimensionMismatch(u.len(), v.len()));
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Err(SimilarityError::ZeroVector);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

/// Compares the left element's features against the mirrored-crop features
/// of the right element. Falls back to the plain features (and reports
/// `unmirrored = true`) when the right element has no mirrored features.
pub fn perceptual_similarity(
    left: &ElementDescriptor,
    right: &ElementDescriptor,
    layer: &str,
) -> Result<(f64, bool), SimilarityError> {
    let missing = |e: &ElementDescriptor| SimilarityError::MissingLayer {
        element: e.id.clone(),
        layer: layer.to_string(),
    };
    let u = left.features.get(layer).ok_or_else(|| missing(left))?;
    let (v, unmirrored) = match right.features_mirrored.as_ref().and_then(|m| m.get(layer)) {
        Some(v) => (v, false),
        None => (
            right.features.get(layer).ok_or_else(|| missing(right))?,
            true,
        ),
    };
    Ok((cosine_similarity(u, v)?, unmirrored))
}

/// Score-weighted mean of Wu-Palmer similarity over all cross pairs of
/// predicted labels.
pub fn semantic_similarity(
    ci: &[ClassPrediction],
    cj: &[ClassPrediction],
    t: &TaxonomyGraph,
) -> Result<f64, SimilarityError> {
    if ci.is_empty() || cj.is_empty() {
        return Err(SimilarityError::EmptyPredictions);
    }
    let mut weighted = 0.0;
    let mut total = 0.0;
    let mut plain = 0.0;
    for a in ci {
        for b in cj {
            let s = wup_similarity(&a.label, &b.label, t)?;
            let w = a.score * b.score;
            weighted += w * s;
            total += w;
            plain += s;
        }
    }
    if total > 0.0 {
        Ok((weighted / total).clamp(0.0, 1.0))
    } else {
        Ok(plain / (ci.len() * cj.len()) as f64)
    }
}
