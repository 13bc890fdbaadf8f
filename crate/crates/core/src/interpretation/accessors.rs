use serde::{Deserialize, Serialize};

use super::{InterpretationError, InterpretationModel};
use crate::descriptor::ElementKind;
use crate::similarity::SimilarityScores;
use crate::symmetry::{BodyPart, DivergenceRecord, Subject};

/// Element ids of one hypothesis: two for a pair, one for a single.
pub type Group = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SubjectRef {
    Element(String),
    Pair(String, String),
}

impl SubjectRef {
    pub fn label(&self) -> String {
        match self {
            SubjectRef::Element(id) => id.clone(),
            SubjectRef::Pair(a, b) => format!("({a}, {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryStats {
    pub num_elements: usize,
    pub num_symmetric: usize,
    pub mean_divergence: Option<f64>,
    pub mean_similarity: Option<f64>,
    pub relative_symmetry: f64,
}

fn groups(
    m: &InterpretationModel,
    symmetric: bool,
    keep: impl Fn(ElementKind) -> bool,
) -> Vec<Group> {
    let pairs = m
        .pairs
        .iter()
        .filter(|p| p.symmetric == symmetric && keep(p.kind))
        .map(|p| vec![p.left_id.clone(), p.right_id.clone()]);
    let singles = m
        .singles
        .iter()
        .filter(|s| s.symmetric == symmetric && keep(s.kind))
        .map(|s| vec![s.element_id.clone()]);
    pairs.chain(singles).collect()
}

pub fn symmetrical_elements(m: &InterpretationModel) -> Vec<Group> {
    groups(m, true, |_| true)
}

/// Pairs and singles that failed classification. Unmatched elements are
/// not hypotheses and are left out.
pub fn non_symmetrical_elements(m: &InterpretationModel) -> Vec<Group> {
    groups(m, false, |_| true)
}

pub fn symmetrical_objects(m: &InterpretationModel) -> Vec<Group> {
    groups(m, true, |k| k.is_object_like())
}

/// Non-symmetric object/person groups followed by every object or person
/// that found no partner.
pub fn non_symmetrical_objects(m: &InterpretationModel) -> Vec<Group> {
    let mut out = groups(m, false, |k| k.is_object_like());
    out.extend(
        m.unmatched
            .iter()
            .filter(|id| m.kind_of(id).is_some_and(|k| k.is_object_like()))
            .map(|id| vec![id.clone()]),
    );
    out
}

fn body_pose(m: &InterpretationModel, symmetric: bool) -> Vec<(Subject, Vec<BodyPart>)> {
    m.pose_reports
        .iter()
        .filter(|r| !r.parts(symmetric).is_empty())
        .map(|r| (r.subject.clone(), r.parts(symmetric).to_vec()))
        .collect()
}

pub fn symmetrical_body_pose(m: &InterpretationModel) -> Vec<(Subject, Vec<BodyPart>)> {
    body_pose(m, true)
}

pub fn non_symmetrical_body_pose(m: &InterpretationModel) -> Vec<(Subject, Vec<BodyPart>)> {
    body_pose(m, false)
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn stats_for(m: &InterpretationModel, keep: impl Fn(ElementKind) -> bool) -> SymmetryStats {
    let num_elements = m.elements.values().filter(|e| keep(e.kind)).count();
    let num_symmetric = m
        .pairs
        .iter()
        .filter(|p| p.symmetric && keep(p.kind))
        .count()
        * 2
        + m.singles
            .iter()
            .filter(|s| s.symmetric && keep(s.kind))
            .count();
    let divergences: Vec<f64> = m
        .pairs
        .iter()
        .filter(|p| keep(p.kind))
        .map(|p| p.divergence.mean)
        .chain(
            m.singles
                .iter()
                .filter(|s| keep(s.kind))
                .map(|s| s.divergence.mean),
        )
        .collect();
    let similarities: Vec<f64> = m
        .pairs
        .iter()
        .filter(|p| keep(p.kind))
        .filter_map(|p| p.perceptual_similarity)
        .collect();
    SymmetryStats {
        num_elements,
        num_symmetric,
        mean_divergence: mean(&divergences),
        mean_similarity: mean(&similarities),
        relative_symmetry: if num_elements == 0 {
            0.0
        } else {
            num_symmetric as f64 / num_elements as f64
        },
    }
}

/// Statistics over patches.
pub fn symmetry_stats(m: &InterpretationModel) -> SymmetryStats {
    stats_for(m, |k| k == ElementKind::Patch)
}

/// Statistics over objects and people.
pub fn symmetrical_objects_stats(m: &InterpretationModel) -> SymmetryStats {
    stats_for(m, |k| k.is_object_like())
}

pub fn stats_csv_header() -> &'static str {
    "image_id,NP,NSP,rel_sym,MD,MS"
}

pub fn stats_csv_row(image_id: &str, s: &SymmetryStats) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_default();
    format!(
        "{image_id},{},{},{:.3},{},{}",
        s.num_elements,
        s.num_symmetric,
        s.relative_symmetry,
        opt(s.mean_divergence),
        opt(s.mean_similarity)
    )
}

fn unknown(subject: &SubjectRef) -> InterpretationError {
    InterpretationError::UnknownSubject(subject.label())
}

/// Divergence stored for a pair or a single. A bare id resolves to the
/// pair or single that contains it.
pub fn divergence_of<'m>(
    m: &'m InterpretationModel,
    subject: &SubjectRef,
) -> Result<&'m DivergenceRecord, InterpretationError> {
    match subject {
        SubjectRef::Element(id) => m
            .single_of(id)
            .map(|s| &s.divergence)
            .or_else(|| m.pair_of(id).map(|p| &p.divergence)),
        SubjectRef::Pair(a, b) => m
            .pairs
            .iter()
            .find(|p| (&p.left_id, &p.right_id) == (a, b) || (&p.left_id, &p.right_id) == (b, a))
            .map(|p| &p.divergence),
    }
    .ok_or_else(|| unknown(subject))
}

/// Similarity scores of a pair; a bare id resolves to its pair.
pub fn similarity_of(
    m: &InterpretationModel,
    subject: &SubjectRef,
) -> Result<SimilarityScores, InterpretationError> {
    let pair = match subject {
        SubjectRef::Element(id) => m.pair_of(id),
        SubjectRef::Pair(a, b) => m.pair_of(a).filter(|p| p.involves(b) && a != b),
    }
    .ok_or_else(|| unknown(subject))?;
    Ok(SimilarityScores {
        perceptual: pair.perceptual_similarity,
        semantic: pair.semantic_similarity,
        layer: m.config.similarity_layer.clone(),
        unmirrored: pair.unmirrored,
    })
}
