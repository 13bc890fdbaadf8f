//! The per-image interpretation model: mirror pairs, centred singles,
//! unmatched elements, pose reports and the elements themselves, built
//! once and then only read.

mod accessors;

pub use accessors::{
    divergence_of, non_symmetrical_body_pose, non_symmetrical_elements, non_symmetrical_objects,
    similarity_of, stats_csv_header, stats_csv_row, symmetrical_body_pose, symmetrical_elements,
    symmetrical_objects, symmetrical_objects_stats, symmetry_stats, Group, SubjectRef,
    SymmetryStats,
};

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptor::{
    parse_json, read_file, to_json_pretty, DescriptorError, ElementDescriptor, ElementKind,
    ImageDescriptor,
};
use crate::geometry::SymmetryAxis;
use crate::similarity::{
    perceptual_similarity, semantic_similarity, SimilarityError, TaxonomyGraph,
};
use crate::symmetry::{
    is_symmetric_pair, is_symmetric_single, pose_pair_symmetry, pose_self_symmetry, propose_pairs,
    CenteredElement, PoseSymmetryReport, SymmetryConfig, SymmetryPair,
};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InterpretationError {
    #[error("pair ({left}, {right}): {source}")]
    Similarity {
        left: String,
        right: String,
        #[source]
        source: SimilarityError,
    },
    #[error("unknown subject `{0}`")]
    UnknownSubject(String),
    #[error(transparent)]
    Document(#[from] DescriptorError),
}

/// How aggregate statistics were scoped; stored in every model so readers
/// need not guess.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetadata {
    pub format_version: u32,
    pub mean_divergence_scope: String,
    pub mean_similarity_scope: String,
}

impl Default for ModelMetadata {
    fn default() -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            mean_divergence_scope: "pairs and centred singles; unmatched elements excluded".into(),
            mean_similarity_scope: "perceptual similarity of pairs".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpretationModel {
    pub image_id: String,
    pub axis: SymmetryAxis,
    pub config: SymmetryConfig,
    pub pairs: Vec<SymmetryPair>,
    pub singles: Vec<CenteredElement>,
    pub unmatched: Vec<String>,
    pub pose_reports: Vec<PoseSymmetryReport>,
    pub elements: IndexMap<String, ElementDescriptor>,
    #[serde(default)]
    pub metadata: ModelMetadata,
}

impl InterpretationModel {
    pub fn element(&self, id: &str) -> Option<&ElementDescriptor> {
        self.elements.get(id)
    }

    pub fn kind_of(&self, id: &str) -> Option<ElementKind> {
        self.elements.get(id).map(|e| e.kind)
    }

    pub fn pair_of(&self, id: &str) -> Option<&SymmetryPair> {
        self.pairs.iter().find(|p| p.involves(id))
    }

    pub fn single_of(&self, id: &str) -> Option<&CenteredElement> {
        self.singles.iter().find(|s| s.element_id == id)
    }

    /// Checks the structural invariants a persisted model must satisfy.
    pub fn check_invariants(&self) -> Result<(), DescriptorError> {
        let schema = |field: &str, message: String| DescriptorError::Schema {
            field: field.to_string(),
            message,
        };
        for (key, e) in &self.elements {
            if key != &e.id {
                return Err(schema(
                    "elements",
                    format!("key `{key}` holds element `{}`", e.id),
                ));
            }
        }
        let mut seen = HashSet::new();
        let referenced = self
            .pairs
            .iter()
            .flat_map(|p| {
                [
                    ("pairs", p.left_id.as_str()),
                    ("pairs", p.right_id.as_str()),
                ]
            })
            .chain(
                self.singles
                    .iter()
                    .map(|s| ("singles", s.element_id.as_str())),
            )
            .chain(self.unmatched.iter().map(|u| ("unmatched", u.as_str())));
        for (field, id) in referenced {
            if !self.elements.contains_key(id) {
                return Err(schema(
                    field,
                    format!("references missing element id `{id}`"),
                ));
            }
            if !seen.insert(id) {
                return Err(schema(
                    field,
                    format!("element id `{id}` appears more than once"),
                ));
            }
        }
        if let Some(missing) = self.elements.keys().find(|k| !seen.contains(k.as_str())) {
            return Err(schema(
                "elements",
                format!("element `{missing}` is in no pair, single or unmatched list"),
            ));
        }
        for r in &self.pose_reports {
            if let Some(id) = r
                .subject
                .ids()
                .into_iter()
                .find(|id| !self.elements.contains_key(*id))
            {
                return Err(schema(
                    "pose_reports",
                    format!("references missing element id `{id}`"),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        to_json_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self, DescriptorError> {
        let m: InterpretationModel = parse_json(text)?;
        m.check_invariants()?;
        Ok(m)
    }
}

fn attach_similarity(
    pair: &mut SymmetryPair,
    left: &ElementDescriptor,
    right: &ElementDescriptor,
    cfg: &SymmetryConfig,
    taxonomy: &TaxonomyGraph,
) -> Result<(), InterpretationError> {
    let wrap = |source| InterpretationError::Similarity {
        left: left.id.clone(),
        right: right.id.clone(),
        source,
    };
    if !left.features.is_empty() && !right.features.is_empty() {
        match perceptual_similarity(left, right, &cfg.similarity_layer) {
            Ok((s, unmirrored)) => {
                pair.perceptual_similarity = Some(s);
                pair.unmirrored = unmirrored;
            }
            Err(SimilarityError::ZeroVector) => {}
            Err(e) => return Err(wrap(e)),
        }
    }
    if !left.classes.is_empty() && !right.classes.is_empty() {
        pair.semantic_similarity =
            Some(semantic_similarity(&left.classes, &right.classes, taxonomy).map_err(wrap)?);
    }
    Ok(())
}

/// Runs pairing, similarity scoring, pose analysis and classification for
/// one image.
pub fn build_model(
    d: &ImageDescriptor,
    cfg: &SymmetryConfig,
    taxonomy: &TaxonomyGraph,
) -> Result<InterpretationModel, InterpretationError> {
    let axis = SymmetryAxis::at_fraction(cfg.axis_x_fraction, d.width, d.height);
    let mut structure = propose_pairs(&d.elements, &axis, cfg);
    let elements: IndexMap<String, ElementDescriptor> = d
        .elements
        .iter()
        .map(|e| (e.id.clone(), e.clone()))
        .collect();

    let mut pose_reports = Vec::new();
    for pair in &mut structure.pairs {
        let (left, right) = (&elements[&pair.left_id], &elements[&pair.right_id]);
        attach_similarity(pair, left, right, cfg, taxonomy)?;
        if pair.kind == ElementKind::Person && left.pose.is_some() && right.pose.is_some() {
            if let Ok(report) = pose_pair_symmetry(left, right, &axis, cfg) {
                pose_reports.push(report);
            }
        }
        pair.symmetric = is_symmetric_pair(pair, cfg);
    }
    for single in &mut structure.singles {
        let e = &elements[&single.element_id];
        if e.kind == ElementKind::Person && e.pose.is_some() {
            if let Ok(report) = pose_self_symmetry(e, cfg) {
                pose_reports.push(report);
            }
        }
        single.symmetric = is_symmetric_single(single, cfg);
    }

    Ok(InterpretationModel {
        image_id: d.image_id.clone(),
        axis,
        config: cfg.clone(),
        pairs: structure.pairs,
        singles: structure.singles,
        unmatched: structure.unmatched,
        pose_reports,
        elements,
        metadata: ModelMetadata::default(),
    })
}

pub fn save_model(m: &InterpretationModel, path: impl AsRef<Path>) -> Result<(), DescriptorError> {
    let path = path.as_ref();
    fs::write(path, m.to_json()).map_err(|source| DescriptorError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<InterpretationModel, DescriptorError> {
    InterpretationModel::from_json(&read_file(path.as_ref())?)
}
