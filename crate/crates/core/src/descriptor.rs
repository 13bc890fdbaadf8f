//! Element-descriptor file contract.
//!
//! One JSON document per image describes every detected element (region
//! proposal patches, detected objects, people with pose) together with the
//! feature vectors and class predictions computed by an upstream extractor.
//! The engine never touches pixels; this file is its only input.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point2, Rect, Rotation3};

/// Maximum number of class predictions kept per element.
pub const MAX_CLASSES: usize = 5;

/// The 18 joint names a pose may use.
pub const JOINT_NAMES: [&str; 18] = [
    "nose",
    "neck",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
    "left_eye",
    "right_eye",
    "left_ear",
    "right_ear",
];

pub fn is_joint_name(name: &str) -> bool {
    JOINT_NAMES.contains(&name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Patch,
    Object,
    Person,
}

impl ElementKind {
    pub const ALL: [ElementKind; 3] =
        [ElementKind::Patch, ElementKind::Object, ElementKind::Person];

    pub fn as_str(&self) -> &'static str {
        match self {
            ElementKind::Patch => "patch",
            ElementKind::Object => "object",
            ElementKind::Person => "person",
        }
    }

    /// Objects and people form the "object" scope of the statistics.
    pub fn is_object_like(&self) -> bool {
        matches!(self, ElementKind::Object | ElementKind::Person)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPrediction {
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Joint {
    pub x: f64,
    pub y: f64,
    pub confidence: f64,
}

impl Joint {
    pub fn point(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PoseDescriptor {
    #[serde(default)]
    pub joints: BTreeMap<String, Joint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<Rotation3>,
}

impl PoseDescriptor {
    pub fn joint(&self, name: &str) -> Option<Point2> {
        self.joints.get(name).map(Joint::point)
    }
}

pub type FeatureMap = BTreeMap<String, Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementDescriptor {
    pub id: String,
    pub kind: ElementKind,
    pub bbox: Rect,
    #[serde(default)]
    pub classes: Vec<ClassPrediction>,
    #[serde(default)]
    pub features: FeatureMap,
    /// Features of the horizontally flipped crop.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features_mirrored: Option<FeatureMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<PoseDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfFeatures {
    pub left: Vec<f64>,
    pub right_mirrored: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageDescriptor {
    pub image_id: String,
    pub width: f64,
    pub height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_path: Option<String>,
    #[serde(default)]
    pub half_features: BTreeMap<String, HalfFeatures>,
    #[serde(default)]
    pub elements: Vec<ElementDescriptor>,
}

impl ImageDescriptor {
    pub fn element(&self, id: &str) -> Option<&ElementDescriptor> {
        self.elements.iter().find(|e| e.id == id)
    }
}

/// One broken invariant. `element_id` is `None` for image-level rules.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub element_id: Option<String>,
    pub rule: String,
    pub detail: String,
}

impl Violation {
    fn image(rule: &str, detail: impl Into<String>) -> Self {
        Self {
            element_id: None,
            rule: rule.to_string(),
            detail: detail.into(),
        }
    }

    fn element(id: &str, rule: &str, detail: impl Into<String>) -> Self {
        Self {
            element_id: Some(id.to_string()),
            rule: rule.to_string(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.element_id {
            Some(id) => write!(f, "element {id}: {}: {}", self.rule, self.detail),
            None => write!(f, "image: {}: {}", self.rule, self.detail),
        }
    }
}

#[derive(Debug, Error)]
pub enum DescriptorError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed descriptor: {0}")]
    Parse(String),
    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("{} invariant violation(s); first: {}", .0.len(), .0[0])]
    Validation(Vec<Violation>),
}

impl DescriptorError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            DescriptorError::Validation(v) => v,
            _ => &[],
        }
    }
}

/// Slack for bbox-inside-image checks; extractors emit float boxes.
const BOUNDS_EPS: f64 = 1e-6;

/// Checks every descriptor invariant and returns all violations found.
pub fn validate_descriptor(d: &ImageDescriptor) -> Vec<Violation> {
    let mut out = Vec::new();

    if d.image_id.is_empty() {
        out.push(Violation::image("image_id non-empty", "image_id is empty"));
    }
    if !(d.width.is_finite() && d.width > 0.0) {
        out.push(Violation::image(
            "width > 0",
            format!("width = {}", d.width),
        ));
    }
    if !(d.height.is_finite() && d.height > 0.0) {
        out.push(Violation::image(
            "height > 0",
            format!("height = {}", d.height),
        ));
    }

    for (layer, half) in &d.half_features {
        if half.left.is_empty() || half.left.len() != half.right_mirrored.len() {
            out.push(Violation::image(
                "half_features dimensions",
                format!(
                    "layer {layer}: left has {} values, right_mirrored has {}",
                    half.left.len(),
                    half.right_mirrored.len()
                ),
            ));
        }
        if half
            .left
            .iter()
            .chain(&half.right_mirrored)
            .any(|v| !v.is_finite())
        {
            out.push(Violation::image(
                "finite features",
                format!("layer {layer} has non-finite values"),
            ));
        }
    }

    let mut seen = HashSet::new();
    for e in &d.elements {
        if e.id.is_empty() {
            out.push(Violation::image(
                "element id non-empty",
                "an element has an empty id",
            ));
        } else if !seen.insert(e.id.as_str()) {
            out.push(Violation::element(
                &e.id,
                "unique element ids",
                "duplicate id",
            ));
        }
        validate_element(e, d.width, d.height, &mut out);
    }

    // Feature dimension per layer must agree across all elements of the image.
    let mut dims: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for e in &d.elements {
        let maps = std::iter::once(&e.features).chain(e.features_mirrored.as_ref());
        for map in maps {
            for (layer, v) in map {
                match dims.get(layer.as_str()) {
                    None => {
                        dims.insert(layer, (v.len(), &e.id));
                    }
                    Some(&(dim, first)) if dim != v.len() => out.push(Violation::element(
                        &e.id,
                        "equal feature dimension per layer",
                        format!(
                            "layer {layer} has dimension {} but element {first} has {dim}",
                            v.len()
                        ),
                    )),
                    Some(_) => {}
                }
            }
        }
    }

    out
}

fn validate_element(e: &ElementDescriptor, width: f64, height: f64, out: &mut Vec<Violation>) {
    let b = &e.bbox;
    if !b.is_valid() {
        out.push(Violation::element(
            &e.id,
            "bbox w > 0 and h > 0",
            format!("bbox = ({}, {}, {}, {})", b.x, b.y, b.w, b.h),
        ));
    } else if b.x < -BOUNDS_EPS
        || b.y < -BOUNDS_EPS
        || b.right() > width + BOUNDS_EPS
        || b.bottom() > height + BOUNDS_EPS
    {
        out.push(Violation::element(
            &e.id,
            "bbox within image bounds",
            format!(
                "bbox ({}, {}, {}, {}) outside {}x{}",
                b.x, b.y, b.w, b.h, width, height
            ),
        ));
    }

    if e.classes.len() > MAX_CLASSES {
        out.push(Violation::element(
            &e.id,
            "classes ≤ 5",
            format!("{} class predictions", e.classes.len()),
        ));
    }
    for c in &e.classes {
        if c.label.is_empty() {
            out.push(Violation::element(
                &e.id,
                "class label non-empty",
                "empty label",
            ));
        }
        if !(0.0..=1.0).contains(&c.score) {
            out.push(Violation::element(
                &e.id,
                "class score in [0,1]",
                format!("label {} has score {}", c.label, c.score),
            ));
        }
    }
    if e.classes.windows(2).any(|w| w[0].score < w[1].score) {
        out.push(Violation::element(
            &e.id,
            "classes sorted by descending score",
            "class predictions out of order",
        ));
    }

    let maps = std::iter::once(&e.features).chain(e.features_mirrored.as_ref());
    for map in maps {
        for (layer, v) in map {
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                out.push(Violation::element(
                    &e.id,
                    "finite non-empty features",
                    format!("layer {layer}"),
                ));
            }
        }
    }

    if let Some(pose) = &e.pose {
        if e.kind != ElementKind::Person {
            out.push(Violation::element(
                &e.id,
                "pose only on person elements",
                format!("kind {} carries a pose", e.kind),
            ));
        }
        for (name, j) in &pose.joints {
            if !is_joint_name(name) {
                out.push(Violation::element(
                    &e.id,
                    "known joint names",
                    format!("unknown joint `{name}`"),
                ));
            }
            if !(j.x.is_finite() && j.y.is_finite()) {
                out.push(Violation::element(
                    &e.id,
                    "finite joints",
                    format!("joint {name}"),
                ));
            }
            if !(0.0..=1.0).contains(&j.confidence) {
                out.push(Violation::element(
                    &e.id,
                    "joint confidence in [0,1]",
                    format!("joint {name} has confidence {}", j.confidence),
                ));
            }
        }
        if let Some(h) = &pose.head {
            if !h.is_normalized() {
                out.push(Violation::element(
                    &e.id,
                    "head angles in [-180,180)",
                    format!("yaw {} pitch {} roll {}", h.yaw, h.pitch, h.roll),
                ));
            }
        }
    }
}

/// Parses a descriptor document without validating it. Head angles are
/// normalised into `[-180, 180)`.
pub fn parse_descriptor(text: &str) -> Result<ImageDescriptor, DescriptorError> {
    let mut d: ImageDescriptor = parse_json(text)?;
    for e in &mut d.elements {
        if let Some(h) = e.pose.as_mut().and_then(|p| p.head.as_mut()) {
            if [h.yaw, h.pitch, h.roll].iter().all(|a| a.is_finite()) {
                *h = h.normalized();
            }
        }
    }
    Ok(d)
}

pub fn load_descriptor(path: impl AsRef<Path>) -> Result<ImageDescriptor, DescriptorError> {
    read_descriptor(&read_file(path.as_ref())?)
}

/// Parses and validates a descriptor document.
pub fn read_descriptor(text: &str) -> Result<ImageDescriptor, DescriptorError> {
    let d = parse_descriptor(text)?;
    let violations = validate_descriptor(&d);
    if violations.is_empty() {
        Ok(d)
    } else {
        Err(DescriptorError::Validation(violations))
    }
}

pub fn save_descriptor(d: &ImageDescriptor, path: impl AsRef<Path>) -> Result<(), DescriptorError> {
    let path = path.as_ref();
    let text = to_json_pretty(d);
    fs::write(path, text).map_err(|source| DescriptorError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn read_file(path: &Path) -> Result<String, DescriptorError> {
    fs::read_to_string(path).map_err(|source| DescriptorError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Deserializes with field-path reporting; syntax errors become `Parse`,
/// shape errors become `Schema` naming the offending field.
pub(crate) fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, DescriptorError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    match serde_path_to_error::deserialize(de) {
        Ok(v) => Ok(v),
        Err(err) => {
            let field = err.path().to_string();
            let inner = err.into_inner();
            if inner.is_syntax() || inner.is_eof() || inner.is_io() {
                Err(DescriptorError::Parse(inner.to_string()))
            } else {
                let field = missing_field_name(&inner.to_string())
                    .map(|m| {
                        if field == "." {
                            m.clone()
                        } else {
                            format!("{field}.{m}")
                        }
                    })
                    .unwrap_or(field);
                Err(DescriptorError::Schema {
                    field,
                    message: inner.to_string(),
                })
            }
        }
    }
}

fn missing_field_name(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("missing field `")?;
    rest.split('`').next().map(str::to_string)
}

pub(crate) fn to_json_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("descriptor types serialize infallibly");
    s.push('\n');
    s
}

/// Index from element id to element, in document order.
pub fn index_elements(elements: &[ElementDescriptor]) -> HashMap<&str, &ElementDescriptor> {
    elements.iter().map(|e| (e.id.as_str(), e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_element_json() -> String {
        r#"{
            "image_id": "img-1",
            "width": 100, "height": 80,
            "elements": [
              {"id": "a", "kind": "patch", "bbox": {"x": 10, "y": 10, "w": 20, "h": 20},
               "classes": [{"label": "dog", "score": 0.9}, {"label": "cat", "score": 0.1}],
               "features": {"conv3": [1.0, 2.0]},
               "features_mirrored": {"conv3": [2.0, 1.0]}},
              {"id": "b", "kind": "person", "bbox": {"x": 70, "y": 10, "w": 20, "h": 20},
               "features": {"conv3": [0.5, 0.5]},
               "pose": {"joints": {"neck": {"x": 80, "y": 15, "confidence": 0.8}},
                        "head": {"yaw": 190, "pitch": 0, "roll": 0}},
               "unknown_extra": true}
            ]
        }"#
        .to_string()
    }

    #[test]
    fn parses_fixture_and_preserves_ids() {
        let d = parse_descriptor(&two_element_json()).unwrap();
        assert_eq!(d.elements.len(), 2);
        assert_eq!(d.elements[0].id, "a");
        assert_eq!(d.elements[1].id, "b");
        assert!(validate_descriptor(&d).is_empty());
        let head = d.elements[1].pose.as_ref().unwrap().head.unwrap();
        assert_eq!(head.yaw, -170.0);
    }

    #[test]
    fn negative_width_is_a_violation_naming_the_element() {
        let text = two_element_json().replace(
            r#""w": 20, "h": 20},
               "classes""#,
            r#""w": -3, "h": 20},
               "classes""#,
        );
        let d = parse_descriptor(&text).unwrap();
        let v = validate_descriptor(&d);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].element_id.as_deref(), Some("a"));
    }

    #[test]
    fn mismatched_layer_dimension_names_layer() {
        let text = two_element_json().replace("[0.5, 0.5]", "[0.5, 0.5, 0.5]");
        let d = parse_descriptor(&text).unwrap();
        let v = validate_descriptor(&d);
        assert_eq!(v.len(), 1);
        assert!(v[0].detail.contains("conv3"));
    }

    #[test]
    fn six_classes_is_one_violation() {
        let mut d = parse_descriptor(&two_element_json()).unwrap();
        d.elements[0].classes = (0..6)
            .map(|i| ClassPrediction {
                label: format!("c{i}"),
                score: 0.5 - i as f64 * 0.05,
            })
            .collect();
        let v = validate_descriptor(&d);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, "classes ≤ 5");
    }

    #[test]
    fn unknown_joint_is_reported() {
        let text = two_element_json().replace("\"neck\"", "\"tail\"");
        let d = parse_descriptor(&text).unwrap();
        let v = validate_descriptor(&d);
        assert_eq!(v.len(), 1);
        assert!(v[0].detail.contains("tail"));
    }

    #[test]
    fn pose_on_patch_is_rejected() {
        let mut d = parse_descriptor(&two_element_json()).unwrap();
        d.elements[0].pose = Some(PoseDescriptor::default());
        assert_eq!(
            validate_descriptor(&d)[0].rule,
            "pose only on person elements"
        );
    }

    #[test]
    fn unsorted_classes_and_duplicate_ids() {
        let mut d = parse_descriptor(&two_element_json()).unwrap();
        d.elements[0].classes.reverse();
        d.elements[1].id = "a".into();
        let rules: Vec<_> = validate_descriptor(&d)
            .into_iter()
            .map(|v| v.rule)
            .collect();
        assert!(rules.contains(&"classes sorted by descending score".to_string()));
        assert!(rules.contains(&"unique element ids".to_string()));
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text = two_element_json().replace("\"width\": 100,", "");
        match parse_descriptor(&text) {
            Err(DescriptorError::Schema { field, .. }) => assert_eq!(field, "width"),
            other => panic!("expected schema error, got {other:?}"),
        }
        let text = two_element_json().replace(
            "\"w\": 20, \"h\": 20},\n               \"features\"",
            "\"w\": \"wide\", \"h\": 20},\n               \"features\"",
        );
        match parse_descriptor(&text) {
            Err(DescriptorError::Schema { field, .. }) => assert_eq!(field, "elements[1].bbox.w"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_document_is_a_parse_error() {
        let text = two_element_json();
        let err = parse_descriptor(&text[..text.len() / 2]).unwrap_err();
        assert!(matches!(err, DescriptorError::Parse(_)), "{err:?}");
    }
}
