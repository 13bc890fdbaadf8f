//! Body-pose symmetry: of one person about their own centre, and of two
//! people about the image axis, plus facing-direction symmetry of heads.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{SymmetryConfig, SymmetryError};
use crate::descriptor::{ElementDescriptor, PoseDescriptor};
use crate::geometry::{center, distance, Point2, Rect, Rotation3, SymmetryAxis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodyPart {
    UpperBody,
    Legs,
    FacingDirection,
}

impl BodyPart {
    pub fn as_str(&self) -> &'static str {
        match self {
            BodyPart::UpperBody => "upper_body",
            BodyPart::Legs => "legs",
            BodyPart::FacingDirection => "facing_direction",
        }
    }

    /// Part a joint belongs to, if any (eyes, ears and midline joints
    /// belong to none).
    pub fn of_joint(joint: &str) -> Option<BodyPart> {
        let base = joint
            .strip_prefix("left_")
            .or_else(|| joint.strip_prefix("right_"))
            .unwrap_or(joint);
        match base {
            "shoulder" | "elbow" | "wrist" => Some(BodyPart::UpperBody),
            "hip" | "knee" | "ankle" => Some(BodyPart::Legs),
            _ => None,
        }
    }
}

impl fmt::Display for BodyPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whom a pose report describes: one centred person or a symmetry pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subject {
    Single(String),
    Pair(String, String),
}

impl Subject {
    pub fn ids(&self) -> Vec<&str> {
        match self {
            Subject::Single(a) => vec![a],
            Subject::Pair(a, b) => vec![a, b],
        }
    }

    pub fn involves(&self, id: &str) -> bool {
        self.ids().contains(&id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDivergence {
    pub joints: (String, String),
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseSymmetryReport {
    pub subject: Subject,
    pub symmetric_parts: Vec<BodyPart>,
    pub asymmetric_parts: Vec<BodyPart>,
    pub per_joint_divergence: Vec<JointDivergence>,
    /// Configured joint pairs that could not be compared.
    pub skipped_pairs: Vec<(String, String)>,
    /// Mean over the compared configured joint pairs.
    pub mean_divergence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facing_symmetric: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facing_divergence: Option<f64>,
}

impl PoseSymmetryReport {
    pub fn parts(&self, symmetric: bool) -> &[BodyPart] {
        if symmetric {
            &self.symmetric_parts
        } else {
            &self.asymmetric_parts
        }
    }
}

/// Person centre: the neck joint, falling back to the bbox centre.
pub fn person_center(pose: &PoseDescriptor, bbox: &Rect) -> Point2 {
    pose.joint("neck").unwrap_or_else(|| center(bbox))
}

/// Neck-to-mid-hip distance, falling back to the bbox height.
pub fn torso_scale(pose: &PoseDescriptor, bbox: &Rect) -> f64 {
    let hip = match (pose.joint("left_hip"), pose.joint("right_hip")) {
        (Some(l), Some(r)) => Some(l.midpoint(r)),
        (l, r) => l.or(r),
    };
    match (pose.joint("neck"), hip) {
        (Some(n), Some(h)) if distance(n, h) > 0.0 => distance(n, h),
        _ => bbox.h,
    }
}

/// Lateral counterpart of a joint: `left_x` ↔ `right_x`, midline joints map
/// to themselves.
pub fn lateral_partner(joint: &str) -> String {
    if let Some(rest) = joint.strip_prefix("left_") {
        format!("right_{rest}")
    } else if let Some(rest) = joint.strip_prefix("right_") {
        format!("left_{rest}")
    } else {
        joint.to_string()
    }
}

/// Angular distance of `a` from 0 on the circle, in `[0, 180]`.
fn angle_gap(a: f64) -> f64 {
    let r = a.abs() % 360.0;
    r.min(360.0 - r)
}

/// Facing directions are symmetric when pitch is equal and yaw and roll are
/// opposite. Divergence is the mean absolute deviation in degrees.
pub fn facing_symmetry(h1: &Rotation3, h2: &Rotation3, tol_deg: f64) -> (bool, f64) {
    let divergence = (angle_gap((h1.pitch - h2.pitch).abs())
        + angle_gap(h1.yaw + h2.yaw)
        + angle_gap(h1.roll + h2.roll))
        / 3.0;
    (divergence <= tol_deg, divergence)
}

fn pose_of(e: &ElementDescriptor) -> Result<&PoseDescriptor, SymmetryError> {
    e.pose
        .as_ref()
        .ok_or_else(|| SymmetryError::MissingJoints(e.id.clone()))
}

fn classify_parts(
    values: &[(String, String, f64)],
    threshold: f64,
    facing: Option<bool>,
) -> (Vec<BodyPart>, Vec<BodyPart>) {
    let mut symmetric = Vec::new();
    let mut asymmetric = Vec::new();
    for part in [BodyPart::UpperBody, BodyPart::Legs] {
        let vals: Vec<f64> = values
            .iter()
            .filter(|(a, b, _)| {
                BodyPart::of_joint(a) == Some(part) && BodyPart::of_joint(b) == Some(part)
            })
            .map(|(_, _, v)| *v)
            .collect();
        if vals.is_empty() {
            continue;
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        if mean <= threshold {
            symmetric.push(part);
        } else {
            asymmetric.push(part);
        }
    }
    match facing {
        Some(true) => symmetric.push(BodyPart::FacingDirection),
        Some(false) => asymmetric.push(BodyPart::FacingDirection),
        None => {}
    }
    (symmetric, asymmetric)
}

fn build_report(
    subject: Subject,
    compared: Vec<(String, String, f64)>,
    midline: Vec<(String, String, f64)>,
    skipped: Vec<(String, String)>,
    facing: Option<(bool, f64)>,
    cfg: &SymmetryConfig,
) -> Result<PoseSymmetryReport, SymmetryError> {
    if compared.is_empty() {
        let id = subject.ids().join(",");
        return Err(SymmetryError::MissingJoints(id));
    }
    let mean_divergence = compared.iter().map(|c| c.2).sum::<f64>() / compared.len() as f64;
    let (symmetric_parts, asymmetric_parts) =
        classify_parts(&compared, cfg.divergence_threshold, facing.map(|f| f.0));
    let per_joint_divergence = compared
        .into_iter()
        .chain(midline)
        .map(|(a, b, value)| JointDivergence {
            joints: (a, b),
            value,
        })
        .collect();
    Ok(PoseSymmetryReport {
        subject,
        symmetric_parts,
        asymmetric_parts,
        per_joint_divergence,
        skipped_pairs: skipped,
        mean_divergence,
        facing_symmetric: facing.map(|f| f.0),
        facing_divergence: facing.map(|f| f.1),
    })
}

/// Symmetry of one person's pose about their own centre.
pub fn pose_self_symmetry(
    e: &ElementDescriptor,
    cfg: &SymmetryConfig,
) -> Result<PoseSymmetryReport, SymmetryError> {
    let pose = pose_of(e)?;
    let c = person_center(pose, &e.bbox);
    let scale = torso_scale(pose, &e.bbox);

    let mut compared = Vec::new();
    let mut skipped = Vec::new();
    for (k, l) in &cfg.joint_pairs {
        match (pose.joint(k), pose.joint(l)) {
            (Some(jk), Some(jl)) => {
                let d = (((jk.x - c.x) + (jl.x - c.x)).abs() + (jk.y - jl.y).abs()) / scale;
                compared.push((k.clone(), l.clone(), d));
            }
            _ => skipped.push((k.clone(), l.clone())),
        }
    }
    let facing = pose
        .head
        .map(|h| facing_symmetry(&h, &h, cfg.facing_tolerance_deg));
    build_report(
        Subject::Single(e.id.clone()),
        compared,
        Vec::new(),
        skipped,
        facing,
        cfg,
    )
}

/// Symmetry of two people's poses about the image axis. Each joint of the
/// first person is compared with the laterally swapped joint of the second.
pub fn pose_pair_symmetry(
    e1: &ElementDescriptor,
    e2: &ElementDescriptor,
    axis: &SymmetryAxis,
    cfg: &SymmetryConfig,
) -> Result<PoseSymmetryReport, SymmetryError> {
    let (p1, p2) = (pose_of(e1)?, pose_of(e2)?);
    let scale = (torso_scale(p1, &e1.bbox) + torso_scale(p2, &e2.bbox)) / 2.0;
    let joint_gap = |a: &str, b: &str| -> Option<f64> {
        let (ja, jb) = (p1.joint(a)?, p2.joint(b)?);
        Some((((ja.x - axis.x) + (jb.x - axis.x)).abs() + (ja.y - jb.y).abs()) / scale)
    };

    let mut compared = Vec::new();
    let mut skipped = Vec::new();
    for (k, l) in &cfg.joint_pairs {
        let gaps: Vec<f64> = [
            joint_gap(k, &lateral_partner(k)),
            joint_gap(l, &lateral_partner(l)),
        ]
        .into_iter()
        .flatten()
        .collect();
        if gaps.is_empty() {
            skipped.push((k.clone(), l.clone()));
        } else {
            compared.push((
                k.clone(),
                l.clone(),
                gaps.iter().sum::<f64>() / gaps.len() as f64,
            ));
        }
    }
    let midline = ["nose", "neck"]
        .iter()
        .filter_map(|j| joint_gap(j, j).map(|v| (j.to_string(), j.to_string(), v)))
        .collect();

    let facing = match (p1.head, p2.head) {
        (Some(h1), Some(h2)) => Some(facing_symmetry(&h1, &h2, cfg.facing_tolerance_deg)),
        _ => None,
    };
    build_report(
        Subject::Pair(e1.id.clone(), e2.id.clone()),
        compared,
        midline,
        skipped,
        facing,
        cfg,
    )
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::descriptor::{ElementKind, Joint};
    use crate::geometry::Rect;
    use proptest::prelude::*;

    /// Upright figure centred at `cx` with arms stretched out; torso 100px.
    pub(crate) fn t_pose(cx: f64) -> Vec<(&'static str, f64, f64)> {
        vec![
            ("nose", cx, 80.0),
            ("neck", cx, 100.0),
            ("left_shoulder", cx + 30.0, 100.0),
            ("right_shoulder", cx - 30.0, 100.0),
            ("left_elbow", cx + 60.0, 100.0),
            ("right_elbow", cx - 60.0, 100.0),
            ("left_wrist", cx + 90.0, 100.0),
            ("right_wrist", cx - 90.0, 100.0),
            ("left_hip", cx + 20.0, 200.0),
            ("right_hip", cx - 20.0, 200.0),
            ("left_knee", cx + 22.0, 260.0),
            ("right_knee", cx - 22.0, 260.0),
            ("left_ankle", cx + 24.0, 320.0),
            ("right_ankle", cx - 24.0, 320.0),
        ]
    }

    pub(crate) fn person(
        id: &str,
        joints: &[(&str, f64, f64)],
        head: Option<Rotation3>,
    ) -> ElementDescriptor {
        let xs = joints.iter().map(|j| j.1);
        let min_x = xs.clone().fold(f64::INFINITY, f64::min) - 5.0;
        let max_x = xs.fold(f64::NEG_INFINITY, f64::max) + 5.0;
        ElementDescriptor {
            id: id.into(),
            kind: ElementKind::Person,
            bbox: Rect::new(min_x, 70.0, max_x - min_x, 260.0),
            classes: vec![],
            features: Default::default(),
            features_mirrored: None,
            pose: Some(PoseDescriptor {
                joints: joints
                    .iter()
                    .map(|(n, x, y)| {
                        (
                            n.to_string(),
                            Joint {
                                x: *x,
                                y: *y,
                                confidence: 1.0,
                            },
                        )
                    })
                    .collect(),
                head,
            }),
        }
    }

    /// Reflects joints about `axis_x`, swapping left/right names.
    pub(crate) fn mirror_joints(
        joints: &[(&'static str, f64, f64)],
        axis_x: f64,
    ) -> Vec<(&'static str, f64, f64)> {
        joints
            .iter()
            .map(|(n, x, y)| {
                let partner: &'static str = Box::leak(lateral_partner(n).into_boxed_str());
                (partner, 2.0 * axis_x - x, *y)
            })
            .collect()
    }

    #[test]
    fn perfect_t_pose_is_symmetric() {
        let r = pose_self_symmetry(
            &person("p", &t_pose(200.0), None),
            &SymmetryConfig::default(),
        )
        .unwrap();
        assert!(r.per_joint_divergence.iter().all(|j| j.value == 0.0));
        assert_eq!(r.symmetric_parts, vec![BodyPart::UpperBody, BodyPart::Legs]);
        assert!(r.asymmetric_parts.is_empty());
    }

    #[test]
    fn raised_wrist_breaks_upper_body_only() {
        let mut joints = t_pose(200.0);
        joints.iter_mut().find(|j| j.0 == "left_wrist").unwrap().2 -= 50.0;
        let r =
            pose_self_symmetry(&person("p", &joints, None), &SymmetryConfig::default()).unwrap();
        let wrist = r
            .per_joint_divergence
            .iter()
            .find(|j| j.joints.0 == "left_wrist")
            .unwrap();
        assert!((wrist.value - 0.5).abs() < 1e-12);
        assert_eq!(r.asymmetric_parts, vec![BodyPart::UpperBody]);
        assert_eq!(r.symmetric_parts, vec![BodyPart::Legs]);
    }

    #[test]
    fn partial_pose_lists_skipped_pairs() {
        let joints: Vec<_> = t_pose(200.0)
            .into_iter()
            .filter(|j| j.0.ends_with("shoulder"))
            .collect();
        let r =
            pose_self_symmetry(&person("p", &joints, None), &SymmetryConfig::default()).unwrap();
        assert_eq!(r.per_joint_divergence.len(), 1);
        assert_eq!(r.skipped_pairs.len(), 5);
        assert_eq!(r.symmetric_parts, vec![BodyPart::UpperBody]);
    }

    #[test]
    fn missing_joints_error() {
        let joints: Vec<_> = t_pose(200.0)
            .into_iter()
            .filter(|j| j.0 == "nose")
            .collect();
        let err = pose_self_symmetry(&person("p", &joints, None), &SymmetryConfig::default())
            .unwrap_err();
        assert_eq!(err, SymmetryError::MissingJoints("p".into()));
        let mut no_pose = person("q", &joints, None);
        no_pose.pose = None;
        assert!(pose_self_symmetry(&no_pose, &SymmetryConfig::default()).is_err());
    }

    #[test]
    fn torso_scale_fallback() {
        let p = person("p", &t_pose(200.0), None);
        assert_eq!(torso_scale(p.pose.as_ref().unwrap(), &p.bbox), 100.0);
        let joints: Vec<_> = t_pose(200.0)
            .into_iter()
            .filter(|j| !j.0.ends_with("hip"))
            .collect();
        let p = person("p", &joints, None);
        assert_eq!(torso_scale(p.pose.as_ref().unwrap(), &p.bbox), 260.0);
    }

    fn axis() -> SymmetryAxis {
        SymmetryAxis::new(500.0, 1000.0, 400.0)
    }

    #[test]
    fn exact_reflection_pair_is_symmetric() {
        let left = t_pose(300.0);
        let p1 = person("p1", &left, None);
        let p2 = person("p2", &mirror_joints(&left, 500.0), None);
        let r = pose_pair_symmetry(&p1, &p2, &axis(), &SymmetryConfig::default()).unwrap();
        assert!(r.per_joint_divergence.iter().all(|j| j.value.abs() < 1e-12));
        assert_eq!(r.symmetric_parts, vec![BodyPart::UpperBody, BodyPart::Legs]);
        assert_eq!(r.subject, Subject::Pair("p1".into(), "p2".into()));
    }

    #[test]
    fn knee_offset_breaks_legs_only() {
        // Ankles left out so the legs part averages hips and knees only.
        let left: Vec<_> = t_pose(300.0)
            .into_iter()
            .filter(|j| !j.0.ends_with("ankle"))
            .collect();
        let mut right = mirror_joints(&left, 500.0);
        for j in right.iter_mut().filter(|j| j.0.ends_with("knee")) {
            j.2 += 30.0;
        }
        let r = pose_pair_symmetry(
            &person("p1", &left, None),
            &person("p2", &right, None),
            &axis(),
            &Default::default(),
        )
        .unwrap();
        let knee = r
            .per_joint_divergence
            .iter()
            .find(|j| j.joints.0 == "left_knee")
            .unwrap();
        assert!((knee.value - 0.3).abs() < 1e-12);
        assert_eq!(r.symmetric_parts, vec![BodyPart::UpperBody]);
        assert_eq!(r.asymmetric_parts, vec![BodyPart::Legs]);
    }

    #[test]
    fn opposite_heads_face_symmetrically() {
        let left = t_pose(300.0);
        let p1 = person("p1", &left, Some(Rotation3::new(20.0, 5.0, 3.0)));
        let p2 = person(
            "p2",
            &mirror_joints(&left, 500.0),
            Some(Rotation3::new(-20.0, 5.0, -3.0)),
        );
        let r = pose_pair_symmetry(&p1, &p2, &axis(), &SymmetryConfig::default()).unwrap();
        assert_eq!(r.facing_symmetric, Some(true));
        assert!(r.symmetric_parts.contains(&BodyPart::FacingDirection));
    }

    #[test]
    fn facing_examples() {
        assert_eq!(
            facing_symmetry(
                &Rotation3::new(15.0, 5.0, 2.0),
                &Rotation3::new(-15.0, 5.0, -2.0),
                0.0
            ),
            (true, 0.0)
        );
        assert_eq!(
            facing_symmetry(
                &Rotation3::new(10.0, 0.0, 0.0),
                &Rotation3::new(-4.0, 0.0, 0.0),
                5.0
            ),
            (true, 2.0)
        );
        assert_eq!(
            facing_symmetry(
                &Rotation3::new(0.0, 0.0, 0.0),
                &Rotation3::new(0.0, 30.0, 0.0),
                5.0
            ),
            (false, 10.0)
        );
    }

    #[test]
    fn part_membership() {
        assert_eq!(BodyPart::of_joint("left_wrist"), Some(BodyPart::UpperBody));
        assert_eq!(BodyPart::of_joint("right_ankle"), Some(BodyPart::Legs));
        assert_eq!(BodyPart::of_joint("left_eye"), None);
        assert_eq!(BodyPart::of_joint("nose"), None);
        assert_eq!(lateral_partner("left_knee"), "right_knee");
        assert_eq!(lateral_partner("nose"), "nose");
    }

    fn angle() -> impl Strategy<Value = f64> {
        -180.0..180.0f64
    }

    proptest! {
        #[test]
        fn facing_is_symmetric_in_arguments(a in angle(), b in angle(), c in angle(), d in angle(), e in angle(), f in angle()) {
            let h1 = Rotation3::new(a, b, c);
            let h2 = Rotation3::new(d, e, f);
            prop_assert_eq!(facing_symmetry(&h1, &h2, 5.0), facing_symmetry(&h2, &h1, 5.0));
        }
    }
}
