use serde::{Deserialize, Serialize};

use super::pose::pose_pair_symmetry;
use super::{SymmetryConfig, SymmetryError};
use crate::descriptor::{ElementDescriptor, ElementKind};
use crate::geometry::{orientation, rel_pos, Side, SymmetryAxis};

/// Normalised deviation from ideal reflection. `size` and `aspect_ratio`
/// are absent for centred singles, `pose` unless both elements are people
/// with comparable poses. `mean` averages the present components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRecord {
    pub position: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aspect_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose: Option<f64>,
    pub mean: f64,
}

impl DivergenceRecord {
    pub fn new(
        position: f64,
        size: Option<f64>,
        aspect_ratio: Option<f64>,
        pose: Option<f64>,
    ) -> Self {
        let present: Vec<f64> = std::iter::once(position)
            .chain(size)
            .chain(aspect_ratio)
            .chain(pose)
            .collect();
        let mean = present.iter().sum::<f64>() / present.len() as f64;
        Self {
            position,
            size,
            aspect_ratio,
            pose,
            mean,
        }
    }

    pub fn position_only(position: f64) -> Self {
        Self::new(position, None, None, None)
    }

    pub fn components(&self) -> impl Iterator<Item = f64> {
        std::iter::once(self.position)
            .chain(self.size)
            .chain(self.aspect_ratio)
            .chain(self.pose)
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b)
}

/// Divergence of a candidate pair from exact reflection: `e_i` must lie
/// left of the axis and `e_j` right of it.
pub fn pair_divergence(
    e_i: &ElementDescriptor,
    e_j: &ElementDescriptor,
    axis: &SymmetryAxis,
    cfg: &SymmetryConfig,
) -> Result<DivergenceRecord, SymmetryError> {
    let eps = cfg.on_eps_fraction * axis.image_width;
    let (si, sj) = (
        orientation(&e_i.bbox, axis, eps),
        orientation(&e_j.bbox, axis, eps),
    );
    if si != Side::Left || sj != Side::Right {
        return Err(SymmetryError::Side {
            left: e_i.id.clone(),
            right: e_j.id.clone(),
            found: (si, sj),
        });
    }

    let (pi, pj) = (rel_pos(&e_i.bbox, axis), rel_pos(&e_j.bbox, axis));
    let position = ((pi.axis_distance + pj.axis_distance).abs() / axis.image_width
        + (pi.y - pj.y).abs() / axis.image_height)
        / 2.0;
    let (bi, bj) = (&e_i.bbox, &e_j.bbox);
    let size = (relative_gap(bi.w, bj.w) + relative_gap(bi.h, bj.h)) / 2.0;
    let aspect_ratio = relative_gap(bi.aspect_ratio(), bj.aspect_ratio());

    let pose = if e_i.kind == ElementKind::Person && e_j.kind == ElementKind::Person {
        pose_pair_symmetry(e_i, e_j, axis, cfg)
            .ok()
            .map(|r| r.mean_divergence)
    } else {
        None
    };

    Ok(DivergenceRecord::new(
        position,
        Some(size),
        Some(aspect_ratio),
        pose,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{mirror_rect, Point2, Rect};

    fn patch(id: &str, bbox: Rect) -> ElementDescriptor {
        ElementDescriptor {
            id: id.into(),
            kind: ElementKind::Patch,
            bbox,
            classes: vec![],
            features: Default::default(),
            features_mirrored: None,
            pose: None,
        }
    }

    fn axis() -> SymmetryAxis {
        SymmetryAxis::new(50.0, 100.0, 100.0)
    }

    #[test]
    fn perfect_reflection_has_zero_divergence() {
        let l = Rect::new(10.0, 20.0, 12.0, 7.0);
        let d = pair_divergence(
            &patch("l", l),
            &patch("r", mirror_rect(&l, &axis())),
            &axis(),
            &Default::default(),
        )
        .unwrap();
        assert_eq!(d.components().collect::<Vec<_>>(), vec![0.0, 0.0, 0.0]);
        assert_eq!(d.mean, 0.0);
    }

    #[test]
    fn horizontal_shift_example() {
        let l = Rect::from_center(Point2::new(30.0, 40.0), 10.0, 10.0);
        let r = Rect::from_center(Point2::new(75.0, 40.0), 10.0, 10.0);
        let d =
            pair_divergence(&patch("l", l), &patch("r", r), &axis(), &Default::default()).unwrap();
        assert!((d.position - 0.025).abs() < 1e-12);
        assert_eq!(d.size, Some(0.0));
        assert_eq!(d.aspect_ratio, Some(0.0));
    }

    #[test]
    fn size_and_aspect_example() {
        let l = Rect::from_center(Point2::new(30.0, 40.0), 10.0, 10.0);
        let r = Rect::from_center(Point2::new(70.0, 40.0), 20.0, 10.0);
        let d =
            pair_divergence(&patch("l", l), &patch("r", r), &axis(), &Default::default()).unwrap();
        assert_eq!(d.size, Some(0.25));
        assert_eq!(d.aspect_ratio, Some(0.5));
        assert!((d.mean - 0.75 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_sides_are_rejected() {
        let l = Rect::from_center(Point2::new(30.0, 40.0), 10.0, 10.0);
        let err = pair_divergence(&patch("a", l), &patch("b", l), &axis(), &Default::default())
            .unwrap_err();
        assert!(matches!(err, SymmetryError::Side { .. }));
        let err = pair_divergence(
            &patch("a", mirror_rect(&l, &axis())),
            &patch("b", l),
            &axis(),
            &Default::default(),
        )
        .unwrap_err();
        assert!(matches!(err, SymmetryError::Side { .. }));
    }

    #[test]
    fn position_grows_with_offset() {
        let l = Rect::from_center(Point2::new(30.0, 40.0), 10.0, 10.0);
        let mut last = -1.0;
        for step in 0..30 {
            let r = Rect::from_center(Point2::new(70.0 + step as f64 * 0.5, 40.0), 10.0, 10.0);
            let d = pair_divergence(&patch("l", l), &patch("r", r), &axis(), &Default::default())
                .unwrap();
            assert!(d.position > last);
            last = d.position;
        }
    }
}
