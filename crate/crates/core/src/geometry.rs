//! Spatial entities the symmetry rules are stated over.
//!
//! All coordinates are image pixels with a top-left origin; `y` grows
//! downwards. The reflection axis is always a vertical line.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }
}

/// Axis-aligned rectangle given by its top-left corner and extent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    /// Builds the rectangle of extent `w × h` centred on `c`.
    pub fn from_center(c: Point2, w: f64, h: f64) -> Self {
        Self::new(c.x - w / 2.0, c.y - h / 2.0, w, h)
    }

    pub fn is_valid(&self) -> bool {
        [self.x, self.y, self.w, self.h]
            .iter()
            .all(|v| v.is_finite())
            && self.w > 0.0
            && self.h > 0.0
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.w / self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }
}

/// Head rotation in degrees, each angle normalised to `[-180, 180)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation3 {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl Rotation3 {
    pub fn new(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self {
            yaw: normalize_degrees(yaw),
            pitch: normalize_degrees(pitch),
            roll: normalize_degrees(roll),
        }
    }

    pub fn normalized(self) -> Self {
        Self::new(self.yaw, self.pitch, self.roll)
    }

    pub fn is_normalized(&self) -> bool {
        [self.yaw, self.pitch, self.roll]
            .iter()
            .all(|a| a.is_finite() && (-180.0..180.0).contains(a))
    }
}

/// Maps any finite angle into `[-180, 180)`.
pub fn normalize_degrees(angle: f64) -> f64 {
    // in-range angles pass through untouched; the shift below can move them by an ulp
    if (-180.0..180.0).contains(&angle) {
        return angle;
    }
    let a = (angle + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if a >= 180.0 {
        a - 360.0
    } else {
        a
    }
}

/// Vertical reflection axis `x = const` inside an image of the given size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryAxis {
    pub x: f64,
    pub image_width: f64,
    pub image_height: f64,
}

impl SymmetryAxis {
    pub fn new(x: f64, image_width: f64, image_height: f64) -> Self {
        Self {
            x,
            image_width,
            image_height,
        }
    }

    /// Axis at `fraction · width`; `0.5` is the image centre line.
    pub fn at_fraction(fraction: f64, image_width: f64, image_height: f64) -> Self {
        Self::new(fraction * image_width, image_width, image_height)
    }

    pub fn is_valid(&self) -> bool {
        self.image_width > 0.0
            && self.image_height > 0.0
            && self.x > 0.0
            && self.x < self.image_width
    }

    pub fn reflect_x(&self, x: f64) -> f64 {
        2.0 * self.x - x
    }
}

/// Position of an element relative to the axis. Negative `axis_distance`
/// means left of the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelPos {
    pub axis_distance: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
    On,
}

pub fn center(r: &Rect) -> Point2 {
    Point2::new(r.x + r.w / 2.0, r.y + r.h / 2.0)
}

pub fn mirror_rect(r: &Rect, axis: &SymmetryAxis) -> Rect {
    let c = center(r);
    Rect::from_center(Point2::new(axis.reflect_x(c.x), c.y), r.w, r.h)
}

pub fn rel_pos(r: &Rect, axis: &SymmetryAxis) -> RelPos {
    rel_pos_of_point(center(r), axis)
}

pub fn rel_pos_of_point(p: Point2, axis: &SymmetryAxis) -> RelPos {
    RelPos {
        axis_distance: p.x - axis.x,
        y: p.y,
    }
}

pub fn distance(p: Point2, q: Point2) -> f64 {
    (p.x - q.x).hypot(p.y - q.y)
}

/// Qualitative side of the axis; `eps` is in pixels.
pub fn orientation(r: &Rect, axis: &SymmetryAxis, eps: f64) -> Side {
    side_of(rel_pos(r, axis).axis_distance, eps)
}

pub fn side_of(axis_distance: f64, eps: f64) -> Side {
    if axis_distance.abs() <= eps {
        Side::On
    } else if axis_distance < -eps {
        Side::Left
    } else {
        Side::Right
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn axis50() -> SymmetryAxis {
        SymmetryAxis::new(50.0, 100.0, 100.0)
    }

    #[test]
    fn center_examples() {
        assert_eq!(
            center(&Rect::new(20.0, 30.0, 20.0, 20.0)),
            Point2::new(30.0, 40.0)
        );
        assert_eq!(
            center(&Rect::new(0.0, 0.0, 100.0, 50.0)),
            Point2::new(50.0, 25.0)
        );
        assert_eq!(
            center(&Rect::new(10.0, 10.0, 1.0, 1.0)),
            Point2::new(10.5, 10.5)
        );
    }

    #[test]
    fn mirror_examples() {
        let r = Rect::from_center(Point2::new(30.0, 40.0), 10.0, 20.0);
        let m = mirror_rect(&r, &axis50());
        assert_eq!(center(&m), Point2::new(70.0, 40.0));
        assert_eq!((m.w, m.h), (10.0, 20.0));

        let on = Rect::from_center(Point2::new(50.0, 12.0), 8.0, 4.0);
        assert_eq!(mirror_rect(&on, &axis50()), on);
    }

    #[test]
    fn rel_pos_examples() {
        let a = axis50();
        let at = |x, y| Rect::from_center(Point2::new(x, y), 2.0, 2.0);
        assert_eq!(
            rel_pos(&at(30.0, 40.0), &a),
            RelPos {
                axis_distance: -20.0,
                y: 40.0
            }
        );
        assert_eq!(
            rel_pos(&at(50.0, 10.0), &a),
            RelPos {
                axis_distance: 0.0,
                y: 10.0
            }
        );
        assert_eq!(
            rel_pos(&at(80.0, 5.0), &a),
            RelPos {
                axis_distance: 30.0,
                y: 5.0
            }
        );
    }

    #[test]
    fn distance_examples() {
        assert_eq!(distance(Point2::new(0.0, 0.0), Point2::new(3.0, 4.0)), 5.0);
        assert_eq!(distance(Point2::new(7.0, 2.0), Point2::new(7.0, 2.0)), 0.0);
        assert_relative_eq!(
            distance(Point2::new(1.0, 1.0), Point2::new(2.0, 2.0)),
            std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn orientation_examples() {
        let a = axis50();
        let at = |x| Rect::from_center(Point2::new(x, 10.0), 4.0, 4.0);
        assert_eq!(orientation(&at(30.0), &a, 2.0), Side::Left);
        assert_eq!(orientation(&at(51.0), &a, 2.0), Side::On);
        assert_eq!(orientation(&at(90.0), &a, 2.0), Side::Right);
    }

    #[test]
    fn angle_normalization() {
        assert_eq!(normalize_degrees(180.0), -180.0);
        assert_eq!(normalize_degrees(-180.0), -180.0);
        assert_eq!(normalize_degrees(190.0), -170.0);
        assert_eq!(normalize_degrees(-190.0), 170.0);
        assert_eq!(normalize_degrees(720.0), 0.0);
        // in-range values are returned bit-for-bit
        assert_eq!(normalize_degrees(86.66018973584922), 86.66018973584922);
        assert_eq!(normalize_degrees(-179.99999999999997), -179.99999999999997);
        assert!(Rotation3::new(540.0, -541.0, 179.5).is_normalized());
    }

    fn rect_strategy() -> impl Strategy<Value = Rect> {
        (0.0..1000.0f64, 0.0..1000.0f64, 0.1..200.0f64, 0.1..200.0f64)
            .prop_map(|(x, y, w, h)| Rect::new(x, y, w, h))
    }

    fn axis_strategy() -> impl Strategy<Value = SymmetryAxis> {
        (1.0..1200.0f64).prop_map(|x| SymmetryAxis::new(x, 1200.0, 1200.0))
    }

    fn point_strategy() -> impl Strategy<Value = Point2> {
        (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y)| Point2::new(x, y))
    }

    proptest! {
        #[test]
        fn mirror_is_involution(r in rect_strategy(), a in axis_strategy()) {
            let back = mirror_rect(&mirror_rect(&r, &a), &a);
            prop_assert!((back.x - r.x).abs() <= 1e-9);
            prop_assert!((back.y - r.y).abs() <= 1e-9);
            prop_assert!((back.w - r.w).abs() <= 1e-9);
            prop_assert!((back.h - r.h).abs() <= 1e-9);
        }

        #[test]
        fn mirror_negates_axis_distance(r in rect_strategy(), a in axis_strategy()) {
            let p = rel_pos(&r, &a);
            let q = rel_pos(&mirror_rect(&r, &a), &a);
            prop_assert!((p.axis_distance + q.axis_distance).abs() <= 1e-9);
            prop_assert!((p.y - q.y).abs() <= 1e-9);
        }

        #[test]
        fn triangle_inequality(p in point_strategy(), q in point_strategy(), s in point_strategy()) {
            prop_assert!(distance(p, s) <= distance(p, q) + distance(q, s) + 1e-9);
            prop_assert_eq!(distance(p, q), distance(q, p));
        }

        #[test]
        fn on_axis_survives_mirroring(r in rect_strategy(), a in axis_strategy(), eps in 0.0..50.0f64) {
            if orientation(&r, &a, eps) == Side::On {
                // round-off in the reflection may push a boundary case a hair outside eps
                let m = mirror_rect(&r, &a);
                prop_assert_eq!(orientation(&m, &a, eps + 1e-9), Side::On);
            }
        }
    }
}
