//! Regenerates the descriptor fixtures under `tests/fixtures`.
//!
//!     cargo run -p symsem --example make_fixtures

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symsem::descriptor::{
    save_descriptor, ClassPrediction, ElementDescriptor, ElementKind, FeatureMap, HalfFeatures,
    ImageDescriptor, Joint, PoseDescriptor,
};
use symsem::geometry::{mirror_rect, Point2, Rect, Rotation3, SymmetryAxis};
use symsem::symmetry::lateral_partner;

const LAYER: &str = "conv5";

fn classes(labels: &[(&str, f64)]) -> Vec<ClassPrediction> {
    labels
        .iter()
        .map(|(l, s)| ClassPrediction {
            label: l.to_string(),
            score: *s,
        })
        .collect()
}

fn features(v: &[f64]) -> FeatureMap {
    FeatureMap::from([(LAYER.to_string(), v.to_vec())])
}

fn element(
    id: &str,
    kind: ElementKind,
    bbox: Rect,
    labels: &[(&str, f64)],
    feat: &[f64],
) -> ElementDescriptor {
    ElementDescriptor {
        id: id.into(),
        kind,
        bbox,
        classes: classes(labels),
        features: features(feat),
        features_mirrored: None,
        pose: None,
    }
}

/// Adds `right`, the reflection of `left`, with mirrored-crop features equal
/// to the left element's features.
fn mirrored(left: &ElementDescriptor, id: &str, axis: &SymmetryAxis) -> ElementDescriptor {
    let mut right = left.clone();
    right.id = id.into();
    right.bbox = mirror_rect(&left.bbox, axis);
    right.features = left
        .features
        .iter()
        .map(|(k, v)| (k.clone(), v.iter().rev().copied().collect()))
        .collect();
    right.features_mirrored = Some(left.features.clone());
    right
}

fn halves(n: usize, asym: f64) -> BTreeMap<String, HalfFeatures> {
    (1..=n)
        .map(|i| {
            let left: Vec<f64> = (0..6)
                .map(|k| ((i * 7 + k * 3) % 11) as f64 + 1.0)
                .collect();
            let right = left
                .iter()
                .enumerate()
                .map(|(k, x)| x + asym * k as f64)
                .collect();
            (
                format!("conv{i}"),
                HalfFeatures {
                    left,
                    right_mirrored: right,
                },
            )
        })
        .collect()
}

fn image(id: &str, w: f64, h: f64, elements: Vec<ElementDescriptor>) -> ImageDescriptor {
    ImageDescriptor {
        image_id: id.into(),
        width: w,
        height: h,
        source_path: None,
        half_features: halves(5, 0.0),
        elements,
    }
}

fn perfect() -> ImageDescriptor {
    let axis = SymmetryAxis::new(200.0, 400.0, 300.0);
    let win = element(
        "window_l",
        ElementKind::Patch,
        Rect::new(40.0, 40.0, 60.0, 80.0),
        &[("window", 0.8), ("door", 0.1)],
        &[0.9, 0.1, 0.4, 0.0, 0.2],
    );
    let col = element(
        "column_l",
        ElementKind::Patch,
        Rect::new(120.0, 60.0, 20.0, 200.0),
        &[("column", 0.7)],
        &[0.1, 0.8, 0.0, 0.3, 0.5],
    );
    let door = element(
        "door",
        ElementKind::Object,
        Rect::from_center(Point2::new(200.0, 220.0), 60.0, 120.0),
        &[("door", 0.9)],
        &[0.2, 0.2, 0.9, 0.1, 0.0],
    );
    let elements = vec![
        mirrored(&win, "window_r", &axis),
        win,
        mirrored(&col, "column_r", &axis),
        col,
        door,
    ];
    image("perfect", 400.0, 300.0, elements)
}

fn pose(joints: &[(&str, f64, f64)], head: Rotation3) -> PoseDescriptor {
    PoseDescriptor {
        joints: joints
            .iter()
            .map(|(n, x, y)| {
                (
                    n.to_string(),
                    Joint {
                        x: *x,
                        y: *y,
                        confidence: 0.9,
                    },
                )
            })
            .collect(),
        head: Some(head),
    }
}

/// Seated figure centred at `cx`; `knee_dx` moves both knees sideways.
fn seated(cx: f64, knee_dx: f64) -> Vec<(&'static str, f64, f64)> {
    vec![
        ("nose", cx, 150.0),
        ("neck", cx, 170.0),
        ("left_shoulder", cx + 20.0, 172.0),
        ("right_shoulder", cx - 20.0, 172.0),
        ("left_elbow", cx + 28.0, 205.0),
        ("right_elbow", cx - 26.0, 205.0),
        ("left_wrist", cx + 22.0, 235.0),
        ("right_wrist", cx - 20.0, 236.0),
        ("left_hip", cx + 12.0, 250.0),
        ("right_hip", cx - 12.0, 250.0),
        ("left_knee", cx + 14.0 + knee_dx, 275.0),
        ("right_knee", cx - 14.0 + knee_dx, 275.0),
        ("left_ankle", cx + 14.0 + knee_dx, 315.0),
        ("right_ankle", cx - 14.0 + knee_dx, 315.0),
    ]
}

fn person(
    id: &str,
    cx: f64,
    joints: Vec<(&str, f64, f64)>,
    head: Rotation3,
    feat: &[f64],
) -> ElementDescriptor {
    let mut e = element(
        id,
        ElementKind::Person,
        Rect::from_center(Point2::new(cx, 235.0), 70.0, 190.0),
        &[("person", 0.95)],
        feat,
    );
    e.pose = Some(pose(&joints, head));
    e
}

/// Two people side by side on a centred bench, mirrored in the upper body
/// but with both knees turned the same way and both heads turned the same
/// way; a third person stands alone on the left; window patches mirror.
fn bench_people() -> ImageDescriptor {
    let axis = SymmetryAxis::new(320.0, 640.0, 400.0);
    let feat = [0.5, 0.4, 0.3, 0.2, 0.1];
    let left = person(
        "person_a",
        280.0,
        seated(280.0, 25.0),
        Rotation3::new(25.0, 5.0, 0.0),
        &feat,
    );
    // Reflecting a figure whose knees lean the other way leaves both
    // pairs of legs leaning the same way in the image.
    let right_joints: Vec<(&str, f64, f64)> = seated(280.0, -25.0)
        .into_iter()
        .map(|(n, x, y)| {
            let partner: &'static str = Box::leak(lateral_partner(n).into_boxed_str());
            (partner, axis.reflect_x(x), y)
        })
        .collect();
    let mut right = person(
        "person_b",
        360.0,
        right_joints,
        Rotation3::new(25.0, 5.0, 0.0),
        &feat,
    );
    right.features_mirrored = Some(features(&feat));
    right.bbox = mirror_rect(&left.bbox, &axis);
    let lone = person(
        "person_c",
        60.0,
        seated(60.0, 0.0),
        Rotation3::new(-40.0, 0.0, 0.0),
        &[0.1, 0.9, 0.1, 0.0, 0.3],
    );
    let bench = element(
        "bench",
        ElementKind::Object,
        Rect::from_center(Point2::new(320.0, 300.0), 260.0, 50.0),
        &[("bench", 0.85), ("couch", 0.1)],
        &[0.3, 0.3, 0.3, 0.6, 0.1],
    );
    let win = element(
        "window_l",
        ElementKind::Patch,
        Rect::new(150.0, 30.0, 60.0, 70.0),
        &[("window", 0.9)],
        &[0.8, 0.1, 0.1, 0.2, 0.0],
    );
    let elements = vec![
        mirrored(&win, "window_r", &axis),
        win,
        left,
        right,
        lone,
        bench,
    ];
    image("bench_people", 640.0, 400.0, elements)
}

fn three_left_two_right() -> ImageDescriptor {
    let axis = SymmetryAxis::new(150.0, 300.0, 200.0);
    let mk = |id: &str, x: f64, y: f64, w: f64, h: f64, f: &[f64]| {
        element(
            id,
            ElementKind::Patch,
            Rect::new(x, y, w, h),
            &[("window", 0.6)],
            f,
        )
    };
    let l1 = mk("l1", 20.0, 20.0, 30.0, 40.0, &[1.0, 0.0, 0.2]);
    let l2 = mk("l2", 60.0, 100.0, 25.0, 25.0, &[0.0, 1.0, 0.2]);
    let l3 = mk("l3", 100.0, 150.0, 20.0, 30.0, &[0.3, 0.3, 1.0]);
    let mut r1 = mirrored(&l1, "r1", &axis);
    r1.bbox.x += 3.0;
    let mut r2 = mirrored(&l2, "r2", &axis);
    r2.bbox.y += 4.0;
    image(
        "three_left_two_right",
        300.0,
        200.0,
        vec![l1, l2, l3, r1, r2],
    )
}

/// `pairs` perfect patch pairs plus `lonely` unpartnered left patches.
fn stats_scene(id: &str, pairs: usize, lonely: usize) -> ImageDescriptor {
    let (w, h) = (1000.0, 600.0);
    let axis = SymmetryAxis::new(w / 2.0, w, h);
    let mut elements = Vec::new();
    for i in 0..pairs {
        let l = element(
            &format!("pair{i:03}_l"),
            ElementKind::Patch,
            Rect::new(
                20.0 + (i % 10) as f64 * 40.0,
                20.0 + (i / 10) as f64 * 40.0,
                30.0,
                30.0,
            ),
            &[("window", 0.7)],
            &[1.0, i as f64, 0.5],
        );
        elements.push(mirrored(&l, &format!("pair{i:03}_r"), &axis));
        elements.push(l);
    }
    for i in 0..lonely {
        elements.push(element(
            &format!("lone{i:03}"),
            ElementKind::Patch,
            Rect::new(
                10.0 + (i % 23) as f64 * 20.0,
                200.0 + (i / 23) as f64 * 40.0,
                12.0,
                30.0,
            ),
            &[("rock", 0.4)],
            &[0.2, 0.2, i as f64],
        ));
    }
    image(id, w, h, elements)
}

/// Near-mirror scene: each left patch may get a jittered mirror partner,
/// plus unrelated extras on the right.
fn pairing_scene(seed: u64) -> ImageDescriptor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (500.0, 400.0);
    let axis = SymmetryAxis::new(w / 2.0, w, h);
    let n_left = rng.gen_range(1..=5);
    let mut elements = Vec::new();
    let mut rights = 0;
    for i in 0..n_left {
        let bw = rng.gen_range(20.0..60.0);
        let bh = rng.gen_range(20.0..60.0);
        let x = rng.gen_range(5.0..(w / 2.0 - bw - 20.0));
        let y = rng.gen_range(5.0..(h - bh - 5.0));
        let f: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..1.0)).collect();
        let l = element(
            &format!("L{i}"),
            ElementKind::Patch,
            Rect::new(x, y, bw, bh),
            &[("window", 0.5)],
            &f,
        );
        if rights < 5 && rng.gen_bool(0.8) {
            let mut r = mirrored(&l, &format!("R{rights}"), &axis);
            r.bbox.x =
                (r.bbox.x + rng.gen_range(-8.0..8.0)).clamp(w / 2.0 + 15.0, w - r.bbox.w - 1.0);
            r.bbox.y = (r.bbox.y + rng.gen_range(-8.0..8.0)).clamp(1.0, h - r.bbox.h - 1.0);
            r.bbox.w *= rng.gen_range(0.9..1.1);
            r.bbox.h *= rng.gen_range(0.9..1.1);
            r.bbox.w = r.bbox.w.min(w - r.bbox.x - 1.0);
            r.bbox.h = r.bbox.h.min(h - r.bbox.y - 1.0);
            elements.push(r);
            rights += 1;
        }
        elements.push(l);
    }
    while rights < 5 && rng.gen_bool(0.4) {
        let bw = rng.gen_range(20.0..60.0);
        let bh = rng.gen_range(20.0..60.0);
        let x = rng.gen_range((w / 2.0 + 20.0)..(w - bw - 5.0));
        let y = rng.gen_range(5.0..(h - bh - 5.0));
        let f: Vec<f64> = (0..6).map(|_| rng.gen_range(0.0..1.0)).collect();
        elements.push(element(
            &format!("R{rights}"),
            ElementKind::Patch,
            Rect::new(x, y, bw, bh),
            &[("window", 0.5)],
            &f,
        ));
        rights += 1;
    }
    let mut d = image(&format!("pairing_{seed:02}"), w, h, elements);
    d.half_features = halves(5, 0.3);
    d
}

/// Two left and two right patches whose four cross divergences are far
/// apart.
fn separated_scene() -> ImageDescriptor {
    let axis = SymmetryAxis::new(250.0, 500.0, 400.0);
    let f = [0.4, 0.4, 0.2];
    let a = element(
        "A",
        ElementKind::Patch,
        Rect::new(40.0, 40.0, 40.0, 40.0),
        &[("window", 0.5)],
        &f,
    );
    let b = element(
        "B",
        ElementKind::Patch,
        Rect::new(120.0, 250.0, 40.0, 80.0),
        &[("window", 0.5)],
        &f,
    );
    let mut ra = mirrored(&a, "RA", &axis);
    ra.bbox.x += 2.0;
    let mut rb = mirrored(&b, "RB", &axis);
    rb.bbox.y += 30.0;
    let mut d = image("separated", 500.0, 400.0, vec![a, b, ra, rb]);
    d.half_features = halves(5, 0.1);
    d
}

fn invalid_bbox() -> ImageDescriptor {
    let mut d = perfect();
    d.image_id = "invalid_bbox".into();
    d.elements[0].bbox.w = 1000.0;
    d
}

fn write(dir: &Path, d: &ImageDescriptor) {
    let path = dir.join(format!("{}.json", d.image_id));
    save_descriptor(d, &path).expect("write fixture");
    println!("wrote {}", path.display());
}

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    fs::create_dir_all(&dir).expect("create fixture dir");
    write(&dir, &perfect());
    write(&dir, &bench_people());
    write(&dir, &three_left_two_right());
    write(&dir, &stats_scene("stats_232_26", 13, 206));
    write(&dir, &stats_scene("stats_77_2", 1, 75));
    write(&dir, &image("empty", 320.0, 240.0, Vec::new()));
    write(&dir, &separated_scene());
    for seed in 0..12 {
        write(&dir, &pairing_scene(seed));
    }
    let bad = dir.join("invalid");
    fs::create_dir_all(&bad).expect("create invalid dir");
    write(&bad, &invalid_bbox());
    fs::write(
        bad.join("bad_config.toml"),
        "divergence_threshold = \"high\"\n",
    )
    .expect("write config");
}
