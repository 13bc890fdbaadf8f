use super::{FeatureMask, FeatureVector, LearningError};
use crate::descriptor::{ElementKind, ImageDescriptor};
use crate::interpretation::{
    symmetrical_objects_stats, symmetry_stats, InterpretationModel, SymmetryStats,
};
use crate::similarity::cosine_similarity;

pub const FS2_NAMES: [&str; 9] = [
    "np",
    "nsp",
    "rel_sym",
    "mean_divergence",
    "mean_similarity",
    "min_divergence",
    "max_divergence",
    "min_similarity",
    "max_similarity",
];

pub const FS3_NAMES: [&str; 12] = [
    "no",
    "nso",
    "rel_sym",
    "mean_divergence",
    "mean_similarity",
    "min_divergence",
    "max_divergence",
    "min_similarity",
    "max_similarity",
    "symmetric_parts",
    "asymmetric_parts",
    "mean_pose_divergence",
];

/// Cosine of the left half and mirrored right half per layer, in `layers`
/// order.
pub fn assemble_fs1(d: &ImageDescriptor, layers: &[String]) -> Result<Vec<f64>, LearningError> {
    layers
        .iter()
        .map(|layer| {
            let half = d
                .half_features
                .get(layer)
                .ok_or_else(|| LearningError::MissingLayer {
                    image: d.image_id.clone(),
                    layer: layer.clone(),
                })?;
            cosine_similarity(&half.left, &half.right_mirrored).map_err(|source| {
                LearningError::Fs1 {
                    image: d.image_id.clone(),
                    source,
                }
            })
        })
        .collect()
}

fn min_max(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// The nine scope aggregates, and whether the scope held no pair or
/// single (divergence and similarity slots are then 0).
fn aggregates(
    m: &InterpretationModel,
    stats: &SymmetryStats,
    keep: impl Fn(ElementKind) -> bool,
) -> (Vec<f64>, bool) {
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
    let (dmin, dmax) = min_max(&divergences);
    let (smin, smax) = min_max(&similarities);
    let v = vec![
        stats.num_elements as f64,
        stats.num_symmetric as f64,
        stats.relative_symmetry,
        stats.mean_divergence.unwrap_or(0.0),
        stats.mean_similarity.unwrap_or(0.0),
        dmin,
        dmax,
        smin,
        smax,
    ];
    (v, divergences.is_empty())
}

/// Patch aggregates laid out as [`FS2_NAMES`]. The flag is set when no
/// patch pair or single exists.
pub fn assemble_fs2(m: &InterpretationModel) -> (Vec<f64>, bool) {
    aggregates(m, &symmetry_stats(m), |k| k == ElementKind::Patch)
}

/// Object/person aggregates laid out as [`FS3_NAMES`]. Flags: empty
/// object scope, and no pose report.
pub fn assemble_fs3(m: &InterpretationModel) -> (Vec<f64>, bool, bool) {
    let (mut v, empty) = aggregates(m, &symmetrical_objects_stats(m), |k| k.is_object_like());
    let sym: usize = m.pose_reports.iter().map(|r| r.symmetric_parts.len()).sum();
    let asym: usize = m
        .pose_reports
        .iter()
        .map(|r| r.asymmetric_parts.len())
        .sum();
    let no_pose = m.pose_reports.is_empty();
    let mean_pose = if no_pose {
        0.0
    } else {
        m.pose_reports
            .iter()
            .map(|r| r.mean_divergence)
            .sum::<f64>()
            / m.pose_reports.len() as f64
    };
    v.extend([sym as f64, asym as f64, mean_pose]);
    (v, empty, no_pose)
}

/// Builds a feature vector from whatever inputs are available: fs1 needs
/// the descriptor's half features, fs2/fs3 need the model.
pub fn assemble_features(
    image_id: &str,
    descriptor: Option<&ImageDescriptor>,
    model: Option<&InterpretationModel>,
    layers: &[String],
) -> Result<FeatureVector, LearningError> {
    let mut mask = FeatureMask::default();
    let fs1 = match descriptor {
        Some(d) if !d.half_features.is_empty() => Some(assemble_fs1(d, layers)?),
        _ => None,
    };
    mask.fs1 = fs1.is_some();
    let (fs2, fs3) = match model {
        Some(m) => {
            let (f2, e2) = assemble_fs2(m);
            let (f3, e3, np) = assemble_fs3(m);
            mask.fs2 = true;
            mask.fs3 = true;
            mask.fs2_empty = e2;
            mask.fs3_empty = e3;
            mask.fs3_no_pose = np;
            (Some(f2), Some(f3))
        }
        None => (None, None),
    };
    Ok(FeatureVector {
        image_id: image_id.to_string(),
        fs1,
        fs2,
        fs3,
        mask,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::HalfFeatures;
    use crate::interpretation::build_model;
    use crate::interpretation::tests::perfect_scene;
    use crate::learning::DEFAULT_FS1_LAYERS;
    use crate::similarity::TaxonomyGraph;
    use crate::symmetry::SymmetryConfig;

    fn layers() -> Vec<String> {
        DEFAULT_FS1_LAYERS.iter().map(|s| s.to_string()).collect()
    }

    fn with_halves(third_orthogonal: bool) -> ImageDescriptor {
        let mut d = perfect_scene();
        for (i, l) in layers().into_iter().enumerate() {
            let left = vec![1.0, 2.0, 0.0];
            let right = if third_orthogonal && i == 2 {
                vec![0.0, 0.0, 3.0]
            } else {
                left.clone()
            };
            d.half_features.insert(
                l,
                HalfFeatures {
                    left,
                    right_mirrored: right,
                },
            );
        }
        d
    }

    #[test]
    fn fs1_examples() {
        let v = assemble_fs1(&with_halves(false), &layers()).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-12));
        let v = assemble_fs1(&with_halves(true), &layers()).unwrap();
        assert_eq!(v[2], 0.0);
        let mut d = with_halves(false);
        d.half_features.remove("conv4");
        assert!(matches!(
            assemble_fs1(&d, &layers()),
            Err(LearningError::MissingLayer { layer, .. }) if layer == "conv4"
        ));
    }

    #[test]
    fn fs2_on_perfect_scene() {
        let m = build_model(
            &perfect_scene(),
            &SymmetryConfig::default(),
            &TaxonomyGraph::bundled(),
        )
        .unwrap();
        let (v, empty) = assemble_fs2(&m);
        assert!(!empty);
        assert_eq!(v.len(), FS2_NAMES.len());
        let s = symmetry_stats(&m);
        assert_eq!(v[2], s.relative_symmetry);
        assert_eq!(v[3], 0.0);
        assert!((v[4] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_scopes_are_flagged() {
        let mut d = perfect_scene();
        d.elements.clear();
        let m = build_model(&d, &SymmetryConfig::default(), &TaxonomyGraph::bundled()).unwrap();
        let (v, empty) = assemble_fs2(&m);
        assert!(empty && v.iter().all(|x| *x == 0.0));
        let (v3, empty3, no_pose) = assemble_fs3(&m);
        assert_eq!(v3.len(), FS3_NAMES.len());
        assert!(empty3 && no_pose && v3.iter().all(|x| *x == 0.0));

        let fv = assemble_features("e", Some(&d), Some(&m), &layers()).unwrap();
        assert!(fv.mask.fs2 && fv.mask.fs2_empty && !fv.mask.fs1 && fv.fs1.is_none());
    }
}
