use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read, Write};

use super::{FeatureVector, LabeledExample, LearningError, SymmetryClass};
use crate::learning::{FS2_NAMES, FS3_NAMES};

/// First line of every feature file; bump the version when slot layouts
/// change.
pub const FEATURE_LAYOUT_LINE: &str = "# feature-layout v1";

fn format_err(path: &str, message: impl ToString) -> LearningError {
    LearningError::Format {
        path: path.to_string(),
        message: message.to_string(),
    }
}

fn header(fs1_len: usize) -> Vec<String> {
    let mut h = vec!["image_id".to_string()];
    h.extend((0..fs1_len).map(|i| format!("fs1_{i}")));
    h.extend((0..FS2_NAMES.len()).map(|i| format!("fs2_{i}")));
    h.extend((0..FS3_NAMES.len()).map(|i| format!("fs3_{i}")));
    h.push("mask".into());
    h
}

/// Writes the layout line, then a CSV with one row per vector. Absent sets
/// leave their cells empty.
pub fn write_feature_csv<W: Write>(
    out: W,
    fs1_len: usize,
    rows: &[FeatureVector],
) -> Result<(), LearningError> {
    let mut out = out;
    let io = |e: std::io::Error| format_err("<output>", e);
    writeln!(
        out,
        "{FEATURE_LAYOUT_LINE} fs1={fs1_len} fs2={} fs3={} fs2=[{}] fs3=[{}]",
        FS2_NAMES.len(),
        FS3_NAMES.len(),
        FS2_NAMES.join(" "),
        FS3_NAMES.join(" ")
    )
    .map_err(io)?;
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| format_err("<output>", e);
    w.write_record(header(fs1_len)).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![r.image_id.clone()];
        for (set, len) in [
            (&r.fs1, fs1_len),
            (&r.fs2, FS2_NAMES.len()),
            (&r.fs3, FS3_NAMES.len()),
        ] {
            match set {
                Some(v) => rec.extend(v.iter().map(|x| format!("{x:?}"))),
                None => rec.extend(std::iter::repeat_n(String::new(), len)),
            }
        }
        rec.push(r.mask.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(io)
}

fn parse_set(path: &str, cells: &[&str], name: &str) -> Result<Option<Vec<f64>>, LearningError> {
    if cells.iter().all(|c| c.is_empty()) {
        return Ok(None);
    }
    cells
        .iter()
        .map(|c| {
            c.parse::<f64>()
                .map_err(|_| format_err(path, format!("bad {name} value `{c}`")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

pub fn read_feature_csv<R: Read>(
    input: R,
    path: &str,
) -> Result<Vec<FeatureVector>, LearningError> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader
        .read_line(&mut first)
        .map_err(|e| format_err(path, e))?;
    if !first.starts_with(FEATURE_LAYOUT_LINE) {
        return Err(format_err(
            path,
            format!("missing `{FEATURE_LAYOUT_LINE}` line"),
        ));
    }
    let mut r = csv::Reader::from_reader(reader);
    let hdr: Vec<String> = r
        .headers()
        .map_err(|e| format_err(path, e))?
        .iter()
        .map(String::from)
        .collect();
    let fs1_len = hdr.iter().filter(|h| h.starts_with("fs1_")).count();
    if hdr != header(fs1_len) {
        return Err(format_err(path, "header does not match the v1 layout"));
    }
    let (a, b) = (1 + fs1_len, 1 + fs1_len + FS2_NAMES.len());
    let c = b + FS3_NAMES.len();
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| format_err(path, e))?;
        let cells: Vec<&str> = rec.iter().collect();
        out.push(FeatureVector {
            image_id: cells[0].to_string(),
            fs1: parse_set(path, &cells[1..a], "fs1")?,
            fs2: parse_set(path, &cells[a..b], "fs2")?,
            fs3: parse_set(path, &cells[b..c], "fs3")?,
            mask: cells[c].parse().map_err(|e: String| format_err(path, e))?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HumanLabel {
    pub class: SymmetryClass,
    pub mean_symmetry: f64,
    pub response_variance: f64,
}

/// `image_id,class,mean_symmetry,response_variance`
pub fn read_labels_csv<R: Read>(
    input: R,
    path: &str,
) -> Result<Vec<(String, HumanLabel)>, LearningError> {
    let mut r = csv::Reader::from_reader(input);
    let expected = ["image_id", "class", "mean_symmetry", "response_variance"];
    let hdr = r.headers().map_err(|e| format_err(path, e))?.clone();
    if hdr.iter().collect::<Vec<_>>() != expected {
        return Err(format_err(
            path,
            format!("header must be `{}`", expected.join(",")),
        ));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| format_err(path, e))?;
        let num = |i: usize| {
            rec[i].parse::<f64>().map_err(|_| {
                format_err(
                    path,
                    format!("row {}: bad {} `{}`", line + 2, expected[i], &rec[i]),
                )
            })
        };
        let label = HumanLabel {
            class: rec[1].parse()?,
            mean_symmetry: num(2)?,
            response_variance: num(3)?,
        };
        if !(0.0..=1.0).contains(&label.mean_symmetry) {
            return Err(format_err(
                path,
                format!("row {}: mean_symmetry must lie in [0, 1]", line + 2),
            ));
        }
        if label.response_variance.is_nan() || label.response_variance < 0.0 {
            return Err(format_err(
                path,
                format!("row {}: response_variance must be non-negative", line + 2),
            ));
        }
        out.push((rec[0].to_string(), label));
    }
    Ok(out)
}

/// `image_id` followed by one raw response count per class, in class
/// order. Returns per-class shares.
pub fn read_counts_csv<R: Read>(
    input: R,
    path: &str,
) -> Result<HashMap<String, [f64; 4]>, LearningError> {
    let mut r = csv::Reader::from_reader(input);
    let hdr = r.headers().map_err(|e| format_err(path, e))?.clone();
    let mut expected = vec!["image_id"];
    expected.extend(SymmetryClass::ALL.iter().map(|c| c.as_str()));
    if hdr.iter().collect::<Vec<_>>() != expected {
        return Err(format_err(
            path,
            format!("header must be `{}`", expected.join(",")),
        ));
    }
    let mut out = HashMap::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| format_err(path, e))?;
        let mut counts = [0.0; 4];
        for (k, slot) in counts.iter_mut().enumerate() {
            *slot = rec[k + 1]
                .parse::<f64>()
                .ok()
                .filter(|c| *c >= 0.0)
                .ok_or_else(|| format_err(path, format!("bad count `{}`", &rec[k + 1])))?;
        }
        let total: f64 = counts.iter().sum();
        if total <= 0.0 {
            return Err(format_err(
                path,
                format!("image `{}` has no responses", &rec[0]),
            ));
        }
        out.insert(rec[0].to_string(), counts.map(|c| c / total));
    }
    Ok(out)
}

/// Pairs every feature vector with its label, keeping feature-file order.
/// Class-probability targets come from `counts` when given, else one-hot.
pub fn join_labels(
    features: Vec<FeatureVector>,
    labels: &[(String, HumanLabel)],
    counts: Option<&HashMap<String, [f64; 4]>>,
) -> Result<Vec<LabeledExample>, LearningError> {
    let by_id: HashMap<&str, &HumanLabel> = labels.iter().map(|(id, l)| (id.as_str(), l)).collect();
    features
        .into_iter()
        .map(|fv| {
            let l = by_id
                .get(fv.image_id.as_str())
                .ok_or_else(|| LearningError::UnlabelledImage(fv.image_id.clone()))?;
            let class_probabilities = match counts {
                Some(c) => *c
                    .get(&fv.image_id)
                    .ok_or_else(|| LearningError::UnlabelledImage(fv.image_id.clone()))?,
                None => l.class.one_hot(),
            };
            Ok(LabeledExample {
                features: fv,
                class: l.class,
                mean_symmetry: l.mean_symmetry,
                response_variance: l.response_variance,
                class_probabilities,
            })
        })
        .collect()
}
