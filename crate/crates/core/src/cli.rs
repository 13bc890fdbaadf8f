//! The `symsem` command line. Exit codes: 0 success, 1 environment
//! problem (I/O, configuration), 2 domain error (invalid descriptor,
//! query error, analysis failure).

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptor::{load_descriptor, DescriptorError, ImageDescriptor};
use crate::interpretation::{
    build_model, load_model, save_model, stats_csv_header, stats_csv_row,
    symmetrical_objects_stats, symmetry_stats, InterpretationError, InterpretationModel,
};
use crate::learning::{
    assemble_features, cross_validate, join_labels, read_counts_csv, read_feature_csv,
    read_labels_csv, write_feature_csv, Classifier, DecisionTreeClassifier, FeatureSelection,
    LabeledExample, LearningError, RegressionTree, DEFAULT_FS1_LAYERS,
};
use crate::manifest::RunManifest;
use crate::overlay::render_svg;
use crate::query::{evaluate, parse_query};
use crate::similarity::TaxonomyGraph;
use crate::symmetry::SymmetryConfig;

#[derive(Debug, Parser)]
#[command(
    name = "symsem",
    version,
    about = "Reflectional symmetry interpretation over image element descriptors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StatsScope {
    Patches,
    Objects,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a descriptor against the schema and its invariants.
    Validate { descriptor: PathBuf },
    /// Build the interpretation model of one descriptor.
    Analyze {
        descriptor: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Taxonomy TSV replacing the bundled one.
        #[arg(long)]
        taxonomy: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run a query against a model; reads one query per line from stdin
    /// when none is given.
    Query {
        model: PathBuf,
        query: Option<String>,
    },
    /// One CSV row of symmetry statistics per model.
    Stats {
        #[arg(required = true)]
        models: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "patches")]
        scope: StatsScope,
    },
    /// Write an SVG overlay of a model.
    Overlay {
        model: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        /// Background image reference written into the SVG.
        #[arg(long)]
        image: Option<String>,
    },
    /// Assemble a feature CSV from models and descriptors, matched by image id.
    Features {
        #[arg(long = "model")]
        models: Vec<PathBuf>,
        #[arg(long = "descriptor")]
        descriptors: Vec<PathBuf>,
        /// Comma-separated half-feature layers for fs1.
        #[arg(long, value_delimiter = ',')]
        layers: Option<Vec<String>>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Fit the classifier and regressor on all labelled examples.
    Train {
        feature_csv: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        counts: Option<PathBuf>,
        #[arg(long, default_value = "fs1+2+3")]
        features: FeatureSelection,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// k-fold cross validation; writes a JSON report and prints a summary.
    Eval {
        feature_csv: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        counts: Option<PathBuf>,
        #[arg(long, default_value = "fs1+2+3")]
        features: FeatureSelection,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn env(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<DescriptorError> for CliError {
    fn from(e: DescriptorError) -> Self {
        // an unreadable or malformed document is an input failure;
        // only a well-formed document breaking an invariant is a domain error
        match e {
            DescriptorError::Validation(ref v) => CliError::domain(
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join("\n"),
            ),
            other => CliError::env(other.to_string()),
        }
    }
}

impl From<InterpretationError> for CliError {
    fn from(e: InterpretationError) -> Self {
        match e {
            InterpretationError::Document(d) => d.into(),
            other => CliError::domain(other.to_string()),
        }
    }
}

impl From<LearningError> for CliError {
    fn from(e: LearningError) -> Self {
        match e {
            LearningError::Format { .. } => CliError::env(e.to_string()),
            other => CliError::domain(other.to_string()),
        }
    }
}

pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::env(format!("cannot write {}: {e}", show(path))))
}

fn open(path: &Path) -> Result<fs::File, CliError> {
    fs::File::open(path).map_err(|e| CliError::env(format!("cannot read {}: {e}", show(path))))
}

fn out_line(w: &mut dyn Write, s: &str) -> Result<(), CliError> {
    writeln!(w, "{s}").map_err(|e| CliError::env(format!("cannot write output: {e}")))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = write!(
                if e.use_stderr() {
                    &mut *io.stderr
                } else {
                    &mut *io.stdout
                },
                "{}",
                e.render()
            );
            return code;
        }
    };
    match dispatch(cli.command, io) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(io.stderr, "{}", e.message);
            e.code
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> Result<(), CliError> {
    let started = Instant::now();
    match cmd {
        Command::Validate { descriptor } => {
            let d = load_descriptor(&descriptor)?;
            out_line(
                io.stdout,
                &format!("ok: {} ({} elements)", d.image_id, d.elements.len()),
            )
        }
        Command::Analyze {
            descriptor,
            config,
            taxonomy,
            out,
        } => {
            let cfg = match &config {
                Some(p) => SymmetryConfig::load(p)
                    .map_err(|e| CliError::env(format!("{}: {e}", show(p))))?,
                None => SymmetryConfig::default(),
            };
            let tax = match &taxonomy {
                Some(p) => TaxonomyGraph::load(p)
                    .map_err(|e| CliError::env(format!("{}: {e}", show(p))))?,
                None => TaxonomyGraph::bundled(),
            };
            let d = load_descriptor(&descriptor)?;
            let m = build_model(&d, &cfg, &tax)?;
            save_model(&m, &out)?;
            let mut manifest = RunManifest::new("analyze");
            manifest.config_hash = Some(cfg.hash());
            manifest.inputs.push(show(&descriptor));
            manifest
                .inputs
                .extend(config.iter().chain(taxonomy.iter()).map(|p| show(p)));
            manifest.outputs.push(show(&out));
            out_line(io.stdout, &manifest.finish(started).to_json())
        }
        Command::Query { model, query } => {
            let m = load_model(&model)?;
            match query {
                Some(q) => run_query(&m, &q, io),
                None => {
                    let lines: Vec<String> = io
                        .stdin
                        .lines()
                        .collect::<Result<_, _>>()
                        .map_err(|e| CliError::env(format!("cannot read stdin: {e}")))?;
                    let mut worst = Ok(());
                    for line in lines.iter().filter(|l| !l.trim().is_empty()) {
                        if let Err(e) = run_query(&m, line, io) {
                            let _ = writeln!(io.stderr, "{}", e.message);
                            worst = Err(CliError::domain("one or more queries failed"));
                        }
                    }
                    worst
                }
            }
        }
        Command::Stats { models, scope } => {
            let loaded: Vec<Result<InterpretationModel, DescriptorError>> =
                models.par_iter().map(load_model).collect();
            out_line(io.stdout, stats_csv_header())?;
            let mut rows = 0;
            for (path, m) in models.iter().zip(loaded) {
                match m {
                    Ok(m) => {
                        let s = match scope {
                            StatsScope::Patches => symmetry_stats(&m),
                            StatsScope::Objects => symmetrical_objects_stats(&m),
                        };
                        out_line(io.stdout, &stats_csv_row(&m.image_id, &s))?;
                        rows += 1;
                    }
                    Err(e) => {
                        let _ = writeln!(io.stderr, "warning: skipping {}: {e}", show(path));
                    }
                }
            }
            if rows == 0 {
                return Err(CliError::env("no readable model"));
            }
            Ok(())
        }
        Command::Overlay { model, out, image } => {
            let m = load_model(&model)?;
            write_file(&out, render_svg(&m, image.as_deref()).as_bytes())?;
            let mut manifest = RunManifest::new("overlay");
            manifest.inputs.push(show(&model));
            manifest.outputs.push(show(&out));
            out_line(io.stdout, &manifest.finish(started).to_json())
        }
        Command::Features {
            models,
            descriptors,
            layers,
            out,
        } => {
            let layers = layers
                .unwrap_or_else(|| DEFAULT_FS1_LAYERS.iter().map(|s| s.to_string()).collect());
            let ms: Vec<InterpretationModel> = models
                .par_iter()
                .map(load_model)
                .collect::<Result<_, _>>()?;
            let ds: Vec<ImageDescriptor> = descriptors
                .par_iter()
                .map(load_descriptor)
                .collect::<Result<_, _>>()?;
            let mut order: Vec<&str> = Vec::new();
            for id in ms
                .iter()
                .map(|m| m.image_id.as_str())
                .chain(ds.iter().map(|d| d.image_id.as_str()))
            {
                if !order.contains(&id) {
                    order.push(id);
                }
            }
            let m_by: HashMap<&str, &InterpretationModel> =
                ms.iter().map(|m| (m.image_id.as_str(), m)).collect();
            let d_by: HashMap<&str, &ImageDescriptor> =
                ds.iter().map(|d| (d.image_id.as_str(), d)).collect();
            let rows = order
                .iter()
                .map(|id| {
                    assemble_features(id, d_by.get(id).copied(), m_by.get(id).copied(), &layers)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut buf = Vec::new();
            write_feature_csv(&mut buf, layers.len(), &rows)?;
            write_file(&out, &buf)?;
            let mut manifest = RunManifest::new("features");
            manifest
                .inputs
                .extend(models.iter().chain(&descriptors).map(|p| show(p)));
            manifest.outputs.push(show(&out));
            out_line(io.stdout, &manifest.finish(started).to_json())
        }
        Command::Train {
            feature_csv,
            labels,
            counts,
            features,
            seed,
            out,
        } => {
            let examples = load_examples(&feature_csv, &labels, counts.as_deref())?;
            let trained = train_all(&examples, features)?;
            write_file(&out, crate::descriptor::to_json_pretty(&trained).as_bytes())?;
            out_line(
                io.stdout,
                &format!(
                    "features={features} n={} training_accuracy={:.2}%",
                    examples.len(),
                    trained.training_accuracy * 100.0
                ),
            )?;
            let mut manifest = RunManifest::new("train");
            manifest.seed = Some(seed);
            manifest.inputs.extend(
                [&feature_csv, &labels]
                    .into_iter()
                    .chain(&counts)
                    .map(|p| show(p)),
            );
            manifest.outputs.push(show(&out));
            out_line(io.stdout, &manifest.finish(started).to_json())
        }
        Command::Eval {
            feature_csv,
            labels,
            counts,
            features,
            folds,
            seed,
            out,
        } => {
            let examples = load_examples(&feature_csv, &labels, counts.as_deref())?;
            let report = cross_validate(&examples, features, folds, seed)?;
            write_file(&out, report.to_json().as_bytes())?;
            out_line(io.stdout, &report.summary())?;
            let mut manifest = RunManifest::new("eval");
            manifest.seed = Some(seed);
            manifest.inputs.extend(
                [&feature_csv, &labels]
                    .into_iter()
                    .chain(&counts)
                    .map(|p| show(p)),
            );
            manifest.outputs.push(show(&out));
            out_line(io.stdout, &manifest.finish(started).to_json())
        }
    }
}

fn run_query(m: &InterpretationModel, text: &str, io: &mut Io<'_>) -> Result<(), CliError> {
    let q = parse_query(text).map_err(|e| {
        let caret = e.caret(text).map(|c| format!("\n{c}")).unwrap_or_default();
        CliError::domain(format!("{e}{caret}"))
    })?;
    let r = evaluate(&q, m);
    io.stdout
        .write_all(r.render().as_bytes())
        .map_err(|e| CliError::env(format!("cannot write output: {e}")))
}

fn load_examples(
    features: &Path,
    labels: &Path,
    counts: Option<&Path>,
) -> Result<Vec<LabeledExample>, CliError> {
    let fv = read_feature_csv(open(features)?, &show(features))?;
    let lb = read_labels_csv(open(labels)?, &show(labels))?;
    let ct = match counts {
        Some(p) => Some(read_counts_csv(open(p)?, &show(p))?),
        None => None,
    };
    Ok(join_labels(fv, &lb, ct.as_ref())?)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TrainedModels {
    pub features: FeatureSelection,
    pub classifier: DecisionTreeClassifier,
    pub regressor: RegressionTree,
    pub training_accuracy: f64,
}

fn train_all(
    examples: &[LabeledExample],
    sel: FeatureSelection,
) -> Result<TrainedModels, LearningError> {
    let x: Vec<Vec<f64>> = examples
        .iter()
        .map(|e| e.features.select(sel))
        .collect::<Result<_, _>>()?;
    let y: Vec<_> = examples.iter().map(|e| e.class).collect();
    let r: Vec<f64> = examples.iter().map(|e| e.mean_symmetry).collect();
    let classifier = DecisionTreeClassifier::fit(&x, &y)?;
    let regressor = RegressionTree::fit(&x, &r)?;
    let correct = x
        .iter()
        .zip(&y)
        .filter(|(v, c)| classifier.predict(v) == **c)
        .count();
    Ok(TrainedModels {
        features: sel,
        classifier,
        regressor,
        training_accuracy: correct as f64 / x.len() as f64,
    })
}
