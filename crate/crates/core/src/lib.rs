//! Declarative interpretation of reflectional symmetry in images.
//!
//! The engine consumes per-image element descriptors (region patches,
//! detected objects, people with body pose, their CNN features and class
//! predictions), proposes mirror pairs and centred singles about a vertical
//! axis, scores them by spatial divergence, perceptual and semantic
//! similarity, and exposes the result as an immutable, queryable
//! [`interpretation::InterpretationModel`].

pub mod cli;
pub mod descriptor;
pub mod geometry;
pub mod interpretation;
pub mod learning;
pub mod manifest;
pub mod overlay;
pub mod query;
pub mod similarity;
pub mod symmetry;
