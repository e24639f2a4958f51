//! Instance-driven type alignment between two RDF knowledge graphs.
//!
//! The pipeline mirrors a two-stage map/reduce job run independently for each
//! graph:
//!
//! 1. [`ingest`] parses N-Triples dumps into a property table: one
//!    [`InstanceRecord`](ingest::InstanceRecord) per subject.
//! 2. [`stats`] tokenizes each instance, counts how many instances of each type
//!    contain each token, and consolidates the counts into per-type profiles
//!    with the skew filters applied.
//! 3. [`alignment`] scores every cross-graph type pair under the measures in
//!    [`similarity`].
//! 4. [`evaluation`] grades the resulting table against three kinds of ground
//!    truth: type pairs implied by `sameAs` links, blocking metrics over the
//!    instance pair space, and manual top-k judgments.
//!
//! [`synth`] produces two planted-alignment graphs for end-to-end checks.

pub mod alignment;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod ingest;
mod keyvalue;
pub mod similarity;
pub mod stats;
pub mod synth;

pub use alignment::{AlignmentEntry, AlignmentTable};
pub use error::{Error, Result};
pub use similarity::SimilarityMeasure;
pub use stats::{ProfileSet, TypeTokenProfile};
