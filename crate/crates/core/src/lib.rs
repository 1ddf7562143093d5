//! Concern-oriented architecture recovery.
//!
//! The pipeline runs in five stages:
//!
//! 1. [`corpus`] scans a source tree and a labelled training tree and turns
//!    each file into a bag of identifier tokens.
//! 2. [`bayes`] trains one-vs-rest multinomial Naive Bayes models per
//!    concern, scores candidates on hold-out splits and keeps the best.
//! 3. [`recover`] classifies every entity into an affinity vector, assigns it
//!    to a concern cluster and keeps a content-hash cache so later versions
//!    only pay for files that changed.
//! 4. [`deps`] extracts entity-to-entity dependencies from import
//!    declarations and qualified references.
//! 5. [`viz`] renders the directory tree as Graphviz DOT, and [`metrics`]
//!    compares clusterings with MoJo/MoJoFM and diffs two recoveries.
//!
//! Per-entity work goes through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and a plain loop otherwise. Results never
//! depend on the degree of parallelism.

pub mod bayes;
pub mod corpus;
pub mod deps;
pub mod digest;
pub mod exec;
pub mod metrics;
pub mod recover;
pub mod synthetic;
pub mod viz;

mod textfmt;

pub use textfmt::write_atomic;

pub use bayes::{ClassifierModel, ConfusionMatrix, CandidateReport};
pub use corpus::{ScannedFile, SourceEntity, TokenBag, TrainingCorpus};
pub use digest::Digest;
pub use exec::Execution;
pub use recover::{EntityRecord, RecoveryCache, RecoveryConfig, RecoveryResult, WeightMeasure};


/// Name of the fallback cluster for entities unrelated to every concern.
pub const UNKNOWN: &str = "Unknown";
