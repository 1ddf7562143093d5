//! One-vs-rest multinomial Naive Bayes with hold-out candidate selection.
//!
//! Each concern gets a binary model (documents of the concern against all
//! other documents) with Laplace smoothing. An entity's affinity to a
//! concern is that model's posterior for the positive class, so a vector of
//! affinities need not sum to one.

mod confusion;
mod format;
mod model;
mod train;

pub use confusion::ConfusionMatrix;
pub use format::{load_model, save_model, ModelFormatError, MODEL_FORMAT_VERSION};
pub use model::{ClassifierModel, ConcernParams};
pub use train::{
    candidate_id, render_reports, select_best, train, train_and_select, train_candidate,
    CandidateReport, Selection, TrainingOptions,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BayesError {
    #[error("smoothing alpha must be a positive finite real, got {0}")]
    InvalidAlpha(f64),
    #[error("hold-out fraction must lie strictly between 0 and 1, got {0}")]
    InvalidHoldout(f64),
    #[error("split seed {seed} leaves concern `{concern}` without training documents")]
    DegenerateSplit { concern: String, seed: u64 },
    #[error("no classifier candidates to choose from")]
    NoCandidates,
    #[error("all {0} classifier candidates had degenerate splits")]
    AllCandidatesFailed(usize),
}
