//! Uncertainty-aware evaluation of binary rankers against probabilistic
//! labels.
//!
//! Multi-annotator ratings rarely agree, and collapsing them into a single
//! binary "ground truth" hides that disagreement from evaluation. This crate
//! keeps the uncertainty in play:
//!
//! - [`labels`] ingests raw per-item rating multisets and aggregates them
//!   into soft labels (mean of normalized ratings) and hard labels
//!   (threshold or majority vote).
//! - [`metrics`] computes soft AUROC and soft AP from scores and soft labels
//!   in linear time after sorting, together with ROC/PR step curves and
//!   quadratic pairwise oracles. With binary labels the soft metrics reduce
//!   exactly to ordinary AUROC/AP.
//! - [`stability`] quantifies how stable model rankings are under annotation
//!   resampling: a seeded, parallelism-independent bootstrap with Spearman/
//!   Kendall rank correlations and exact sign tests.
//! - [`report`] assembles ordinary-vs-soft comparisons: rankings, rank-flip
//!   detection, and Pearson R² summaries, serialized canonically.
//! - [`io`] reads and writes the CSV formats used by the CLI.
//!
//! Numeric kernels are generic over the scalar type via [`scalar::Scalar`];
//! aliases below fix the common `f64` and `f32` instantiations.

pub mod error;
pub mod io;
pub mod json;
pub mod labels;
pub mod metrics;
pub mod numeric;
pub mod report;
pub mod scalar;
pub mod stability;

pub use error::{Error, LabelMass, Result};
pub use labels::{
    aggregate_mean, binarize_threshold, majority_vote, normalize_rating, AggregationPipeline,
    Binarization, TiePolicy,
};
pub use metrics::{
    canonical_sort, cumulative_counts, soft_ap_from_sorted, soft_ap_pairwise_oracle,
    soft_auroc_from_sorted, soft_auroc_pairwise_oracle, soft_auroc_tie_aware, DiagonalTerms,
    MetricName, MetricPair,
};
pub use report::{detect_flips, evaluate_models, summarize_r2, ComparisonReport};
pub use stability::{
    bootstrap_resample_item, bootstrap_stability, kendall_tau, pearson_r2, replicate_rng,
    sign_test, spearman_rho, BootstrapConfig, ModelRanking, StabilityReport,
};

/// `f64` instantiations, the default throughout the CLI.
pub type RatingScale64 = labels::RatingScale<f64>;
pub type SoftLabel64 = labels::SoftLabel<f64>;
pub type AnnotationItem64 = labels::AnnotationItem<f64>;
pub type AnnotationTable64 = labels::AnnotationTable<f64>;
pub type AggregationPipeline64 = labels::AggregationPipeline<f64>;
pub type ScoredItem64 = metrics::ScoredItem<f64>;
pub type LabeledScoreSet64 = metrics::LabeledScoreSet<f64>;
pub type CumulativeCounts64 = metrics::CumulativeCounts<f64>;
pub type MetricQuad64 = metrics::MetricQuad<f64>;
pub type ModelScores64 = stability::ModelScores<f64>;
pub type BootstrapConfig64 = stability::BootstrapConfig<f64>;

/// `f32` instantiations for memory-tight embedding of the kernels.
pub type RatingScale32 = labels::RatingScale<f32>;
pub type SoftLabel32 = labels::SoftLabel<f32>;
pub type AnnotationTable32 = labels::AnnotationTable<f32>;
pub type LabeledScoreSet32 = metrics::LabeledScoreSet<f32>;
pub type MetricQuad32 = metrics::MetricQuad<f32>;
