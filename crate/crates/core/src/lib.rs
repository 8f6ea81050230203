//! Gender-association auditing for multistage text-to-image pipelines.
//!
//! Embedding bundles are partitioned into study sets; each yields four
//! component association scores (image-image, image-prompt, image-text,
//! text-text). Their sum is the composite score, and two internal metrics
//! follow: diffusion bias `| |ii| - |tt| |` and bias amplification
//! `| (itp + it) / (2 tt) |`. The analysis layer averages across encoders,
//! summarizes by dominance group and fits LOESS curves of amplification
//! against diffusion bias.
//!
//! Math is generic over [`Scalar`] (`f32` or `f64`); the loading pipeline
//! runs in `f64` and the aliases below name the `f64` instantiations.

pub mod analysis;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod store;
pub mod synthetic;

pub use metrics::{
    association_score, bias_amplification, compute_suite, cosine, differential_association,
    diffusion_bias, mcas, MetricsError, DEFAULT_EPSILON,
};
pub use scalar::Scalar;

pub type AssociationSuite = metrics::AssociationSuite<f64>;
pub type AssociationSuiteF32 = metrics::AssociationSuite<f32>;
pub type BiasRow = metrics::BiasRow<f64>;
pub type BiasRowF32 = metrics::BiasRow<f32>;
pub type StudySet = store::StudySet<f64>;
pub type StudySetF32 = store::StudySet<f32>;
pub type GroupSummary = analysis::GroupSummary<f64>;
pub type LoessFit = analysis::LoessFit<f64>;
pub type ThresholdReport = analysis::ThresholdReport<f64>;
