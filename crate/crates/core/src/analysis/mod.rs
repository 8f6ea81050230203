//! Cross-encoder aggregation, per-concept rows, group summaries, the
//! diffusion-bias threshold split, and LOESS regression of amplification
//! against diffusion bias.

pub mod aggregate;
pub mod loess;
pub mod rows;
pub mod stats;
pub mod summary;
pub mod threshold;

use thiserror::Error;

pub use aggregate::{aggregate_encoders, group_by_concept, AggregationMode};
pub use loess::{loess_at, loess_fit, loess_fit_with, tricube, LoessError, LoessFit, LoessParams};
pub use rows::{build_bias_rows, build_bias_rows_per_encoder, build_rows};
pub use summary::{
    compare_to_reference, group_ratios, summarize_groups, Group, GroupRatios, GroupSummary,
    ReferenceCheck, ReferenceSummary, SummaryNotes, Tolerance,
};
pub use threshold::{threshold_report, PartitionSummary, ThresholdReport, DEFAULT_DELTA_THRESHOLD};

use crate::store::Dominance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("no suites to aggregate")]
    EmptyInput,
    #[error("encoder '{0}' appears more than once for one concept")]
    DuplicateEncoder(String),
    #[error("suites for different concepts passed to one aggregation: '{0}' and '{1}'")]
    MixedConcepts(String, String),
    #[error("no suite for concept '{0}'")]
    MissingSuite(String),
    #[error("suite for concept '{0}' is not listed in the prompt manifest")]
    UnlistedSuite(String),
    #[error("group '{0}' has no rows")]
    EmptyGroup(&'static str),
}

pub(crate) fn group_of(d: Dominance) -> Group {
    match d {
        Dominance::MaleDominated => Group::MaleDominated,
        Dominance::FemaleDominated => Group::FemaleDominated,
    }
}
