use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::metrics::AssociationSuite;
use crate::scalar::{canonical_mean, Scalar};

pub const MEAN_ENCODER: &str = "mean";

/// Whether bias metrics are computed from the encoder-mean suite, or per
/// encoder and then averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMode {
    #[default]
    MeanThenMetrics,
    MetricsThenMean,
}

/// Componentwise mean of one concept's suites across encoders.
pub fn aggregate_encoders<T: Scalar>(
    suites: &[AssociationSuite<T>],
) -> Result<AssociationSuite<T>, AnalysisError> {
    let first = suites.first().ok_or(AnalysisError::EmptyInput)?;
    let mut seen = HashSet::new();
    for s in suites {
        if s.concept != first.concept {
            return Err(AnalysisError::MixedConcepts(
                first.concept.clone(),
                s.concept.clone(),
            ));
        }
        if !seen.insert(s.encoder.as_str()) {
            return Err(AnalysisError::DuplicateEncoder(s.encoder.clone()));
        }
    }
    let component = |f: fn(&AssociationSuite<T>) -> T| canonical_mean(suites.iter().map(f).collect());
    Ok(AssociationSuite::new(
        first.concept.clone(),
        MEAN_ENCODER,
        component(|s| s.ii),
        component(|s| s.itp),
        component(|s| s.it),
        component(|s| s.tt),
    ))
}

/// Groups suites by concept, preserving each concept's input order.
pub fn group_by_concept<T: Clone>(
    suites: &[AssociationSuite<T>],
) -> BTreeMap<String, Vec<AssociationSuite<T>>> {
    let mut out: BTreeMap<String, Vec<AssociationSuite<T>>> = BTreeMap::new();
    for s in suites {
        out.entry(s.concept.clone()).or_default().push(s.clone());
    }
    out
}
