use std::collections::BTreeMap;

use super::aggregate::{aggregate_encoders, group_by_concept, AggregationMode, MEAN_ENCODER};
use super::AnalysisError;
use crate::metrics::{AssociationSuite, BiasRow};
use crate::scalar::{canonical_mean, Scalar};
use crate::store::PromptManifest;

fn index_by_concept<'a, T>(
    suites: &'a [AssociationSuite<T>],
    manifest: &PromptManifest,
) -> Result<BTreeMap<&'a str, Vec<&'a AssociationSuite<T>>>, AnalysisError> {
    let mut map: BTreeMap<&str, Vec<&AssociationSuite<T>>> = BTreeMap::new();
    for s in suites {
        if !manifest.target_prompts.iter().any(|t| t.concept == s.concept) {
            return Err(AnalysisError::UnlistedSuite(s.concept.clone()));
        }
        map.entry(s.concept.as_str()).or_default().push(s);
    }
    Ok(map)
}

/// One row per manifest concept, computed from that concept's mean suite.
/// Rows follow the manifest's category order.
pub fn build_bias_rows<T: Scalar>(
    mean_suites: &[AssociationSuite<T>],
    manifest: &PromptManifest,
    epsilon: T,
) -> Result<Vec<BiasRow<T>>, AnalysisError> {
    let index = index_by_concept(mean_suites, manifest)?;
    manifest
        .concepts()
        .into_iter()
        .map(|c| match index.get(c.concept.as_str()).map(Vec::as_slice) {
            Some([suite]) => Ok(BiasRow::from_suite(
                suite,
                &c.keyword,
                c.category,
                c.dominance,
                epsilon,
            )),
            Some([_, second, ..]) => Err(AnalysisError::DuplicateEncoder(second.encoder.clone())),
            _ => Err(AnalysisError::MissingSuite(c.concept.clone())),
        })
        .collect()
}

/// Alternative ordering of operations: bias metrics per encoder, then the
/// mean of each metric. Amplification is averaged over encoders where it is
/// defined.
pub fn build_bias_rows_per_encoder<T: Scalar>(
    suites: &[AssociationSuite<T>],
    manifest: &PromptManifest,
    epsilon: T,
) -> Result<Vec<BiasRow<T>>, AnalysisError> {
    let index = index_by_concept(suites, manifest)?;
    manifest
        .concepts()
        .into_iter()
        .map(|c| {
            let group = index
                .get(c.concept.as_str())
                .ok_or_else(|| AnalysisError::MissingSuite(c.concept.clone()))?;
            let per: Vec<BiasRow<T>> = group
                .iter()
                .map(|s| BiasRow::from_suite(s, &c.keyword, c.category, c.dominance, epsilon))
                .collect();
            let alphas: Vec<T> = per.iter().filter_map(|r| r.alpha).collect();
            let alpha = (!alphas.is_empty()).then(|| canonical_mean(alphas));
            Ok(BiasRow {
                concept: c.concept.clone(),
                keyword: c.keyword.clone(),
                category: c.category,
                dominance: c.dominance,
                mcas: canonical_mean(per.iter().map(|r| r.mcas).collect()),
                delta: canonical_mean(per.iter().map(|r| r.delta).collect()),
                alpha_defined: alpha.is_some(),
                alpha,
            })
        })
        .collect()
}

/// Aggregates per-encoder suites and builds rows under `mode`. Returns the
/// encoder-mean suites alongside the rows. Previously written mean suites
/// (encoder `mean`) are ignored when per-encoder suites are also present, so
/// a scores file can be fed back in unchanged.
#[allow(clippy::type_complexity)]
pub fn build_rows<T: Scalar>(
    suites: &[AssociationSuite<T>],
    manifest: &PromptManifest,
    epsilon: T,
    mode: AggregationMode,
) -> Result<(Vec<AssociationSuite<T>>, Vec<BiasRow<T>>), AnalysisError> {
    let owned: Vec<AssociationSuite<T>>;
    let suites = if suites.iter().any(|s| s.encoder != MEAN_ENCODER) {
        owned = suites.iter().filter(|s| s.encoder != MEAN_ENCODER).cloned().collect();
        &owned[..]
    } else {
        suites
    };
    let means = group_by_concept(suites)
        .values()
        .map(|g| aggregate_encoders(g))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = match mode {
        AggregationMode::MeanThenMetrics => build_bias_rows(&means, manifest, epsilon)?,
        AggregationMode::MetricsThenMean => build_bias_rows_per_encoder(suites, manifest, epsilon)?,
    };
    Ok((means, rows))
}
