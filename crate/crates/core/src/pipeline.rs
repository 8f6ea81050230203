//! End-to-end audit: study sets or precomputed suites in, every report
//! artifact out. Nothing here touches the filesystem except
//! [`write_outputs`].

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::aggregate::MEAN_ENCODER;
use crate::analysis::{
    build_rows, compare_to_reference, group_ratios, loess_fit_with, summarize_groups,
    threshold_report, AggregationMode, AnalysisError, GroupSummary, LoessError, LoessFit,
    LoessParams, ReferenceSummary, SummaryNotes, ThresholdReport, Tolerance,
    DEFAULT_DELTA_THRESHOLD,
};
use crate::metrics::{compute_suite, AssociationSuite, BiasRow, MetricsError, DEFAULT_EPSILON};
use crate::report;
use crate::store::{partition, EmbeddingRecord, PartitionError, PromptManifest};

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub epsilon: f64,
    pub loess: LoessParams,
    pub delta_threshold: f64,
    pub aggregation: AggregationMode,
    pub reference: Vec<ReferenceSummary>,
    pub tolerance: Tolerance,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            epsilon: DEFAULT_EPSILON,
            loess: LoessParams::default(),
            delta_threshold: DEFAULT_DELTA_THRESHOLD,
            aggregation: AggregationMode::default(),
            reference: Vec::new(),
            tolerance: Tolerance::default(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("concept '{concept}', encoder '{encoder}': {source}")]
    Metrics {
        concept: String,
        encoder: String,
        source: MetricsError,
    },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Loess(#[from] LoessError),
}

/// Summary tables plus their notes, computed from rows alone.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub groups: Vec<GroupSummary<f64>>,
    pub notes: SummaryNotes,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditResult {
    /// Per-encoder suites followed by the encoder-mean suites.
    pub suites: Vec<AssociationSuite<f64>>,
    pub rows: Vec<BiasRow<f64>>,
    pub summary: Summary,
    pub threshold: ThresholdReport<f64>,
    pub fit: Result<LoessFit<f64>, LoessError>,
}

pub fn score_records(
    records: &[EmbeddingRecord],
    prompts: &PromptManifest,
) -> Result<Vec<AssociationSuite<f64>>, PipelineError> {
    partition(records, prompts)?
        .iter()
        .map(|set| {
            compute_suite(set).map_err(|source| PipelineError::Metrics {
                concept: set.concept.clone(),
                encoder: set.encoder.clone(),
                source,
            })
        })
        .collect()
}

pub fn summarize(rows: &[BiasRow<f64>], config: &AuditConfig) -> Result<Summary, PipelineError> {
    let groups = summarize_groups(rows)?;
    let notes = SummaryNotes {
        ratios: group_ratios(&groups),
        alpha_undefined_rows: rows.iter().filter(|r| r.alpha.is_none()).count(),
        reference_checks: compare_to_reference(&groups, &config.reference, config.tolerance),
    };
    Ok(Summary { groups, notes })
}

/// LOESS of amplification on diffusion bias over rows with defined amplification.
pub fn regress(rows: &[BiasRow<f64>], params: &LoessParams) -> Result<LoessFit<f64>, LoessError> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.alpha.map(|a| (r.delta, a)))
        .collect();
    loess_fit_with(&points, params)
}

/// Rows, their summary, the threshold report and the LOESS fit (which may fail
/// without failing the audit).
pub type RowAudit = (Vec<BiasRow<f64>>, Summary, ThresholdReport<f64>, Result<LoessFit<f64>, LoessError>);

pub fn audit_rows(rows: Vec<BiasRow<f64>>, config: &AuditConfig) -> Result<RowAudit, PipelineError> {
    config.loess.check()?;
    let summary = summarize(&rows, config)?;
    let threshold = threshold_report(&rows, config.delta_threshold);
    let fit = regress(&rows, &config.loess);
    Ok((rows, summary, threshold, fit))
}

/// Audit from precomputed per-encoder (or already averaged) suites.
pub fn audit_suites(
    suites: &[AssociationSuite<f64>],
    prompts: &PromptManifest,
    config: &AuditConfig,
) -> Result<AuditResult, PipelineError> {
    config.loess.check()?;
    let (means, rows) = build_rows(suites, prompts, config.epsilon, config.aggregation)?;
    let (rows, summary, threshold, fit) = audit_rows(rows, config)?;
    let per_encoder: Vec<AssociationSuite<f64>> =
        suites.iter().filter(|s| s.encoder != MEAN_ENCODER).cloned().collect();
    let all = if per_encoder.is_empty() {
        suites.to_vec()
    } else {
        per_encoder.into_iter().chain(means).collect()
    };
    Ok(AuditResult {
        suites: all,
        rows,
        summary,
        threshold,
        fit,
    })
}

pub fn audit_records(
    records: &[EmbeddingRecord],
    prompts: &PromptManifest,
    config: &AuditConfig,
) -> Result<AuditResult, PipelineError> {
    config.loess.check()?;
    let suites = score_records(records, prompts)?;
    audit_suites(&suites, prompts, config)
}

impl AuditResult {
    /// Output file names and contents. `plot.svg` is included when `svg_title`
    /// is given; `curve.csv` whenever the LOESS fit succeeded.
    pub fn files(&self, svg_title: Option<&str>) -> Vec<(String, String)> {
        let mut out = vec![
            ("scores.json".to_string(), report::to_json(&self.suites)),
            ("report.json".to_string(), report::to_json(&self.rows)),
            ("report.md".to_string(), report::rows_markdown(&self.rows)),
            ("summary.csv".to_string(), report::summary_csv(&self.summary.groups)),
            ("summary.md".to_string(), report::summary_markdown(&self.summary.groups, &self.summary.notes)),
            ("notes.json".to_string(), report::to_json(&self.summary.notes)),
            ("threshold.json".to_string(), report::to_json(&self.threshold)),
        ];
        if let Ok(fit) = &self.fit {
            out.push(("curve.csv".to_string(), report::curve_csv(fit)));
        }
        if let Some(title) = svg_title {
            out.push(("plot.svg".to_string(), report::scatter_svg(&self.rows, self.fit.as_ref().ok(), title)));
        }
        out
    }
}

/// Writes every file into `dir`. If any write fails, files written by this
/// call are removed before the error is returned.
pub fn write_outputs(dir: &Path, files: &[(PathBuf, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut written: Vec<PathBuf> = Vec::new();
    for (name, body) in files {
        let path = if name.is_absolute() { name.clone() } else { dir.join(name) };
        if let Err(e) = std::fs::write(&path, body) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(e);
        }
        written.push(path);
    }
    Ok(())
}
