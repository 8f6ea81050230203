use std::path::PathBuf;

use biasprobe::analysis::loess::{DEFAULT_DEGREE, DEFAULT_SPAN};
use biasprobe::analysis::{AggregationMode, LoessParams};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "biasprobe", version, about = "Gender-association audit of text-to-image embedding bundles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a bundle's manifest, records and study-set partition.
    Validate(ValidateArgs),
    /// Score a bundle (or precomputed suites) and write every report file.
    Audit(AuditArgs),
    /// Group summaries of diffusion bias and amplification.
    Summarize(SummarizeArgs),
    /// LOESS curve of amplification against diffusion bias.
    Regress(RegressArgs),
    /// Generate a synthetic bundle with known association scores.
    Synth(SynthArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Md,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregation {
    MeanThenMetrics,
    MetricsThenMean,
}

impl From<Aggregation> for AggregationMode {
    fn from(a: Aggregation) -> Self {
        match a {
            Aggregation::MeanThenMetrics => AggregationMode::MeanThenMetrics,
            Aggregation::MetricsThenMean => AggregationMode::MetricsThenMean,
        }
    }
}

fn span(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("span must be in (0, 1], got {v}"))
    }
}

fn degree(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if (1..=2).contains(&v) {
        Ok(v)
    } else {
        Err(format!("degree must be 1 or 2, got {v}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {v}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a non-negative number, got {v}"))
    }
}

/// Where scores come from. Exactly one source is required.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Bundle directory (manifest.json + embeddings.jsonl).
    #[arg(long, value_name = "DIR")]
    pub bundle: Option<PathBuf>,
    /// JSON array of precomputed association suites.
    #[arg(long, value_name = "FILE")]
    pub suites: Option<PathBuf>,
    /// JSON array of precomputed bias rows (MCAS, delta, alpha per concept).
    #[arg(long, value_name = "FILE")]
    pub rows: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Scoring {
    /// Prompt manifest TOML. Defaults to the bundle's prompts.toml, then the
    /// built-in catalog.
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    /// Threshold below which |tt| leaves amplification undefined.
    #[arg(long, default_value_t = biasprobe::DEFAULT_EPSILON, value_parser = positive)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = Aggregation::MeanThenMetrics)]
    pub aggregation: Aggregation,
}

#[derive(Args, Debug, Clone)]
pub struct Loess {
    /// LOESS span, in (0, 1].
    #[arg(long, alias = "loess-span", default_value_t = DEFAULT_SPAN, value_parser = span)]
    pub span: f64,
    /// LOESS local polynomial degree (1 or 2).
    #[arg(long, alias = "loess-degree", default_value_t = DEFAULT_DEGREE, value_parser = degree)]
    pub degree: usize,
}

impl Loess {
    pub fn params(&self) -> LoessParams {
        LoessParams {
            span: self.span,
            degree: self.degree,
            ..LoessParams::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long, value_name = "DIR")]
    pub bundle: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
    /// Print the report as JSON instead of text.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub scoring: Scoring,
    #[command(flatten)]
    pub loess: Loess,
    /// Diffusion-bias threshold for the dispersion report.
    #[arg(long, default_value_t = biasprobe::analysis::DEFAULT_DELTA_THRESHOLD, value_parser = non_negative)]
    pub threshold: f64,
    /// Published group statistics (JSON) to check the recomputation against.
    #[arg(long, value_name = "FILE")]
    pub reference: Option<PathBuf>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Also write a scatter plot with the LOESS curve.
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
    /// Summary printed to stdout.
    #[arg(long, value_enum, default_value_t = Format::Md)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub scoring: Scoring,
    #[arg(long, value_name = "FILE")]
    pub reference: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Md)]
    pub format: Format,
    /// Write summary.{json,csv,md} here instead of stdout.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RegressArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub scoring: Scoring,
    #[command(flatten)]
    pub loess: Loess,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Synthetic config TOML; the standard 28-concept setup when absent.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Embedding dimension for the standard setup.
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}
