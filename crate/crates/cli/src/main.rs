mod args;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biasprobe::analysis::{build_rows, ReferenceSummary};
use biasprobe::metrics::{AssociationSuite, BiasRow};
use biasprobe::pipeline::{
    audit_rows, audit_suites, regress, score_records, summarize, write_outputs, AuditConfig,
    AuditResult, Summary,
};
use biasprobe::report;
use biasprobe::store::{default_prompt_manifest, partition, scan_bundle, PromptManifest};
use biasprobe::synthetic::{generate, SyntheticConfig, DEFAULT_ENCODERS, PROMPTS_FILE};
use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, Format, Scoring, Source};

/// A data error: reported on stderr, exit status 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn context<T, E: std::fmt::Display>(r: Result<T, E>, what: impl std::fmt::Display) -> Result<T, Failure> {
    r.map_err(|e| Failure(format!("{what}: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate(a) => validate(a),
        Command::Audit(a) => audit(a),
        Command::Summarize(a) => summarize_cmd(a),
        Command::Regress(a) => regress_cmd(a),
        Command::Synth(a) => synth(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = context(std::fs::read_to_string(path), path.display())?;
    context(serde_json::from_str(&text), path.display())
}

/// `--manifest`, else the bundle's prompts.toml, else the built-in catalog.
fn prompts_for(manifest: Option<&Path>, bundle: Option<&Path>) -> Result<PromptManifest, Failure> {
    if let Some(path) = manifest {
        return Ok(PromptManifest::load(path)?);
    }
    if let Some(dir) = bundle {
        let path = dir.join(PROMPTS_FILE);
        if path.exists() {
            return Ok(PromptManifest::load(&path)?);
        }
    }
    Ok(default_prompt_manifest())
}

fn load_suites(source: &Source, prompts: &PromptManifest) -> Result<Option<Vec<AssociationSuite<f64>>>, Failure> {
    if let Some(dir) = &source.bundle {
        let (_, records) = biasprobe::store::load_bundle(dir)?;
        return Ok(Some(score_records(&records, prompts)?));
    }
    if let Some(path) = &source.suites {
        return Ok(Some(read_json(path)?));
    }
    Ok(None)
}

fn config_for(scoring: &Scoring, reference: Option<&Path>) -> Result<AuditConfig, Failure> {
    let reference: Vec<ReferenceSummary> = match reference {
        Some(p) => read_json(p)?,
        None => Vec::new(),
    };
    Ok(AuditConfig {
        epsilon: scoring.epsilon,
        aggregation: scoring.aggregation.into(),
        reference,
        ..AuditConfig::default()
    })
}

/// Bias rows from whichever source was given.
fn rows_from(source: &Source, scoring: &Scoring, config: &AuditConfig) -> Result<Vec<BiasRow<f64>>, Failure> {
    if let Some(path) = &source.rows {
        return read_json(path);
    }
    let prompts = prompts_for(scoring.manifest.as_deref(), source.bundle.as_deref())?;
    let suites = load_suites(source, &prompts)?.unwrap_or_default();
    Ok(build_rows(&suites, &prompts, config.epsilon, config.aggregation)?.1)
}

fn summary_text(summary: &Summary, format: Format) -> String {
    match format {
        Format::Md => report::summary_markdown(&summary.groups, &summary.notes),
        Format::Csv => report::summary_csv(&summary.groups),
        Format::Json => report::to_json(&SummaryJson {
            groups: &summary.groups,
            notes: &summary.notes,
        }),
    }
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    groups: &'a [biasprobe::analysis::GroupSummary<f64>],
    notes: &'a biasprobe::analysis::SummaryNotes,
}

fn print_notes(summary: &Summary) {
    for line in summary.notes.lines().iter().filter(|l| l.starts_with("MISMATCH")) {
        eprintln!("{line}");
    }
}

#[derive(Serialize)]
struct Finding {
    kind: String,
    message: String,
}

#[derive(Serialize)]
struct ValidationReport {
    bundle: String,
    ok: bool,
    model_name: Option<String>,
    encoders: Vec<String>,
    record_count: usize,
    study_sets: usize,
    findings: Vec<Finding>,
}

fn validate(a: args::ValidateArgs) -> Result<ExitCode, Failure> {
    let scan = scan_bundle(&a.bundle);
    let mut findings: Vec<Finding> = scan
        .findings
        .iter()
        .map(|e| Finding {
            kind: e.kind().to_string(),
            message: e.to_string(),
        })
        .collect();
    let mut study_sets = 0;
    if findings.is_empty() {
        match prompts_for(a.manifest.as_deref(), Some(&a.bundle)) {
            Ok(prompts) => match partition(&scan.records, &prompts) {
                Ok(sets) => study_sets = sets.len(),
                Err(e) => findings.push(Finding {
                    kind: "Partition".into(),
                    message: e.to_string(),
                }),
            },
            Err(Failure(msg)) => findings.push(Finding {
                kind: "PromptManifest".into(),
                message: msg,
            }),
        }
    }
    let report = ValidationReport {
        bundle: a.bundle.display().to_string(),
        ok: findings.is_empty(),
        model_name: scan.manifest.as_ref().map(|m| m.model_name.clone()),
        encoders: scan
            .manifest
            .as_ref()
            .map(|m| m.encoders.iter().map(|e| e.name.clone()).collect())
            .unwrap_or_default(),
        record_count: scan.records.len(),
        study_sets,
        findings,
    };
    if a.format == Some(Format::Json) {
        print!("{}", report::to_json(&report));
    } else if report.ok {
        println!(
            "ok: {} records, {} encoders, {} study sets",
            report.record_count,
            report.encoders.len(),
            report.study_sets
        );
    } else {
        for f in &report.findings {
            println!("{}: {}", f.kind, f.message);
        }
    }
    Ok(if report.ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn audit(a: args::AuditArgs) -> Result<ExitCode, Failure> {
    let mut config = config_for(&a.scoring, a.reference.as_deref())?;
    config.loess = a.loess.params();
    config.delta_threshold = a.threshold;

    let prompts = prompts_for(a.scoring.manifest.as_deref(), a.source.bundle.as_deref())?;
    let result = match load_suites(&a.source, &prompts)? {
        Some(suites) => audit_suites(&suites, &prompts, &config)?,
        None => {
            let rows: Vec<BiasRow<f64>> = read_json(a.source.rows.as_deref().expect("one source is required"))?;
            let (rows, summary, threshold, fit) = audit_rows(rows, &config)?;
            AuditResult {
                suites: Vec::new(),
                rows,
                summary,
                threshold,
                fit,
            }
        }
    };

    let title = "Bias amplification vs diffusion bias";
    let mut files: Vec<(PathBuf, String)> = result
        .files(a.svg.as_ref().map(|_| title))
        .into_iter()
        .filter(|(name, _)| !(result.suites.is_empty() && name == "scores.json"))
        .map(|(name, body)| {
            let path = match (&a.svg, name.as_str()) {
                (Some(svg), "plot.svg") => std::path::absolute(svg).unwrap_or_else(|_| svg.clone()),
                _ => PathBuf::from(name),
            };
            (path, body)
        })
        .collect();
    files.sort_by(|x, y| x.0.cmp(&y.0));
    context(write_outputs(&a.out, &files), a.out.display())?;

    if let Err(e) = &result.fit {
        eprintln!("warning: no LOESS curve: {e}");
    }
    print_notes(&result.summary);
    print!("{}", summary_text(&result.summary, a.format));
    Ok(ExitCode::SUCCESS)
}

fn summarize_cmd(a: args::SummarizeArgs) -> Result<ExitCode, Failure> {
    let config = config_for(&a.scoring, a.reference.as_deref())?;
    let rows = rows_from(&a.source, &a.scoring, &config)?;
    let summary = summarize(&rows, &config)?;
    print_notes(&summary);
    let text = summary_text(&summary, a.format);
    match &a.out {
        Some(dir) => {
            let ext = match a.format {
                Format::Json => "json",
                Format::Csv => "csv",
                Format::Md => "md",
            };
            let files = [(PathBuf::from(format!("summary.{ext}")), text)];
            context(write_outputs(dir, &files), dir.display())?;
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn regress_cmd(a: args::RegressArgs) -> Result<ExitCode, Failure> {
    let config = config_for(&a.scoring, None)?;
    let rows = rows_from(&a.source, &a.scoring, &config)?;
    let fit = regress(&rows, &a.loess.params())?;
    let (name, text) = match a.format {
        Format::Json => ("curve.json", report::to_json(&fit)),
        Format::Csv => ("curve.csv", report::curve_csv(&fit)),
        Format::Md => {
            let mut s = String::from("| δ | α̂ |\n|---|---|\n");
            for (x, y) in &fit.fitted {
                let _ = writeln!(s, "| {x:.4} | {y:.4} |");
            }
            ("curve.md", s)
        }
    };
    let mut files = Vec::new();
    if let Some(svg) = &a.svg {
        let body = report::scatter_svg(&rows, Some(&fit), "Bias amplification vs diffusion bias");
        files.push((std::path::absolute(svg).unwrap_or_else(|_| svg.clone()), body));
    }
    match &a.out {
        Some(dir) => {
            files.push((PathBuf::from(name), text));
            context(write_outputs(dir, &files), dir.display())?;
        }
        None => {
            if !files.is_empty() {
                context(write_outputs(Path::new("."), &files), "svg")?;
            }
            print!("{text}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn synth(a: args::SynthArgs) -> Result<ExitCode, Failure> {
    let mut config = match &a.config {
        Some(path) => SyntheticConfig::load(path)?,
        None => SyntheticConfig::standard(a.dim, &DEFAULT_ENCODERS, 0),
    };
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    let bundle = generate(&config)?;
    bundle.write(&a.out)?;
    println!(
        "wrote {} records ({} encoders, {} concepts) to {}",
        bundle.records.len(),
        config.encoders.len(),
        config.concepts.len(),
        a.out.display()
    );
    Ok(ExitCode::SUCCESS)
}
