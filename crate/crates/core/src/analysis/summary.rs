use std::fmt;

use serde::{Deserialize, Serialize};

use super::stats::{mean, min_max, std_error};
use super::{group_of, AnalysisError};
use crate::metrics::BiasRow;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    MaleDominated,
    FemaleDominated,
    Overall,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::MaleDominated, Group::FemaleDominated, Group::Overall];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::MaleDominated => "male_dominated",
            Group::FemaleDominated => "female_dominated",
            Group::Overall => "overall",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Min, max, mean and standard error of diffusion bias and amplification for
/// one group. Rows with undefined amplification count toward `n` and the
/// delta statistics only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary<T> {
    pub group: Group,
    pub n: usize,
    pub delta_min: T,
    pub delta_max: T,
    pub delta_mean: T,
    pub delta_stderr: Option<T>,
    pub alpha_min: Option<T>,
    pub alpha_max: Option<T>,
    pub alpha_mean: Option<T>,
    pub alpha_stderr: Option<T>,
    pub alpha_undefined_count: usize,
}

fn summarize_one<T: Scalar>(group: Group, rows: &[&BiasRow<T>]) -> Option<GroupSummary<T>> {
    let deltas: Vec<T> = rows.iter().map(|r| r.delta).collect();
    let alphas: Vec<T> = rows.iter().filter_map(|r| r.alpha).collect();
    let (delta_min, delta_max) = min_max(&deltas)?;
    let alpha_range = min_max(&alphas);
    Some(GroupSummary {
        group,
        n: rows.len(),
        delta_min,
        delta_max,
        delta_mean: mean(&deltas)?,
        delta_stderr: std_error(&deltas),
        alpha_min: alpha_range.map(|r| r.0),
        alpha_max: alpha_range.map(|r| r.1),
        alpha_mean: mean(&alphas),
        alpha_stderr: std_error(&alphas),
        alpha_undefined_count: rows.len() - alphas.len(),
    })
}

/// Summaries for the male-dominated, female-dominated and overall groups, in
/// that order.
pub fn summarize_groups<T: Scalar>(rows: &[BiasRow<T>]) -> Result<Vec<GroupSummary<T>>, AnalysisError> {
    Group::ALL
        .iter()
        .map(|&g| {
            let members: Vec<&BiasRow<T>> = rows
                .iter()
                .filter(|r| g == Group::Overall || group_of(r.dominance) == g)
                .collect();
            summarize_one(g, &members).ok_or(AnalysisError::EmptyGroup(g.as_str()))
        })
        .collect()
}

/// Ratios of group means, from unrounded values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRatios {
    pub delta_female_over_male: Option<f64>,
    pub delta_female_over_overall: Option<f64>,
    pub alpha_female_over_male: Option<f64>,
    pub alpha_female_over_overall: Option<f64>,
}

pub fn group_ratios<T: Scalar>(summaries: &[GroupSummary<T>]) -> GroupRatios {
    let get = |g: Group| summaries.iter().find(|s| s.group == g);
    let ratio = |num: Option<T>, den: Option<T>| match (num, den) {
        (Some(n), Some(d)) if d != T::zero() => Some((n / d).to_f64_lossy()),
        _ => None,
    };
    let (m, f, o) = (
        get(Group::MaleDominated),
        get(Group::FemaleDominated),
        get(Group::Overall),
    );
    let delta = |s: Option<&GroupSummary<T>>| s.map(|s| s.delta_mean);
    let alpha = |s: Option<&GroupSummary<T>>| s.and_then(|s| s.alpha_mean);
    GroupRatios {
        delta_female_over_male: ratio(delta(f), delta(m)),
        delta_female_over_overall: ratio(delta(f), delta(o)),
        alpha_female_over_male: ratio(alpha(f), alpha(m)),
        alpha_female_over_overall: ratio(alpha(f), alpha(o)),
    }
}

/// Externally reported group statistics to compare a recomputation against.
/// Any field may be absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSummary {
    pub group: Group,
    #[serde(default)]
    pub delta_min: Option<f64>,
    #[serde(default)]
    pub delta_max: Option<f64>,
    #[serde(default)]
    pub delta_mean: Option<f64>,
    #[serde(default)]
    pub alpha_min: Option<f64>,
    #[serde(default)]
    pub alpha_max: Option<f64>,
    #[serde(default)]
    pub alpha_mean: Option<f64>,
}

/// A reference value is consistent when `|recomputed - reference|` is at
/// most `max(absolute, relative * |reference|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub absolute: f64,
    pub relative: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        // half a unit in the second decimal, or 5%
        Tolerance {
            absolute: 0.005,
            relative: 0.05,
        }
    }
}

impl Tolerance {
    pub fn allows(&self, recomputed: f64, reference: f64) -> bool {
        (recomputed - reference).abs() <= self.absolute.max(self.relative * reference.abs())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub group: Group,
    pub statistic: String,
    pub recomputed: Option<f64>,
    pub reference: f64,
    pub consistent: bool,
}

/// Compares every reference value against the recomputed summaries. Both
/// numbers are kept in the result; nothing is adjusted.
pub fn compare_to_reference<T: Scalar>(
    summaries: &[GroupSummary<T>],
    reference: &[ReferenceSummary],
    tol: Tolerance,
) -> Vec<ReferenceCheck> {
    let mut out = Vec::new();
    for r in reference {
        let s = summaries.iter().find(|s| s.group == r.group);
        let f = |x: T| x.to_f64_lossy();
        let pairs: [(&str, Option<f64>, Option<f64>); 6] = [
            ("delta_min", r.delta_min, s.map(|s| f(s.delta_min))),
            ("delta_max", r.delta_max, s.map(|s| f(s.delta_max))),
            ("delta_mean", r.delta_mean, s.map(|s| f(s.delta_mean))),
            ("alpha_min", r.alpha_min, s.and_then(|s| s.alpha_min.map(f))),
            ("alpha_max", r.alpha_max, s.and_then(|s| s.alpha_max.map(f))),
            ("alpha_mean", r.alpha_mean, s.and_then(|s| s.alpha_mean.map(f))),
        ];
        for (name, reference, recomputed) in pairs {
            if let Some(reference) = reference {
                out.push(ReferenceCheck {
                    group: r.group,
                    statistic: name.to_string(),
                    recomputed,
                    reference,
                    consistent: recomputed.is_some_and(|v| tol.allows(v, reference)),
                });
            }
        }
    }
    out
}

/// Everything reported next to a summary table: group ratios, reference
/// comparisons and how many rows had undefined amplification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryNotes {
    pub ratios: GroupRatios,
    pub alpha_undefined_rows: usize,
    pub reference_checks: Vec<ReferenceCheck>,
}

impl SummaryNotes {
    pub fn mismatches(&self) -> impl Iterator<Item = &ReferenceCheck> {
        self.reference_checks.iter().filter(|c| !c.consistent)
    }

    /// Plain-text note lines, one per finding.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        let fmt_opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.4}"));
        let r = &self.ratios;
        out.push(format!(
            "mean delta ratio female/male = {}, female/overall = {}",
            fmt_opt(r.delta_female_over_male),
            fmt_opt(r.delta_female_over_overall)
        ));
        out.push(format!(
            "mean alpha ratio female/male = {}, female/overall = {}",
            fmt_opt(r.alpha_female_over_male),
            fmt_opt(r.alpha_female_over_overall)
        ));
        if self.alpha_undefined_rows > 0 {
            out.push(format!(
                "{} row(s) have undefined alpha (|tt| below epsilon) and are excluded from alpha statistics",
                self.alpha_undefined_rows
            ));
        }
        for c in self.mismatches() {
            out.push(format!(
                "MISMATCH {} {}: recomputed {} vs reference {}",
                c.group,
                c.statistic,
                fmt_opt(c.recomputed),
                c.reference
            ));
        }
        let consistent = self.reference_checks.iter().filter(|c| c.consistent).count();
        if !self.reference_checks.is_empty() {
            out.push(format!(
                "{consistent} of {} reference values consistent with recomputation",
                self.reference_checks.len()
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{Category, Dominance};

    fn row(d: Dominance, delta: f64, alpha: Option<f64>) -> BiasRow<f64> {
        BiasRow {
            concept: "x".into(),
            keyword: String::new(),
            category: Category::Sport,
            dominance: d,
            mcas: 0.0,
            delta,
            alpha_defined: alpha.is_some(),
            alpha,
        }
    }

    #[test]
    fn groups_and_exclusions() {
        use Dominance::*;
        let rows = vec![
            row(MaleDominated, 0.01, Some(1.0)),
            row(MaleDominated, 0.03, Some(2.0)),
            row(FemaleDominated, 0.05, None),
            row(FemaleDominated, 0.07, Some(9.0)),
        ];
        let s = summarize_groups(&rows).unwrap();
        assert_eq!(s[0].group, Group::MaleDominated);
        assert_eq!(s[0].n, 2);
        assert!((s[0].delta_mean - 0.02).abs() < 1e-15);
        assert_eq!(s[0].alpha_mean, Some(1.5));
        assert!((s[0].alpha_stderr.unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(s[1].alpha_undefined_count, 1);
        assert_eq!(s[1].alpha_stderr, None);
        assert_eq!(s[2].n, 4);
        assert_eq!((s[2].alpha_min, s[2].alpha_max), (Some(1.0), Some(9.0)));
    }

    #[test]
    fn empty_group() {
        let rows = vec![row(Dominance::MaleDominated, 0.01, Some(1.0))];
        assert_eq!(
            summarize_groups(&rows).unwrap_err(),
            AnalysisError::EmptyGroup("female_dominated")
        );
    }

    #[test]
    fn reference_flags() {
        use Dominance::*;
        let rows = vec![
            row(MaleDominated, 0.01, Some(1.0)),
            row(FemaleDominated, 0.07, Some(9.0)),
        ];
        let s = summarize_groups(&rows).unwrap();
        let reference = vec![ReferenceSummary {
            group: Group::MaleDominated,
            delta_min: None,
            delta_max: None,
            delta_mean: Some(0.01),
            alpha_min: None,
            alpha_max: None,
            alpha_mean: Some(3.0),
        }];
        let checks = compare_to_reference(&s, &reference, Tolerance::default());
        assert_eq!(checks.len(), 2);
        assert!(checks[0].consistent);
        assert!(!checks[1].consistent);
        assert_eq!(checks[1].reference, 3.0);
        assert_eq!(checks[1].recomputed, Some(1.0));
        let notes = SummaryNotes {
            ratios: group_ratios(&s),
            alpha_undefined_rows: 0,
            reference_checks: checks,
        };
        assert_eq!(notes.ratios.alpha_female_over_male, Some(9.0));
        assert!(notes.lines().iter().any(|l| l.starts_with("MISMATCH male_dominated alpha_mean")));
    }
}
