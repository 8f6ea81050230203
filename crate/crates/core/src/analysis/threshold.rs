use serde::{Deserialize, Serialize};

use super::stats::{mean, sample_stddev};
use crate::metrics::BiasRow;
use crate::scalar::Scalar;

pub const DEFAULT_DELTA_THRESHOLD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionSummary<T> {
    pub n: usize,
    pub concepts: Vec<String>,
    pub alpha_n: usize,
    pub alpha_mean: Option<T>,
    pub alpha_stddev: Option<T>,
    pub alpha_undefined: usize,
}

/// Rows split at a diffusion-bias threshold: `low` holds `delta <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport<T> {
    pub threshold: T,
    pub low: PartitionSummary<T>,
    pub high: PartitionSummary<T>,
}

impl<T: Scalar> ThresholdReport<T> {
    /// True when amplification is strictly less dispersed below the threshold.
    pub fn low_less_dispersed(&self) -> Option<bool> {
        Some(self.low.alpha_stddev? < self.high.alpha_stddev?)
    }
}

fn summarize<T: Scalar>(rows: &[&BiasRow<T>]) -> PartitionSummary<T> {
    let alphas: Vec<T> = rows.iter().filter_map(|r| r.alpha).collect();
    PartitionSummary {
        n: rows.len(),
        concepts: rows.iter().map(|r| r.concept.clone()).collect(),
        alpha_n: alphas.len(),
        alpha_mean: mean(&alphas),
        alpha_stddev: sample_stddev(&alphas),
        alpha_undefined: rows.len() - alphas.len(),
    }
}

pub fn threshold_report<T: Scalar>(rows: &[BiasRow<T>], threshold: T) -> ThresholdReport<T> {
    let (low, high): (Vec<&BiasRow<T>>, Vec<&BiasRow<T>>) =
        rows.iter().partition(|r| r.delta <= threshold);
    ThresholdReport {
        threshold,
        low: summarize(&low),
        high: summarize(&high),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::store::{Category, Dominance};

    fn row(delta: f64, alpha: f64) -> BiasRow<f64> {
        BiasRow {
            concept: format!("c{delta}"),
            keyword: String::new(),
            category: Category::Scene,
            dominance: Dominance::MaleDominated,
            mcas: 0.0,
            delta,
            alpha: Some(alpha),
            alpha_defined: true,
        }
    }

    #[test]
    fn all_zero_delta() {
        let rows = vec![row(0.0, 1.0), row(0.0, 2.0)];
        let r = threshold_report(&rows, 0.02);
        assert_eq!((r.low.n, r.high.n), (2, 0));
        assert_eq!(r.high.alpha_mean, None);
        assert_eq!(r.low_less_dispersed(), None);
    }

    #[test]
    fn straddling_counts() {
        // by hand: 0.0, 0.01, 0.02 are <= 0.02; 0.021, 0.05 are above
        let rows = vec![
            row(0.0, 1.0),
            row(0.01, 1.2),
            row(0.02, 1.4),
            row(0.021, 5.0),
            row(0.05, 20.0),
        ];
        let r = threshold_report(&rows, 0.02);
        assert_eq!((r.low.n, r.high.n), (3, 2));
        assert!((r.low.alpha_mean.unwrap() - 1.2).abs() < 1e-12);
        assert!((r.low.alpha_stddev.unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(r.low_less_dispersed(), Some(true));
    }
}
