mod common;

use biasprobe::analysis::{threshold_report, Group};
use biasprobe::pipeline::{regress, summarize, AuditConfig};
use biasprobe::store::default_prompt_manifest;

fn config(model: &str) -> AuditConfig {
    AuditConfig {
        reference: common::fixture_reference(model),
        ..AuditConfig::default()
    }
}

#[test]
fn fixture_rows_follow_builtin_catalog() {
    let manifest = default_prompt_manifest();
    for model in ["dalle2", "sd2"] {
        let rows = common::fixture_rows(model);
        let concepts = manifest.concepts();
        assert_eq!(rows.len(), 28);
        for (r, c) in rows.iter().zip(&concepts) {
            assert_eq!(r.concept, c.concept);
            assert_eq!(r.dominance, c.dominance);
            assert_eq!(r.category, c.category);
        }
    }
}

#[test]
fn dalle2_reference_is_consistent() {
    let s = summarize(&common::fixture_rows("dalle2"), &config("dalle2")).unwrap();
    assert_eq!(s.notes.reference_checks.len(), 18);
    assert_eq!(s.notes.mismatches().count(), 0, "{:?}", s.notes.lines());
    let male = &s.groups[0];
    assert_eq!(male.group, Group::MaleDominated);
    assert!((male.alpha_mean.unwrap() - 1.4757142857142858).abs() < 1e-12);
}

#[test]
fn sd2_male_alpha_mean_is_flagged() {
    let s = summarize(&common::fixture_rows("sd2"), &config("sd2")).unwrap();
    let flagged: Vec<_> = s.notes.mismatches().collect();
    assert_eq!(flagged.len(), 1, "{:?}", s.notes.lines());
    assert_eq!(flagged[0].group, Group::MaleDominated);
    assert_eq!(flagged[0].statistic, "alpha_mean");
    assert_eq!(flagged[0].reference, 3.15);
    assert!((flagged[0].recomputed.unwrap() - 1.6964285714285714).abs() < 1e-12);
}

#[test]
fn unrounded_delta_ratio() {
    let s = summarize(&common::fixture_rows("dalle2"), &AuditConfig::default()).unwrap();
    // 0.72 / 0.11 from the published delta column
    let r = s.notes.ratios.delta_female_over_male.unwrap();
    assert!((r - 0.72 / 0.11).abs() < 1e-9);
}

#[test]
fn threshold_partition_membership() {
    let rows = common::fixture_rows("dalle2");
    let t = threshold_report(&rows, 0.02);
    // all 14 male-dominated rows have delta <= 0.02, plus Badminton and Swimming
    assert_eq!(t.low.n, 16);
    assert!(t.low.concepts.contains(&"badminton".to_string()));
    assert!(t.low.concepts.contains(&"swimming".to_string()));
    assert!(!t.low.concepts.contains(&"librarian".to_string()));
    assert_eq!(t.high.n, 12);
}

#[test]
fn loess_over_published_points() {
    for model in ["dalle2", "sd2"] {
        let fit = regress(&common::fixture_rows(model), &Default::default()).unwrap();
        assert_eq!(fit.fitted.len(), 101);
        assert!(fit.fitted.iter().all(|p| p.1.is_finite()));
        assert_eq!(fit.fitted[0].0, 0.0);
    }
}
