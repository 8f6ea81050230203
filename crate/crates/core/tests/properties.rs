mod common;

use biasprobe::analysis::{aggregate_encoders, loess_fit, summarize_groups};
use biasprobe::metrics::{
    association_score, bias_amplification, compute_suite, cosine, differential_association,
    diffusion_bias, mcas, AssociationSuite, BiasRow,
};
use biasprobe::store::{Category, Dominance, StudySet};
use proptest::prelude::*;

fn nonzero_vec(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim)
        .prop_filter("non-zero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
}

fn sets(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(nonzero_vec(dim), 1..=10)
}

fn study(dim: usize) -> impl Strategy<Value = StudySet<f64>> {
    (sets(dim), sets(dim), sets(dim), sets(dim), sets(dim), nonzero_vec(dim), nonzero_vec(dim)).prop_map(
        |(a_images, b_images, a_texts, b_texts, target_images, p, k)| StudySet {
            concept: "c".into(),
            encoder: "e".into(),
            target_image_ids: (0..target_images.len()).map(|i| i.to_string()).collect(),
            a_images,
            b_images,
            a_texts,
            b_texts,
            target_images,
            target_prompt_text: p,
            target_keyword_text: k,
        },
    )
}

fn any_study() -> impl Strategy<Value = StudySet<f64>> {
    (2usize..=8).prop_flat_map(study)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn antisymmetry(set in any_study()) {
        let w = &set.target_prompt_text;
        let ab = differential_association(w, &set.a_images, &set.b_images).unwrap();
        let ba = differential_association(w, &set.b_images, &set.a_images).unwrap();
        prop_assert!((ab + ba).abs() <= 1e-12);
        let ab = association_score(&set.target_images, &set.a_texts, &set.b_texts).unwrap();
        let ba = association_score(&set.target_images, &set.b_texts, &set.a_texts).unwrap();
        prop_assert!((ab + ba).abs() <= 1e-12);
    }

    #[test]
    fn positive_scale_invariance(set in any_study(), k in 1e-3f64..1e3) {
        let scale = |vs: &Vec<Vec<f64>>| vs.iter().map(|v| v.iter().map(|x| x * k).collect()).collect::<Vec<Vec<f64>>>();
        let mut scaled = set.clone();
        scaled.a_images = scale(&set.a_images);
        scaled.b_texts = scale(&set.b_texts);
        scaled.target_images = scale(&set.target_images);
        scaled.target_keyword_text = set.target_keyword_text.iter().map(|x| x * k).collect();
        let a = compute_suite(&set).unwrap();
        let b = compute_suite(&scaled).unwrap();
        for (x, y) in a.components().iter().zip(b.components()) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        prop_assert!((diffusion_bias(&a) - diffusion_bias(&b)).abs() <= 1e-12);
        prop_assert!((mcas(&a) - mcas(&b)).abs() <= 1e-12);
    }

    #[test]
    fn permutation_invariance_is_exact(set in any_study(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rng = common::rng(seed);
        let mut w = set.target_images.clone();
        let mut a = set.a_images.clone();
        let mut b = set.b_images.clone();
        w.shuffle(&mut rng);
        a.shuffle(&mut rng);
        b.shuffle(&mut rng);
        let before = association_score(&set.target_images, &set.a_images, &set.b_images).unwrap();
        let after = association_score(&w, &a, &b).unwrap();
        prop_assert_eq!(before.to_bits(), after.to_bits());
    }

    #[test]
    fn ranges(set in any_study()) {
        let s = compute_suite(&set).unwrap();
        for c in s.components() {
            prop_assert!((-2.0..=2.0).contains(&c));
        }
        let d = diffusion_bias(&s);
        prop_assert!((0.0..=2.0).contains(&d));
        if let Some(a) = bias_amplification(&s, 1e-9) {
            prop_assert!(a >= 0.0);
        }
        let c = cosine(&set.target_prompt_text, &set.target_keyword_text).unwrap();
        prop_assert!((-1.0..=1.0).contains(&c));
    }

    #[test]
    fn identical_sides_are_neutral(set in any_study()) {
        let mut n = set.clone();
        n.b_images = n.a_images.clone();
        n.b_texts = n.a_texts.clone();
        let s = compute_suite(&n).unwrap();
        prop_assert_eq!(s.components(), [0.0; 4]);
        prop_assert_eq!(mcas(&s), 0.0);
        prop_assert_eq!(diffusion_bias(&s), 0.0);
        prop_assert_eq!(bias_amplification(&s, 1e-9), None);
    }

    #[test]
    fn oracle_equivalence(set in any_study()) {
        let s = compute_suite(&set).unwrap();
        let o = common::oracle::suite(&set);
        for (x, y) in s.components().iter().zip(o) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn aggregation_is_linear(
        comps in prop::collection::vec(prop::array::uniform4(-1.0f64..1.0), 1..=6),
        k in -3.0f64..3.0,
    ) {
        let suites: Vec<AssociationSuite<f64>> = comps.iter().enumerate()
            .map(|(i, c)| AssociationSuite::new("x", format!("e{i}"), c[0], c[1], c[2], c[3]))
            .collect();
        let scaled: Vec<AssociationSuite<f64>> = suites.iter()
            .map(|s| AssociationSuite::new("x", s.encoder.clone(), s.ii * k, s.itp * k, s.it * k, s.tt * k))
            .collect();
        let m = aggregate_encoders(&suites).unwrap();
        let ms = aggregate_encoders(&scaled).unwrap();
        for (x, y) in m.components().iter().zip(ms.components()) {
            prop_assert!((x * k - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn summary_consistency(
        deltas in prop::collection::vec((0.0f64..0.2, 0.5f64..30.0, any::<bool>()), 2..40),
    ) {
        let mut rows: Vec<BiasRow<f64>> = deltas.iter().enumerate().map(|(i, &(d, a, male))| BiasRow {
            concept: format!("c{i}"),
            keyword: String::new(),
            category: Category::Object,
            dominance: if male { Dominance::MaleDominated } else { Dominance::FemaleDominated },
            mcas: 0.0,
            delta: d,
            alpha: Some(a),
            alpha_defined: true,
        }).collect();
        rows[0].dominance = Dominance::MaleDominated;
        rows[1].dominance = Dominance::FemaleDominated;
        let s = summarize_groups(&rows).unwrap();
        prop_assert_eq!(s[2].n, s[0].n + s[1].n);
        let weighted = (s[0].delta_mean * s[0].n as f64 + s[1].delta_mean * s[1].n as f64) / s[2].n as f64;
        prop_assert!((weighted - s[2].delta_mean).abs() <= 1e-12);
        for g in &s {
            prop_assert!(g.delta_min <= g.delta_mean && g.delta_mean <= g.delta_max);
            prop_assert!(g.alpha_min.unwrap() <= g.alpha_mean.unwrap() && g.alpha_mean.unwrap() <= g.alpha_max.unwrap());
        }
    }

    #[test]
    fn loess_reproduces_low_degree_polynomials(
        xs in prop::collection::btree_set(0u32..1000, 5..30),
        c in prop::array::uniform3(-5.0f64..5.0),
        degree in 1usize..=2,
    ) {
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| {
            let x = x as f64 / 1000.0;
            let quad = if degree == 2 { c[2] * x * x } else { 0.0 };
            (x, c[0] + c[1] * x + quad)
        }).collect();
        let fit = loess_fit(&pts, 1.0, degree).unwrap();
        for (x, y) in fit.fitted {
            let quad = if degree == 2 { c[2] * x * x } else { 0.0 };
            prop_assert!((y - (c[0] + c[1] * x + quad)).abs() <= 1e-6);
        }
    }
}
