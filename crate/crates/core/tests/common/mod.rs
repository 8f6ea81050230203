#![allow(dead_code)]

use std::path::PathBuf;

use biasprobe::metrics::BiasRow;
use biasprobe::store::StudySet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Naive double-loop formulas, written independently of the library: plain
/// accumulation in input order, no clamping, no sorting.
pub mod oracle {
    pub fn cos(u: &[f64], v: &[f64]) -> f64 {
        let mut dot = 0.0;
        let mut nu = 0.0;
        let mut nv = 0.0;
        for i in 0..u.len() {
            dot += u[i] * v[i];
            nu += u[i] * u[i];
            nv += v[i] * v[i];
        }
        dot / (nu.sqrt() * nv.sqrt())
    }

    pub fn s(w: &[f64], a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        let mut sa = 0.0;
        for x in a {
            sa += cos(w, x);
        }
        let mut sb = 0.0;
        for x in b {
            sb += cos(w, x);
        }
        sa / a.len() as f64 - sb / b.len() as f64
    }

    pub fn score(ws: &[Vec<f64>], a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        for w in ws {
            total += s(w, a, b);
        }
        total / ws.len() as f64
    }

    /// (ii, itp, it, tt)
    pub fn suite(set: &biasprobe::store::StudySet<f64>) -> [f64; 4] {
        [
            score(&set.target_images, &set.a_images, &set.b_images),
            s(&set.target_prompt_text, &set.a_images, &set.b_images),
            score(&set.target_images, &set.a_texts, &set.b_texts),
            s(&set.target_keyword_text, &set.a_texts, &set.b_texts),
        ]
    }

    pub fn mcas(c: [f64; 4]) -> f64 {
        c[0] + c[1] + c[2] + c[3]
    }

    pub fn delta(c: [f64; 4]) -> f64 {
        let d = c[0].abs() - c[3].abs();
        if d < 0.0 {
            -d
        } else {
            d
        }
    }

    pub fn alpha(c: [f64; 4], eps: f64) -> Option<f64> {
        if c[3].abs() < eps {
            None
        } else {
            Some(((c[1] + c[2]) / (c[3] * 2.0)).abs())
        }
    }
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
            return v;
        }
    }
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| random_vec(rng, dim)).collect()
}

/// Random study set with every member count in `1..=10` and dim in `2..=8`.
pub fn random_study_set(rng: &mut ChaCha8Rng) -> StudySet<f64> {
    let dim = rng.random_range(2..=8);
    let mut count = || rng.random_range(1..=10usize);
    let (na, nb, nta, ntb, nw) = (count(), count(), count(), count(), count());
    StudySet {
        concept: "c".into(),
        encoder: "e".into(),
        a_images: random_set(rng, na, dim),
        b_images: random_set(rng, nb, dim),
        a_texts: random_set(rng, nta, dim),
        b_texts: random_set(rng, ntb, dim),
        target_images: random_set(rng, nw, dim),
        target_image_ids: (0..nw).map(|i| format!("t{i}")).collect(),
        target_prompt_text: random_vec(rng, dim),
        target_keyword_text: random_vec(rng, dim),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_rows(model: &str) -> Vec<BiasRow<f64>> {
    let text = std::fs::read_to_string(fixture_path(&format!("{model}_rows.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn fixture_reference(model: &str) -> Vec<biasprobe::analysis::ReferenceSummary> {
    let text = std::fs::read_to_string(fixture_path(&format!("{model}_reference.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}
