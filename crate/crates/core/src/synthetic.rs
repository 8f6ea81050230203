//! Embedding bundles with closed-form association scores.
//!
//! Per encoder, two orthonormal anchors `u_A` (male) and `u_B` (female) are
//! built by Gram-Schmidt from seeded Gaussian draws. Attribute vectors of
//! both modalities are the anchors plus noise. A target with planted bias
//! `b` is `normalize(((1 + b) / 2) u_A + ((1 - b) / 2) u_B + noise)`, which
//! gives every noise-free association score the value
//! `b * sqrt(2 / (1 + b^2))`.
//!
//! Randomness comes from ChaCha8 (counter-based) seeded with `seed`, one
//! stream per encoder index, with standard normal draws taken in record
//! order.

use std::collections::HashSet;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::AssociationSuite;
use crate::store::prompts::{AttributePrompt, TargetPrompt, TextAttribute, TextTarget};
use crate::store::{
    concept_key, default_prompt_manifest, manifest_for, write_bundle, BundleManifest, Category,
    Dominance, EmbeddingRecord, Modality, PromptManifest, Role, Side, StoreError,
};

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";
pub const PROMPTS_FILE: &str = "prompts.toml";

/// The six CLIP image encoders used as the default encoder set.
pub const DEFAULT_ENCODERS: [&str; 6] = ["RN50", "RN50x4", "RN50x16", "RN101", "ViT-B/16", "ViT-B/32"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConcept {
    pub name: String,
    pub category: Category,
    pub dominance: Dominance,
    /// Bias planted in the target images, in `[-1, 1]`.
    pub planted_bias: f64,
    /// Bias planted in the prompt and keyword text; defaults to `planted_bias`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text_bias: Option<f64>,
}

impl SyntheticConcept {
    pub fn text_bias(&self) -> f64 {
        self.text_bias.unwrap_or(self.planted_bias)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    #[serde(default = "default_model_name")]
    pub model_name: String,
    pub dim: usize,
    pub encoders: Vec<String>,
    pub concepts: Vec<SyntheticConcept>,
    /// Vectors per attribute side per modality.
    pub attribute_count: usize,
    pub target_image_count: usize,
    #[serde(default)]
    pub noise_scale: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_model_name() -> String {
    "synthetic".to_string()
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
    #[error("exact ground truth needs noise_scale = 0 (got {0})")]
    NoiseNotZero(f64),
    #[error("unknown concept '{0}'")]
    UnknownConcept(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot write {path}: {reason}")]
    Io { path: String, reason: String },
}

impl SyntheticConfig {
    /// The 28 built-in concepts with planted biases evenly spaced over
    /// `[-1, 1]`, noise-free.
    pub fn standard(dim: usize, encoders: &[&str], seed: u64) -> Self {
        let concepts = default_prompt_manifest().concepts();
        let last = (concepts.len() - 1) as f64;
        SyntheticConfig {
            model_name: default_model_name(),
            dim,
            encoders: encoders.iter().map(|s| s.to_string()).collect(),
            concepts: concepts
                .iter()
                .enumerate()
                .map(|(i, c)| SyntheticConcept {
                    name: c.keyword.clone(),
                    category: c.category,
                    dominance: c.dominance,
                    planted_bias: -1.0 + 2.0 * i as f64 / last,
                    text_bias: None,
                })
                .collect(),
            attribute_count: 8,
            target_image_count: 10,
            noise_scale: 0.0,
            seed,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, SynthError> {
        let cfg: SyntheticConfig =
            toml::from_str(text).map_err(|e| SynthError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SynthError> {
        let text = std::fs::read_to_string(path).map_err(|e| SynthError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        if self.dim < 4 {
            return bad(format!("dim must be >= 4, got {}", self.dim));
        }
        if self.encoders.is_empty() {
            return bad("at least one encoder is required".into());
        }
        let mut seen = HashSet::new();
        if let Some(e) = self.encoders.iter().find(|e| !seen.insert(e.as_str())) {
            return bad(format!("encoder '{e}' listed twice"));
        }
        if self.concepts.is_empty() {
            return bad("at least one concept is required".into());
        }
        let mut keys = HashSet::new();
        for c in &self.concepts {
            if !keys.insert(concept_key(&c.name)) {
                return bad(format!("concept '{}' listed twice", c.name));
            }
            for b in [c.planted_bias, c.text_bias()] {
                if !(b.abs() <= 1.0) {
                    return bad(format!("bias {b} for '{}' is outside [-1, 1]", c.name));
                }
            }
        }
        if self.attribute_count == 0 || self.target_image_count == 0 {
            return bad("attribute_count and target_image_count must be positive".into());
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return bad(format!("noise_scale must be finite and >= 0, got {}", self.noise_scale));
        }
        Ok(())
    }

    pub fn prompt_manifest(&self) -> PromptManifest {
        let builtin = default_prompt_manifest();
        let words = |side: Side| -> Vec<String> {
            let pool: Vec<&str> = builtin
                .text_attributes
                .iter()
                .filter(|t| t.gender == side)
                .map(|t| t.word.as_str())
                .collect();
            (0..self.attribute_count)
                .map(|i| match pool.get(i) {
                    Some(w) => w.to_string(),
                    None => format!("{}{}", pool[i % pool.len()], i / pool.len()),
                })
                .collect()
        };
        PromptManifest {
            attribute_prompts: [(Side::A, "an image of a man"), (Side::B, "an image of a woman")]
                .into_iter()
                .map(|(gender, p)| AttributePrompt {
                    prompt: p.to_string(),
                    gender,
                    images_per_prompt: self.attribute_count,
                })
                .collect(),
            target_prompts: self
                .concepts
                .iter()
                .map(|c| TargetPrompt {
                    prompt: target_prompt(&c.name),
                    concept: concept_key(&c.name),
                    category: c.category,
                    dominance: c.dominance,
                    images_per_prompt: self.target_image_count,
                })
                .collect(),
            text_attributes: [Side::A, Side::B]
                .into_iter()
                .flat_map(|side| words(side).into_iter().map(move |word| TextAttribute { word, gender: side }))
                .collect(),
            text_targets: self
                .concepts
                .iter()
                .map(|c| TextTarget {
                    keyword: c.name.clone(),
                    concept: concept_key(&c.name),
                })
                .collect(),
        }
    }
}

fn target_prompt(name: &str) -> String {
    format!("an image of {}", name.to_lowercase())
}

/// Closed-form association score for a target with planted bias `b`.
pub fn planted_score(b: f64) -> f64 {
    b * (2.0 / (1.0 + b * b)).sqrt()
}

pub fn ground_truth_suite(config: &SyntheticConfig, concept: &str) -> Result<AssociationSuite<f64>, SynthError> {
    if config.noise_scale != 0.0 {
        return Err(SynthError::NoiseNotZero(config.noise_scale));
    }
    let key = concept_key(concept);
    let c = config
        .concepts
        .iter()
        .find(|c| concept_key(&c.name) == key)
        .ok_or_else(|| SynthError::UnknownConcept(concept.to_string()))?;
    Ok(closed_form(c))
}

fn closed_form(c: &SyntheticConcept) -> AssociationSuite<f64> {
    let image = planted_score(c.planted_bias);
    let text = planted_score(c.text_bias());
    AssociationSuite::new(concept_key(&c.name), "mean", image, text, image, text)
}

#[derive(Debug, Clone)]
pub struct SyntheticBundle {
    pub manifest: BundleManifest,
    pub records: Vec<EmbeddingRecord>,
    pub prompts: PromptManifest,
    /// Closed-form suites; exact only when the config is noise-free.
    pub ground_truth: Vec<AssociationSuite<f64>>,
    pub exact: bool,
}

#[derive(Serialize)]
struct GroundTruthFile<'a> {
    exact: bool,
    suites: &'a [AssociationSuite<f64>],
}

impl SyntheticBundle {
    /// Writes the bundle files plus `ground_truth.json` and `prompts.toml`.
    pub fn write(&self, dir: &Path) -> Result<(), SynthError> {
        write_bundle(dir, &self.manifest, &self.records)?;
        let io = |path: &Path, e: std::io::Error| SynthError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        };
        let gt = dir.join(GROUND_TRUTH_FILE);
        let mut text = serde_json::to_string_pretty(&GroundTruthFile {
            exact: self.exact,
            suites: &self.ground_truth,
        })
        .expect("ground truth serializes");
        text.push('\n');
        std::fs::write(&gt, text).map_err(|e| io(&gt, e))?;
        let pm = dir.join(PROMPTS_FILE);
        std::fs::write(&pm, self.prompts.to_toml_string()).map_err(|e| io(&pm, e))?;
        Ok(())
    }
}

struct EncoderDraws {
    rng: ChaCha8Rng,
    dim: usize,
    noise: f64,
}

impl EncoderDraws {
    fn gaussian(&mut self) -> Vec<f64> {
        (0..self.dim).map(|_| self.rng.sample(StandardNormal)).collect()
    }

    fn perturb(&mut self, base: &[f64]) -> Vec<f64> {
        if self.noise == 0.0 {
            return base.to_vec();
        }
        let n = self.gaussian();
        base.iter().zip(n).map(|(b, z)| b + self.noise * z).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let n = dot(&v, &v).sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Orthonormal pair from two Gaussian draws.
fn anchors(draws: &mut EncoderDraws) -> (Vec<f64>, Vec<f64>) {
    let u_a = normalize(draws.gaussian());
    let raw = draws.gaussian();
    let proj = dot(&raw, &u_a);
    let u_b = normalize(raw.iter().zip(&u_a).map(|(r, a)| r - proj * a).collect());
    (u_a, u_b)
}

fn mix(u_a: &[f64], u_b: &[f64], bias: f64) -> Vec<f64> {
    let (p, q) = ((1.0 + bias) / 2.0, (1.0 - bias) / 2.0);
    u_a.iter().zip(u_b).map(|(a, b)| p * a + q * b).collect()
}

pub fn generate(config: &SyntheticConfig) -> Result<SyntheticBundle, SynthError> {
    config.validate()?;
    let prompts = config.prompt_manifest();
    let mut records = Vec::new();
    for (enc_idx, encoder) in config.encoders.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(enc_idx as u64);
        let mut draws = EncoderDraws {
            rng,
            dim: config.dim,
            noise: config.noise_scale,
        };
        let (u_a, u_b) = anchors(&mut draws);
        let mut push = |id: String, role, modality, concept: &str, cd: Option<(Category, Dominance)>, prompt: Option<String>, vector| {
            records.push(EmbeddingRecord {
                id,
                encoder: encoder.clone(),
                role,
                modality,
                concept: concept.to_string(),
                category: cd.map(|x| x.0),
                dominance: cd.map(|x| x.1),
                prompt,
                vector,
            });
        };

        for side in [Side::A, Side::B] {
            let anchor = if side == Side::A { &u_a } else { &u_b };
            let ap = prompts.attribute_prompts.iter().find(|p| p.gender == side).unwrap();
            let concept = if side == Side::A { "man" } else { "woman" };
            for i in 0..config.attribute_count {
                let v = draws.perturb(anchor);
                push(format!("{encoder}/attr-{side}/image/{i:04}"), side.role(), Modality::Image, concept, None, Some(ap.prompt.clone()), v);
            }
            let words: Vec<&TextAttribute> = prompts.text_attributes.iter().filter(|t| t.gender == side).collect();
            for (i, word) in words.iter().enumerate() {
                let v = draws.perturb(anchor);
                push(format!("{encoder}/attr-{side}/text/{i:04}"), side.role(), Modality::Text, &word.word, None, None, v);
            }
        }

        for c in &config.concepts {
            let key = concept_key(&c.name);
            let cd = Some((c.category, c.dominance));
            let prompt = target_prompt(&c.name);
            let image_base = mix(&u_a, &u_b, c.planted_bias);
            let text_base = mix(&u_a, &u_b, c.text_bias());
            for i in 0..config.target_image_count {
                let v = normalize(draws.perturb(&image_base));
                push(format!("{encoder}/target/{key}/image/{i:04}"), Role::Target, Modality::Image, &key, cd, Some(prompt.clone()), v);
            }
            let v = normalize(draws.perturb(&text_base));
            push(format!("{encoder}/target/{key}/prompt"), Role::Target, Modality::Text, &key, cd, Some(prompt.clone()), v);
            let v = normalize(draws.perturb(&text_base));
            push(format!("{encoder}/target/{key}/keyword"), Role::Target, Modality::Text, &key, cd, None, v);
        }
    }
    let manifest = manifest_for(&config.model_name, &records);
    Ok(SyntheticBundle {
        manifest,
        records,
        prompts,
        ground_truth: config.concepts.iter().map(closed_form).collect(),
        exact: config.noise_scale == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(bias: f64) -> SyntheticConfig {
        SyntheticConfig {
            model_name: "t".into(),
            dim: 8,
            encoders: vec!["e".into()],
            concepts: vec![SyntheticConcept {
                name: "Nurse".into(),
                category: Category::Occupation,
                dominance: Dominance::FemaleDominated,
                planted_bias: bias,
                text_bias: None,
            }],
            attribute_count: 3,
            target_image_count: 4,
            noise_scale: 0.0,
            seed: 7,
        }
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(planted_score(0.0), 0.0);
        assert!((planted_score(1.0) - 1.0).abs() < 1e-15);
        assert!((planted_score(-1.0) + 1.0).abs() < 1e-15);
        let s = ground_truth_suite(&one(1.0), "nurse").unwrap();
        assert!(s.components().iter().all(|c| (c - 1.0).abs() < 1e-15));
        let s = ground_truth_suite(&one(0.0), "NURSE").unwrap();
        assert_eq!(s.components(), [0.0; 4]);
        let s = ground_truth_suite(&one(-1.0), "nurse").unwrap();
        assert!(s.components().iter().all(|c| (c + 1.0).abs() < 1e-15));
    }

    #[test]
    fn ground_truth_errors() {
        let mut cfg = one(0.5);
        assert_eq!(
            ground_truth_suite(&cfg, "ceo").unwrap_err(),
            SynthError::UnknownConcept("ceo".into())
        );
        cfg.noise_scale = 0.1;
        assert_eq!(ground_truth_suite(&cfg, "nurse").unwrap_err(), SynthError::NoiseNotZero(0.1));
    }

    #[test]
    fn anchors_are_orthonormal() {
        let mut d = EncoderDraws {
            rng: ChaCha8Rng::seed_from_u64(3),
            dim: 16,
            noise: 0.0,
        };
        let (a, b) = anchors(&mut d);
        assert!((dot(&a, &a) - 1.0).abs() < 1e-14);
        assert!((dot(&b, &b) - 1.0).abs() < 1e-14);
        assert!(dot(&a, &b).abs() < 1e-14);
    }

    #[test]
    fn record_counts() {
        let b = generate(&one(0.3)).unwrap();
        // per encoder: 2 sides x 2 modalities x 3 + 4 images + prompt + keyword
        assert_eq!(b.records.len(), 12 + 6);
        assert_eq!(b.manifest.record_count, 18);
        assert_eq!(b.manifest.encoders[0].dim, 8);
        b.prompts.validate().unwrap();
    }

    #[test]
    fn deterministic_for_seed() {
        let mut cfg = one(0.3);
        cfg.noise_scale = 0.2;
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.records, b.records);
        cfg.seed = 8;
        assert_ne!(generate(&cfg).unwrap().records, a.records);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = one(1.5);
        assert!(matches!(generate(&cfg), Err(SynthError::InvalidConfig(_))));
        cfg = one(0.0);
        cfg.dim = 3;
        assert!(matches!(cfg.validate(), Err(SynthError::InvalidConfig(_))));
        cfg = one(0.0);
        cfg.noise_scale = -1.0;
        assert!(matches!(cfg.validate(), Err(SynthError::InvalidConfig(_))));
    }

    #[test]
    fn toml_config() {
        let cfg = SyntheticConfig::from_toml_str(
            r#"
dim = 16
encoders = ["RN50", "ViT-B/32"]
attribute_count = 4
target_image_count = 5
noise_scale = 0.05
seed = 11

[[concepts]]
name = "CEO"
category = "occupation"
dominance = "male_dominated"
planted_bias = 0.4
text_bias = 0.2
"#,
        )
        .unwrap();
        assert_eq!(cfg.model_name, "synthetic");
        assert_eq!(cfg.concepts[0].text_bias(), 0.2);
    }

    #[test]
    fn standard_config_spans_range() {
        let cfg = SyntheticConfig::standard(16, &DEFAULT_ENCODERS, 1);
        assert_eq!(cfg.concepts.len(), 28);
        assert_eq!(cfg.concepts[0].planted_bias, -1.0);
        assert_eq!(cfg.concepts[27].planted_bias, 1.0);
        cfg.validate().unwrap();
    }
}
