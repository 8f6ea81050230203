use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::prompts::PromptManifest;
use super::record::{EmbeddingRecord, Modality, Role, Side};
use crate::scalar::Scalar;

/// The (W, A, B) inputs for all four component scores of one concept under
/// one encoder. Every member list is ordered by record id.
#[derive(Debug, Clone, PartialEq)]
pub struct StudySet<T> {
    pub concept: String,
    pub encoder: String,
    pub a_images: Vec<Vec<T>>,
    pub b_images: Vec<Vec<T>>,
    pub a_texts: Vec<Vec<T>>,
    pub b_texts: Vec<Vec<T>>,
    pub target_images: Vec<Vec<T>>,
    pub target_image_ids: Vec<String>,
    pub target_prompt_text: Vec<T>,
    pub target_keyword_text: Vec<T>,
}

impl<T: Scalar> StudySet<T> {
    pub fn cast<U: Scalar>(&self) -> StudySet<U> {
        let v = |x: &Vec<T>| x.iter().map(|&c| U::of(c.to_f64_lossy())).collect::<Vec<U>>();
        let vs = |xs: &Vec<Vec<T>>| xs.iter().map(v).collect::<Vec<_>>();
        StudySet {
            concept: self.concept.clone(),
            encoder: self.encoder.clone(),
            a_images: vs(&self.a_images),
            b_images: vs(&self.b_images),
            a_texts: vs(&self.a_texts),
            b_texts: vs(&self.b_texts),
            target_images: vs(&self.target_images),
            target_image_ids: self.target_image_ids.clone(),
            target_prompt_text: v(&self.target_prompt_text),
            target_keyword_text: v(&self.target_keyword_text),
        }
    }

    pub fn dim(&self) -> usize {
        self.target_prompt_text.len()
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("no records to partition")]
    NoRecords,
    #[error("concept '{concept}' is incomplete under encoder '{encoder}': {missing}")]
    MissingConcept {
        concept: String,
        encoder: String,
        missing: &'static str,
    },
    #[error("attribute side {side} has no {modality} records under encoder '{encoder}'")]
    MissingAttributeSide {
        side: Side,
        modality: Modality,
        encoder: String,
    },
    #[error("concept '{concept}' has more than one {kind} record under encoder '{encoder}'")]
    AmbiguousText {
        concept: String,
        encoder: String,
        kind: &'static str,
    },
    #[error("target records for concept '{0}' are not listed in the prompt manifest")]
    UnlistedConcept(String),
}

fn by_id(mut recs: Vec<&EmbeddingRecord>) -> Vec<&EmbeddingRecord> {
    recs.sort_by(|a, b| a.id.cmp(&b.id));
    recs
}

fn single<'a>(
    recs: Vec<&'a EmbeddingRecord>,
    concept: &str,
    encoder: &str,
    kind: &'static str,
) -> Result<&'a EmbeddingRecord, PartitionError> {
    match recs.as_slice() {
        [one] => Ok(one),
        [] => Err(PartitionError::MissingConcept {
            concept: concept.to_string(),
            encoder: encoder.to_string(),
            missing: kind,
        }),
        _ => Err(PartitionError::AmbiguousText {
            concept: concept.to_string(),
            encoder: encoder.to_string(),
            kind,
        }),
    }
}

/// Splits validated records into one [`StudySet`] per (concept, encoder),
/// ordered by concept then encoder. Attribute sets are shared by all
/// concepts of an encoder.
pub fn partition(
    records: &[EmbeddingRecord],
    manifest: &PromptManifest,
) -> Result<Vec<StudySet<f64>>, PartitionError> {
    if records.is_empty() {
        return Err(PartitionError::NoRecords);
    }
    let concepts: BTreeSet<&str> = manifest
        .target_prompts
        .iter()
        .map(|t| t.concept.as_str())
        .collect();
    if let Some(r) = records
        .iter()
        .find(|r| r.role == Role::Target && !concepts.contains(r.concept.as_str()))
    {
        return Err(PartitionError::UnlistedConcept(r.concept.clone()));
    }

    let mut by_encoder: BTreeMap<&str, Vec<&EmbeddingRecord>> = BTreeMap::new();
    for r in records {
        by_encoder.entry(r.encoder.as_str()).or_default().push(r);
    }

    let mut per_encoder = Vec::new();
    for (&encoder, recs) in &by_encoder {
        let side = |side: Side, modality: Modality| -> Result<Vec<Vec<f64>>, PartitionError> {
            let members = by_id(
                recs.iter()
                    .copied()
                    .filter(|r| r.role == side.role() && r.modality == modality)
                    .collect(),
            );
            if members.is_empty() {
                return Err(PartitionError::MissingAttributeSide {
                    side,
                    modality,
                    encoder: encoder.to_string(),
                });
            }
            Ok(members.into_iter().map(|r| r.vector.clone()).collect())
        };
        let a_images = side(Side::A, Modality::Image)?;
        let b_images = side(Side::B, Modality::Image)?;
        let a_texts = side(Side::A, Modality::Text)?;
        let b_texts = side(Side::B, Modality::Text)?;
        per_encoder.push((encoder, recs, a_images, b_images, a_texts, b_texts));
    }

    let mut out = Vec::with_capacity(concepts.len() * per_encoder.len());
    for &concept in &concepts {
        for (encoder, recs, a_images, b_images, a_texts, b_texts) in &per_encoder {
            let mine: Vec<&EmbeddingRecord> = recs
                .iter()
                .copied()
                .filter(|r| r.role == Role::Target && r.concept == concept)
                .collect();
            let images = by_id(
                mine.iter()
                    .copied()
                    .filter(|r| r.modality == Modality::Image)
                    .collect(),
            );
            if images.is_empty() {
                return Err(PartitionError::MissingConcept {
                    concept: concept.to_string(),
                    encoder: encoder.to_string(),
                    missing: "target images",
                });
            }
            let prompt = single(
                mine.iter().copied().filter(|r| r.is_prompt_text()).collect(),
                concept,
                encoder,
                "prompt text",
            )?;
            let keyword = single(
                mine.iter().copied().filter(|r| r.is_keyword_text()).collect(),
                concept,
                encoder,
                "keyword text",
            )?;
            out.push(StudySet {
                concept: concept.to_string(),
                encoder: encoder.to_string(),
                a_images: a_images.clone(),
                b_images: b_images.clone(),
                a_texts: a_texts.clone(),
                b_texts: b_texts.clone(),
                target_image_ids: images.iter().map(|r| r.id.clone()).collect(),
                target_images: images.into_iter().map(|r| r.vector.clone()).collect(),
                target_prompt_text: prompt.vector.clone(),
                target_keyword_text: keyword.vector.clone(),
            });
        }
    }
    Ok(out)
}
