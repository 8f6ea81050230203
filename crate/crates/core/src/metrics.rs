//! Differential association, the four component association scores, their
//! composite sum, and the two internal-bias metrics derived from them.
//!
//! Attribute side `A` is always male and `B` female, so a positive score
//! means the target sits closer to the male attributes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{canonical_mean, Scalar};
use crate::store::{Category, Dominance, StudySet};

/// Default threshold on `|tt|` below which bias amplification is undefined.
pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero vector")]
    ZeroVector,
    #[error("empty attribute set")]
    EmptyAttributeSet,
    #[error("empty target set")]
    EmptyTargetSet,
}

/// Cosine similarity, clamped to `[-1, 1]`.
pub fn cosine<T: Scalar>(u: &[T], v: &[T]) -> Result<T, MetricsError> {
    if u.len() != v.len() {
        return Err(MetricsError::DimensionMismatch(u.len(), v.len()));
    }
    let (mut dot, mut uu, mut vv) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in u.iter().zip(v) {
        dot = dot + x * y;
        uu = uu + x * x;
        vv = vv + y * y;
    }
    if !(uu > T::zero()) || !(vv > T::zero()) {
        return Err(MetricsError::ZeroVector);
    }
    let c = dot / (uu.sqrt() * vv.sqrt());
    Ok(c.max(-T::one()).min(T::one()))
}

fn mean_cosine<T: Scalar, V: AsRef<[T]>>(w: &[T], set: &[V]) -> Result<T, MetricsError> {
    if set.is_empty() {
        return Err(MetricsError::EmptyAttributeSet);
    }
    let sims = set
        .iter()
        .map(|x| cosine(w, x.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(canonical_mean(sims))
}

/// `s(w, A, B)`: mean cosine of `w` to `A` minus mean cosine of `w` to `B`.
pub fn differential_association<T: Scalar, V: AsRef<[T]>>(
    w: &[T],
    a: &[V],
    b: &[V],
) -> Result<T, MetricsError> {
    Ok(mean_cosine(w, a)? - mean_cosine(w, b)?)
}

/// Mean of [`differential_association`] over every target in `targets`.
///
/// Per-element terms are summed in sorted order, so the result is exactly
/// invariant under any reordering of `targets`, `a` or `b`.
pub fn association_score<T: Scalar, W: AsRef<[T]>, V: AsRef<[T]>>(
    targets: &[W],
    a: &[V],
    b: &[V],
) -> Result<T, MetricsError> {
    if targets.is_empty() {
        return Err(MetricsError::EmptyTargetSet);
    }
    let scores = targets
        .iter()
        .map(|w| differential_association(w.as_ref(), a, b))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(canonical_mean(scores))
}

/// The four component association scores for one concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationSuite<T> {
    pub concept: String,
    /// Encoder name, or `"mean"` after aggregation across encoders.
    pub encoder: String,
    /// Target images against image attributes.
    pub ii: T,
    /// Target prompt text against image attributes.
    pub itp: T,
    /// Target images against text attributes.
    pub it: T,
    /// Target keyword text against text attributes.
    pub tt: T,
}

impl<T: Scalar> AssociationSuite<T> {
    pub fn new(concept: impl Into<String>, encoder: impl Into<String>, ii: T, itp: T, it: T, tt: T) -> Self {
        AssociationSuite {
            concept: concept.into(),
            encoder: encoder.into(),
            ii,
            itp,
            it,
            tt,
        }
    }

    pub fn components(&self) -> [T; 4] {
        [self.ii, self.itp, self.it, self.tt]
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    pub fn mcas(&self) -> T {
        mcas(self)
    }

    pub fn diffusion_bias(&self) -> T {
        diffusion_bias(self)
    }

    pub fn bias_amplification(&self, epsilon: T) -> Option<T> {
        bias_amplification(self, epsilon)
    }
}

pub fn compute_suite<T: Scalar>(set: &StudySet<T>) -> Result<AssociationSuite<T>, MetricsError> {
    let ii = association_score(&set.target_images, &set.a_images, &set.b_images)?;
    let itp = differential_association(&set.target_prompt_text, &set.a_images, &set.b_images)?;
    let it = association_score(&set.target_images, &set.a_texts, &set.b_texts)?;
    let tt = differential_association(&set.target_keyword_text, &set.a_texts, &set.b_texts)?;
    Ok(AssociationSuite::new(
        set.concept.clone(),
        set.encoder.clone(),
        ii,
        itp,
        it,
        tt,
    ))
}

/// Composite score: sum of the four components.
pub fn mcas<T: Scalar>(suite: &AssociationSuite<T>) -> T {
    suite.ii + suite.itp + suite.it + suite.tt
}

/// `| |ii| - |tt| |`: bias magnitude added between text encoding and the
/// generated image.
pub fn diffusion_bias<T: Scalar>(suite: &AssociationSuite<T>) -> T {
    (suite.ii.abs() - suite.tt.abs()).abs()
}

/// `| (itp + it) / (2 tt) |`, or `None` when `|tt| < epsilon`.
pub fn bias_amplification<T: Scalar>(suite: &AssociationSuite<T>, epsilon: T) -> Option<T> {
    if suite.tt.abs() < epsilon {
        return None;
    }
    let two = T::one() + T::one();
    Some(((suite.itp + suite.it) / (two * suite.tt)).abs())
}

/// Per-concept metrics: one table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRow<T> {
    pub concept: String,
    #[serde(default)]
    pub keyword: String,
    pub category: Category,
    pub dominance: Dominance,
    pub mcas: T,
    pub delta: T,
    pub alpha: Option<T>,
    pub alpha_defined: bool,
}

impl<T: Scalar> BiasRow<T> {
    pub fn from_suite(
        suite: &AssociationSuite<T>,
        keyword: &str,
        category: Category,
        dominance: Dominance,
        epsilon: T,
    ) -> Self {
        let alpha = bias_amplification(suite, epsilon);
        BiasRow {
            concept: suite.concept.clone(),
            keyword: keyword.to_string(),
            category,
            dominance,
            mcas: mcas(suite),
            delta: diffusion_bias(suite),
            alpha_defined: alpha.is_some(),
            alpha,
        }
    }

    pub fn label(&self) -> &str {
        if self.keyword.is_empty() {
            &self.concept
        } else {
            &self.keyword
        }
    }
}
