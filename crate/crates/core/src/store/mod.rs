//! Embedding bundles, the prompt catalog, and partitioning into study sets.

pub mod bundle;
pub mod partition;
pub mod prompts;
pub mod record;

pub use bundle::{
    load_bundle, manifest_for, scan_bundle, write_bundle, BundleManifest, BundleScan,
    EncoderSpec, StoreError,
};
pub use partition::{partition, PartitionError, StudySet};
pub use prompts::{default_prompt_manifest, ManifestError, PromptManifest, PromptVariant, TargetConcept};
pub use record::{concept_key, Category, Dominance, EmbeddingRecord, Modality, Role, Side};
