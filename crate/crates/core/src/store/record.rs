use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    /// Male attribute side.
    #[serde(rename = "attribute_A")]
    AttributeA,
    /// Female attribute side.
    #[serde(rename = "attribute_B")]
    AttributeB,
    #[serde(rename = "target")]
    Target,
}

impl Role {
    pub fn is_attribute(self) -> bool {
        matches!(self, Role::AttributeA | Role::AttributeB)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Image,
    Text,
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modality::Image => "image",
            Modality::Text => "text",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Occupation,
    Sport,
    Object,
    Scene,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Occupation,
        Category::Sport,
        Category::Object,
        Category::Scene,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Category::Occupation => "Occupation",
            Category::Sport => "Sport",
            Category::Object => "Object",
            Category::Scene => "Scene",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    MaleDominated,
    FemaleDominated,
}

impl Dominance {
    /// Table mark: `*` for male-dominated, `#` for female-dominated.
    pub fn mark(self) -> char {
        match self {
            Dominance::MaleDominated => '*',
            Dominance::FemaleDominated => '#',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dominance::MaleDominated => "male_dominated",
            Dominance::FemaleDominated => "female_dominated",
        }
    }
}

/// Attribute gender side. `A` is male, `B` is female.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn role(self) -> Role {
        match self {
            Side::A => Role::AttributeA,
            Side::B => Role::AttributeB,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// One embedding vector tagged with where it came from.
///
/// Text records with role `target` come in two kinds: the prompt embedding
/// (carries `prompt`) and the bare keyword embedding (`prompt` is null).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub id: String,
    pub encoder: String,
    pub role: Role,
    pub modality: Modality,
    pub concept: String,
    pub category: Option<Category>,
    pub dominance: Option<Dominance>,
    pub prompt: Option<String>,
    pub vector: Vec<f64>,
}

impl EmbeddingRecord {
    pub fn norm(&self) -> f64 {
        self.vector.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_keyword_text(&self) -> bool {
        self.role == Role::Target && self.modality == Modality::Text && self.prompt.is_none()
    }

    pub fn is_prompt_text(&self) -> bool {
        self.role == Role::Target && self.modality == Modality::Text && self.prompt.is_some()
    }
}

/// Canonical concept key: trimmed and case-folded.
pub fn concept_key(raw: &str) -> String {
    raw.trim().to_lowercase()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn role_wire_names() {
        assert_eq!(serde_json::to_string(&Role::AttributeA).unwrap(), "\"attribute_A\"");
        assert_eq!(serde_json::to_string(&Role::Target).unwrap(), "\"target\"");
        let r: Role = serde_json::from_str("\"attribute_B\"").unwrap();
        assert_eq!(r, Role::AttributeB);
    }

    #[test]
    fn concept_key_folds() {
        assert_eq!(concept_key("  Car Fixing "), "car fixing");
        assert_eq!(concept_key("CEO"), "ceo");
    }
}
