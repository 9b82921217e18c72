use serde::{Deserialize, Serialize};

use crate::theory::grammar::Vocabulary;

/// Token pools for one domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabularyProfile {
    pub name: String,
    pub entities: Vec<String>,
    pub attributes: Vec<String>,
    pub relations: Vec<String>,
}

fn owned(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| (*w).to_owned()).collect()
}

impl VocabularyProfile {
    pub fn named(name: &str) -> Option<Self> {
        let (entities, attributes, relations): (&[&str], &[&str], &[&str]) = match name {
            "people" => (
                &["anne", "bob", "charlie", "dave", "erin", "fiona", "gary", "harry"],
                &[
                    "big", "blue", "cold", "furry", "green", "kind", "nice", "quiet", "red", "rough", "round", "smart",
                    "white", "young", "tall", "calm",
                ],
                &["chase", "like", "need", "see", "visit"],
            ),
            "animals" => (
                &["the bear", "the cat", "the cow", "the dog", "the lion", "the mouse", "the rabbit", "the tiger"],
                &[
                    "big", "brown", "cold", "cute", "fierce", "furry", "green", "heavy", "hungry", "lazy", "loud", "red",
                    "sleepy", "slow", "small", "strong",
                ],
                &["chase", "eat", "like", "see", "visit"],
            ),
            "circuits" => (
                &["the battery", "the bell", "the bulb", "the fan", "the radio", "the switch", "the wire"],
                &[
                    "bright", "broken", "charged", "closed", "conductive", "connected", "grounded", "insulated", "live",
                    "loud", "metallic", "open", "plastic", "powered", "shielded", "warm",
                ],
                &["feed", "power", "touch", "ground"],
            ),
            _ => return None,
        };
        Some(VocabularyProfile {
            name: name.to_owned(),
            entities: owned(entities),
            attributes: owned(attributes),
            relations: owned(relations),
        })
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::new(
            self.entities.iter().map(String::as_str),
            self.attributes.iter().map(String::as_str),
            self.relations.iter().map(String::as_str),
        )
    }
}

/// A built-in profile name or explicit pools.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileSpec {
    Named(String),
    Custom(VocabularyProfile),
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec::Named("people".into())
    }
}

impl ProfileSpec {
    pub fn resolve(&self) -> Option<VocabularyProfile> {
        match self {
            ProfileSpec::Named(n) => VocabularyProfile::named(n),
            ProfileSpec::Custom(p) => Some(p.clone()),
        }
    }
}
