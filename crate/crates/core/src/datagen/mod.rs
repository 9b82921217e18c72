//! Synthetic rule-base datasets with controllable proof depth.
//!
//! Each theory is drafted around a derivation chain of exactly `max_depth`
//! rules, padded with distractors, then annotated with answers and gold
//! proofs by the reasoner. Theory `i` draws from its own ChaCha stream, so
//! output does not depend on scheduling.

mod draft;
mod profiles;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::reasoner::DEFAULT_MAX_PROOFS;
use crate::theory::{write_theories, Format, Theory, MAX_CONTEXT};

pub use profiles::{ProfileSpec, VocabularyProfile};

pub const MAX_DEPTH: usize = 5;
const RETRY_BUDGET: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub num_theories: usize,
    pub facts: SizeRange,
    pub rules: SizeRange,
    pub max_depth: usize,
    pub negation_rate: f64,
    pub questions_per_theory: usize,
    pub profile: ProfileSpec,
    /// Target fraction of true answers.
    pub answer_balance: f64,
    pub max_proofs: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            num_theories: 100,
            facts: SizeRange { min: 4, max: 12 },
            rules: SizeRange { min: 3, max: 8 },
            max_depth: 3,
            negation_rate: 0.2,
            questions_per_theory: 10,
            profile: ProfileSpec::default(),
            answer_balance: 0.5,
            max_proofs: DEFAULT_MAX_PROOFS,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("theory {index}: no valid draft after {attempts} attempts")]
    RetryBudget { index: usize, attempts: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GenConfig {
    pub fn validate(&self) -> Result<VocabularyProfile, GenError> {
        let bad = |m: String| Err(GenError::Config(m));
        if self.max_depth > MAX_DEPTH {
            return bad(format!("max_depth {} exceeds {MAX_DEPTH}", self.max_depth));
        }
        for (name, r) in [("facts", self.facts), ("rules", self.rules)] {
            if r.min > r.max {
                return bad(format!("{name} range {}..{} is empty", r.min, r.max));
            }
        }
        if self.facts.max + self.rules.max > MAX_CONTEXT {
            return bad(format!("facts.max + rules.max exceeds {MAX_CONTEXT}"));
        }
        if self.rules.max < self.max_depth || self.facts.max == 0 {
            return bad("ranges too small for the requested depth".into());
        }
        if !(0.0..=1.0).contains(&self.negation_rate) || !(0.0..=1.0).contains(&self.answer_balance) {
            return bad("rates must lie in [0, 1]".into());
        }
        if self.questions_per_theory == 0 || self.max_proofs == 0 {
            return bad("questions_per_theory and max_proofs must be positive".into());
        }
        let Some(profile) = self.profile.resolve() else {
            return bad(format!("unknown profile {:?}", self.profile));
        };
        let invalid = profile.vocabulary().invalid_tokens();
        if !invalid.is_empty() {
            return bad(format!("profile tokens not renderable: {}", invalid.join(", ")));
        }
        if profile.entities.len() < 2 || profile.attributes.len() < 2 * self.max_depth + 6 {
            return bad("profile pools too small".into());
        }
        Ok(profile)
    }
}

pub fn theory_id(index: usize) -> String {
    format!("T{index:04}")
}

/// The `index`-th theory of the dataset defined by `cfg`.
pub fn generate_theory(cfg: &GenConfig, index: usize) -> Result<Theory, GenError> {
    let profile = cfg.validate()?;
    generate_with(cfg, &profile, index)
}

fn generate_with(cfg: &GenConfig, profile: &VocabularyProfile, index: usize) -> Result<Theory, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let id = theory_id(index);
    for _ in 0..RETRY_BUDGET {
        let Some(mut t) = draft::draft_theory(cfg, profile, &id, &mut rng) else {
            continue;
        };
        if draft::attach_questions(cfg, &mut t, &mut rng).is_some() {
            return Ok(t);
        }
    }
    Err(GenError::RetryBudget { index, attempts: RETRY_BUDGET })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerBalance {
    pub true_count: usize,
    pub false_count: usize,
}

impl AnswerBalance {
    pub fn of<'a>(theories: impl IntoIterator<Item = &'a Theory>) -> Self {
        let mut b = AnswerBalance::default();
        for q in theories.into_iter().flat_map(|t| &t.questions) {
            match q.answer {
                Some(true) => b.true_count += 1,
                Some(false) => b.false_count += 1,
                None => {}
            }
        }
        b
    }

    pub fn fraction_true(&self) -> f64 {
        let n = self.true_count + self.false_count;
        if n == 0 {
            0.0
        } else {
            self.true_count as f64 / n as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub theories: usize,
    pub questions: usize,
    pub answer_balance: AnswerBalance,
}

impl SplitSummary {
    fn of(ts: &[Theory]) -> Self {
        SplitSummary {
            theories: ts.len(),
            questions: ts.iter().map(|t| t.questions.len()).sum(),
            answer_balance: AnswerBalance::of(ts),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: GenConfig,
    pub vocabulary: VocabularyProfile,
    pub train: SplitSummary,
    pub dev: SplitSummary,
    pub test: SplitSummary,
    /// Question count per gold depth over all splits.
    pub depth_histogram: BTreeMap<usize, usize>,
    pub answer_balance: AnswerBalance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: Vec<Theory>,
    pub dev: Vec<Theory>,
    pub test: Vec<Theory>,
    pub manifest: Manifest,
}

/// Split sizes for `n` theories: 70/10/20, rounded, test takes the rest.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = (n * 7 + 5) / 10;
    let dev = ((n + 5) / 10).min(n - train);
    (train, dev, n - train - dev)
}

pub fn generate_dataset(cfg: &GenConfig) -> Result<Dataset, GenError> {
    let profile = cfg.validate()?;
    let theories: Vec<Theory> =
        (0..cfg.num_theories).into_par_iter().map(|i| generate_with(cfg, &profile, i)).collect::<Result<_, _>>()?;

    let mut order: Vec<usize> = (0..theories.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX);
    order.shuffle(&mut rng);
    let (n_train, n_dev, _) = split_sizes(theories.len());
    let mut slots: Vec<Option<Theory>> = theories.into_iter().map(Some).collect();
    let mut take = |idx: &[usize]| -> Vec<Theory> {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| slots[i].take().expect("each theory once")).collect()
    };
    let train = take(&order[..n_train]);
    let dev = take(&order[n_train..n_train + n_dev]);
    let test = take(&order[n_train + n_dev..]);

    let all = || train.iter().chain(&dev).chain(&test);
    let mut depth_histogram = BTreeMap::new();
    for q in all().flat_map(|t| &t.questions) {
        *depth_histogram.entry(q.depth.unwrap_or(0)).or_insert(0) += 1;
    }
    let manifest = Manifest {
        config: cfg.clone(),
        vocabulary: profile,
        train: SplitSummary::of(&train),
        dev: SplitSummary::of(&dev),
        test: SplitSummary::of(&test),
        depth_histogram,
        answer_balance: AnswerBalance::of(all()),
    };
    Ok(Dataset { train, dev, test, manifest })
}

impl Dataset {
    pub fn splits(&self) -> [(&'static str, &[Theory]); 3] {
        [("train", &self.train), ("dev", &self.dev), ("test", &self.test)]
    }

    /// Writes `<split>.theories.jsonl` per split and `manifest.json`.
    pub fn write_to(&self, dir: &Path) -> Result<(), GenError> {
        std::fs::create_dir_all(dir)?;
        for (name, ts) in self.splits() {
            let mut out = BufWriter::new(File::create(dir.join(format!("{name}.theories.jsonl")))?);
            write_theories(&mut out, ts, Format::StructuredJson)?;
            out.flush()?;
        }
        let mut m = BufWriter::new(File::create(dir.join("manifest.json"))?);
        serde_json::to_writer_pretty(&mut m, &self.manifest)?;
        writeln!(m)?;
        m.flush()?;
        Ok(())
    }
}
