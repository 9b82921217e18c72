//! Bag-of-words edge features and a logistic edge scorer trained on them.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{build_edge_mask, Potentials, PotentialsError};
use crate::theory::{NodeKind, NodeLayout, Theory};

pub const NUM_FEATURES: usize = 8;

/// `[unigram jaccard, bigram jaccard, length diff, source negated,
/// target negated, fact->rule, rule->rule, NAF->rule]`
pub type FeatureVector = [f64; NUM_FEATURES];

pub fn tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect::<String>())
        .filter(|w| !w.is_empty())
        .collect()
}

fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        0.0
    } else {
        a.intersection(b).count() as f64 / union as f64
    }
}

fn unigrams(t: &[String]) -> BTreeSet<&str> {
    t.iter().map(String::as_str).collect()
}

fn bigrams(t: &[String]) -> BTreeSet<(&str, &str)> {
    t.windows(2).map(|w| (w[0].as_str(), w[1].as_str())).collect()
}

/// Features for the ordered pair `from -> to` of layout indices; the target
/// must be a rule.
pub fn lexical_edge_features(t: &Theory, from: usize, to: usize) -> Result<FeatureVector, PotentialsError> {
    let layout = t.layout();
    if from == to || from >= layout.size() || to >= layout.size() || layout.kind(to) != NodeKind::Rule {
        return Err(PotentialsError::IllTyped(from, to));
    }
    let text = |i: usize| tokens(t.node_text(layout.node(i)).unwrap_or(""));
    let (a, b) = (text(from), text(to));
    let negated = |i: usize, toks: &[String]| layout.kind(i) == NodeKind::Naf || toks.iter().any(|w| w == "not");
    let longest = a.len().max(b.len()).max(1) as f64;
    let kind_flag = |k: NodeKind| f64::from(u8::from(layout.kind(from) == k));
    Ok([
        jaccard(&unigrams(&a), &unigrams(&b)),
        jaccard(&bigrams(&a), &bigrams(&b)),
        (a.len() as f64 - b.len() as f64).abs() / longest,
        f64::from(u8::from(negated(from, &a))),
        f64::from(u8::from(negated(to, &b))),
        kind_flag(NodeKind::Fact),
        kind_flag(NodeKind::Rule),
        kind_flag(NodeKind::Naf),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters { learning_rate: 1.0, epochs: 2000, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("no training examples")]
    Empty,
    #[error("feature vector {0} has a non-finite component")]
    NonFinite(usize),
    #[error("learning rate must be positive and finite")]
    LearningRate,
    #[error(transparent)]
    Potentials(#[from] PotentialsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearScorer {
    pub weights: FeatureVector,
    pub bias: f64,
    pub hyperparameters: Hyperparameters,
    /// Mean training loss after each epoch.
    pub loss_history: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(-z))` without overflow.
fn softplus_neg(z: f64) -> f64 {
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

fn dot(params: &[f64], x: &FeatureVector) -> f64 {
    params[NUM_FEATURES] + x.iter().zip(params).map(|(a, b)| a * b).sum::<f64>()
}

/// Mean logistic loss and its gradient; `params` holds the weights followed
/// by the bias.
pub fn loss_and_gradient(params: &[f64], data: &[(FeatureVector, bool)]) -> (f64, Vec<f64>) {
    let mut loss = 0.0;
    let mut grad = vec![0.0; NUM_FEATURES + 1];
    for (x, y) in data {
        let z = dot(params, x);
        let s = if *y { 1.0 } else { -1.0 };
        loss += softplus_neg(s * z);
        let r = sigmoid(z) - f64::from(u8::from(*y));
        for (g, xi) in grad.iter_mut().zip(x) {
            *g += r * xi;
        }
        grad[NUM_FEATURES] += r;
    }
    let n = data.len().max(1) as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (loss / n, grad)
}

/// Full-batch gradient descent from a small seeded initialization.
pub fn fit_linear_scorer(data: &[(FeatureVector, bool)], hyper: Hyperparameters) -> Result<LinearScorer, FitError> {
    if data.is_empty() {
        return Err(FitError::Empty);
    }
    if !(hyper.learning_rate.is_finite() && hyper.learning_rate > 0.0) {
        return Err(FitError::LearningRate);
    }
    if let Some(k) = data.iter().position(|(x, _)| x.iter().any(|v| !v.is_finite())) {
        return Err(FitError::NonFinite(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut params: Vec<f64> = (0..=NUM_FEATURES).map(|_| rng.gen_range(-0.01..0.01)).collect();
    let mut loss_history = Vec::with_capacity(hyper.epochs);
    for _ in 0..hyper.epochs {
        let (_, grad) = loss_and_gradient(&params, data);
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= hyper.learning_rate * g;
        }
        loss_history.push(loss_and_gradient(&params, data).0);
    }
    let mut weights = [0.0; NUM_FEATURES];
    weights.copy_from_slice(&params[..NUM_FEATURES]);
    Ok(LinearScorer { weights, bias: params[NUM_FEATURES], hyperparameters: hyper, loss_history })
}

impl LinearScorer {
    pub fn probability(&self, x: &FeatureVector) -> f64 {
        sigmoid(self.bias + x.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>())
    }

    pub fn predict(&self, x: &FeatureVector) -> bool {
        self.probability(x) > 0.5
    }

    /// Fraction of examples whose predicted label matches.
    pub fn accuracy(&self, data: &[(FeatureVector, bool)]) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        data.iter().filter(|(x, y)| self.predict(x) == *y).count() as f64 / data.len() as f64
    }

    /// Potentials for one question: gold node indicators, NAF weighted by the
    /// share of negative rule antecedents, and scored edges into rules.
    pub fn potentials(&self, t: &Theory, gold_nodes: &[bool]) -> Potentials {
        let layout = t.layout();
        let n = layout.size();
        let mut node_prob: Vec<f64> = (0..n).map(|i| f64::from(u8::from(gold_nodes.get(i).copied().unwrap_or(false)))).collect();
        node_prob[layout.naf_index()] = naf_prior(t);
        let mut edge_prob = vec![vec![0.0; n]; n];
        for (i, row) in edge_prob.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if i != j && layout.kind(j) == NodeKind::Rule {
                    *cell = self.probability(&lexical_edge_features(t, i, j).expect("typed pair"));
                }
            }
        }
        Potentials { layout, node_prob, edge_prob }
    }
}

fn naf_prior(t: &Theory) -> f64 {
    let total: usize = t.rules.iter().map(|r| r.antecedents.len()).sum();
    let negative = t.rules.iter().flat_map(|r| &r.antecedents).filter(|l| !l.polarity).count();
    if total == 0 {
        0.0
    } else {
        negative as f64 / total as f64
    }
}

/// Labelled features from the unmasked cells of each question's first gold
/// proof.
pub fn edge_examples(t: &Theory) -> Result<Vec<(FeatureVector, bool)>, PotentialsError> {
    let mut out = Vec::new();
    for q in &t.questions {
        let Some(gold) = q.proofs.as_ref().and_then(|p| p.first()) else {
            continue;
        };
        let mask = build_edge_mask(t, gold)?;
        for (i, j, y) in mask.unmasked() {
            out.push((lexical_edge_features(t, i, j)?, y));
        }
    }
    Ok(out)
}

/// Gold node indicators in layout order.
pub fn gold_node_labels(layout: NodeLayout, gold: &crate::proofgraph::ProofGraph) -> Vec<bool> {
    (0..layout.size()).map(|i| gold.nodes.contains(&layout.node(i))).collect()
}
