//! Node and edge probabilities for the decoder, and the training-label masks
//! exported for external edge classifiers.

pub mod lexical;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::proofgraph::ProofGraph;
use crate::theory::{NodeKind, NodeLayout, Theory};

pub use lexical::{fit_linear_scorer, lexical_edge_features, FeatureVector, Hyperparameters, LinearScorer};

/// Serialized value of an excluded edge label.
pub const MASKED: i32 = -100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PotentialsError {
    #[error("gold proof references node {0} not in the theory")]
    UnknownNode(String),
    #[error("pair {0}->{1} does not end in a rule")]
    IllTyped(usize, usize),
    #[error("noise {0} outside [0, 0.5)")]
    NoiseOutOfRange(f64),
    #[error("expected {expected} probabilities, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("probability {0} is not finite or outside [0, 1]")]
    BadProbability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskLabel {
    Masked,
    Absent,
    Present,
}

impl MaskLabel {
    pub fn value(self) -> i32 {
        match self {
            MaskLabel::Masked => MASKED,
            MaskLabel::Absent => 0,
            MaskLabel::Present => 1,
        }
    }
}

/// Edge labels over the (k+1) x (k+1) node layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMask {
    pub layout: NodeLayout,
    pub labels: Vec<Vec<MaskLabel>>,
}

impl EdgeMask {
    pub fn size(&self) -> usize {
        self.layout.size()
    }

    pub fn unmasked(&self) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        self.labels.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().filter_map(move |(j, l)| match l {
                MaskLabel::Masked => None,
                MaskLabel::Absent => Some((i, j, false)),
                MaskLabel::Present => Some((i, j, true)),
            })
        })
    }

    pub fn to_matrix(&self) -> Vec<Vec<i32>> {
        self.labels.iter().map(|row| row.iter().map(|l| l.value()).collect()).collect()
    }
}

/// Masks self-loops, pairs touching a node outside the gold node set, and any
/// pair whose target is not a rule; the rest are labelled from the gold edges.
pub fn build_edge_mask(t: &Theory, gold: &ProofGraph) -> Result<EdgeMask, PotentialsError> {
    let layout = t.layout();
    let n = layout.size();
    let mut present = vec![false; n];
    for node in &gold.nodes {
        let i = layout.index(*node).ok_or_else(|| PotentialsError::UnknownNode(node.to_string()))?;
        present[i] = true;
    }
    let mut labels = vec![vec![MaskLabel::Masked; n]; n];
    for (i, row) in labels.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i == j || !present[i] || !present[j] || layout.kind(j) != NodeKind::Rule {
                continue;
            }
            *cell = if gold.edges.contains(&(layout.node(i), layout.node(j))) {
                MaskLabel::Present
            } else {
                MaskLabel::Absent
            };
        }
    }
    for (a, b) in &gold.edges {
        for node in [a, b] {
            layout.index(*node).ok_or_else(|| PotentialsError::UnknownNode(node.to_string()))?;
        }
    }
    Ok(EdgeMask { layout, labels })
}

/// Decoder input: presence probability per node (NAF last) and per ordered
/// node pair. The diagonal is ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    pub layout: NodeLayout,
    pub node_prob: Vec<f64>,
    pub edge_prob: Vec<Vec<f64>>,
}

impl Potentials {
    pub fn validate(&self) -> Result<(), PotentialsError> {
        let n = self.layout.size();
        let shape = |found: usize| if found == n { Ok(()) } else { Err(PotentialsError::Shape { expected: n, found }) };
        shape(self.node_prob.len())?;
        shape(self.edge_prob.len())?;
        for row in &self.edge_prob {
            shape(row.len())?;
        }
        let bad = self
            .node_prob
            .iter()
            .chain(self.edge_prob.iter().flatten())
            .find(|p| !p.is_finite() || !(0.0..=1.0).contains(*p));
        match bad {
            Some(p) => Err(PotentialsError::BadProbability(*p)),
            None => Ok(()),
        }
    }

    pub fn edge(&self, from: usize, to: usize) -> f64 {
        self.edge_prob[from][to]
    }
}

/// Gold indicators blurred by uniform noise: `1 - u` on gold nodes and
/// edges, `u` elsewhere, with `u ~ U[0, noise]` drawn from `seed`.
pub fn oracle_potentials(t: &Theory, gold: &ProofGraph, noise: f64, seed: u64) -> Result<Potentials, PotentialsError> {
    if !(0.0..0.5).contains(&noise) {
        return Err(PotentialsError::NoiseOutOfRange(noise));
    }
    let layout = t.layout();
    for node in gold.nodes.iter().chain(gold.edges.iter().flat_map(|(a, b)| [a, b])) {
        layout.index(*node).ok_or_else(|| PotentialsError::UnknownNode(node.to_string()))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |on: bool| {
        let u = noise * rng.gen::<f64>();
        if on {
            1.0 - u
        } else {
            u
        }
    };
    let n = layout.size();
    let node_prob = (0..n).map(|i| draw(gold.nodes.contains(&layout.node(i)))).collect();
    let mut edge_prob = vec![vec![0.0; n]; n];
    for (i, row) in edge_prob.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            if i != j {
                *cell = draw(gold.edges.contains(&(layout.node(i), layout.node(j))));
            }
        }
    }
    Ok(Potentials { layout, node_prob, edge_prob })
}

/// Mixes a base seed with record coordinates so every record gets its own
/// stream regardless of processing order.
pub fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(splitmix(splitmix(seed) ^ a) ^ b)
}

/// One line of a `.potentials.jsonl` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialsRecord {
    pub theory_id: String,
    pub question_id: String,
    pub num_facts: usize,
    pub num_rules: usize,
    pub qa_prob: f64,
    pub node_prob: Vec<f64>,
    pub edge_prob: Vec<Vec<f64>>,
}

impl PotentialsRecord {
    pub fn new(theory_id: &str, question_id: &str, qa_prob: f64, p: Potentials) -> Self {
        PotentialsRecord {
            theory_id: theory_id.to_owned(),
            question_id: question_id.to_owned(),
            num_facts: p.layout.num_facts,
            num_rules: p.layout.num_rules,
            qa_prob,
            node_prob: p.node_prob,
            edge_prob: p.edge_prob,
        }
    }

    pub fn potentials(&self) -> Result<Potentials, PotentialsError> {
        let p = Potentials {
            layout: NodeLayout::new(self.num_facts, self.num_rules),
            node_prob: self.node_prob.clone(),
            edge_prob: self.edge_prob.clone(),
        };
        p.validate()?;
        if !(0.0..=1.0).contains(&self.qa_prob) {
            return Err(PotentialsError::BadProbability(self.qa_prob));
        }
        Ok(p)
    }
}

/// One line of a `.labels.jsonl` file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelsRecord {
    pub theory_id: String,
    pub question_id: String,
    pub qa_label: u8,
    pub node_labels: Vec<u8>,
    pub edge_labels: Vec<Vec<i32>>,
}

/// Training labels for every question with an answer and at least one gold
/// proof; the first gold proof is the label source.
pub fn export_labels(t: &Theory) -> Result<Vec<LabelsRecord>, PotentialsError> {
    let layout = t.layout();
    let mut out = Vec::new();
    for q in &t.questions {
        let (Some(answer), Some(gold)) = (q.answer, q.proofs.as_ref().and_then(|p| p.first())) else {
            continue;
        };
        let mask = build_edge_mask(t, gold)?;
        let node_labels = (0..layout.size()).map(|i| u8::from(gold.nodes.contains(&layout.node(i)))).collect();
        out.push(LabelsRecord {
            theory_id: t.id.clone(),
            question_id: q.id.clone(),
            qa_label: u8::from(answer),
            node_labels,
            edge_labels: mask.to_matrix(),
        });
    }
    Ok(out)
}
