//! Exact proof decoding from node and edge probabilities.
//!
//! Nodes are fixed by thresholding, then edges are chosen to maximize
//! `sum phi*e + (1-phi)*(1-e)` over allowed pairs. The objective is separable,
//! so the unconstrained optimum keeps exactly the pairs with `phi > 0.5`; when
//! that graph is disconnected the cheapest repair is a minimum spanning tree
//! over its components.

pub mod flow;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::potentials::{Potentials, PotentialsError};
use crate::proofgraph::{ProofGraph, UnionFind};
use crate::theory::{NodeKind, NodeLayout};

pub use flow::{max_flow, FlowCertificate, FlowNode, FlowViolation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    On,
    Off,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("no allowed edge can join {components} components")]
    ConnectivityInfeasible { components: usize },
    #[error(transparent)]
    Potentials(#[from] PotentialsError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStats {
    /// Candidate repair pairs considered.
    pub pairs_explored: usize,
    pub components_before_repair: usize,
    pub repair_edges: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub proof: ProofGraph,
    pub objective: f64,
    /// A feasible-flow certificate was built and verified (always true when
    /// connectivity is not required).
    pub optimal: bool,
    pub connectivity_relaxed: bool,
    pub stats: SolverStats,
}

/// Indices with probability at least 0.5, or the argmax (lowest index on
/// ties) when none qualifies.
pub fn select_nodes(node_prob: &[f64]) -> Vec<usize> {
    let chosen: Vec<usize> = (0..node_prob.len()).filter(|&i| node_prob[i] >= 0.5).collect();
    if !chosen.is_empty() || node_prob.is_empty() {
        return chosen;
    }
    let mut best = 0;
    for (i, p) in node_prob.iter().enumerate() {
        if *p > node_prob[best] {
            best = i;
        }
    }
    vec![best]
}

/// Edge typing: no self-loops, and every edge ends in a rule.
pub fn allowed_pair(layout: &NodeLayout, from: usize, to: usize) -> bool {
    from != to && layout.kind(to) == NodeKind::Rule
}

/// Objective over allowed ordered pairs among `nodes`.
pub fn objective(p: &Potentials, nodes: &[usize], edges: &BTreeSet<(usize, usize)>) -> f64 {
    let mut total = 0.0;
    for &i in nodes {
        for &j in nodes {
            if allowed_pair(&p.layout, i, j) {
                let phi = p.edge(i, j);
                total += if edges.contains(&(i, j)) { phi } else { 1.0 - phi };
            }
        }
    }
    total
}

fn to_graph(layout: &NodeLayout, nodes: &[usize], edges: &BTreeSet<(usize, usize)>) -> ProofGraph {
    ProofGraph::new(nodes.iter().map(|&i| layout.node(i)), edges.iter().map(|&(a, b)| (layout.node(a), layout.node(b))))
}

/// Exact decode; fails with [`DecodeError::ConnectivityInfeasible`] when
/// connectivity is on and edge typing cannot join the selected nodes.
pub fn decode_proof(p: &Potentials, connectivity: Connectivity) -> Result<DecodeResult, DecodeError> {
    p.validate()?;
    let layout = p.layout;
    let nodes = select_nodes(&p.node_prob);
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &i in &nodes {
        for &j in &nodes {
            if allowed_pair(&layout, i, j) && p.edge(i, j) > 0.5 {
                edges.insert((i, j));
            }
        }
    }

    let mut stats = SolverStats::default();
    let mut optimal = true;
    if connectivity == Connectivity::On {
        let pos = |x: usize| nodes.binary_search(&x).expect("selected");
        let mut uf = UnionFind::new(nodes.len());
        for &(a, b) in &edges {
            uf.union(pos(a), pos(b));
        }
        let mut components = (0..nodes.len()).filter(|&k| uf.find(k) == k).count();
        stats.components_before_repair = components;

        // Cheapest direction per unordered pair; both directions are currently 0.
        let mut candidates = Vec::new();
        for (a, &m) in nodes.iter().enumerate() {
            for &n in &nodes[a + 1..] {
                let best = [(m, n), (n, m)]
                    .into_iter()
                    .filter(|&(i, j)| allowed_pair(&layout, i, j))
                    .map(|(i, j)| (1.0 - 2.0 * p.edge(i, j), (i, j)))
                    .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
                if let Some(c) = best {
                    candidates.push(c);
                }
            }
        }
        stats.pairs_explored = candidates.len();
        candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for (_, (i, j)) in candidates {
            if components == 1 {
                break;
            }
            if uf.find(pos(i)) != uf.find(pos(j)) {
                uf.union(pos(i), pos(j));
                edges.insert((i, j));
                stats.repair_edges += 1;
                components -= 1;
            }
        }
        if components > 1 {
            return Err(DecodeError::ConnectivityInfeasible { components });
        }
        optimal = FlowCertificate::build(&nodes, &edges).is_some_and(|c| c.verify(&nodes, &edges).is_ok())
            && max_flow(&nodes, &edges) == nodes.len() as u64;
    }

    Ok(DecodeResult {
        proof: to_graph(&layout, &nodes, &edges),
        objective: objective(p, &nodes, &edges),
        optimal,
        connectivity_relaxed: false,
        stats,
    })
}

/// [`decode_proof`], re-running without connectivity when it is infeasible
/// and flagging the result.
pub fn decode(p: &Potentials, connectivity: Connectivity) -> Result<DecodeResult, DecodeError> {
    match decode_proof(p, connectivity) {
        Err(DecodeError::ConnectivityInfeasible { components }) => {
            let mut r = decode_proof(p, Connectivity::Off)?;
            r.connectivity_relaxed = true;
            r.optimal = false;
            r.stats.components_before_repair = components;
            Ok(r)
        }
        other => other,
    }
}

/// Ablation decoder: thresholded nodes, and `e = 1` iff `phi > 0.5` over every
/// ordered pair except self-loops, with no typing or node consistency.
pub fn decode_unconstrained(p: &Potentials) -> Result<DecodeResult, DecodeError> {
    p.validate()?;
    let n = p.layout.size();
    let nodes = select_nodes(&p.node_prob);
    let mut edges = BTreeSet::new();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let phi = p.edge(i, j);
            if phi > 0.5 {
                edges.insert((i, j));
                total += phi;
            } else {
                total += 1.0 - phi;
            }
        }
    }
    Ok(DecodeResult {
        proof: to_graph(&p.layout, &nodes, &edges),
        objective: total,
        optimal: true,
        connectivity_relaxed: false,
        stats: SolverStats::default(),
    })
}

/// One line of a `.predictions.jsonl` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub theory_id: String,
    pub question_id: String,
    pub answer: bool,
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub objective: f64,
    pub connectivity_relaxed: bool,
}

impl PredictionRecord {
    pub fn new(theory_id: &str, question_id: &str, answer: bool, r: &DecodeResult) -> Self {
        PredictionRecord {
            theory_id: theory_id.to_owned(),
            question_id: question_id.to_owned(),
            answer,
            nodes: r.proof.nodes.iter().map(ToString::to_string).collect(),
            edges: r.proof.edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            objective: r.objective,
            connectivity_relaxed: r.connectivity_relaxed,
        }
    }

    /// `None` when a node name does not parse.
    pub fn proof(&self) -> Option<ProofGraph> {
        let nodes: Vec<&str> = self.nodes.iter().map(String::as_str).collect();
        let edges: Vec<(&str, &str)> = self.edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        ProofGraph::from_names(&nodes, &edges)
    }
}
