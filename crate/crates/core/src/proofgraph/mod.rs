//! Proof graphs: directed graphs over fact, rule and NAF nodes.
//!
//! Edges run fact -> rule, NAF -> rule or rule -> rule, and a well-formed proof
//! is connected once edge directions are dropped. Node and edge sets are kept
//! in canonical order (facts, then rules, then NAF; edges lexicographic), so
//! serialization is byte-stable.

mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::theory::Theory;

pub use verify::{verify_derivation, verify_with, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProofNode {
    Fact(usize),
    Rule(usize),
    /// All negation-as-failure occurrences collapsed into one node.
    Naf,
}

impl ProofNode {
    pub fn parse(s: &str) -> Option<Self> {
        if s == "NAF" {
            return Some(ProofNode::Naf);
        }
        crate::theory::SentenceId::parse(s).map(|id| id.node())
    }

    pub fn is_fact(self) -> bool {
        matches!(self, ProofNode::Fact(_))
    }

    pub fn is_rule(self) -> bool {
        matches!(self, ProofNode::Rule(_))
    }
}

impl fmt::Display for ProofNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofNode::Fact(i) => write!(f, "F{i}"),
            ProofNode::Rule(i) => write!(f, "R{i}"),
            ProofNode::Naf => f.write_str("NAF"),
        }
    }
}

impl Serialize for ProofNode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProofNode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ProofNode::parse(&s).ok_or_else(|| D::Error::custom(format!("bad proof node {s:?}")))
    }
}

pub type Edge = (ProofNode, ProofNode);

/// A proof: node set plus directed edge set. Construction does not enforce
/// validity; see [`validate_structure`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProofGraph {
    pub nodes: BTreeSet<ProofNode>,
    pub edges: BTreeSet<Edge>,
}

impl ProofGraph {
    pub fn new(nodes: impl IntoIterator<Item = ProofNode>, edges: impl IntoIterator<Item = Edge>) -> Self {
        ProofGraph { nodes: nodes.into_iter().collect(), edges: edges.into_iter().collect() }
    }

    pub fn single(node: ProofNode) -> Self {
        ProofGraph::new([node], [])
    }

    /// Parses node names like `"F1"`; `None` on an unknown name.
    pub fn from_names(nodes: &[&str], edges: &[(&str, &str)]) -> Option<Self> {
        let nodes = nodes.iter().map(|n| ProofNode::parse(n)).collect::<Option<BTreeSet<_>>>()?;
        let edges = edges
            .iter()
            .map(|(a, b)| Some((ProofNode::parse(a)?, ProofNode::parse(b)?)))
            .collect::<Option<BTreeSet<_>>>()?;
        Some(ProofGraph { nodes, edges })
    }

    pub fn merge(&mut self, other: &ProofGraph) {
        self.nodes.extend(other.nodes.iter().copied());
        self.edges.extend(other.edges.iter().copied());
    }

    pub fn in_neighbors(&self, node: ProofNode) -> impl Iterator<Item = ProofNode> + '_ {
        self.edges.iter().filter(move |(_, d)| *d == node).map(|(s, _)| *s)
    }

    pub fn out_degree(&self, node: ProofNode) -> usize {
        self.edges.iter().filter(|(s, _)| *s == node).count()
    }

    /// `other` is contained in `self` and differs from it.
    pub fn is_proper_supergraph_of(&self, other: &ProofGraph) -> bool {
        self != other && other.nodes.is_subset(&self.nodes) && other.edges.is_subset(&self.edges)
    }

    /// Undirected connectivity over the node set. Edges touching nodes outside
    /// the node set are ignored.
    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Connected components of the undirected view, each sorted.
    pub fn components(&self) -> Vec<Vec<ProofNode>> {
        let index: BTreeMap<ProofNode, usize> = self.nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut uf = UnionFind::new(index.len());
        for (a, b) in &self.edges {
            if let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) {
                uf.union(i, j);
            }
        }
        let mut groups: BTreeMap<usize, Vec<ProofNode>> = BTreeMap::new();
        for (n, &i) in &index {
            groups.entry(uf.find(i)).or_default().push(*n);
        }
        let mut out: Vec<_> = groups.into_values().collect();
        out.sort();
        out
    }

    /// DOT text for static visualization; sentence text is used as the label
    /// when a theory is supplied.
    pub fn to_dot(&self, name: &str, theory: Option<&Theory>) -> String {
        let mut s = format!("digraph \"{}\" {{\n  rankdir=LR;\n", escape(name));
        for n in &self.nodes {
            let shape = match n {
                ProofNode::Fact(_) => "box",
                ProofNode::Rule(_) => "ellipse",
                ProofNode::Naf => "diamond",
            };
            let label = match theory.and_then(|t| t.node_text(*n)) {
                Some(text) if *n != ProofNode::Naf => format!("{n}: {text}"),
                _ => n.to_string(),
            };
            s.push_str(&format!("  \"{n}\" [shape={shape}, label=\"{}\"];\n", escape(&label)));
        }
        for (a, b) in &self.edges {
            s.push_str(&format!("  \"{a}\" -> \"{b}\";\n"));
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // smaller root wins so results do not depend on call order
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphViolation {
    Empty,
    SelfLoop(ProofNode),
    DanglingEdge(Edge),
    /// Edge into a fact or into NAF.
    IllegalEdge(Edge),
    Disconnected(Vec<Vec<ProofNode>>),
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::Empty => f.write_str("proof has no nodes"),
            GraphViolation::SelfLoop(n) => write!(f, "self-loop on {n}"),
            GraphViolation::DanglingEdge((a, b)) => write!(f, "edge {a}->{b} leaves the node set"),
            GraphViolation::IllegalEdge((a, b)) => write!(f, "edge {a}->{b} must end at a rule"),
            GraphViolation::Disconnected(c) => write!(f, "proof has {} components", c.len()),
        }
    }
}

/// Structural checks mirroring the decoder's constraints: non-empty, no
/// self-loops, edges between present nodes only, every edge ends at a rule,
/// undirected connectivity.
pub fn validate_structure(p: &ProofGraph) -> Vec<GraphViolation> {
    let mut out = Vec::new();
    if p.nodes.is_empty() {
        out.push(GraphViolation::Empty);
    }
    for &(a, b) in &p.edges {
        if a == b {
            out.push(GraphViolation::SelfLoop(a));
            continue;
        }
        if !p.nodes.contains(&a) || !p.nodes.contains(&b) {
            out.push(GraphViolation::DanglingEdge((a, b)));
        }
        if !b.is_rule() {
            out.push(GraphViolation::IllegalEdge((a, b)));
        }
    }
    let comps = p.components();
    if comps.len() > 1 {
        out.push(GraphViolation::Disconnected(comps));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ProofMatch {
    pub node_match: bool,
    pub edge_match: bool,
    pub proof_match: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no gold proofs to match against")]
pub struct EmptyGold;

/// Exact-match comparison with any-gold credit, applied per metric:
/// node and edge credit may come from different golds, proof credit needs one
/// gold matching on both.
pub fn match_proofs(pred: &ProofGraph, golds: &[ProofGraph]) -> Result<ProofMatch, EmptyGold> {
    if golds.is_empty() {
        return Err(EmptyGold);
    }
    let mut m = ProofMatch::default();
    for g in golds {
        let nodes = g.nodes == pred.nodes;
        let edges = g.edges == pred.edges;
        m.node_match |= nodes;
        m.edge_match |= edges;
        m.proof_match |= nodes && edges;
    }
    Ok(m)
}
