use std::collections::{BTreeMap, BTreeSet};

use super::{ReasonError, Reasoner};
use crate::proofgraph::{ProofGraph, ProofNode};
use crate::theory::{Atom, Literal};

pub const DEFAULT_MAX_PROOFS: usize = 10;

/// Distinct partial derivations kept per atom.
const PER_ATOM_CAP: usize = 64;
/// Combination steps allowed for one question before enumeration stops.
const WORK_BUDGET: usize = 200_000;

/// A derivation projected onto sentence ids; `root` supplies the atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Partial {
    graph: ProofGraph,
    root: ProofNode,
}

impl Partial {
    fn leaf(node: ProofNode) -> Self {
        Partial { graph: ProofGraph::single(node), root: node }
    }
}

struct Enumerator<'a, 't> {
    r: &'a Reasoner<'t>,
    work: usize,
}

impl Enumerator<'_, '_> {
    fn derivations(&mut self, atom: &Atom, stack: &mut Vec<Atom>) -> Vec<Partial> {
        if stack.contains(atom) {
            return Vec::new();
        }
        let mut out: BTreeSet<Partial> = BTreeSet::new();
        let positive = atom.literal(true);
        for f in &self.r.theory.facts {
            if f.literal == positive {
                out.insert(Partial::leaf(f.id.node()));
            }
        }
        let Some(ders) = self.r.closure.derivation_index.get(atom) else {
            return out.into_iter().collect();
        };
        stack.push(atom.clone());
        for d in ders {
            let rule = ProofNode::Rule(d.rule);
            let mut options: Vec<Vec<Partial>> = Vec::with_capacity(d.antecedents.len());
            for (a, pol) in &d.antecedents {
                let opts = if *pol { self.derivations(a, stack) } else { vec![Partial::leaf(ProofNode::Naf)] };
                if opts.is_empty() {
                    options.clear();
                    break;
                }
                options.push(opts);
            }
            if options.is_empty() && !d.antecedents.is_empty() {
                continue;
            }
            self.combine(rule, &options, &mut out);
            if out.len() >= PER_ATOM_CAP || self.work >= WORK_BUDGET {
                break;
            }
        }
        stack.pop();
        out.into_iter().take(PER_ATOM_CAP).collect()
    }

    /// Every choice of one sub-derivation per antecedent, joined under `rule`.
    fn combine(&mut self, rule: ProofNode, options: &[Vec<Partial>], out: &mut BTreeSet<Partial>) {
        let mut idx = vec![0usize; options.len()];
        loop {
            self.work += 1;
            if self.work >= WORK_BUDGET || out.len() >= PER_ATOM_CAP {
                return;
            }
            let chosen: Vec<&Partial> = idx.iter().zip(options).map(|(&i, o)| &o[i]).collect();
            if chosen.iter().all(|p| p.root != rule) {
                let mut graph = ProofGraph::single(rule);
                for p in &chosen {
                    graph.merge(&p.graph);
                    graph.edges.insert((p.root, rule));
                }
                out.insert(Partial { graph, root: rule });
            }
            // odometer increment
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return;
                }
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// Keeps graphs with no proper subgraph among the others, in canonical order.
fn minimal(graphs: BTreeSet<ProofGraph>) -> Vec<ProofGraph> {
    graphs.iter().filter(|g| !graphs.iter().any(|h| g.is_proper_supergraph_of(h))).cloned().collect()
}

impl Reasoner<'_> {
    /// Proofs of a ground question literal.
    ///
    /// * atom derivable: minimal derivation graphs (fact -> rule, rule -> rule,
    ///   NAF -> rule for negative antecedents);
    /// * negative question matching a negative fact: that fact alone;
    /// * atom underivable, no rule concludes it: the lone NAF node;
    /// * atom underivable otherwise: the concluding rule of least failure
    ///   depth, NAF feeding it, plus derivations of its satisfied antecedents.
    pub fn prove(&self, literal: &Literal, max_proofs: usize) -> Result<Vec<ProofGraph>, ReasonError> {
        if max_proofs < 1 {
            return Err(ReasonError::InvalidMaxProofs);
        }
        let atom = literal.ground_atom(None).ok_or(ReasonError::NonGroundQuestion)?;
        if !literal.polarity {
            if let Some(i) = self.negative_fact(literal) {
                return Ok(vec![ProofGraph::single(ProofNode::Fact(i))]);
            }
        }
        if self.is_derived(&atom) {
            let mut e = Enumerator { r: self, work: 0 };
            let graphs: BTreeSet<ProofGraph> =
                e.derivations(&atom, &mut Vec::new()).into_iter().map(|p| p.graph).collect();
            let mut out = minimal(graphs);
            out.truncate(max_proofs);
            return Ok(out);
        }
        Ok(vec![self.failed_proof(&atom)])
    }

    /// Failure depth of every underivable head: 0 when nothing concludes the
    /// atom, otherwise one more than the shallowest failing antecedent over
    /// the best concluding rule instance. Unresolved cycles stay at `usize::MAX`.
    fn failure_depths(&self) -> BTreeMap<Atom, usize> {
        let mut depth: BTreeMap<Atom, usize> = BTreeMap::new();
        for g in &self.ground {
            if !self.is_derived(&g.head) {
                depth.insert(g.head.clone(), usize::MAX);
            }
        }
        loop {
            let mut changed = false;
            for g in &self.ground {
                if self.is_derived(&g.head) {
                    continue;
                }
                let d = self.rule_failure_depth(g.antecedents.as_slice(), &depth);
                let cur = depth.get_mut(&g.head).expect("head registered");
                if d < *cur {
                    *cur = d;
                    changed = true;
                }
            }
            if !changed {
                return depth;
            }
        }
    }

    fn rule_failure_depth(&self, antecedents: &[(Atom, bool)], depth: &BTreeMap<Atom, usize>) -> usize {
        antecedents
            .iter()
            .filter(|(a, pol)| !self.holds(a, *pol))
            .map(|(a, pol)| if *pol { depth.get(a).copied().unwrap_or(0) } else { 0 })
            .min()
            .map_or(usize::MAX, |d| d.saturating_add(1))
    }

    fn failed_proof(&self, atom: &Atom) -> ProofGraph {
        let candidates: Vec<_> = self.ground.iter().filter(|g| &g.head == atom).collect();
        if candidates.is_empty() {
            return ProofGraph::single(ProofNode::Naf);
        }
        let depth = self.failure_depths();
        let best = candidates
            .into_iter()
            .min_by_key(|g| (self.rule_failure_depth(&g.antecedents, &depth), g.rule, g.binding.clone()))
            .expect("non-empty");
        let rule = ProofNode::Rule(best.rule);
        let mut graph = ProofGraph::new([rule, ProofNode::Naf], [(ProofNode::Naf, rule)]);
        for (a, pol) in &best.antecedents {
            if !(*pol && self.is_derived(a)) {
                continue;
            }
            let mut e = Enumerator { r: self, work: 0 };
            let sub = e.derivations(a, &mut vec![atom.clone()]).into_iter().filter(|p| p.root != rule).min();
            if let Some(p) = sub {
                graph.merge(&p.graph);
                graph.edges.insert((p.root, rule));
            }
        }
        graph
    }
}
