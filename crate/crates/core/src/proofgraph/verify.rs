//! Semantic checking of a proof graph against its theory.

use std::collections::BTreeSet;

use super::{validate_structure, ProofGraph, ProofNode};
use crate::reasoner::{GroundRule, ReasonError, Reasoner};
use crate::theory::{Atom, Question, Theory};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("proof references unknown node {0}")]
    UnknownNode(ProofNode),
    #[error(transparent)]
    Reasoner(#[from] ReasonError),
}

pub fn verify_derivation(t: &Theory, q: &Question, p: &ProofGraph) -> Result<bool, VerifyError> {
    let r = Reasoner::with_literal(t, Some(&q.literal))?;
    verify_with(&r, q, p)
}

/// Like [`verify_derivation`] but reuses an existing reasoner.
pub fn verify_with(r: &Reasoner<'_>, q: &Question, p: &ProofGraph) -> Result<bool, VerifyError> {
    let t = r.theory();
    if let Some(n) = p.nodes.iter().chain(p.edges.iter().flat_map(|(a, b)| [a, b])).find(|n| !t.contains_node(**n)) {
        return Err(VerifyError::UnknownNode(*n));
    }
    if !validate_structure(p).is_empty() {
        return Ok(false);
    }
    let atom = q.literal.ground_atom(None).ok_or(ReasonError::NonGroundQuestion)?;
    let concluded_by_rule = r.ground_rules().iter().any(|g| g.head == atom);

    if p.nodes.len() == 1 {
        let only = *p.nodes.iter().next().expect("one node");
        return Ok(match only {
            ProofNode::Fact(i) => {
                let f = &t.facts[i - 1];
                f.literal == q.literal || (f.literal.polarity && f.literal.ground_atom(None).as_ref() == Some(&atom))
            }
            ProofNode::Naf => !r.is_derived(&atom) && !concluded_by_rule,
            ProofNode::Rule(_) => false,
        });
    }

    let check = Checker::new(r, p);
    if r.is_derived(&atom) {
        let all_fire = p.nodes.iter().filter(|n| n.is_rule()).all(|n| check.fired.iter().any(|g| g.rule == rule_index(*n)));
        let concludes = p.nodes.iter().any(|n| match n {
            ProofNode::Fact(i) => t.facts[i - 1].literal == atom.literal(true),
            _ => false,
        }) || check.fired.iter().any(|g| g.head == atom && p.nodes.contains(&ProofNode::Rule(g.rule)));
        let edges_ok = p.edges.iter().all(|&(s, d)| check.edge_justified(s, d, None));
        return Ok(all_fire && concludes && edges_ok);
    }

    // False by failure: one sink rule that could conclude the atom, fed by NAF.
    let sinks: Vec<ProofNode> = p.nodes.iter().copied().filter(|n| n.is_rule() && p.out_degree(*n) == 0).collect();
    let [sink] = sinks.as_slice() else {
        return Ok(false);
    };
    if !p.edges.contains(&(ProofNode::Naf, *sink)) {
        return Ok(false);
    }
    let inst = r.ground_rules().iter().filter(|g| g.rule == rule_index(*sink) && g.head == atom).find(|g| {
        let some_fails = g.antecedents.iter().any(|(a, pol)| !r.holds(a, *pol));
        let satisfied_supplied = g
            .antecedents
            .iter()
            .filter(|(a, pol)| *pol && r.is_derived(a))
            .all(|(a, _)| p.in_neighbors(*sink).any(|s| check.supplies(s, a, true)));
        some_fails && satisfied_supplied
    });
    let Some(inst) = inst else {
        return Ok(false);
    };
    let others_fire = p
        .nodes
        .iter()
        .filter(|n| n.is_rule() && *n != sink)
        .all(|n| check.fired.iter().any(|g| g.rule == rule_index(*n)));
    let edges_ok = p.edges.iter().all(|&(s, d)| {
        if d == *sink {
            s == ProofNode::Naf || check.edge_justified(s, d, Some(inst))
        } else {
            check.edge_justified(s, d, None)
        }
    });
    Ok(others_fire && edges_ok)
}

fn rule_index(n: ProofNode) -> usize {
    match n {
        ProofNode::Rule(i) => i,
        _ => 0,
    }
}

/// Rule instances that can fire using only what the graph's edges supply.
struct Checker<'a, 't> {
    r: &'a Reasoner<'t>,
    p: &'a ProofGraph,
    fired: BTreeSet<&'a GroundRule>,
}

impl<'a, 't> Checker<'a, 't> {
    fn new(r: &'a Reasoner<'t>, p: &'a ProofGraph) -> Self {
        let mut c = Checker { r, p, fired: BTreeSet::new() };
        let candidates: Vec<&GroundRule> =
            r.ground_rules().iter().filter(|g| p.nodes.contains(&ProofNode::Rule(g.rule))).collect();
        loop {
            let mut changed = false;
            for g in &candidates {
                if c.fired.contains(g) {
                    continue;
                }
                let node = ProofNode::Rule(g.rule);
                let ok = g.antecedents.iter().all(|(a, pol)| p.in_neighbors(node).any(|s| c.supplies(s, a, *pol)));
                if ok {
                    c.fired.insert(g);
                    changed = true;
                }
            }
            if !changed {
                return c;
            }
        }
    }

    fn supplies(&self, source: ProofNode, atom: &Atom, polarity: bool) -> bool {
        match source {
            ProofNode::Fact(i) => self.r.theory().facts[i - 1].literal == atom.literal(polarity),
            ProofNode::Naf => !polarity && !self.r.is_derived(atom),
            ProofNode::Rule(i) => polarity && self.fired.iter().any(|g| g.rule == i && &g.head == atom),
        }
    }

    /// The edge feeds some antecedent of a fired instance of its target (or of
    /// `fixed` when given).
    fn edge_justified(&self, source: ProofNode, target: ProofNode, fixed: Option<&GroundRule>) -> bool {
        let uses = |g: &GroundRule| g.antecedents.iter().any(|(a, pol)| self.supplies(source, a, *pol));
        match fixed {
            Some(g) => uses(g),
            None => self.fired.iter().filter(|g| ProofNode::Rule(g.rule) == target).any(|g| uses(g)) && self.p.nodes.contains(&target),
        }
    }
}
