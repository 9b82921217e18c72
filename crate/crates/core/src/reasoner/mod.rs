//! Closed-world forward chaining with stratified negation as failure.
//!
//! Rules are grounded over the entities mentioned in the theory and evaluated
//! stratum by stratum: a negative antecedent is checked only once every
//! predicate it mentions is complete, so "not s" holds exactly when `s` is
//! absent from the final closure.

mod prove;

use std::collections::{BTreeMap, BTreeSet};

use crate::proofgraph::{ProofGraph, ProofNode};
use crate::theory::{Atom, Literal, Question, SentenceId, Theory};

pub use prove::DEFAULT_MAX_PROOFS;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReasonError {
    #[error("rule {0} takes part in a cycle through negation")]
    NonStratified(SentenceId),
    #[error("closure exceeded {0} iterations")]
    IterationBound(usize),
    #[error("question literal must be ground")]
    NonGroundQuestion,
    #[error("max_proofs must be at least 1")]
    InvalidMaxProofs,
}

/// A rule instantiated for one binding of its variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundRule {
    /// 1-based rule index.
    pub rule: usize,
    pub binding: Option<String>,
    pub antecedents: Vec<(Atom, bool)>,
    pub head: Atom,
}

/// One way a literal was produced: a rule instance and the ground antecedents
/// that supported it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Derivation {
    pub rule: usize,
    pub binding: Option<String>,
    pub antecedents: Vec<(Atom, bool)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Closure {
    pub derived: BTreeSet<Atom>,
    pub derivation_index: BTreeMap<Atom, Vec<Derivation>>,
    pub iteration_count: usize,
}

/// Grounded program plus its closure, reused across questions on one theory.
#[derive(Debug, Clone)]
pub struct Reasoner<'t> {
    theory: &'t Theory,
    ground: Vec<GroundRule>,
    closure: Closure,
}

type PredKey = (String, bool);

impl<'t> Reasoner<'t> {
    pub fn new(theory: &'t Theory) -> Result<Self, ReasonError> {
        Self::with_literal(theory, None)
    }

    /// Grounds over the theory's entities plus any constant of `extra`, so a
    /// question about an unseen entity still sees the rules that could apply.
    pub fn with_literal(theory: &'t Theory, extra: Option<&Literal>) -> Result<Self, ReasonError> {
        let mut entities = theory.entities();
        if let Some(l) = extra {
            entities.extend(l.constants().map(str::to_owned));
        }
        let ground = ground_rules(theory, &entities);
        let strata = stratify(theory)?;
        let closure = evaluate(theory, &ground, &strata, entities.len())?;
        Ok(Reasoner { theory, ground, closure })
    }

    pub fn theory(&self) -> &'t Theory {
        self.theory
    }

    pub fn closure(&self) -> &Closure {
        &self.closure
    }

    pub fn ground_rules(&self) -> &[GroundRule] {
        &self.ground
    }

    pub fn is_derived(&self, atom: &Atom) -> bool {
        self.closure.derived.contains(atom)
    }

    /// Truth of a ground antecedent against the final closure.
    pub fn holds(&self, atom: &Atom, polarity: bool) -> bool {
        self.is_derived(atom) == polarity
    }

    /// Index of a negative fact asserting exactly `literal`, if any.
    pub(crate) fn negative_fact(&self, literal: &Literal) -> Option<usize> {
        self.theory.facts.iter().position(|f| !f.literal.polarity && &f.literal == literal).map(|i| i + 1)
    }

    /// Closed-world answer for a ground literal.
    pub fn answer(&self, literal: &Literal) -> Result<bool, ReasonError> {
        let atom = literal.ground_atom(None).ok_or(ReasonError::NonGroundQuestion)?;
        Ok(if literal.polarity {
            self.is_derived(&atom)
        } else {
            !self.is_derived(&atom) || self.negative_fact(literal).is_some()
        })
    }

    /// Negative facts whose positive form is derivable anyway.
    pub fn contradictions(&self) -> Vec<SentenceId> {
        self.theory
            .facts
            .iter()
            .filter(|f| !f.literal.polarity)
            .filter(|f| f.literal.ground_atom(None).is_some_and(|a| self.is_derived(&a)))
            .map(|f| f.id)
            .collect()
    }
}

fn ground_rules(t: &Theory, entities: &BTreeSet<String>) -> Vec<GroundRule> {
    let mut out = Vec::new();
    for (i, r) in t.rules.iter().enumerate() {
        let bindings: Vec<Option<&str>> = if r.has_var() {
            entities.iter().map(|e| Some(e.as_str())).collect()
        } else {
            vec![None]
        };
        for b in bindings {
            let ants = r
                .antecedents
                .iter()
                .map(|l| l.ground_atom(b).map(|a| (a, l.polarity)))
                .collect::<Option<Vec<_>>>();
            let (Some(antecedents), Some(head)) = (ants, r.consequent.ground_atom(b)) else {
                continue;
            };
            out.push(GroundRule { rule: i + 1, binding: b.map(str::to_owned), antecedents, head });
        }
    }
    out
}

fn pred_key(l: &Literal) -> PredKey {
    (l.predicate.clone(), l.is_relation())
}

/// Assigns each predicate a stratum so that heads sit at or above positive
/// body predicates and strictly above negative ones.
fn stratify(t: &Theory) -> Result<BTreeMap<PredKey, usize>, ReasonError> {
    let mut stratum: BTreeMap<PredKey, usize> = BTreeMap::new();
    for r in &t.rules {
        stratum.entry(pred_key(&r.consequent)).or_insert(0);
        for a in &r.antecedents {
            stratum.entry(pred_key(a)).or_insert(0);
        }
    }
    let limit = stratum.len();
    loop {
        let mut changed = false;
        for r in &t.rules {
            let head = pred_key(&r.consequent);
            for a in &r.antecedents {
                let need = stratum[&pred_key(a)] + usize::from(!a.polarity);
                if stratum[&head] < need {
                    if need > limit {
                        return Err(ReasonError::NonStratified(r.id));
                    }
                    stratum.insert(head.clone(), need);
                    changed = true;
                }
            }
        }
        if !changed {
            return Ok(stratum);
        }
    }
}

fn evaluate(
    t: &Theory,
    ground: &[GroundRule],
    strata: &BTreeMap<PredKey, usize>,
    num_entities: usize,
) -> Result<Closure, ReasonError> {
    let mut derived: BTreeSet<Atom> = t
        .facts
        .iter()
        .filter(|f| f.literal.polarity)
        .filter_map(|f| f.literal.ground_atom(None))
        .collect();

    let ground_space = {
        let e = num_entities.max(1);
        let unary = strata.keys().filter(|(_, rel)| !rel).count();
        let binary = strata.len() - unary;
        e * unary + e * e * binary
    };
    let bound = t.rules.len().max(1) * ground_space.max(1);

    let top = strata.values().copied().max().unwrap_or(0);
    let mut iterations = 0;
    for level in 0..=top {
        let layer: Vec<&GroundRule> =
            ground.iter().filter(|g| strata[&g.head.predicate_key()] == level).collect();
        loop {
            iterations += 1;
            if iterations > bound + top + 1 {
                return Err(ReasonError::IterationBound(bound));
            }
            let mut changed = false;
            for g in &layer {
                if derived.contains(&g.head) {
                    continue;
                }
                if g.antecedents.iter().all(|(a, pol)| derived.contains(a) == *pol) {
                    derived.insert(g.head.clone());
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    let mut derivation_index: BTreeMap<Atom, Vec<Derivation>> = BTreeMap::new();
    for g in ground {
        if g.antecedents.iter().all(|(a, pol)| derived.contains(a) == *pol) {
            derivation_index.entry(g.head.clone()).or_default().push(Derivation {
                rule: g.rule,
                binding: g.binding.clone(),
                antecedents: g.antecedents.clone(),
            });
        }
    }
    Ok(Closure { derived, derivation_index, iteration_count: iterations })
}

/// Least fixpoint of the theory under stratified negation as failure.
pub fn closure(t: &Theory) -> Result<Closure, ReasonError> {
    Ok(Reasoner::new(t)?.closure)
}

pub fn answer_question(t: &Theory, q: &Question) -> Result<bool, ReasonError> {
    Reasoner::with_literal(t, Some(&q.literal))?.answer(&q.literal)
}

/// Up to `max_proofs` distinct minimal proofs of the question, canonically
/// ordered.
pub fn prove(t: &Theory, q: &Question, max_proofs: usize) -> Result<Vec<ProofGraph>, ReasonError> {
    Reasoner::with_literal(t, Some(&q.literal))?.prove(&q.literal, max_proofs)
}

/// Number of rule nodes on the longest simple directed path.
pub fn proof_depth(p: &ProofGraph) -> usize {
    fn walk(p: &ProofGraph, at: ProofNode, seen: &mut BTreeSet<ProofNode>) -> usize {
        let here = usize::from(at.is_rule());
        let mut best = 0;
        let next: Vec<ProofNode> = p.edges.iter().filter(|(s, _)| *s == at).map(|(_, d)| *d).collect();
        for n in next {
            if seen.insert(n) {
                best = best.max(walk(p, n, seen));
                seen.remove(&n);
            }
        }
        here + best
    }
    p.nodes
        .iter()
        .map(|&n| {
            let mut seen = BTreeSet::from([n]);
            walk(p, n, &mut seen)
        })
        .max()
        .unwrap_or(0)
}

/// Sentences whose individual removal flips the answer.
pub fn critical_sentences(t: &Theory, q: &Question) -> Result<BTreeSet<SentenceId>, ReasonError> {
    let base = answer_question(t, q)?;
    let ids = t.facts.iter().map(|f| f.id).chain(t.rules.iter().map(|r| r.id));
    let mut out = BTreeSet::new();
    for id in ids {
        if answer_question(&t.without(id), q)? != base {
            out.insert(id);
        }
    }
    Ok(out)
}
