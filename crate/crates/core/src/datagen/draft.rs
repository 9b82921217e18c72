//! Drafting one theory: a depth-exact derivation chain built backward from a
//! goal, supporting facts, then distractors.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{GenConfig, VocabularyProfile};
use crate::reasoner::{proof_depth, Reasoner};
use crate::theory::{Atom, Literal, Question, Term, Theory, MAX_CONTEXT};

type RuleParts = (Vec<Literal>, Literal);

struct Draft<'a> {
    rng: &'a mut ChaCha8Rng,
    fresh: Vec<String>,
    entities: Vec<String>,
    relations: Vec<String>,
    facts: Vec<Literal>,
    rules: Vec<RuleParts>,
    /// Attributes concluded by the chain; distractors must not conclude them.
    chain: Vec<String>,
    /// Attributes only ever used under negation.
    absent: BTreeSet<String>,
}

impl Draft<'_> {
    fn attribute(&mut self) -> Option<String> {
        self.fresh.pop()
    }

    fn add_fact(&mut self, l: Literal) -> bool {
        let clash = self.facts.iter().any(|f| f.ground_atom(None) == l.ground_atom(None));
        if !clash {
            self.facts.push(l);
        }
        !clash
    }

    fn used_attributes(&self) -> Vec<String> {
        let mut out = BTreeSet::new();
        for l in self.facts.iter().chain(self.rules.iter().flat_map(|(a, c)| a.iter().chain([c]))) {
            if !l.is_relation() && !self.absent.contains(&l.predicate) {
                out.insert(l.predicate.clone());
            }
        }
        out.into_iter().collect()
    }
}

/// One attempt; `None` when the draft breaks a theory constraint.
pub(super) fn draft_theory(cfg: &GenConfig, profile: &VocabularyProfile, id: &str, rng: &mut ChaCha8Rng) -> Option<Theory> {
    let depth = cfg.max_depth;
    let mut fresh = profile.attributes.clone();
    fresh.shuffle(rng);
    let mut entities = profile.entities.clone();
    entities.shuffle(rng);
    entities.truncate(rng.gen_range(2..=4.min(profile.entities.len()).max(2)));
    let mut relations = profile.relations.clone();
    relations.shuffle(rng);

    let rule_target = rng.gen_range(cfg.rules.min..=cfg.rules.max).max(depth);
    let fact_target = rng.gen_range(cfg.facts.min..=cfg.facts.max).max(1);
    let budget = (cfg.facts.max + cfg.rules.max).min(MAX_CONTEXT);

    let mut d = Draft { rng, fresh, entities, relations, facts: vec![], rules: vec![], chain: vec![], absent: BTreeSet::new() };
    let goal = d.entities[0].clone();

    // Chain: c0(goal) -> c1 -> ... -> cD
    let mut prev = d.attribute()?;
    d.add_fact(Literal::attribute(Term::constant(&goal), &prev, true));
    d.chain.push(prev.clone());
    for _ in 0..depth {
        let next = d.attribute()?;
        let ground = d.rng.gen_bool(0.15);
        let subject = if ground { Term::constant(&goal) } else { Term::Var };
        let mut ants = vec![Literal::attribute(subject.clone(), &prev, true)];
        if d.rng.gen_bool(0.3) {
            if !d.relations.is_empty() && d.rng.gen_bool(0.5) {
                let rel = d.relations[d.rng.gen_range(0..d.relations.len())].clone();
                let other = d.entities[d.rng.gen_range(1..d.entities.len())].clone();
                ants.push(Literal::relation(subject.clone(), &rel, Term::constant(&other), true));
                d.add_fact(Literal::relation(Term::constant(&goal), &rel, Term::constant(&other), true));
            } else if let Some(extra) = d.attribute() {
                ants.push(Literal::attribute(subject.clone(), &extra, true));
                d.add_fact(Literal::attribute(Term::constant(&goal), &extra, true));
            }
        }
        if d.rng.gen_bool(cfg.negation_rate) {
            if let Some(missing) = d.attribute() {
                ants.push(Literal::attribute(subject.clone(), &missing, false));
                d.absent.insert(missing);
            }
        }
        d.rules.push((ants, Literal::attribute(subject, &next, true)));
        d.chain.push(next.clone());
        prev = next;
    }
    if d.facts.len() + d.rules.len() > budget {
        return None;
    }

    // Distractor rules conclude attributes outside the chain.
    let mut conclusions: Vec<String> = Vec::new();
    while d.rules.len() < rule_target && d.facts.len() + d.rules.len() < budget {
        let head = if conclusions.len() < 3 || d.rng.gen_bool(0.3) {
            match d.attribute() {
                Some(a) => a,
                None => conclusions.choose(d.rng)?.clone(),
            }
        } else {
            conclusions.choose(d.rng)?.clone()
        };
        let pool: Vec<String> = d.used_attributes().into_iter().filter(|a| *a != head).collect();
        if pool.is_empty() {
            return None;
        }
        let mut ants = Vec::new();
        for _ in 0..d.rng.gen_range(1..=2) {
            let a = pool.choose(d.rng)?.clone();
            if ants.iter().any(|l: &Literal| l.predicate == a) {
                continue;
            }
            let polarity = !d.rng.gen_bool(cfg.negation_rate);
            ants.push(Literal::attribute(Term::Var, a, polarity));
        }
        if ants.iter().all(|l| !l.polarity) {
            ants[0].polarity = true;
        }
        if d.rng.gen_bool(0.2) && !d.relations.is_empty() {
            let rel = d.relations.choose(d.rng)?.clone();
            let other = d.entities.choose(d.rng)?.clone();
            ants.push(Literal::relation(Term::Var, rel, Term::constant(other), true));
        }
        if !conclusions.contains(&head) {
            conclusions.push(head.clone());
        }
        d.rules.push((ants, Literal::attribute(Term::Var, head, true)));
    }

    // Distractor facts; negative ones are placed once the closure is known.
    let mut negative_slots = 0;
    let mut attempts = 0;
    while d.facts.len() + negative_slots < fact_target && d.facts.len() + negative_slots + d.rules.len() < budget {
        attempts += 1;
        if attempts > 200 {
            break;
        }
        if d.rng.gen_bool(cfg.negation_rate / 2.0) {
            negative_slots += 1;
            continue;
        }
        let who = d.entities.choose(d.rng)?.clone();
        let lit = if d.rng.gen_bool(0.2) && !d.relations.is_empty() {
            let rel = d.relations.choose(d.rng)?.clone();
            let other = d.entities.choose(d.rng)?.clone();
            if other == who {
                continue;
            }
            Literal::relation(Term::constant(&who), rel, Term::constant(other), true)
        } else {
            let pool = d.used_attributes();
            let a = pool.choose(d.rng)?.clone();
            if who == goal && d.chain[1..].contains(&a) {
                continue;
            }
            Literal::attribute(Term::constant(&who), a, true)
        };
        d.add_fact(lit);
    }

    let Draft { rng, mut facts, mut rules, entities, absent, .. } = d;
    let probe = Theory::from_parts(id, facts.clone(), rules.clone(), vec![]);
    let r = Reasoner::new(&probe).ok()?;
    let mut underivable: Vec<Atom> = Vec::new();
    for e in &entities {
        for a in probe_attributes(&probe, &absent) {
            let atom = Atom { subject: e.clone(), predicate: a, object: None };
            if !r.is_derived(&atom) {
                underivable.push(atom);
            }
        }
    }
    underivable.shuffle(rng);
    for atom in underivable.into_iter().take(negative_slots) {
        facts.push(atom.literal(false));
    }

    facts.shuffle(rng);
    rules.shuffle(rng);
    if rules.iter().any(|(ants, c)| ants.iter().any(|a| a.predicate == c.predicate && a.is_relation() == c.is_relation())) {
        return None;
    }
    let t = Theory::from_parts(id, facts, rules, vec![]);
    if !t.validate().is_empty() {
        return None;
    }
    Some(t)
}

fn probe_attributes(t: &Theory, absent: &BTreeSet<String>) -> Vec<String> {
    let mut out = BTreeSet::new();
    for l in t.facts.iter().map(|f| &f.literal).chain(t.rules.iter().flat_map(|r| r.antecedents.iter().chain([&r.consequent]))) {
        if !l.is_relation() && !absent.contains(&l.predicate) {
            out.insert(l.predicate.clone());
        }
    }
    out.into_iter().collect()
}

/// Annotated question candidates: one per ground attribute atom and per
/// relation atom over the theory's entities, negated at `negation_rate`.
fn candidates(cfg: &GenConfig, t: &Theory, r: &Reasoner<'_>, rng: &mut ChaCha8Rng) -> Vec<Question> {
    let entities: Vec<String> = t.entities().into_iter().collect();
    let mut attributes = BTreeSet::new();
    let mut relations = BTreeSet::new();
    for l in t.facts.iter().map(|f| &f.literal).chain(t.rules.iter().flat_map(|r| r.antecedents.iter().chain([&r.consequent]))) {
        if l.is_relation() {
            relations.insert(l.predicate.clone());
        } else {
            attributes.insert(l.predicate.clone());
        }
    }
    let mut lits = Vec::new();
    for e in &entities {
        for a in &attributes {
            lits.push(Literal::attribute(Term::constant(e), a, true));
        }
        for rel in &relations {
            for o in &entities {
                if o != e {
                    lits.push(Literal::relation(Term::constant(e), rel, Term::constant(o), true));
                }
            }
        }
    }
    let mut out = Vec::new();
    for lit in lits {
        let lit = if rng.gen_bool(cfg.negation_rate) { lit.negated() } else { lit };
        let (Ok(answer), Ok(proofs)) = (r.answer(&lit), r.prove(&lit, cfg.max_proofs)) else {
            continue;
        };
        let Some(depth) = proofs.iter().map(proof_depth).max() else {
            continue;
        };
        if depth <= cfg.max_depth {
            let mut q = Question::new(String::new(), lit);
            q.answer = Some(answer);
            q.depth = Some(depth);
            q.proofs = Some(proofs);
            out.push(q);
        }
    }
    out
}

/// Picks one question at the full depth, then alternates answers toward the
/// balance target while cycling through depths. `None` when the quota or
/// the balance cannot be met.
pub(super) fn attach_questions(cfg: &GenConfig, t: &mut Theory, rng: &mut ChaCha8Rng) -> Option<()> {
    let r = Reasoner::new(t).ok()?;
    if !r.contradictions().is_empty() {
        return None;
    }
    let mut pool = candidates(cfg, t, &r, rng);
    drop(r);
    pool.shuffle(rng);
    let deepest = pool.iter().position(|q| q.depth == Some(cfg.max_depth))?;
    let mut chosen = vec![pool.swap_remove(deepest)];

    let mut buckets: BTreeMap<(bool, usize), Vec<Question>> = BTreeMap::new();
    for q in pool {
        buckets.entry((q.answer?, q.depth?)).or_default().push(q);
    }
    let mut cursor = [0usize; 2];
    while chosen.len() < cfg.questions_per_theory {
        let trues = chosen.iter().filter(|q| q.answer == Some(true)).count();
        let want_true = (trues as f64) < cfg.answer_balance * (chosen.len() + 1) as f64;
        let mut picked = None;
        for want in [want_true, !want_true] {
            let c = &mut cursor[usize::from(want)];
            for step in 0..=cfg.max_depth {
                let depth = (*c + step) % (cfg.max_depth + 1);
                if let Some(q) = buckets.get_mut(&(want, depth)).and_then(Vec::pop) {
                    *c = depth + 1;
                    picked = Some(q);
                    break;
                }
            }
            if picked.is_some() {
                break;
            }
        }
        chosen.push(picked?);
    }
    let trues = chosen.iter().filter(|q| q.answer == Some(true)).count() as f64;
    if (trues - cfg.answer_balance * chosen.len() as f64).abs() > 1.0 {
        return None;
    }
    chosen.shuffle(rng);
    for (i, q) in chosen.iter_mut().enumerate() {
        q.id = format!("Q{}", i + 1);
    }
    t.questions = chosen;
    Some(())
}
