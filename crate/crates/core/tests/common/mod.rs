//! Independent oracles shared by the integration suites. Nothing here calls
//! into the reasoner or decoder under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ruleproof::potentials::Potentials;
use ruleproof::theory::{Literal, Term, Theory};

pub type GAtom = (String, String, Option<String>);

struct GroundRule {
    pos: Vec<GAtom>,
    neg: Vec<GAtom>,
    head: GAtom,
}

fn bind(t: &Term, x: &str) -> String {
    match t {
        Term::Var => x.to_owned(),
        Term::Const(c) => c.clone(),
    }
}

fn gatom(l: &Literal, x: &str) -> GAtom {
    (bind(&l.subject, x), l.predicate.clone(), l.object.as_ref().map(|o| bind(o, x)))
}

fn constants(t: &Theory, extra: &[&Literal]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut add = |l: &Literal| {
        for term in std::iter::once(&l.subject).chain(l.object.as_ref()) {
            if let Term::Const(c) = term {
                out.insert(c.clone());
            }
        }
    };
    t.facts.iter().for_each(|f| add(&f.literal));
    for r in &t.rules {
        r.antecedents.iter().for_each(&mut add);
        add(&r.consequent);
    }
    extra.iter().for_each(|l| add(l));
    out
}

fn ground(t: &Theory, consts: &BTreeSet<String>) -> Vec<GroundRule> {
    let mut out = Vec::new();
    for r in &t.rules {
        let uses_var = r.antecedents.iter().chain([&r.consequent]).any(|l| {
            matches!(l.subject, Term::Var) || matches!(l.object, Some(Term::Var))
        });
        let xs: Vec<&str> = if uses_var { consts.iter().map(String::as_str).collect() } else { vec!["-"] };
        for x in xs {
            out.push(GroundRule {
                pos: r.antecedents.iter().filter(|l| l.polarity).map(|l| gatom(l, x)).collect(),
                neg: r.antecedents.iter().filter(|l| !l.polarity).map(|l| gatom(l, x)).collect(),
                head: gatom(&r.consequent, x),
            });
        }
    }
    out
}

/// Least model of the reduct of the program with respect to `assumed`, plus
/// the stage at which each atom first appears.
fn gamma(facts: &BTreeSet<GAtom>, rules: &[GroundRule], assumed: &BTreeSet<GAtom>) -> BTreeMap<GAtom, usize> {
    let mut stage: BTreeMap<GAtom, usize> = facts.iter().map(|a| (a.clone(), 0)).collect();
    let mut round = 0;
    loop {
        round += 1;
        let mut new = Vec::new();
        for r in rules {
            if stage.contains_key(&r.head) {
                continue;
            }
            if r.neg.iter().any(|a| assumed.contains(a)) {
                continue;
            }
            if r.pos.iter().all(|a| stage.get(a).is_some_and(|s| *s < round)) {
                new.push(r.head.clone());
            }
        }
        if new.is_empty() {
            return stage;
        }
        for a in new {
            stage.entry(a).or_insert(round);
        }
    }
}

/// True when some predicate depends negatively on itself through the rules.
pub fn has_negative_cycle(t: &Theory) -> bool {
    let key = |l: &Literal| (l.predicate.clone(), l.object.is_some());
    let mut preds = BTreeSet::new();
    for r in &t.rules {
        preds.insert(key(&r.consequent));
        r.antecedents.iter().for_each(|l| {
            preds.insert(key(l));
        });
    }
    let idx: BTreeMap<_, usize> = preds.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let n = idx.len();
    let mut reach = vec![vec![false; n]; n];
    let mut neg_edges = Vec::new();
    for r in &t.rules {
        let h = idx[&key(&r.consequent)];
        for l in &r.antecedents {
            let a = idx[&key(l)];
            reach[a][h] = true;
            if !l.polarity {
                neg_edges.push((a, h));
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    neg_edges.iter().any(|&(a, h)| a == h || reach[h][a])
}

pub struct OracleModel {
    pub atoms: BTreeMap<GAtom, usize>,
    negative_facts: BTreeSet<GAtom>,
}

/// Well-founded model by alternating fixpoint; `None` for programs with a
/// negative cycle.
pub fn oracle_model(t: &Theory, extra: &[&Literal]) -> Option<OracleModel> {
    if has_negative_cycle(t) {
        return None;
    }
    let consts = constants(t, extra);
    let rules = ground(t, &consts);
    let facts: BTreeSet<GAtom> = t.facts.iter().filter(|f| f.literal.polarity).map(|f| gatom(&f.literal, "-")).collect();
    let negative_facts = t.facts.iter().filter(|f| !f.literal.polarity).map(|f| gatom(&f.literal, "-")).collect();
    let mut under: BTreeSet<GAtom> = BTreeSet::new();
    loop {
        let over: BTreeSet<GAtom> = gamma(&facts, &rules, &under).into_keys().collect();
        let next: BTreeSet<GAtom> = gamma(&facts, &rules, &over).into_keys().collect();
        if next == under {
            let total = gamma(&facts, &rules, &under);
            assert_eq!(total.keys().cloned().collect::<BTreeSet<_>>(), under, "stratified program must have a total model");
            return Some(OracleModel { atoms: total, negative_facts });
        }
        under = next;
    }
}

impl OracleModel {
    pub fn answer(&self, l: &Literal) -> bool {
        let a = gatom(l, "-");
        if l.polarity {
            self.atoms.contains_key(&a)
        } else {
            !self.atoms.contains_key(&a) || self.negative_facts.contains(&a)
        }
    }

    pub fn max_stage(&self) -> usize {
        self.atoms.values().copied().max().unwrap_or(0)
    }
}

pub const ENTITIES: [&str; 3] = ["anne", "bob", "carl"];
pub const ATTRIBUTES: [&str; 5] = ["red", "big", "kind", "cold", "nice"];

fn random_literal(rng: &mut ChaCha8Rng, var: bool, polarity: bool) -> Literal {
    let term = |rng: &mut ChaCha8Rng, var: bool| {
        if var && rng.gen_bool(0.8) {
            Term::Var
        } else {
            Term::constant(ENTITIES[rng.gen_range(0..ENTITIES.len())])
        }
    };
    let s = term(rng, var);
    if rng.gen_bool(0.15) {
        let mut o = term(rng, var);
        if o == s {
            o = Term::constant(if s == Term::constant("anne") { "bob" } else { "anne" });
        }
        Literal::relation(s, "like", o, polarity)
    } else {
        Literal::attribute(s, ATTRIBUTES[rng.gen_range(0..ATTRIBUTES.len())], polarity)
    }
}

/// A small random theory, independent of the dataset generator. May be
/// non-stratified; callers filter.
pub fn random_theory(rng: &mut ChaCha8Rng, id: &str, max_facts: usize, max_rules: usize) -> Theory {
    let mut facts: Vec<Literal> = Vec::new();
    for _ in 0..rng.gen_range(0..=max_facts) {
        let pol = !rng.gen_bool(0.15);
        let l = random_literal(rng, false, pol);
        if !facts.iter().any(|f| f.ground_atom(None) == l.ground_atom(None)) {
            facts.push(l);
        }
    }
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(0..=max_rules) {
        let n = rng.gen_range(1..=3);
        let ants: Vec<Literal> = (0..n)
            .map(|_| {
                let pol = !rng.gen_bool(0.3);
                random_literal(rng, true, pol)
            })
            .collect();
        let has_var = ants.iter().any(Literal::has_var);
        let mut head = random_literal(rng, has_var, true);
        if has_var && !head.has_var() {
            head.subject = Term::Var;
        }
        if ants.iter().any(|a| a.predicate == head.predicate && a.is_relation() == head.is_relation()) {
            continue;
        }
        rules.push((ants, head));
    }
    Theory::from_parts(id, facts, rules, vec![])
}

/// Every ground question over the theory's constants and predicates, both
/// polarities.
pub fn all_questions(t: &Theory) -> Vec<Literal> {
    let consts = constants(t, &[]);
    let mut out = Vec::new();
    for c in &consts {
        for a in ATTRIBUTES {
            for pol in [true, false] {
                out.push(Literal::attribute(Term::constant(c), a, pol));
            }
        }
        for o in &consts {
            if o != c {
                out.push(Literal::relation(Term::constant(c), "like", Term::constant(o), true));
            }
        }
    }
    out
}

pub struct BruteDecode {
    pub objective: f64,
    pub edges: BTreeSet<(usize, usize)>,
    /// Assignments within 1e-9 of the optimum.
    pub optima: usize,
}

fn selected(p: &Potentials) -> Vec<usize> {
    let s: Vec<usize> = (0..p.node_prob.len()).filter(|&i| p.node_prob[i] >= 0.5).collect();
    if !s.is_empty() {
        return s;
    }
    let mut best = 0;
    for i in 1..p.node_prob.len() {
        if p.node_prob[i] > p.node_prob[best] {
            best = i;
        }
    }
    vec![best]
}

fn is_rule(p: &Potentials, j: usize) -> bool {
    j >= p.layout.num_facts && j < p.layout.num_facts + p.layout.num_rules
}

fn connected(nodes: &[usize], links: &[(usize, usize)]) -> bool {
    let mut seen = BTreeSet::from([nodes[0]]);
    let mut grew = true;
    while grew {
        grew = false;
        for &(a, b) in links {
            if seen.contains(&a) != seen.contains(&b) {
                seen.insert(a);
                seen.insert(b);
                grew = true;
            }
        }
    }
    seen.len() == nodes.len()
}

/// Exhaustive optimum over unordered link sets: for a fixed set of linked
/// pairs the objective separates per pair, so each linked pair takes its best
/// non-empty direction choice. `None` when no link set connects the nodes.
pub fn brute_decode(p: &Potentials, connectivity: bool) -> Option<BruteDecode> {
    let nodes = selected(p);
    struct Pair {
        a: usize,
        b: usize,
        off: f64,
        on: f64,
        on_edges: Vec<(usize, usize)>,
    }
    let mut pairs = Vec::new();
    for (x, &a) in nodes.iter().enumerate() {
        for &b in &nodes[x + 1..] {
            let dirs: Vec<(usize, usize)> = [(a, b), (b, a)].into_iter().filter(|&(_, j)| is_rule(p, j)).collect();
            if dirs.is_empty() {
                continue;
            }
            let off = dirs.iter().map(|&(i, j)| 1.0 - p.edge_prob[i][j]).sum();
            let mut on = f64::NEG_INFINITY;
            let mut on_edges = vec![];
            for mask in 1..(1u32 << dirs.len()) {
                let chosen: Vec<(usize, usize)> =
                    dirs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, d)| *d).collect();
                let v: f64 = dirs
                    .iter()
                    .map(|d| if chosen.contains(d) { p.edge_prob[d.0][d.1] } else { 1.0 - p.edge_prob[d.0][d.1] })
                    .sum();
                if v > on {
                    on = v;
                    on_edges = chosen;
                }
            }
            pairs.push(Pair { a, b, off, on, on_edges });
        }
    }
    let mut best: Option<BruteDecode> = None;
    for mask in 0u64..(1u64 << pairs.len()) {
        let linked: Vec<(usize, usize)> =
            pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, q)| (q.a, q.b)).collect();
        if connectivity && !connected(&nodes, &linked) {
            continue;
        }
        let v: f64 = pairs.iter().enumerate().map(|(k, q)| if mask >> k & 1 == 1 { q.on } else { q.off }).sum();
        match &mut best {
            Some(b) if (v - b.objective).abs() <= 1e-9 => b.optima += 1,
            Some(b) if v < b.objective => {}
            _ => {
                let edges = pairs
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .flat_map(|(_, q)| q.on_edges.iter().copied())
                    .collect();
                best = Some(BruteDecode { objective: v, edges, optima: 1 });
            }
        }
    }
    best
}

/// Enumerates every assignment of every allowed ordered pair; only for tiny
/// instances. Cross-checks [`brute_decode`].
pub fn naive_decode(p: &Potentials, connectivity: bool) -> Option<f64> {
    let nodes = selected(p);
    let vars: Vec<(usize, usize)> =
        nodes.iter().flat_map(|&i| nodes.iter().map(move |&j| (i, j))).filter(|&(i, j)| i != j && is_rule(p, j)).collect();
    assert!(vars.len() <= 16);
    let mut best: Option<f64> = None;
    for mask in 0u32..(1u32 << vars.len()) {
        let on: Vec<(usize, usize)> = vars.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, v)| *v).collect();
        if connectivity && !connected(&nodes, &on) {
            continue;
        }
        let v: f64 = vars
            .iter()
            .map(|d| if on.contains(d) { p.edge_prob[d.0][d.1] } else { 1.0 - p.edge_prob[d.0][d.1] })
            .sum();
        best = Some(best.map_or(v, |b: f64| b.max(v)));
    }
    best
}
