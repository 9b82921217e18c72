//! Rule-base data model: literals, facts, rules, questions and theories.
//!
//! A theory is a small closed-world context of at most [`MAX_CONTEXT`] facts and
//! rules. Every fact, rule and question carries both a structured literal form
//! and a rendered sentence produced by the fixed grammar in [`grammar`].

pub mod grammar;
pub mod io;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::proofgraph::{ProofGraph, ProofNode};

pub use grammar::{render_sentence, Renderable, Vocabulary};
pub use io::{parse_theories, parse_theory, write_theories, Format};

/// Largest number of facts plus rules allowed in one context.
pub const MAX_CONTEXT: usize = 25;

/// Subject or object position of a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(String),
    /// The single implicitly universally quantified variable of a rule.
    Var,
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var)
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(s) => Some(s),
            Term::Var => None,
        }
    }

    fn bind(&self, binding: Option<&str>) -> Option<String> {
        match self {
            Term::Const(s) => Some(s.clone()),
            Term::Var => binding.map(str::to_owned),
        }
    }
}

const VAR_TOKEN: &str = "?x";

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Term::Const(c) => s.serialize_str(c),
            Term::Var => s.serialize_str(VAR_TOKEN),
        }
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == VAR_TOKEN {
            Ok(Term::Var)
        } else if s.is_empty() {
            Err(D::Error::custom("empty entity token"))
        } else {
            Ok(Term::Const(s))
        }
    }
}

/// `subject predicate [object]`, possibly negated. Attributes have no object;
/// binary relations always have one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub subject: Term,
    pub predicate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<Term>,
    pub polarity: bool,
}

impl Literal {
    pub fn attribute(subject: Term, predicate: impl Into<String>, polarity: bool) -> Self {
        Literal { subject, predicate: predicate.into(), object: None, polarity }
    }

    pub fn relation(subject: Term, predicate: impl Into<String>, object: Term, polarity: bool) -> Self {
        Literal { subject, predicate: predicate.into(), object: Some(object), polarity }
    }

    pub fn is_relation(&self) -> bool {
        self.object.is_some()
    }

    pub fn has_var(&self) -> bool {
        self.subject.is_var() || self.object.as_ref().is_some_and(Term::is_var)
    }

    pub fn is_ground(&self) -> bool {
        !self.has_var()
    }

    pub fn negated(&self) -> Self {
        Literal { polarity: !self.polarity, ..self.clone() }
    }

    /// The positive atom of this literal under `binding`; `None` if a variable
    /// remains unbound.
    pub fn ground_atom(&self, binding: Option<&str>) -> Option<Atom> {
        Some(Atom {
            subject: self.subject.bind(binding)?,
            predicate: self.predicate.clone(),
            object: match &self.object {
                Some(o) => Some(o.bind(binding)?),
                None => None,
            },
        })
    }

    /// Constants mentioned by this literal.
    pub fn constants(&self) -> impl Iterator<Item = &str> {
        self.subject.as_const().into_iter().chain(self.object.as_ref().and_then(Term::as_const))
    }
}

/// A ground positive statement; the unit of the reasoner's closure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub subject: String,
    pub predicate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object: Option<String>,
}

impl Atom {
    pub fn literal(&self, polarity: bool) -> Literal {
        Literal {
            subject: Term::Const(self.subject.clone()),
            predicate: self.predicate.clone(),
            object: self.object.clone().map(Term::Const),
            polarity,
        }
    }

    /// Predicate key including arity, so an attribute and a relation sharing a
    /// token stay distinct.
    pub fn predicate_key(&self) -> (String, bool) {
        (self.predicate.clone(), self.object.is_some())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.object {
            Some(o) => write!(f, "{}({}, {})", self.predicate, self.subject, o),
            None => write!(f, "{}({})", self.predicate, self.subject),
        }
    }
}

/// Identifier of a fact or rule, 1-based as in `F3` / `R2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SentenceId {
    Fact(usize),
    Rule(usize),
}

impl SentenceId {
    pub fn parse(s: &str) -> Option<Self> {
        let (kind, num) = s.split_at(s.char_indices().nth(1).map(|(i, _)| i)?);
        let n: usize = num.parse().ok().filter(|n| *n >= 1)?;
        if num.starts_with('0') {
            return None;
        }
        match kind {
            "F" => Some(SentenceId::Fact(n)),
            "R" => Some(SentenceId::Rule(n)),
            _ => None,
        }
    }

    pub fn node(self) -> ProofNode {
        match self {
            SentenceId::Fact(i) => ProofNode::Fact(i),
            SentenceId::Rule(i) => ProofNode::Rule(i),
        }
    }
}

impl fmt::Display for SentenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SentenceId::Fact(i) => write!(f, "F{i}"),
            SentenceId::Rule(i) => write!(f, "R{i}"),
        }
    }
}

impl Serialize for SentenceId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SentenceId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        SentenceId::parse(&s).ok_or_else(|| D::Error::custom(format!("bad sentence id {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub id: SentenceId,
    pub text: String,
    pub literal: Literal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub id: SentenceId,
    pub text: String,
    pub antecedents: Vec<Literal>,
    pub consequent: Literal,
}

impl Rule {
    pub fn has_var(&self) -> bool {
        self.consequent.has_var() || self.antecedents.iter().any(Literal::has_var)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub text: String,
    pub literal: Literal,
    #[serde(default)]
    pub answer: Option<bool>,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(default)]
    pub proofs: Option<Vec<ProofGraph>>,
}

impl Question {
    /// An unannotated question whose text is rendered from `literal`.
    pub fn new(id: impl Into<String>, literal: Literal) -> Self {
        let text = grammar::render_literal_sentence(&literal);
        Question { id: id.into(), text, literal, answer: None, depth: None, proofs: None }
    }
}

/// Positions of facts, rules and the NAF node in node-indexed vectors and
/// matrices: facts first, then rules, NAF last.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeLayout {
    pub num_facts: usize,
    pub num_rules: usize,
}

/// Kind of the node at a layout position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Fact,
    Rule,
    Naf,
}

impl NodeLayout {
    pub fn new(num_facts: usize, num_rules: usize) -> Self {
        NodeLayout { num_facts, num_rules }
    }

    /// k + 1: every sentence plus NAF.
    pub fn size(&self) -> usize {
        self.num_facts + self.num_rules + 1
    }

    pub fn naf_index(&self) -> usize {
        self.num_facts + self.num_rules
    }

    pub fn kind(&self, index: usize) -> NodeKind {
        if index < self.num_facts {
            NodeKind::Fact
        } else if index < self.naf_index() {
            NodeKind::Rule
        } else {
            NodeKind::Naf
        }
    }

    pub fn node(&self, index: usize) -> ProofNode {
        match self.kind(index) {
            NodeKind::Fact => ProofNode::Fact(index + 1),
            NodeKind::Rule => ProofNode::Rule(index - self.num_facts + 1),
            NodeKind::Naf => ProofNode::Naf,
        }
    }

    /// Layout position of `node`, or `None` if it is out of range.
    pub fn index(&self, node: ProofNode) -> Option<usize> {
        match node {
            ProofNode::Fact(i) if i >= 1 && i <= self.num_facts => Some(i - 1),
            ProofNode::Rule(i) if i >= 1 && i <= self.num_rules => Some(self.num_facts + i - 1),
            ProofNode::Naf => Some(self.naf_index()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theory {
    pub id: String,
    pub facts: Vec<Fact>,
    pub rules: Vec<Rule>,
    pub questions: Vec<Question>,
}

/// A broken theory invariant, naming the offending item.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("context has {0} facts and rules, more than {MAX_CONTEXT}")]
    ContextSize(usize),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("{0}: ids must be contiguous from 1")]
    NonContiguousId(String),
    #[error("{0}: literal duplicates an earlier fact")]
    DuplicateFact(String),
    #[error("{0}: rule duplicates an earlier rule")]
    DuplicateRule(String),
    #[error("{0}: facts and questions must be ground")]
    NotGround(String),
    #[error("{0}: rule has no antecedents")]
    EmptyRule(String),
    #[error("{0}: rule consequent must be positive")]
    NegativeConsequent(String),
    #[error("{0}: variable occurs in an antecedent but not in the consequent")]
    UnsafeVariable(String),
    #[error("{0}: empty token")]
    EmptyToken(String),
    #[error("{0}: text does not parse back to the literal ({1})")]
    TextMismatch(String, String),
}

impl Theory {
    /// Builds a theory from structured literals, numbering facts and rules in
    /// order and rendering every sentence.
    pub fn from_parts(
        id: impl Into<String>,
        facts: Vec<Literal>,
        rules: Vec<(Vec<Literal>, Literal)>,
        questions: Vec<Literal>,
    ) -> Self {
        let facts = facts
            .into_iter()
            .enumerate()
            .map(|(i, literal)| Fact {
                id: SentenceId::Fact(i + 1),
                text: grammar::render_literal_sentence(&literal),
                literal,
            })
            .collect();
        let rules = rules
            .into_iter()
            .enumerate()
            .map(|(i, (antecedents, consequent))| {
                let text = grammar::render_rule_sentence(&antecedents, &consequent);
                Rule { id: SentenceId::Rule(i + 1), text, antecedents, consequent }
            })
            .collect();
        let questions = questions
            .into_iter()
            .enumerate()
            .map(|(i, lit)| Question::new(format!("Q{}", i + 1), lit))
            .collect();
        Theory { id: id.into(), facts, rules, questions }
    }

    pub fn layout(&self) -> NodeLayout {
        NodeLayout::new(self.facts.len(), self.rules.len())
    }

    pub fn context_size(&self) -> usize {
        self.facts.len() + self.rules.len()
    }

    pub fn fact(&self, index: usize) -> Option<&Fact> {
        index.checked_sub(1).and_then(|i| self.facts.get(i))
    }

    pub fn rule(&self, index: usize) -> Option<&Rule> {
        index.checked_sub(1).and_then(|i| self.rules.get(i))
    }

    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }

    /// Sentence text for a proof node; `NAF` for the NAF node.
    pub fn node_text(&self, node: ProofNode) -> Option<&str> {
        match node {
            ProofNode::Fact(i) => self.fact(i).map(|f| f.text.as_str()),
            ProofNode::Rule(i) => self.rule(i).map(|r| r.text.as_str()),
            ProofNode::Naf => Some("NAF"),
        }
    }

    pub fn contains_node(&self, node: ProofNode) -> bool {
        self.node_text(node).is_some()
    }

    /// Every constant mentioned by a fact, rule or question.
    pub fn entities(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut add = |l: &Literal| out.extend(l.constants().map(str::to_owned));
        self.facts.iter().for_each(|f| add(&f.literal));
        for r in &self.rules {
            r.antecedents.iter().for_each(&mut add);
            add(&r.consequent);
        }
        self.questions.iter().for_each(|q| add(&q.literal));
        out
    }

    /// A copy without the given sentence. Ids are left as they are, so the
    /// result is only meant for reasoning, not for export.
    pub fn without(&self, id: SentenceId) -> Theory {
        let mut t = self.clone();
        match id {
            SentenceId::Fact(_) => t.facts.retain(|f| f.id != id),
            SentenceId::Rule(_) => t.rules.retain(|r| r.id != id),
        }
        t
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_theory(self)
    }
}

/// Checks every theory invariant. An empty result means the theory is valid.
pub fn validate_theory(t: &Theory) -> Vec<Violation> {
    let mut out = Vec::new();
    if t.context_size() > MAX_CONTEXT {
        out.push(Violation::ContextSize(t.context_size()));
    }

    let mut seen = HashSet::new();
    let ids = t
        .facts
        .iter()
        .map(|f| f.id.to_string())
        .chain(t.rules.iter().map(|r| r.id.to_string()))
        .chain(t.questions.iter().map(|q| q.id.clone()));
    for id in ids {
        if !seen.insert(id.clone()) {
            out.push(Violation::DuplicateId(id));
        }
    }
    for (i, f) in t.facts.iter().enumerate() {
        if f.id != SentenceId::Fact(i + 1) && !out.contains(&Violation::DuplicateId(f.id.to_string())) {
            out.push(Violation::NonContiguousId(f.id.to_string()));
        }
    }
    for (i, r) in t.rules.iter().enumerate() {
        if r.id != SentenceId::Rule(i + 1) && !out.contains(&Violation::DuplicateId(r.id.to_string())) {
            out.push(Violation::NonContiguousId(r.id.to_string()));
        }
    }

    let vocab = Vocabulary::from_theory(t);
    let check_tokens = |name: &str, l: &Literal, out: &mut Vec<Violation>| {
        let empty_const = l.constants().any(str::is_empty);
        if l.predicate.trim().is_empty() || empty_const {
            out.push(Violation::EmptyToken(name.to_owned()));
        }
    };

    let mut fact_literals = HashSet::new();
    for f in &t.facts {
        let name = f.id.to_string();
        check_tokens(&name, &f.literal, &mut out);
        if !f.literal.is_ground() {
            out.push(Violation::NotGround(name.clone()));
        }
        if !fact_literals.insert(&f.literal) {
            out.push(Violation::DuplicateFact(name.clone()));
        }
        check_text(&name, &f.text, grammar::parse_fact_sentence(&f.text, Some(&vocab)), &f.literal, &mut out);
    }

    let mut rule_bodies = HashSet::new();
    for r in &t.rules {
        let name = r.id.to_string();
        r.antecedents.iter().for_each(|l| check_tokens(&name, l, &mut out));
        check_tokens(&name, &r.consequent, &mut out);
        if r.antecedents.is_empty() {
            out.push(Violation::EmptyRule(name.clone()));
        }
        if !r.consequent.polarity {
            out.push(Violation::NegativeConsequent(name.clone()));
        }
        if r.antecedents.iter().any(Literal::has_var) && !r.consequent.has_var() {
            out.push(Violation::UnsafeVariable(name.clone()));
        }
        if !rule_bodies.insert((&r.antecedents, &r.consequent)) {
            out.push(Violation::DuplicateRule(name.clone()));
        }
        match grammar::parse_rule_sentence(&r.text, Some(&vocab)) {
            Ok((ants, cons)) if ants == r.antecedents && cons == r.consequent => {}
            Ok(_) => out.push(Violation::TextMismatch(name, "different rule".into())),
            Err(e) => out.push(Violation::TextMismatch(name, e.message)),
        }
    }

    for q in &t.questions {
        check_tokens(&q.id, &q.literal, &mut out);
        if !q.literal.is_ground() {
            out.push(Violation::NotGround(q.id.clone()));
        }
        check_text(&q.id, &q.text, grammar::parse_fact_sentence(&q.text, Some(&vocab)), &q.literal, &mut out);
    }
    out
}

fn check_text(
    name: &str,
    _text: &str,
    parsed: Result<Literal, grammar::SentenceError>,
    expected: &Literal,
    out: &mut Vec<Violation>,
) {
    match parsed {
        Ok(l) if &l == expected => {}
        Ok(l) => out.push(Violation::TextMismatch(name.to_owned(), format!("parsed {l:?}"))),
        Err(e) => out.push(Violation::TextMismatch(name.to_owned(), e.message)),
    }
}
