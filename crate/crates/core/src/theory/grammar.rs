//! The fixed synthetic grammar used to render and parse sentences.
//!
//! ```text
//! fact      := subj "is" ["not"] ATTR "."
//!            | subj VERB+s obj "."            | subj "does not" VERB obj "."
//! rule      := "If" cond {"and" (cond | ["not"] ATTR)} "then" clause "."
//! subj/obj  := Name | "the" noun | someone | something | they | them | it
//! ```
//!
//! In rules the variable is rendered "someone" on first mention and
//! "they"/"them" afterwards. Consecutive attribute conditions on the same
//! subject are folded: "someone is blue and rough".

use std::collections::BTreeSet;

use super::{Fact, Literal, Question, Rule, Term, Theory};

const RESERVED: &[&str] = &[
    "if", "then", "and", "not", "is", "are", "does", "do", "the", "someone", "something", "they",
    "them", "it",
];

/// Token pools a theory may draw from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub entities: BTreeSet<String>,
    pub attributes: BTreeSet<String>,
    pub relations: BTreeSet<String>,
}

impl Vocabulary {
    pub fn new<'a>(
        entities: impl IntoIterator<Item = &'a str>,
        attributes: impl IntoIterator<Item = &'a str>,
        relations: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        let own = |it: &mut dyn Iterator<Item = &'a str>| it.map(str::to_owned).collect();
        Vocabulary {
            entities: own(&mut entities.into_iter()),
            attributes: own(&mut attributes.into_iter()),
            relations: own(&mut relations.into_iter()),
        }
    }

    /// Tokens actually used by a theory's structured literals.
    pub fn from_theory(t: &Theory) -> Self {
        let mut v = Vocabulary::default();
        let mut add = |l: &Literal| {
            v.entities.extend(l.constants().map(str::to_owned));
            if l.is_relation() {
                v.relations.insert(l.predicate.clone());
            } else {
                v.attributes.insert(l.predicate.clone());
            }
        };
        t.facts.iter().for_each(|f| add(&f.literal));
        for r in &t.rules {
            r.antecedents.iter().for_each(&mut add);
            add(&r.consequent);
        }
        t.questions.iter().for_each(|q| add(&q.literal));
        v
    }

    pub fn merge(&mut self, other: &Vocabulary) {
        self.entities.extend(other.entities.iter().cloned());
        self.attributes.extend(other.attributes.iter().cloned());
        self.relations.extend(other.relations.iter().cloned());
    }

    /// Tokens that collide with grammar keywords or cannot be rendered.
    pub fn invalid_tokens(&self) -> Vec<String> {
        let bad_word = |w: &str| {
            w.is_empty()
                || RESERVED.contains(&w)
                || !w.chars().all(|c| c.is_ascii_lowercase() || c == '-')
        };
        let mut out: Vec<String> = self
            .attributes
            .iter()
            .chain(&self.relations)
            .filter(|w| bad_word(w))
            .cloned()
            .collect();
        for e in &self.entities {
            let word = e.strip_prefix("the ").unwrap_or(e);
            if bad_word(word) {
                out.push(e.clone());
            }
        }
        out
    }
}

/// Error from parsing one sentence. `column` is a 0-based byte offset into the
/// sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceError {
    pub column: usize,
    pub message: String,
    pub vocabulary: bool,
}

impl SentenceError {
    fn syntax(column: usize, message: impl Into<String>) -> Self {
        SentenceError { column, message: message.into(), vocabulary: false }
    }

    fn vocab(column: usize, message: impl Into<String>) -> Self {
        SentenceError { column, message: message.into(), vocabulary: true }
    }
}

/// Anything with a rendered sentence form.
pub trait Renderable {
    fn render(&self) -> String;
}

impl Renderable for Fact {
    fn render(&self) -> String {
        render_literal_sentence(&self.literal)
    }
}

impl Renderable for Question {
    fn render(&self) -> String {
        render_literal_sentence(&self.literal)
    }
}

impl Renderable for Rule {
    fn render(&self) -> String {
        render_rule_sentence(&self.antecedents, &self.consequent)
    }
}

pub fn render_sentence<T: Renderable + ?Sized>(item: &T) -> String {
    item.render()
}

/// Third-person singular of a base verb: "like" -> "likes", "kiss" -> "kisses".
pub fn third_person(base: &str) -> String {
    // Stems ending in a single "s" (other than "ss") do not invert cleanly
    // without a vocabulary; none of the built-in verbs have one.
    if ["s", "sh", "ch", "x", "z", "o"].iter().any(|e| base.ends_with(e)) {
        format!("{base}es")
    } else {
        format!("{base}s")
    }
}

/// Inverse of [`third_person`] for the verbs the grammar produces.
fn base_form(word: &str) -> Option<String> {
    for suffix in ["sses", "shes", "ches", "xes", "zes", "oes"] {
        if word.ends_with(suffix) {
            return Some(word[..word.len() - 2].to_owned());
        }
    }
    word.strip_suffix('s').filter(|b| !b.is_empty()).map(str::to_owned)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(first) => first.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn entity_phrase(name: &str) -> String {
    if name.starts_with("the ") {
        name.to_owned()
    } else {
        capitalize(name)
    }
}

#[derive(Default)]
struct VarState {
    mentioned: bool,
}

impl VarState {
    /// Returns the phrase and whether it takes plural agreement.
    fn subject(&mut self, t: &Term) -> (String, bool) {
        match t {
            Term::Const(c) => (entity_phrase(c), false),
            Term::Var if self.mentioned => ("they".into(), true),
            Term::Var => {
                self.mentioned = true;
                ("someone".into(), false)
            }
        }
    }

    fn object(&mut self, t: &Term) -> String {
        match t {
            Term::Const(c) => entity_phrase(c),
            Term::Var if self.mentioned => "them".into(),
            Term::Var => {
                self.mentioned = true;
                "someone".into()
            }
        }
    }
}

fn attribute_word(l: &Literal) -> String {
    if l.polarity {
        l.predicate.clone()
    } else {
        format!("not {}", l.predicate)
    }
}

fn render_clause(l: &Literal, vars: &mut VarState) -> String {
    let (subj, plural) = vars.subject(&l.subject);
    match &l.object {
        None => {
            let verb = if plural { "are" } else { "is" };
            format!("{subj} {verb} {}", attribute_word(l))
        }
        Some(obj) => {
            let obj = vars.object(obj);
            match (l.polarity, plural) {
                (true, false) => format!("{subj} {} {obj}", third_person(&l.predicate)),
                (true, true) => format!("{subj} {} {obj}", l.predicate),
                (false, false) => format!("{subj} does not {} {obj}", l.predicate),
                (false, true) => format!("{subj} do not {} {obj}", l.predicate),
            }
        }
    }
}

/// "Alan is blue." / "The dog does not chase Bob."
pub fn render_literal_sentence(l: &Literal) -> String {
    let mut vars = VarState::default();
    format!("{}.", capitalize(&render_clause(l, &mut vars)))
}

/// "If someone is blue and rough then they are young."
pub fn render_rule_sentence(antecedents: &[Literal], consequent: &Literal) -> String {
    let mut vars = VarState::default();
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < antecedents.len() {
        let head = &antecedents[i];
        let mut clause = render_clause(head, &mut vars);
        i += 1;
        if !head.is_relation() {
            while i < antecedents.len()
                && !antecedents[i].is_relation()
                && antecedents[i].subject == head.subject
            {
                clause.push_str(" and ");
                clause.push_str(&attribute_word(&antecedents[i]));
                i += 1;
            }
        }
        parts.push(clause);
    }
    let cons = render_clause(consequent, &mut vars);
    format!("If {} then {}.", parts.join(" and "), cons)
}

type Word<'a> = (usize, &'a str);

fn words(text: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &text[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out
}

fn strip_period(text: &str) -> Result<Vec<Word<'_>>, SentenceError> {
    let trimmed = text.trim_end();
    let Some(body) = trimmed.strip_suffix('.') else {
        return Err(SentenceError::syntax(trimmed.len(), "sentence must end with '.'"));
    };
    let ws = words(body);
    if ws.is_empty() {
        return Err(SentenceError::syntax(0, "empty sentence"));
    }
    Ok(ws)
}

struct Parser<'v> {
    vocab: Option<&'v Vocabulary>,
    allow_var: bool,
}

enum Subject {
    Term(Term),
    Plural,
}

impl Parser<'_> {
    fn entity(&self, col: usize, name: String) -> Result<Term, SentenceError> {
        if let Some(v) = self.vocab {
            if !v.entities.contains(&name) {
                return Err(SentenceError::vocab(col, format!("unknown entity {name:?}")));
            }
        }
        Ok(Term::Const(name))
    }

    fn var(&self, col: usize) -> Result<Term, SentenceError> {
        if self.allow_var {
            Ok(Term::Var)
        } else {
            Err(SentenceError::syntax(col, "variable outside a rule"))
        }
    }

    /// Parses a noun phrase at the front of `ws`; returns the term, whether
    /// it is the plural pronoun, and the number of words consumed.
    fn phrase(&self, ws: &[Word<'_>], object: bool) -> Result<(Subject, usize), SentenceError> {
        let Some(&(col, w)) = ws.first() else {
            return Err(SentenceError::syntax(0, "missing noun phrase"));
        };
        let lower = w.to_lowercase();
        match lower.as_str() {
            "someone" | "something" | "it" => Ok((Subject::Term(self.var(col)?), 1)),
            "they" if !object => {
                self.var(col)?;
                Ok((Subject::Plural, 1))
            }
            "them" if object => Ok((Subject::Term(self.var(col)?), 1)),
            "the" => {
                let Some(&(c2, noun)) = ws.get(1) else {
                    return Err(SentenceError::syntax(col, "expected a noun after 'the'"));
                };
                check_word(c2, noun)?;
                Ok((Subject::Term(self.entity(col, format!("the {}", noun.to_lowercase()))?), 2))
            }
            _ => {
                check_word(col, w)?;
                if RESERVED.contains(&lower.as_str()) {
                    return Err(SentenceError::syntax(col, format!("unexpected {w:?}")));
                }
                Ok((Subject::Term(self.entity(col, lower)?), 1))
            }
        }
    }

    fn attribute(&self, col: usize, w: &str) -> Result<String, SentenceError> {
        check_word(col, w)?;
        let a = w.to_lowercase();
        if RESERVED.contains(&a.as_str()) {
            return Err(SentenceError::syntax(col, format!("unexpected {w:?}")));
        }
        if let Some(v) = self.vocab {
            if !v.attributes.contains(&a) {
                return Err(SentenceError::vocab(col, format!("unknown attribute {a:?}")));
            }
        }
        Ok(a)
    }

    fn relation(&self, col: usize, w: &str, inflected: bool) -> Result<String, SentenceError> {
        check_word(col, w)?;
        let lower = w.to_lowercase();
        let base = match self.vocab {
            Some(v) if inflected => v
                .relations
                .iter()
                .find(|r| third_person(r) == lower)
                .cloned()
                .ok_or_else(|| SentenceError::vocab(col, format!("unknown relation {w:?}")))?,
            Some(v) => {
                if !v.relations.contains(&lower) {
                    return Err(SentenceError::vocab(col, format!("unknown relation {w:?}")));
                }
                lower
            }
            None if inflected => base_form(&lower)
                .ok_or_else(|| SentenceError::syntax(col, format!("cannot read verb {w:?}")))?,
            None => lower,
        };
        if RESERVED.contains(&base.as_str()) {
            return Err(SentenceError::syntax(col, format!("unexpected {w:?}")));
        }
        Ok(base)
    }

    fn clause(&self, ws: &[Word<'_>]) -> Result<Literal, SentenceError> {
        let (subj, used) = self.phrase(ws, false)?;
        let plural = matches!(subj, Subject::Plural);
        let subject = match subj {
            Subject::Term(t) => t,
            Subject::Plural => Term::Var,
        };
        let rest = &ws[used..];
        let Some(&(col, verb)) = rest.first() else {
            return Err(SentenceError::syntax(ws[0].0, "missing verb"));
        };
        let verb_lower = verb.to_lowercase();
        match verb_lower.as_str() {
            "is" | "are" => {
                let (polarity, attr_at) = match rest.get(1) {
                    Some((_, "not")) => (false, 2),
                    _ => (true, 1),
                };
                let Some(&(acol, attr)) = rest.get(attr_at) else {
                    return Err(SentenceError::syntax(col, "missing attribute"));
                };
                if let Some(&(xcol, extra)) = rest.get(attr_at + 1) {
                    return Err(SentenceError::syntax(xcol, format!("unexpected {extra:?}")));
                }
                Ok(Literal::attribute(subject, self.attribute(acol, attr)?, polarity))
            }
            "does" | "do" => {
                match rest.get(1) {
                    Some((_, "not")) => {}
                    Some(&(c, w)) => return Err(SentenceError::syntax(c, format!("expected 'not', found {w:?}"))),
                    None => return Err(SentenceError::syntax(col, "expected 'not'")),
                }
                let Some(&(vcol, v)) = rest.get(2) else {
                    return Err(SentenceError::syntax(col, "missing verb"));
                };
                let predicate = self.relation(vcol, v, false)?;
                let object = self.object(&rest[3..], vcol)?;
                Ok(Literal::relation(subject, predicate, object, false))
            }
            _ => {
                let predicate = self.relation(col, verb, !plural)?;
                let object = self.object(&rest[1..], col)?;
                Ok(Literal::relation(subject, predicate, object, true))
            }
        }
    }

    fn object(&self, ws: &[Word<'_>], after: usize) -> Result<Term, SentenceError> {
        if ws.is_empty() {
            return Err(SentenceError::syntax(after, "missing object"));
        }
        let (obj, used) = self.phrase(ws, true)?;
        if let Some(&(c, w)) = ws.get(used) {
            return Err(SentenceError::syntax(c, format!("unexpected {w:?}")));
        }
        match obj {
            Subject::Term(t) => Ok(t),
            Subject::Plural => unreachable!("plural pronoun is never an object"),
        }
    }
}

fn check_word(col: usize, w: &str) -> Result<(), SentenceError> {
    if w.chars().all(|c| c.is_alphabetic() || c == '-') {
        Ok(())
    } else {
        Err(SentenceError::syntax(col, format!("invalid token {w:?}")))
    }
}

/// Parses a ground statement such as "Alan is not kind.".
pub fn parse_fact_sentence(text: &str, vocab: Option<&Vocabulary>) -> Result<Literal, SentenceError> {
    let ws = strip_period(text)?;
    if ws[0].1.eq_ignore_ascii_case("if") {
        return Err(SentenceError::syntax(ws[0].0, "expected a statement, found a rule"));
    }
    Parser { vocab, allow_var: false }.clause(&ws)
}

/// Parses "If <conditions> then <clause>." into antecedents and consequent.
pub fn parse_rule_sentence(
    text: &str,
    vocab: Option<&Vocabulary>,
) -> Result<(Vec<Literal>, Literal), SentenceError> {
    let ws = strip_period(text)?;
    if !ws[0].1.eq_ignore_ascii_case("if") {
        return Err(SentenceError::syntax(ws[0].0, "rule must start with 'If'"));
    }
    let parser = Parser { vocab, allow_var: true };
    let Some(then_at) = ws.iter().position(|(_, w)| *w == "then") else {
        return Err(SentenceError::syntax(text.trim_end().len(), "missing 'then'"));
    };
    let conds = &ws[1..then_at];
    if conds.is_empty() {
        return Err(SentenceError::syntax(ws[0].0, "missing condition"));
    }
    let mut antecedents: Vec<Literal> = Vec::new();
    for chunk in conds.split(|(_, w)| *w == "and") {
        let Some(&(col, first)) = chunk.first() else {
            return Err(SentenceError::syntax(ws[0].0, "empty condition"));
        };
        let continuation = chunk.len() == 1 || (chunk.len() == 2 && first == "not");
        if continuation {
            let Some(prev) = antecedents.last().filter(|l| !l.is_relation()) else {
                return Err(SentenceError::syntax(col, "bare attribute without a subject"));
            };
            let subject = prev.subject.clone();
            let (acol, attr) = *chunk.last().expect("non-empty");
            let polarity = chunk.len() == 1;
            antecedents.push(Literal::attribute(subject, parser.attribute(acol, attr)?, polarity));
        } else {
            antecedents.push(parser.clause(chunk)?);
        }
    }
    let cons_words = &ws[then_at + 1..];
    if cons_words.is_empty() {
        return Err(SentenceError::syntax(ws[then_at].0, "missing conclusion"));
    }
    let consequent = parser.clause(cons_words)?;
    Ok((antecedents, consequent))
}

/// A parsed sentence of either shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sentence {
    Statement(Literal),
    Rule(Vec<Literal>, Literal),
}

pub fn parse_sentence(text: &str, vocab: Option<&Vocabulary>) -> Result<Sentence, SentenceError> {
    let starts_with_if = words(text).first().is_some_and(|(_, w)| w.eq_ignore_ascii_case("if"));
    if starts_with_if {
        parse_rule_sentence(text, vocab).map(|(a, c)| Sentence::Rule(a, c))
    } else {
        parse_fact_sentence(text, vocab).map(Sentence::Statement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Term {
        Term::constant(s)
    }

    fn attr(t: Term, p: &str, pol: bool) -> Literal {
        Literal::attribute(t, p, pol)
    }

    #[test]
    fn renders_fact_sentences() {
        assert_eq!(render_literal_sentence(&attr(c("alan"), "blue", true)), "Alan is blue.");
        assert_eq!(render_literal_sentence(&attr(c("alan"), "kind", false)), "Alan is not kind.");
        let rel = Literal::relation(c("the dog"), "chase", c("bob"), true);
        assert_eq!(render_literal_sentence(&rel), "The dog chases Bob.");
        assert_eq!(render_literal_sentence(&rel.negated()), "The dog does not chase Bob.");
    }

    #[test]
    fn renders_rules() {
        let r1 = render_rule_sentence(&[attr(Term::Var, "blue", true)], &attr(Term::Var, "young", true));
        assert_eq!(r1, "If someone is blue then they are young.");
        let r2 = render_rule_sentence(
            &[attr(Term::Var, "blue", true), attr(Term::Var, "rough", true)],
            &attr(Term::Var, "young", true),
        );
        assert_eq!(r2, "If someone is blue and rough then they are young.");
        let r3 = render_rule_sentence(
            &[
                Literal::relation(c("the cat"), "visit", Term::Var, true),
                attr(Term::Var, "big", false),
            ],
            &Literal::relation(Term::Var, "chase", c("the cat"), true),
        );
        assert_eq!(r3, "If the cat visits someone and they are not big then they chase the cat.");
    }

    #[test]
    fn parses_grammar_examples() {
        assert_eq!(parse_fact_sentence("Alan is blue.", None).unwrap(), attr(c("alan"), "blue", true));
        let (a, cons) = parse_rule_sentence("If someone is blue then they are young.", None).unwrap();
        assert_eq!(a, vec![attr(Term::Var, "blue", true)]);
        assert_eq!(cons, attr(Term::Var, "young", true));
        let (a, _) = parse_rule_sentence("If something is blue and not rough then it is young.", None).unwrap();
        assert_eq!(a, vec![attr(Term::Var, "blue", true), attr(Term::Var, "rough", false)]);
    }

    #[test]
    fn verb_inflection_round_trips() {
        for v in ["like", "chase", "kiss", "watch", "go", "see", "need", "fix", "push"] {
            assert_eq!(base_form(&third_person(v)).as_deref(), Some(v), "{v}");
        }
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let e = parse_fact_sentence("Alan is blue", None).unwrap_err();
        assert_eq!(e.column, 12);
        let e = parse_fact_sentence("Alan is blue green.", None).unwrap_err();
        assert_eq!(e.column, 13);
        assert!(!e.vocabulary);
        let e = parse_fact_sentence("Someone is blue.", None).unwrap_err();
        assert_eq!(e.column, 0);
        assert!(parse_rule_sentence("If and then Alan is big.", None).is_err());
        assert!(parse_rule_sentence("If Alan is big.", None).is_err());
    }

    #[test]
    fn vocabulary_violations() {
        let v = Vocabulary::new(["alan"], ["blue"], ["like"]);
        let e = parse_fact_sentence("Alan is red.", Some(&v)).unwrap_err();
        assert!(e.vocabulary);
        assert_eq!(e.column, 8);
        let e = parse_fact_sentence("Bob is blue.", Some(&v)).unwrap_err();
        assert!(e.vocabulary);
        assert!(parse_fact_sentence("Alan likes Alan.", Some(&v)).is_ok());
        assert!(parse_fact_sentence("Alan eats Alan.", Some(&v)).unwrap_err().vocabulary);
    }

    #[test]
    fn reserved_tokens_flagged() {
        let v = Vocabulary::new(["the dog", "then"], ["Blue"], ["like"]);
        assert_eq!(v.invalid_tokens(), vec!["Blue".to_string(), "then".to_string()]);
    }
}
