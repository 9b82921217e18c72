//! Reading and writing theories.
//!
//! Two formats are supported:
//!
//! * `structured-json` (`.theories.jsonl`): one JSON record per line.
//! * `sentence-text`: a block per theory,
//!
//! ```text
//! theory T1
//! F1: Alan is blue.
//! R1: If someone is blue then they are young.
//! Q1: Alan is young. => true
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::io::{BufRead, Write};

use super::grammar::{self, Sentence, SentenceError, Vocabulary};
use super::{validate_theory, Fact, Question, Rule, SentenceId, Theory, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    StructuredJson,
    SentenceText,
}

#[derive(Debug, thiserror::Error)]
pub enum TheoryError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: vocabulary violation: {message}")]
    Vocabulary { line: usize, column: usize, message: String },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: String },
    #[error("theory {theory}: {size} facts and rules exceed the context limit")]
    ContextSize { theory: String, size: usize },
    #[error("theory {theory}: {violation}")]
    Invalid { theory: String, violation: Violation },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl TheoryError {
    fn from_sentence(line: usize, offset: usize, e: SentenceError) -> Self {
        let column = offset + e.column + 1;
        if e.vocabulary {
            TheoryError::Vocabulary { line, column, message: e.message }
        } else {
            TheoryError::Syntax { line, column, message: e.message }
        }
    }
}

/// Parses a stream holding any number of theories.
pub fn parse_theories(
    input: impl BufRead,
    format: Format,
    vocab: Option<&Vocabulary>,
) -> Result<Vec<Theory>, TheoryError> {
    let theories = match format {
        Format::StructuredJson => parse_jsonl(input, vocab)?,
        Format::SentenceText => parse_text(input, vocab)?,
    };
    Ok(theories)
}

/// Parses exactly one theory.
pub fn parse_theory(input: impl BufRead, format: Format, vocab: Option<&Vocabulary>) -> Result<Theory, TheoryError> {
    let mut all = parse_theories(input, format, vocab)?;
    match all.len() {
        1 => Ok(all.pop().expect("one theory")),
        n => Err(TheoryError::Syntax { line: 1, column: 1, message: format!("expected one theory, found {n}") }),
    }
}

fn check(t: &Theory, line: usize) -> Result<(), TheoryError> {
    match validate_theory(t).into_iter().next() {
        None => Ok(()),
        Some(Violation::DuplicateId(id)) => Err(TheoryError::DuplicateId { line, id }),
        Some(Violation::ContextSize(size)) => Err(TheoryError::ContextSize { theory: t.id.clone(), size }),
        Some(violation) => Err(TheoryError::Invalid { theory: t.id.clone(), violation }),
    }
}

fn check_vocab(t: &Theory, vocab: &Vocabulary, line: usize) -> Result<(), TheoryError> {
    let used = Vocabulary::from_theory(t);
    let missing = used
        .entities
        .difference(&vocab.entities)
        .map(|e| format!("unknown entity {e:?}"))
        .chain(used.attributes.difference(&vocab.attributes).map(|a| format!("unknown attribute {a:?}")))
        .chain(used.relations.difference(&vocab.relations).map(|r| format!("unknown relation {r:?}")))
        .next();
    match missing {
        Some(message) => Err(TheoryError::Vocabulary { line, column: 1, message }),
        None => Ok(()),
    }
}

fn parse_jsonl(input: impl BufRead, vocab: Option<&Vocabulary>) -> Result<Vec<Theory>, TheoryError> {
    let mut out = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        let line_no = n + 1;
        if line.trim().is_empty() {
            continue;
        }
        let t: Theory = serde_json::from_str(&line).map_err(|e| TheoryError::Syntax {
            line: line_no,
            column: e.column(),
            message: e.to_string(),
        })?;
        if let Some(v) = vocab {
            check_vocab(&t, v, line_no)?;
        }
        check(&t, line_no)?;
        out.push(t);
    }
    Ok(out)
}

struct Draft {
    theory: Theory,
    line: usize,
}

fn parse_text(input: impl BufRead, vocab: Option<&Vocabulary>) -> Result<Vec<Theory>, TheoryError> {
    let mut out: Vec<Draft> = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let raw = line?;
        let line_no = n + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        if let Some(rest) = trimmed.strip_prefix("theory") {
            let id = rest.trim();
            if id.is_empty() || !rest.starts_with(char::is_whitespace) {
                return Err(TheoryError::Syntax { line: line_no, column: indent + 1, message: "expected 'theory <id>'".into() });
            }
            out.push(Draft { theory: empty_theory(id), line: line_no });
            continue;
        }
        if out.is_empty() {
            out.push(Draft { theory: empty_theory("T1"), line: line_no });
        }
        let draft = out.last_mut().expect("current theory");
        let Some(colon) = trimmed.find(':') else {
            return Err(TheoryError::Syntax { line: line_no, column: indent + 1, message: "expected '<id>: <sentence>'".into() });
        };
        let id = &trimmed[..colon];
        let body = &trimmed[colon + 1..];
        let offset = indent + colon + 1 + (body.len() - body.trim_start().len());
        let body = body.trim();
        let t = &mut draft.theory;
        if t.facts.iter().any(|f| f.id.to_string() == id)
            || t.rules.iter().any(|r| r.id.to_string() == id)
            || t.questions.iter().any(|q| q.id == id)
        {
            return Err(TheoryError::DuplicateId { line: line_no, id: id.to_owned() });
        }
        if id.starts_with('Q') {
            let (sentence, answer) = split_answer(body).map_err(|m| TheoryError::Syntax {
                line: line_no,
                column: offset + 1,
                message: m,
            })?;
            let literal = grammar::parse_fact_sentence(sentence, vocab)
                .map_err(|e| TheoryError::from_sentence(line_no, offset, e))?;
            t.questions.push(Question {
                id: id.to_owned(),
                text: sentence.to_owned(),
                literal,
                answer,
                depth: None,
                proofs: None,
            });
            continue;
        }
        let sid = SentenceId::parse(id).ok_or_else(|| TheoryError::Syntax {
            line: line_no,
            column: indent + 1,
            message: format!("bad id {id:?}"),
        })?;
        let parsed = grammar::parse_sentence(body, vocab).map_err(|e| TheoryError::from_sentence(line_no, offset, e))?;
        match (sid, parsed) {
            (SentenceId::Fact(_), Sentence::Statement(literal)) => {
                t.facts.push(Fact { id: sid, text: body.to_owned(), literal });
            }
            (SentenceId::Rule(_), Sentence::Rule(antecedents, consequent)) => {
                t.rules.push(Rule { id: sid, text: body.to_owned(), antecedents, consequent });
            }
            (SentenceId::Fact(_), Sentence::Rule(..)) => {
                return Err(TheoryError::Syntax { line: line_no, column: offset + 1, message: format!("{id} must be a statement") });
            }
            (SentenceId::Rule(_), Sentence::Statement(_)) => {
                return Err(TheoryError::Syntax { line: line_no, column: offset + 1, message: format!("{id} must be a rule") });
            }
        }
    }
    for d in &out {
        check(&d.theory, d.line)?;
    }
    Ok(out.into_iter().map(|d| d.theory).collect())
}

fn split_answer(body: &str) -> Result<(&str, Option<bool>), String> {
    match body.split_once("=>") {
        None => Ok((body, None)),
        Some((s, a)) => match a.trim() {
            "true" => Ok((s.trim(), Some(true))),
            "false" => Ok((s.trim(), Some(false))),
            other => Err(format!("answer must be true or false, found {other:?}")),
        },
    }
}

fn empty_theory(id: &str) -> Theory {
    Theory { id: id.to_owned(), facts: vec![], rules: vec![], questions: vec![] }
}

/// Writes theories in the given format. JSON output is byte-stable: field
/// order follows the struct definitions.
pub fn write_theories(mut out: impl Write, theories: &[Theory], format: Format) -> std::io::Result<()> {
    for t in theories {
        match format {
            Format::StructuredJson => {
                serde_json::to_writer(&mut out, t)?;
                writeln!(out)?;
            }
            Format::SentenceText => {
                writeln!(out, "theory {}", t.id)?;
                for f in &t.facts {
                    writeln!(out, "{}: {}", f.id, f.text)?;
                }
                for r in &t.rules {
                    writeln!(out, "{}: {}", r.id, r.text)?;
                }
                for q in &t.questions {
                    match q.answer {
                        Some(a) => writeln!(out, "{}: {} => {a}", q.id, q.text)?,
                        None => writeln!(out, "{}: {}", q.id, q.text)?,
                    }
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}
