//! Leave-one-out critical sentences for a question with two proofs.
use ruleproof::reasoner::{critical_sentences, prove};
use ruleproof::theory::{parse_theory, Format};

const THEORY: &str = "\
theory T
  F1: Anne is red.
  F2: Anne is kind.
  R1: If someone is red then they are big.
  R2: If someone is kind then they are big.
  R3: If someone is big then they are nice.
  Q1: Anne is nice.
";

fn main() {
    let t = parse_theory(THEORY.as_bytes(), Format::SentenceText, None).unwrap();
    let q = &t.questions[0];
    for p in prove(&t, q, 10).unwrap() {
        println!("proof: {:?}", p.nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>());
    }
    let crit: Vec<String> = critical_sentences(&t, q).unwrap().iter().map(|s| s.to_string()).collect();
    println!("critical: {crit:?}");
}
