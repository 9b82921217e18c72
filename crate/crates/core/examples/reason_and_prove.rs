//! Parses a theory written as sentences, then answers and proves each question.
use ruleproof::reasoner::{answer_question, proof_depth, prove, DEFAULT_MAX_PROOFS};
use ruleproof::theory::{parse_theory, Format};

const THEORY: &str = "\
theory birds
  F1: Tweety is feathered.
  F2: Polly is feathered.
  F3: Polly is wounded.
  F4: Tweety likes Polly.
  R1: If someone is feathered and not wounded then they are airborne.
  R2: If someone is airborne then they are happy.
  R3: If someone likes Polly and Polly is wounded then they are worried.
  Q1: Tweety is happy.
  Q2: Polly is airborne.
  Q3: Polly is not happy.
  Q4: Tweety is worried.
";

fn main() {
    let t = parse_theory(THEORY.as_bytes(), Format::SentenceText, None).expect("bad theory");
    for q in &t.questions {
        let answer = answer_question(&t, q).unwrap();
        println!("{}: {} -> {answer}", q.id, q.text);
        for p in prove(&t, q, DEFAULT_MAX_PROOFS).unwrap() {
            let edges: Vec<String> = p.edges.iter().map(|(a, b)| format!("{a}->{b}")).collect();
            println!("    nodes {:?} edges [{}] depth {}", p.nodes.iter().map(|n| n.to_string()).collect::<Vec<_>>(), edges.join(", "), proof_depth(&p));
        }
    }
}
