//! Prints a gold proof as Graphviz DOT with sentence labels.
use ruleproof::datagen::VocabularyProfile;
use ruleproof::reasoner::prove;
use ruleproof::theory::{parse_theory, Format};

const THEORY: &str = "\
theory T
  F1: The switch is closed.
  F2: The wire is conductive.
  F3: The battery feeds the wire.
  R1: If the switch is closed and the wire is conductive then the bulb is powered.
  R2: If someone is powered and not broken then they are bright.
  Q1: The bulb is bright.
";

fn main() {
    let vocab = VocabularyProfile::named("circuits").unwrap().vocabulary();
    let t = parse_theory(THEORY.as_bytes(), Format::SentenceText, Some(&vocab)).unwrap();
    let q = &t.questions[0];
    let p = &prove(&t, q, 1).unwrap()[0];
    print!("{}", p.to_dot(&format!("{}_{}", t.id, q.id), Some(&t)));
}
