//! Generates a small depth-up-to-3 corpus and writes it to a temp directory.
use ruleproof::datagen::{generate_dataset, GenConfig};

fn main() {
    let cfg = GenConfig { seed: 7, num_theories: 40, max_depth: 3, ..GenConfig::default() };
    let data = generate_dataset(&cfg).expect("generation failed");

    let dir = std::env::temp_dir().join("ruleproof-du3");
    data.write_to(&dir).expect("write failed");
    println!("wrote {}", dir.display());

    let m = &data.manifest;
    println!("theories: train {} / dev {} / test {}", m.train.theories, m.dev.theories, m.test.theories);
    println!("answers: {} true, {} false", m.answer_balance.true_count, m.answer_balance.false_count);
    for (depth, n) in &m.depth_histogram {
        println!("  depth {depth}: {n} questions");
    }

    let t = &data.train[0];
    println!("\n{} ({} sentences)", t.id, t.context_size());
    for f in &t.facts {
        println!("  {}: {}", f.id, f.text);
    }
    for r in &t.rules {
        println!("  {}: {}", r.id, r.text);
    }
    for q in t.questions.iter().take(3) {
        println!("  {}: {} -> {:?} (depth {:?})", q.id, q.text, q.answer.unwrap(), q.depth.unwrap());
    }
}
