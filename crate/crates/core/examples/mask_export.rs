//! Exports node, edge and answer labels for constrained training.
use ruleproof::datagen::{generate_theory, GenConfig};
use ruleproof::potentials::{build_edge_mask, export_labels};

fn main() {
    let t = generate_theory(&GenConfig { seed: 2, max_depth: 2, ..GenConfig::default() }, 0).unwrap();
    let k = t.questions.iter().position(|q| q.depth == Some(2)).unwrap();
    let rec = &export_labels(&t).unwrap()[k];
    println!("{}", serde_json::to_string(rec).unwrap());

    let q = &t.questions[k];
    let mask = build_edge_mask(&t, &q.proofs.as_ref().unwrap()[0]).unwrap();
    let n = mask.unmasked().count();
    let ones = mask.unmasked().filter(|c| c.2).count();
    println!("{}: {} unmasked edge cells, {} positive", q.id, n, ones);
}
