//! Trains the lexical edge scorer on generated data and decodes with it.
use ruleproof::datagen::{generate_dataset, GenConfig};
use ruleproof::decoder::{decode, Connectivity, PredictionRecord};
use ruleproof::evalharness::aggregate_report;
use ruleproof::potentials::lexical::{edge_examples, gold_node_labels};
use ruleproof::potentials::{fit_linear_scorer, Hyperparameters};
use ruleproof::theory::Theory;

fn cells(ts: &[Theory]) -> Vec<([f64; 8], bool)> {
    ts.iter().flat_map(|t| edge_examples(t).unwrap()).collect()
}

fn main() {
    let data = generate_dataset(&GenConfig { seed: 21, num_theories: 150, max_depth: 3, ..GenConfig::default() }).unwrap();
    let hyper = Hyperparameters::default();
    let scorer = fit_linear_scorer(&cells(&data.train), hyper).unwrap();
    let untrained = fit_linear_scorer(&cells(&data.train), Hyperparameters { epochs: 0, ..hyper }).unwrap();
    let dev = cells(&data.dev);
    println!("dev edge accuracy: trained {:.1}%, untrained {:.1}%", 100.0 * scorer.accuracy(&dev), 100.0 * untrained.accuracy(&dev));
    println!("weights {:?}", scorer.weights.iter().map(|w| format!("{w:.2}")).collect::<Vec<_>>());

    // gold nodes, lexical edges
    let mut preds = Vec::new();
    for t in &data.test {
        for q in &t.questions {
            let gold = &q.proofs.as_ref().unwrap()[0];
            let p = scorer.potentials(t, &gold_node_labels(t.layout(), gold));
            let r = decode(&p, Connectivity::On).unwrap();
            preds.push(PredictionRecord::new(&t.id, &q.id, q.answer.unwrap(), &r));
        }
    }
    print!("{}", aggregate_report(&data.test, &preds, "lexical edges, gold nodes").unwrap().to_table());
}
