//! Oracle potentials at several noise levels, decoded and scored, plus the
//! connectivity ablation on a suite with weakened gold edges.
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruleproof::datagen::{generate_dataset, GenConfig};
use ruleproof::decoder::{decode, Connectivity, PredictionRecord};
use ruleproof::evalharness::aggregate_report;
use ruleproof::potentials::{derive_seed, oracle_potentials};

fn main() {
    let data = generate_dataset(&GenConfig { seed: 11, num_theories: 60, max_depth: 5, ..GenConfig::default() }).unwrap();
    let ts = data.test;

    let run = |noise: f64, conn: Connectivity, weaken: f64| {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut preds = Vec::new();
        for (ti, t) in ts.iter().enumerate() {
            for (qi, q) in t.questions.iter().enumerate() {
                let gold = &q.proofs.as_ref().unwrap()[0];
                let mut p = oracle_potentials(t, gold, noise, derive_seed(1, ti as u64, qi as u64)).unwrap();
                if !gold.edges.is_empty() && rng.gen_bool(weaken) {
                    let (a, b) = *gold.edges.iter().collect::<Vec<_>>().choose(&mut rng).unwrap();
                    p.edge_prob[p.layout.index(*a).unwrap()][p.layout.index(*b).unwrap()] = 0.45;
                }
                let r = decode(&p, conn).unwrap();
                preds.push(PredictionRecord::new(&t.id, &q.id, q.answer.unwrap(), &r));
            }
        }
        preds
    };

    let clean = aggregate_report(&ts, &run(0.0, Connectivity::On, 0.0), "oracle, eps 0").unwrap();
    print!("{}", clean.to_table());

    println!();
    for conn in [Connectivity::On, Connectivity::Off] {
        let r = aggregate_report(&ts, &run(0.2, conn, 0.35), "weakened").unwrap();
        println!("{conn:?}: PA {:.1}%  FA {:.1}%", 100.0 * r.all().pa, 100.0 * r.all().fa);
    }
}
