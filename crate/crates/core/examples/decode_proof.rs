//! Decodes a proof from hand-written potentials with and without the
//! connectivity constraint, and checks the flow certificate.
use std::collections::BTreeSet;

use ruleproof::decoder::{decode, decode_unconstrained, max_flow, Connectivity, FlowCertificate};
use ruleproof::potentials::Potentials;
use ruleproof::theory::NodeLayout;

fn main() {
    // nodes: F1, R1, R2, NAF
    let layout = NodeLayout::new(1, 2);
    let p = Potentials {
        layout,
        node_prob: vec![0.9, 0.8, 0.7, 0.1],
        edge_prob: vec![
            vec![0.0, 0.9, 0.4, 0.0],
            vec![0.1, 0.0, 0.2, 0.0],
            vec![0.0, 0.3, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ],
    };

    for (name, r) in [
        ("connected", decode(&p, Connectivity::On).unwrap()),
        ("no connectivity", decode(&p, Connectivity::Off).unwrap()),
        ("unconstrained", decode_unconstrained(&p).unwrap()),
    ] {
        let edges: Vec<String> = r.proof.edges.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        println!("{name:>16}: objective {:.2}, edges [{}], connected {}", r.objective, edges.join(", "), r.proof.is_connected());
    }

    let r = decode(&p, Connectivity::On).unwrap();
    let nodes: Vec<usize> = r.proof.nodes.iter().map(|n| layout.index(*n).unwrap()).collect();
    let edges: BTreeSet<(usize, usize)> =
        r.proof.edges.iter().map(|(a, b)| (layout.index(*a).unwrap(), layout.index(*b).unwrap())).collect();
    let cert = FlowCertificate::build(&nodes, &edges).expect("connected proof");
    cert.verify(&nodes, &edges).expect("certificate");
    println!("flow certificate value {} (max flow {}), {} repair edge(s)", cert.value(), max_flow(&nodes, &edges), r.stats.repair_edges);
}
