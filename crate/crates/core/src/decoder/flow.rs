//! Flow view of connectivity: a graph over `N` is connected iff `|N|` units
//! can be pushed from a source attached to one anchor node to a sink that
//! takes one unit from every node, with node-to-node arcs usable only where
//! an edge exists in either direction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlowNode {
    Source,
    Node(usize),
    Sink,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowViolation {
    #[error("flow on {0:?}->{1:?} exceeds its capacity")]
    Capacity(FlowNode, FlowNode),
    #[error("flow is not conserved at node {0}")]
    Conservation(usize),
    #[error("source emits {0} units instead of the node count")]
    Saturation(u64),
    #[error("flow uses {0}->{1} without an edge in either direction")]
    Coupling(usize, usize),
}

/// An explicit feasible flow of value `|N|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowCertificate {
    pub anchor: usize,
    pub flows: BTreeMap<(FlowNode, FlowNode), u64>,
}

fn adjacency(nodes: &[usize], edges: &BTreeSet<(usize, usize)>) -> BTreeMap<usize, BTreeSet<usize>> {
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = nodes.iter().map(|&n| (n, BTreeSet::new())).collect();
    for &(a, b) in edges {
        if adj.contains_key(&a) && adj.contains_key(&b) {
            adj.get_mut(&a).expect("present").insert(b);
            adj.get_mut(&b).expect("present").insert(a);
        }
    }
    adj
}

impl FlowCertificate {
    /// Routes one unit to every node along a breadth-first spanning tree
    /// rooted at the lowest node. `None` when the graph is disconnected.
    pub fn build(nodes: &[usize], edges: &BTreeSet<(usize, usize)>) -> Option<Self> {
        let anchor = *nodes.iter().min()?;
        let adj = adjacency(nodes, edges);
        let mut parent = BTreeMap::new();
        let mut order = vec![anchor];
        let mut queue = VecDeque::from([anchor]);
        let mut seen = BTreeSet::from([anchor]);
        while let Some(m) = queue.pop_front() {
            for &n in &adj[&m] {
                if seen.insert(n) {
                    parent.insert(n, m);
                    order.push(n);
                    queue.push_back(n);
                }
            }
        }
        if order.len() != adj.len() {
            return None;
        }
        let mut subtree: BTreeMap<usize, u64> = order.iter().map(|&n| (n, 1)).collect();
        for &n in order.iter().rev() {
            if let Some(&p) = parent.get(&n) {
                let s = subtree[&n];
                *subtree.get_mut(&p).expect("tree node") += s;
            }
        }
        let mut flows = BTreeMap::new();
        flows.insert((FlowNode::Source, FlowNode::Node(anchor)), order.len() as u64);
        for &n in &order {
            flows.insert((FlowNode::Node(n), FlowNode::Sink), 1);
            if let Some(&p) = parent.get(&n) {
                flows.insert((FlowNode::Node(p), FlowNode::Node(n)), subtree[&n]);
            }
        }
        Some(FlowCertificate { anchor, flows })
    }

    pub fn value(&self) -> u64 {
        self.flows.iter().filter(|((a, _), _)| *a == FlowNode::Source).map(|(_, f)| f).sum()
    }

    /// Checks capacities, conservation, source saturation and edge coupling.
    pub fn verify(&self, nodes: &[usize], edges: &BTreeSet<(usize, usize)>) -> Result<(), FlowViolation> {
        let size = nodes.len() as u64;
        let member: BTreeSet<usize> = nodes.iter().copied().collect();
        let mut balance: BTreeMap<usize, i128> = member.iter().map(|&n| (n, 0)).collect();
        for (&(a, b), &f) in &self.flows {
            let cap = match (a, b) {
                (FlowNode::Source, FlowNode::Node(x)) if x == self.anchor && member.contains(&x) => size,
                (FlowNode::Node(n), FlowNode::Sink) if member.contains(&n) => 1,
                (FlowNode::Node(m), FlowNode::Node(n)) if m != n && member.contains(&m) && member.contains(&n) => size,
                _ => 0,
            };
            if f > cap {
                return Err(FlowViolation::Capacity(a, b));
            }
            if let (FlowNode::Node(m), FlowNode::Node(n)) = (a, b) {
                // e(m,n) + e(n,m) >= f / |N|
                let coupled = u64::from(edges.contains(&(m, n))) + u64::from(edges.contains(&(n, m)));
                if coupled * size < f {
                    return Err(FlowViolation::Coupling(m, n));
                }
            }
            if let FlowNode::Node(n) = b {
                *balance.get_mut(&n).expect("member") += i128::from(f);
            }
            if let FlowNode::Node(n) = a {
                *balance.get_mut(&n).expect("member") -= i128::from(f);
            }
        }
        if let Some((&n, _)) = balance.iter().find(|(_, b)| **b != 0) {
            return Err(FlowViolation::Conservation(n));
        }
        match self.value() {
            v if v == size => Ok(()),
            v => Err(FlowViolation::Saturation(v)),
        }
    }
}

/// Maximum source-to-sink flow on the augmented graph, by shortest
/// augmenting paths. Equals `|N|` iff the graph is connected.
pub fn max_flow(nodes: &[usize], edges: &BTreeSet<(usize, usize)>) -> u64 {
    let Some(&anchor) = nodes.iter().min() else {
        return 0;
    };
    let n = nodes.len();
    let (source, sink) = (n, n + 1);
    let pos: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut cap = vec![vec![0u64; n + 2]; n + 2];
    cap[source][pos[&anchor]] = n as u64;
    for row in cap.iter_mut().take(n) {
        row[sink] = 1;
    }
    for &(a, b) in edges {
        if let (Some(&i), Some(&j)) = (pos.get(&a), pos.get(&b)) {
            if i != j {
                cap[i][j] = n as u64;
                cap[j][i] = n as u64;
            }
        }
    }
    let mut total = 0;
    loop {
        let mut prev = vec![usize::MAX; n + 2];
        prev[source] = source;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n + 2 {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return total;
        }
        let mut bottleneck = u64::MAX;
        let mut v = sink;
        while v != source {
            bottleneck = bottleneck.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = sink;
        while v != source {
            let u = prev[v];
            cap[u][v] -= bottleneck;
            cap[v][u] += bottleneck;
            v = u;
        }
        total += bottleneck;
    }
}
