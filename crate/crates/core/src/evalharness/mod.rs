//! Exact-match answer and proof metrics, bucketed by gold proof depth.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::PredictionRecord;
use crate::proofgraph::match_proofs;
use crate::theory::{Question, Theory};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("{0}/{1}: question has no answer or gold proof")]
    NoGold(String, String),
    #[error("{0}/{1}: prediction has an unparseable node")]
    BadNode(String, String),
    #[error("{0}/{1}: prediction references a sentence not in the theory")]
    UnknownNode(String, String),
    #[error("{0}/{1}: no such question in the dataset")]
    UnknownQuestion(String, String),
    #[error("{0}/{1}: duplicate prediction")]
    Duplicate(String, String),
    #[error("{0}/{1}: missing prediction")]
    Missing(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Scores {
    pub qa: bool,
    pub na: bool,
    pub ea: bool,
    pub pa: bool,
    pub fa: bool,
}

/// Scores one prediction; proof credit is given if any gold proof matches.
pub fn score_example(gold: &Question, pred: &PredictionRecord) -> Result<Scores, EvalError> {
    let ids = || (pred.theory_id.clone(), pred.question_id.clone());
    let (Some(answer), Some(golds)) = (gold.answer, gold.proofs.as_deref()) else {
        let (t, q) = ids();
        return Err(EvalError::NoGold(t, q));
    };
    let proof = pred.proof().ok_or_else(|| {
        let (t, q) = ids();
        EvalError::BadNode(t, q)
    })?;
    let m = match_proofs(&proof, golds).map_err(|_| {
        let (t, q) = ids();
        EvalError::NoGold(t, q)
    })?;
    let qa = pred.answer == answer;
    Ok(Scores { qa, na: m.node_match, ea: m.edge_match, pa: m.proof_match, fa: qa && m.proof_match })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    /// `None` for the all-depths row.
    pub depth: Option<usize>,
    pub count: usize,
    pub qa: f64,
    pub na: f64,
    pub ea: f64,
    pub pa: f64,
    pub fa: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    count: usize,
    hits: [usize; 5],
}

impl Tally {
    fn add(&mut self, s: Scores) {
        self.count += 1;
        for (h, v) in self.hits.iter_mut().zip([s.qa, s.na, s.ea, s.pa, s.fa]) {
            *h += usize::from(v);
        }
    }

    fn row(&self, depth: Option<usize>) -> Row {
        let rate = |k: usize| if self.count == 0 { 0.0 } else { self.hits[k] as f64 / self.count as f64 };
        Row { depth, count: self.count, qa: rate(0), na: rate(1), ea: rate(2), pa: rate(3), fa: rate(4) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub label: String,
    pub bucketing: String,
    /// Questions without an answer or gold proof.
    pub skipped: usize,
    pub rows: Vec<Row>,
}

/// Scores one prediction per annotated question; rows cover the depths that
/// occur plus an all-depths row.
pub fn aggregate_report(theories: &[Theory], preds: &[PredictionRecord], label: &str) -> Result<Report, EvalError> {
    let mut by_key: HashMap<(&str, &str), &PredictionRecord> = HashMap::new();
    for p in preds {
        if by_key.insert((&p.theory_id, &p.question_id), p).is_some() {
            return Err(EvalError::Duplicate(p.theory_id.clone(), p.question_id.clone()));
        }
    }
    let mut skipped = 0;
    let mut work = Vec::new();
    for t in theories {
        for q in &t.questions {
            let key = (t.id.as_str(), q.id.as_str());
            let pred = by_key.remove(&key);
            let Some(golds) = q.proofs.as_deref().filter(|g| !g.is_empty() && q.answer.is_some()) else {
                skipped += 1;
                continue;
            };
            let pred = pred.ok_or_else(|| EvalError::Missing(t.id.clone(), q.id.clone()))?;
            let depth = golds.iter().map(crate::reasoner::proof_depth).max().unwrap_or(0);
            work.push((t, q, pred, q.depth.unwrap_or(depth)));
        }
    }
    if let Some(p) = by_key.values().min_by_key(|p| (&p.theory_id, &p.question_id)) {
        return Err(EvalError::UnknownQuestion(p.theory_id.clone(), p.question_id.clone()));
    }

    let scored: Vec<(usize, Scores)> = work
        .par_iter()
        .map(|(t, q, pred, depth)| {
            let proof = pred.proof().ok_or_else(|| EvalError::BadNode(t.id.clone(), q.id.clone()))?;
            if proof.nodes.iter().chain(proof.edges.iter().flat_map(|(a, b)| [a, b])).any(|n| !t.contains_node(*n)) {
                return Err(EvalError::UnknownNode(t.id.clone(), q.id.clone()));
            }
            Ok((*depth, score_example(q, pred)?))
        })
        .collect::<Result<_, _>>()?;

    let mut buckets: BTreeMap<usize, Tally> = BTreeMap::new();
    let mut all = Tally::default();
    for (depth, s) in scored {
        buckets.entry(depth).or_default().add(s);
        all.add(s);
    }
    let mut rows: Vec<Row> = buckets.iter().map(|(d, t)| t.row(Some(*d))).collect();
    rows.push(all.row(None));
    Ok(Report { label: label.to_owned(), bucketing: "max gold proof depth".into(), skipped, rows })
}

impl Report {
    pub fn all(&self) -> &Row {
        self.rows.last().expect("all row")
    }

    /// Aligned text table, rates in percent.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} (bucketed by {}; {} skipped)", self.label, self.bucketing, self.skipped);
        let _ = writeln!(s, "{:<6}{:>7}{:>8}{:>8}{:>8}{:>8}{:>8}", "Depth", "Cnt", "QA", "NA", "EA", "PA", "FA");
        for r in &self.rows {
            let d = r.depth.map_or_else(|| "All".to_owned(), |d| d.to_string());
            let _ = writeln!(
                s,
                "{:<6}{:>7}{:>8.1}{:>8.1}{:>8.1}{:>8.1}{:>8.1}",
                d,
                r.count,
                100.0 * r.qa,
                100.0 * r.na,
                100.0 * r.ea,
                100.0 * r.pa,
                100.0 * r.fa
            );
        }
        s
    }
}

/// Gold predictions: the reasoner's answer and first gold proof, as a perfect
/// system would emit them.
pub fn gold_predictions(t: &Theory) -> Vec<PredictionRecord> {
    t.questions
        .iter()
        .filter_map(|q| {
            let p = q.proofs.as_ref()?.first()?;
            Some(PredictionRecord {
                theory_id: t.id.clone(),
                question_id: q.id.clone(),
                answer: q.answer?,
                nodes: p.nodes.iter().map(ToString::to_string).collect(),
                edges: p.edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
                objective: 0.0,
                connectivity_relaxed: false,
            })
        })
        .collect()
}
