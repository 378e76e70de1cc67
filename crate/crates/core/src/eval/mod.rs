//! Metrics, baselines, and sweep experiments.

pub mod sweep;

pub use sweep::{
    run_noise_grid, run_repair_sweep, run_scaling_sweep, write_csv, write_scaling_plot,
    AlgorithmKind, NoiseGridRow, NoiseGridSpec, NoiseSpec, RepairSweepOutput, RepairSweepSpec,
    ScalingOutput, ScalingPoint, ScalingRow, ScalingSweepSpec, SummaryRow, SweepRow,
};

use crate::datagen::{DatagenError, Instance};
use crate::factlang::{Fact, FactId, Verdict};
use crate::oracle::llm::{render_direct_prompt, TextCompleter, DIRECT_ZERO_SHOT_TEMPLATE};
use crate::oracle::{Oracle, OracleError};
use crate::repair::{minimum_hitting_set_count, RepairError};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold set is empty; precision/recall are undefined")]
    EmptyGold,
    #[error("pairwise baseline needs at least two facts, got {0}")]
    TooFewFacts(usize),
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Repair(#[from] RepairError),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
}

/// Precision/recall/F1 of a surviving set against the gold consistent subset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub n_surviving: usize,
    pub n_gold: usize,
    pub n_overlap: usize,
}

/// `P = |F' ∩ F_gold| / |F'|` (1 when `F'` is empty: no false positives
/// asserted), `R = |F' ∩ F_gold| / |F_gold|`, F1 their harmonic mean.
pub fn metrics(surviving: &[FactId], gold: &[FactId]) -> Result<Metrics, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let gold_set: BTreeSet<FactId> = gold.iter().copied().collect();
    let survivors: BTreeSet<FactId> = surviving.iter().copied().collect();
    let overlap = survivors.intersection(&gold_set).count();

    // Independent recomputation over sorted sequences; the two routes must
    // agree on every report.
    let mut a: Vec<FactId> = surviving.to_vec();
    let mut b: Vec<FactId> = gold.to_vec();
    a.sort_unstable();
    a.dedup();
    b.sort_unstable();
    b.dedup();
    let (mut i, mut j, mut recount) = (0usize, 0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                recount += 1;
                i += 1;
                j += 1;
            }
        }
    }
    assert_eq!(overlap, recount, "metric self-check failed");

    let precision =
        if survivors.is_empty() { 1.0 } else { overlap as f64 / survivors.len() as f64 };
    let recall = overlap as f64 / gold_set.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(Metrics {
        precision,
        recall,
        f1,
        n_surviving: survivors.len(),
        n_gold: gold_set.len(),
        n_overlap: overlap,
    })
}

/// Result of the all-pairs baseline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseOutcome {
    pub surviving: Vec<FactId>,
    pub removed: Vec<FactId>,
    pub contradiction_edges: Vec<(FactId, FactId)>,
    pub queries: u64,
}

/// Query every pair, build contradiction edges, then remove facts by greedy
/// max degree (ties to the smallest id) until no edge remains. Spends exactly
/// `C(N,2)` queries. Blind to conflicts wider than two facts.
pub fn pairwise_baseline(
    oracle: &dyn Oracle,
    store: &[Fact],
) -> Result<PairwiseOutcome, EvalError> {
    let n = store.len();
    if n < 2 {
        return Err(EvalError::TooFewFacts(n));
    }
    let mut edges: Vec<(FactId, FactId)> = Vec::new();
    let mut queries = 0u64;
    for i in 0..n {
        for j in i + 1..n {
            queries += 1;
            if oracle.query(&[&store[i], &store[j]])? == Verdict::Inconsistent {
                edges.push((store[i].id, store[j].id));
            }
        }
    }
    let contradiction_edges = edges.clone();

    let mut removed: BTreeSet<FactId> = BTreeSet::new();
    while !edges.is_empty() {
        let mut degree: std::collections::BTreeMap<FactId, usize> =
            std::collections::BTreeMap::new();
        for (a, b) in &edges {
            *degree.entry(*a).or_insert(0) += 1;
            *degree.entry(*b).or_insert(0) += 1;
        }
        let (victim, _) = degree
            .iter()
            .fold((FactId(0), 0usize), |acc, (id, d)| if *d > acc.1 { (*id, *d) } else { acc });
        removed.insert(victim);
        edges.retain(|(a, b)| *a != victim && *b != victim);
    }
    let surviving: Vec<FactId> =
        store.iter().map(|f| f.id).filter(|id| !removed.contains(id)).collect();
    Ok(PairwiseOutcome {
        surviving,
        removed: removed.into_iter().collect(),
        contradiction_edges,
        queries,
    })
}

/// Result of the direct subset-returning baseline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectOutcome {
    pub surviving: Vec<FactId>,
    /// Returned strings that matched no fact, logged and dropped.
    pub unmatched: Vec<String>,
}

fn normalize(text: &str) -> String {
    text.chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect::<String>()
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Extract the answer-tag payload as a list of strings. Accepts JSON arrays
/// and the single-quoted Python list variant.
fn parse_answer_list(response: &str) -> Option<Vec<String>> {
    let start = response.find("<answer>")? + "<answer>".len();
    let end = response[start..].find("</answer>")? + start;
    let payload = response[start..end].trim();
    if let Ok(list) = serde_json::from_str::<Vec<String>>(payload) {
        return Some(list);
    }
    serde_json::from_str::<Vec<String>>(&payload.replace('\'', "\"")).ok()
}

/// Ask the judge for the largest mutually consistent subset in one shot.
/// Returned fact texts are matched exactly first, then case- and
/// punctuation-insensitively.
pub fn direct_llm_baseline(
    completer: &dyn TextCompleter,
    store: &[Fact],
) -> Result<DirectOutcome, EvalError> {
    let refs: Vec<&Fact> = store.iter().collect();
    let prompt = render_direct_prompt(DIRECT_ZERO_SHOT_TEMPLATE, &refs);
    let attempts = completer.max_retries() + 1;
    let mut answer: Option<Vec<String>> = None;
    let mut last = String::new();
    for _ in 0..attempts {
        let response = completer.complete(&prompt)?;
        if let Some(list) = parse_answer_list(&response) {
            answer = Some(list);
            break;
        }
        last = response;
    }
    let Some(list) = answer else {
        return Err(EvalError::Oracle(OracleError::Parse {
            attempts,
            message: format!("no <answer> list in: {last:.80}"),
        }));
    };

    let mut exact: HashMap<&str, Vec<FactId>> = HashMap::new();
    let mut normalized: HashMap<String, Vec<FactId>> = HashMap::new();
    for fact in store {
        exact.entry(fact.text.as_str()).or_default().push(fact.id);
        normalized.entry(normalize(&fact.text)).or_default().push(fact.id);
    }
    let mut surviving: BTreeSet<FactId> = BTreeSet::new();
    let mut unmatched = Vec::new();
    for item in list {
        if let Some(ids) = exact.get(item.as_str()) {
            surviving.extend(ids.iter().copied());
        } else if let Some(ids) = normalized.get(&normalize(&item)) {
            surviving.extend(ids.iter().copied());
        } else {
            log::warn!("direct baseline returned unknown fact text: {item:?}");
            unmatched.push(item);
        }
    }
    Ok(DirectOutcome { surviving: surviving.into_iter().collect(), unmatched })
}

/// Whether the gold MUS family has exactly one minimum hitting set.
pub fn gold_minimum_is_unique(instance: &Instance) -> Result<bool, RepairError> {
    let (_, count) = minimum_hitting_set_count(&instance.gold_mus_sets())?;
    Ok(count == 1)
}
