//! Subset-consistency oracles.
//!
//! Everything that can judge "are these facts mutually consistent" sits
//! behind [`Oracle`]: the perfect ground-truth oracle, the noisy and
//! majority-vote wrappers in [`noise`], the HTTP judge client in [`llm`], and
//! the counting/tracing instrumentation here. Oracles are safe to call from
//! multiple workers; determinism of the stochastic wrappers comes from
//! counter-based keyed streams, not call order.

pub mod llm;
mod noise;

pub use noise::{
    binomial_majority_error, hoeffding_majority_bound, mc_majority_error, mc_majority_error_seq,
    MajorityOracle, NoiseParams, NoisyOracle, VoteParams,
};

use crate::factlang::{ground_truth_consistent, Fact, FactId, Verdict};
use crate::seeding::subset_key;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle transport failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("unparseable oracle response after {attempts} attempts: {message}")]
    Parse { attempts: u32, message: String },
    #[error("invalid oracle configuration: {0}")]
    Config(String),
}

/// A subset-consistency judge.
///
/// `query_with_background` exists so judges that render prompts can present
/// the assumed-consistent background separately from the queried subset; the
/// verdict contract is over the union either way.
pub trait Oracle: Send + Sync {
    fn query_with_background(
        &self,
        background: &[&Fact],
        subset: &[&Fact],
    ) -> Result<Verdict, OracleError>;

    fn query(&self, subset: &[&Fact]) -> Result<Verdict, OracleError> {
        self.query_with_background(&[], subset)
    }
}

impl<T: Oracle + ?Sized> Oracle for &T {
    fn query_with_background(
        &self,
        background: &[&Fact],
        subset: &[&Fact],
    ) -> Result<Verdict, OracleError> {
        (**self).query_with_background(background, subset)
    }
}

impl<T: Oracle + ?Sized> Oracle for Box<T> {
    fn query_with_background(
        &self,
        background: &[&Fact],
        subset: &[&Fact],
    ) -> Result<Verdict, OracleError> {
        (**self).query_with_background(background, subset)
    }
}

/// Canonical key of the queried union, independent of the background/subset
/// split and of element order.
pub(crate) fn union_key(background: &[&Fact], subset: &[&Fact]) -> u64 {
    let mut ids: Vec<FactId> =
        background.iter().chain(subset.iter()).map(|f| f.id).collect();
    ids.sort_unstable();
    ids.dedup();
    subset_key(&ids)
}

/// The perfect oracle: ground truth, with optional memoization.
///
/// Memoization keys on instance-local fact ids, so a memoized oracle must not
/// be reused across instances.
#[derive(Default)]
pub struct PerfectOracle {
    memo: Option<Mutex<std::collections::HashMap<u64, Verdict>>>,
}

impl PerfectOracle {
    pub fn new() -> PerfectOracle {
        PerfectOracle { memo: None }
    }

    pub fn memoized() -> PerfectOracle {
        PerfectOracle { memo: Some(Mutex::new(std::collections::HashMap::new())) }
    }
}

impl Oracle for PerfectOracle {
    fn query_with_background(
        &self,
        background: &[&Fact],
        subset: &[&Fact],
    ) -> Result<Verdict, OracleError> {
        let evaluate = || {
            let union: Vec<&Fact> =
                background.iter().chain(subset.iter()).copied().collect();
            ground_truth_consistent(&union)
        };
        match &self.memo {
            None => Ok(evaluate()),
            Some(memo) => {
                let key = union_key(background, subset);
                let mut cache = memo.lock().expect("memo lock");
                Ok(*cache.entry(key).or_insert_with(evaluate))
            }
        }
    }
}

/// Query statistics snapshot.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleStats {
    pub total_calls: u64,
    /// Histogram keyed by queried union size.
    pub calls_by_subset_size: BTreeMap<usize, u64>,
}

/// Transparent pass-through wrapper that counts calls.
pub struct CountingOracle<O> {
    inner: O,
    total: AtomicU64,
    by_size: Mutex<BTreeMap<usize, u64>>,
}

impl<O: Oracle> CountingOracle<O> {
    pub fn new(inner: O) -> CountingOracle<O> {
        CountingOracle { inner, total: AtomicU64::new(0), by_size: Mutex::new(BTreeMap::new()) }
    }

    pub fn total_calls(&self) -> u64 {
        self.total.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> OracleStats {
        OracleStats {
            total_calls: self.total_calls(),
            calls_by_subset_size: self.by_size.lock().expect("stats lock").clone(),
        }
    }
}

impl<O: Oracle> Oracle for CountingOracle<O> {
    fn query_with_background(
        &self,
        background: &[&Fact],
        subset: &[&Fact],
    ) -> Result<Verdict, OracleError> {
        self.total.fetch_add(1, Ordering::Relaxed);
        *self
            .by_size
            .lock()
            .expect("stats lock")
            .entry(background.len() + subset.len())
            .or_insert(0) += 1;
        self.inner.query_with_background(background, subset)
    }
}

/// One recorded oracle call: queried union ids (sorted) and the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub ids: Vec<FactId>,
    pub verdict: Verdict,
}

/// Transparent pass-through wrapper that records per-call trace records.
pub struct TraceOracle<O> {
    inner: O,
    records: Mutex<Vec<TraceRecord>>,
}

impl<O: Oracle> TraceOracle<O> {
    pub fn new(inner: O) -> TraceOracle<O> {
        TraceOracle { inner, records: Mutex::new(Vec::new()) }
    }

    pub fn take_records(&self) -> Vec<TraceRecord> {
        std::mem::take(&mut self.records.lock().expect("trace lock"))
    }
}

impl<O: Oracle> Oracle for TraceOracle<O> {
    fn query_with_background(
        &self,
        background: &[&Fact],
        subset: &[&Fact],
    ) -> Result<Verdict, OracleError> {
        let verdict = self.inner.query_with_background(background, subset)?;
        let mut ids: Vec<FactId> =
            background.iter().chain(subset.iter()).map(|f| f.id).collect();
        ids.sort_unstable();
        self.records.lock().expect("trace lock").push(TraceRecord { ids, verdict });
        Ok(verdict)
    }
}
