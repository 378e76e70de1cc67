//! Noise injection and majority-vote error reduction.
//!
//! The noisy wrapper flips the inner verdict with false-alarm rate `alpha`
//! (true answer consistent) and miss rate `beta` (true answer inconsistent).
//! Randomness is drawn from a stream keyed by (seed, canonical subset key,
//! per-subset call counter): repeated calls on the same subset are
//! independent draws, and identical (seed, subset, call index) triples yield
//! identical verdicts across processes and thread schedules.

use super::{union_key, Oracle, OracleError};
use crate::factlang::{Fact, Verdict};
use crate::seeding::derive2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::sync::Mutex;

/// Error rates of a noisy subset-consistency oracle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseParams {
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

impl NoiseParams {
    pub fn new(alpha: f64, beta: f64, seed: u64) -> Result<NoiseParams, OracleError> {
        if !(0.0..1.0).contains(&alpha) || !(0.0..1.0).contains(&beta) {
            return Err(OracleError::Config(format!(
                "noise rates must lie in [0,1): alpha={alpha}, beta={beta}"
            )));
        }
        Ok(NoiseParams { alpha, beta, seed })
    }

    /// `max(alpha, beta)`, the per-call error rate the vote bound uses.
    pub fn epsilon(&self) -> f64 {
        self.alpha.max(self.beta)
    }
}

/// Majority-vote configuration: an odd number of repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct VoteParams {
    pub repetitions: u32,
}

impl VoteParams {
    pub fn new(repetitions: u32) -> Result<VoteParams, OracleError> {
        if repetitions == 0 || repetitions % 2 == 0 {
            return Err(OracleError::Config(format!(
                "vote repetitions must be odd and positive, got {repetitions}"
            )));
        }
        Ok(VoteParams { repetitions })
    }

    /// Vote margin `gamma = 1/2 - max(alpha, beta)`.
    pub fn gamma(noise: &NoiseParams) -> f64 {
        0.5 - noise.epsilon()
    }
}

/// Wraps an oracle with independent verdict flips at rates `alpha`/`beta`.
pub struct NoisyOracle<O> {
    inner: O,
    params: NoiseParams,
    counters: Mutex<HashMap<u64, u64>>,
}

impl<O: Oracle> NoisyOracle<O> {
    pub fn new(inner: O, params: NoiseParams) -> NoisyOracle<O> {
        NoisyOracle { inner, params, counters: Mutex::new(HashMap::new()) }
    }

    pub fn params(&self) -> NoiseParams {
        self.params
    }
}

impl<O: Oracle> Oracle for NoisyOracle<O> {
    fn query_with_background(
        &self,
        background: &[&Fact],
        subset: &[&Fact],
    ) -> Result<Verdict, OracleError> {
        let truth = self.inner.query_with_background(background, subset)?;
        let key = union_key(background, subset);
        let call_index = {
            let mut counters = self.counters.lock().expect("counter lock");
            let counter = counters.entry(key).or_insert(0);
            let index = *counter;
            *counter += 1;
            index
        };
        let mut rng = ChaCha8Rng::seed_from_u64(derive2(self.params.seed, key, call_index));
        let draw: f64 = rng.random();
        let flip_probability = match truth {
            Verdict::Consistent => self.params.alpha,
            Verdict::Inconsistent => self.params.beta,
        };
        Ok(if draw < flip_probability { truth.flipped() } else { truth })
    }
}

/// Repeats each query `r` times and returns the majority verdict.
pub struct MajorityOracle<O> {
    inner: O,
    vote: VoteParams,
}

impl<O: Oracle> MajorityOracle<O> {
    pub fn new(inner: O, vote: VoteParams) -> MajorityOracle<O> {
        MajorityOracle { inner, vote }
    }
}

impl<O: Oracle> Oracle for MajorityOracle<O> {
    fn query_with_background(
        &self,
        background: &[&Fact],
        subset: &[&Fact],
    ) -> Result<Verdict, OracleError> {
        let mut inconsistent_votes = 0u32;
        for _ in 0..self.vote.repetitions {
            if self.inner.query_with_background(background, subset)? == Verdict::Inconsistent {
                inconsistent_votes += 1;
            }
        }
        Ok(if inconsistent_votes * 2 > self.vote.repetitions {
            Verdict::Inconsistent
        } else {
            Verdict::Consistent
        })
    }
}

/// Exact majority-vote error: `sum_{t=ceil(r/2)}^{r} C(r,t) eps^t (1-eps)^(r-t)`.
pub fn binomial_majority_error(repetitions: u32, eps: f64) -> f64 {
    assert!(repetitions % 2 == 1, "repetitions must be odd");
    assert!((0.0..0.5).contains(&eps), "eps must lie in [0, 1/2)");
    if eps == 0.0 {
        return 0.0;
    }
    let r = repetitions as u64;
    let t0 = r / 2 + 1;
    // First term C(r, t0) eps^t0 (1-eps)^(r-t0), then the ratio recurrence.
    let mut term = (0..t0).fold(1.0f64, |acc, i| acc * (r - i) as f64 / (i + 1) as f64);
    term *= eps.powi(t0 as i32) * (1.0 - eps).powi((r - t0) as i32);
    let mut sum = term;
    for t in t0..r {
        term *= (r - t) as f64 / (t + 1) as f64 * eps / (1.0 - eps);
        sum += term;
    }
    sum
}

/// Hoeffding bound on the majority-vote error: `exp(-2 r gamma^2)`.
pub fn hoeffding_majority_bound(repetitions: u32, eps: f64) -> f64 {
    let gamma = 0.5 - eps;
    (-2.0 * repetitions as f64 * gamma * gamma).exp()
}

fn mc_trial_wrong(eps: f64, repetitions: u32, trial_seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let wrong = (0..repetitions).filter(|_| rng.random::<f64>() < eps).count() as u32;
    wrong * 2 > repetitions
}

/// Monte Carlo estimate of the majority-vote error rate over independent
/// trials; each trial draws `repetitions` per-call errors at rate `eps` and
/// takes the majority. Trials are keyed by index, so the estimate does not
/// depend on scheduling.
pub fn mc_majority_error(eps: f64, repetitions: u32, trials: usize, seed: u64) -> f64 {
    let wrong = crate::exec::run_indexed(trials, |t| {
        u64::from(mc_trial_wrong(eps, repetitions, derive2(seed, t as u64, 0)))
    });
    wrong.iter().sum::<u64>() as f64 / trials as f64
}

/// Sequential variant of [`mc_majority_error`] with identical output.
pub fn mc_majority_error_seq(eps: f64, repetitions: u32, trials: usize, seed: u64) -> f64 {
    let wrong = crate::exec::run_indexed_seq(trials, |t| {
        u64::from(mc_trial_wrong(eps, repetitions, derive2(seed, t as u64, 0)))
    });
    wrong.iter().sum::<u64>() as f64 / trials as f64
}
