//! Divide-and-conquer localization of one minimal unsatisfiable subset.
//!
//! [`qx`] narrows an inconsistent candidate list against an assumed-consistent
//! background by recursively splitting it in half and reusing each half as
//! background for the other: `d1 = rec(s1, b ∪ s2)`, then `d2 = rec(s2, b ∪
//! d1)`, returning `d1 ∪ d2`. A guard returns early whenever the accumulated
//! background alone is already inconsistent; without it the recursion cannot
//! tell conflicts in the candidate half from conflicts it has itself moved
//! into the background, and the result degenerates to the whole input. Under
//! a perfect oracle the returned set is subset-minimal relative to the
//! background; under noise the result is best effort and callers decide how
//! much to trust it.
//!
//! Adaptivity makes the recursion inherently sequential: each query depends
//! on earlier answers. Run separate scopes concurrently instead.

use crate::factlang::{gather, Fact, FactId, Verdict};
use crate::oracle::{Oracle, OracleError};
use serde::{Deserialize, Serialize};

/// A localized minimal unsatisfiable subset.
///
/// `verified` is only set by an explicit [`verify_mus`] pass; extraction
/// under a noisy oracle gives no minimality guarantee by itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mus {
    pub fact_ids: Vec<FactId>,
    pub source_scope: Option<usize>,
    pub verified: bool,
}

impl Mus {
    pub fn len(&self) -> usize {
        self.fact_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fact_ids.is_empty()
    }
}

/// Split an ordered fact list into its first `ceil(n/2)` elements and the rest.
///
/// Panics when `s` has fewer than two elements; splitting is only defined on
/// lists the recursion can still divide.
pub fn split(s: &[FactId]) -> (&[FactId], &[FactId]) {
    assert!(s.len() >= 2, "split requires at least two elements, got {}", s.len());
    s.split_at(s.len().div_ceil(2))
}

fn merge_sorted(a: &[FactId], b: &[FactId]) -> Vec<FactId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn query(
    oracle: &dyn Oracle,
    store: &[Fact],
    background: &[FactId],
    subset: &[FactId],
) -> Result<Verdict, OracleError> {
    oracle.query_with_background(&gather(store, background), &gather(store, subset))
}

/// Localize one MUS inside `s` relative to `background`.
///
/// `s` and `background` must be sorted by id and disjoint; `background` is
/// assumed consistent. Returns the empty vector when `background ∪ s` is
/// judged consistent.
pub fn qx(
    oracle: &dyn Oracle,
    store: &[Fact],
    s: &[FactId],
    background: &[FactId],
) -> Result<Vec<FactId>, OracleError> {
    debug_assert!(s.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(background.windows(2).all(|w| w[0] < w[1]));
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if query(oracle, store, background, s)? == Verdict::Consistent {
        return Ok(Vec::new());
    }
    qx_rec(oracle, store, s, background, false)
}

/// Recursion invariant: `background ∪ s` is known inconsistent.
/// `background_extended` records whether `background` grew past what the
/// caller already vetted; only then is the guard query spent.
fn qx_rec(
    oracle: &dyn Oracle,
    store: &[Fact],
    s: &[FactId],
    background: &[FactId],
    background_extended: bool,
) -> Result<Vec<FactId>, OracleError> {
    if background_extended && query(oracle, store, &[], background)? == Verdict::Inconsistent {
        return Ok(Vec::new());
    }
    if s.len() == 1 {
        return Ok(s.to_vec());
    }
    let (s1, s2) = split(s);
    let d1 = qx_rec(oracle, store, s1, &merge_sorted(background, s2), true)?;
    let d2 = qx_rec(oracle, store, s2, &merge_sorted(background, &d1), !d1.is_empty())?;
    // s1 precedes s2 in id order, so d1 ++ d2 stays sorted.
    let mut delta = d1;
    delta.extend_from_slice(&d2);
    Ok(delta)
}

/// Check the MUS definition directly: the whole set must be inconsistent and
/// every one-element-removed subset consistent. Always spends exactly
/// `|u| + 1` queries.
pub fn verify_mus(
    oracle: &dyn Oracle,
    store: &[Fact],
    u: &[FactId],
) -> Result<bool, OracleError> {
    assert!(!u.is_empty(), "verify_mus requires a nonempty candidate");
    let mut is_mus = query(oracle, store, &[], u)? == Verdict::Inconsistent;
    for drop in 0..u.len() {
        let rest: Vec<FactId> =
            u.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, id)| *id).collect();
        if query(oracle, store, &[], &rest)? == Verdict::Inconsistent {
            is_mus = false;
        }
    }
    Ok(is_mus)
}
