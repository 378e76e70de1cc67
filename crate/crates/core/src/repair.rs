//! Hitting-set repair.
//!
//! Per round: judge every scope, localize one MUS per inconsistent scope,
//! remove a greedy hitting set of the round's conflicts from the fact set and
//! from every scope, and repeat until all scopes are judged consistent or the
//! round cap trips. The greedy solver carries the standard `1 + ln m`
//! approximation guarantee; the exact solver and the exhaustive repair search
//! exist as test-scale references.

use crate::factlang::{gather, ground_truth_consistent, Fact, FactId, Verdict};
use crate::oracle::{CountingOracle, Oracle, OracleError, OracleStats};
use crate::quickxplain::{qx, verify_mus, Mus};
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RepairError {
    #[error("conflict family contains an empty set; nothing can hit it")]
    UnhittableFamily,
    #[error("hitting-set search over {0} elements exceeds the exhaustive budget of {1}")]
    SearchBudget(usize, usize),
    #[error("scope {index} references fact id {id} outside the store")]
    InvalidScope { index: usize, id: FactId },
    #[error("scope family must contain at least one scope")]
    EmptyScopeFamily,
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Elements the exhaustive searches will enumerate subsets over.
pub const EXHAUSTIVE_BUDGET: usize = 20;

/// The constraint scopes `C_1..C_m`, each a fact-id subset that must be
/// internally consistent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScopeFamily {
    pub scopes: Vec<Vec<FactId>>,
}

impl ScopeFamily {
    /// The default family: one scope containing every fact.
    pub fn single(n_facts: usize) -> ScopeFamily {
        ScopeFamily { scopes: vec![(0..n_facts as u32).map(FactId).collect()] }
    }

    pub fn len(&self) -> usize {
        self.scopes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scopes.is_empty()
    }

    pub fn validate(&self, store: &[Fact]) -> Result<(), RepairError> {
        if self.scopes.is_empty() {
            return Err(RepairError::EmptyScopeFamily);
        }
        for (index, scope) in self.scopes.iter().enumerate() {
            for id in scope {
                if id.0 as usize >= store.len() {
                    return Err(RepairError::InvalidScope { index, id: *id });
                }
            }
        }
        Ok(())
    }
}

/// Greedy hitting set: repeatedly take the fact covering the most uncovered
/// conflicts, ties to the smallest id. Guarantees `|H| <= (1 + ln m) |H*|`.
pub fn greedy_hitting_set(family: &[BTreeSet<FactId>]) -> Result<BTreeSet<FactId>, RepairError> {
    if family.iter().any(|set| set.is_empty()) {
        return Err(RepairError::UnhittableFamily);
    }
    let mut hit = BTreeSet::new();
    let mut uncovered: Vec<&BTreeSet<FactId>> = family.iter().collect();
    while !uncovered.is_empty() {
        let mut counts: std::collections::BTreeMap<FactId, usize> =
            std::collections::BTreeMap::new();
        for set in &uncovered {
            for id in set.iter() {
                *counts.entry(*id).or_insert(0) += 1;
            }
        }
        // BTreeMap iteration is id-ascending, so strict `>` keeps the
        // smallest id among maximal covers.
        let (best, _) = counts
            .iter()
            .fold((FactId(0), 0usize), |acc, (id, count)| {
                if *count > acc.1 {
                    (*id, *count)
                } else {
                    acc
                }
            });
        hit.insert(best);
        uncovered.retain(|set| !set.contains(&best));
    }
    Ok(hit)
}

/// Minimum-cardinality hitting set by exhaustive search, ties resolved to the
/// lexicographically smallest id tuple. Test-scale reference only.
pub fn exact_hitting_set(family: &[BTreeSet<FactId>]) -> Result<BTreeSet<FactId>, RepairError> {
    if family.is_empty() {
        return Ok(BTreeSet::new());
    }
    if family.iter().any(|set| set.is_empty()) {
        return Err(RepairError::UnhittableFamily);
    }
    let universe: Vec<FactId> = family.iter().flatten().copied().collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if universe.len() > EXHAUSTIVE_BUDGET {
        return Err(RepairError::SearchBudget(universe.len(), EXHAUSTIVE_BUDGET));
    }
    for size in 0..=universe.len() {
        // Lexicographic combination order makes the first hit the tie winner.
        for combo in universe.iter().copied().combinations(size) {
            let candidate: BTreeSet<FactId> = combo.into_iter().collect();
            if family.iter().all(|set| !set.is_disjoint(&candidate)) {
                return Ok(candidate);
            }
        }
    }
    unreachable!("the full universe hits every nonempty set")
}

/// Size and multiplicity of the minimum hitting sets of `family`.
pub fn minimum_hitting_set_count(
    family: &[BTreeSet<FactId>],
) -> Result<(usize, usize), RepairError> {
    if family.is_empty() {
        return Ok((0, 1));
    }
    if family.iter().any(|set| set.is_empty()) {
        return Err(RepairError::UnhittableFamily);
    }
    let universe: Vec<FactId> = family.iter().flatten().copied().collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if universe.len() > EXHAUSTIVE_BUDGET {
        return Err(RepairError::SearchBudget(universe.len(), EXHAUSTIVE_BUDGET));
    }
    for size in 0..=universe.len() {
        let hits = universe
            .iter()
            .copied()
            .combinations(size)
            .filter(|combo| {
                family.iter().all(|set| combo.iter().any(|id| set.contains(id)))
            })
            .count();
        if hits > 0 {
            return Ok((size, hits));
        }
    }
    unreachable!("the full universe hits every nonempty set")
}

/// Largest `|F'|` with every per-scope restriction consistent, by direct
/// search over all subsets. Independent of any hitting-set reasoning; the
/// duality checks compare the two routes.
pub fn exact_repair_size(store: &[Fact], scopes: &ScopeFamily) -> Result<usize, RepairError> {
    exact_repair_size_with(store, scopes, ground_truth_consistent)
}

/// [`exact_repair_size`] parameterized by the consistency judge, so the
/// verification command can inject faults.
pub fn exact_repair_size_with<F>(
    store: &[Fact],
    scopes: &ScopeFamily,
    mut consistent: F,
) -> Result<usize, RepairError>
where
    F: FnMut(&[&Fact]) -> Verdict,
{
    scopes.validate(store)?;
    let n = store.len();
    if n > EXHAUSTIVE_BUDGET {
        return Err(RepairError::SearchBudget(n, EXHAUSTIVE_BUDGET));
    }
    for kept in (0..=n).rev() {
        for combo in (0..n).combinations(kept) {
            let keep: HashSet<usize> = combo.into_iter().collect();
            let feasible = scopes.scopes.iter().all(|scope| {
                let restricted: Vec<&Fact> = scope
                    .iter()
                    .filter(|id| keep.contains(&(id.0 as usize)))
                    .map(|id| &store[id.0 as usize])
                    .collect();
                consistent(&restricted) == Verdict::Consistent
            });
            if feasible {
                return Ok(kept);
            }
        }
    }
    Ok(0)
}

/// Caps that make the repair loop total under noisy oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairPolicy {
    /// Maximum extraction rounds; `None` means `4 * m`.
    pub round_cap: Option<usize>,
    /// Re-query attempts when an inconsistent-judged scope yields no MUS.
    pub retry_limit: u32,
}

impl Default for RepairPolicy {
    fn default() -> RepairPolicy {
        RepairPolicy { round_cap: None, retry_limit: 3 }
    }
}

impl RepairPolicy {
    pub fn effective_round_cap(&self, m: usize) -> usize {
        self.round_cap.unwrap_or(4 * m.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarningKind {
    /// Empty extractions persisted through the retry limit; the scope was
    /// treated as consistent for the round.
    EmptyExtractionRetriesExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepairWarning {
    pub round: usize,
    pub scope: usize,
    pub kind: WarningKind,
}

/// What to do after a scope judged inconsistent produced an empty extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmptyExtractionOutcome {
    /// The scope still looks inconsistent; run the extraction again.
    Requery,
    TreatAsCons { retries_exhausted: bool },
}

/// Resolve an empty extraction: re-query the scope verdict; a consistent
/// verdict clears the scope, an inconsistent one asks for another extraction
/// until the retry limit is spent.
pub fn handle_empty_extraction(
    oracle: &dyn Oracle,
    store: &[Fact],
    scope: &[FactId],
    attempts_used: u32,
    retry_limit: u32,
) -> Result<EmptyExtractionOutcome, OracleError> {
    if attempts_used >= retry_limit {
        return Ok(EmptyExtractionOutcome::TreatAsCons { retries_exhausted: true });
    }
    match oracle.query(&gather(store, scope))? {
        Verdict::Consistent => Ok(EmptyExtractionOutcome::TreatAsCons { retries_exhausted: false }),
        Verdict::Inconsistent => Ok(EmptyExtractionOutcome::Requery),
    }
}

/// Outcome of a repair run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepairResult {
    /// Kept fact ids, ascending.
    pub surviving: Vec<FactId>,
    /// Removed fact ids, ascending.
    pub removed: Vec<FactId>,
    /// Every MUS extracted across rounds.
    pub mus_family: Vec<Mus>,
    /// Extraction rounds executed.
    pub rounds: usize,
    /// Scope-evaluation passes, including the final all-consistent pass on
    /// convergence. This is the round count the query budget is stated over.
    pub scope_evaluations: usize,
    pub converged: bool,
    pub stats: OracleStats,
    pub warnings: Vec<RepairWarning>,
}

impl RepairResult {
    pub fn max_mus_size(&self) -> usize {
        self.mus_family.iter().map(Mus::len).max().unwrap_or(0)
    }

    /// No extracted MUS may survive intact.
    pub fn practically_sound(&self) -> bool {
        let surviving: HashSet<FactId> = self.surviving.iter().copied().collect();
        self.mus_family
            .iter()
            .all(|mus| mus.fact_ids.iter().any(|id| !surviving.contains(id)))
    }
}

/// Query budget `evaluations * m * (2 k (ceil(log2 n) + 2) + 1)`.
///
/// Per evaluation pass each of the `m` scopes costs one verdict query plus,
/// when inconsistent, one extraction bounded by `2 k (ceil(log2 n) + 2)`.
pub fn query_budget(scope_evaluations: usize, m: usize, k_max: usize, n_facts: usize) -> u64 {
    let log = if n_facts <= 1 { 0 } else { (n_facts as f64).log2().ceil() as u64 };
    scope_evaluations as u64 * m as u64 * (2 * k_max as u64 * (log + 2) + 1)
}

/// Run the iterative extract-and-repair loop.
///
/// `verify_with`, when supplied, re-checks each extracted MUS against an
/// independent judge to set its `verified` flag; those queries do not count
/// toward `stats`.
pub fn qxr(
    oracle: &dyn Oracle,
    store: &[Fact],
    scopes: &ScopeFamily,
    policy: &RepairPolicy,
    verify_with: Option<&dyn Oracle>,
) -> Result<RepairResult, RepairError> {
    scopes.validate(store)?;
    let counted = CountingOracle::new(oracle);
    let m = scopes.len();
    let round_cap = policy.effective_round_cap(m);

    let mut current: Vec<Vec<FactId>> = scopes.scopes.clone();
    let mut alive: BTreeSet<FactId> = store.iter().map(|f| f.id).collect();
    let mut mus_family: Vec<Mus> = Vec::new();
    let mut warnings: Vec<RepairWarning> = Vec::new();
    let mut rounds = 0usize;
    let mut scope_evaluations = 0usize;
    let mut converged = false;

    loop {
        scope_evaluations += 1;
        let mut inconsistent_scopes: Vec<usize> = Vec::new();
        for (index, scope) in current.iter().enumerate() {
            if scope.is_empty() {
                continue;
            }
            if counted.query(&gather(store, scope))? == Verdict::Inconsistent {
                inconsistent_scopes.push(index);
            }
        }
        if inconsistent_scopes.is_empty() {
            converged = true;
            break;
        }
        if rounds >= round_cap {
            break;
        }
        rounds += 1;

        let mut round_conflicts: Vec<Mus> = Vec::new();
        for index in inconsistent_scopes {
            let scope = &current[index];
            let mut extracted = qx(&counted, store, scope, &[])?;
            let mut attempts = 0u32;
            while extracted.is_empty() {
                match handle_empty_extraction(
                    &counted,
                    store,
                    scope,
                    attempts,
                    policy.retry_limit,
                )? {
                    EmptyExtractionOutcome::TreatAsCons { retries_exhausted } => {
                        if retries_exhausted {
                            log::warn!(
                                "scope {index}: empty extraction after {attempts} retries; treating as consistent this round"
                            );
                            warnings.push(RepairWarning {
                                round: rounds,
                                scope: index,
                                kind: WarningKind::EmptyExtractionRetriesExhausted,
                            });
                        }
                        break;
                    }
                    EmptyExtractionOutcome::Requery => {
                        attempts += 1;
                        extracted = qx(&counted, store, scope, &[])?;
                    }
                }
            }
            if extracted.is_empty() {
                continue;
            }
            let verified = match verify_with {
                Some(judge) => verify_mus(judge, store, &extracted)?,
                None => false,
            };
            round_conflicts.push(Mus {
                fact_ids: extracted,
                source_scope: Some(index),
                verified,
            });
        }

        if !round_conflicts.is_empty() {
            let sets: Vec<BTreeSet<FactId>> = round_conflicts
                .iter()
                .map(|mus| mus.fact_ids.iter().copied().collect())
                .collect();
            let hit = greedy_hitting_set(&sets)?;
            for id in &hit {
                alive.remove(id);
            }
            for scope in current.iter_mut() {
                scope.retain(|id| !hit.contains(id));
            }
            mus_family.extend(round_conflicts);
        }
    }

    let surviving: Vec<FactId> = alive.into_iter().collect();
    let surviving_set: HashSet<FactId> = surviving.iter().copied().collect();
    let removed: Vec<FactId> =
        store.iter().map(|f| f.id).filter(|id| !surviving_set.contains(id)).collect();

    Ok(RepairResult {
        surviving,
        removed,
        mus_family,
        rounds,
        scope_evaluations,
        converged,
        stats: counted.snapshot(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factlang::enumerate_all_mus;
    use crate::fixtures;
    use crate::oracle::{NoiseParams, NoisyOracle, PerfectOracle};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn ids(raw: &[u32]) -> BTreeSet<FactId> {
        raw.iter().copied().map(FactId).collect()
    }

    #[test]
    fn greedy_prefers_the_shared_element() {
        let family = vec![ids(&[0, 1, 2]), ids(&[0, 3, 4])];
        assert_eq!(greedy_hitting_set(&family).unwrap(), ids(&[0]));
    }

    #[test]
    fn greedy_edge_cases() {
        assert_eq!(greedy_hitting_set(&[]).unwrap(), BTreeSet::new());
        let singletons = vec![ids(&[7]), ids(&[3])];
        assert_eq!(greedy_hitting_set(&singletons).unwrap(), ids(&[3, 7]));
        let unhittable = vec![ids(&[1]), BTreeSet::new()];
        assert!(matches!(
            greedy_hitting_set(&unhittable),
            Err(RepairError::UnhittableFamily)
        ));
    }

    #[test]
    fn greedy_ties_break_to_smallest_id() {
        let family = vec![ids(&[5, 9]), ids(&[5, 9]), ids(&[2, 9])];
        // 9 covers all three, 5 covers two; 9 wins outright.
        assert_eq!(greedy_hitting_set(&family).unwrap(), ids(&[9]));
        let tied = vec![ids(&[4, 6])];
        assert_eq!(greedy_hitting_set(&tied).unwrap(), ids(&[4]));
    }

    #[test]
    fn exact_matches_worked_example_and_breaks_ties_lexicographically() {
        let family = vec![ids(&[0, 1, 2]), ids(&[0, 3, 4])];
        assert_eq!(exact_hitting_set(&family).unwrap(), ids(&[0]));
        let disjoint = vec![ids(&[1]), ids(&[2]), ids(&[3])];
        assert_eq!(exact_hitting_set(&disjoint).unwrap(), ids(&[1, 2, 3]));
        // {1,3} and {1,4} and {2,3} ... minimum size 2; lexicographically
        // first is {1,3}.
        let family = vec![ids(&[1, 2]), ids(&[3, 4]), ids(&[1, 3])];
        assert_eq!(exact_hitting_set(&family).unwrap(), ids(&[1, 3]));
        assert_eq!(exact_hitting_set(&[]).unwrap(), BTreeSet::new());
    }

    #[test]
    fn minimum_hitting_set_multiplicity() {
        let overlap = vec![ids(&[0, 1, 2]), ids(&[0, 3, 4])];
        assert_eq!(minimum_hitting_set_count(&overlap).unwrap(), (1, 1));
        let pair = vec![ids(&[0, 1])];
        assert_eq!(minimum_hitting_set_count(&pair).unwrap(), (1, 2));
    }

    #[test]
    fn greedy_within_approximation_ratio_on_random_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..500 {
            let m = rng.random_range(1..=12);
            let universe = rng.random_range(4..=15u32);
            let family: Vec<BTreeSet<FactId>> = (0..m)
                .map(|_| {
                    let size = rng.random_range(1..=4.min(universe));
                    let mut set = BTreeSet::new();
                    while set.len() < size as usize {
                        set.insert(FactId(rng.random_range(0..universe)));
                    }
                    set
                })
                .collect();
            let greedy = greedy_hitting_set(&family).unwrap();
            let exact = exact_hitting_set(&family).unwrap();
            let bound = (1.0 + (m as f64).ln()) * exact.len() as f64;
            assert!(
                greedy.len() as f64 <= bound + 1e-9,
                "greedy {} vs exact {} with m={m}",
                greedy.len(),
                exact.len()
            );
            assert!(family.iter().all(|set| !set.is_disjoint(&greedy)));
        }
    }

    #[test]
    fn consistent_input_converges_in_zero_rounds() {
        let (store, _) = fixtures::negation_pair_with_distractors(8);
        let consistent: Vec<Fact> = store
            .iter()
            .filter(|f| !matches!(f.logic, crate::factlang::LogicalForm::Unary { .. }))
            .cloned()
            .enumerate()
            .map(|(i, mut f)| {
                f.id = FactId(i as u32);
                f
            })
            .collect();
        let scopes = ScopeFamily::single(consistent.len());
        let result = qxr(
            &PerfectOracle::new(),
            &consistent,
            &scopes,
            &RepairPolicy::default(),
            None,
        )
        .unwrap();
        assert_eq!(result.rounds, 0);
        assert!(result.converged);
        assert_eq!(result.surviving.len(), consistent.len());
        assert!(result.removed.is_empty());
        assert_eq!(result.stats.total_calls, 1);
        assert_eq!(result.scope_evaluations, 1);
    }

    #[test]
    fn overlapping_conflicts_resolve_by_removing_the_shared_fact() {
        let fx = fixtures::overlapping_conflicts(5);
        let scopes = ScopeFamily::single(fx.facts.len());
        let perfect = PerfectOracle::new();
        let result =
            qxr(&perfect, &fx.facts, &scopes, &RepairPolicy::default(), Some(&perfect)).unwrap();
        assert!(result.converged);
        assert_eq!(result.rounds, 1, "shared fact resolves both conflicts in one round");
        assert_eq!(result.removed, vec![fx.shared]);
        assert!(result.mus_family.iter().all(|m| m.verified));
        // Maximality: the exhaustive search cannot keep more facts.
        let best = exact_repair_size(&fx.facts, &scopes).unwrap();
        assert_eq!(result.surviving.len(), best);
    }

    #[test]
    fn single_pair_in_thirty_facts_removes_one_candidate() {
        let (store, pair) = fixtures::negation_pair_at(28, 13);
        let scopes = ScopeFamily::single(store.len());
        let perfect = PerfectOracle::new();
        let result =
            qxr(&perfect, &store, &scopes, &RepairPolicy::default(), Some(&perfect)).unwrap();
        assert!(result.converged);
        assert_eq!(result.surviving.len(), 29);
        assert_eq!(result.removed.len(), 1);
        assert!(pair.contains(&result.removed[0]));
        // Both single-removal candidates restore consistency; check ours did.
        let kept = gather(&store, &result.surviving);
        assert_eq!(ground_truth_consistent(&kept), Verdict::Consistent);
        assert!(result.practically_sound());
        // Budget.
        assert!(
            result.stats.total_calls
                <= query_budget(result.scope_evaluations, 1, result.max_mus_size(), store.len())
        );
    }

    #[test]
    fn duality_on_small_instances() {
        for seed in [3u64, 17, 40, 77] {
            let (_, store) = crate::factlang::sampler::sample_fact_set(12, seed);
            let scopes = ScopeFamily::single(store.len());
            let refs: Vec<&Fact> = store.iter().collect();
            let family = enumerate_all_mus(&refs, refs.len()).unwrap();
            let min_hit = exact_hitting_set(&family).unwrap();
            let direct = exact_repair_size(&store, &scopes).unwrap();
            assert_eq!(direct, store.len() - min_hit.len(), "seed {seed}");
        }
    }

    #[test]
    fn empty_extraction_policy_steps() {
        let (store, _) = fixtures::negation_pair_with_distractors(4);
        let scope: Vec<FactId> = store.iter().map(|f| f.id).collect();
        let perfect = PerfectOracle::new();
        // Perfect oracle still judges the scope inconsistent: ask again.
        assert_eq!(
            handle_empty_extraction(&perfect, &store, &scope, 0, 3).unwrap(),
            EmptyExtractionOutcome::Requery
        );
        // Retry budget spent.
        assert_eq!(
            handle_empty_extraction(&perfect, &store, &scope, 3, 3).unwrap(),
            EmptyExtractionOutcome::TreatAsCons { retries_exhausted: true }
        );
        // Scope judged consistent on the re-query.
        let consistent_scope: Vec<FactId> =
            scope.iter().copied().filter(|id| id.0 >= 2).collect();
        assert_eq!(
            handle_empty_extraction(&perfect, &store, &consistent_scope, 0, 3).unwrap(),
            EmptyExtractionOutcome::TreatAsCons { retries_exhausted: false }
        );
    }

    /// Oracle that flips the verdicts of chosen call indices.
    struct FaultAt<O> {
        inner: O,
        flips: Vec<u64>,
        counter: std::sync::atomic::AtomicU64,
    }

    impl<O: Oracle> Oracle for FaultAt<O> {
        fn query_with_background(
            &self,
            background: &[&Fact],
            subset: &[&Fact],
        ) -> Result<Verdict, OracleError> {
            let v = self.inner.query_with_background(background, subset)?;
            let index = self.counter.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
            Ok(if self.flips.contains(&index) { v.flipped() } else { v })
        }
    }

    #[test]
    fn flipped_scope_verdict_recovers_via_requery() {
        // Consistent store; call 0 (the scope check) lies "inconsistent",
        // qx's root query then sees consistent and extracts nothing, and the
        // re-query clears the scope.
        let (store, _) = fixtures::negation_pair_with_distractors(6);
        let consistent: Vec<Fact> = store[2..]
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, mut f)| {
                f.id = FactId(i as u32);
                f
            })
            .collect();
        let oracle = FaultAt {
            inner: PerfectOracle::new(),
            flips: vec![0],
            counter: std::sync::atomic::AtomicU64::new(0),
        };
        let scopes = ScopeFamily::single(consistent.len());
        let result = qxr(&oracle, &consistent, &scopes, &RepairPolicy::default(), None).unwrap();
        assert!(result.converged);
        assert!(result.removed.is_empty());
        assert!(result.warnings.is_empty());
        assert_eq!(result.rounds, 1);
    }

    #[test]
    fn exhausted_retries_warn_and_terminate() {
        // On a consistent scope the loop alternates scope-verdict and
        // extraction-root queries on the same subset. An oracle answering
        // incons/cons in alternation makes every verdict check flag the scope
        // and every extraction come back empty, so the retry budget drains.
        struct AlternatingOracle {
            counter: std::sync::atomic::AtomicU64,
        }
        impl Oracle for AlternatingOracle {
            fn query_with_background(
                &self,
                _background: &[&Fact],
                _subset: &[&Fact],
            ) -> Result<Verdict, OracleError> {
                let index = self.counter.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                Ok(if index % 2 == 0 { Verdict::Inconsistent } else { Verdict::Consistent })
            }
        }
        let (store, _) = fixtures::negation_pair_with_distractors(6);
        let consistent: Vec<Fact> = store[2..]
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, mut f)| {
                f.id = FactId(i as u32);
                f
            })
            .collect();
        let scopes = ScopeFamily::single(consistent.len());
        let policy = RepairPolicy { round_cap: Some(2), retry_limit: 3 };
        let oracle = AlternatingOracle { counter: std::sync::atomic::AtomicU64::new(0) };
        let result = qxr(&oracle, &consistent, &scopes, &policy, None).unwrap();
        assert!(!result.converged, "the flapping scope never clears");
        assert!(result
            .warnings
            .iter()
            .any(|w| w.kind == WarningKind::EmptyExtractionRetriesExhausted));
        assert!(result.removed.is_empty());
    }

    #[test]
    fn noisy_runs_remain_practically_sound() {
        for seed in 0..30u64 {
            let fx = fixtures::overlapping_conflicts(10);
            let noisy = NoisyOracle::new(
                PerfectOracle::new(),
                NoiseParams::new(0.1, 0.1, seed).unwrap(),
            );
            let scopes = ScopeFamily::single(fx.facts.len());
            let result =
                qxr(&noisy, &fx.facts, &scopes, &RepairPolicy::default(), None).unwrap();
            assert!(result.practically_sound(), "seed {seed}");
            let parts: BTreeSet<FactId> = result
                .surviving
                .iter()
                .chain(result.removed.iter())
                .copied()
                .collect();
            assert_eq!(parts.len(), fx.facts.len(), "surviving/removed partition the facts");
        }
    }
}
