//! Consistency semantics.
//!
//! [`ground_truth_consistent`] is the rule-based checker used as the perfect
//! oracle: it is total, deterministic, and monotone (adding facts never turns
//! an inconsistent set consistent). [`brute_force_consistent`] decides the
//! same constraints by enumerating truth assignments and serves as an
//! independent cross-check at small atom counts. [`enumerate_all_mus`] is the
//! exhaustive reference for minimal unsatisfiable subsets.

use super::{
    BoundKind, EntityId, Fact, FactId, LogicalForm, Polarity, UnaryAtom, UnaryPred, Verdict,
};
use itertools::Itertools;
use std::collections::{BTreeSet, HashMap, HashSet};
use thiserror::Error;

/// Maximum number of boolean atoms the brute-force checker enumerates over.
pub const DEFAULT_ATOM_BUDGET: usize = 22;
/// MUS enumeration cap: full enumeration needs `|S| <= 16` …
pub const MUS_ENUM_MAX_FACTS: usize = 16;
/// … unless the requested MUS size cap is at most this.
pub const MUS_ENUM_SMALL_K: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BudgetError {
    #[error("{atoms} distinct atoms exceed the brute-force budget of {budget}")]
    AtomsExceeded { atoms: usize, budget: usize },
    #[error("MUS enumeration over {n_facts} facts with size cap {k_max} exceeds the search budget")]
    SubsetsExceeded { n_facts: usize, k_max: usize },
}

/// Directed-graph cycle check over precedence edges (Kahn's algorithm).
fn has_cycle(edges: &[(EntityId, EntityId)]) -> bool {
    let mut succ: HashMap<EntityId, Vec<EntityId>> = HashMap::new();
    let mut indeg: HashMap<EntityId, usize> = HashMap::new();
    for &(a, b) in edges {
        succ.entry(a).or_default().push(b);
        indeg.entry(a).or_default();
        *indeg.entry(b).or_default() += 1;
    }
    let mut queue: Vec<EntityId> =
        indeg.iter().filter(|(_, &d)| d == 0).map(|(&e, _)| e).collect();
    let mut visited = 0usize;
    while let Some(e) = queue.pop() {
        visited += 1;
        if let Some(next) = succ.get(&e) {
            for &b in next {
                let d = indeg.get_mut(&b).expect("edge endpoint has an in-degree entry");
                *d -= 1;
                if *d == 0 {
                    queue.push(b);
                }
            }
        }
    }
    visited < indeg.len()
}

/// Literal assertions and structural constraints collected from a fact set.
#[derive(Default)]
struct Collected {
    pos_unary: HashSet<UnaryAtom>,
    neg_unary: HashSet<UnaryAtom>,
    pos_binary: HashSet<(super::BinaryRel, EntityId, EntityId)>,
    neg_binary: HashSet<(super::BinaryRel, EntityId, EntityId)>,
    before: Vec<(EntityId, EntityId)>,
    rules: Vec<[UnaryAtom; 3]>,
    at_least: HashMap<EntityId, u32>,
    at_most: HashMap<EntityId, u32>,
}

fn collect<'a>(facts: impl IntoIterator<Item = &'a Fact>) -> Collected {
    let mut c = Collected::default();
    for fact in facts {
        match &fact.logic {
            LogicalForm::Unary { pred, entity, polarity } => {
                let atom = UnaryAtom { pred: *pred, entity: *entity };
                match polarity {
                    Polarity::Positive => c.pos_unary.insert(atom),
                    Polarity::Negative => c.neg_unary.insert(atom),
                };
            }
            LogicalForm::AssertAtom { atom, polarity } => {
                match polarity {
                    Polarity::Positive => c.pos_unary.insert(*atom),
                    Polarity::Negative => c.neg_unary.insert(*atom),
                };
            }
            LogicalForm::Binary { rel, subject, object, polarity } => {
                let key = (*rel, *subject, *object);
                match polarity {
                    Polarity::Positive => c.pos_binary.insert(key),
                    Polarity::Negative => c.neg_binary.insert(key),
                };
            }
            LogicalForm::Before { earlier, later } => c.before.push((*earlier, *later)),
            LogicalForm::ExactlyOne { atoms } => c.rules.push(*atoms),
            LogicalForm::NumericBound { entity, kind, value } => match kind {
                BoundKind::AtLeast => {
                    let lo = c.at_least.entry(*entity).or_insert(*value);
                    *lo = (*lo).max(*value);
                }
                BoundKind::AtMost => {
                    let hi = c.at_most.entry(*entity).or_insert(*value);
                    *hi = (*hi).min(*value);
                }
            },
        }
    }
    c
}

/// Taxonomy closure: `IsTiger(x)` and `IsDog(x)` each imply `IsAnimal(x)`.
fn taxonomy_implies(pred: UnaryPred) -> Option<UnaryPred> {
    match pred {
        UnaryPred::IsTiger | UnaryPred::IsDog => Some(UnaryPred::IsAnimal),
        _ => None,
    }
}

/// The ground truth consistency function.
///
/// A set is consistent iff it violates none of:
/// 1. no literal both asserted and denied, after taxonomy closure of the
///    positive unary literals;
/// 2. the precedence graph over `Before` facts is acyclic;
/// 3. no exactly-one rule has two or more of its atoms asserted positively,
///    or all three asserted negatively (unasserted atoms are unconstrained);
/// 4. per entity, the largest lower case-count bound does not exceed the
///    smallest upper bound.
pub fn ground_truth_consistent(facts: &[&Fact]) -> Verdict {
    let c = collect(facts.iter().copied());

    // Rule 1, with closure feeding the positive side.
    let mut closed_pos = c.pos_unary.clone();
    for atom in &c.pos_unary {
        if let Some(implied) = taxonomy_implies(atom.pred) {
            closed_pos.insert(UnaryAtom { pred: implied, entity: atom.entity });
        }
    }
    if closed_pos.iter().any(|a| c.neg_unary.contains(a)) {
        return Verdict::Inconsistent;
    }
    if c.pos_binary.iter().any(|k| c.neg_binary.contains(k)) {
        return Verdict::Inconsistent;
    }

    // Rule 2.
    if has_cycle(&c.before) {
        return Verdict::Inconsistent;
    }

    // Rule 3: only direct assertions count, not closure consequences.
    for rule in &c.rules {
        let positives = rule.iter().filter(|a| c.pos_unary.contains(a)).count();
        let negatives = rule.iter().filter(|a| c.neg_unary.contains(a)).count();
        if positives >= 2 || negatives == 3 {
            return Verdict::Inconsistent;
        }
    }

    // Rule 4.
    for (entity, lo) in &c.at_least {
        if let Some(hi) = c.at_most.get(entity) {
            if lo > hi {
                return Verdict::Inconsistent;
            }
        }
    }

    Verdict::Consistent
}

/// Boolean atom universe of a fact set, for model enumeration.
struct AtomUniverse {
    unary: Vec<UnaryAtom>,
    binary: Vec<(super::BinaryRel, EntityId, EntityId)>,
}

impl AtomUniverse {
    fn build<'a>(facts: impl IntoIterator<Item = &'a Fact>) -> AtomUniverse {
        let mut unary: BTreeSet<UnaryAtom> = BTreeSet::new();
        let mut binary: BTreeSet<(super::BinaryRel, EntityId, EntityId)> = BTreeSet::new();
        for fact in facts {
            match &fact.logic {
                LogicalForm::Unary { pred, entity, .. } => {
                    unary.insert(UnaryAtom { pred: *pred, entity: *entity });
                }
                LogicalForm::AssertAtom { atom, .. } => {
                    unary.insert(*atom);
                }
                LogicalForm::ExactlyOne { atoms } => {
                    unary.extend(atoms.iter().copied());
                }
                LogicalForm::Binary { rel, subject, object, .. } => {
                    binary.insert((*rel, *subject, *object));
                }
                LogicalForm::Before { .. } | LogicalForm::NumericBound { .. } => {}
            }
        }
        AtomUniverse { unary: unary.into_iter().collect(), binary: binary.into_iter().collect() }
    }

    fn len(&self) -> usize {
        self.unary.len() + self.binary.len()
    }

    fn unary_index(&self, atom: &UnaryAtom) -> usize {
        self.unary.binary_search(atom).expect("atom is in the universe")
    }

    fn binary_index(&self, key: &(super::BinaryRel, EntityId, EntityId)) -> usize {
        self.unary.len() + self.binary.binary_search(key).expect("atom is in the universe")
    }
}

/// Independent consistency decision by exhaustive model search.
///
/// Enumerates all truth assignments over the distinct atoms plus feasibility
/// of the precedence edges and the numeric bounds; the set is consistent iff
/// some model satisfies every fact, every exactly-one rule, and the taxonomy
/// implications. Errors when the atom count exceeds `atom_budget`.
pub fn brute_force_consistent(
    facts: &[&Fact],
    atom_budget: usize,
) -> Result<Verdict, BudgetError> {
    let universe = AtomUniverse::build(facts.iter().copied());
    let n = universe.len();
    if n > atom_budget.min(63) {
        return Err(BudgetError::AtomsExceeded { atoms: n, budget: atom_budget.min(63) });
    }

    let c = collect(facts.iter().copied());

    // Precedence and numeric feasibility are independent of the boolean atoms.
    if has_cycle(&c.before) {
        return Ok(Verdict::Inconsistent);
    }
    for (entity, lo) in &c.at_least {
        if let Some(hi) = c.at_most.get(entity) {
            if lo > hi {
                return Ok(Verdict::Inconsistent);
            }
        }
    }

    // Compile boolean constraints to masks over atom indices.
    let mut pos_mask: u64 = 0;
    let mut neg_mask: u64 = 0;
    for atom in &c.pos_unary {
        pos_mask |= 1 << universe.unary_index(atom);
    }
    for atom in &c.neg_unary {
        neg_mask |= 1 << universe.unary_index(atom);
    }
    for key in &c.pos_binary {
        pos_mask |= 1 << universe.binary_index(key);
    }
    for key in &c.neg_binary {
        neg_mask |= 1 << universe.binary_index(key);
    }
    let rule_masks: Vec<u64> = c
        .rules
        .iter()
        .map(|atoms| atoms.iter().fold(0u64, |m, a| m | 1 << universe.unary_index(a)))
        .collect();
    // Taxonomy implications between atoms that are both in play.
    let mut implications: Vec<(usize, usize)> = Vec::new();
    for (i, atom) in universe.unary.iter().enumerate() {
        if let Some(implied) = taxonomy_implies(atom.pred) {
            let target = UnaryAtom { pred: implied, entity: atom.entity };
            if let Ok(j) = universe.unary.binary_search(&target) {
                implications.push((i, j));
            }
        }
    }

    for model in 0u64..(1u64 << n) {
        if model & pos_mask != pos_mask || model & neg_mask != 0 {
            continue;
        }
        if implications.iter().any(|&(a, b)| model >> a & 1 == 1 && model >> b & 1 == 0) {
            continue;
        }
        if rule_masks.iter().any(|mask| (model & mask).count_ones() != 1) {
            continue;
        }
        return Ok(Verdict::Consistent);
    }
    Ok(Verdict::Inconsistent)
}

/// Exhaustive MUS enumeration over `ground_truth_consistent`, parameterized
/// only by the consistency function so the verification command can inject a
/// different judge.
pub fn enumerate_all_mus_with<F>(
    facts: &[&Fact],
    k_max: usize,
    mut consistent: F,
) -> Result<Vec<BTreeSet<FactId>>, BudgetError>
where
    F: FnMut(&[&Fact]) -> Verdict,
{
    let n = facts.len();
    let k_max = k_max.min(n);
    if n > MUS_ENUM_MAX_FACTS && k_max > MUS_ENUM_SMALL_K {
        return Err(BudgetError::SubsetsExceeded { n_facts: n, k_max });
    }

    let mut found: Vec<BTreeSet<FactId>> = Vec::new();
    let mut scratch: Vec<&Fact> = Vec::with_capacity(k_max);
    for size in 1..=k_max {
        for combo in (0..n).combinations(size) {
            let ids: BTreeSet<FactId> = combo.iter().map(|&i| facts[i].id).collect();
            // Any strictly smaller MUS inside `ids` disqualifies it; by
            // monotonicity this is equivalent to checking all proper subsets.
            if found.iter().any(|mus| mus.is_subset(&ids)) {
                continue;
            }
            scratch.clear();
            scratch.extend(combo.iter().map(|&i| facts[i]));
            if consistent(&scratch) == Verdict::Inconsistent {
                found.push(ids);
            }
        }
    }
    Ok(found)
}

/// All minimal unsatisfiable subsets of `facts` with size at most `k_max`.
pub fn enumerate_all_mus(
    facts: &[&Fact],
    k_max: usize,
) -> Result<Vec<BTreeSet<FactId>>, BudgetError> {
    enumerate_all_mus_with(facts, k_max, ground_truth_consistent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factlang::sampler::sample_fact_set;
    use crate::factlang::{gather, BinaryRel, Entity, EntityKind};
    use proptest::prelude::*;

    fn ent(name: &str, kind: EntityKind) -> Entity {
        Entity { name: name.into(), kind }
    }

    fn fact(id: u32, logic: LogicalForm, entities: &[Entity]) -> Fact {
        Fact::new(FactId(id), logic, entities).unwrap()
    }

    fn refs(facts: &[Fact]) -> Vec<&Fact> {
        facts.iter().collect()
    }

    fn temporal_cycle() -> (Vec<Entity>, Vec<Fact>) {
        let entities = vec![
            ent("Summit", EntityKind::Event),
            ent("Election", EntityKind::Event),
            ent("Festival", EntityKind::Event),
        ];
        let facts = vec![
            fact(0, LogicalForm::Before { earlier: EntityId(0), later: EntityId(1) }, &entities),
            fact(1, LogicalForm::Before { earlier: EntityId(1), later: EntityId(2) }, &entities),
            fact(2, LogicalForm::Before { earlier: EntityId(2), later: EntityId(0) }, &entities),
        ];
        (entities, facts)
    }

    #[test]
    fn empty_and_singleton_are_consistent() {
        assert_eq!(ground_truth_consistent(&[]), Verdict::Consistent);
        let entities = vec![ent("Rex", EntityKind::Animal)];
        let f = fact(
            0,
            LogicalForm::Unary {
                pred: UnaryPred::IsTiger,
                entity: EntityId(0),
                polarity: Polarity::Positive,
            },
            &entities,
        );
        assert_eq!(ground_truth_consistent(&[&f]), Verdict::Consistent);
    }

    #[test]
    fn size_three_temporal_cycle_is_inconsistent() {
        let (_, facts) = temporal_cycle();
        assert_eq!(ground_truth_consistent(&refs(&facts)), Verdict::Inconsistent);
        // Every proper subset is acyclic.
        for drop in 0..3 {
            let subset: Vec<&Fact> =
                facts.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, f)| f).collect();
            assert_eq!(ground_truth_consistent(&subset), Verdict::Consistent);
        }
    }

    #[test]
    fn empty_numeric_interval_is_inconsistent() {
        let entities = vec![ent("Springfield", EntityKind::Loc)];
        let facts = vec![
            fact(
                0,
                LogicalForm::NumericBound {
                    entity: EntityId(0),
                    kind: BoundKind::AtLeast,
                    value: 100,
                },
                &entities,
            ),
            fact(
                1,
                LogicalForm::NumericBound {
                    entity: EntityId(0),
                    kind: BoundKind::AtMost,
                    value: 50,
                },
                &entities,
            ),
        ];
        assert_eq!(ground_truth_consistent(&refs(&facts)), Verdict::Inconsistent);
    }

    #[test]
    fn exactly_one_parity_conflict() {
        let entities = vec![
            ent("Rex", EntityKind::Animal),
            ent("Ann", EntityKind::Person),
            ent("Mona", EntityKind::Person),
        ];
        let atoms = [
            UnaryAtom { pred: UnaryPred::IsTiger, entity: EntityId(0) },
            UnaryAtom { pred: UnaryPred::IsActor, entity: EntityId(1) },
            UnaryAtom { pred: UnaryPred::IsPolitician, entity: EntityId(2) },
        ];
        let rule = fact(0, LogicalForm::ExactlyOne { atoms }, &entities);
        let x = fact(
            1,
            LogicalForm::AssertAtom { atom: atoms[0], polarity: Polarity::Positive },
            &entities,
        );
        let y = fact(
            2,
            LogicalForm::AssertAtom { atom: atoms[1], polarity: Polarity::Positive },
            &entities,
        );
        assert_eq!(ground_truth_consistent(&[&rule, &x, &y]), Verdict::Inconsistent);
        assert_eq!(ground_truth_consistent(&[&rule, &x]), Verdict::Consistent);
        assert_eq!(ground_truth_consistent(&[&x, &y]), Verdict::Consistent);

        // All three atoms denied also violates the rule.
        let denials: Vec<Fact> = atoms
            .iter()
            .enumerate()
            .map(|(i, atom)| {
                fact(
                    i as u32 + 1,
                    LogicalForm::AssertAtom { atom: *atom, polarity: Polarity::Negative },
                    &entities,
                )
            })
            .collect();
        let mut set = vec![&rule];
        set.extend(denials.iter());
        assert_eq!(ground_truth_consistent(&set), Verdict::Inconsistent);
        assert_eq!(ground_truth_consistent(&set[..3]), Verdict::Consistent);
    }

    #[test]
    fn taxonomy_closure_feeds_contradictions() {
        let entities = vec![ent("Rex", EntityKind::Animal)];
        let tiger = fact(
            0,
            LogicalForm::Unary {
                pred: UnaryPred::IsTiger,
                entity: EntityId(0),
                polarity: Polarity::Positive,
            },
            &entities,
        );
        let not_animal = fact(
            1,
            LogicalForm::Unary {
                pred: UnaryPred::IsAnimal,
                entity: EntityId(0),
                polarity: Polarity::Negative,
            },
            &entities,
        );
        assert_eq!(ground_truth_consistent(&[&tiger, &not_animal]), Verdict::Inconsistent);
        assert_eq!(ground_truth_consistent(&[&tiger]), Verdict::Consistent);
        assert_eq!(ground_truth_consistent(&[&not_animal]), Verdict::Consistent);
        // Distinct unary categories are not mutually exclusive.
        let dog = fact(
            2,
            LogicalForm::Unary {
                pred: UnaryPred::IsDog,
                entity: EntityId(0),
                polarity: Polarity::Positive,
            },
            &entities,
        );
        assert_eq!(ground_truth_consistent(&[&tiger, &dog]), Verdict::Consistent);
    }

    #[test]
    fn brute_force_direct_contradiction() {
        let entities = vec![ent("Ann", EntityKind::Person)];
        let pos = fact(
            0,
            LogicalForm::Unary {
                pred: UnaryPred::IsActor,
                entity: EntityId(0),
                polarity: Polarity::Positive,
            },
            &entities,
        );
        let neg = fact(
            1,
            LogicalForm::Unary {
                pred: UnaryPred::IsActor,
                entity: EntityId(0),
                polarity: Polarity::Negative,
            },
            &entities,
        );
        assert_eq!(brute_force_consistent(&[&pos, &neg], 22).unwrap(), Verdict::Inconsistent);
        assert_eq!(brute_force_consistent(&[&pos], 22).unwrap(), Verdict::Consistent);
    }

    #[test]
    fn brute_force_budget_error() {
        let entities: Vec<Entity> = (0..30)
            .map(|i| ent(&format!("P{i}"), EntityKind::Person))
            .collect();
        let facts: Vec<Fact> = (0..30)
            .map(|i| {
                fact(
                    i,
                    LogicalForm::Unary {
                        pred: UnaryPred::IsActor,
                        entity: EntityId(i),
                        polarity: Polarity::Positive,
                    },
                    &entities,
                )
            })
            .collect();
        let err = brute_force_consistent(&refs(&facts), 22).unwrap_err();
        assert!(matches!(err, BudgetError::AtomsExceeded { atoms: 30, budget: 22 }));
    }

    #[test]
    fn xor_style_triples_pairwise_consistent_jointly_inconsistent() {
        // Temporal encoding.
        let (_, cycle) = temporal_cycle();
        assert_eq!(brute_force_consistent(&refs(&cycle), 22).unwrap(), Verdict::Inconsistent);
        for pair in (0..3).combinations(2) {
            let subset: Vec<&Fact> = pair.iter().map(|&i| &cycle[i]).collect();
            assert_eq!(brute_force_consistent(&subset, 22).unwrap(), Verdict::Consistent);
        }
        // Parity encoding: rule plus two positive assertions.
        let entities = vec![
            ent("Rex", EntityKind::Animal),
            ent("Ann", EntityKind::Person),
            ent("Mona", EntityKind::Person),
        ];
        let atoms = [
            UnaryAtom { pred: UnaryPred::IsTiger, entity: EntityId(0) },
            UnaryAtom { pred: UnaryPred::IsActor, entity: EntityId(1) },
            UnaryAtom { pred: UnaryPred::IsPolitician, entity: EntityId(2) },
        ];
        let triple = vec![
            fact(0, LogicalForm::ExactlyOne { atoms }, &entities),
            fact(
                1,
                LogicalForm::AssertAtom { atom: atoms[0], polarity: Polarity::Positive },
                &entities,
            ),
            fact(
                2,
                LogicalForm::AssertAtom { atom: atoms[1], polarity: Polarity::Positive },
                &entities,
            ),
        ];
        assert_eq!(brute_force_consistent(&refs(&triple), 22).unwrap(), Verdict::Inconsistent);
        for pair in (0..3).combinations(2) {
            let subset: Vec<&Fact> = pair.iter().map(|&i| &triple[i]).collect();
            assert_eq!(brute_force_consistent(&subset, 22).unwrap(), Verdict::Consistent);
        }
    }

    #[test]
    fn oracles_agree_on_seeded_samples() {
        let mut checked = 0;
        for seed in 0..1000u64 {
            let (_, facts) = sample_fact_set(12, seed);
            let fact_refs = refs(&facts);
            let ground = ground_truth_consistent(&fact_refs);
            let brute = brute_force_consistent(&fact_refs, DEFAULT_ATOM_BUDGET)
                .expect("sampler keeps sets within the atom budget");
            assert_eq!(ground, brute, "disagreement at seed {seed}");
            checked += 1;
        }
        assert_eq!(checked, 1000);
    }

    #[test]
    fn enumerate_finds_exactly_the_planted_pair() {
        let mut entities = vec![ent("Rex", EntityKind::Animal)];
        let mut facts = vec![
            fact(
                0,
                LogicalForm::Unary {
                    pred: UnaryPred::IsTiger,
                    entity: EntityId(0),
                    polarity: Polarity::Positive,
                },
                &entities,
            ),
            fact(
                1,
                LogicalForm::Unary {
                    pred: UnaryPred::IsTiger,
                    entity: EntityId(0),
                    polarity: Polarity::Negative,
                },
                &entities,
            ),
        ];
        // Eight consistent distractors on fresh entities.
        for i in 0..8u32 {
            let person = EntityId(entities.len() as u32);
            entities.push(ent(&format!("P{i}"), EntityKind::Person));
            let org = EntityId(entities.len() as u32);
            entities.push(ent(&format!("O{i}"), EntityKind::Org));
            facts.push(fact(
                2 + i,
                LogicalForm::Binary {
                    rel: BinaryRel::WorksFor,
                    subject: person,
                    object: org,
                    polarity: Polarity::Positive,
                },
                &entities,
            ));
        }
        let all = refs(&facts);
        let family = enumerate_all_mus(&all, all.len()).unwrap();
        assert_eq!(family, vec![BTreeSet::from([FactId(0), FactId(1)])]);

        // A consistent set has no MUS.
        let consistent = &all[2..];
        assert!(enumerate_all_mus(consistent, consistent.len()).unwrap().is_empty());
    }

    #[test]
    fn enumerate_finds_whole_xor_triple() {
        let (_, cycle) = temporal_cycle();
        let family = enumerate_all_mus(&refs(&cycle), 3).unwrap();
        assert_eq!(family, vec![BTreeSet::from([FactId(0), FactId(1), FactId(2)])]);
    }

    #[test]
    fn enumerate_budget_error() {
        let entities: Vec<Entity> =
            (0..20).map(|i| ent(&format!("P{i}"), EntityKind::Person)).collect();
        let facts: Vec<Fact> = (0..20)
            .map(|i| {
                fact(
                    i,
                    LogicalForm::Unary {
                        pred: UnaryPred::IsActor,
                        entity: EntityId(i),
                        polarity: Polarity::Positive,
                    },
                    &entities,
                )
            })
            .collect();
        assert!(enumerate_all_mus(&refs(&facts), 20).is_err());
        // Small size cap keeps large sets tractable.
        assert!(enumerate_all_mus(&refs(&facts), 4).unwrap().is_empty());
    }

    #[test]
    fn gather_maps_ids_to_facts() {
        let (_, facts) = temporal_cycle();
        let picked = gather(&facts, &[FactId(2), FactId(0)]);
        assert_eq!(picked[0].id, FactId(2));
        assert_eq!(picked[1].id, FactId(0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        /// Adding a fact never repairs an inconsistent set.
        #[test]
        fn monotone_under_additions(seed in 0u64..1_000_000, n in 4usize..12) {
            let (_, facts) = sample_fact_set(n, seed);
            let all = refs(&facts);
            if ground_truth_consistent(&all[..n - 1]) == Verdict::Inconsistent {
                prop_assert_eq!(ground_truth_consistent(&all), Verdict::Inconsistent);
            }
        }

        /// Every inconsistent set contains a MUS.
        #[test]
        fn inconsistent_sets_contain_a_mus(seed in 0u64..1_000_000, n in 4usize..12) {
            let (_, facts) = sample_fact_set(n, seed);
            let all = refs(&facts);
            if ground_truth_consistent(&all) == Verdict::Inconsistent {
                let family = enumerate_all_mus(&all, n).unwrap();
                prop_assert!(!family.is_empty());
            }
        }

        /// The two consistency routes agree on sampled sets.
        #[test]
        fn routes_agree(seed in 0u64..1_000_000, n in 4usize..14) {
            let (_, facts) = sample_fact_set(n, seed);
            let all = refs(&facts);
            let ground = ground_truth_consistent(&all);
            let brute = brute_force_consistent(&all, DEFAULT_ATOM_BUDGET).unwrap();
            prop_assert_eq!(ground, brute);
        }

        /// Texts coincide exactly when semantic keys coincide.
        #[test]
        fn rendering_injective_up_to_semantics(seed in 0u64..1_000_000, n in 4usize..12) {
            let (_, facts) = sample_fact_set(n, seed);
            for a in &facts {
                for b in &facts {
                    let same_key = a.logic.semantic_key() == b.logic.semantic_key();
                    prop_assert_eq!(a.text == b.text, same_key);
                }
            }
        }
    }
}
