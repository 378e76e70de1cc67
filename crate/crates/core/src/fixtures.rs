//! Reference constructions: canonical conflict shapes with known MUS
//! families, used by the test suites and the `verify` command.

use crate::factlang::{
    BinaryRel, Entity, EntityId, EntityKind, Fact, FactId, LogicalForm, Polarity, UnaryAtom,
    UnaryPred,
};

/// Incremental builder for hand-laid fact sets with dense ids.
#[derive(Default)]
pub struct FactSetBuilder {
    entities: Vec<Entity>,
    forms: Vec<LogicalForm>,
}

impl FactSetBuilder {
    pub fn new() -> FactSetBuilder {
        FactSetBuilder::default()
    }

    pub fn entity(&mut self, name: &str, kind: EntityKind) -> EntityId {
        debug_assert!(
            self.entities.iter().all(|e| e.name != name),
            "entity names must be unique per instance"
        );
        let id = EntityId(self.entities.len() as u32);
        self.entities.push(Entity { name: name.to_string(), kind });
        id
    }

    /// Queue a fact; its id is its final position.
    pub fn fact(&mut self, logic: LogicalForm) -> FactId {
        let id = FactId(self.forms.len() as u32);
        self.forms.push(logic);
        id
    }

    pub fn build(self) -> (Vec<Fact>, Vec<Entity>) {
        let facts = self
            .forms
            .into_iter()
            .enumerate()
            .map(|(i, logic)| {
                Fact::new(FactId(i as u32), logic, &self.entities)
                    .expect("builder only references entities it created")
            })
            .collect();
        (facts, self.entities)
    }
}

/// A consistent workplace distractor on fresh entities.
fn push_distractor(builder: &mut FactSetBuilder, index: usize) -> FactId {
    let person = builder.entity(&format!("Worker {index}"), EntityKind::Person);
    let org = builder.entity(&format!("Office {index}"), EntityKind::Org);
    builder.fact(LogicalForm::Binary {
        rel: BinaryRel::WorksFor,
        subject: person,
        object: org,
        polarity: Polarity::Positive,
    })
}

/// Three pairwise-consistent, jointly inconsistent facts: a precedence cycle.
pub fn xor_triple_temporal() -> (Vec<Fact>, Vec<Entity>) {
    let mut b = FactSetBuilder::new();
    let summit = b.entity("Summit", EntityKind::Event);
    let election = b.entity("Election", EntityKind::Event);
    let festival = b.entity("Festival", EntityKind::Event);
    b.fact(LogicalForm::Before { earlier: summit, later: election });
    b.fact(LogicalForm::Before { earlier: election, later: festival });
    b.fact(LogicalForm::Before { earlier: festival, later: summit });
    b.build()
}

/// Three pairwise-consistent, jointly inconsistent facts: an exactly-one rule
/// plus positive assertions of two of its atoms.
pub fn xor_triple_parity() -> (Vec<Fact>, Vec<Entity>) {
    let mut b = FactSetBuilder::new();
    let rex = b.entity("Rex", EntityKind::Animal);
    let ann = b.entity("Ann", EntityKind::Person);
    let mona = b.entity("Mona", EntityKind::Person);
    let atoms = [
        UnaryAtom { pred: UnaryPred::IsTiger, entity: rex },
        UnaryAtom { pred: UnaryPred::IsActor, entity: ann },
        UnaryAtom { pred: UnaryPred::IsPolitician, entity: mona },
    ];
    b.fact(LogicalForm::ExactlyOne { atoms });
    b.fact(LogicalForm::AssertAtom { atom: atoms[0], polarity: Polarity::Positive });
    b.fact(LogicalForm::AssertAtom { atom: atoms[1], polarity: Polarity::Positive });
    b.build()
}

/// A direct contradiction pair inserted at `position` among consistent
/// distractors. Returns the facts and the ids of the pair.
pub fn negation_pair_at(n_distractors: usize, position: usize) -> (Vec<Fact>, [FactId; 2]) {
    let position = position.min(n_distractors);
    let mut b = FactSetBuilder::new();
    let rex = b.entity("Rex", EntityKind::Animal);
    let mut pair = [FactId(0); 2];
    let mut placed = 0usize;
    for slot in 0..n_distractors + 1 {
        if slot == position {
            pair[0] = b.fact(LogicalForm::Unary {
                pred: UnaryPred::IsTiger,
                entity: rex,
                polarity: Polarity::Positive,
            });
            pair[1] = b.fact(LogicalForm::Unary {
                pred: UnaryPred::IsTiger,
                entity: rex,
                polarity: Polarity::Negative,
            });
        } else {
            push_distractor(&mut b, placed);
            placed += 1;
        }
    }
    let (facts, _) = b.build();
    (facts, pair)
}

/// [`negation_pair_at`] with the pair roughly in the middle.
pub fn negation_pair_with_distractors(n_distractors: usize) -> (Vec<Fact>, [FactId; 2]) {
    negation_pair_at(n_distractors, n_distractors / 2)
}

/// Two overlapping conflicts shaped `{a,b,c}` and `{a,d,e}` with `a` the
/// shared, smallest-id fact — their unique minimum hitting set is `{a}`.
pub struct OverlapFixture {
    pub facts: Vec<Fact>,
    pub entities: Vec<Entity>,
    pub mus_a: [FactId; 3],
    pub mus_b: [FactId; 3],
    pub shared: FactId,
}

pub fn overlapping_conflicts(n_distractors: usize) -> OverlapFixture {
    let mut b = FactSetBuilder::new();
    let shared_entity = b.entity("Noah", EntityKind::Person);
    let y_entity = b.entity("Mona", EntityKind::Person);
    let z_entity = b.entity("Lucas", EntityKind::Person);
    let p_entity = b.entity("Priya", EntityKind::Person);
    let q_entity = b.entity("Omar", EntityKind::Person);

    let x = UnaryAtom { pred: UnaryPred::IsActor, entity: shared_entity };
    let y = UnaryAtom { pred: UnaryPred::IsPolitician, entity: y_entity };
    let z = UnaryAtom { pred: UnaryPred::IsActor, entity: z_entity };
    let p = UnaryAtom { pred: UnaryPred::IsPolitician, entity: p_entity };
    let q = UnaryAtom { pred: UnaryPred::IsActor, entity: q_entity };

    let a = b.fact(LogicalForm::AssertAtom { atom: x, polarity: Polarity::Positive });
    let rule_one = b.fact(LogicalForm::ExactlyOne { atoms: [x, y, z] });
    let assert_y = b.fact(LogicalForm::AssertAtom { atom: y, polarity: Polarity::Positive });
    let rule_two = b.fact(LogicalForm::ExactlyOne { atoms: [x, p, q] });
    let assert_p = b.fact(LogicalForm::AssertAtom { atom: p, polarity: Polarity::Positive });
    for i in 0..n_distractors {
        push_distractor(&mut b, i);
    }
    let (facts, entities) = b.build();
    OverlapFixture {
        facts,
        entities,
        mus_a: [a, rule_one, assert_y],
        mus_b: [a, rule_two, assert_p],
        shared: a,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factlang::{enumerate_all_mus, ground_truth_consistent, Verdict};
    use std::collections::BTreeSet;

    #[test]
    fn xor_triples_have_the_claimed_shape() {
        for (facts, _) in [xor_triple_temporal(), xor_triple_parity()] {
            let refs: Vec<&Fact> = facts.iter().collect();
            assert_eq!(ground_truth_consistent(&refs), Verdict::Inconsistent);
            let family = enumerate_all_mus(&refs, 3).unwrap();
            assert_eq!(family.len(), 1);
            assert_eq!(family[0].len(), 3);
        }
    }

    #[test]
    fn overlap_fixture_mus_family_is_exactly_the_two_triples() {
        let fx = overlapping_conflicts(3);
        let refs: Vec<&Fact> = fx.facts.iter().collect();
        let family = enumerate_all_mus(&refs, refs.len()).unwrap();
        let expected: Vec<BTreeSet<FactId>> = vec![
            fx.mus_a.iter().copied().collect(),
            fx.mus_b.iter().copied().collect(),
        ];
        assert_eq!(family.len(), 2);
        for mus in expected {
            assert!(family.contains(&mus));
        }
        assert_eq!(fx.shared, FactId(0));
    }

    #[test]
    fn negation_pair_positions_are_reported() {
        let (facts, pair) = negation_pair_at(7, 3);
        assert_eq!(facts.len(), 9);
        assert_eq!(pair, [FactId(3), FactId(4)]);
        let refs: Vec<&Fact> = facts.iter().collect();
        let family = enumerate_all_mus(&refs, refs.len()).unwrap();
        assert_eq!(family, vec![pair.iter().copied().collect::<BTreeSet<_>>()]);
    }
}
