//! Seeded random fact sets for cross-oracle agreement checks.
//!
//! Small entity pools make contradictions, precedence cycles, bound
//! conflicts, and rule parity violations all reachable. Exactly-one rules
//! draw their three atoms from non-taxonomy predicates on fresh, pairwise
//! distinct entities, so the rule-local ground truth semantics and full model
//! search coincide on everything this sampler can produce. The sampler also
//! keeps the distinct-atom count within the brute-force budget.

use super::{
    BinaryRel, BoundKind, Entity, EntityId, EntityKind, Fact, FactId, LogicalForm, Polarity,
    UnaryAtom, UnaryPred, DEFAULT_ATOM_BUDGET,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

const PERSONS: [&str; 4] = ["Ann", "Noah", "Mona", "Lucas"];
const ORGS: [&str; 3] = ["Acme", "Globex", "Initech"];
const LOCS: [&str; 3] = ["Springfield", "Gotham", "Oakdale"];
const EVENTS: [&str; 4] = ["Summit", "Election", "Festival", "Merger"];
const ANIMALS: [&str; 4] = ["Rex", "Bella", "Max", "Luna"];

struct Pool {
    entities: Vec<Entity>,
    persons: Vec<EntityId>,
    orgs: Vec<EntityId>,
    locs: Vec<EntityId>,
    events: Vec<EntityId>,
    animals: Vec<EntityId>,
}

impl Pool {
    fn new() -> Pool {
        let mut pool = Pool {
            entities: Vec::new(),
            persons: Vec::new(),
            orgs: Vec::new(),
            locs: Vec::new(),
            events: Vec::new(),
            animals: Vec::new(),
        };
        for name in PERSONS {
            pool.push(name, EntityKind::Person);
        }
        for name in ORGS {
            pool.push(name, EntityKind::Org);
        }
        for name in LOCS {
            pool.push(name, EntityKind::Loc);
        }
        for name in EVENTS {
            pool.push(name, EntityKind::Event);
        }
        for name in ANIMALS {
            pool.push(name, EntityKind::Animal);
        }
        pool
    }

    fn push(&mut self, name: &str, kind: EntityKind) -> EntityId {
        let id = EntityId(self.entities.len() as u32);
        self.entities.push(Entity { name: name.to_string(), kind });
        match kind {
            EntityKind::Person => self.persons.push(id),
            EntityKind::Org => self.orgs.push(id),
            EntityKind::Loc => self.locs.push(id),
            EntityKind::Event => self.events.push(id),
            EntityKind::Animal => self.animals.push(id),
        }
        id
    }
}

fn polarity(rng: &mut ChaCha8Rng) -> Polarity {
    if rng.random::<bool>() {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// Distinct atoms a form would add; used to respect the brute-force budget.
fn atoms_added(logic: &LogicalForm, seen: &HashSet<u64>) -> usize {
    atom_keys(logic).iter().filter(|k| !seen.contains(k)).count()
}

fn atom_keys(logic: &LogicalForm) -> Vec<u64> {
    fn unary_key(atom: &UnaryAtom) -> u64 {
        (atom.pred as u64) << 32 | u64::from(atom.entity.0)
    }
    match logic {
        LogicalForm::Unary { pred, entity, .. } => {
            vec![unary_key(&UnaryAtom { pred: *pred, entity: *entity })]
        }
        LogicalForm::AssertAtom { atom, .. } => vec![unary_key(atom)],
        LogicalForm::ExactlyOne { atoms } => atoms.iter().map(unary_key).collect(),
        LogicalForm::Binary { rel, subject, object, .. } => {
            vec![1 << 60 | (*rel as u64) << 48 | u64::from(subject.0) << 24 | u64::from(object.0)]
        }
        LogicalForm::Before { .. } | LogicalForm::NumericBound { .. } => Vec::new(),
    }
}

/// Sample a seeded random fact set with dense ids.
pub fn sample_fact_set(n_facts: usize, seed: u64) -> (Vec<Entity>, Vec<Fact>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool = Pool::new();
    let mut rules: Vec<[UnaryAtom; 3]> = Vec::new();
    let mut atom_set: HashSet<u64> = HashSet::new();
    let mut forms: Vec<LogicalForm> = Vec::new();

    while forms.len() < n_facts {
        let bucket = rng.random_range(0..100u32);
        let logic = match bucket {
            0..=21 => {
                let preds = [UnaryPred::IsTiger, UnaryPred::IsDog, UnaryPred::IsAnimal];
                LogicalForm::Unary {
                    pred: *preds.choose(&mut rng).expect("non-empty"),
                    entity: *pool.animals.choose(&mut rng).expect("non-empty"),
                    polarity: polarity(&mut rng),
                }
            }
            22..=39 => {
                let preds = [UnaryPred::IsActor, UnaryPred::IsPolitician];
                LogicalForm::Unary {
                    pred: *preds.choose(&mut rng).expect("non-empty"),
                    entity: *pool.persons.choose(&mut rng).expect("non-empty"),
                    polarity: polarity(&mut rng),
                }
            }
            40..=57 => {
                if rng.random::<bool>() {
                    LogicalForm::Binary {
                        rel: BinaryRel::WorksFor,
                        subject: *pool.persons.choose(&mut rng).expect("non-empty"),
                        object: *pool.orgs.choose(&mut rng).expect("non-empty"),
                        polarity: polarity(&mut rng),
                    }
                } else {
                    LogicalForm::Binary {
                        rel: BinaryRel::LocatedIn,
                        subject: *pool.orgs.choose(&mut rng).expect("non-empty"),
                        object: *pool.locs.choose(&mut rng).expect("non-empty"),
                        polarity: polarity(&mut rng),
                    }
                }
            }
            58..=71 => {
                let pair: Vec<EntityId> =
                    pool.events.choose_multiple(&mut rng, 2).copied().collect();
                LogicalForm::Before { earlier: pair[0], later: pair[1] }
            }
            72..=81 => LogicalForm::NumericBound {
                entity: *pool.locs.choose(&mut rng).expect("non-empty"),
                kind: if rng.random::<bool>() { BoundKind::AtLeast } else { BoundKind::AtMost },
                value: rng.random_range(0..150),
            },
            82..=89 => {
                // Fresh rule over non-taxonomy predicates on fresh entities.
                let preds = [UnaryPred::IsActor, UnaryPred::IsPolitician];
                let idx = pool.entities.len();
                let atoms = [
                    UnaryAtom {
                        pred: *preds.choose(&mut rng).expect("non-empty"),
                        entity: pool.push(&format!("Ruler{idx}a"), EntityKind::Person),
                    },
                    UnaryAtom {
                        pred: *preds.choose(&mut rng).expect("non-empty"),
                        entity: pool.push(&format!("Ruler{idx}b"), EntityKind::Person),
                    },
                    UnaryAtom {
                        pred: *preds.choose(&mut rng).expect("non-empty"),
                        entity: pool.push(&format!("Ruler{idx}c"), EntityKind::Person),
                    },
                ];
                rules.push(atoms);
                LogicalForm::ExactlyOne { atoms }
            }
            _ => match rules.as_slice().choose(&mut rng) {
                Some(rule) => LogicalForm::AssertAtom {
                    atom: *rule.choose(&mut rng).expect("non-empty"),
                    polarity: polarity(&mut rng),
                },
                None => LogicalForm::Unary {
                    pred: UnaryPred::IsActor,
                    entity: *pool.persons.choose(&mut rng).expect("non-empty"),
                    polarity: polarity(&mut rng),
                },
            },
        };

        if atom_set.len() + atoms_added(&logic, &atom_set) > DEFAULT_ATOM_BUDGET {
            // Precedence facts never add atoms, so the budget always admits one.
            let pair: Vec<EntityId> = pool.events.choose_multiple(&mut rng, 2).copied().collect();
            let fallback = LogicalForm::Before { earlier: pair[0], later: pair[1] };
            forms.push(fallback);
            continue;
        }
        atom_set.extend(atom_keys(&logic));
        forms.push(logic);
    }

    let facts = forms
        .into_iter()
        .enumerate()
        .map(|(i, logic)| {
            Fact::new(FactId(i as u32), logic, &pool.entities)
                .expect("sampler only references entities it created")
        })
        .collect();
    (pool.entities, facts)
}
