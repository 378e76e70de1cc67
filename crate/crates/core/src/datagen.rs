//! Seeded benchmark instances with planted conflicts and gold annotations.
//!
//! Each instance plants the requested conflict patterns on fresh entities,
//! fills the remaining budget with consistent distractors (a configurable
//! fraction of them off-topic negated relations), shuffles the fact order,
//! and records the planted MUS family plus the gold consistent subset
//! (everything minus a greedy hitting set of the planted family).
//!
//! Instances serialize one-per-line as JSON records with a schema version.

use crate::factlang::{
    BinaryRel, BoundKind, Entity, EntityId, EntityKind, Fact, FactId, LogicalForm, Polarity,
    RenderError, UnaryAtom, UnaryPred,
};
use crate::repair::{greedy_hitting_set, ScopeFamily};
use crate::seeding::derive2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

/// Stream salt for per-instance seeds in batch generation.
const INSTANCE_STREAM: u64 = 0x1347;

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("infeasible generator config: {0}")]
    Infeasible(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error at line {line}: {message}")]
    Schema { line: usize, message: String },
    #[error(transparent)]
    Render(#[from] RenderError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternKind {
    NegationPair,
    TemporalCycle,
    ExactlyOne,
}

impl PatternKind {
    /// Number of facts the planted MUS spans.
    pub fn mus_size(self) -> usize {
        match self {
            PatternKind::NegationPair => 2,
            PatternKind::TemporalCycle => 3,
            PatternKind::ExactlyOne => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternKind::NegationPair => "negation_pair",
            PatternKind::TemporalCycle => "temporal_cycle",
            PatternKind::ExactlyOne => "exactly_one",
        }
    }
}

impl FromStr for PatternKind {
    type Err = String;

    fn from_str(s: &str) -> Result<PatternKind, String> {
        match s {
            "negation_pair" => Ok(PatternKind::NegationPair),
            "temporal_cycle" => Ok(PatternKind::TemporalCycle),
            "exactly_one" => Ok(PatternKind::ExactlyOne),
            other => Err(format!(
                "unknown pattern {other:?}; expected negation_pair, temporal_cycle, or exactly_one"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScopeMode {
    #[default]
    SingleScope,
    PerCluster,
}

fn default_cluster_size() -> usize {
    30
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_facts: usize,
    /// Patterns to plant, as (kind, count) pairs.
    pub planted: Vec<(PatternKind, usize)>,
    /// Fraction of distractor slots filled with off-topic negated relations.
    pub distractor_offtopic_fraction: f64,
    pub seed: u64,
    #[serde(default)]
    pub scope_mode: ScopeMode,
    /// Allow consecutive same-kind patterns to share one fact.
    #[serde(default)]
    pub allow_overlap: bool,
    #[serde(default = "default_cluster_size")]
    pub cluster_size: usize,
}

impl Default for GenConfig {
    fn default() -> GenConfig {
        GenConfig {
            n_facts: 30,
            planted: vec![(PatternKind::NegationPair, 1)],
            distractor_offtopic_fraction: 0.1,
            seed: 0,
            scope_mode: ScopeMode::SingleScope,
            allow_overlap: false,
            cluster_size: default_cluster_size(),
        }
    }
}

impl GenConfig {
    pub fn pattern_count(&self) -> usize {
        self.planted.iter().map(|(_, count)| count).sum()
    }

    /// Short textual form of the pattern mix, e.g. `negation_pair:2+exactly_one:1`.
    pub fn pattern_mix(&self) -> String {
        if self.planted.is_empty() {
            return "none".to_string();
        }
        self.planted
            .iter()
            .map(|(kind, count)| format!("{}:{count}", kind.name()))
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        if self.n_facts == 0 {
            return Err(DatagenError::Infeasible("n_facts must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.distractor_offtopic_fraction) {
            return Err(DatagenError::Infeasible(format!(
                "offtopic fraction {} outside [0,1]",
                self.distractor_offtopic_fraction
            )));
        }
        if self.cluster_size == 0 {
            return Err(DatagenError::Infeasible("cluster_size must be positive".into()));
        }
        let planted_facts: usize =
            self.planted.iter().map(|(kind, count)| kind.mus_size() * count).sum();
        if planted_facts > self.n_facts {
            return Err(DatagenError::Infeasible(format!(
                "{planted_facts} planted facts exceed n_facts={}",
                self.n_facts
            )));
        }
        Ok(())
    }
}

/// A generated benchmark unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub schema: u32,
    pub id: u64,
    pub seed: u64,
    pub entities: Vec<Entity>,
    pub facts: Vec<Fact>,
    pub scopes: ScopeFamily,
    pub gold_mus: Vec<Vec<FactId>>,
    pub gold_consistent: Vec<FactId>,
}

impl Instance {
    pub fn n_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn all_ids(&self) -> Vec<FactId> {
        self.facts.iter().map(|f| f.id).collect()
    }

    pub fn gold_mus_sets(&self) -> Vec<BTreeSet<FactId>> {
        self.gold_mus.iter().map(|mus| mus.iter().copied().collect()).collect()
    }

    fn validate(&self, line: usize) -> Result<(), DatagenError> {
        let schema_err = |message: String| DatagenError::Schema { line, message };
        if self.schema != SCHEMA_VERSION {
            return Err(schema_err(format!(
                "schema version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema
            )));
        }
        for (index, fact) in self.facts.iter().enumerate() {
            if fact.id.0 as usize != index {
                return Err(schema_err(format!(
                    "field facts: id {} at position {index}; ids must be dense and ordered",
                    fact.id
                )));
            }
            for entity in fact.logic.entities() {
                if entity.0 as usize >= self.entities.len() {
                    return Err(schema_err(format!(
                        "field facts: fact {} references unknown entity {entity}",
                        fact.id
                    )));
                }
            }
        }
        let in_range = |id: &FactId| (id.0 as usize) < self.facts.len();
        if !self.scopes.scopes.iter().flatten().all(in_range) {
            return Err(schema_err("field scopes: fact id out of range".into()));
        }
        if !self.gold_mus.iter().flatten().all(in_range) {
            return Err(schema_err("field gold_mus: fact id out of range".into()));
        }
        if !self.gold_consistent.iter().all(in_range) {
            return Err(schema_err("field gold_consistent: fact id out of range".into()));
        }
        Ok(())
    }
}

const PERSON_NAMES: [&str; 12] = [
    "Ann", "Noah", "Mona", "Lucas", "Priya", "Omar", "Elena", "Wei", "Sofia", "Ravi", "Tara",
    "Hugo",
];
const ORG_NAMES: [&str; 10] = [
    "Acme", "Globex", "Initech", "Vandelay", "Cyberdyne", "Aperture", "Soylent", "Pied Piper",
    "Umbrella", "Wonka Works",
];
const LOC_NAMES: [&str; 10] = [
    "Springfield", "Gotham", "Metropolis", "Rivertown", "Oakdale", "Hill Valley", "Sunnydale",
    "Arcadia", "Fairview", "Emerald City",
];
const EVENT_NAMES: [&str; 10] = [
    "Summit", "Election", "Festival", "Merger", "Launch", "Premiere", "Auction", "Ceremony",
    "Tournament", "Expo",
];
const ANIMAL_NAMES: [&str; 10] =
    ["Rex", "Bella", "Max", "Luna", "Charlie", "Daisy", "Rocky", "Molly", "Buddy", "Coco"];

struct EntityAllocator {
    entities: Vec<Entity>,
    counters: HashMap<EntityKind, usize>,
}

impl EntityAllocator {
    fn new() -> EntityAllocator {
        EntityAllocator { entities: Vec::new(), counters: HashMap::new() }
    }

    fn fresh(&mut self, kind: EntityKind) -> EntityId {
        let bank: &[&str] = match kind {
            EntityKind::Person => &PERSON_NAMES,
            EntityKind::Org => &ORG_NAMES,
            EntityKind::Loc => &LOC_NAMES,
            EntityKind::Event => &EVENT_NAMES,
            EntityKind::Animal => &ANIMAL_NAMES,
        };
        let counter = self.counters.entry(kind).or_insert(0);
        let name = if *counter < bank.len() {
            bank[*counter].to_string()
        } else {
            format!("{} {}", bank[*counter % bank.len()], *counter / bank.len() + 1)
        };
        *counter += 1;
        let id = EntityId(self.entities.len() as u32);
        self.entities.push(Entity { name, kind });
        id
    }
}

/// Remembers what a previous pattern planted so a later same-kind pattern can
/// share one fact with it.
enum OverlapHook {
    ExactlyOne { shared_atom: UnaryAtom, assert_index: usize },
    TemporalCycle { from: EntityId, to: EntityId, edge_index: usize },
}

/// Per-instance distractor state: everything needed to keep fillers mutually
/// consistent (positive-only unary literals, deduplicated binary literals, a
/// forward-only event timeline, compatible numeric bounds).
struct DistractorState {
    persons: Vec<EntityId>,
    orgs: Vec<EntityId>,
    locs: Vec<EntityId>,
    animals: Vec<EntityId>,
    timeline: Vec<EntityId>,
    used_unary: HashSet<(UnaryPred, EntityId)>,
    used_binary: HashSet<(BinaryRel, EntityId, EntityId)>,
    used_before: HashSet<(EntityId, EntityId)>,
    bounds: HashMap<EntityId, (Option<u32>, Option<u32>)>,
}

impl DistractorState {
    fn new() -> DistractorState {
        DistractorState {
            persons: Vec::new(),
            orgs: Vec::new(),
            locs: Vec::new(),
            animals: Vec::new(),
            timeline: Vec::new(),
            used_unary: HashSet::new(),
            used_binary: HashSet::new(),
            used_before: HashSet::new(),
            bounds: HashMap::new(),
        }
    }

    fn pick_or_fresh(
        rng: &mut ChaCha8Rng,
        pool: &mut Vec<EntityId>,
        alloc: &mut EntityAllocator,
        kind: EntityKind,
    ) -> EntityId {
        if !pool.is_empty() && rng.random::<f64>() < 0.6 {
            *pool.choose(rng).expect("non-empty pool")
        } else {
            let id = alloc.fresh(kind);
            pool.push(id);
            id
        }
    }

    fn on_topic(&mut self, rng: &mut ChaCha8Rng, alloc: &mut EntityAllocator) -> LogicalForm {
        // A few draws may collide with already-used literals; fall through to
        // a guaranteed-fresh build after that.
        for _ in 0..6 {
            match rng.random_range(0..6u32) {
                0 => {
                    let person =
                        Self::pick_or_fresh(rng, &mut self.persons, alloc, EntityKind::Person);
                    let org = Self::pick_or_fresh(rng, &mut self.orgs, alloc, EntityKind::Org);
                    if self.used_binary.insert((BinaryRel::WorksFor, person, org)) {
                        return LogicalForm::Binary {
                            rel: BinaryRel::WorksFor,
                            subject: person,
                            object: org,
                            polarity: Polarity::Positive,
                        };
                    }
                }
                1 => {
                    let org = Self::pick_or_fresh(rng, &mut self.orgs, alloc, EntityKind::Org);
                    let loc = Self::pick_or_fresh(rng, &mut self.locs, alloc, EntityKind::Loc);
                    if self.used_binary.insert((BinaryRel::LocatedIn, org, loc)) {
                        return LogicalForm::Binary {
                            rel: BinaryRel::LocatedIn,
                            subject: org,
                            object: loc,
                            polarity: Polarity::Positive,
                        };
                    }
                }
                2 => {
                    let animal =
                        Self::pick_or_fresh(rng, &mut self.animals, alloc, EntityKind::Animal);
                    let pred = *[UnaryPred::IsTiger, UnaryPred::IsDog, UnaryPred::IsAnimal]
                        .choose(rng)
                        .expect("non-empty");
                    if self.used_unary.insert((pred, animal)) {
                        return LogicalForm::Unary {
                            pred,
                            entity: animal,
                            polarity: Polarity::Positive,
                        };
                    }
                }
                3 => {
                    let person =
                        Self::pick_or_fresh(rng, &mut self.persons, alloc, EntityKind::Person);
                    let pred = *[UnaryPred::IsActor, UnaryPred::IsPolitician]
                        .choose(rng)
                        .expect("non-empty");
                    if self.used_unary.insert((pred, person)) {
                        return LogicalForm::Unary {
                            pred,
                            entity: person,
                            polarity: Polarity::Positive,
                        };
                    }
                }
                4 => {
                    // Forward edge on the distractor timeline keeps it acyclic.
                    if self.timeline.len() < 2 || rng.random::<f64>() < 0.4 {
                        self.timeline.push(alloc.fresh(EntityKind::Event));
                    }
                    if self.timeline.len() >= 2 {
                        let j = rng.random_range(1..self.timeline.len());
                        let i = rng.random_range(0..j);
                        let edge = (self.timeline[i], self.timeline[j]);
                        if self.used_before.insert(edge) {
                            return LogicalForm::Before { earlier: edge.0, later: edge.1 };
                        }
                    }
                }
                _ => {
                    let loc = Self::pick_or_fresh(rng, &mut self.locs, alloc, EntityKind::Loc);
                    let entry = self.bounds.entry(loc).or_insert((None, None));
                    match entry {
                        (lo @ None, _) => {
                            let value = rng.random_range(5..60);
                            *lo = Some(value);
                            return LogicalForm::NumericBound {
                                entity: loc,
                                kind: BoundKind::AtLeast,
                                value,
                            };
                        }
                        (Some(lo), hi @ None) => {
                            let value = rng.random_range(*lo..*lo + 100);
                            *hi = Some(value);
                            return LogicalForm::NumericBound {
                                entity: loc,
                                kind: BoundKind::AtMost,
                                value,
                            };
                        }
                        _ => {}
                    }
                }
            }
        }
        // Guaranteed fresh fallback.
        let person = alloc.fresh(EntityKind::Person);
        self.persons.push(person);
        let org = alloc.fresh(EntityKind::Org);
        self.orgs.push(org);
        self.used_binary.insert((BinaryRel::WorksFor, person, org));
        LogicalForm::Binary {
            rel: BinaryRel::WorksFor,
            subject: person,
            object: org,
            polarity: Polarity::Positive,
        }
    }

    /// Off-topic clutter: a negated relation over fresh entities, consistent
    /// with everything by construction.
    fn off_topic(&mut self, rng: &mut ChaCha8Rng, alloc: &mut EntityAllocator) -> LogicalForm {
        if rng.random::<bool>() {
            let person = alloc.fresh(EntityKind::Person);
            let org = alloc.fresh(EntityKind::Org);
            self.used_binary.insert((BinaryRel::WorksFor, person, org));
            LogicalForm::Binary {
                rel: BinaryRel::WorksFor,
                subject: person,
                object: org,
                polarity: Polarity::Negative,
            }
        } else {
            let org = alloc.fresh(EntityKind::Org);
            let loc = alloc.fresh(EntityKind::Loc);
            self.used_binary.insert((BinaryRel::LocatedIn, org, loc));
            LogicalForm::Binary {
                rel: BinaryRel::LocatedIn,
                subject: org,
                object: loc,
                polarity: Polarity::Negative,
            }
        }
    }
}

/// Plant one pattern. Returns the new forms, the member references of the
/// planted MUS (`Existing` entries point at facts already in the cluster),
/// and an overlap hook for later same-kind patterns.
enum MemberRef {
    New(usize),
    Existing(usize),
}

fn plant_pattern(
    kind: PatternKind,
    rng: &mut ChaCha8Rng,
    alloc: &mut EntityAllocator,
    hook: Option<&OverlapHook>,
) -> (Vec<LogicalForm>, Vec<MemberRef>, Option<OverlapHook>) {
    match kind {
        PatternKind::NegationPair => {
            let (positive, negative) = match rng.random_range(0..10u32) {
                0..=4 => {
                    let pred = *UnaryPred::ALL.choose(rng).expect("non-empty");
                    let entity = alloc.fresh(pred.natural_kind());
                    (
                        LogicalForm::Unary { pred, entity, polarity: Polarity::Positive },
                        LogicalForm::Unary { pred, entity, polarity: Polarity::Negative },
                    )
                }
                5..=7 => {
                    let (rel, subject, object) = if rng.random::<bool>() {
                        (
                            BinaryRel::WorksFor,
                            alloc.fresh(EntityKind::Person),
                            alloc.fresh(EntityKind::Org),
                        )
                    } else {
                        (
                            BinaryRel::LocatedIn,
                            alloc.fresh(EntityKind::Org),
                            alloc.fresh(EntityKind::Loc),
                        )
                    };
                    (
                        LogicalForm::Binary {
                            rel,
                            subject,
                            object,
                            polarity: Polarity::Positive,
                        },
                        LogicalForm::Binary {
                            rel,
                            subject,
                            object,
                            polarity: Polarity::Negative,
                        },
                    )
                }
                _ => {
                    // Conflict through the taxonomy: a tiger that is no animal.
                    let entity = alloc.fresh(EntityKind::Animal);
                    let pred = *[UnaryPred::IsTiger, UnaryPred::IsDog]
                        .choose(rng)
                        .expect("non-empty");
                    (
                        LogicalForm::Unary { pred, entity, polarity: Polarity::Positive },
                        LogicalForm::Unary {
                            pred: UnaryPred::IsAnimal,
                            entity,
                            polarity: Polarity::Negative,
                        },
                    )
                }
            };
            (
                vec![positive, negative],
                vec![MemberRef::New(0), MemberRef::New(1)],
                None,
            )
        }
        PatternKind::TemporalCycle => {
            if let Some(OverlapHook::TemporalCycle { from, to, edge_index }) = hook {
                // Share the first edge: a -> b (existing), b -> d, d -> a.
                let fresh = alloc.fresh(EntityKind::Event);
                let forms = vec![
                    LogicalForm::Before { earlier: *to, later: fresh },
                    LogicalForm::Before { earlier: fresh, later: *from },
                ];
                let members = vec![
                    MemberRef::Existing(*edge_index),
                    MemberRef::New(0),
                    MemberRef::New(1),
                ];
                return (forms, members, None);
            }
            let a = alloc.fresh(EntityKind::Event);
            let b = alloc.fresh(EntityKind::Event);
            let c = alloc.fresh(EntityKind::Event);
            let forms = vec![
                LogicalForm::Before { earlier: a, later: b },
                LogicalForm::Before { earlier: b, later: c },
                LogicalForm::Before { earlier: c, later: a },
            ];
            let members = vec![MemberRef::New(0), MemberRef::New(1), MemberRef::New(2)];
            let hook = OverlapHook::TemporalCycle { from: a, to: b, edge_index: 0 };
            (forms, members, Some(hook))
        }
        PatternKind::ExactlyOne => {
            if let Some(OverlapHook::ExactlyOne { shared_atom, assert_index }) = hook {
                // New rule containing the already-asserted atom, plus one
                // fresh asserted atom; the third appears nowhere else.
                let preds = UnaryPred::ALL;
                let second = {
                    let pred = *preds.choose(rng).expect("non-empty");
                    UnaryAtom { pred, entity: alloc.fresh(pred.natural_kind()) }
                };
                let third = {
                    let pred = *preds.choose(rng).expect("non-empty");
                    UnaryAtom { pred, entity: alloc.fresh(pred.natural_kind()) }
                };
                let forms = vec![
                    LogicalForm::ExactlyOne { atoms: [*shared_atom, second, third] },
                    LogicalForm::AssertAtom { atom: second, polarity: Polarity::Positive },
                ];
                let members = vec![
                    MemberRef::Existing(*assert_index),
                    MemberRef::New(0),
                    MemberRef::New(1),
                ];
                return (forms, members, None);
            }
            // Pairwise distinct fresh entities keep the rule independent of
            // the taxonomy closure.
            let atoms: [UnaryAtom; 3] = std::array::from_fn(|_| {
                let pred = *UnaryPred::ALL.choose(rng).expect("non-empty");
                UnaryAtom { pred, entity: alloc.fresh(pred.natural_kind()) }
            });
            let mut asserted: Vec<usize> = (0..3).collect();
            asserted.shuffle(rng);
            asserted.truncate(2);
            let forms = vec![
                LogicalForm::ExactlyOne { atoms },
                LogicalForm::AssertAtom { atom: atoms[asserted[0]], polarity: Polarity::Positive },
                LogicalForm::AssertAtom { atom: atoms[asserted[1]], polarity: Polarity::Positive },
            ];
            let members = vec![MemberRef::New(0), MemberRef::New(1), MemberRef::New(2)];
            let hook =
                OverlapHook::ExactlyOne { shared_atom: atoms[asserted[0]], assert_index: 1 };
            (forms, members, Some(hook))
        }
    }
}

/// Generate one instance. Deterministic per seed; `id` is left at zero for
/// the caller (batch generation numbers instances).
pub fn generate(config: &GenConfig) -> Result<Instance, DatagenError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut alloc = EntityAllocator::new();
    let mut distractors = DistractorState::new();

    // Expand the pattern list and assign patterns to clusters round-robin.
    let patterns: Vec<PatternKind> = config
        .planted
        .iter()
        .flat_map(|(kind, count)| std::iter::repeat(*kind).take(*count))
        .collect();
    let n_clusters = match config.scope_mode {
        ScopeMode::SingleScope => 1,
        ScopeMode::PerCluster => config.n_facts.div_ceil(config.cluster_size),
    };
    let mut cluster_sizes = vec![config.n_facts / n_clusters; n_clusters];
    for extra in 0..config.n_facts % n_clusters {
        cluster_sizes[extra] += 1;
    }
    let mut cluster_patterns: Vec<Vec<PatternKind>> = vec![Vec::new(); n_clusters];
    for (index, kind) in patterns.iter().enumerate() {
        cluster_patterns[index % n_clusters].push(*kind);
    }

    let mut facts: Vec<Fact> = Vec::with_capacity(config.n_facts);
    let mut gold_groups: Vec<Vec<FactId>> = Vec::new();
    let mut scopes: Vec<Vec<FactId>> = Vec::new();

    for (cluster, kinds) in cluster_patterns.iter().enumerate() {
        let capacity = cluster_sizes[cluster];
        let base = facts.len();

        // Plant this cluster's patterns.
        let mut forms: Vec<LogicalForm> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut hooks: HashMap<PatternKind, OverlapHook> = HashMap::new();
        for kind in kinds {
            let hook = if config.allow_overlap { hooks.get(kind) } else { None };
            let (new_forms, members, new_hook) = plant_pattern(*kind, &mut rng, &mut alloc, hook);
            let offset = forms.len();
            let group = members
                .iter()
                .map(|member| match member {
                    MemberRef::New(i) => offset + i,
                    MemberRef::Existing(local) => *local,
                })
                .collect();
            groups.push(group);
            forms.extend(new_forms);
            if let Some(mut hook) = new_hook {
                // Hook indices are local to the new forms; shift them.
                match &mut hook {
                    OverlapHook::ExactlyOne { assert_index, .. } => *assert_index += offset,
                    OverlapHook::TemporalCycle { edge_index, .. } => *edge_index += offset,
                }
                hooks.insert(*kind, hook);
            }
        }
        if forms.len() > capacity {
            return Err(DatagenError::Infeasible(format!(
                "cluster {cluster} holds {} pattern facts but only {capacity} slots",
                forms.len()
            )));
        }

        // Fill with distractors: the configured fraction off-topic.
        let remaining = capacity - forms.len();
        let off_topic = (remaining as f64 * config.distractor_offtopic_fraction).round() as usize;
        for slot in 0..remaining {
            let form = if slot < off_topic {
                distractors.off_topic(&mut rng, &mut alloc)
            } else {
                distractors.on_topic(&mut rng, &mut alloc)
            };
            forms.push(form);
        }

        // Shuffle the cluster and renumber.
        let mut order: Vec<usize> = (0..forms.len()).collect();
        order.shuffle(&mut rng);
        let mut position_of = vec![0usize; forms.len()];
        for (position, original) in order.iter().enumerate() {
            position_of[*original] = position;
        }
        let mut shuffled: Vec<Option<LogicalForm>> = vec![None; forms.len()];
        for (original, form) in forms.into_iter().enumerate() {
            shuffled[position_of[original]] = Some(form);
        }
        for (position, form) in shuffled.into_iter().enumerate() {
            let id = FactId((base + position) as u32);
            facts.push(Fact::new(id, form.expect("every slot filled"), &alloc.entities)?);
        }
        for group in groups {
            let mut ids: Vec<FactId> = group
                .iter()
                .map(|local| FactId((base + position_of[*local]) as u32))
                .collect();
            ids.sort_unstable();
            gold_groups.push(ids);
        }
        scopes.push((base..base + capacity).map(|i| FactId(i as u32)).collect());
    }

    gold_groups.sort();
    let gold_sets: Vec<BTreeSet<FactId>> =
        gold_groups.iter().map(|g| g.iter().copied().collect()).collect();
    let hit = greedy_hitting_set(&gold_sets)
        .expect("planted MUSes are nonempty by construction");
    let gold_consistent: Vec<FactId> =
        facts.iter().map(|f| f.id).filter(|id| !hit.contains(id)).collect();

    Ok(Instance {
        schema: SCHEMA_VERSION,
        id: 0,
        seed: config.seed,
        entities: alloc.entities,
        facts,
        scopes: ScopeFamily { scopes },
        gold_mus: gold_groups,
        gold_consistent,
    })
}

/// Generate `count` instances with per-index derived seeds.
pub fn generate_batch(
    config: &GenConfig,
    count: usize,
    base_seed: u64,
) -> Result<Vec<Instance>, DatagenError> {
    config.validate()?;
    let results = crate::exec::run_indexed(count, |index| {
        let mut cfg = config.clone();
        cfg.seed = derive2(base_seed, INSTANCE_STREAM, index as u64);
        generate(&cfg).map(|mut instance| {
            instance.id = index as u64;
            instance
        })
    });
    results.into_iter().collect()
}

/// Sequential counterpart of [`generate_batch`], identical output.
pub fn generate_batch_seq(
    config: &GenConfig,
    count: usize,
    base_seed: u64,
) -> Result<Vec<Instance>, DatagenError> {
    config.validate()?;
    let results = crate::exec::run_indexed_seq(count, |index| {
        let mut cfg = config.clone();
        cfg.seed = derive2(base_seed, INSTANCE_STREAM, index as u64);
        generate(&cfg).map(|mut instance| {
            instance.id = index as u64;
            instance
        })
    });
    results.into_iter().collect()
}

/// Write instances as line-delimited JSON, atomically (temp file + rename).
pub fn save_instances(path: &Path, instances: &[Instance]) -> Result<(), DatagenError> {
    let io_err = |source: std::io::Error| DatagenError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut buffer = Vec::new();
    for instance in instances {
        serde_json::to_writer(&mut buffer, instance).map_err(|e| DatagenError::Schema {
            line: 0,
            message: format!("serialization failed: {e}"),
        })?;
        buffer.push(b'\n');
    }
    let tmp = path.with_extension("tmp");
    {
        let mut file = std::fs::File::create(&tmp).map_err(io_err)?;
        file.write_all(&buffer).map_err(io_err)?;
        file.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// Load instances from line-delimited JSON, validating each record.
pub fn load_instances(path: &Path) -> Result<Vec<Instance>, DatagenError> {
    let file = std::fs::File::open(path).map_err(|source| DatagenError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = std::io::BufReader::new(file);
    let mut instances = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line_number = index + 1;
        let raw = line.map_err(|source| DatagenError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if raw.trim().is_empty() {
            continue;
        }
        let instance: Instance =
            serde_json::from_str(&raw).map_err(|e| DatagenError::Schema {
                line: line_number,
                message: e.to_string(),
            })?;
        instance.validate(line_number)?;
        instances.push(instance);
    }
    Ok(instances)
}
