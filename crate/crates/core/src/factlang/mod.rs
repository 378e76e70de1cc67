//! The synthetic fact language.
//!
//! Facts pair a natural-language sentence with a machine-checkable logical
//! form over a small entity universe. The module also provides the ground
//! truth consistency function used as the perfect oracle, a brute-force
//! model-enumeration cross-check, and exhaustive enumeration of minimal
//! unsatisfiable subsets at desk scale.

mod render;
pub mod sampler;
mod semantics;

pub use render::{render_text, RenderError};
pub use semantics::{
    brute_force_consistent, enumerate_all_mus, enumerate_all_mus_with, ground_truth_consistent,
    BudgetError, DEFAULT_ATOM_BUDGET, MUS_ENUM_MAX_FACTS, MUS_ENUM_SMALL_K,
};

use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of a fact, dense within an instance (`facts[i].id == i`).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct FactId(pub u32);

impl fmt::Display for FactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index into an instance's entity table.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct EntityId(pub u32);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Person,
    Org,
    Loc,
    Event,
    Animal,
}

impl EntityKind {
    pub const ALL: [EntityKind; 5] = [
        EntityKind::Person,
        EntityKind::Org,
        EntityKind::Loc,
        EntityKind::Event,
        EntityKind::Animal,
    ];
}

/// An entry in the per-instance entity table. Names are unique per instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub name: String,
    pub kind: EntityKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnaryPred {
    IsTiger,
    IsDog,
    IsActor,
    IsPolitician,
    IsAnimal,
}

impl UnaryPred {
    pub const ALL: [UnaryPred; 5] = [
        UnaryPred::IsTiger,
        UnaryPred::IsDog,
        UnaryPred::IsActor,
        UnaryPred::IsPolitician,
        UnaryPred::IsAnimal,
    ];

    /// Entity kind a predicate naturally applies to in generated data.
    pub fn natural_kind(self) -> EntityKind {
        match self {
            UnaryPred::IsTiger | UnaryPred::IsDog | UnaryPred::IsAnimal => EntityKind::Animal,
            UnaryPred::IsActor | UnaryPred::IsPolitician => EntityKind::Person,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BinaryRel {
    WorksFor,
    LocatedIn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn is_positive(self) -> bool {
        matches!(self, Polarity::Positive)
    }
}

/// A unary proposition `pred(entity)`, the unit the exactly-one rule ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnaryAtom {
    pub pred: UnaryPred,
    pub entity: EntityId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    AtLeast,
    AtMost,
}

/// Machine-checkable content of a fact.
///
/// `AssertAtom` asserts one atom of an exactly-one rule; it denotes the same
/// literal as the corresponding `Unary` form and renders through the same
/// templates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicalForm {
    Unary {
        pred: UnaryPred,
        entity: EntityId,
        polarity: Polarity,
    },
    Binary {
        rel: BinaryRel,
        subject: EntityId,
        object: EntityId,
        polarity: Polarity,
    },
    Before {
        earlier: EntityId,
        later: EntityId,
    },
    ExactlyOne {
        atoms: [UnaryAtom; 3],
    },
    AssertAtom {
        atom: UnaryAtom,
        polarity: Polarity,
    },
    NumericBound {
        entity: EntityId,
        kind: BoundKind,
        value: u32,
    },
}

/// Canonical semantic identity of a logical form. Two forms with the same key
/// carry the same meaning (and render to the same sentence).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SemanticKey {
    UnaryLit(UnaryPred, EntityId, Polarity),
    BinaryLit(BinaryRel, EntityId, EntityId, Polarity),
    Before(EntityId, EntityId),
    ExactlyOne([UnaryAtom; 3]),
    Bound(EntityId, BoundKind, u32),
}

impl LogicalForm {
    pub fn semantic_key(&self) -> SemanticKey {
        match *self {
            LogicalForm::Unary { pred, entity, polarity } => {
                SemanticKey::UnaryLit(pred, entity, polarity)
            }
            LogicalForm::AssertAtom { atom, polarity } => {
                SemanticKey::UnaryLit(atom.pred, atom.entity, polarity)
            }
            LogicalForm::Binary { rel, subject, object, polarity } => {
                SemanticKey::BinaryLit(rel, subject, object, polarity)
            }
            LogicalForm::Before { earlier, later } => SemanticKey::Before(earlier, later),
            LogicalForm::ExactlyOne { atoms } => SemanticKey::ExactlyOne(atoms),
            LogicalForm::NumericBound { entity, kind, value } => {
                SemanticKey::Bound(entity, kind, value)
            }
        }
    }

    /// Entity ids referenced by this form.
    pub fn entities(&self) -> Vec<EntityId> {
        match *self {
            LogicalForm::Unary { entity, .. } => vec![entity],
            LogicalForm::AssertAtom { atom, .. } => vec![atom.entity],
            LogicalForm::Binary { subject, object, .. } => vec![subject, object],
            LogicalForm::Before { earlier, later } => vec![earlier, later],
            LogicalForm::ExactlyOne { atoms } => atoms.iter().map(|a| a.entity).collect(),
            LogicalForm::NumericBound { entity, .. } => vec![entity],
        }
    }
}

/// An identified statement: natural-language text plus its logical form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fact {
    pub id: FactId,
    pub text: String,
    pub logic: LogicalForm,
}

impl Fact {
    /// Build a fact, rendering its text from the entity table.
    pub fn new(id: FactId, logic: LogicalForm, entities: &[Entity]) -> Result<Fact, RenderError> {
        let text = render_text(&logic, entities)?;
        Ok(Fact { id, text, logic })
    }
}

/// Binary consistency judgment returned by every oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

impl Verdict {
    pub fn is_consistent(self) -> bool {
        matches!(self, Verdict::Consistent)
    }

    pub fn flipped(self) -> Verdict {
        match self {
            Verdict::Consistent => Verdict::Inconsistent,
            Verdict::Inconsistent => Verdict::Consistent,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Consistent => write!(f, "cons"),
            Verdict::Inconsistent => write!(f, "incons"),
        }
    }
}

/// Gather facts by id from a dense store (`store[i].id == i`).
pub fn gather<'a>(store: &'a [Fact], ids: &[FactId]) -> Vec<&'a Fact> {
    ids.iter()
        .map(|id| {
            let f = &store[id.0 as usize];
            debug_assert_eq!(f.id, *id, "fact store must be dense and id-ordered");
            f
        })
        .collect()
}
