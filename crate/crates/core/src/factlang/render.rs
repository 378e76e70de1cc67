//! Deterministic sentence templates.
//!
//! Same logical form plus same entity table always yields the same sentence;
//! negated forms carry an explicit "not". Forms with the same semantic key
//! (a `Unary` and the matching `AssertAtom`) render identically.

use super::{BinaryRel, BoundKind, Entity, EntityId, LogicalForm, Polarity, UnaryAtom, UnaryPred};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("unknown entity id {0}")]
    UnknownEntity(EntityId),
}

fn name(entities: &[Entity], id: EntityId) -> Result<&str, RenderError> {
    entities
        .get(id.0 as usize)
        .map(|e| e.name.as_str())
        .ok_or(RenderError::UnknownEntity(id))
}

fn unary_phrase(pred: UnaryPred) -> &'static str {
    match pred {
        UnaryPred::IsTiger => "a tiger",
        UnaryPred::IsDog => "a dog",
        UnaryPred::IsActor => "an actor",
        UnaryPred::IsPolitician => "a politician",
        UnaryPred::IsAnimal => "an animal",
    }
}

fn unary_clause(
    entities: &[Entity],
    atom: &UnaryAtom,
    polarity: Polarity,
) -> Result<String, RenderError> {
    let subject = name(entities, atom.entity)?;
    let phrase = unary_phrase(atom.pred);
    Ok(match polarity {
        Polarity::Positive => format!("{subject} is {phrase}"),
        Polarity::Negative => format!("{subject} is not {phrase}"),
    })
}

/// Render a logical form to its canonical sentence.
pub fn render_text(logic: &LogicalForm, entities: &[Entity]) -> Result<String, RenderError> {
    match logic {
        LogicalForm::Unary { pred, entity, polarity } => {
            let atom = UnaryAtom { pred: *pred, entity: *entity };
            Ok(format!("{}.", unary_clause(entities, &atom, *polarity)?))
        }
        LogicalForm::AssertAtom { atom, polarity } => {
            Ok(format!("{}.", unary_clause(entities, atom, *polarity)?))
        }
        LogicalForm::Binary { rel, subject, object, polarity } => {
            let s = name(entities, *subject)?;
            let o = name(entities, *object)?;
            Ok(match (rel, polarity) {
                (BinaryRel::WorksFor, Polarity::Positive) => format!("{s} works for {o}."),
                (BinaryRel::WorksFor, Polarity::Negative) => format!("{s} does not work for {o}."),
                (BinaryRel::LocatedIn, Polarity::Positive) => format!("{s} is located in {o}."),
                (BinaryRel::LocatedIn, Polarity::Negative) => {
                    format!("{s} is not located in {o}.")
                }
            })
        }
        LogicalForm::Before { earlier, later } => {
            let a = name(entities, *earlier)?;
            let b = name(entities, *later)?;
            Ok(format!("{a} happened before {b}."))
        }
        LogicalForm::ExactlyOne { atoms } => {
            let clauses: Vec<String> = atoms
                .iter()
                .map(|a| unary_clause(entities, a, Polarity::Positive))
                .collect::<Result<_, _>>()?;
            Ok(format!(
                "Exactly one of these holds: {}; {}; {}.",
                clauses[0], clauses[1], clauses[2]
            ))
        }
        LogicalForm::NumericBound { entity, kind, value } => {
            let loc = name(entities, *entity)?;
            Ok(match kind {
                BoundKind::AtLeast => format!("At least {value} cases were reported in {loc}."),
                BoundKind::AtMost => format!("At most {value} cases were reported in {loc}."),
            })
        }
    }
}
