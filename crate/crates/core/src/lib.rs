//! Global consistency verification for fact sets.
//!
//! Given facts whose mutual consistency only a (possibly noisy) subset-level
//! judge can assess, this crate localizes minimal unsatisfiable subsets by
//! adaptive divide-and-conquer, repairs the fact set through greedy hitting
//! sets, and ships the synthetic benchmark generator plus the evaluation
//! harness that exercise every provable property at desk scale.
//!
//! - [`factlang`]: the fact language, ground truth semantics, brute-force
//!   cross-checks.
//! - [`oracle`]: perfect, noisy, majority-vote, counting, and LLM-judge
//!   oracles behind one query interface.
//! - [`quickxplain`]: divide-and-conquer MUS localization.
//! - [`repair`]: hitting sets and the iterative repair loop.
//! - [`datagen`]: seeded benchmark instances with gold annotations.
//! - [`eval`]: metrics, baselines, and sweep experiments.

pub mod datagen;
pub mod eval;
pub mod exec;
pub mod factlang;
pub mod fixtures;
pub mod oracle;
pub mod quickxplain;
pub mod repair;
pub mod seeding;
