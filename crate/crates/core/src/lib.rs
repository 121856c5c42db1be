//! Converts natural-language planning task descriptions into task PDDL.
//!
//! The pipeline has three stages: a completion model translates the
//! description into a small logic program (the intermediate
//! representation), a deterministic inference engine materializes every
//! implied fact using per-domain rules, and a compiler renders the task
//! PDDL. An equivalence checker grades output against ground truth up to
//! type-respecting object renaming.

pub mod equiv;
pub mod factbase;
pub mod harness;
pub mod infer;
pub mod ir;
pub mod naming;
pub mod packs;
pub mod pddl;
pub mod translate;

pub use factbase::{FactBase, Provenance};
pub use infer::materialize;
pub use ir::{parse_program, serialize_program, Program};
pub use pddl::{compile_task, parse_domain, parse_task, serialize_task, DomainModel, TaskPddl};
