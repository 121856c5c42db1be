//! PDDL support: parsing domain and task files, compiling a materialized
//! fact base into a task, and canonical serialization.

mod compile;
mod parse;
mod sexp;
mod write;

pub use compile::{compile_task, CompileOptions};
pub use parse::{parse_domain, parse_task};
pub use sexp::{parse_sexp, typed_list, Sexp};
pub use write::serialize_task;

use crate::naming::natural_cmp;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PddlError {
    #[error("{line}:{col}: {message}")]
    SExpr {
        line: u32,
        col: u32,
        message: String,
    },
    #[error("malformed PDDL: {0}")]
    Malformed(String),
    #[error("missing section {0}")]
    MissingSection(String),
    #[error("object `{0}` is referenced but not declared")]
    UndeclaredObject(String),
    #[error("undeclared predicate `{0}` in task")]
    UndeclaredPredicate(String),
    #[error("task has no goal atoms")]
    EmptyGoal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDef {
    pub name: String,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateDef {
    pub name: String,
    /// `(variable, type)` pairs; untyped arguments get type `object`.
    pub args: Vec<(String, String)>,
}

/// The parts of a domain file the pipeline needs: the type hierarchy and
/// typed predicate signatures. Action bodies are skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DomainModel {
    pub name: String,
    pub types: Vec<TypeDef>,
    pub predicates: Vec<PredicateDef>,
    pub constants: BTreeMap<String, String>,
    pub has_functions: bool,
    pub warnings: Vec<String>,
}

impl DomainModel {
    /// `object` is the implicit PDDL root type and always counts as
    /// declared.
    pub fn declares_type(&self, name: &str) -> bool {
        name == "object" || self.types.iter().any(|t| t.name == name)
    }

    pub fn declared_types(&self) -> BTreeSet<String> {
        self.types.iter().map(|t| t.name.clone()).collect()
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDef> {
        self.predicates.iter().find(|p| p.name == name)
    }

    /// Reflexive-transitive subtype check; every type is a subtype of
    /// `object`.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> bool {
        if sub == sup || sup == "object" {
            return true;
        }
        let mut current = sub.to_string();
        for _ in 0..=self.types.len() {
            let Some(def) = self.types.iter().find(|t| t.name == current) else {
                return false;
            };
            match &def.parent {
                Some(p) if p == sup => return true,
                Some(p) => current = p.clone(),
                None => return false,
            }
        }
        false
    }
}

/// A ground task atom: predicate and object arguments. The init cost
/// literal `(= (total-cost) 0)` is carried as predicate `=` with
/// arguments `total-cost` and `0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PddlAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl PddlAtom {
    pub fn new(predicate: &str, args: &[&str]) -> Self {
        PddlAtom {
            predicate: predicate.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn is_cost_literal(&self) -> bool {
        self.predicate == "="
    }
}

impl fmt::Display for PddlAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_cost_literal() {
            return write!(f, "(= ({}) {})", self.args[0], self.args[1]);
        }
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// A task PDDL: typed objects, init atom set, goal conjunction, and the
/// optional minimize-total-cost metric.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaskPddl {
    pub problem_name: String,
    pub domain_name: String,
    pub objects: BTreeMap<String, Vec<String>>,
    pub init: BTreeSet<PddlAtom>,
    pub goal: BTreeSet<PddlAtom>,
    pub metric_minimize_total_cost: bool,
}

impl TaskPddl {
    pub fn object_count(&self) -> usize {
        self.objects.values().map(Vec::len).sum()
    }

    pub fn types_used(&self) -> BTreeSet<String> {
        self.objects.keys().cloned().collect()
    }

    pub fn declared_object_ids(&self) -> BTreeSet<String> {
        self.objects.values().flatten().cloned().collect()
    }

    /// Inserts an object under a type, keeping ids in natural order.
    pub fn add_object(&mut self, id: &str, type_name: &str) {
        let ids = self.objects.entry(type_name.to_string()).or_default();
        if !ids.iter().any(|x| x == id) {
            ids.push(id.to_string());
            ids.sort_by(|a, b| natural_cmp(a, b));
        }
    }

    /// Checks the internal invariants: every atom argument refers to a
    /// declared object (the cost literal aside) and the goal is nonempty.
    pub fn validate(&self) -> Result<(), PddlError> {
        let declared = self.declared_object_ids();
        for atom in self.init.iter().chain(self.goal.iter()) {
            if atom.is_cost_literal() {
                continue;
            }
            for arg in &atom.args {
                if !declared.contains(arg) {
                    return Err(PddlError::UndeclaredObject(arg.clone()));
                }
            }
        }
        if self.goal.is_empty() {
            return Err(PddlError::EmptyGoal);
        }
        Ok(())
    }
}
