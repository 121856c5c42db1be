//! Compilation of a materialized fact base into a task PDDL.
//!
//! Three steps: object declarations from `object(X, T)` bindings with a
//! declared type, init atoms from `init(..)` facts whose predicate the
//! domain declares, and the goal conjunction from `goal(..)` facts.
//! Undeclared predicates and types (engine auxiliaries such as
//! `first_level`, grid atoms, leftover shorthands) are excluded.

use super::{DomainModel, PddlAtom, PddlError, TaskPddl};
use crate::factbase::FactBase;
use crate::ir::Term;
use crate::naming::natural_cmp;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, Default)]
pub struct CompileOptions {
    /// Object types whose ids are emitted with underscores replaced by
    /// hyphens (grid-derived names such as `tile_0_1` -> `tile-0-1`).
    pub hyphenate_types: BTreeSet<String>,
}

pub fn compile_task(
    facts: &FactBase,
    domain: &DomainModel,
    problem_name: &str,
    options: &CompileOptions,
) -> Result<TaskPddl, PddlError> {
    let mut task = TaskPddl {
        problem_name: problem_name.to_string(),
        domain_name: domain.name.clone(),
        ..TaskPddl::default()
    };

    // candidate types per object id
    let mut candidates: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for args in facts.args_of("object") {
        if let (Some(Term::Symbol(id)), Some(Term::Symbol(ty))) = (args.first(), args.get(1)) {
            if domain.declares_type(ty) {
                candidates.entry(id.clone()).or_default().insert(ty.clone());
            }
        }
    }
    // declare each object at its most specific declared type
    for (id, types) in &candidates {
        let minimal: Vec<&String> = types
            .iter()
            .filter(|t| {
                !types
                    .iter()
                    .any(|other| *other != **t && domain.is_subtype(other, t))
            })
            .collect();
        let mut chosen: Vec<&String> = minimal;
        chosen.sort_by(|a, b| natural_cmp(a, b));
        if let Some(ty) = chosen.first() {
            task.add_object(id, ty);
        }
    }

    for (state, target) in [("init", true), ("goal", false)] {
        for args in facts.args_of(state) {
            let Some(atom) = wrapped_pddl_atom(args) else {
                continue;
            };
            if atom.predicate == "min_cost_metric" {
                if state == "init" && domain.has_functions {
                    task.init.insert(PddlAtom::new("=", &["total-cost", "0"]));
                    task.metric_minimize_total_cost = true;
                }
                continue;
            }
            match domain.predicate(&atom.predicate) {
                Some(def) if def.args.len() == atom.args.len() => {
                    if target {
                        task.init.insert(atom);
                    } else {
                        task.goal.insert(atom);
                    }
                }
                _ => {}
            }
        }
    }

    if task.goal.is_empty() {
        return Err(PddlError::EmptyGoal);
    }

    apply_hyphenation(&mut task, options);
    Ok(task)
}

/// Converts the inner term of an `init`/`goal` fact to a PDDL atom.
fn wrapped_pddl_atom(args: &[Term]) -> Option<PddlAtom> {
    let inner = args.first()?;
    match inner {
        Term::Compound(name, cargs) => {
            if name == "min_cost_metric" {
                return Some(PddlAtom {
                    predicate: name.clone(),
                    args: Vec::new(),
                });
            }
            let mut rendered = Vec::new();
            for a in cargs {
                match a {
                    Term::Symbol(s) => rendered.push(s.clone()),
                    Term::Integer(n) => rendered.push(n.to_string()),
                    _ => return None,
                }
            }
            Some(PddlAtom {
                predicate: name.clone(),
                args: rendered,
            })
        }
        Term::Symbol(name) => Some(PddlAtom {
            predicate: name.clone(),
            args: Vec::new(),
        }),
        _ => None,
    }
}

fn apply_hyphenation(task: &mut TaskPddl, options: &CompileOptions) {
    if options.hyphenate_types.is_empty() {
        return;
    }
    let mut rename: BTreeMap<String, String> = BTreeMap::new();
    for ty in &options.hyphenate_types {
        if let Some(ids) = task.objects.get(ty) {
            for id in ids {
                if id.contains('_') {
                    rename.insert(id.clone(), id.replace('_', "-"));
                }
            }
        }
    }
    if rename.is_empty() {
        return;
    }
    for ids in task.objects.values_mut() {
        for id in ids.iter_mut() {
            if let Some(new) = rename.get(id) {
                *id = new.clone();
            }
        }
        ids.sort_by(|a, b| natural_cmp(a, b));
    }
    let map_atoms = |atoms: &BTreeSet<PddlAtom>| -> BTreeSet<PddlAtom> {
        atoms
            .iter()
            .map(|a| PddlAtom {
                predicate: a.predicate.clone(),
                args: a
                    .args
                    .iter()
                    .map(|arg| rename.get(arg).cloned().unwrap_or_else(|| arg.clone()))
                    .collect(),
            })
            .collect()
    };
    task.init = map_atoms(&task.init);
    task.goal = map_atoms(&task.goal);
}
