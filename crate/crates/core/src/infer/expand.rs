//! Cardinality and bijective-map expansion over a fact base.

use crate::factbase::{FactBase, Provenance};
use crate::infer::builtins::pair_up;
use crate::infer::InferError;
use crate::ir::{Atom, Term};
use crate::naming::NamingTemplates;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CardinalitySpec {
    pub type_name: String,
    pub required_count: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum StateKind {
    Init,
    Goal,
}

impl StateKind {
    pub fn wrapper(&self) -> &'static str {
        match self {
            StateKind::Init => "init",
            StateKind::Goal => "goal",
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.wrapper())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MapSpec {
    pub state: StateKind,
    pub left_type: String,
    pub relation: String,
    pub right_type: String,
}

impl MapSpec {
    /// The `<state>(map(left, relation, right))` atom this spec came from.
    pub fn source_atom(&self) -> Atom {
        Atom::new(
            self.state.wrapper(),
            vec![Term::compound(
                "map",
                vec![
                    Term::sym(&self.left_type),
                    Term::sym(&self.relation),
                    Term::sym(&self.right_type),
                ],
            )],
        )
    }
}

/// Reads all `cardinality(type, n)` facts as specs, sorted by type.
pub fn cardinality_specs(facts: &FactBase) -> Vec<CardinalitySpec> {
    let mut specs: Vec<CardinalitySpec> = facts
        .args_of("cardinality")
        .filter_map(|args| match (args.first(), args.get(1)) {
            (Some(Term::Symbol(t)), Some(Term::Integer(n))) => Some(CardinalitySpec {
                type_name: t.clone(),
                required_count: *n,
            }),
            _ => None,
        })
        .collect();
    specs.sort();
    specs.dedup();
    specs
}

/// Reads all `init(map(..))` / `goal(map(..))` atoms as specs.
pub fn map_specs(facts: &FactBase) -> Vec<MapSpec> {
    let mut specs = Vec::new();
    for state in [StateKind::Init, StateKind::Goal] {
        for args in facts.args_of(state.wrapper()) {
            if let Some(Term::Compound(name, margs)) = args.first() {
                if name == "map" && margs.len() == 3 {
                    if let (Term::Symbol(l), Term::Symbol(p), Term::Symbol(r)) =
                        (&margs[0], &margs[1], &margs[2])
                    {
                        specs.push(MapSpec {
                            state,
                            left_type: l.clone(),
                            relation: p.clone(),
                            right_type: r.clone(),
                        });
                    }
                }
            }
        }
    }
    specs.sort();
    specs.dedup();
    specs
}

/// Tops up each type to its required count with fresh templated ids.
/// Fails when more objects are already named than the cardinality allows.
pub fn expand_cardinalities(
    facts: &FactBase,
    specs: &[CardinalitySpec],
    naming: &NamingTemplates,
) -> Result<FactBase, InferError> {
    let mut out = facts.clone();
    let mut sorted = specs.to_vec();
    sorted.sort();
    for spec in &sorted {
        let named = out.objects_of_type(&spec.type_name).len() as i64;
        if named > spec.required_count {
            return Err(InferError::CardinalityViolation {
                type_name: spec.type_name.clone(),
                named: named as usize,
                required: spec.required_count,
            });
        }
        let mut missing = spec.required_count - named;
        let mut index = 1i64;
        while missing > 0 {
            let id = naming.make_id(&spec.type_name, index);
            index += 1;
            if out.object_id_exists(&id) {
                continue;
            }
            out.insert(
                Atom::new("object", vec![Term::Symbol(id), Term::sym(&spec.type_name)]),
                Provenance::Generated,
            );
            missing -= 1;
        }
    }
    Ok(out)
}

/// Expands each map shorthand into the canonical index-aligned bijection
/// and removes the consumed map atom. Fails when the two object sets
/// differ in size.
pub fn expand_maps(facts: &FactBase, specs: &[MapSpec]) -> Result<FactBase, InferError> {
    let mut out = facts.clone();
    let mut sorted = specs.to_vec();
    sorted.sort();
    for spec in &sorted {
        let left = out.objects_of_type(&spec.left_type);
        let right = out.objects_of_type(&spec.right_type);
        if left.len() != right.len() {
            return Err(InferError::MapArityMismatch {
                left_type: spec.left_type.clone(),
                right_type: spec.right_type.clone(),
                left_count: left.len(),
                right_count: right.len(),
            });
        }
        for fact in pair_up(&spec.relation, &left, &right) {
            out.insert(
                Atom::new(spec.state.wrapper(), vec![Term::Compound(fact.predicate, fact.args)]),
                Provenance::Inferred,
            );
        }
        out.remove(&spec.source_atom());
    }
    Ok(out)
}
