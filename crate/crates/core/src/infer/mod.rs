//! The inference engine: evaluates an intermediate representation plus
//! domain rules to the deterministic least fixpoint under stratified
//! negation, interleaved with cardinality and map expansion.

pub mod builtins;
pub mod expand;
pub mod stratify;

pub use builtins::{eval_builtin, BuiltinCall, BuiltinResult};
pub use expand::{
    cardinality_specs, expand_cardinalities, expand_maps, map_specs, CardinalitySpec, MapSpec,
    StateKind,
};
pub use stratify::{stratify, PredKey, Strata};


use crate::factbase::{match_args, substitute_atom, Bindings, FactBase, Provenance};
use crate::infer::builtins::pair_up;
use crate::ir::{ArithOp, Atom, BodyElem, CmpOp, Program, Rule, RuleKind, Term};
use crate::naming::NamingTemplates;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InferError {
    #[error("program is not stratifiable: {0}")]
    Unstratifiable(String),
    #[error("cardinality violation for type `{type_name}`: {named} objects named, cardinality is {required}")]
    CardinalityViolation {
        type_name: String,
        named: usize,
        required: i64,
    },
    #[error("map between `{left_type}` ({left_count}) and `{right_type}` ({right_count}) has no bijection")]
    MapArityMismatch {
        left_type: String,
        right_type: String,
        left_count: usize,
        right_count: usize,
    },
    #[error("builtin @{name}: {detail}")]
    BuiltinArity { name: String, detail: String },
    #[error("builtin @{name} called with non-ground arguments")]
    NonGroundBuiltin { name: String },
    #[error("arithmetic error: {0}")]
    Arith(String),
    #[error("rule produced a non-ground fact: {0}")]
    NonGroundHead(String),
    #[error("rule body cannot be scheduled: {0}")]
    UnschedulableBody(String),
}

// ---------------------------------------------------------------------
// term evaluation

/// Replaces evaluable arithmetic with integers; leaves variables,
/// wildcards and external calls in place.
fn eval_arith_in(term: &Term) -> Result<Term, InferError> {
    match term {
        Term::Arith(op, l, r) => {
            let l = eval_arith_in(l)?;
            let r = eval_arith_in(r)?;
            match (&l, &r) {
                (Term::Integer(a), Term::Integer(b)) => match op {
                    ArithOp::Add => Ok(Term::Integer(a + b)),
                    ArithOp::Sub => Ok(Term::Integer(a - b)),
                    ArithOp::Mul => Ok(Term::Integer(a * b)),
                    ArithOp::Range => Ok(Term::Arith(
                        ArithOp::Range,
                        Box::new(l.clone()),
                        Box::new(r.clone()),
                    )),
                },
                _ => Err(InferError::Arith(format!(
                    "non-integer operand in `{term}`"
                ))),
            }
        }
        Term::Compound(name, args) => Ok(Term::Compound(
            name.clone(),
            args.iter()
                .map(eval_arith_in)
                .collect::<Result<Vec<_>, _>>()?,
        )),
        Term::ExternalCall(name, args) => Ok(Term::ExternalCall(
            name.clone(),
            args.iter()
                .map(eval_arith_in)
                .collect::<Result<Vec<_>, _>>()?,
        )),
        _ => Ok(term.clone()),
    }
}

fn all_vars(t: &Term, out: &mut BTreeSet<String>) {
    let mut v = Vec::new();
    t.collect_vars(&mut v);
    out.extend(v);
}

/// Variables a positive literal binds when matched: plain variable
/// positions outside arithmetic and external calls.
fn plain_vars(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Variable(v) => {
            out.insert(v.clone());
        }
        Term::Compound(_, args) => {
            for a in args {
                plain_vars(a, out);
            }
        }
        _ => {}
    }
}

/// Variables occurring under arithmetic nodes (must be pre-bound).
fn arith_vars(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Arith(_, l, r) => {
            all_vars(l, out);
            all_vars(r, out);
        }
        Term::Compound(_, args) | Term::ExternalCall(_, args) => {
            for a in args {
                arith_vars(a, out);
            }
        }
        _ => {}
    }
}

// ---------------------------------------------------------------------
// body solving

fn elem_ready(elem: &BodyElem, bound: &BTreeSet<String>) -> bool {
    match elem {
        BodyElem::Literal(l) if !l.negated => {
            let mut need = BTreeSet::new();
            for a in &l.atom.args {
                arith_vars(a, &mut need);
            }
            need.is_subset(bound)
        }
        BodyElem::Literal(l) => {
            let mut need = BTreeSet::new();
            for a in &l.atom.args {
                all_vars(a, &mut need);
            }
            need.is_subset(bound)
        }
        BodyElem::Compare(op, lhs, rhs) => {
            let mut lv = BTreeSet::new();
            let mut rv = BTreeSet::new();
            all_vars(lhs, &mut lv);
            all_vars(rhs, &mut rv);
            if lv.is_subset(bound) && rv.is_subset(bound) {
                return true;
            }
            if *op == CmpOp::Eq {
                let lhs_bindable = matches!(lhs, Term::Variable(_)) && rv.is_subset(bound);
                let rhs_bindable = matches!(rhs, Term::Variable(_)) && lv.is_subset(bound);
                return lhs_bindable || rhs_bindable;
            }
            false
        }
    }
}

fn elem_binds(elem: &BodyElem, bound: &mut BTreeSet<String>) {
    match elem {
        BodyElem::Literal(l) if !l.negated => {
            for a in &l.atom.args {
                plain_vars(a, bound);
            }
        }
        BodyElem::Compare(CmpOp::Eq, lhs, rhs) => {
            if let Term::Variable(v) = lhs {
                bound.insert(v.clone());
            }
            if let Term::Variable(v) = rhs {
                bound.insert(v.clone());
            }
        }
        _ => {}
    }
}

/// Orders body elements so every element is evaluable when reached.
fn schedule_body(body: &[BodyElem]) -> Result<Vec<usize>, InferError> {
    let mut order = Vec::new();
    let mut done = vec![false; body.len()];
    let mut bound = BTreeSet::new();
    while order.len() < body.len() {
        let next = body
            .iter()
            .enumerate()
            .find(|(i, e)| !done[*i] && elem_ready(e, &bound));
        match next {
            Some((i, e)) => {
                done[i] = true;
                elem_binds(e, &mut bound);
                order.push(i);
            }
            None => {
                let stuck: Vec<String> = body
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !done[*i])
                    .map(|(_, e)| e.to_string())
                    .collect();
                return Err(InferError::UnschedulableBody(stuck.join(", ")));
            }
        }
    }
    Ok(order)
}

fn exists_match(facts: &FactBase, pattern: &Atom) -> bool {
    facts.args_of(&pattern.predicate).any(|args| {
        let mut subst = Bindings::new();
        match_args(&pattern.args, args, &mut subst)
    })
}

fn compare_ints(op: CmpOp, a: i64, b: i64) -> bool {
    match op {
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
        CmpOp::Lt => a < b,
        CmpOp::Le => a <= b,
        CmpOp::Gt => a > b,
        CmpOp::Ge => a >= b,
    }
}

/// All substitutions satisfying `body` against `facts`.
fn solve_body(body: &[BodyElem], facts: &FactBase) -> Result<Vec<Bindings>, InferError> {
    let order = schedule_body(body)?;
    let mut substs = vec![Bindings::new()];
    for idx in order {
        let mut next: Vec<Bindings> = Vec::new();
        match &body[idx] {
            BodyElem::Literal(l) if !l.negated => {
                for subst in &substs {
                    let pattern = substitute_atom(&l.atom, subst);
                    let pattern = Atom {
                        predicate: pattern.predicate,
                        args: pattern
                            .args
                            .iter()
                            .map(eval_arith_in)
                            .collect::<Result<Vec<_>, _>>()?,
                    };
                    for args in facts.args_of(&pattern.predicate) {
                        let mut s = subst.clone();
                        if match_args(&pattern.args, args, &mut s) {
                            next.push(s);
                        }
                    }
                }
            }
            BodyElem::Literal(l) => {
                for subst in &substs {
                    let pattern = substitute_atom(&l.atom, subst);
                    let pattern = Atom {
                        predicate: pattern.predicate,
                        args: pattern
                            .args
                            .iter()
                            .map(eval_arith_in)
                            .collect::<Result<Vec<_>, _>>()?,
                    };
                    if !exists_match(facts, &pattern) {
                        next.push(subst.clone());
                    }
                }
            }
            BodyElem::Compare(op, lhs, rhs) => {
                for subst in &substs {
                    let l = eval_arith_in(&crate::factbase::substitute(lhs, subst))?;
                    let r = eval_arith_in(&crate::factbase::substitute(rhs, subst))?;
                    match (&l, &r) {
                        // binding: V = value or V = lo..hi
                        (Term::Variable(v), value) | (value, Term::Variable(v))
                            if *op == CmpOp::Eq && value.is_ground()
                                || matches!(value, Term::Arith(ArithOp::Range, _, _))
                                    && *op == CmpOp::Eq =>
                        {
                            match value {
                                Term::Arith(ArithOp::Range, lo, hi) => {
                                    if let (Term::Integer(lo), Term::Integer(hi)) =
                                        (lo.as_ref(), hi.as_ref())
                                    {
                                        for i in *lo..=*hi {
                                            let mut s = subst.clone();
                                            s.insert(v.clone(), Term::Integer(i));
                                            next.push(s);
                                        }
                                    } else {
                                        return Err(InferError::Arith(format!(
                                            "non-integer range `{value}`"
                                        )));
                                    }
                                }
                                _ => {
                                    let mut s = subst.clone();
                                    s.insert(v.clone(), value.clone());
                                    next.push(s);
                                }
                            }
                        }
                        (a, b) if a.is_ground() && b.is_ground() => {
                            let holds = match (a, b) {
                                (Term::Integer(x), Term::Integer(y)) => compare_ints(*op, *x, *y),
                                (x, y) if *op == CmpOp::Eq => x == y,
                                (x, y) if *op == CmpOp::Ne => x != y,
                                _ => {
                                    return Err(InferError::Arith(format!(
                                        "cannot compare `{a}` {op} `{b}`"
                                    )))
                                }
                            };
                            if holds {
                                next.push(subst.clone());
                            }
                        }
                        // membership: ground = lo..hi
                        (Term::Integer(x), Term::Arith(ArithOp::Range, lo, hi))
                        | (Term::Arith(ArithOp::Range, lo, hi), Term::Integer(x))
                            if *op == CmpOp::Eq =>
                        {
                            if let (Term::Integer(lo), Term::Integer(hi)) =
                                (lo.as_ref(), hi.as_ref())
                            {
                                if lo <= x && x <= hi {
                                    next.push(subst.clone());
                                }
                            }
                        }
                        _ => {
                            return Err(InferError::Arith(format!(
                                "cannot evaluate comparison `{l} {op} {r}`"
                            )))
                        }
                    }
                }
            }
        }
        substs = next;
        if substs.is_empty() {
            break;
        }
    }
    Ok(substs)
}

// ---------------------------------------------------------------------
// head instantiation

fn contains_generator(t: &Term) -> bool {
    match t {
        Term::ExternalCall(name, _) => name == "gen_objects" || name == "make_id",
        Term::Compound(_, args) => args.iter().any(contains_generator),
        _ => false,
    }
}

/// Expands a substituted head term into its ground alternatives,
/// evaluating id-producing external calls.
fn expand_term(
    t: &Term,
    facts: &FactBase,
    naming: &NamingTemplates,
) -> Result<Vec<Term>, InferError> {
    match t {
        Term::ExternalCall(name, args) => {
            let call = BuiltinCall {
                name: name.clone(),
                args: args.clone(),
            };
            match eval_builtin(&call, facts, naming)? {
                BuiltinResult::Ids(ids) => Ok(ids),
                BuiltinResult::Facts(_) => Err(InferError::BuiltinArity {
                    name: name.clone(),
                    detail: "fact-producing builtin used in an argument position".to_string(),
                }),
            }
        }
        Term::Compound(name, args) => {
            let mut alternatives: Vec<Vec<Term>> = vec![Vec::new()];
            for a in args {
                let choices = expand_term(a, facts, naming)?;
                let mut grown = Vec::new();
                for base in &alternatives {
                    for c in &choices {
                        let mut v = base.clone();
                        v.push(c.clone());
                        grown.push(v);
                    }
                }
                alternatives = grown;
            }
            Ok(alternatives
                .into_iter()
                .map(|args| Term::Compound(name.clone(), args))
                .collect())
        }
        _ => Ok(vec![t.clone()]),
    }
}

fn instantiate_head(
    head: &Atom,
    subst: &Bindings,
    facts: &FactBase,
    naming: &NamingTemplates,
) -> Result<(Vec<Atom>, Provenance), InferError> {
    let substituted = substitute_atom(head, subst);
    let evaluated = Atom {
        predicate: substituted.predicate.clone(),
        args: substituted
            .args
            .iter()
            .map(eval_arith_in)
            .collect::<Result<Vec<_>, _>>()?,
    };
    let provenance = if evaluated.args.iter().any(contains_generator) {
        Provenance::Generated
    } else {
        Provenance::Inferred
    };

    // fact-producing call directly under a state wrapper
    if evaluated.is_state_wrapper() {
        if let Term::ExternalCall(name, args) = &evaluated.args[0] {
            let call = BuiltinCall {
                name: name.clone(),
                args: args.clone(),
            };
            return match eval_builtin(&call, facts, naming)? {
                BuiltinResult::Facts(inner) => Ok((
                    inner
                        .into_iter()
                        .map(|a| {
                            Atom::new(
                                &evaluated.predicate,
                                vec![Term::Compound(a.predicate, a.args)],
                            )
                        })
                        .collect(),
                    provenance,
                )),
                BuiltinResult::Ids(_) => Err(InferError::BuiltinArity {
                    name: name.clone(),
                    detail: "id-producing builtin used as a state fact".to_string(),
                }),
            };
        }
    }

    let mut atoms = Vec::new();
    let mut alternatives: Vec<Vec<Term>> = vec![Vec::new()];
    for a in &evaluated.args {
        let choices = expand_term(a, facts, naming)?;
        let mut grown = Vec::new();
        for base in &alternatives {
            for c in &choices {
                let mut v = base.clone();
                v.push(c.clone());
                grown.push(v);
            }
        }
        alternatives = grown;
    }
    for args in alternatives {
        let atom = Atom {
            predicate: evaluated.predicate.clone(),
            args,
        };
        if !atom.is_ground() {
            return Err(InferError::NonGroundHead(atom.to_string()));
        }
        atoms.push(atom);
    }
    Ok((atoms, provenance))
}

// ---------------------------------------------------------------------
// saturation

fn apply_rule(
    rule: &Rule,
    facts: &mut FactBase,
    naming: &NamingTemplates,
) -> Result<bool, InferError> {
    let mut added = false;
    for subst in solve_body(&rule.body, facts)? {
        let (atoms, prov) = instantiate_head(&rule.head, &subst, facts, naming)?;
        for atom in atoms {
            added |= facts.insert(atom, prov);
        }
    }
    Ok(added)
}

/// The default-rule guard: blocked when any fact shares the wrapper,
/// inner predicate and first inner argument.
fn default_guard_blocked(candidate: &Atom, facts: &FactBase) -> bool {
    let Some(inner) = candidate.wrapped_inner() else {
        return facts.contains(candidate);
    };
    facts.args_of(&candidate.predicate).any(|args| {
        matches!(args.first(), Some(Term::Compound(name, cargs))
            if *name == inner.predicate
                && cargs.first() == inner.args.first())
            || (inner.args.is_empty()
                && matches!(args.first(), Some(Term::Symbol(s)) if *s == inner.predicate))
    })
}

fn saturate_group(
    group: &[Rule],
    facts: &mut FactBase,
    naming: &NamingTemplates,
) -> Result<bool, InferError> {
    let mut any = false;
    loop {
        let mut added = false;
        loop {
            let mut round = false;
            for rule in group.iter().filter(|r| r.kind != RuleKind::Default) {
                round |= apply_rule(rule, facts, naming)?;
            }
            added |= round;
            if !round {
                break;
            }
        }
        let snapshot = facts.clone();
        for rule in group.iter().filter(|r| r.kind == RuleKind::Default) {
            for subst in solve_body(&rule.body, &snapshot)? {
                let (atoms, prov) = instantiate_head(&rule.head, &subst, &snapshot, naming)?;
                for atom in atoms {
                    if !default_guard_blocked(&atom, &snapshot) {
                        added |= facts.insert(atom, prov);
                    }
                }
            }
        }
        any |= added;
        if !added {
            break;
        }
    }
    Ok(any)
}

/// Rules whose head delegates to map expansion; the engine realizes the
/// expansion itself, once, from the map atoms.
pub fn is_delegated_map_rule(rule: &Rule) -> bool {
    rule.head.is_state_wrapper()
        && matches!(&rule.head.args[0], Term::ExternalCall(name, _) if name == "make_map")
}

/// Computes the materialized representation of `ir` under `pack_rules`:
/// stated facts, everything the rules derive, generated objects for
/// unmet cardinalities, and expanded map bijections.
///
/// The result is deterministic and independent of rule ordering in
/// either program.
pub fn materialize(
    ir: &Program,
    pack_rules: &Program,
    naming: &NamingTemplates,
) -> Result<FactBase, InferError> {
    let mut combined = Program::new("combined");
    combined.extend_dedup(ir);
    combined.extend_dedup(pack_rules);

    let mut facts = FactBase::new();
    let mut rules = Program::new("rules");
    for r in combined.rules {
        if is_delegated_map_rule(&r) {
            continue;
        }
        if r.is_fact() && r.head.is_ground() {
            facts.insert(r.head, Provenance::Stated);
        } else {
            rules.rules.push(r);
        }
    }
    let strata = stratify(&rules)?;

    let mut consumed: Vec<(MapSpec, usize)> = Vec::new();
    loop {
        let mut changed = false;
        for group in &strata.groups {
            changed |= saturate_group(group, &mut facts, naming)?;
        }

        let card_specs = cardinality_specs(&facts);
        let expanded = expand_cardinalities(&facts, &card_specs, naming)?;
        if expanded != facts {
            facts = expanded;
            changed = true;
        }

        for spec in map_specs(&facts) {
            let left = facts.objects_of_type(&spec.left_type);
            let right = facts.objects_of_type(&spec.right_type);
            if left.len() == right.len() && !left.is_empty() {
                for fact in pair_up(&spec.relation, &left, &right) {
                    facts.insert(
                        Atom::new(
                            spec.state.wrapper(),
                            vec![Term::Compound(fact.predicate, fact.args)],
                        ),
                        Provenance::Inferred,
                    );
                }
                facts.remove(&spec.source_atom());
                consumed.push((spec, left.len()));
                changed = true;
            }
        }

        if !changed {
            break;
        }
    }

    // leftover maps: an empty bijection is fine, anything else is not
    for spec in map_specs(&facts) {
        let left = facts.objects_of_type(&spec.left_type);
        let right = facts.objects_of_type(&spec.right_type);
        if left.is_empty() && right.is_empty() {
            facts.remove(&spec.source_atom());
        } else {
            return Err(InferError::MapArityMismatch {
                left_type: spec.left_type.clone(),
                right_type: spec.right_type.clone(),
                left_count: left.len(),
                right_count: right.len(),
            });
        }
    }
    // expansions must still be consistent with the final object sets
    for (spec, n) in &consumed {
        let left = facts.objects_of_type(&spec.left_type);
        let right = facts.objects_of_type(&spec.right_type);
        if left.len() != *n || right.len() != *n {
            return Err(InferError::MapArityMismatch {
                left_type: spec.left_type.clone(),
                right_type: spec.right_type.clone(),
                left_count: left.len(),
                right_count: right.len(),
            });
        }
    }
    for spec in cardinality_specs(&facts) {
        let named = facts.objects_of_type(&spec.type_name).len();
        if named as i64 != spec.required_count {
            return Err(InferError::CardinalityViolation {
                type_name: spec.type_name.clone(),
                named,
                required: spec.required_count,
            });
        }
    }

    // The interleaved passes only exist to discover the generation and
    // expansion outcomes. Re-derive the model once over the final base
    // facts so negative premises are judged against the final state: a
    // rule firing early against a not-yet-generated object would
    // otherwise survive with a premise that is false in the result.
    let mut base = FactBase::new();
    for (atom, prov) in facts.atoms_with_provenance() {
        if prov != Provenance::Inferred {
            base.insert(atom, prov);
        }
    }
    for (spec, _) in &consumed {
        let left = facts.objects_of_type(&spec.left_type);
        let right = facts.objects_of_type(&spec.right_type);
        for fact in pair_up(&spec.relation, &left, &right) {
            base.insert(
                Atom::new(
                    spec.state.wrapper(),
                    vec![Term::Compound(fact.predicate, fact.args)],
                ),
                Provenance::Inferred,
            );
        }
    }
    for group in &strata.groups {
        saturate_group(group, &mut base, naming)?;
    }
    Ok(base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_program;

    fn run(ir: &str, pack: &str) -> FactBase {
        let ir = parse_program(ir, "ir").unwrap();
        let pack = parse_program(pack, "pack").unwrap();
        materialize(&ir, &pack, &NamingTemplates::default()).unwrap()
    }

    #[test]
    fn empty_programs_give_empty_factbase() {
        assert!(run("", "").is_empty());
    }

    #[test]
    fn plain_rule_saturation() {
        let facts = run(
            "init(on(b1, b2)). init(on(b2, b3)).",
            "above(X, Y) :- init(on(X, Y)).\nabove(X, Z) :- above(X, Y), above(Y, Z).",
        );
        assert!(facts.contains(&Atom::new(
            "above",
            vec![Term::sym("b1"), Term::sym("b3")]
        )));
    }

    #[test]
    fn hand_objects_derived_from_handempty() {
        let facts = run(
            "init(handempty(left)).",
            "object(X, hand) :- init(handempty(X)).",
        );
        assert_eq!(facts.objects_of_type("hand"), vec!["left"]);
    }

    #[test]
    fn seq_then_cardinality_generates_no_extra_levels() {
        let facts = run(
            "cardinality(level, 3).",
            "init(@make_seq(N-1, level, next, 0)) :- cardinality(level, N).\n\
             object(L, level) :- init(next(L, _)).\n\
             object(L, level) :- init(next(_, L)).\n\
             first_level(X) :- object(X, level), not init(next(_, X)).",
        );
        assert_eq!(facts.objects_of_type("level"), vec!["level0", "level1", "level2"]);
        assert!(facts.contains(&Atom::new("first_level", vec![Term::sym("level0")])));
    }

    #[test]
    fn defaults_fill_unstated_goals() {
        let facts = run(
            "init(termes_pos_grid(1, 1, pos_1_1)).\n\
             init(termes_pos_grid(1, 2, pos_1_2)).\n\
             goal(height(pos_1_2, n2)).",
            "termes_pos_grid(R, C, Z) :- init(termes_pos_grid(R, C, Z)).\n\
             default goal(height(Z, n0)) :- termes_pos_grid(_, _, Z).",
        );
        assert!(facts.contains(&Atom::new(
            "goal",
            vec![Term::compound(
                "height",
                vec![Term::sym("pos_1_1"), Term::sym("n0")]
            )]
        )));
        assert!(!facts.contains(&Atom::new(
            "goal",
            vec![Term::compound(
                "height",
                vec![Term::sym("pos_1_2"), Term::sym("n0")]
            )]
        )));
    }

    #[test]
    fn arithmetic_comparison_binds_a_variable() {
        let facts = run("limit(3).", "next_value(X) :- limit(N), X = N+1.");
        assert!(facts.contains(&Atom::new("next_value", vec![Term::Integer(4)])));
        let facts = run(
            "bound(4). value(2). value(5).",
            "small(X) :- value(X), bound(B), X < B.",
        );
        assert!(facts.contains(&Atom::new("small", vec![Term::Integer(2)])));
        assert!(!facts.contains(&Atom::new("small", vec![Term::Integer(5)])));
    }

    #[test]
    fn range_binding_enumerates() {
        let facts = run(
            "limit(3).",
            "value(X) :- limit(N), X = 1..N.",
        );
        for i in 1..=3 {
            assert!(facts.contains(&Atom::new("value", vec![Term::Integer(i)])));
        }
        assert_eq!(facts.atoms().filter(|a| a.predicate == "value").count(), 3);
    }

    #[test]
    fn map_expansion_waits_for_generated_objects() {
        let facts = run(
            "cardinality(dispenser, 2).\n\
             init(cocktail_part1(c1, ingredient1)).\n\
             init(cocktail_part1(c2, ingredient2)).\n\
             init(map(dispenser, dispenses, ingredient)).",
            "object(X, ingredient) :- init(cocktail_part1(_, X)).",
        );
        assert!(facts.contains(&Atom::new(
            "init",
            vec![Term::compound(
                "dispenses",
                vec![Term::sym("dispenser1"), Term::sym("ingredient1")]
            )]
        )));
        // the consumed map atom is gone
        assert!(map_specs(&facts).is_empty());
    }

    #[test]
    fn grid_arithmetic_joins() {
        let facts = run(
            "init(floortile_grid(1, 1, t_1_1)).\n\
             init(floortile_grid(2, 1, t_2_1)).",
            "floortile_grid(R, C, Z) :- init(floortile_grid(R, C, Z)).\n\
             init(up(Z1, Z2)) :- floortile_grid(R, C, Z1), floortile_grid(R-1, C, Z2).",
        );
        assert!(facts.contains(&Atom::new(
            "init",
            vec![Term::compound(
                "up",
                vec![Term::sym("t_2_1"), Term::sym("t_1_1")]
            )]
        )));
    }

    #[test]
    fn negation_sees_generated_objects() {
        // the generated widget1 must defeat the negative premise even
        // though it does not exist when the rule first becomes evaluable
        let facts = run(
            "cardinality(widget, 1).",
            "ghost :- not object(widget1, widget).",
        );
        assert!(facts.contains(&Atom::new(
            "object",
            vec![Term::sym("widget1"), Term::sym("widget")]
        )));
        assert!(!facts.contains(&Atom::new("ghost", vec![])));
    }

    #[test]
    fn cardinality_contradiction_fails() {
        let ir = parse_program(
            "cardinality(shot, 3). object(shot1, shot). object(shot2, shot). object(shot3, shot). object(shot4, shot).",
            "ir",
        )
        .unwrap();
        let empty = parse_program("", "pack").unwrap();
        let err = materialize(&ir, &empty, &NamingTemplates::default()).unwrap_err();
        assert!(matches!(err, InferError::CardinalityViolation { .. }));
    }
}
