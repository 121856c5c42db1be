//! Program validation against a table of known predicates. Produces
//! diagnostics rather than errors: callers decide what is fatal.

use super::{Atom, BodyElem, Program, Term};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Predicate names the schema itself defines, beyond any domain.
pub const SCHEMA_PREDICATES: &[(&str, usize)] = &[
    ("object", 2),
    ("cardinality", 2),
    ("init", 1),
    ("goal", 1),
    ("map", 3),
];

pub const BUILTIN_EXTERNALS: &[(&str, usize)] = &[
    ("make_id", 2),
    ("make_fact", 3),
    ("make_seq", 4),
    ("make_map", 4),
    ("gen_objects", 3),
];

/// Known predicates with their admissible arities.
#[derive(Debug, Clone, Default)]
pub struct PredicateTable {
    arities: BTreeMap<String, BTreeSet<usize>>,
}

impl PredicateTable {
    pub fn new() -> Self {
        let mut t = PredicateTable::default();
        for (name, arity) in SCHEMA_PREDICATES {
            t.insert(name, *arity);
        }
        t
    }

    pub fn insert(&mut self, name: &str, arity: usize) {
        self.arities.entry(name.to_string()).or_default().insert(arity);
    }

    pub fn knows(&self, name: &str) -> bool {
        self.arities.contains_key(name) || name.ends_with("_grid")
    }

    pub fn accepts(&self, name: &str, arity: usize) -> bool {
        if name.ends_with("_grid") {
            return arity == 3;
        }
        self.arities
            .get(name)
            .map(|s| s.contains(&arity))
            .unwrap_or(false)
    }

    pub fn expected(&self, name: &str) -> Vec<usize> {
        self.arities
            .get(name)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    /// Registers every predicate a rule head can produce, including the
    /// targets of fact-producing external calls.
    pub fn absorb_heads(&mut self, program: &Program) {
        for rule in &program.rules {
            self.absorb_atom(&rule.head);
        }
    }

    fn absorb_atom(&mut self, atom: &Atom) {
        if let Some(inner) = atom.wrapped_inner() {
            self.insert(&inner.predicate, inner.arity());
        }
        if atom.is_state_wrapper() {
            if let Term::ExternalCall(name, args) = &atom.args[0] {
                if let Some(produced) = external_output_pred(name, args) {
                    self.insert(&produced, 2);
                }
            }
        } else {
            self.insert(&atom.predicate, atom.arity());
        }
    }
}

/// The predicate an external call writes facts for, when it is named
/// literally in the call.
pub fn external_output_pred(name: &str, args: &[Term]) -> Option<String> {
    let idx = match name {
        "make_seq" => 2,
        "make_fact" | "make_map" => 1,
        _ => return None,
    };
    match args.get(idx) {
        Some(Term::Symbol(s)) => Some(s.clone()),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    UnknownPredicate(String),
    ArityMismatch {
        predicate: String,
        expected: Vec<usize>,
        got: usize,
    },
    UnknownExternal(String),
    UnsafeRule(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match &self.kind {
            DiagnosticKind::UnknownPredicate(p) => write!(f, "unknown predicate `{p}`"),
            DiagnosticKind::ArityMismatch {
                predicate,
                expected,
                got,
            } => write!(
                f,
                "arity mismatch for `{predicate}`: expected {expected:?}, got {got}"
            ),
            DiagnosticKind::UnknownExternal(p) => write!(f, "unknown external predicate `@{p}`"),
            DiagnosticKind::UnsafeRule(d) => write!(f, "unsafe rule: {d}"),
        }
    }
}

/// Checks every predicate reference in `program` against `known`. An
/// empty result means the program is clean. Callers validating a rule
/// file against itself should [`PredicateTable::absorb_heads`] first.
pub fn validate_program(program: &Program, known: &PredicateTable) -> Vec<Diagnostic> {
    let table = known;
    let mut out = Vec::new();
    for rule in &program.rules {
        // parsing enforces safety; constructed programs may not have been
        if let Err(e) = super::parser::check_safety(rule) {
            out.push(Diagnostic {
                kind: DiagnosticKind::UnsafeRule(e.to_string()),
                line: rule.line,
                col: rule.col,
            });
        }
        let mut atoms: Vec<&Atom> = vec![&rule.head];
        for b in &rule.body {
            if let BodyElem::Literal(l) = b {
                atoms.push(&l.atom);
            }
        }
        for atom in atoms {
            check_atom(atom, table, rule.line, rule.col, &mut out);
        }
    }
    out
}

fn check_atom(atom: &Atom, table: &PredicateTable, line: u32, col: u32, out: &mut Vec<Diagnostic>) {
    let mut note = |kind: DiagnosticKind| {
        let d = Diagnostic { kind, line, col };
        if !out.contains(&d) {
            out.push(d);
        }
    };

    if !table.knows(&atom.predicate) {
        note(DiagnosticKind::UnknownPredicate(atom.predicate.clone()));
    } else if !table.accepts(&atom.predicate, atom.arity()) {
        note(DiagnosticKind::ArityMismatch {
            predicate: atom.predicate.clone(),
            expected: table.expected(&atom.predicate),
            got: atom.arity(),
        });
    }

    if let Some(inner) = atom.wrapped_inner() {
        // the metric directive takes a quoted string, not objects
        if inner.predicate == "min_cost_metric" {
            return;
        }
        if !table.knows(&inner.predicate) {
            note(DiagnosticKind::UnknownPredicate(inner.predicate.clone()));
        } else if !table.accepts(&inner.predicate, inner.arity()) {
            note(DiagnosticKind::ArityMismatch {
                predicate: inner.predicate.clone(),
                expected: table.expected(&inner.predicate),
                got: inner.arity(),
            });
        }
        if inner.predicate == "map" && inner.arity() == 3 {
            if let Term::Symbol(rel) = &inner.args[1] {
                if !table.knows(rel) {
                    note(DiagnosticKind::UnknownPredicate(rel.clone()));
                }
            }
        }
    }

    if atom.is_state_wrapper() {
        if let Term::ExternalCall(name, args) = &atom.args[0] {
            check_external(name, args.len(), &mut note);
        }
    }
    for arg in &atom.args {
        if let Term::ExternalCall(name, eargs) = arg {
            check_external(name, eargs.len(), &mut note);
        }
    }
}

fn check_external(name: &str, arity: usize, note: &mut impl FnMut(DiagnosticKind)) {
    match BUILTIN_EXTERNALS.iter().find(|(n, _)| *n == name) {
        None => note(DiagnosticKind::UnknownExternal(name.to_string())),
        Some((_, expected)) if *expected != arity => note(DiagnosticKind::ArityMismatch {
            predicate: format!("@{name}"),
            expected: vec![*expected],
            got: arity,
        }),
        Some(_) => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::parse_program;

    fn barman_like_table() -> PredicateTable {
        let mut t = PredicateTable::new();
        for (name, arity) in [
            ("clean", 1),
            ("empty", 1),
            ("ontable", 1),
            ("handempty", 1),
            ("dispenses", 2),
            ("cocktail_part1", 2),
            ("cocktail_part2", 2),
            ("contains", 2),
        ] {
            t.insert(name, arity);
        }
        t
    }

    #[test]
    fn clean_program_has_no_diagnostics() {
        let p = parse_program(
            "cardinality(shot, 5).\ninit(clean(X)) :- object(X, shot).",
            "t",
        )
        .unwrap();
        assert!(validate_program(&p, &barman_like_table()).is_empty());
    }

    #[test]
    fn arity_mismatch_reported() {
        let p = parse_program("init(clean(shot1, extra)).", "t").unwrap();
        let d = validate_program(&p, &barman_like_table());
        assert_eq!(d.len(), 1);
        assert!(matches!(
            &d[0].kind,
            DiagnosticKind::ArityMismatch { predicate, got: 2, .. } if predicate == "clean"
        ));
    }

    #[test]
    fn unknown_predicate_reported() {
        let p = parse_program("init(frobnicate(x)).", "t").unwrap();
        let d = validate_program(&p, &barman_like_table());
        assert_eq!(d.len(), 1);
        assert!(matches!(
            &d[0].kind,
            DiagnosticKind::UnknownPredicate(p) if p == "frobnicate"
        ));
    }

    #[test]
    fn absorbed_rule_heads_define_predicates() {
        let p = parse_program(
            "first_level(X) :- object(X, level), not init(next(_, X)).\n\
             init(@make_seq(N-1, level, next, 0)) :- cardinality(level, N).",
            "t",
        )
        .unwrap();
        let mut t = PredicateTable::new();
        t.absorb_heads(&p);
        assert!(validate_program(&p, &t).is_empty());
    }

    #[test]
    fn constructed_unsafe_rules_are_diagnosed() {
        use crate::ir::{BodyElem, Literal, Rule, RuleKind, Term};
        let rule = Rule {
            head: Atom::new("p", vec![Term::var("X")]),
            body: vec![BodyElem::Literal(Literal {
                atom: Atom::new("q", vec![Term::var("Y")]),
                negated: false,
            })],
            kind: RuleKind::Rule,
            line: 0,
            col: 0,
        };
        let mut program = crate::ir::Program::new("built");
        program.rules.push(rule);
        let mut table = PredicateTable::new();
        table.insert("p", 1);
        table.insert("q", 1);
        let d = validate_program(&program, &table);
        assert_eq!(d.len(), 1);
        assert!(matches!(d[0].kind, DiagnosticKind::UnsafeRule(_)));
    }

    #[test]
    fn grid_predicates_allowed_by_name() {
        let p = parse_program("init(floortile_grid(0, 1, tile_0_1)).", "t").unwrap();
        assert!(validate_program(&p, &PredicateTable::new()).is_empty());
    }
}
