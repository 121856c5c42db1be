//! The logic-program intermediate representation: terms, atoms, rules and
//! whole programs, plus the text syntax (`.lp` files, one `.`-terminated
//! clause per statement, `%` line comments).

mod parser;
mod validate;

pub use parser::{parse_program, ParseError};
pub use validate::{
    external_output_pred, validate_program, Diagnostic, DiagnosticKind, PredicateTable,
    BUILTIN_EXTERNALS, SCHEMA_PREDICATES,
};

use std::fmt;

/// Arithmetic operators allowed inside term positions (`R-1`, `X+1`,
/// `N*2`) plus the interval constructor `A..B` used on the right-hand
/// side of a binding comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Range,
}

impl fmt::Display for ArithOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithOp::Add => write!(f, "+"),
            ArithOp::Sub => write!(f, "-"),
            ArithOp::Mul => write!(f, "*"),
            ArithOp::Range => write!(f, ".."),
        }
    }
}

/// Comparison operators usable as rule body elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmpOp::Eq => write!(f, "="),
            CmpOp::Ne => write!(f, "!="),
            CmpOp::Lt => write!(f, "<"),
            CmpOp::Le => write!(f, "<="),
            CmpOp::Gt => write!(f, ">"),
            CmpOp::Ge => write!(f, ">="),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// Lowercase-leading identifier constant.
    Symbol(String),
    Integer(i64),
    /// Uppercase- or underscore-leading identifier.
    Variable(String),
    /// The `_` wildcard.
    Anonymous,
    Compound(String, Vec<Term>),
    /// `@name(args)` — evaluated by the inference engine.
    ExternalCall(String, Vec<Term>),
    Arith(ArithOp, Box<Term>, Box<Term>),
    /// Quoted string, e.g. the metric directive argument.
    Text(String),
}

impl Term {
    pub fn sym(s: &str) -> Term {
        Term::Symbol(s.to_string())
    }

    pub fn var(s: &str) -> Term {
        Term::Variable(s.to_string())
    }

    pub fn compound(f: &str, args: Vec<Term>) -> Term {
        Term::Compound(f.to_string(), args)
    }

    /// A ground term contains no variable, wildcard, unevaluated
    /// arithmetic or external call.
    pub fn is_ground(&self) -> bool {
        match self {
            Term::Symbol(_) | Term::Integer(_) | Term::Text(_) => true,
            Term::Variable(_) | Term::Anonymous | Term::Arith(..) | Term::ExternalCall(..) => {
                false
            }
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Variable(v) => out.push(v.clone()),
            Term::Compound(_, args) | Term::ExternalCall(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
            Term::Arith(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            _ => {}
        }
    }

    pub fn contains_external(&self) -> bool {
        match self {
            Term::ExternalCall(..) => true,
            Term::Compound(_, args) => args.iter().any(Term::contains_external),
            Term::Arith(_, l, r) => l.contains_external() || r.contains_external(),
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Symbol(s) => write!(f, "{s}"),
            Term::Integer(n) => write!(f, "{n}"),
            Term::Variable(v) => write!(f, "{v}"),
            Term::Anonymous => write!(f, "_"),
            Term::Compound(name, args) => write_call(f, name, args),
            Term::ExternalCall(name, args) => {
                write!(f, "@")?;
                write_call(f, name, args)
            }
            Term::Arith(op, l, r) => write!(f, "{l}{op}{r}"),
            Term::Text(s) => write!(f, "\"{s}\""),
        }
    }
}

fn write_call(f: &mut fmt::Formatter<'_>, name: &str, args: &[Term]) -> fmt::Result {
    write!(f, "{name}")?;
    if !args.is_empty() {
        write!(f, "(")?;
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: &str, args: Vec<Term>) -> Atom {
        Atom {
            predicate: predicate.to_string(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn collect_vars(&self, out: &mut Vec<String>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }

    /// For `init`/`goal` wrappers, the wrapped inner atom if there is one.
    /// A symbol argument counts as a zero-arity inner atom (`init(arm_empty)`).
    pub fn wrapped_inner(&self) -> Option<Atom> {
        if !self.is_state_wrapper() {
            return None;
        }
        match &self.args[0] {
            Term::Compound(name, args) => Some(Atom {
                predicate: name.clone(),
                args: args.clone(),
            }),
            Term::Symbol(name) => Some(Atom {
                predicate: name.clone(),
                args: Vec::new(),
            }),
            _ => None,
        }
    }

    /// True for `init/1` and `goal/1`.
    pub fn is_state_wrapper(&self) -> bool {
        (self.predicate == "init" || self.predicate == "goal") && self.args.len() == 1
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_call(f, &self.predicate, &self.args)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "not {}", self.atom)
        } else {
            write!(f, "{}", self.atom)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BodyElem {
    Literal(Literal),
    Compare(CmpOp, Term, Term),
}

impl fmt::Display for BodyElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodyElem::Literal(l) => write!(f, "{l}"),
            BodyElem::Compare(op, l, r) => write!(f, "{l} {op} {r}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Fact,
    Rule,
    /// A guarded head: asserted only when no other fact with the same
    /// wrapper, predicate and first argument exists.
    Default,
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub head: Atom,
    pub body: Vec<BodyElem>,
    pub kind: RuleKind,
    /// 1-based source position, for diagnostics only.
    pub line: u32,
    pub col: u32,
}

impl Rule {
    pub fn fact(head: Atom) -> Rule {
        Rule {
            head,
            body: Vec::new(),
            kind: RuleKind::Fact,
            line: 0,
            col: 0,
        }
    }

    pub fn is_fact(&self) -> bool {
        self.body.is_empty() && self.kind == RuleKind::Fact
    }
}

// Source positions are not part of rule identity.
impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.body == other.body && self.kind == other.kind
    }
}
impl Eq for Rule {}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == RuleKind::Default {
            write!(f, "default ")?;
        }
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " :- ")?;
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        write!(f, ".")
    }
}

#[derive(Debug, Clone, Default)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub source_name: String,
    /// Non-fatal notes from parsing (dropped duplicates, etc).
    pub warnings: Vec<String>,
}

// structural equality: the rules, nothing else
impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules
    }
}
impl Eq for Program {}

impl Program {
    pub fn new(source_name: &str) -> Program {
        Program {
            rules: Vec::new(),
            source_name: source_name.to_string(),
            warnings: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Appends the rules of `other`, dropping duplicates.
    pub fn extend_dedup(&mut self, other: &Program) {
        for r in &other.rules {
            if !self.rules.contains(r) {
                self.rules.push(r.clone());
            }
        }
    }
}

/// One statement per line, in input order.
pub fn serialize_program(p: &Program) -> String {
    let mut out = String::new();
    for r in &p.rules {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serialize_program(self))
    }
}
