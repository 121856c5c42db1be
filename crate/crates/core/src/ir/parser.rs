//! Recursive-descent parser for `.lp` sources. Whitespace-insensitive,
//! `%` starts a line comment, every clause ends with `.`.

use super::{ArithOp, Atom, BodyElem, CmpOp, Literal, Program, Rule, RuleKind, Term};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: expected {expected}, found {found}")]
    Syntax {
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: unsafe rule: {detail}")]
    UnsafeRule { line: u32, col: u32, detail: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),  // lowercase-leading
    UIdent(String), // uppercase- or underscore-leading
    Int(i64),
    Str(String),
    At,
    LParen,
    RParen,
    Comma,
    Dot,
    ColonDash,
    Plus,
    Minus,
    Star,
    Range,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) | Tok::UIdent(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::At => write!(f, "`@`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Dot => write!(f, "`.`"),
            Tok::ColonDash => write!(f, "`:-`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Range => write!(f, "`..`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Ne => write!(f, "`!=`"),
            Tok::Lt => write!(f, "`<`"),
            Tok::Le => write!(f, "`<=`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Ge => write!(f, "`>=`"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

type Spanned = (Tok, u32, u32);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn err(&self, expected: &str, found: String) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col,
            expected: expected.to_string(),
            found,
        }
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c == b'%' {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else if c.is_ascii_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else { break };
            let tok = match c {
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b'@' => {
                    self.bump();
                    Tok::At
                }
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'-' => {
                    self.bump();
                    Tok::Minus
                }
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'.' => {
                    self.bump();
                    if self.peek() == Some(b'.') {
                        self.bump();
                        Tok::Range
                    } else {
                        Tok::Dot
                    }
                }
                b':' => {
                    self.bump();
                    if self.peek() == Some(b'-') {
                        self.bump();
                        Tok::ColonDash
                    } else {
                        return Err(self.err("`:-`", "`:`".to_string()));
                    }
                }
                b'=' => {
                    self.bump();
                    Tok::Eq
                }
                b'!' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Ne
                    } else {
                        return Err(self.err("`!=`", "`!`".to_string()));
                    }
                }
                b'<' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Le
                    } else {
                        Tok::Lt
                    }
                }
                b'>' => {
                    self.bump();
                    if self.peek() == Some(b'=') {
                        self.bump();
                        Tok::Ge
                    } else {
                        Tok::Gt
                    }
                }
                b'"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some(b'"') => break,
                            Some(c) => s.push(c as char),
                            None => return Err(self.err("closing `\"`", "end of input".into())),
                        }
                    }
                    Tok::Str(s)
                }
                c if c.is_ascii_digit() => {
                    let mut n: i64 = 0;
                    while let Some(c) = self.peek() {
                        if !c.is_ascii_digit() {
                            break;
                        }
                        n = n * 10 + (c - b'0') as i64;
                        self.bump();
                    }
                    Tok::Int(n)
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek() {
                        if c.is_ascii_alphanumeric() || c == b'_' {
                            s.push(c as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if s.as_bytes()[0].is_ascii_lowercase() {
                        Tok::Ident(s)
                    } else {
                        Tok::UIdent(s)
                    }
                }
                other => return Err(self.err("a token", format!("`{}`", other as char))),
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .or_else(|| self.toks.last())
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or((1, 1))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &str) -> ParseError {
        let (line, col) = self.here();
        let found = match self.peek() {
            Some(t) => t.to_string(),
            None => "end of input".to_string(),
        };
        ParseError::Syntax {
            line,
            col,
            expected: expected.to_string(),
            found,
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn statement(&mut self) -> Result<Rule, ParseError> {
        let (line, col) = self.here();
        let mut kind_default = false;
        if let Some(Tok::Ident(s)) = self.peek() {
            // `default` is a keyword only when another clause follows it
            if s == "default" && matches!(self.toks.get(self.pos + 1), Some((Tok::Ident(_), _, _)))
            {
                self.pos += 1;
                kind_default = true;
            }
        }
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.peek() == Some(&Tok::ColonDash) {
            self.pos += 1;
            loop {
                body.push(self.body_elem()?);
                if self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::Dot, "`.` ending the clause")?;
        let kind = if kind_default {
            RuleKind::Default
        } else if body.is_empty() {
            RuleKind::Fact
        } else {
            RuleKind::Rule
        };
        Ok(Rule {
            head,
            body,
            kind,
            line,
            col,
        })
    }

    fn body_elem(&mut self) -> Result<BodyElem, ParseError> {
        if let Some(Tok::Ident(s)) = self.peek() {
            if s == "not" {
                self.pos += 1;
                let atom = self.atom()?;
                return Ok(BodyElem::Literal(Literal {
                    atom,
                    negated: true,
                }));
            }
        }
        let t = self.term()?;
        let cmp = match self.peek() {
            Some(Tok::Eq) => Some(CmpOp::Eq),
            Some(Tok::Ne) => Some(CmpOp::Ne),
            Some(Tok::Lt) => Some(CmpOp::Lt),
            Some(Tok::Le) => Some(CmpOp::Le),
            Some(Tok::Gt) => Some(CmpOp::Gt),
            Some(Tok::Ge) => Some(CmpOp::Ge),
            _ => None,
        };
        if let Some(op) = cmp {
            self.pos += 1;
            let rhs = self.term()?;
            return Ok(BodyElem::Compare(op, t, rhs));
        }
        match term_to_atom(t) {
            Some(atom) => Ok(BodyElem::Literal(Literal {
                atom,
                negated: false,
            })),
            None => Err(self.err("an atom or comparison")),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let t = self.term()?;
        term_to_atom(t).ok_or_else(|| self.err("an atom"))
    }

    /// term := addend (`..` addend)?
    fn term(&mut self) -> Result<Term, ParseError> {
        let lhs = self.addend()?;
        if self.peek() == Some(&Tok::Range) {
            self.pos += 1;
            let rhs = self.addend()?;
            return Ok(Term::Arith(ArithOp::Range, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    /// addend := factor ((`+`|`-`) factor)*
    fn addend(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => ArithOp::Add,
                Some(Tok::Minus) => ArithOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Term::Arith(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    /// factor := primary (`*` primary)*
    fn factor(&mut self) -> Result<Term, ParseError> {
        let mut lhs = self.primary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.primary()?;
            lhs = Term::Arith(ArithOp::Mul, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(Term::Integer(n)),
            Some(Tok::Minus) => match self.next() {
                Some(Tok::Int(n)) => Ok(Term::Integer(-n)),
                _ => {
                    self.pos -= 1;
                    Err(self.err("an integer after `-`"))
                }
            },
            Some(Tok::Str(s)) => Ok(Term::Text(s)),
            Some(Tok::UIdent(v)) => {
                if v == "_" {
                    Ok(Term::Anonymous)
                } else {
                    Ok(Term::Variable(v))
                }
            }
            Some(Tok::Ident(name)) => {
                let args = self.opt_args()?;
                match args {
                    Some(args) => Ok(Term::Compound(name, args)),
                    None => Ok(Term::Symbol(name)),
                }
            }
            Some(Tok::At) => match self.next() {
                Some(Tok::Ident(name)) => {
                    let args = self.opt_args()?.unwrap_or_default();
                    Ok(Term::ExternalCall(name, args))
                }
                _ => {
                    self.pos -= 1;
                    Err(self.err("an external predicate name after `@`"))
                }
            },
            _ => {
                if self.pos > 0 {
                    self.pos -= 1;
                }
                Err(self.err("a term"))
            }
        }
    }

    fn opt_args(&mut self) -> Result<Option<Vec<Term>>, ParseError> {
        if self.peek() != Some(&Tok::LParen) {
            return Ok(None);
        }
        self.pos += 1;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            self.pos += 1;
            return Ok(Some(args));
        }
        loop {
            args.push(self.term()?);
            match self.next() {
                Some(Tok::Comma) => continue,
                Some(Tok::RParen) => break,
                _ => {
                    if self.pos > 0 {
                        self.pos -= 1;
                    }
                    return Err(self.err("`,` or `)` in argument list"));
                }
            }
        }
        Ok(Some(args))
    }
}

fn term_to_atom(t: Term) -> Option<Atom> {
    match t {
        Term::Compound(name, args) => Some(Atom {
            predicate: name,
            args,
        }),
        Term::Symbol(name) => Some(Atom {
            predicate: name,
            args: Vec::new(),
        }),
        _ => None,
    }
}

/// Variables a positive literal can bind: plain variable positions,
/// excluding anything nested under arithmetic or an external call.
fn binding_vars(atom: &Atom, out: &mut Vec<String>) {
    fn walk(t: &Term, out: &mut Vec<String>) {
        match t {
            Term::Variable(v) => out.push(v.clone()),
            Term::Compound(_, args) => {
                for a in args {
                    walk(a, out);
                }
            }
            _ => {}
        }
    }
    for a in &atom.args {
        walk(a, out);
    }
}

fn head_has_anonymous(t: &Term) -> bool {
    match t {
        Term::Anonymous => true,
        Term::Compound(_, args) | Term::ExternalCall(_, args) => {
            args.iter().any(head_has_anonymous)
        }
        Term::Arith(_, l, r) => head_has_anonymous(l) || head_has_anonymous(r),
        _ => false,
    }
}

/// Checks the safety condition: every head variable, every variable of a
/// negated literal and every compared variable must be bound by a positive
/// body literal (or by a binding `V = expr` / `V = lo..hi` comparison).
pub(crate) fn check_safety(rule: &Rule) -> Result<(), ParseError> {
    let unsafe_err = |detail: String| ParseError::UnsafeRule {
        line: rule.line,
        col: rule.col,
        detail,
    };

    let mut bound: Vec<String> = Vec::new();
    for b in &rule.body {
        if let BodyElem::Literal(l) = b {
            if !l.negated {
                binding_vars(&l.atom, &mut bound);
            }
        }
    }
    // binding comparisons, iterated until stable
    loop {
        let mut changed = false;
        for b in &rule.body {
            if let BodyElem::Compare(CmpOp::Eq, lhs, rhs) = b {
                for (a, other) in [(lhs, rhs), (rhs, lhs)] {
                    if let Term::Variable(v) = a {
                        if !bound.contains(v) {
                            let mut need = Vec::new();
                            other.collect_vars(&mut need);
                            if need.iter().all(|n| bound.contains(n)) {
                                bound.push(v.clone());
                                changed = true;
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut head_vars = Vec::new();
    rule.head.collect_vars(&mut head_vars);
    for v in &head_vars {
        if !bound.contains(v) {
            return Err(unsafe_err(format!(
                "head variable {v} does not occur in a positive body literal"
            )));
        }
    }
    if rule.head.args.iter().any(head_has_anonymous) {
        return Err(unsafe_err("anonymous `_` in rule head".to_string()));
    }
    for b in &rule.body {
        match b {
            BodyElem::Literal(l) if l.negated => {
                let mut vars = Vec::new();
                l.atom.collect_vars(&mut vars);
                for v in vars {
                    if !bound.contains(&v) {
                        return Err(unsafe_err(format!(
                            "variable {v} of negated literal `{}` is not positively bound",
                            l.atom
                        )));
                    }
                }
            }
            BodyElem::Compare(_, lhs, rhs) => {
                let mut vars = Vec::new();
                lhs.collect_vars(&mut vars);
                rhs.collect_vars(&mut vars);
                for v in vars {
                    if !bound.contains(&v) {
                        return Err(unsafe_err(format!(
                            "variable {v} of comparison `{b}` is not bound"
                        )));
                    }
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Parses a `.lp` source into a [`Program`]. Duplicate rules are dropped
/// with a warning; safety violations are errors.
pub fn parse_program(text: &str, source_name: &str) -> Result<Program, ParseError> {
    let toks = Lexer::new(text).tokenize()?;
    let mut parser = Parser { toks, pos: 0 };
    let mut program = Program::new(source_name);
    while parser.peek().is_some() {
        let rule = parser.statement()?;
        check_safety(&rule)?;
        if program.rules.contains(&rule) {
            program
                .warnings
                .push(format!("{}:{}: duplicate rule dropped: {rule}", rule.line, rule.col));
        } else {
            program.rules.push(rule);
        }
    }
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_cardinality_fact() {
        let p = parse_program("cardinality(shot, 5).", "t").unwrap();
        assert_eq!(p.rules.len(), 1);
        let r = &p.rules[0];
        assert!(r.is_fact());
        assert_eq!(r.head.predicate, "cardinality");
        assert_eq!(r.head.args, vec![Term::sym("shot"), Term::Integer(5)]);
    }

    #[test]
    fn parses_negated_rule_with_wildcard() {
        let src = "init(clear(T)) :- object(T, tile), not init(robot_at(_, T)).";
        let p = parse_program(src, "t").unwrap();
        let r = &p.rules[0];
        assert_eq!(r.head.predicate, "init");
        assert_eq!(r.body.len(), 2);
        match &r.body[1] {
            BodyElem::Literal(l) => {
                assert!(l.negated);
                let inner = l.atom.wrapped_inner().unwrap();
                assert_eq!(inner.predicate, "robot_at");
                assert_eq!(inner.args[0], Term::Anonymous);
            }
            other => panic!("expected literal, got {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_empty_program() {
        let p = parse_program("", "t").unwrap();
        assert!(p.is_empty());
        assert_eq!(crate::ir::serialize_program(&p), "");
    }

    #[test]
    fn parses_external_call_and_arith() {
        let src = "init(@make_seq(N-1, level, next, 0)) :- cardinality(level, N).";
        let p = parse_program(src, "t").unwrap();
        let head = &p.rules[0].head;
        match &head.args[0] {
            Term::ExternalCall(name, args) => {
                assert_eq!(name, "make_seq");
                assert!(matches!(args[0], Term::Arith(ArithOp::Sub, _, _)));
            }
            other => panic!("expected external call, got {other:?}"),
        }
    }

    #[test]
    fn parses_default_rule() {
        let src = "default goal(height(Z, n0)) :- termes_pos_grid(_, _, Z).";
        let p = parse_program(src, "t").unwrap();
        assert_eq!(p.rules[0].kind, RuleKind::Default);
        assert_eq!(p.rules[0].head.predicate, "goal");
    }

    #[test]
    fn parses_quoted_string() {
        let src = "init(min_cost_metric(\"=(total-cost) 0)\")).";
        let p = parse_program(src, "t").unwrap();
        let inner = p.rules[0].head.wrapped_inner().unwrap();
        assert_eq!(inner.args[0], Term::Text("=(total-cost) 0)".to_string()));
    }

    #[test]
    fn rejects_unsafe_head_variable() {
        let err = parse_program("p(X) :- q(Y).", "t").unwrap_err();
        assert!(matches!(err, ParseError::UnsafeRule { .. }));
    }

    #[test]
    fn rejects_unbound_negation() {
        let err = parse_program("p(X) :- q(X), not r(Y).", "t").unwrap_err();
        assert!(matches!(err, ParseError::UnsafeRule { .. }));
    }

    #[test]
    fn range_comparison_binds() {
        let p = parse_program("p(X) :- q(N), X = 1..N.", "t").unwrap();
        assert_eq!(p.rules[0].body.len(), 2);
    }

    #[test]
    fn duplicate_rules_dropped_with_warning() {
        let p = parse_program("p(a).\np(a).", "t").unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn comments_are_ignored() {
        let p = parse_program("% a comment\np(a). % trailing\n", "t").unwrap();
        assert_eq!(p.rules.len(), 1);
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_program("p(a)", "t").unwrap_err();
        match err {
            ParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col >= 4);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }
}
