//! A deduplicated set of ground atoms, indexed by predicate, with a
//! provenance tag per fact.

use crate::ir::{Atom, Term};
use crate::naming::natural_cmp;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Provenance {
    /// Stated directly as a fact in the source program.
    Stated,
    /// Derived by a rule.
    Inferred,
    /// Created by cardinality expansion or an id-generating builtin.
    Generated,
}

/// Variable bindings produced by matching a pattern against ground facts.
pub type Bindings = BTreeMap<String, Term>;

#[derive(Debug, Clone, Default)]
pub struct FactBase {
    by_pred: BTreeMap<String, BTreeMap<Vec<Term>, Provenance>>,
    len: usize,
}

impl PartialEq for FactBase {
    // provenance is bookkeeping, not identity
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len
            && self.by_pred.len() == other.by_pred.len()
            && self
                .by_pred
                .iter()
                .zip(other.by_pred.iter())
                .all(|((pa, fa), (pb, fb))| {
                    pa == pb && fa.len() == fb.len() && fa.keys().eq(fb.keys())
                })
    }
}
impl Eq for FactBase {}

impl FactBase {
    pub fn new() -> Self {
        FactBase::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inserts a ground atom; returns true when it was not present.
    /// An existing fact keeps its original provenance.
    pub fn insert(&mut self, atom: Atom, provenance: Provenance) -> bool {
        debug_assert!(atom.is_ground(), "non-ground fact: {atom}");
        let entry = self.by_pred.entry(atom.predicate).or_default();
        match entry.entry(atom.args) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(provenance);
                self.len += 1;
                true
            }
            std::collections::btree_map::Entry::Occupied(_) => false,
        }
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.by_pred
            .get(&atom.predicate)
            .map(|m| m.contains_key(&atom.args))
            .unwrap_or(false)
    }

    pub fn remove(&mut self, atom: &Atom) -> bool {
        if let Some(m) = self.by_pred.get_mut(&atom.predicate) {
            if m.remove(&atom.args).is_some() {
                self.len -= 1;
                return true;
            }
        }
        false
    }

    pub fn provenance(&self, atom: &Atom) -> Option<Provenance> {
        self.by_pred
            .get(&atom.predicate)?
            .get(&atom.args)
            .copied()
    }

    /// All facts for one predicate, as argument vectors.
    pub fn args_of(&self, predicate: &str) -> impl Iterator<Item = &Vec<Term>> {
        self.by_pred
            .get(predicate)
            .into_iter()
            .flat_map(|m| m.keys())
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.by_pred.iter().flat_map(|(pred, m)| {
            m.keys().map(move |args| Atom {
                predicate: pred.clone(),
                args: args.clone(),
            })
        })
    }

    pub fn atoms_with_provenance(&self) -> impl Iterator<Item = (Atom, Provenance)> + '_ {
        self.by_pred.iter().flat_map(|(pred, m)| {
            m.iter().map(move |(args, prov)| {
                (
                    Atom {
                        predicate: pred.clone(),
                        args: args.clone(),
                    },
                    *prov,
                )
            })
        })
    }

    /// Object ids of one type, in natural order.
    pub fn objects_of_type(&self, type_name: &str) -> Vec<String> {
        let mut ids: Vec<String> = self
            .args_of("object")
            .filter_map(|args| match (args.first(), args.get(1)) {
                (Some(Term::Symbol(id)), Some(Term::Symbol(t))) if t == type_name => {
                    Some(id.clone())
                }
                _ => None,
            })
            .collect();
        ids.sort_by(|a, b| natural_cmp(a, b));
        ids.dedup();
        ids
    }

    /// True when some object fact names this id, regardless of type.
    pub fn object_id_exists(&self, id: &str) -> bool {
        self.args_of("object")
            .any(|args| matches!(args.first(), Some(Term::Symbol(s)) if s == id))
    }

    /// All ground substitutions matching `pattern`, in deterministic
    /// sorted order.
    pub fn query(&self, pattern: &Atom) -> Vec<Bindings> {
        let mut out: Vec<Bindings> = Vec::new();
        for args in self.args_of(&pattern.predicate) {
            if args.len() != pattern.args.len() {
                continue;
            }
            let mut subst = Bindings::new();
            if match_args(&pattern.args, args, &mut subst) {
                out.push(subst);
            }
        }
        out.sort_by(cmp_bindings);
        out.dedup();
        out
    }
}

fn cmp_bindings(a: &Bindings, b: &Bindings) -> std::cmp::Ordering {
    let mut ita = a.iter();
    let mut itb = b.iter();
    loop {
        match (ita.next(), itb.next()) {
            (None, None) => return std::cmp::Ordering::Equal,
            (None, Some(_)) => return std::cmp::Ordering::Less,
            (Some(_), None) => return std::cmp::Ordering::Greater,
            (Some((ka, va)), Some((kb, vb))) => {
                let c = ka.cmp(kb).then_with(|| cmp_terms_natural(va, vb));
                if c != std::cmp::Ordering::Equal {
                    return c;
                }
            }
        }
    }
}

fn cmp_terms_natural(a: &Term, b: &Term) -> std::cmp::Ordering {
    match (a, b) {
        (Term::Symbol(x), Term::Symbol(y)) => natural_cmp(x, y),
        _ => a.cmp(b),
    }
}

/// One-way matching of pattern terms against ground terms, extending
/// `subst`. Anonymous matches anything; arithmetic and external calls in
/// the pattern never match (callers evaluate those first).
pub fn match_args(pattern: &[Term], ground: &[Term], subst: &mut Bindings) -> bool {
    if pattern.len() != ground.len() {
        return false;
    }
    pattern
        .iter()
        .zip(ground.iter())
        .all(|(p, g)| match_term(p, g, subst))
}

pub fn match_term(pattern: &Term, ground: &Term, subst: &mut Bindings) -> bool {
    match pattern {
        Term::Anonymous => true,
        Term::Variable(v) => match subst.get(v) {
            Some(bound) => bound == ground,
            None => {
                subst.insert(v.clone(), ground.clone());
                true
            }
        },
        Term::Symbol(_) | Term::Integer(_) | Term::Text(_) => pattern == ground,
        Term::Compound(name, args) => match ground {
            Term::Compound(gname, gargs) if gname == name => match_args(args, gargs, subst),
            _ => false,
        },
        Term::Arith(..) | Term::ExternalCall(..) => false,
    }
}

/// Applies a substitution; unbound variables and anonymous terms remain.
pub fn substitute(term: &Term, subst: &Bindings) -> Term {
    match term {
        Term::Variable(v) => subst.get(v).cloned().unwrap_or_else(|| term.clone()),
        Term::Compound(name, args) => Term::Compound(
            name.clone(),
            args.iter().map(|a| substitute(a, subst)).collect(),
        ),
        Term::ExternalCall(name, args) => Term::ExternalCall(
            name.clone(),
            args.iter().map(|a| substitute(a, subst)).collect(),
        ),
        Term::Arith(op, l, r) => Term::Arith(
            *op,
            Box::new(substitute(l, subst)),
            Box::new(substitute(r, subst)),
        ),
        _ => term.clone(),
    }
}

pub fn substitute_atom(atom: &Atom, subst: &Bindings) -> Atom {
    Atom {
        predicate: atom.predicate.clone(),
        args: atom.args.iter().map(|a| substitute(a, subst)).collect(),
    }
}

impl fmt::Display for FactBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for atom in self.atoms() {
            writeln!(f, "{atom}.")?;
        }
        Ok(())
    }
}
