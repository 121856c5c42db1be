//! Stratification of rule sets under negation-as-failure.
//!
//! Dependency tracking is per *effective predicate*: an `init`/`goal`
//! wrapper atom is keyed by wrapper plus inner predicate, so
//! `init(clear(T))` and `not init(robot_at(_, T))` are independent keys
//! and the usual domain rule sets stratify cleanly.

use crate::ir::{external_output_pred, Atom, BodyElem, Program, Rule, Term};
use crate::infer::InferError;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PredKey {
    /// `Some("init")` / `Some("goal")` for wrapped atoms.
    pub wrapper: Option<String>,
    pub predicate: String,
    pub arity: usize,
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.wrapper {
            Some(w) => write!(f, "{w}({}/{})", self.predicate, self.arity),
            None => write!(f, "{}/{}", self.predicate, self.arity),
        }
    }
}

fn key_of(atom: &Atom) -> Result<PredKey, InferError> {
    if atom.is_state_wrapper() {
        match &atom.args[0] {
            Term::Compound(name, args) => Ok(PredKey {
                wrapper: Some(atom.predicate.clone()),
                predicate: name.clone(),
                arity: args.len(),
            }),
            Term::Symbol(name) => Ok(PredKey {
                wrapper: Some(atom.predicate.clone()),
                predicate: name.clone(),
                arity: 0,
            }),
            Term::ExternalCall(name, args) => match external_output_pred(name, args) {
                Some(produced) => Ok(PredKey {
                    wrapper: Some(atom.predicate.clone()),
                    predicate: produced,
                    arity: 2,
                }),
                None => Err(InferError::Unstratifiable(format!(
                    "cannot determine the predicate produced by @{name} in `{atom}`"
                ))),
            },
            Term::Text(_) | Term::Integer(_) => Ok(PredKey {
                wrapper: Some(atom.predicate.clone()),
                predicate: "<literal>".to_string(),
                arity: 0,
            }),
            Term::Variable(_) | Term::Anonymous | Term::Arith(..) => {
                Err(InferError::Unstratifiable(format!(
                    "generic state wrapper `{atom}` is not supported in rules"
                )))
            }
        }
    } else {
        Ok(PredKey {
            wrapper: None,
            predicate: atom.predicate.clone(),
            arity: atom.arity(),
        })
    }
}

/// Rules grouped into evaluation order, plus the key-to-stratum map.
#[derive(Debug, Clone)]
pub struct Strata {
    pub groups: Vec<Vec<Rule>>,
    pub stratum_of: BTreeMap<PredKey, usize>,
}

impl Strata {
    pub fn stratum_of_atom(&self, atom: &Atom) -> Option<usize> {
        key_of(atom).ok().and_then(|k| self.stratum_of.get(&k).copied())
    }
}

/// Computes a stratification for `rules`, or fails when the dependency
/// graph has a cycle through negation.
pub fn stratify(rules: &Program) -> Result<Strata, InferError> {
    let mut strata: BTreeMap<PredKey, usize> = BTreeMap::new();
    struct Dep {
        head: PredKey,
        pos: Vec<PredKey>,
        neg: Vec<PredKey>,
    }
    let mut deps = Vec::new();
    for rule in &rules.rules {
        let head = key_of(&rule.head)?;
        strata.entry(head.clone()).or_insert(0);
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for b in &rule.body {
            if let BodyElem::Literal(l) = b {
                let k = key_of(&l.atom)?;
                strata.entry(k.clone()).or_insert(0);
                if l.negated {
                    neg.push(k);
                } else {
                    pos.push(k);
                }
            }
        }
        deps.push(Dep { head, pos, neg });
    }

    let limit = strata.len() + 1;
    loop {
        let mut changed = false;
        for dep in &deps {
            let mut need = 0usize;
            for k in &dep.pos {
                need = need.max(strata[k]);
            }
            for k in &dep.neg {
                need = need.max(strata[k] + 1);
            }
            let cur = strata.get_mut(&dep.head).expect("head registered");
            if *cur < need {
                *cur = need;
                changed = true;
                if need > limit {
                    let cycle: Vec<String> = strata
                        .iter()
                        .filter(|(_, s)| **s >= limit)
                        .map(|(k, _)| k.to_string())
                        .collect();
                    return Err(InferError::Unstratifiable(format!(
                        "cycle through negation involving {}",
                        cycle.join(", ")
                    )));
                }
            }
        }
        if !changed {
            break;
        }
    }

    let max = strata.values().copied().max().unwrap_or(0);
    let mut groups: Vec<Vec<Rule>> = vec![Vec::new(); max + 1];
    for rule in &rules.rules {
        let s = strata[&key_of(&rule.head)?];
        groups[s].push(rule.clone());
    }
    Ok(Strata {
        groups,
        stratum_of: strata,
    })
}
