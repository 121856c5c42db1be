//! External predicates the engine evaluates itself: id and fact
//! generators that an ordinary rule engine cannot express.

use crate::factbase::FactBase;
use crate::infer::InferError;
use crate::ir::{Atom, Term};
use crate::naming::{natural_cmp, NamingTemplates};

/// A ground external call ready for evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltinCall {
    pub name: String,
    pub args: Vec<Term>,
}

/// What a builtin produces: fresh ids to splice into an atom argument
/// position, or whole facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinResult {
    Ids(Vec<Term>),
    Facts(Vec<Atom>),
}

fn want_int(call: &BuiltinCall, idx: usize) -> Result<i64, InferError> {
    match call.args.get(idx) {
        Some(Term::Integer(n)) => Ok(*n),
        Some(t) if !t.is_ground() => Err(InferError::NonGroundBuiltin {
            name: call.name.clone(),
        }),
        _ => Err(InferError::BuiltinArity {
            name: call.name.clone(),
            detail: format!("argument {} must be an integer", idx + 1),
        }),
    }
}

fn want_sym(call: &BuiltinCall, idx: usize) -> Result<String, InferError> {
    match call.args.get(idx) {
        Some(Term::Symbol(s)) => Ok(s.clone()),
        Some(t) if !t.is_ground() => Err(InferError::NonGroundBuiltin {
            name: call.name.clone(),
        }),
        _ => Err(InferError::BuiltinArity {
            name: call.name.clone(),
            detail: format!("argument {} must be a symbol", idx + 1),
        }),
    }
}

fn check_arity(call: &BuiltinCall, expected: usize) -> Result<(), InferError> {
    if call.args.len() != expected {
        return Err(InferError::BuiltinArity {
            name: call.name.clone(),
            detail: format!("expected {expected} arguments, got {}", call.args.len()),
        });
    }
    if call.args.iter().any(|a| !a.is_ground()) {
        return Err(InferError::NonGroundBuiltin {
            name: call.name.clone(),
        });
    }
    Ok(())
}

/// Evaluates one builtin call against the current facts.
///
/// * `make_seq(count, prefix, pred, first)` — the `count` chain facts
///   `pred(prefix<i>, prefix<i+1>)` for `i = first .. first+count-1`.
/// * `gen_objects(n, base, type)` — `n` fresh ids `type<base+1> .. type<base+n>`
///   rendered through the naming template.
/// * `make_id(i, type)` — a single templated id.
/// * `make_fact(x, p, y)` — the atom `p(x, y)`.
/// * `make_map(t1, p, t2, n)` — the canonical bijection facts between the
///   objects of `t1` and `t2`, both of which must number exactly `n`.
pub fn eval_builtin(
    call: &BuiltinCall,
    context: &FactBase,
    naming: &NamingTemplates,
) -> Result<BuiltinResult, InferError> {
    match call.name.as_str() {
        "make_seq" => {
            check_arity(call, 4)?;
            let count = want_int(call, 0)?;
            let prefix = want_sym(call, 1)?;
            let pred = want_sym(call, 2)?;
            let first = want_int(call, 3)?;
            let mut facts = Vec::new();
            for i in first..first + count.max(0) {
                facts.push(Atom::new(
                    &pred,
                    vec![
                        Term::Symbol(format!("{prefix}{i}")),
                        Term::Symbol(format!("{prefix}{}", i + 1)),
                    ],
                ));
            }
            Ok(BuiltinResult::Facts(facts))
        }
        "gen_objects" => {
            check_arity(call, 3)?;
            let n = want_int(call, 0)?;
            let base = want_int(call, 1)?;
            let type_name = want_sym(call, 2)?;
            let ids = (1..=n.max(0))
                .map(|i| Term::Symbol(naming.make_id(&type_name, base + i)))
                .collect();
            Ok(BuiltinResult::Ids(ids))
        }
        "make_id" => {
            check_arity(call, 2)?;
            let i = want_int(call, 0)?;
            let type_name = want_sym(call, 1)?;
            Ok(BuiltinResult::Ids(vec![Term::Symbol(
                naming.make_id(&type_name, i),
            )]))
        }
        "make_fact" => {
            check_arity(call, 3)?;
            let x = want_sym(call, 0)?;
            let p = want_sym(call, 1)?;
            let y = want_sym(call, 2)?;
            Ok(BuiltinResult::Facts(vec![Atom::new(
                &p,
                vec![Term::Symbol(x), Term::Symbol(y)],
            )]))
        }
        "make_map" => {
            check_arity(call, 4)?;
            let left_type = want_sym(call, 0)?;
            let pred = want_sym(call, 1)?;
            let right_type = want_sym(call, 2)?;
            let n = want_int(call, 3)?;
            let left = context.objects_of_type(&left_type);
            let right = context.objects_of_type(&right_type);
            if left.len() != right.len() || left.len() as i64 != n {
                return Err(InferError::MapArityMismatch {
                    left_type,
                    right_type,
                    left_count: left.len(),
                    right_count: right.len(),
                });
            }
            Ok(BuiltinResult::Facts(pair_up(&pred, &left, &right)))
        }
        other => Err(InferError::BuiltinArity {
            name: other.to_string(),
            detail: "unknown external predicate".to_string(),
        }),
    }
}

/// Index-aligned pairing of two equally sized, naturally sorted id lists.
pub fn pair_up(pred: &str, left: &[String], right: &[String]) -> Vec<Atom> {
    debug_assert_eq!(left.len(), right.len());
    debug_assert!(left.windows(2).all(|w| natural_cmp(&w[0], &w[1]).is_le()));
    left.iter()
        .zip(right.iter())
        .map(|(l, r)| Atom::new(pred, vec![Term::Symbol(l.clone()), Term::Symbol(r.clone())]))
        .collect()
}
