//! Domain and task file parsing.

use super::sexp::{parse_sexp, typed_list, Sexp};
use super::{DomainModel, PddlAtom, PddlError, PredicateDef, TaskPddl, TypeDef};

/// Parses a domain file, extracting `:types`, `:predicates`,
/// `:constants` and the presence of `:functions`. Actions and unknown
/// sections are skipped with a warning.
pub fn parse_domain(text: &str) -> Result<DomainModel, PddlError> {
    let top = parse_sexp(text)?;
    let items = top
        .as_list()
        .filter(|v| v.first().and_then(Sexp::as_sym) == Some("define"))
        .ok_or_else(|| PddlError::Malformed("expected `(define ...)`".to_string()))?;

    let mut model = DomainModel::default();
    for item in &items[1..] {
        match item.head() {
            Some("domain") => {
                model.name = item.as_list().unwrap()[1]
                    .as_sym()
                    .ok_or_else(|| PddlError::Malformed("bad domain name".to_string()))?
                    .to_string();
            }
            Some(":requirements") => {}
            Some(":types") => {
                let body = &item.as_list().unwrap()[1..];
                for (name, parent) in typed_list(body, "")? {
                    model.types.push(TypeDef {
                        name,
                        parent: if parent.is_empty() || parent == "object" {
                            None
                        } else {
                            Some(parent)
                        },
                    });
                }
            }
            Some(":constants") => {
                let body = &item.as_list().unwrap()[1..];
                for (name, ty) in typed_list(body, "object")? {
                    model.constants.insert(name, ty);
                }
            }
            Some(":predicates") => {
                for pred in &item.as_list().unwrap()[1..] {
                    model.predicates.push(parse_predicate(pred)?);
                }
            }
            Some(":functions") => {
                model.has_functions = true;
            }
            Some(":action") => {}
            Some(other) => {
                model
                    .warnings
                    .push(format!("skipping unknown section `{other}`"));
            }
            None => {
                model
                    .warnings
                    .push("skipping a non-list domain item".to_string());
            }
        }
    }
    if model.name.is_empty() {
        return Err(PddlError::MissingSection("(domain ...)".to_string()));
    }
    Ok(model)
}

fn parse_predicate(e: &Sexp) -> Result<PredicateDef, PddlError> {
    let items = e
        .as_list()
        .ok_or_else(|| PddlError::Malformed("predicate must be a list".to_string()))?;
    let name = items
        .first()
        .and_then(Sexp::as_sym)
        .ok_or_else(|| PddlError::Malformed("predicate without a name".to_string()))?
        .to_string();
    let args = typed_list(&items[1..], "object")?;
    Ok(PredicateDef { name, args })
}

/// Parses a task/problem file: objects grouped by declared type, init
/// atom set, goal conjunction, optional metric.
pub fn parse_task(text: &str) -> Result<TaskPddl, PddlError> {
    let top = parse_sexp(text)?;
    let items = top
        .as_list()
        .filter(|v| v.first().and_then(Sexp::as_sym) == Some("define"))
        .ok_or_else(|| PddlError::Malformed("expected `(define ...)`".to_string()))?;

    let mut task = TaskPddl::default();
    let mut saw_goal = false;
    for item in &items[1..] {
        match item.head() {
            Some("problem") => {
                task.problem_name = item.as_list().unwrap()[1]
                    .as_sym()
                    .ok_or_else(|| PddlError::Malformed("bad problem name".to_string()))?
                    .to_string();
            }
            Some(":domain") => {
                task.domain_name = item.as_list().unwrap()[1]
                    .as_sym()
                    .ok_or_else(|| PddlError::Malformed("bad domain reference".to_string()))?
                    .to_string();
            }
            Some(":objects") => {
                let body = &item.as_list().unwrap()[1..];
                for (id, ty) in typed_list(body, "object")? {
                    task.add_object(&id, &ty);
                }
            }
            Some(":init") => {
                for atom in &item.as_list().unwrap()[1..] {
                    task.init.insert(parse_atom(atom)?);
                }
            }
            Some(":goal") => {
                saw_goal = true;
                let body = &item.as_list().unwrap()[1..];
                let goal = body
                    .first()
                    .ok_or_else(|| PddlError::Malformed("empty :goal".to_string()))?;
                if goal.head() == Some("and") {
                    for atom in &goal.as_list().unwrap()[1..] {
                        task.goal.insert(parse_atom(atom)?);
                    }
                } else {
                    task.goal.insert(parse_atom(goal)?);
                }
            }
            Some(":metric") => {
                task.metric_minimize_total_cost = true;
            }
            Some(other) => {
                return Err(PddlError::Malformed(format!(
                    "unknown task section `{other}`"
                )))
            }
            None => return Err(PddlError::Malformed("non-list task item".to_string())),
        }
    }
    if !saw_goal {
        return Err(PddlError::MissingSection(":goal".to_string()));
    }

    // every object mentioned in an atom must be declared
    let declared = task.declared_object_ids();
    for atom in task.init.iter().chain(task.goal.iter()) {
        if atom.is_cost_literal() {
            continue;
        }
        for arg in &atom.args {
            if !declared.contains(arg) {
                return Err(PddlError::UndeclaredObject(arg.clone()));
            }
        }
    }
    Ok(task)
}

fn parse_atom(e: &Sexp) -> Result<PddlAtom, PddlError> {
    let items = e
        .as_list()
        .ok_or_else(|| PddlError::Malformed("atom must be a list".to_string()))?;
    let pred = items
        .first()
        .and_then(Sexp::as_sym)
        .ok_or_else(|| PddlError::Malformed("atom without a predicate".to_string()))?;
    if pred == "=" {
        // (= (total-cost) 0)
        let fun = items
            .get(1)
            .and_then(Sexp::head)
            .ok_or_else(|| PddlError::Malformed("malformed `=` literal".to_string()))?;
        let value = items
            .get(2)
            .and_then(Sexp::as_sym)
            .ok_or_else(|| PddlError::Malformed("malformed `=` literal".to_string()))?;
        return Ok(PddlAtom::new("=", &[fun, value]));
    }
    let mut args = Vec::new();
    for a in &items[1..] {
        args.push(
            a.as_sym()
                .ok_or_else(|| PddlError::Malformed(format!("non-symbol argument in `{pred}`")))?
                .to_string(),
        );
    }
    Ok(PddlAtom {
        predicate: pred.to_string(),
        args,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_domain() {
        let d = parse_domain("(define (domain d) (:predicates (p ?x - t)))").unwrap();
        assert_eq!(d.name, "d");
        assert_eq!(d.predicates.len(), 1);
        assert_eq!(d.predicates[0].args, vec![("?x".to_string(), "t".to_string())]);
    }

    #[test]
    fn functions_flag_set() {
        let d = parse_domain(
            "(define (domain d) (:functions (total-cost)) (:predicates (p ?x)))",
        )
        .unwrap();
        assert!(d.has_functions);
    }

    #[test]
    fn singleton_goal_without_and() {
        let t = parse_task(
            "(define (problem x) (:domain d) (:objects a) (:init (p a)) (:goal (p a)))",
        )
        .unwrap();
        assert_eq!(t.goal.len(), 1);
        assert!(t.goal.contains(&PddlAtom::new("p", &["a"])));
    }

    #[test]
    fn untyped_objects_default_to_object() {
        let t = parse_task(
            "(define (problem x) (:domain d) (:objects b1 b2) (:init (on b1 b2)) (:goal (on b2 b1)))",
        )
        .unwrap();
        assert_eq!(t.objects["object"], vec!["b1", "b2"]);
    }

    #[test]
    fn undeclared_object_rejected() {
        let err = parse_task(
            "(define (problem x) (:domain d) (:objects a) (:init (p a b)) (:goal (p a a)))",
        )
        .unwrap_err();
        assert_eq!(err, PddlError::UndeclaredObject("b".to_string()));
    }

    #[test]
    fn cost_literal_round_trip() {
        let t = parse_task(
            "(define (problem x) (:domain d) (:objects a - t) (:init (= (total-cost) 0) (p a)) \
             (:goal (and (p a))) (:metric minimize (total-cost)))",
        )
        .unwrap();
        assert!(t.metric_minimize_total_cost);
        assert!(t.init.contains(&PddlAtom::new("=", &["total-cost", "0"])));
    }

    #[test]
    fn unknown_domain_sections_warn_and_parse() {
        let d = parse_domain(
            "(define (domain d) (:strange (stuff)) (:predicates (p ?x)))",
        )
        .unwrap();
        assert_eq!(d.warnings.len(), 1);
        assert!(d.warnings[0].contains(":strange"));
        assert_eq!(d.predicates.len(), 1);
    }

    #[test]
    fn type_hierarchy_subtypes() {
        let d = parse_domain(
            "(define (domain barman) (:types hand level container - object shot shaker - container) \
             (:predicates (clean ?c - container)))",
        )
        .unwrap();
        assert!(d.is_subtype("shot", "container"));
        assert!(d.is_subtype("shot", "object"));
        assert!(!d.is_subtype("container", "shot"));
        assert!(d.declares_type("object"));
    }
}
