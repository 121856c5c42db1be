//! Canonical task serialization: objects sorted by type then id, init
//! atoms in natural order, the goal as a single conjunction. Output is
//! stable across runs.

use super::{PddlAtom, TaskPddl};
use crate::naming::natural_cmp;

pub fn serialize_task(task: &TaskPddl) -> String {
    let mut out = String::new();
    out.push_str(&format!("(define (problem {})\n", task.problem_name));
    out.push_str(&format!("  (:domain {})\n", task.domain_name));

    if !task.objects.is_empty() {
        out.push_str("  (:objects\n");
        for (ty, ids) in &task.objects {
            out.push_str("    ");
            out.push_str(&ids.join(" "));
            out.push_str(&format!(" - {ty}\n"));
        }
        out.push_str("  )\n");
    }

    out.push_str("  (:init\n");
    for atom in sorted_atoms(&task.init) {
        out.push_str(&format!("    {atom}\n"));
    }
    out.push_str("  )\n");

    out.push_str("  (:goal\n    (and\n");
    for atom in sorted_atoms(&task.goal) {
        out.push_str(&format!("      {atom}\n"));
    }
    out.push_str("    )\n  )\n");

    if task.metric_minimize_total_cost {
        out.push_str("  (:metric minimize (total-cost))\n");
    }
    out.push_str(")\n");
    out
}

fn sorted_atoms(atoms: &std::collections::BTreeSet<PddlAtom>) -> Vec<String> {
    let mut rendered: Vec<String> = atoms.iter().map(|a| a.to_string()).collect();
    rendered.sort_by(|a, b| natural_cmp(a, b));
    rendered
}
