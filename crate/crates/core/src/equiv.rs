//! Task equivalence up to type-respecting object renaming.
//!
//! Two entry points: [`tasks_equivalent`] runs gate checks and a pruned
//! backtracking search for a per-type bijection under which the init and
//! goal sets coincide; [`brute_force_equivalent`] enumerates the full
//! cartesian product of per-type permutations. Both must agree — the
//! brute-force form is the test oracle.

use crate::naming::natural_cmp;
use crate::pddl::{PddlAtom, TaskPddl};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

pub const DEFAULT_PERMUTATION_BOUND: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error("tasks reference different domains: `{a}` vs `{b}`")]
    DomainMismatch { a: String, b: String },
    #[error("permutation space {permutations} exceeds the bound {bound}")]
    SearchSpaceTooLarge { permutations: u128, bound: u128 },
}

/// A per-type bijection from the objects of task A to those of task B.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ObjectMapping {
    pub by_type: BTreeMap<String, BTreeMap<String, String>>,
}

impl ObjectMapping {
    pub fn flat(&self) -> BTreeMap<String, String> {
        self.by_type
            .values()
            .flat_map(|m| m.iter().map(|(a, b)| (a.clone(), b.clone())))
            .collect()
    }

    pub fn identity(task: &TaskPddl) -> Self {
        let mut by_type = BTreeMap::new();
        for (ty, ids) in &task.objects {
            by_type.insert(
                ty.clone(),
                ids.iter()
                    .map(|id| (id.clone(), id.clone()))
                    .collect::<BTreeMap<_, _>>(),
            );
        }
        ObjectMapping { by_type }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MismatchReason {
    Types,
    ObjectCounts,
    InitCounts,
    GoalCounts,
    NoMapping,
}

impl MismatchReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            MismatchReason::Types => "types",
            MismatchReason::ObjectCounts => "object_counts",
            MismatchReason::InitCounts => "init_counts",
            MismatchReason::GoalCounts => "goal_counts",
            MismatchReason::NoMapping => "no_mapping",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceResult {
    pub equivalent: bool,
    pub witness: Option<ObjectMapping>,
    pub reason: Option<MismatchReason>,
}

impl EquivalenceResult {
    fn no(reason: MismatchReason) -> Self {
        EquivalenceResult {
            equivalent: false,
            witness: None,
            reason: Some(reason),
        }
    }
}

fn map_atom(m: &BTreeMap<String, String>, atom: &PddlAtom) -> PddlAtom {
    PddlAtom {
        predicate: atom.predicate.clone(),
        args: atom
            .args
            .iter()
            .map(|a| m.get(a).cloned().unwrap_or_else(|| a.clone()))
            .collect(),
    }
}

/// True iff the image of `s` under `m` equals `t` as a set. Arguments
/// without a mapping entry (non-object tokens) are left unchanged.
pub fn check_state_equivalence(
    m: &BTreeMap<String, String>,
    s: &BTreeSet<PddlAtom>,
    t: &BTreeSet<PddlAtom>,
) -> bool {
    let image: BTreeSet<PddlAtom> = s.iter().map(|atom| map_atom(m, atom)).collect();
    image == *t
}

/// Gate checks shared by both checkers. Returns the failing reason, or
/// None when the search may proceed.
fn gate_checks(a: &TaskPddl, b: &TaskPddl) -> Result<Option<MismatchReason>, EquivError> {
    if a.domain_name != b.domain_name {
        return Err(EquivError::DomainMismatch {
            a: a.domain_name.clone(),
            b: b.domain_name.clone(),
        });
    }
    if a.types_used() != b.types_used() {
        return Ok(Some(MismatchReason::Types));
    }
    for (ty, ids) in &a.objects {
        if b.objects.get(ty).map(Vec::len) != Some(ids.len()) {
            return Ok(Some(MismatchReason::ObjectCounts));
        }
    }
    if a.init.len() != b.init.len() || a.metric_minimize_total_cost != b.metric_minimize_total_cost
    {
        return Ok(Some(MismatchReason::InitCounts));
    }
    if a.goal.len() != b.goal.len() {
        return Ok(Some(MismatchReason::GoalCounts));
    }
    Ok(None)
}

// ---------------------------------------------------------------------
// pruned search

type Signature = Vec<(u8, String, usize, Vec<String>)>;

/// Mapping-invariant signature of an object: where it occurs, with the
/// types of its co-arguments.
fn signatures(task: &TaskPddl) -> BTreeMap<String, Signature> {
    let type_of: BTreeMap<&String, &String> = task
        .objects
        .iter()
        .flat_map(|(ty, ids)| ids.iter().map(move |id| (id, ty)))
        .collect();
    let mut sigs: BTreeMap<String, Signature> = BTreeMap::new();
    for ids in task.objects.values() {
        for id in ids {
            sigs.insert(id.clone(), Vec::new());
        }
    }
    for (state, atoms) in [(0u8, &task.init), (1u8, &task.goal)] {
        for atom in atoms {
            for (pos, arg) in atom.args.iter().enumerate() {
                let others: Vec<String> = atom
                    .args
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != pos)
                    .map(|(_, other)| {
                        type_of
                            .get(other)
                            .map(|t| (*t).clone())
                            .unwrap_or_else(|| format!("<{other}>"))
                    })
                    .collect();
                if let Some(entries) = sigs.get_mut(arg) {
                    entries.push((state, atom.predicate.clone(), pos, others));
                }
            }
        }
    }
    for entries in sigs.values_mut() {
        entries.sort();
    }
    sigs
}

struct Search<'a> {
    a: &'a TaskPddl,
    b: &'a TaskPddl,
    /// (type, a_id, candidate b_ids) in assignment order
    slots: Vec<(String, String, Vec<String>)>,
    /// atoms of A grouped by the slot at which all their args are mapped
    init_due: Vec<Vec<&'a PddlAtom>>,
    goal_due: Vec<Vec<&'a PddlAtom>>,
}

impl<'a> Search<'a> {
    fn run(a: &'a TaskPddl, b: &'a TaskPddl) -> Option<ObjectMapping> {
        let sig_a = signatures(a);
        let sig_b = signatures(b);

        let mut slots = Vec::new();
        for (ty, ids_a) in &a.objects {
            let ids_b = &b.objects[ty];
            for id in ids_a {
                let candidates: Vec<String> = ids_b
                    .iter()
                    .filter(|cand| sig_b.get(*cand) == sig_a.get(id))
                    .cloned()
                    .collect();
                if candidates.is_empty() {
                    return None;
                }
                slots.push((ty.clone(), id.clone(), candidates));
            }
        }
        // assign the most constrained objects first; deterministic tie-break
        slots.sort_by(|x, y| {
            x.2.len()
                .cmp(&y.2.len())
                .then_with(|| x.0.cmp(&y.0))
                .then_with(|| natural_cmp(&x.1, &y.1))
        });

        let slot_of: BTreeMap<&String, usize> =
            slots.iter().enumerate().map(|(i, s)| (&s.1, i)).collect();
        let due_slot = |atom: &PddlAtom| -> Option<usize> {
            atom.args
                .iter()
                .filter_map(|arg| slot_of.get(arg).copied())
                .max()
        };
        let mut init_due: Vec<Vec<&PddlAtom>> = vec![Vec::new(); slots.len()];
        let mut goal_due: Vec<Vec<&PddlAtom>> = vec![Vec::new(); slots.len()];
        for atom in &a.init {
            match due_slot(atom) {
                Some(i) => init_due[i].push(atom),
                // atom mentions no mapped objects: must appear verbatim in B
                None if !b.init.contains(atom) => return None,
                None => {}
            }
        }
        for atom in &a.goal {
            match due_slot(atom) {
                Some(i) => goal_due[i].push(atom),
                None if !b.goal.contains(atom) => return None,
                None => {}
            }
        }

        let mut search = Search {
            a,
            b,
            slots,
            init_due,
            goal_due,
        };
        let mut mapping: BTreeMap<String, String> = BTreeMap::new();
        let mut used: BTreeSet<String> = BTreeSet::new();
        if search.assign(0, &mut mapping, &mut used) {
            let mut by_type: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
            for (ty, a_id, _) in &search.slots {
                by_type
                    .entry(ty.clone())
                    .or_default()
                    .insert(a_id.clone(), mapping[a_id].clone());
            }
            Some(ObjectMapping { by_type })
        } else {
            None
        }
    }

    fn assign(
        &mut self,
        slot: usize,
        mapping: &mut BTreeMap<String, String>,
        used: &mut BTreeSet<String>,
    ) -> bool {
        if slot == self.slots.len() {
            return check_state_equivalence(mapping, &self.a.init, &self.b.init)
                && check_state_equivalence(mapping, &self.a.goal, &self.b.goal);
        }
        let (_, a_id, candidates) = self.slots[slot].clone();
        for cand in candidates {
            if used.contains(&cand) {
                continue;
            }
            mapping.insert(a_id.clone(), cand.clone());
            used.insert(cand.clone());
            let consistent = self.init_due[slot]
                .iter()
                .all(|atom| self.b.init.contains(&map_atom(mapping, atom)))
                && self.goal_due[slot]
                    .iter()
                    .all(|atom| self.b.goal.contains(&map_atom(mapping, atom)));
            if consistent && self.assign(slot + 1, mapping, used) {
                return true;
            }
            mapping.remove(&a_id);
            used.remove(&cand);
        }
        false
    }
}

/// Decides equivalence with gate checks plus a signature-pruned
/// backtracking search. Returns the verified witness when equivalent.
pub fn tasks_equivalent(a: &TaskPddl, b: &TaskPddl) -> Result<EquivalenceResult, EquivError> {
    if let Some(reason) = gate_checks(a, b)? {
        return Ok(EquivalenceResult::no(reason));
    }
    match Search::run(a, b) {
        Some(witness) => {
            let flat = witness.flat();
            debug_assert!(
                check_state_equivalence(&flat, &a.init, &b.init)
                    && check_state_equivalence(&flat, &a.goal, &b.goal)
            );
            Ok(EquivalenceResult {
                equivalent: true,
                witness: Some(witness),
                reason: None,
            })
        }
        None => Ok(EquivalenceResult::no(MismatchReason::NoMapping)),
    }
}

// ---------------------------------------------------------------------
// brute-force oracle

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn permutations(items: &[String]) -> Vec<Vec<String>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let mut rest: Vec<String> = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, item.clone());
            out.push(tail);
        }
    }
    out
}

/// The oracle: fixes task-A object order and tries every combination of
/// per-type permutations of task-B objects.
pub fn brute_force_equivalent_with_bound(
    a: &TaskPddl,
    b: &TaskPddl,
    bound: u128,
) -> Result<bool, EquivError> {
    if gate_checks(a, b)?.is_some() {
        return Ok(false);
    }

    let types: Vec<&String> = a.objects.keys().collect();
    let mut space: u128 = 1;
    for ty in &types {
        space = space.saturating_mul(factorial(a.objects[*ty].len()));
    }
    if space > bound {
        return Err(EquivError::SearchSpaceTooLarge {
            permutations: space,
            bound,
        });
    }

    let task_objects: Vec<Vec<String>> = types.iter().map(|ty| a.objects[*ty].clone()).collect();
    let per_type_perms: Vec<Vec<Vec<String>>> = types
        .iter()
        .map(|ty| permutations(&b.objects[*ty]))
        .collect();

    let mut indices = vec![0usize; types.len()];
    loop {
        let mut mapping: BTreeMap<String, String> = BTreeMap::new();
        for (t, perm_set) in per_type_perms.iter().enumerate() {
            let perm = &perm_set[indices[t]];
            for (a_id, b_id) in task_objects[t].iter().zip(perm.iter()) {
                mapping.insert(a_id.clone(), b_id.clone());
            }
        }
        if check_state_equivalence(&mapping, &a.init, &b.init)
            && check_state_equivalence(&mapping, &a.goal, &b.goal)
        {
            return Ok(true);
        }
        // odometer increment over the cartesian product
        let mut t = 0;
        loop {
            if t == indices.len() {
                return Ok(false);
            }
            indices[t] += 1;
            if indices[t] < per_type_perms[t].len() {
                break;
            }
            indices[t] = 0;
            t += 1;
        }
    }
}

pub fn brute_force_equivalent(a: &TaskPddl, b: &TaskPddl) -> Result<bool, EquivError> {
    brute_force_equivalent_with_bound(a, b, DEFAULT_PERMUTATION_BOUND)
}
