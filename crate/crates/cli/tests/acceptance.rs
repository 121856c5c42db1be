//! Acceptance suite: every release criterion as one test, each printing
//! a PASS line with its measured numbers. Tolerances are exact unless a
//! wall-clock bound is stated.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};
use tic_core::equiv::{brute_force_equivalent_with_bound, tasks_equivalent};
use tic_core::harness::{evaluate_dataset, load_dataset, run_task, EvalConfig, TranslationInput};
use tic_core::infer::{
    expand_cardinalities, expand_maps, map_specs, CardinalitySpec, InferError,
};
use tic_core::ir::{Atom, BodyElem, Literal, Rule, RuleKind, Term};
use tic_core::naming::NamingTemplates;
use tic_core::packs::builtin_pack;
use tic_core::pddl::{parse_task, PddlAtom, TaskPddl};
use tic_core::translate::{
    build_prompt, Completer, CompletionProvider, PromptKind, PromptSpec, ProviderProfile,
    TranslateError,
};
use tic_core::{materialize, FactBase, Program, Provenance};

fn repo_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("..").join("..").join(rel)
}

fn pass(criterion: &str, detail: String) {
    println!("ACCEPTANCE PASS [{criterion}] {detail}");
}

/// Small deterministic generator for the randomized criteria.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        // xorshift64*
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n.max(1) as u64) as usize
    }
}

// ---------------------------------------------------------------------

#[test]
fn c01_golden_barman_pipeline() {
    let started = Instant::now();
    let pack = builtin_pack("barman").unwrap();
    let ir_text =
        std::fs::read_to_string(repo_path("crates/core/tests/fixtures/barman_reference.lp")).unwrap();
    let ir = tic_core::parse_program(&ir_text, "reference").unwrap();
    let facts = pack.materialize(&ir).unwrap();

    let shot5 = Atom::new("object", vec![Term::sym("shot5"), Term::sym("shot")]);
    assert_eq!(facts.provenance(&shot5), Some(Provenance::Generated));
    assert!(facts.contains(&Atom::new(
        "init",
        vec![Term::compound("clean", vec![Term::sym("shot5")])]
    )));

    let compiled = tic_core::compile_task(
        &facts,
        &pack.domain,
        "prob",
        &pack.compile_options(),
    )
    .unwrap();
    let reference = parse_task(
        &std::fs::read_to_string(repo_path("crates/core/tests/fixtures/barman_reference.pddl")).unwrap(),
    )
    .unwrap();
    let verdict = tasks_equivalent(&compiled, &reference).unwrap();
    assert!(verdict.equivalent, "reason: {:?}", verdict.reason);

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    pass(
        "C1 golden barman pipeline",
        format!("equivalent incl. generated shot5, in {elapsed:?}"),
    );
}

#[test]
fn c02_cardinality_expansion_exact() {
    let mut named = FactBase::new();
    for i in 1..=4 {
        named.insert(
            Atom::new("object", vec![Term::Symbol(format!("shot{i}")), Term::sym("shot")]),
            Provenance::Stated,
        );
    }
    let spec = [CardinalitySpec {
        type_name: "shot".into(),
        required_count: 5,
    }];
    let expanded = expand_cardinalities(&named, &spec, &NamingTemplates::default()).unwrap();
    let generated: Vec<Atom> = expanded
        .atoms_with_provenance()
        .filter(|(_, p)| *p == Provenance::Generated)
        .map(|(a, _)| a)
        .collect();
    assert_eq!(generated.len(), 1);
    assert_eq!(generated[0].to_string(), "object(shot5, shot)");

    let mut six = named.clone();
    for i in 5..=6 {
        six.insert(
            Atom::new("object", vec![Term::Symbol(format!("shot{i}")), Term::sym("shot")]),
            Provenance::Stated,
        );
    }
    let err = expand_cardinalities(&six, &spec, &NamingTemplates::default()).unwrap_err();
    assert!(matches!(
        err,
        InferError::CardinalityViolation { named: 6, required: 5, .. }
    ));
    pass(
        "C2 cardinality expansion",
        "exactly one generated object; six named raises a violation".to_string(),
    );
}

#[test]
fn c03_map_expansion_exact() {
    let mut facts = FactBase::new();
    for i in 1..=3 {
        facts.insert(
            Atom::new(
                "object",
                vec![Term::Symbol(format!("dispenser{i}")), Term::sym("dispenser")],
            ),
            Provenance::Stated,
        );
        facts.insert(
            Atom::new(
                "object",
                vec![Term::Symbol(format!("ingredient{i}")), Term::sym("ingredient")],
            ),
            Provenance::Stated,
        );
    }
    facts.insert(
        Atom::new(
            "init",
            vec![Term::compound(
                "map",
                vec![
                    Term::sym("dispenser"),
                    Term::sym("dispenses"),
                    Term::sym("ingredient"),
                ],
            )],
        ),
        Provenance::Stated,
    );
    let specs = map_specs(&facts);
    let expanded = expand_maps(&facts, &specs).unwrap();
    let pairs: Vec<String> = expanded
        .atoms()
        .filter_map(|a| a.wrapped_inner())
        .filter(|inner| inner.predicate == "dispenses")
        .map(|inner| inner.to_string())
        .collect();
    assert_eq!(pairs.len(), 3);
    for i in 1..=3 {
        assert!(pairs.contains(&format!("dispenses(dispenser{i}, ingredient{i})")));
    }
    assert!(map_specs(&expanded).is_empty(), "map atom consumed");

    // 3 vs 2 has no bijection
    let mut unbalanced = facts.clone();
    unbalanced.remove(&Atom::new(
        "object",
        vec![Term::sym("ingredient3"), Term::sym("ingredient")],
    ));
    let err = expand_maps(&unbalanced, &map_specs(&unbalanced)).unwrap_err();
    assert!(matches!(
        err,
        InferError::MapArityMismatch { left_count: 3, right_count: 2, .. }
    ));
    pass(
        "C3 map expansion",
        "3+3 gives the canonical bijection; 3 vs 2 raises a mismatch".to_string(),
    );
}

#[test]
fn c04_grid_derivation_counts() {
    let started = Instant::now();
    let rules = tic_core::parse_program(
        "floortile_grid(R, C, Z) :- init(floortile_grid(R, C, Z)).\n\
         init(up(Z1, Z2)) :- floortile_grid(R, C, Z1), floortile_grid(R-1, C, Z2).\n\
         init(down(Z2, Z1)) :- floortile_grid(R, C, Z1), floortile_grid(R-1, C, Z2).\n\
         init(right(Z1, Z2)) :- floortile_grid(R, C, Z1), floortile_grid(R, C-1, Z2).\n\
         init(left(Z2, Z1)) :- floortile_grid(R, C, Z1), floortile_grid(R, C-1, Z2).\n",
        "rules",
    )
    .unwrap();
    let count = |facts: &FactBase, pred: &str| -> usize {
        facts
            .atoms()
            .filter(|a| a.wrapped_inner().map(|i| i.predicate == pred).unwrap_or(false))
            .count()
    };
    for rows in 1..=6i64 {
        for cols in 1..=6i64 {
            let mut src = String::new();
            for r in 0..rows {
                for c in 1..=cols {
                    src.push_str(&format!("init(floortile_grid({r}, {c}, t_{r}_{c})).\n"));
                }
            }
            let ir = tic_core::parse_program(&src, "grid").unwrap();
            let facts = materialize(&ir, &rules, &NamingTemplates::default()).unwrap();
            // double-loop oracle
            let mut vertical = 0usize;
            let mut horizontal = 0usize;
            for r in 0..rows {
                for c in 0..cols {
                    if r + 1 < rows {
                        vertical += 1;
                    }
                    if c + 1 < cols {
                        horizontal += 1;
                    }
                }
            }
            assert_eq!(count(&facts, "up"), vertical, "{rows}x{cols} up");
            assert_eq!(count(&facts, "down"), vertical, "{rows}x{cols} down");
            assert_eq!(count(&facts, "right"), horizontal, "{rows}x{cols} right");
            assert_eq!(count(&facts, "left"), horizontal, "{rows}x{cols} left");
            assert_eq!(vertical, ((rows - 1) * cols) as usize);
            assert_eq!(horizontal, (rows * (cols - 1)) as usize);
        }
    }

    // the 5x3 instance with two robots has exactly 13 clear tiles
    let pack = builtin_pack("floortile").unwrap();
    let mut src = String::new();
    for r in 0..5 {
        for c in 1..=3 {
            src.push_str(&format!("init(floortile_grid({r}, {c}, tile_{r}_{c})).\n"));
        }
    }
    src.push_str("init(robot_at(robot1, tile_1_1)).\n");
    src.push_str("init(robot_at(robot2, tile_2_3)).\n");
    src.push_str("goal(painted(tile_0_1, white)).\n");
    let ir = tic_core::parse_program(&src, "ir").unwrap();
    let facts = pack.materialize(&ir).unwrap();
    assert_eq!(count(&facts, "clear"), 13);

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass(
        "C4 grid derivation",
        format!("36 grids match the double-loop oracle; 5x3 has 13 clear tiles; {elapsed:?}"),
    );
}

// ---------------------------------------------------------------------
// randomized task instances for the checker criteria

fn random_task(rng: &mut Rng) -> TaskPddl {
    let n_types = 1 + rng.below(3);
    let mut task = TaskPddl {
        problem_name: "p".into(),
        domain_name: "d".into(),
        ..TaskPddl::default()
    };
    let mut all_objects = Vec::new();
    for t in 0..n_types {
        let n = 1 + rng.below(4);
        for i in 0..n {
            let id = format!("o{t}_{i}");
            task.add_object(&id, &format!("t{t}"));
            all_objects.push(id);
        }
    }
    let n_preds = 1 + rng.below(3);
    let make_atom = |rng: &mut Rng| -> PddlAtom {
        let arity = 1 + rng.below(2);
        PddlAtom {
            predicate: format!("q{}", rng.below(n_preds)),
            args: (0..arity)
                .map(|_| all_objects[rng.below(all_objects.len())].clone())
                .collect(),
        }
    };
    for _ in 0..rng.below(9) {
        let atom = make_atom(rng);
        task.init.insert(atom);
    }
    for _ in 0..(1 + rng.below(4)) {
        let atom = make_atom(rng);
        task.goal.insert(atom);
    }
    task
}

fn random_renaming(rng: &mut Rng, task: &TaskPddl) -> TaskPddl {
    let mut mapping: BTreeMap<String, String> = BTreeMap::new();
    for ids in task.objects.values() {
        let mut target = ids.clone();
        for i in (1..target.len()).rev() {
            target.swap(i, rng.below(i + 1));
        }
        for (a, b) in ids.iter().zip(target.iter()) {
            mapping.insert(a.clone(), b.clone());
        }
    }
    let map = |atoms: &BTreeSet<PddlAtom>| -> BTreeSet<PddlAtom> {
        atoms
            .iter()
            .map(|a| PddlAtom {
                predicate: a.predicate.clone(),
                args: a
                    .args
                    .iter()
                    // non-object tokens (the cost literal) stay fixed
                    .map(|x| mapping.get(x).cloned().unwrap_or_else(|| x.clone()))
                    .collect(),
            })
            .collect()
    };
    TaskPddl {
        init: map(&task.init),
        goal: map(&task.goal),
        ..task.clone()
    }
}

fn random_mutation(rng: &mut Rng, task: &TaskPddl) -> TaskPddl {
    let mut out = task.clone();
    match rng.below(4) {
        0 => {
            if let Some(atom) = out.init.iter().nth(rng.below(out.init.len().max(1))).cloned() {
                out.init.remove(&atom);
            }
        }
        1 => {
            if out.goal.len() > 1 {
                if let Some(atom) = out.goal.iter().nth(rng.below(out.goal.len())).cloned() {
                    out.goal.remove(&atom);
                }
            }
        }
        2 => {
            if let Some(atom) = out.init.iter().nth(rng.below(out.init.len().max(1))).cloned() {
                if atom.args.len() == 2 {
                    let mut swapped = atom.clone();
                    swapped.args.swap(0, 1);
                    out.init.remove(&atom);
                    out.init.insert(swapped);
                }
            }
        }
        _ => {
            let ids: Vec<String> = out.declared_object_ids().into_iter().collect();
            if let Some(atom) = out.init.iter().nth(rng.below(out.init.len().max(1))).cloned() {
                if !atom.args.is_empty() {
                    let mut changed = atom.clone();
                    changed.args[0] = ids[rng.below(ids.len())].clone();
                    out.init.remove(&atom);
                    out.init.insert(changed);
                }
            }
        }
    }
    out
}

#[test]
fn c05_equivalence_differential_500() {
    let started = Instant::now();
    let mut rng = Rng(0x5EED_0001);
    let mut agreements = 0usize;
    let mut positives = 0usize;
    for case in 0..500usize {
        let a = random_task(&mut rng);
        let b = if case % 2 == 0 {
            random_renaming(&mut rng, &a)
        } else {
            let renamed = random_renaming(&mut rng, &a);
            random_mutation(&mut rng, &renamed)
        };
        let fast = tasks_equivalent(&a, &b).unwrap();
        let brute = brute_force_equivalent_with_bound(&a, &b, 100_000_000).unwrap();
        assert_eq!(
            fast.equivalent, brute,
            "case {case}: search={} oracle={brute}\nA: {a:?}\nB: {b:?}",
            fast.equivalent
        );
        if case % 2 == 0 {
            assert!(fast.equivalent, "case {case}: renaming must be equivalent");
        }
        agreements += 1;
        if fast.equivalent {
            positives += 1;
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    pass(
        "C5 equivalence differential",
        format!("500/500 agreements ({agreements} checked, {positives} equivalent) in {elapsed:?}"),
    );
}

#[test]
fn c06_checker_metamorphic_on_shipped_tasks() {
    let domains = load_dataset(&repo_path("dataset")).unwrap();
    let mut checked = 0usize;
    let mut rng = Rng(0x5EED_0002);
    for domain in &domains {
        for task in &domain.tasks {
            let gt = &task.ground_truth;
            // reflexivity
            assert!(tasks_equivalent(gt, gt).unwrap().equivalent);
            // invariance under per-type renaming, symmetry both ways
            let renamed = random_renaming(&mut rng, gt);
            assert!(
                tasks_equivalent(gt, &renamed).unwrap().equivalent,
                "{}/{} renaming",
                domain.name,
                task.id
            );
            assert!(
                tasks_equivalent(&renamed, gt).unwrap().equivalent,
                "{}/{} symmetry",
                domain.name,
                task.id
            );
            // atom-order invariance via canonical re-serialization
            let reparsed = parse_task(&tic_core::serialize_task(gt)).unwrap();
            assert!(tasks_equivalent(gt, &reparsed).unwrap().equivalent);
            checked += 1;
        }
    }
    assert_eq!(checked, 14);
    pass(
        "C6 checker metamorphic",
        format!("reflexivity, symmetry, renaming, reordering on {checked} ground truths"),
    );
}

#[test]
fn c07_prompt_golden_files() {
    let pack = builtin_pack("barman").unwrap();
    let task = std::fs::read_to_string(repo_path("dataset/barman/tasks/p01.nl")).unwrap();
    let upstream = tic_core::translate::Extraction {
        cardinalities: tic_core::translate::parse_cardinalities(
            "{shaker: 1, level: 3, shot: 5, dispenser: 3, hand: 2, ingredient: 3}",
        )
        .unwrap(),
        named_objects: tic_core::translate::parse_named_objects(
            "{shaker: [], level: [], shot: [shot1, shot2, shot3, shot4], dispenser: [], \
             hand: [left, right], cocktail: [cocktail1, cocktail2, cocktail3, cocktail4], \
             ingredient: [ingredient1, ingredient2, ingredient3]}",
        )
        .unwrap(),
        ir: Program::default(),
    };
    let fixtures = repo_path("crates/core/tests/fixtures/prompts");
    let cases = [
        (PromptKind::TicIc, false),
        (PromptKind::G3Cardinality, false),
        (PromptKind::G3Objects, false),
        (PromptKind::G3Rules, true),
        (PromptKind::G1, false),
    ];
    for (kind, needs_upstream) in cases {
        let spec = build_prompt(
            kind,
            &pack,
            &task,
            needs_upstream.then_some(&upstream),
        )
        .unwrap();
        let golden = std::fs::read_to_string(
            fixtures.join(format!("{}_barman.txt", kind.as_str())),
        )
        .unwrap();
        assert_eq!(spec.rendered_text, golden, "{} drifted", kind.as_str());
    }
    pass("C7 prompt golden files", "all five builders byte-match".to_string());
}

#[test]
fn c08_replay_eval_end_to_end() {
    let started = Instant::now();
    let dataset = repo_path("dataset");
    let domains = load_dataset(&dataset).unwrap();
    assert_eq!(domains.len(), 7);
    for d in &domains {
        assert!(d.tasks.len() >= 2, "{} has {} tasks", d.name, d.tasks.len());
    }
    let provider =
        CompletionProvider::replay(ProviderProfile::default(), &dataset.join("cassettes"));
    let config = EvalConfig {
        jobs: 2,
        mode_label: "replay".into(),
        ..EvalConfig::default()
    };
    let report = evaluate_dataset(&domains, &config, &provider).unwrap();
    for domain in &report.domains {
        for s in &domain.strategies {
            assert_eq!(
                s.accuracy, 100.0,
                "{}: accuracy {} over {} tasks",
                domain.name, s.accuracy, s.total
            );
        }
    }
    assert!(report.failures.is_empty());
    assert_eq!(provider.network_calls(), 0, "replay must stay offline");
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    pass(
        "C8 replay end-to-end",
        format!(
            "100% accuracy across {} domains, zero network calls, {elapsed:?}",
            report.domains.len()
        ),
    );
}

// ---------------------------------------------------------------------
// criterion 9: a second, self-contained exhaustive evaluator

#[test]
fn c09_inference_oracle_equivalence_200() {
    let mut rng = Rng(0x5EED_0003);
    let mut checked = 0usize;
    while checked < 200 {
        let (program, expected) = random_stratified_program(&mut rng);
        let facts = materialize(
            &program,
            &Program::new("empty"),
            &NamingTemplates::default(),
        )
        .unwrap();
        let got: BTreeSet<String> = facts.atoms().map(|a| a.to_string()).collect();
        assert_eq!(got, expected, "program:\n{program}");
        checked += 1;
    }
    pass(
        "C9 inference oracle",
        format!("{checked}/200 random programs match the exhaustive evaluator"),
    );
}

/// Builds a random stratified program and evaluates it with a
/// from-scratch enumerator (independent of the engine's joins).
fn random_stratified_program(rng: &mut Rng) -> (Program, BTreeSet<String>) {
    let n_consts = 1 + rng.below(4);
    let consts: Vec<String> = (0..n_consts).map(|i| format!("c{i}")).collect();
    let n_preds = 3 + rng.below(3);
    let arities: Vec<usize> = (0..n_preds).map(|_| 1 + rng.below(2)).collect();
    let level = |p: usize| p / 2;

    // ground facts
    let mut facts: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
    for _ in 0..rng.below(31) {
        let p = rng.below(n_preds);
        let args: Vec<usize> = (0..arities[p]).map(|_| rng.below(n_consts)).collect();
        facts.insert((p, args));
    }

    // rules: head level >= positive levels, > negative levels
    #[derive(Clone)]
    struct R {
        head: (usize, Vec<isize>), // negative arg = variable index - 1
        pos: Vec<(usize, Vec<isize>)>,
        neg: Vec<(usize, Vec<isize>)>,
    }
    let mut rules: Vec<R> = Vec::new();
    for _ in 0..rng.below(11) {
        let head_pred = rng.below(n_preds);
        let mut pos = Vec::new();
        let mut bound: Vec<isize> = Vec::new();
        for _ in 0..(1 + rng.below(2)) {
            let candidates: Vec<usize> =
                (0..n_preds).filter(|p| level(*p) <= level(head_pred)).collect();
            let p = candidates[rng.below(candidates.len())];
            let args: Vec<isize> = (0..arities[p])
                .map(|_| {
                    if rng.below(2) == 0 {
                        rng.below(n_consts) as isize
                    } else {
                        let v = -(1 + rng.below(3) as isize);
                        if !bound.contains(&v) {
                            bound.push(v);
                        }
                        v
                    }
                })
                .collect();
            pos.push((p, args));
        }
        let mut neg = Vec::new();
        let neg_candidates: Vec<usize> =
            (0..n_preds).filter(|p| level(*p) < level(head_pred)).collect();
        if !neg_candidates.is_empty() && rng.below(2) == 0 {
            let p = neg_candidates[rng.below(neg_candidates.len())];
            let args: Vec<isize> = (0..arities[p])
                .map(|_| {
                    if bound.is_empty() || rng.below(2) == 0 {
                        rng.below(n_consts) as isize
                    } else {
                        bound[rng.below(bound.len())]
                    }
                })
                .collect();
            neg.push((p, args));
        }
        let head_args: Vec<isize> = (0..arities[head_pred])
            .map(|_| {
                if bound.is_empty() || rng.below(2) == 0 {
                    rng.below(n_consts) as isize
                } else {
                    bound[rng.below(bound.len())]
                }
            })
            .collect();
        rules.push(R {
            head: (head_pred, head_args),
            pos,
            neg,
        });
    }

    // exhaustive evaluation, level by level
    let mut model = facts.clone();
    let max_level = level(n_preds - 1);
    for current in 0..=max_level {
        loop {
            let mut added = false;
            for rule in rules.iter().filter(|r| level(r.head.0) == current) {
                let mut vars: Vec<isize> = Vec::new();
                for (_, args) in std::iter::once(&rule.head)
                    .chain(rule.pos.iter())
                    .chain(rule.neg.iter())
                {
                    for a in args {
                        if *a < 0 && !vars.contains(a) {
                            vars.push(*a);
                        }
                    }
                }
                let mut assignment = vec![0usize; vars.len()];
                'assignments: loop {
                    let value = |arg: &isize, assignment: &[usize]| -> usize {
                        if *arg >= 0 {
                            *arg as usize
                        } else {
                            assignment[vars.iter().position(|v| v == arg).unwrap()]
                        }
                    };
                    let pos_ok = rule.pos.iter().all(|(p, args)| {
                        let g: Vec<usize> = args.iter().map(|a| value(a, &assignment)).collect();
                        model.contains(&(*p, g))
                    });
                    let neg_ok = rule.neg.iter().all(|(p, args)| {
                        let g: Vec<usize> = args.iter().map(|a| value(a, &assignment)).collect();
                        !model.contains(&(*p, g))
                    });
                    if pos_ok && neg_ok {
                        let g: Vec<usize> =
                            rule.head.1.iter().map(|a| value(a, &assignment)).collect();
                        if model.insert((rule.head.0, g)) {
                            added = true;
                        }
                    }
                    let mut i = 0;
                    loop {
                        if i == assignment.len() {
                            break 'assignments;
                        }
                        assignment[i] += 1;
                        if assignment[i] < n_consts {
                            break;
                        }
                        assignment[i] = 0;
                        i += 1;
                    }
                }
            }
            if !added {
                break;
            }
        }
    }

    // render the same program in engine syntax
    let term = |arg: &isize| -> Term {
        if *arg >= 0 {
            Term::Symbol(consts[*arg as usize].clone())
        } else {
            Term::Variable(format!("V{}", -arg))
        }
    };
    let mut program = Program::new("random");
    for (p, args) in &facts {
        program.rules.push(Rule::fact(Atom::new(
            &format!("p{p}"),
            args.iter().map(|c| Term::Symbol(consts[*c].clone())).collect(),
        )));
    }
    for rule in &rules {
        let mut body = Vec::new();
        for (p, args) in &rule.pos {
            body.push(BodyElem::Literal(Literal {
                atom: Atom::new(&format!("p{p}"), args.iter().map(&term).collect()),
                negated: false,
            }));
        }
        for (p, args) in &rule.neg {
            body.push(BodyElem::Literal(Literal {
                atom: Atom::new(&format!("p{p}"), args.iter().map(&term).collect()),
                negated: true,
            }));
        }
        program.rules.push(Rule {
            head: Atom::new(&format!("p{}", rule.head.0), rule.head.1.iter().map(&term).collect()),
            body,
            kind: RuleKind::Rule,
            line: 0,
            col: 0,
        });
    }
    let expected: BTreeSet<String> = model
        .iter()
        .map(|(p, args)| {
            Atom::new(
                &format!("p{p}"),
                args.iter().map(|c| Term::Symbol(consts[*c].clone())).collect(),
            )
            .to_string()
        })
        .collect();
    (program, expected)
}

#[test]
fn c10_eval_report_determinism() {
    let dataset = repo_path("dataset");
    let domains = load_dataset(&dataset).unwrap();
    let provider =
        CompletionProvider::replay(ProviderProfile::default(), &dataset.join("cassettes"));
    let config = EvalConfig {
        golden_ir: true,
        jobs: 4,
        mode_label: "golden-ir".into(),
        ..EvalConfig::default()
    };
    let mask = |json: String| -> String {
        json.lines()
            .filter(|l| !l.contains("\"timestamp\"") && !l.contains("\"elapsed_ms\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let first = mask(evaluate_dataset(&domains, &config, &provider).unwrap().to_json());
    let second = mask(evaluate_dataset(&domains, &config, &provider).unwrap().to_json());
    assert_eq!(first, second, "reports differ after masking timing fields");
    assert!(first.contains("\"accuracy\": 100.0"));
    pass(
        "C10 determinism",
        "two golden-IR eval reports are byte-identical after masking timing fields".to_string(),
    );
}

/// A provider that answers from the cassette store after a fixed delay,
/// standing in for model latency.
struct SleepyReplay {
    inner: CompletionProvider,
    delay: Duration,
}

impl Completer for SleepyReplay {
    fn complete(&self, prompt: &PromptSpec) -> Result<String, TranslateError> {
        std::thread::sleep(self.delay);
        self.inner.complete(prompt)
    }
}

#[test]
fn c11_translate_dominates_pipeline_time() {
    let dataset = repo_path("dataset");
    let domains = load_dataset(&dataset).unwrap();
    let sleepy = SleepyReplay {
        inner: CompletionProvider::replay(
            ProviderProfile::default(),
            &dataset.join("cassettes"),
        ),
        delay: Duration::from_millis(100),
    };
    let mut worst_share = 1.0f64;
    let mut slowest_rest = Duration::ZERO;
    for domain in &domains {
        for task in &domain.tasks {
            let result = run_task(
                &domain.pack,
                TranslationInput::Model {
                    strategy: tic_core::translate::TranslationStrategy::Ic,
                    completer: &sleepy,
                },
                &task.id,
                Some(&task.ground_truth),
                &task.description,
            );
            assert!(result.error.is_none(), "{}/{}", domain.name, task.id);
            let t = &result.timings;
            let share = t.translate.as_secs_f64() / t.total().as_secs_f64();
            worst_share = worst_share.min(share);
            slowest_rest = slowest_rest.max(t.infer + t.compile + t.check);
            assert!(
                share > 0.9,
                "{}/{}: translate share {:.3} (translate {:?}, rest {:?})",
                domain.name,
                task.id,
                share,
                t.translate,
                t.infer + t.compile + t.check
            );
        }
    }
    pass(
        "C11 timing split",
        format!(
            "translate share >= {:.1}% on every task; slowest infer+compile+check {:?}",
            worst_share * 100.0,
            slowest_rest
        ),
    );
}
