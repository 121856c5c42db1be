//! Round-trip and safety properties of the program syntax.

use proptest::prelude::*;
use tic_core::ir::{parse_program, serialize_program, ParseError};
use tic_core::{serialize_program as ser, Program};

fn reparse(p: &Program) -> Program {
    parse_program(&ser(p), "roundtrip").expect("serialized program parses")
}

// grammar-directed text generator: every produced source is valid
fn arb_symbol() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,6}"
}

fn arb_term(vars: Vec<String>) -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        arb_symbol(),
        (-20i64..100).prop_map(|n| n.to_string()),
        prop::sample::select(vars).prop_map(|v| v),
        Just("_".to_string()),
    ];
    leaf.prop_recursive(2, 8, 3, |inner| {
        (arb_symbol(), prop::collection::vec(inner, 1..=3))
            .prop_map(|(f, args)| format!("{f}({})", args.join(", ")))
    })
}

fn arb_fact() -> impl Strategy<Value = String> {
    (
        arb_symbol(),
        prop::collection::vec(
            prop_oneof![arb_symbol(), (0i64..50).prop_map(|n| n.to_string())],
            0..=3,
        ),
    )
        .prop_map(|(p, args)| {
            if args.is_empty() {
                format!("{p}.")
            } else {
                format!("{p}({}).", args.join(", "))
            }
        })
}

fn body_atom() -> impl Strategy<Value = String> {
    let vars = vec!["V0".to_string(), "V1".to_string(), "V2".to_string()];
    (arb_symbol(), prop::collection::vec(arb_term(vars), 1..=3))
        .prop_map(|(p, args)| format!("{p}({})", args.join(", ")))
}

fn arb_rule() -> impl Strategy<Value = String> {
    // body binds V0..V2; head reuses a subset, so safety holds
    let vars = vec!["V0".to_string(), "V1".to_string(), "V2".to_string()];
    // make sure every variable is positively bound by a catch-all literal
    let anchor = Just("anchor(V0, V1, V2)".to_string());
    let negated = body_atom().prop_map(|a| format!("not {a}"));
    let compare = prop_oneof![
        Just("V0 != V1".to_string()),
        Just("V1 <= V2".to_string()),
        Just("V2 = V0+1".to_string()),
    ];
    let extras = prop::collection::vec(prop_oneof![body_atom(), negated, compare], 0..=3);
    (
        arb_symbol(),
        prop::collection::vec(prop::sample::select(vars), 0..=2),
        anchor,
        extras,
    )
        .prop_map(|(head_pred, head_vars, anchor, extras)| {
            let head = if head_vars.is_empty() {
                head_pred
            } else {
                format!("{head_pred}({})", head_vars.join(", "))
            };
            let mut body = vec![anchor];
            body.extend(extras);
            format!("{head} :- {}.", body.join(", "))
        })
}

fn arb_source() -> impl Strategy<Value = String> {
    prop::collection::vec(prop_oneof![arb_fact(), arb_rule()], 0..=12)
        .prop_map(|stmts| stmts.join("\n"))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    /// parse(serialize(parse(P))) == parse(P) for valid sources.
    #[test]
    fn parse_serialize_parse_is_identity(src in arb_source()) {
        let once = parse_program(&src, "gen").expect("generated source is valid");
        let twice = reparse(&once);
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(serialize_program(&once), serialize_program(&twice));
    }

    /// Accepted rules satisfy the safety condition structurally: every
    /// head variable occurs in a positive body literal.
    #[test]
    fn accepted_rules_are_safe(src in arb_source()) {
        let program = parse_program(&src, "gen").unwrap();
        for rule in &program.rules {
            let mut head_vars = Vec::new();
            rule.head.collect_vars(&mut head_vars);
            let mut bound = Vec::new();
            for elem in &rule.body {
                if let tic_core::ir::BodyElem::Literal(l) = elem {
                    if !l.negated {
                        l.atom.collect_vars(&mut bound);
                    }
                }
            }
            for v in head_vars {
                let rendered = rule.to_string();
                prop_assert!(bound.contains(&v), "unbound head variable {v} in {rendered}");
            }
        }
    }

    /// Unbound head variables are rejected wherever they appear.
    #[test]
    fn unsafe_heads_are_rejected(pred in arb_symbol(), body in arb_symbol()) {
        let src = format!("{pred}(Z) :- {body}(a).");
        let err = parse_program(&src, "gen").unwrap_err();
        let unsafe_rule = matches!(err, ParseError::UnsafeRule { .. });
        prop_assert!(unsafe_rule, "expected an unsafe-rule rejection");
    }
}

#[test]
fn exotic_constructs_round_trip() {
    let src = "\
        init(@make_seq(N-1, level, next, 0)) :- cardinality(level, N).\n\
        object(@gen_objects(N, 0, hub), hub) :- cardinality(hub, N).\n\
        default goal(height(Z, n0)) :- termes_pos_grid(_, _, Z).\n\
        init(min_cost_metric(\"=(total-cost) 0)\")).\n\
        value(X) :- limit(N), X = 1..N.\n\
        p(X) :- q(X, Y), Y != 3, Y < 10.\n";
    let once = parse_program(src, "exotic").unwrap();
    let twice = reparse(&once);
    assert_eq!(once, twice);
}
