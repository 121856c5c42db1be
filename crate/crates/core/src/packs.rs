//! Per-domain bundles: inference rules, object-type and predicate
//! metadata for prompt building, the in-context example, naming
//! templates, and the parsed domain PDDL. Seven packs ship embedded in
//! the library; arbitrary pack directories load from disk.

use crate::factbase::FactBase;
use crate::infer::{materialize, stratify, InferError, StateKind};
use crate::ir::{
    parse_program, validate_program, Atom, Diagnostic, ParseError, PredicateTable, Program, Rule,
    RuleKind, Term,
};
use crate::naming::NamingTemplates;
use crate::pddl::{
    compile_task, parse_domain, CompileOptions, DomainModel, PddlError, TaskPddl,
};
use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PackError {
    #[error("pack `{pack}`: missing file {file}")]
    MissingFile { pack: String, file: String },
    #[error("pack `{pack}`: {file}: {source}")]
    Parse {
        pack: String,
        file: String,
        source: ParseError,
    },
    #[error("pack `{pack}`: meta.json: {message}")]
    Meta { pack: String, message: String },
    #[error("pack `{pack}`: domain.pddl: {source}")]
    Domain {
        pack: String,
        source: PddlError,
    },
    #[error("pack `{pack}`: rules do not stratify: {source}")]
    Rules {
        pack: String,
        source: InferError,
    },
    #[error("pack `{pack}`: {file} has diagnostics: {diagnostics}")]
    Validation {
        pack: String,
        file: String,
        diagnostics: String,
    },
    #[error("unknown builtin pack `{0}`")]
    UnknownBuiltin(String),
    #[error("io error reading {file}: {source}")]
    Io {
        file: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
pub struct ObjectTypeMeta {
    #[serde(rename = "type")]
    pub type_name: String,
    pub description: String,
}

#[derive(Debug, Clone, Deserialize, PartialEq, Eq)]
pub struct PredicateMeta {
    pub predicate: String,
    pub arity: usize,
    pub argument_types: Vec<String>,
    pub description: String,
}

#[derive(Debug, Clone, Deserialize, Default)]
struct MetaFile {
    object_types: Vec<ObjectTypeMeta>,
    predicates: Vec<PredicateMeta>,
    #[serde(default)]
    naming_templates: BTreeMap<String, String>,
    #[serde(default)]
    hyphenate_types: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InContextExample {
    pub description_text: String,
    pub ir_text: String,
}

#[derive(Debug, Clone)]
pub struct DomainPack {
    pub name: String,
    /// Hand-written rules plus the auto-derived type rules.
    pub rules: Program,
    pub manual_rules: Program,
    pub object_types: Vec<ObjectTypeMeta>,
    pub predicates: Vec<PredicateMeta>,
    pub in_context_example: Option<InContextExample>,
    pub naming_templates: NamingTemplates,
    pub hyphenate_types: BTreeSet<String>,
    pub grid_predicates: Vec<String>,
    pub domain: DomainModel,
    pub golden_pddl: Option<String>,
}

impl DomainPack {
    /// Known predicates for IR validation: the schema, the pack
    /// metadata, and everything the pack rules define.
    pub fn predicate_table(&self) -> PredicateTable {
        let mut table = PredicateTable::new();
        for p in &self.predicates {
            table.insert(&p.predicate, p.arity);
        }
        for d in &self.domain.predicates {
            table.insert(&d.name, d.args.len());
        }
        table.insert("min_cost_metric", 1);
        table.absorb_heads(&self.rules);
        table
    }

    /// Validates an intermediate representation against this pack.
    pub fn validate_ir(&self, program: &Program) -> Vec<Diagnostic> {
        validate_program(program, &self.predicate_table())
    }

    /// Materializes an intermediate representation under this pack's
    /// rules and naming templates.
    pub fn materialize(&self, ir: &Program) -> Result<FactBase, InferError> {
        materialize(ir, &self.rules, &self.naming_templates)
    }

    pub fn compile_options(&self) -> CompileOptions {
        CompileOptions {
            hyphenate_types: self.hyphenate_types.clone(),
        }
    }

    /// Materialize and compile in one step.
    pub fn compile(&self, ir: &Program, problem_name: &str) -> Result<TaskPddl, PipelineStageError> {
        let facts = self.materialize(ir).map_err(PipelineStageError::Infer)?;
        let task = compile_task(&facts, &self.domain, problem_name, &self.compile_options())
            .map_err(PipelineStageError::Compile)?;
        task.validate().map_err(PipelineStageError::Compile)?;
        Ok(task)
    }
}

#[derive(Debug, Error)]
pub enum PipelineStageError {
    #[error("infer: {0}")]
    Infer(InferError),
    #[error("compile: {0}")]
    Compile(PddlError),
}

// ---------------------------------------------------------------------
// type-rule derivation

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRule {
    pub predicate: String,
    pub position: usize,
    pub type_name: String,
    pub state: StateKind,
    pub rule: Rule,
}

/// Generates, from typed predicate signatures, the rules that type every
/// object occurring in an `init`/`goal` atom:
/// `object(X, t) :- init(p(_, .., X, .., _)).` and the goal twin.
pub fn derive_type_rules(domain: &DomainModel) -> Vec<TypeRule> {
    let mut out = Vec::new();
    for pred in &domain.predicates {
        for (position, (_, type_name)) in pred.args.iter().enumerate() {
            for state in [StateKind::Init, StateKind::Goal] {
                let inner_args: Vec<Term> = (0..pred.args.len())
                    .map(|i| {
                        if i == position {
                            Term::var("X")
                        } else {
                            Term::Anonymous
                        }
                    })
                    .collect();
                let rule = Rule {
                    head: Atom::new("object", vec![Term::var("X"), Term::sym(type_name)]),
                    body: vec![crate::ir::BodyElem::Literal(crate::ir::Literal {
                        atom: Atom::new(
                            state.wrapper(),
                            vec![Term::Compound(pred.name.clone(), inner_args)],
                        ),
                        negated: false,
                    })],
                    kind: RuleKind::Rule,
                    line: 0,
                    col: 0,
                };
                out.push(TypeRule {
                    predicate: pred.name.clone(),
                    position,
                    type_name: type_name.clone(),
                    state,
                    rule,
                });
            }
        }
    }
    out
}

// ---------------------------------------------------------------------
// loading

struct PackSource {
    name: String,
    rules: String,
    meta: String,
    domain: String,
    example_nl: Option<String>,
    example_lp: Option<String>,
    golden: Option<String>,
}

fn assemble(src: PackSource) -> Result<DomainPack, PackError> {
    let pack_name = src.name.clone();
    let meta: MetaFile = serde_json::from_str(&src.meta).map_err(|e| PackError::Meta {
        pack: pack_name.clone(),
        message: e.to_string(),
    })?;
    let domain = parse_domain(&src.domain).map_err(|e| PackError::Domain {
        pack: pack_name.clone(),
        source: e,
    })?;
    let manual_rules =
        parse_program(&src.rules, &format!("{pack_name}/rules.lp")).map_err(|e| PackError::Parse {
            pack: pack_name.clone(),
            file: "rules.lp".to_string(),
            source: e,
        })?;

    let mut rules = manual_rules.clone();
    let derived = derive_type_rules(&domain);
    for tr in derived {
        if !rules.rules.contains(&tr.rule) {
            rules.rules.push(tr.rule);
        }
    }

    // map-delegating rules are realized by the expansion phase, not the
    // stratified evaluator
    let mut evaluable = Program::new(&rules.source_name);
    evaluable.rules = rules
        .rules
        .iter()
        .filter(|r| !crate::infer::is_delegated_map_rule(r))
        .cloned()
        .collect();
    stratify(&evaluable).map_err(|e| PackError::Rules {
        pack: pack_name.clone(),
        source: e,
    })?;

    let grid_predicates: Vec<String> = {
        let mut names = BTreeSet::new();
        for p in &meta.predicates {
            if p.predicate.ends_with("_grid") {
                names.insert(p.predicate.clone());
            }
        }
        for rule in &rules.rules {
            if rule.head.predicate.ends_with("_grid") {
                names.insert(rule.head.predicate.clone());
            }
        }
        names.into_iter().collect()
    };

    let in_context_example = match (src.example_nl, src.example_lp) {
        (Some(description_text), Some(ir_text)) => Some(InContextExample {
            description_text,
            ir_text,
        }),
        _ => None,
    };

    let pack = DomainPack {
        name: pack_name.clone(),
        rules,
        manual_rules,
        object_types: meta.object_types,
        predicates: meta.predicates,
        in_context_example,
        naming_templates: NamingTemplates::new(meta.naming_templates),
        hyphenate_types: meta.hyphenate_types,
        grid_predicates,
        domain,
        golden_pddl: src.golden,
    };

    // the pack's own rules must be clean against its predicate table
    let diags = validate_program(&pack.rules, &pack.predicate_table());
    if !diags.is_empty() {
        return Err(PackError::Validation {
            pack: pack_name.clone(),
            file: "rules.lp".to_string(),
            diagnostics: diags
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("; "),
        });
    }
    if let Some(example) = &pack.in_context_example {
        let program = parse_program(&example.ir_text, &format!("{pack_name}/example.lp"))
            .map_err(|e| PackError::Parse {
                pack: pack_name.clone(),
                file: "example.lp".to_string(),
                source: e,
            })?;
        let diags = pack.validate_ir(&program);
        if !diags.is_empty() {
            return Err(PackError::Validation {
                pack: pack_name,
                file: "example.lp".to_string(),
                diagnostics: diags
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            });
        }
    }
    Ok(pack)
}

fn read_file(dir: &Path, name: &str, required: bool, pack: &str) -> Result<Option<String>, PackError> {
    let path = dir.join(name);
    match std::fs::read_to_string(&path) {
        Ok(text) => Ok(Some(text)),
        Err(_) if !required => Ok(None),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(PackError::MissingFile {
            pack: pack.to_string(),
            file: path.display().to_string(),
        }),
        Err(e) => Err(PackError::Io {
            file: path.display().to_string(),
            source: e,
        }),
    }
}

/// Loads a pack from a directory laid out as `rules.lp`, `meta.json`,
/// `domain.pddl`, and optional `example.nl`, `example.lp`, `golden.pddl`.
pub fn load_pack(dir: &Path) -> Result<DomainPack, PackError> {
    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "pack".to_string());
    let src = PackSource {
        rules: read_file(dir, "rules.lp", true, &name)?.unwrap(),
        meta: read_file(dir, "meta.json", true, &name)?.unwrap(),
        domain: read_file(dir, "domain.pddl", true, &name)?.unwrap(),
        example_nl: read_file(dir, "example.nl", false, &name)?,
        example_lp: read_file(dir, "example.lp", false, &name)?,
        golden: read_file(dir, "golden.pddl", false, &name)?,
        name,
    };
    assemble(src)
}

macro_rules! embedded_pack {
    ($name:literal) => {
        PackSource {
            name: $name.to_string(),
            rules: include_str!(concat!("../packs/", $name, "/rules.lp")).to_string(),
            meta: include_str!(concat!("../packs/", $name, "/meta.json")).to_string(),
            domain: include_str!(concat!("../packs/", $name, "/domain.pddl")).to_string(),
            example_nl: Some(include_str!(concat!("../packs/", $name, "/example.nl")).to_string()),
            example_lp: Some(include_str!(concat!("../packs/", $name, "/example.lp")).to_string()),
            golden: Some(include_str!(concat!("../packs/", $name, "/golden.pddl")).to_string()),
        }
    };
}

pub const BUILTIN_PACK_NAMES: &[&str] = &[
    "barman",
    "blocksworld",
    "floortile",
    "grippers",
    "storage",
    "termes",
    "tyreworld",
];

/// Loads one of the seven embedded packs by name.
pub fn builtin_pack(name: &str) -> Result<DomainPack, PackError> {
    let src = match name {
        "barman" => embedded_pack!("barman"),
        "blocksworld" => embedded_pack!("blocksworld"),
        "floortile" => embedded_pack!("floortile"),
        "grippers" => embedded_pack!("grippers"),
        "storage" => embedded_pack!("storage"),
        "termes" => embedded_pack!("termes"),
        "tyreworld" => embedded_pack!("tyreworld"),
        other => return Err(PackError::UnknownBuiltin(other.to_string())),
    };
    assemble(src)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_builtin_packs_load() {
        for name in BUILTIN_PACK_NAMES {
            let pack = builtin_pack(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&pack.name, name);
            assert!(pack.in_context_example.is_some(), "{name} lacks example");
        }
    }

    #[test]
    fn barman_rules_include_shaker_level_seed() {
        let pack = builtin_pack("barman").unwrap();
        let rendered = crate::ir::serialize_program(&pack.manual_rules);
        assert!(rendered.contains("init(shaker_empty_level(X, Y)) :- object(X, shaker), first_level(Y)."));
    }

    #[test]
    fn blocksworld_bridges_block_to_object() {
        let pack = builtin_pack("blocksworld").unwrap();
        let rendered = crate::ir::serialize_program(&pack.manual_rules);
        assert!(rendered.contains("object(B, object) :- object(B, block)."));
    }

    #[test]
    fn missing_rules_file_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("meta.json"), "{}").unwrap();
        let err = load_pack(dir.path()).unwrap_err();
        assert!(matches!(err, PackError::MissingFile { .. }));
    }

    #[test]
    fn unknown_builtin_is_an_error() {
        assert!(matches!(
            builtin_pack("nonesuch"),
            Err(PackError::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn derive_type_rules_barman_cocktail_part1() {
        let pack = builtin_pack("barman").unwrap();
        let rules = derive_type_rules(&pack.domain);
        let rendered: Vec<String> = rules.iter().map(|r| r.rule.to_string()).collect();
        assert!(rendered.contains(&"object(X, cocktail) :- init(cocktail_part1(X, _)).".to_string()));
        assert!(rendered.contains(&"object(X, ingredient) :- init(cocktail_part1(_, X)).".to_string()));
    }

    #[test]
    fn derive_type_rules_zero_arity_predicate() {
        let domain = parse_domain("(define (domain d) (:predicates (arm_empty)))").unwrap();
        assert!(derive_type_rules(&domain).is_empty());
    }

    #[test]
    fn derive_type_rules_grippers_at() {
        let pack = builtin_pack("grippers").unwrap();
        let rules: Vec<_> = derive_type_rules(&pack.domain)
            .into_iter()
            .filter(|tr| tr.predicate == "at")
            .collect();
        // init+goal twins for both argument positions
        assert_eq!(rules.len(), 4);
        let rendered: Vec<String> = rules.iter().map(|r| r.rule.to_string()).collect();
        assert!(rendered.contains(&"object(X, object) :- init(at(X, _)).".to_string()));
        assert!(rendered.contains(&"object(X, room) :- goal(at(_, X)).".to_string()));
    }
}
