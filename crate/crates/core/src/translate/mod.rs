//! Translation of task descriptions into the logic-program intermediate
//! representation via a pluggable completion model: prompt building,
//! provider plumbing with record/replay, and response parsing.

pub mod prompt;
pub mod provider;
pub mod response;

pub use prompt::{build_prompt, PromptKind, PromptSpec};
pub use provider::{
    cassette_key, make_cassette, normalize_prompt, Cassette, CassetteStore, Completer,
    CompletionProvider, ProviderMode, ProviderProfile,
};
pub use response::{extract_ir, parse_cardinalities, parse_named_objects};

use crate::ir::{Atom, ParseError, Program, Rule, Term};
use crate::packs::DomainPack;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TranslateError {
    #[error("pack `{pack}` has no in-context example")]
    MissingExample { pack: String },
    #[error("rules extraction needs the named objects of an earlier step")]
    MissingUpstream,
    #[error("provider error (status {status}): {body}")]
    Provider { status: u16, body: String },
    #[error("no cassette for key {key} (strategy {strategy})")]
    CassetteMiss { key: String, strategy: String },
    #[error("cassette store: {detail}")]
    Cassette { detail: String },
    #[error("unparseable extraction map: {detail}")]
    UnparseableMap { detail: String },
    #[error("bad logic program in response ({source}); starts: {snippet}")]
    Ir { source: ParseError, snippet: String },
    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<TranslateError>,
    },
}

impl TranslateError {
    fn at_stage(self, stage: &str) -> TranslateError {
        TranslateError::Stage {
            stage: stage.to_string(),
            source: Box::new(self),
        }
    }

    /// The innermost stage label, when one was attached.
    pub fn stage(&self) -> Option<&str> {
        match self {
            TranslateError::Stage { stage, .. } => Some(stage),
            _ => None,
        }
    }
}

/// The three CLI-facing strategies. G3 performs three model calls and
/// threads the extracted objects into the rules prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TranslationStrategy {
    Ic,
    G1,
    G3,
}

impl TranslationStrategy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ic" => Some(TranslationStrategy::Ic),
            "g1" => Some(TranslationStrategy::G1),
            "g3" => Some(TranslationStrategy::G3),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TranslationStrategy::Ic => "ic",
            TranslationStrategy::G1 => "g1",
            TranslationStrategy::G3 => "g3",
        }
    }
}

impl std::fmt::Display for TranslationStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

/// Everything a translation run produced: extracted counts, named
/// objects, and the intermediate representation itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub cardinalities: BTreeMap<String, i64>,
    pub named_objects: BTreeMap<String, Vec<String>>,
    pub ir: Program,
}

fn cardinalities_of(ir: &Program) -> BTreeMap<String, i64> {
    let mut out = BTreeMap::new();
    for rule in &ir.rules {
        if rule.is_fact() && rule.head.predicate == "cardinality" {
            if let (Some(Term::Symbol(t)), Some(Term::Integer(n))) =
                (rule.head.args.first(), rule.head.args.get(1))
            {
                out.insert(t.clone(), *n);
            }
        }
    }
    out
}

/// Appends extracted cardinalities as facts when the program states none
/// of its own. A program that already carries cardinality facts wins.
fn merge_cardinalities(ir: &mut Program, extracted: &BTreeMap<String, i64>) {
    if !cardinalities_of(ir).is_empty() {
        return;
    }
    for (type_name, count) in extracted {
        ir.rules.push(Rule::fact(Atom::new(
            "cardinality",
            vec![Term::sym(type_name), Term::Integer(*count)],
        )));
    }
}

/// Runs one translation strategy end to end and assembles the
/// [`Extraction`]. Errors carry the failing stage's label.
pub fn run_translation(
    strategy: TranslationStrategy,
    completer: &dyn Completer,
    pack: &DomainPack,
    task_description: &str,
) -> Result<Extraction, TranslateError> {
    match strategy {
        TranslationStrategy::Ic => {
            let spec = build_prompt(PromptKind::TicIc, pack, task_description, None)
                .map_err(|e| e.at_stage("ic"))?;
            let text = completer.complete(&spec).map_err(|e| e.at_stage("ic"))?;
            let ir = extract_ir(&text, "ic-response").map_err(|e| e.at_stage("ic"))?;
            Ok(Extraction {
                cardinalities: cardinalities_of(&ir),
                named_objects: BTreeMap::new(),
                ir,
            })
        }
        TranslationStrategy::G1 => {
            let spec = build_prompt(PromptKind::G1, pack, task_description, None)
                .map_err(|e| e.at_stage("g1"))?;
            let text = completer.complete(&spec).map_err(|e| e.at_stage("g1"))?;
            let ir = extract_ir(&text, "g1-response").map_err(|e| e.at_stage("g1"))?;
            Ok(Extraction {
                cardinalities: cardinalities_of(&ir),
                named_objects: BTreeMap::new(),
                ir,
            })
        }
        TranslationStrategy::G3 => {
            let spec = build_prompt(PromptKind::G3Cardinality, pack, task_description, None)
                .map_err(|e| e.at_stage("g3_cardinality"))?;
            let text = completer
                .complete(&spec)
                .map_err(|e| e.at_stage("g3_cardinality"))?;
            let cardinalities =
                parse_cardinalities(&text).map_err(|e| e.at_stage("g3_cardinality"))?;

            let spec = build_prompt(PromptKind::G3Objects, pack, task_description, None)
                .map_err(|e| e.at_stage("g3_objects"))?;
            let text = completer
                .complete(&spec)
                .map_err(|e| e.at_stage("g3_objects"))?;
            let named_objects =
                parse_named_objects(&text).map_err(|e| e.at_stage("g3_objects"))?;

            let upstream = Extraction {
                cardinalities: cardinalities.clone(),
                named_objects: named_objects.clone(),
                ir: Program::default(),
            };
            let spec = build_prompt(PromptKind::G3Rules, pack, task_description, Some(&upstream))
                .map_err(|e| e.at_stage("g3_rules"))?;
            let text = completer
                .complete(&spec)
                .map_err(|e| e.at_stage("g3_rules"))?;
            let mut ir = extract_ir(&text, "g3-response").map_err(|e| e.at_stage("g3_rules"))?;

            merge_cardinalities(&mut ir, &cardinalities);
            Ok(Extraction {
                cardinalities,
                named_objects,
                ir,
            })
        }
    }
}
