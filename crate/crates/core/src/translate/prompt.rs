//! Prompt assembly for the three translation strategies. The templates
//! carry the imaginary-domain example blocks; pack metadata is rendered
//! into the same loose single-quoted style the in-prompt examples use.

use super::{Extraction, TranslateError};
use crate::packs::DomainPack;
use std::collections::BTreeMap;
use std::fmt;

const TIC_IC: &str = include_str!("templates/tic_ic.txt");
const G3_CARDINALITY: &str = include_str!("templates/g3_cardinality.txt");
const G3_OBJECTS: &str = include_str!("templates/g3_objects.txt");
const G3_RULES: &str = include_str!("templates/g3_rules.txt");
const G1: &str = include_str!("templates/g1.txt");
const TRANSLATION_RULES: &str = include_str!("templates/translation_rules.txt");
const IMAGINARY_TEXT: &str = include_str!("templates/imaginary_text.txt");
const IMAGINARY_OBJECT_TYPES: &str = include_str!("templates/imaginary_object_types.txt");
const IMAGINARY_PREDICATES: &str = include_str!("templates/imaginary_predicates.txt");
const IMAGINARY_OBJECTS_ANSWER: &str = include_str!("templates/imaginary_objects_answer.txt");
const IMAGINARY_RULES_ANSWER: &str = include_str!("templates/imaginary_rules_answer.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PromptKind {
    TicIc,
    G3Cardinality,
    G3Objects,
    G3Rules,
    G1,
}

impl PromptKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PromptKind::TicIc => "tic_ic",
            PromptKind::G3Cardinality => "tic_g3_cardinality",
            PromptKind::G3Objects => "tic_g3_objects",
            PromptKind::G3Rules => "tic_g3_rules",
            PromptKind::G1 => "tic_g1",
        }
    }
}

impl fmt::Display for PromptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptSpec {
    pub strategy: PromptKind,
    pub rendered_text: String,
    pub pack_name: String,
    pub task_description: String,
}

fn fill(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (key, value) in vars {
        out = out.replace(key, value.trim_end());
    }
    out
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "\\'"))
}

/// Pack object types in the loose single-quoted list style.
fn render_object_types(pack: &DomainPack) -> String {
    let mut out = String::from("[\n");
    for (i, t) in pack.object_types.iter().enumerate() {
        out.push_str(&format!(
            " {{'type': {}, 'description': {}}}",
            quote(&t.type_name),
            quote(&t.description)
        ));
        if i + 1 < pack.object_types.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push(']');
    out
}

/// Pack predicates in the loose style, one entry per paragraph.
fn render_predicates(pack: &DomainPack) -> String {
    let mut out = String::from("[\n");
    for (i, p) in pack.predicates.iter().enumerate() {
        let args = p
            .argument_types
            .iter()
            .map(|t| quote(t))
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!(
            "{{'predicate': {}, 'arity': {}, 'argument types': [{}], 'description': {}}}",
            quote(&p.predicate),
            p.arity,
            args,
            quote(&p.description)
        ));
        if i + 1 < pack.predicates.len() {
            out.push_str(",\n");
        }
        out.push('\n');
    }
    out.push(']');
    out
}

/// Extracted objects keyed by type, in pack order, extras after.
fn render_objects(pack: &DomainPack, objects: &BTreeMap<String, Vec<String>>) -> String {
    let mut entries: Vec<(String, Vec<String>)> = Vec::new();
    for t in &pack.object_types {
        entries.push((
            t.type_name.clone(),
            objects.get(&t.type_name).cloned().unwrap_or_default(),
        ));
    }
    for (ty, ids) in objects {
        if !pack.object_types.iter().any(|t| &t.type_name == ty) {
            entries.push((ty.clone(), ids.clone()));
        }
    }
    let rendered: Vec<String> = entries
        .iter()
        .map(|(ty, ids)| {
            let list = ids.iter().map(|i| quote(i)).collect::<Vec<_>>().join(", ");
            format!("{}: [{}]", quote(ty), list)
        })
        .collect();
    format!("{{{}}}", rendered.join(", "))
}

/// Renders the prompt for one strategy step. `upstream` carries the
/// extraction so far; the rules step requires its named objects.
pub fn build_prompt(
    strategy: PromptKind,
    pack: &DomainPack,
    task_description: &str,
    upstream: Option<&Extraction>,
) -> Result<PromptSpec, TranslateError> {
    let task = task_description.trim_end();
    let rendered_text = match strategy {
        PromptKind::TicIc => {
            let example = pack
                .in_context_example
                .as_ref()
                .ok_or_else(|| TranslateError::MissingExample {
                    pack: pack.name.clone(),
                })?;
            fill(
                TIC_IC,
                &[
                    ("<<EXAMPLE_NL>>", example.description_text.as_str()),
                    ("<<EXAMPLE_IR>>", example.ir_text.as_str()),
                    ("<<TASK>>", task),
                ],
            )
        }
        PromptKind::G3Cardinality => fill(
            G3_CARDINALITY,
            &[
                ("<<IMAGINARY_OBJECT_TYPES>>", IMAGINARY_OBJECT_TYPES),
                ("<<IMAGINARY_TEXT>>", IMAGINARY_TEXT),
                ("<<OBJECT_TYPES>>", render_object_types(pack).as_str()),
                ("<<TASK>>", task),
            ],
        ),
        PromptKind::G3Objects => fill(
            G3_OBJECTS,
            &[
                ("<<IMAGINARY_OBJECT_TYPES>>", IMAGINARY_OBJECT_TYPES),
                ("<<IMAGINARY_TEXT>>", IMAGINARY_TEXT),
                ("<<IMAGINARY_OBJECTS_ANSWER>>", IMAGINARY_OBJECTS_ANSWER),
                ("<<OBJECT_TYPES>>", render_object_types(pack).as_str()),
                ("<<TASK>>", task),
            ],
        ),
        PromptKind::G3Rules => {
            let upstream = upstream
                .filter(|e| !e.named_objects.is_empty())
                .ok_or(TranslateError::MissingUpstream)?;
            fill(
                G3_RULES,
                &[
                    ("<<TRANSLATION_RULES>>", TRANSLATION_RULES),
                    ("<<IMAGINARY_OBJECTS_ANSWER>>", IMAGINARY_OBJECTS_ANSWER),
                    ("<<IMAGINARY_PREDICATES>>", IMAGINARY_PREDICATES),
                    ("<<IMAGINARY_TEXT>>", IMAGINARY_TEXT),
                    ("<<IMAGINARY_RULES_ANSWER>>", IMAGINARY_RULES_ANSWER),
                    (
                        "<<OBJECTS>>",
                        render_objects(pack, &upstream.named_objects).as_str(),
                    ),
                    ("<<PREDICATES>>", render_predicates(pack).as_str()),
                    ("<<TASK>>", task),
                ],
            )
        }
        PromptKind::G1 => fill(
            G1,
            &[
                ("<<TRANSLATION_RULES>>", TRANSLATION_RULES),
                ("<<IMAGINARY_OBJECT_TYPES>>", IMAGINARY_OBJECT_TYPES),
                ("<<IMAGINARY_PREDICATES>>", IMAGINARY_PREDICATES),
                ("<<IMAGINARY_TEXT>>", IMAGINARY_TEXT),
                ("<<IMAGINARY_RULES_ANSWER>>", IMAGINARY_RULES_ANSWER),
                ("<<OBJECT_TYPES>>", render_object_types(pack).as_str()),
                ("<<PREDICATES>>", render_predicates(pack).as_str()),
                ("<<TASK>>", task),
            ],
        ),
    };
    Ok(PromptSpec {
        strategy,
        rendered_text,
        pack_name: pack.name.clone(),
        task_description: task_description.to_string(),
    })
}
