//! Parsing of model responses: the loose brace maps of the extraction
//! steps and the logic-program payload itself.

use super::TranslateError;
use crate::ir::{parse_program, Program};
use crate::naming::normalize_object_id;
use std::collections::BTreeMap;

/// Drops markdown code fences wherever they appear.
fn strip_fences(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("```"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// The text of the outermost `{...}` block.
fn brace_block(text: &str) -> Result<&str, TranslateError> {
    let start = text.find('{').ok_or_else(|| TranslateError::UnparseableMap {
        detail: "no `{` found".to_string(),
    })?;
    let end = text.rfind('}').ok_or_else(|| TranslateError::UnparseableMap {
        detail: "no `}` found".to_string(),
    })?;
    if end <= start {
        return Err(TranslateError::UnparseableMap {
            detail: "mismatched braces".to_string(),
        });
    }
    Ok(&text[start + 1..end])
}

fn unquote(s: &str) -> String {
    let t = s.trim();
    let t = t.strip_prefix('\'').and_then(|x| x.strip_suffix('\'')).unwrap_or(t);
    let t = t.strip_prefix('"').and_then(|x| x.strip_suffix('"')).unwrap_or(t);
    t.trim().to_string()
}

/// Splits on commas that sit outside brackets and quotes.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' | '{' | '(' => {
                depth += 1;
                cur.push(c);
            }
            ']' | '}' | ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Parses `{shaker: 1, level: 3, ...}` with bare or quoted keys,
/// tolerating surrounding prose and code fences.
pub fn parse_cardinalities(text: &str) -> Result<BTreeMap<String, i64>, TranslateError> {
    let clean = strip_fences(text);
    let inner = brace_block(&clean)?;
    let mut out = BTreeMap::new();
    for entry in split_top_level(inner) {
        if entry.is_empty() {
            continue;
        }
        let (key, value) = entry.split_once(':').ok_or_else(|| {
            TranslateError::UnparseableMap {
                detail: format!("entry without `:`: `{entry}`"),
            }
        })?;
        let count: i64 = value.trim().parse().map_err(|_| TranslateError::UnparseableMap {
            detail: format!("non-integer count in `{entry}`"),
        })?;
        out.insert(unquote(key), count);
    }
    Ok(out)
}

/// Parses `{shot: [shot1, shot2], hand: [left, right], ...}`; instance
/// ids are normalized (lowercase, spaces and hyphens to underscores).
pub fn parse_named_objects(
    text: &str,
) -> Result<BTreeMap<String, Vec<String>>, TranslateError> {
    let clean = strip_fences(text);
    let inner = brace_block(&clean)?;
    let mut out = BTreeMap::new();
    for entry in split_top_level(inner) {
        if entry.is_empty() {
            continue;
        }
        let (key, value) = entry.split_once(':').ok_or_else(|| {
            TranslateError::UnparseableMap {
                detail: format!("entry without `:`: `{entry}`"),
            }
        })?;
        let value = value.trim();
        let list = value
            .strip_prefix('[')
            .and_then(|v| v.strip_suffix(']'))
            .ok_or_else(|| TranslateError::UnparseableMap {
                detail: format!("value is not a list in `{entry}`"),
            })?;
        let ids: Vec<String> = split_top_level(list)
            .into_iter()
            .filter(|s| !s.is_empty())
            .map(|s| normalize_object_id(&unquote(&s)))
            .collect();
        out.insert(unquote(key), ids);
    }
    Ok(out)
}

/// Extracts and parses the logic program from a response, tolerating
/// code fences and leading prose lines.
pub fn extract_ir(text: &str, source_name: &str) -> Result<Program, TranslateError> {
    let clean = strip_fences(text);
    let mut attempt: &str = clean.trim();
    let original = match parse_program(attempt, source_name) {
        Ok(p) if !p.is_empty() => return Ok(p),
        Ok(_) => crate::ir::ParseError::Syntax {
            line: 1,
            col: 1,
            expected: "a logic program".to_string(),
            found: "an empty response".to_string(),
        },
        Err(e) => e,
    };
    // drop leading prose one line at a time
    while let Some((_, rest)) = attempt.split_once('\n') {
        attempt = rest.trim_start();
        if attempt.is_empty() {
            break;
        }
        if let Ok(p) = parse_program(attempt, source_name) {
            if !p.is_empty() {
                return Ok(p);
            }
        }
    }
    let snippet: String = clean.trim().chars().take(120).collect();
    Err(TranslateError::Ir {
        source: original,
        snippet,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barman_cardinality_output() {
        let text = "{shaker: 1, level: 3, shot: 5, dispenser: 3, hand: 2, ingredient: 3}";
        let map = parse_cardinalities(text).unwrap();
        assert_eq!(map["shaker"], 1);
        assert_eq!(map["shot"], 5);
        assert_eq!(map.len(), 6);
    }

    #[test]
    fn empty_map() {
        assert!(parse_cardinalities("{}").unwrap().is_empty());
    }

    #[test]
    fn fenced_map() {
        let map = parse_cardinalities("```\n{a: 2}\n```").unwrap();
        assert_eq!(map["a"], 2);
    }

    #[test]
    fn quoted_keys() {
        let map = parse_cardinalities("{'table': 2, \"apple\": 4}").unwrap();
        assert_eq!(map["table"], 2);
        assert_eq!(map["apple"], 4);
    }

    #[test]
    fn barman_named_objects_output() {
        let text = "{shaker: [], level: [], shot: [shot1, shot2, shot3, shot4], dispenser: [], \
                    hand: [left, right], cocktail: [cocktail1, cocktail2, cocktail3, cocktail4], \
                    ingredient: [ingredient1, ingredient2, ingredient3]}";
        let map = parse_named_objects(text).unwrap();
        assert_eq!(map["shot"], vec!["shot1", "shot2", "shot3", "shot4"]);
        assert_eq!(map["hand"], vec!["left", "right"]);
        assert!(map["shaker"].is_empty());
    }

    #[test]
    fn normalization_applies_to_ids() {
        let map = parse_named_objects("{tile: [Tile-0-1, 'Tile 0 2']}").unwrap();
        assert_eq!(map["tile"], vec!["tile_0_1", "tile_0_2"]);
    }

    #[test]
    fn ir_with_leading_prose() {
        let text = "Here is the ASP Logic Program representation:\n\ncardinality(shot, 5).\ninit(handempty(left)).";
        let p = extract_ir(text, "t").unwrap();
        assert_eq!(p.rules.len(), 2);
    }

    #[test]
    fn ir_with_fences() {
        let text = "```asp\ncardinality(shot, 5).\n```";
        let p = extract_ir(text, "t").unwrap();
        assert_eq!(p.rules.len(), 1);
    }

    #[test]
    fn empty_response_is_an_error() {
        assert!(extract_ir("", "t").is_err());
    }
}
