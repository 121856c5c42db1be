//! Object-id helpers shared across the pipeline: natural ordering
//! (`shot2` before `shot10`), fresh-id templates, and the normalization
//! applied to model-extracted instance names.

use std::cmp::Ordering;
use std::collections::BTreeMap;

/// Compares identifiers alphabetically but with digit runs compared as
/// numbers, so `shot2 < shot10` and `tile_0_2 < tile_0_10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut xa = a.as_bytes();
    let mut xb = b.as_bytes();
    loop {
        match (xa.first(), xb.first()) {
            (None, None) => return a.cmp(b), // tie-break on raw bytes (leading zeros)
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(ca), Some(cb)) => {
                if ca.is_ascii_digit() && cb.is_ascii_digit() {
                    let (na, ra) = take_digits(xa);
                    let (nb, rb) = take_digits(xb);
                    match na.cmp(&nb) {
                        Ordering::Equal => {
                            xa = ra;
                            xb = rb;
                        }
                        other => return other,
                    }
                } else {
                    match ca.cmp(cb) {
                        Ordering::Equal => {
                            xa = &xa[1..];
                            xb = &xb[1..];
                        }
                        other => return other,
                    }
                }
            }
        }
    }
}

fn take_digits(s: &[u8]) -> (u128, &[u8]) {
    let end = s.iter().position(|c| !c.is_ascii_digit()).unwrap_or(s.len());
    let mut n: u128 = 0;
    for c in &s[..end] {
        n = n.saturating_mul(10).saturating_add((c - b'0') as u128);
    }
    (n, &s[end..])
}

/// Sorts a list of ids in natural order, in place.
pub fn natural_sort(ids: &mut [String]) {
    ids.sort_by(|a, b| natural_cmp(a, b));
}

/// Per-type fresh-id templates. A template is a string containing the
/// placeholder `<i>`; the default for an unknown type is `<type><i>`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NamingTemplates {
    templates: BTreeMap<String, String>,
}

impl NamingTemplates {
    pub fn new(templates: BTreeMap<String, String>) -> Self {
        NamingTemplates { templates }
    }

    /// Renders the id for `type_name` at index `i`.
    pub fn make_id(&self, type_name: &str, i: i64) -> String {
        match self.templates.get(type_name) {
            Some(t) => t.replace("<i>", &i.to_string()),
            None => format!("{type_name}{i}"),
        }
    }
}

/// Normalizes an extracted instance id: lowercase, spaces and hyphens
/// become underscores.
pub fn normalize_object_id(raw: &str) -> String {
    raw.trim()
        .chars()
        .map(|c| match c {
            ' ' | '-' => '_',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}
