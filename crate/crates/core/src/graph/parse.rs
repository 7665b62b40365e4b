use std::collections::{HashMap, HashSet};

use super::Dag;
use crate::error::{Error, Result};

/// Labels match `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_valid_label(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the line-oriented graph format.
///
/// ```text
/// # comment
/// !treatment A
/// !outcome Y
/// A -> Y
/// Z
/// ```
///
/// Vertices are declared in order of first appearance in an edge or bare
/// label line; the directives only name them.
pub fn parse_graph(text: &str) -> Result<Dag> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut seen_edges = HashSet::new();
    let mut treatment: Option<(String, usize)> = None;
    let mut outcome: Option<(String, usize)> = None;

    let mut declare = |l: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&i) = index.get(l) {
            return i;
        }
        index.insert(l.to_string(), labels.len());
        labels.push(l.to_string());
        labels.len() - 1
    };

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: line_no, msg };

        if let Some(rest) = line.strip_prefix('!') {
            let mut parts = rest.split_whitespace();
            let key = parts.next().unwrap_or("");
            let val = parts
                .next()
                .ok_or_else(|| bad(format!("directive `!{key}` needs a label")))?;
            if parts.next().is_some() {
                return Err(bad(format!("trailing tokens after `!{key} {val}`")));
            }
            if !is_valid_label(val) {
                return Err(bad(format!("invalid label `{val}`")));
            }
            let slot = match key {
                "treatment" => &mut treatment,
                "outcome" => &mut outcome,
                _ => return Err(bad(format!("unknown directive `!{key}`"))),
            };
            if slot.is_some() {
                return Err(bad(format!("repeated directive `!{key}`")));
            }
            *slot = Some((val.to_string(), line_no));
            continue;
        }

        if let Some((l, r)) = line.split_once("->") {
            let (l, r) = (l.trim(), r.trim());
            for s in [l, r] {
                if !is_valid_label(s) {
                    return Err(bad(format!("invalid label `{s}`")));
                }
            }
            if l == r {
                return Err(bad(format!("self-loop on `{l}`")));
            }
            let p = declare(l, &mut labels);
            let c = declare(r, &mut labels);
            if !seen_edges.insert((p, c)) {
                return Err(bad(format!("duplicate edge {l} -> {r}")));
            }
            edges.push((p, c));
            continue;
        }

        if is_valid_label(line) {
            declare(line, &mut labels);
            continue;
        }
        return Err(bad(format!("cannot parse `{line}`")));
    }

    let resolve = |d: Option<(String, usize)>, name: &str| -> Result<usize> {
        let (l, line) = d.ok_or_else(|| Error::Parse {
            line: text.lines().count().max(1),
            msg: format!("missing `!{name}` directive"),
        })?;
        labels
            .iter()
            .position(|x| *x == l)
            .ok_or_else(|| Error::Parse {
                line,
                msg: format!("{name} `{l}` is not a declared vertex"),
            })
    };
    let t = resolve(treatment, "treatment")?;
    let y = resolve(outcome, "outcome")?;
    Dag::from_indices(labels, &edges, t, y)
}
