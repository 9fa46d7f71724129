//! The tree-spec text format and DOT export.
//!
//! A document is line-oriented; blank lines and lines starting with `#` are
//! skipped. Data lines are
//!
//! ```text
//! root <id>
//! edge <parent> <child> <weight>
//! norm <vertex> <value>
//! ```
//!
//! with exactly one `root` line, declared before the first `edge`. Weights
//! and norm values are nonnegative numbers written as integers, rationals
//! `p/q`, or decimals; rationals stay exact all the way into the classifier.
//!
//! A `norm` row declares that the children of `<vertex>` are *not* listed in
//! this document and that the intended operator has `‖Se_vertex‖ = <value>`:
//! the vertex is marked as truncation boundary and the value feeds the
//! analytic norm consulted by interior-scope criteria.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;
use treeshift::shift::ShiftError;
use treeshift::{DirectedTree, Scalar, ShiftBuilder, TreeError, WeightedShift};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: unknown directive `{word}` (expected root, edge, norm, or #)")]
    UnknownDirective { line: usize, word: String },
    #[error("line {line}: expected `{want}`")]
    Arity { line: usize, want: &'static str },
    #[error("line {line}: duplicate root (first declared on line {first})")]
    DuplicateRoot { line: usize, first: usize },
    #[error("line {line}: edge before any root line")]
    EdgeBeforeRoot { line: usize },
    #[error("document has no root line")]
    MissingRoot,
    #[error("line {line}: malformed number `{token}`")]
    MalformedNumber { line: usize, token: String },
    #[error("line {line}: negative {what} `{token}`")]
    Negative {
        line: usize,
        what: &'static str,
        token: String,
    },
    #[error("line {line}: {source}")]
    Tree { line: usize, source: TreeError },
    #[error("line {line}: vertex `{label}` is not reachable from the root (orphan or cycle)")]
    Unreachable { line: usize, label: String },
    #[error("line {line}: norm row for unknown vertex `{label}`")]
    UnknownVertex { line: usize, label: String },
    #[error("line {line}: duplicate norm row for `{label}` (first on line {first})")]
    DuplicateNorm {
        line: usize,
        first: usize,
        label: String,
    },
    #[error(transparent)]
    Shift(#[from] ShiftError),
}

/// Parses a number token: `p/q` (exact), an integer (exact), or a decimal
/// (float). Returns `None` on anything else, including non-finite values.
pub fn parse_number(token: &str) -> Option<Scalar> {
    if let Some((num, den)) = token.split_once('/') {
        let n: i64 = num.parse().ok()?;
        let d: i64 = den.parse().ok()?;
        if d == 0 {
            return None;
        }
        Some(Scalar::ratio(n, d))
    } else if let Ok(n) = token.parse::<i64>() {
        Some(Scalar::int(n))
    } else {
        let x: f64 = token.parse().ok()?;
        x.is_finite().then(|| Scalar::float(x))
    }
}

fn number(token: &str, line: usize) -> Result<Scalar, ParseError> {
    parse_number(token).ok_or_else(|| ParseError::MalformedNumber {
        line,
        token: token.to_string(),
    })
}

struct EdgeRow {
    line: usize,
    parent: String,
    child: String,
    weight: Scalar,
}

struct NormRow {
    line: usize,
    vertex: String,
    value: Scalar,
}

/// Parses a tree-spec document into a weighted shift. Every rejection names
/// the offending line.
pub fn parse_tree_spec(text: &str) -> Result<WeightedShift, ParseError> {
    let mut root: Option<(usize, String)> = None;
    let mut edges: Vec<EdgeRow> = Vec::new();
    let mut norms: Vec<NormRow> = Vec::new();
    let mut child_lines: BTreeMap<String, usize> = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let words: Vec<&str> = trimmed.split_whitespace().collect();
        match (words[0], &words[1..]) {
            ("root", &[id]) => {
                if let Some((first, _)) = root {
                    return Err(ParseError::DuplicateRoot { line, first });
                }
                root = Some((line, id.to_string()));
            }
            ("root", _) => return Err(ParseError::Arity { line, want: "root <id>" }),
            ("edge", &[p, c, w]) => {
                let Some((_, root_label)) = &root else {
                    return Err(ParseError::EdgeBeforeRoot { line });
                };
                if p == c {
                    return Err(ParseError::Tree {
                        line,
                        source: TreeError::SelfLoop(p.to_string()),
                    });
                }
                if c == root_label.as_str() {
                    return Err(ParseError::Tree {
                        line,
                        source: TreeError::RootAsChild(c.to_string()),
                    });
                }
                if child_lines.contains_key(c) {
                    return Err(ParseError::Tree {
                        line,
                        source: TreeError::MultipleParents(c.to_string()),
                    });
                }
                let weight = number(w, line)?;
                if weight.is_negative() {
                    return Err(ParseError::Negative {
                        line,
                        what: "weight",
                        token: w.to_string(),
                    });
                }
                child_lines.insert(c.to_string(), line);
                edges.push(EdgeRow {
                    line,
                    parent: p.to_string(),
                    child: c.to_string(),
                    weight,
                });
            }
            ("edge", _) => {
                return Err(ParseError::Arity {
                    line,
                    want: "edge <parent> <child> <weight>",
                })
            }
            ("norm", &[v, x]) => {
                let value = number(x, line)?;
                if value.is_negative() {
                    return Err(ParseError::Negative {
                        line,
                        what: "norm",
                        token: x.to_string(),
                    });
                }
                norms.push(NormRow {
                    line,
                    vertex: v.to_string(),
                    value,
                });
            }
            ("norm", _) => {
                return Err(ParseError::Arity {
                    line,
                    want: "norm <vertex> <value>",
                })
            }
            (other, _) => {
                return Err(ParseError::UnknownDirective {
                    line,
                    word: other.to_string(),
                })
            }
        }
    }

    let Some((_, root_label)) = root else {
        return Err(ParseError::MissingRoot);
    };
    let pairs: Vec<(&str, &str)> = edges
        .iter()
        .map(|e| (e.parent.as_str(), e.child.as_str()))
        .collect();
    let tree = DirectedTree::from_edges(&root_label, &pairs).map_err(|e| match e {
        TreeError::Unreachable(label) => {
            // Self-loops, re-parented children, and root edges were rejected
            // per line above, so only disconnected components remain.
            let line = edges
                .iter()
                .find(|r| r.parent == label || r.child == label)
                .map(|r| r.line)
                .unwrap_or(0);
            ParseError::Unreachable { line, label }
        }
        other => ParseError::Tree {
            line: edges.last().map(|r| r.line).unwrap_or(0),
            source: other,
        },
    })?;

    let weight_rows: Vec<_> = edges
        .iter()
        .map(|e| {
            let v = tree.vertex(&e.child).expect("edge children are interned");
            (v, e.weight.clone() * e.weight.clone())
        })
        .collect();
    let mut norm_lines: BTreeMap<&str, usize> = BTreeMap::new();
    let mut norm_rows = Vec::new();
    for n in &norms {
        let v = tree.vertex(&n.vertex).ok_or_else(|| ParseError::UnknownVertex {
            line: n.line,
            label: n.vertex.clone(),
        })?;
        if let Some(&first) = norm_lines.get(n.vertex.as_str()) {
            return Err(ParseError::DuplicateNorm {
                line: n.line,
                first,
                label: n.vertex.clone(),
            });
        }
        norm_lines.insert(&n.vertex, n.line);
        norm_rows.push((v, n.value.clone() * n.value.clone()));
    }

    let mut b = ShiftBuilder::new(tree);
    for (v, wsq) in weight_rows {
        b = b.weight_sq(v, wsq);
    }
    for (v, nsq) in norm_rows {
        b = b.analytic_norm_sq(v, nsq).truncated(v);
    }
    Ok(b.build()?)
}

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("truncated vertex `{0}` carries no intended norm; the tree-spec format cannot express it")]
    BoundaryWithoutNorm(String),
    #[error("label `{0}` contains whitespace or starts with `#` and cannot be written")]
    UnwritableLabel(String),
}

/// Serializes a shift back into the tree-spec format. Exact for shifts that
/// came from [`parse_tree_spec`]: reparsing yields identical squared weights
/// and norms in rational mode (floats may move by an ulp through the
/// weight ↔ squared-weight conversion). Truncated vertices must carry an
/// analytic norm, since a bare truncation mark has no document form.
pub fn write_tree_spec(s: &WeightedShift) -> Result<String, WriteError> {
    let t = s.tree();
    for v in t.vertices() {
        let label = t.label(v);
        if label.chars().any(char::is_whitespace) || label.starts_with('#') || label.is_empty() {
            return Err(WriteError::UnwritableLabel(label.to_string()));
        }
        if s.is_truncated(v) && s.analytic_norm_sq(v).is_none() {
            return Err(WriteError::BoundaryWithoutNorm(label.to_string()));
        }
    }
    let mut out = String::new();
    writeln!(out, "root {}", t.label(t.root())).expect("string write");
    for v in t.vertices() {
        let Some(p) = t.parent(v) else { continue };
        let w = s.weight_sq(v).expect("non-root vertex").sqrt();
        writeln!(out, "edge {} {} {}", t.label(p), t.label(v), w).expect("string write");
    }
    for v in t.vertices() {
        if s.is_truncated(v) {
            let n = s.analytic_norm_sq(v).expect("checked above").sqrt();
            writeln!(out, "norm {} {}", t.label(v), n).expect("string write");
        }
    }
    Ok(out)
}

fn dot_quote(label: &str) -> String {
    let escaped: String = label
        .chars()
        .flat_map(|c| match c {
            '"' | '\\' => vec!['\\', c],
            _ => vec![c],
        })
        .collect();
    format!("\"{escaped}\"")
}

/// Renders the shift as a DOT digraph: vertices labeled `id [‖Se‖²=value]`
/// (truncated ones dashed), edges labeled with their weights, everything in
/// vertex-creation order.
pub fn export_dot(s: &WeightedShift) -> String {
    let t = s.tree();
    let mut out = String::from("digraph tree {\n");
    for v in t.vertices() {
        let style = if s.is_truncated(v) { ", style=dashed" } else { "" };
        writeln!(
            out,
            "  {} [label={}{}];",
            dot_quote(t.label(v)),
            dot_quote(&format!("{} [‖Se‖²={}]", t.label(v), s.norm_sq(v))),
            style
        )
        .expect("string write");
    }
    for v in t.vertices() {
        let Some(p) = t.parent(v) else { continue };
        let w = s.weight_sq(v).expect("non-root vertex").sqrt();
        writeln!(
            out,
            "  {} -> {} [label={}];",
            dot_quote(t.label(p)),
            dot_quote(t.label(v)),
            dot_quote(&w.to_string())
        )
        .expect("string write");
    }
    out.push_str("}\n");
    out
}
