//! Hypergraph JSON: `{"n": int, "edges": [[int, ..], ..], "weights": [float, ..]?}`
//! with 1-based node labels.

use serde::Deserialize;
use thiserror::Error;

use super::{Hypergraph, HypergraphError};

#[derive(Debug, Error)]
pub enum HypergraphIoError {
    #[error("malformed hypergraph JSON: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        source: HypergraphError,
    },
    #[error("edge {edge} (1-based), line {line}: node label {label} is outside 1..={n}")]
    Label {
        edge: usize,
        line: usize,
        label: i64,
        n: usize,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    n: usize,
    edges: Vec<Vec<i64>>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

/// Parse and validate. Each edge is sorted on load; out-of-range labels and
/// duplicate edges are reported with the line the offending edge starts on.
pub fn from_json_str(text: &str) -> Result<Hypergraph, HypergraphIoError> {
    let raw: Raw = serde_json::from_str(text)?;
    let lines = edge_lines(text);
    let line_of = |edge: usize| lines.get(edge).copied().unwrap_or(1);
    let mut edges = Vec::with_capacity(raw.edges.len());
    for (i, e) in raw.edges.iter().enumerate() {
        let mut nodes = Vec::with_capacity(e.len());
        for &label in e {
            if label < 1 || label as u64 > raw.n as u64 {
                return Err(HypergraphIoError::Label {
                    edge: i + 1,
                    line: line_of(i),
                    label,
                    n: raw.n,
                });
            }
            nodes.push(label as usize - 1);
        }
        edges.push(nodes);
    }
    Hypergraph::with_weights(raw.n, edges, raw.weights).map_err(|source| {
        let edge = match &source {
            HypergraphError::Cardinality { index, .. }
            | HypergraphError::OutOfRange { index, .. }
            | HypergraphError::RepeatedNode { index, .. }
            | HypergraphError::DuplicateEdge { index, .. } => Some(*index),
            _ => None,
        };
        let line = edge.map_or_else(|| key_line(text, "weights").unwrap_or(1), line_of);
        HypergraphIoError::Invalid { line, source }
    })
}

/// Canonical text form: sorted keys, edges in stored order one per line,
/// 1-based labels. Weights are written only when present.
pub fn to_json_string(g: &Hypergraph) -> String {
    let mut out = String::from("{\n  \"edges\": [");
    for (i, e) in g.edges().iter().enumerate() {
        out.push_str(if i == 0 { "\n    [" } else { ",\n    [" });
        let labels: Vec<String> = e.iter().map(|v| (v + 1).to_string()).collect();
        out.push_str(&labels.join(", "));
        out.push(']');
    }
    if !g.edges().is_empty() {
        out.push_str("\n  ");
    }
    out.push_str("],\n");
    out.push_str(&format!("  \"n\": {}", g.n()));
    if let Some(w) = g.weights() {
        let ws: Vec<String> = w
            .iter()
            .map(|x| serde_json::to_string(x).expect("finite weight"))
            .collect();
        out.push_str(&format!(",\n  \"weights\": [{}]", ws.join(", ")));
    }
    out.push_str("\n}\n");
    out
}

/// 1-based line number on which each inner array of `"edges"` opens.
fn edge_lines(text: &str) -> Vec<usize> {
    let Some(start) = key_offset(text, "edges") else {
        return Vec::new();
    };
    let mut lines = Vec::new();
    let mut line = 1 + text[..start].matches('\n').count();
    let mut depth = 0usize;
    for ch in text[start..].chars() {
        match ch {
            '\n' => line += 1,
            '[' => {
                depth += 1;
                if depth == 2 {
                    lines.push(line);
                }
            }
            ']' => {
                if depth <= 1 {
                    break;
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    lines
}

fn key_offset(text: &str, key: &str) -> Option<usize> {
    let pat = format!("\"{key}\"");
    let at = text.find(&pat)?;
    Some(at + pat.len())
}

fn key_line(text: &str, key: &str) -> Option<usize> {
    key_offset(text, key).map(|at| 1 + text[..at].matches('\n').count())
}
