//! Text graph files.
//!
//! ```text
//! # comment
//! n 4
//! e 0 1 1.0
//! h 3 0 1 2 0.5
//! ```
//!
//! Vertices are 0-based, edges need `i < j`, repeated edges and hyperedges are
//! summed.

use std::fmt::Write as _;
use std::path::Path;

use super::graph::{HyperWeights, WeightedGraph};
use super::GapError;

#[derive(Clone, Debug, PartialEq)]
pub struct GraphFile {
    pub graph: WeightedGraph,
    /// Present when the file has at least one `h` line.
    pub hyper: Option<HyperWeights>,
}

struct Tokens<'a> {
    line: usize,
    items: Vec<(usize, &'a str)>,
}

impl<'a> Tokens<'a> {
    fn split(line: usize, text: &'a str) -> Self {
        let mut items = Vec::new();
        let mut start = None;
        for (idx, ch) in text.char_indices().chain(std::iter::once((text.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(idx),
                (true, Some(s)) => {
                    items.push((s + 1, &text[s..idx]));
                    start = None;
                }
                _ => {}
            }
        }
        Self { line, items }
    }

    fn err(&self, column: usize, message: impl Into<String>) -> GapError {
        GapError::Parse { line: self.line, column, message: message.into() }
    }

    fn end_column(&self) -> usize {
        self.items.last().map(|(c, t)| c + t.len()).unwrap_or(1)
    }

    fn get(&self, idx: usize, what: &str) -> Result<(usize, &'a str), GapError> {
        self.items.get(idx).copied().ok_or_else(|| self.err(self.end_column(), format!("missing {what}")))
    }

    fn usize_at(&self, idx: usize, what: &str) -> Result<(usize, usize), GapError> {
        let (col, tok) = self.get(idx, what)?;
        tok.parse().map(|v| (col, v)).map_err(|_| self.err(col, format!("{what} must be a nonnegative integer, got {tok:?}")))
    }

    fn weight_at(&self, idx: usize) -> Result<f64, GapError> {
        let (col, tok) = self.get(idx, "weight")?;
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
            _ => Err(self.err(col, format!("weight must be a finite nonnegative number, got {tok:?}"))),
        }
    }

    fn expect_len(&self, len: usize) -> Result<(), GapError> {
        match self.items.get(len) {
            Some(&(col, tok)) => Err(self.err(col, format!("unexpected trailing token {tok:?}"))),
            None => Ok(()),
        }
    }
}

pub fn parse_graph_str(text: &str) -> Result<GraphFile, GapError> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    let mut hyper: Option<HyperWeights> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let toks = Tokens::split(lineno + 1, raw);
        let Some(&(col, head)) = toks.items.first() else { continue };
        if head.starts_with('#') {
            continue;
        }
        match head {
            "n" => {
                if n.is_some() {
                    return Err(toks.err(col, "duplicate header"));
                }
                let (_, count) = toks.usize_at(1, "vertex count")?;
                toks.expect_len(2)?;
                n = Some(count);
            }
            "e" | "h" => {
                let count = n.ok_or_else(|| toks.err(col, "header \"n <count>\" must come first"))?;
                let vertex = |idx: usize| -> Result<usize, GapError> {
                    let (c, v) = toks.usize_at(idx, "vertex")?;
                    if v >= count {
                        return Err(toks.err(c, format!("vertex {v} outside 0..{count}")));
                    }
                    Ok(v)
                };
                if head == "e" {
                    let i = vertex(1)?;
                    let j = vertex(2)?;
                    if i >= j {
                        return Err(toks.err(toks.items[2].0, format!("edge needs i < j, got {i} {j}")));
                    }
                    let w = toks.weight_at(3)?;
                    toks.expect_len(4)?;
                    edges.push((i, j, w));
                } else {
                    let (kcol, k) = toks.usize_at(1, "subset size")?;
                    if k < 2 {
                        return Err(toks.err(kcol, "hyperedge needs at least 2 vertices"));
                    }
                    let set = (0..k).map(|t| vertex(2 + t)).collect::<Result<Vec<_>, _>>()?;
                    let rate = toks.weight_at(2 + k)?;
                    toks.expect_len(3 + k)?;
                    hyper
                        .get_or_insert_with(|| HyperWeights::new(count))
                        .add(&set, rate)
                        .map_err(|e| toks.err(col, e.to_string()))?;
                }
            }
            other => return Err(toks.err(col, format!("unknown record {other:?}"))),
        }
    }
    let count = n.ok_or(GapError::Parse { line: 1, column: 1, message: "missing header \"n <count>\"".into() })?;
    let graph = WeightedGraph::from_edges(count, &edges)?;
    Ok(GraphFile { graph, hyper })
}

pub fn parse_graph_file(path: &Path) -> Result<GraphFile, GapError> {
    let text = std::fs::read_to_string(path).map_err(|e| GapError::Io(format!("{}: {e}", path.display())))?;
    parse_graph_str(&text)
}

pub fn format_graph(file: &GraphFile) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", file.graph.n()).unwrap();
    for (i, j, c) in file.graph.edges() {
        writeln!(out, "e {i} {j} {c:?}").unwrap();
    }
    if let Some(h) = &file.hyper {
        for (set, rate) in h.rates() {
            let verts: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            writeln!(out, "h {} {} {rate:?}", set.len(), verts.join(" ")).unwrap();
        }
    }
    out
}
