//! Plain-text edge lists: a `n m` line followed by `m` lines of `u v`.

use std::collections::HashSet;
use std::fmt::{self, Write as _};

use reachlabel::Digraph;

#[derive(Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug)]
pub struct GraphFile {
    pub graph: Digraph,
    /// One message per ignored duplicate edge.
    pub warnings: Vec<String>,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn fields<const K: usize>(line: usize, text: &str) -> Result<[usize; K], ParseError> {
    let mut out = [0; K];
    let mut it = text.split_whitespace();
    for slot in &mut out {
        let tok = it
            .next()
            .ok_or_else(|| err(line, format!("expected {K} integers, got {text:?}")))?;
        *slot = tok
            .parse()
            .map_err(|_| err(line, format!("not a non-negative integer: {tok:?}")))?;
    }
    if let Some(extra) = it.next() {
        return Err(err(line, format!("unexpected token {extra:?}")));
    }
    Ok(out)
}

/// Blank lines are skipped; everything else must follow the format.
pub fn parse(text: &str) -> Result<GraphFile, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| err(1, "missing \"n m\" header"))?;
    let [n, m] = fields::<2>(hl, header)?;
    if n == 0 {
        return Err(err(hl, "n must be at least 1"));
    }
    if n > u32::MAX as usize {
        return Err(err(hl, format!("n = {n} is too large")));
    }
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let mut warnings = Vec::new();
    let mut count = 0;
    let mut last = hl;
    for (ln, l) in lines {
        let [u, v] = fields::<2>(ln, l)?;
        for x in [u, v] {
            if x >= n {
                return Err(err(ln, format!("node {x} out of range for n = {n}")));
            }
        }
        count += 1;
        last = ln;
        if count > m {
            return Err(err(ln, format!("more than the {m} edges declared in the header")));
        }
        if seen.insert((u, v)) {
            edges.push((u, v));
        } else {
            warnings.push(format!("line {ln}: duplicate edge {u} {v} ignored"));
        }
    }
    if count < m {
        return Err(err(last, format!("expected {m} edges, found {count}")));
    }
    let graph = Digraph::from_edges(n, edges).map_err(|e| err(hl, e.to_string()))?;
    Ok(GraphFile { graph, warnings })
}

pub fn render(g: &Digraph) -> String {
    let mut out = String::new();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let _ = writeln!(out, "{} {}", g.n(), edges.len());
    for (u, v) in edges {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
