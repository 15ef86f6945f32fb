//! Plain-text edge-list format.
//!
//! ```text
//! n d
//! u v        (m lines, u < v, 0-based)
//! ```

use std::io::{BufRead, Write};

use super::{GraphError, RegularGraph};

pub fn save_graph<W: Write>(g: &RegularGraph, mut sink: W) -> Result<(), GraphError> {
    writeln!(sink, "{} {}", g.n(), g.d())?;
    for &(u, v) in g.edges() {
        writeln!(sink, "{u} {v}")?;
    }
    sink.flush()?;
    Ok(())
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), GraphError> {
    let bad = |reason: &str| GraphError::MalformedLine { line: lineno, reason: reason.to_string() };
    let mut it = line.split_ascii_whitespace();
    let a = it.next().ok_or_else(|| bad("missing first field"))?;
    let b = it.next().ok_or_else(|| bad("missing second field"))?;
    if it.next().is_some() {
        return Err(bad("trailing fields"));
    }
    let a = a.parse().map_err(|_| bad("not an unsigned integer"))?;
    let b = b.parse().map_err(|_| bad("not an unsigned integer"))?;
    Ok((a, b))
}

pub fn load_graph<R: BufRead>(source: R) -> Result<RegularGraph, GraphError> {
    let mut lines = source.lines();
    let header = lines.next().ok_or_else(|| GraphError::MalformedHeader("empty input".into()))??;
    let (n, d) = parse_pair(&header, 1).map_err(|e| GraphError::MalformedHeader(e.to_string()))?;
    let mut edges = Vec::with_capacity(n * d / 2);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 2;
        let (u, v) = parse_pair(&line, lineno)?;
        if u >= v {
            return Err(GraphError::MalformedLine { line: lineno, reason: format!("expected u < v, got {u} {v}") });
        }
        edges.push((u, v));
    }
    RegularGraph::from_edges(n, d, &edges)
}
