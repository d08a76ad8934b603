//! Line-oriented graph file format.
//!
//! ```text
//! # comment
//! n 3 undirected
//! 0 1 1
//! 1 2 0.5
//! ```
//!
//! The header names the node count and orientation. Each following line is
//! one edge `u v w`. Undirected edges appear once. Everything after `#` on a
//! line is ignored.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::WeightedGraph;
use crate::error::{Error, Result};

/// Upper bound on the node count accepted from a file. Graphs are stored
/// densely, so this caps the allocation an untrusted header can request.
pub const MAX_FILE_NODES: usize = 4096;

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut graph: Option<WeightedGraph> = None;
    let mut seen = HashSet::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let Some(g) = graph.as_mut() else {
            graph = Some(parse_header(line_no, &tokens)?);
            continue;
        };
        if tokens.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected `u v w`, found {} field(s)", tokens.len()),
            ));
        }
        let n = g.node_count();
        let u = parse_node(line_no, tokens[0], n)?;
        let v = parse_node(line_no, tokens[1], n)?;
        let w: f64 = tokens[2]
            .parse()
            .map_err(|_| Error::parse(line_no, format!("invalid weight `{}`", tokens[2])))?;
        if !w.is_finite() || w < 0.0 {
            return Err(Error::parse(
                line_no,
                format!("weight {w} must be finite and non-negative"),
            ));
        }
        if u == v {
            return Err(Error::parse(line_no, format!("self-loop at node {u}")));
        }
        let key = if g.is_directed() {
            (u, v)
        } else {
            (u.min(v), u.max(v))
        };
        if !seen.insert(key) {
            return Err(Error::parse(line_no, format!("duplicate edge ({u}, {v})")));
        }
        g.set_weight(u, v, w)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
    }

    graph.ok_or_else(|| {
        Error::parse(
            last_line + 1,
            "missing header `n <count> directed|undirected`",
        )
    })
}

fn parse_header(line_no: usize, tokens: &[&str]) -> Result<WeightedGraph> {
    let [tag, count, kind] = tokens else {
        return Err(Error::parse(
            line_no,
            "header must be `n <count> directed|undirected`",
        ));
    };
    if *tag != "n" {
        return Err(Error::parse(
            line_no,
            format!("expected header tag `n`, found `{tag}`"),
        ));
    }
    let n: usize = count
        .parse()
        .map_err(|_| Error::parse(line_no, format!("invalid node count `{count}`")))?;
    if n == 0 || n > MAX_FILE_NODES {
        return Err(Error::parse(
            line_no,
            format!("node count {n} outside 1..={MAX_FILE_NODES}"),
        ));
    }
    let directed = match *kind {
        "directed" => true,
        "undirected" => false,
        other => {
            return Err(Error::parse(
                line_no,
                format!("expected `directed` or `undirected`, found `{other}`"),
            ))
        }
    };
    WeightedGraph::empty(n, directed)
}

fn parse_node(line_no: usize, token: &str, n: usize) -> Result<usize> {
    let node: usize = token
        .parse()
        .map_err(|_| Error::parse(line_no, format!("invalid node id `{token}`")))?;
    if node >= n {
        return Err(Error::parse(
            line_no,
            format!("node id {node} out of range for n = {n}"),
        ));
    }
    Ok(node)
}

/// Serializes `g`. Weights are written in shortest round-trip form so that
/// `parse_graph(&format_graph(g)) == g` bit for bit.
pub fn format_graph(g: &WeightedGraph) -> String {
    let kind = if g.is_directed() {
        "directed"
    } else {
        "undirected"
    };
    let mut out = format!("n {} {}\n", g.node_count(), kind);
    for e in g.edges() {
        out.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
    }
    out
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn save_graph(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_graph(g))?;
    Ok(())
}
