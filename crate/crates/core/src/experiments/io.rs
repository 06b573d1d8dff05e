//! Plain-text edge lists: one `u v w` per line, `#` starts a comment.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// A parsed edge list and the external id of every dense node id.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub graph: WeightedGraph,
    pub labels: Vec<i64>,
}

pub fn parse_edge_list(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    Ok(read_edge_list(path)?.graph)
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<EdgeList> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_edge_list_from(file, &path.display().to_string())
}

/// Parses from any reader; `origin` names the source in error messages.
/// External ids may be sparse; they are relabeled densely in ascending order.
pub fn parse_edge_list_from(reader: impl Read, origin: &str) -> Result<EdgeList> {
    let err = |line: usize, msg: String| Error::Parse {
        path: origin.to_string(),
        line,
        msg,
    };
    let mut raw = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let no = idx + 1;
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(
                no,
                format!("expected `u v w`, found {} fields", fields.len()),
            ));
        }
        let num = |s: &str, what: &str| {
            s.parse::<i64>()
                .map_err(|e| err(no, format!("bad {what} `{s}`: {e}")))
        };
        let (u, v, w) = (
            num(fields[0], "node")?,
            num(fields[1], "node")?,
            num(fields[2], "weight")?,
        );
        if u == v {
            return Err(err(no, format!("self-loop on node {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(err(no, format!("duplicate edge {{{u}, {v}}}")));
        }
        raw.push((u, v, w));
    }
    let labels: Vec<i64> = raw
        .iter()
        .flat_map(|&(u, v, _)| [u, v])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let dense: HashMap<i64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let graph = WeightedGraph::new(
        labels.len(),
        raw.into_iter().map(|(u, v, w)| (dense[&u], dense[&v], w)),
    )?;
    Ok(EdgeList { graph, labels })
}

pub fn write_edge_list_to(graph: &WeightedGraph, mut out: impl Write) -> Result<()> {
    writeln!(
        out,
        "# nodes {} edges {}",
        graph.node_count(),
        graph.edge_count()
    )?;
    for (u, v, w) in graph.edges() {
        writeln!(out, "{u} {v} {w}")?;
    }
    Ok(())
}

pub fn write_edge_list(graph: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_edge_list_to(graph, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}
