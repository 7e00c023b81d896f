//! Plain-text graph, labelling and batch-trace files.
//!
//! * graph: first line `n m`, then one `u v` line per edge;
//! * labelling: one `u v label` line per edge (`inf` = infinite weight);
//! * batch trace: blocks of `u v new_label` lines separated by `---`.
//!
//! Identifiers in files may be sparse; they are remapped onto `0..n` in
//! ascending order and the mapping is kept for writing results back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::{BatchUpdate, CommGraph, EdgeId, GraphError, Label, Labelling, NodeId, Weight};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FileError {
    FileError::Parse { line, msg: msg.into() }
}

/// Which label alphabet a file uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    Bit,
    Weight,
}

/// Mapping between file identifiers and dense simulator identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    external: Vec<u64>,
    dense: BTreeMap<u64, NodeId>,
}

impl IdMap {
    pub fn identity(n: usize) -> Self {
        let external: Vec<u64> = (0..n as u64).collect();
        let dense = external.iter().map(|&x| (x, NodeId(x as u32))).collect();
        IdMap { external, dense }
    }

    fn from_ids(ids: BTreeSet<u64>) -> Self {
        let external: Vec<u64> = ids.into_iter().collect();
        let dense = external.iter().enumerate().map(|(i, &x)| (x, NodeId::from(i))).collect();
        IdMap { external, dense }
    }

    pub fn to_dense(&self, id: u64) -> Option<NodeId> {
        self.dense.get(&id).copied()
    }

    pub fn to_external(&self, v: NodeId) -> u64 {
        self.external[v.index()]
    }
}

/// A graph loaded from a file together with its identifier mapping.
#[derive(Debug, Clone)]
pub struct GraphFile {
    pub graph: CommGraph,
    pub ids: IdMap,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_u64(tok: &str, line: usize) -> Result<u64, FileError> {
    tok.parse().map_err(|_| parse_err(line, format!("bad integer `{tok}`")))
}

pub fn parse_graph(text: &str) -> Result<GraphFile, FileError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty graph file"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 2 {
        return Err(parse_err(hline, "expected `n m`"));
    }
    let n = parse_u64(head[0], hline)? as usize;
    let m = parse_u64(head[1], hline)? as usize;
    let mut raw = Vec::with_capacity(m);
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(parse_err(ln, "expected `u v`"));
        }
        raw.push((parse_u64(toks[0], ln)?, parse_u64(toks[1], ln)?));
    }
    if raw.len() != m {
        return Err(parse_err(hline, format!("header promises {m} edges, found {}", raw.len())));
    }
    let dense_ok = raw.iter().all(|&(a, b)| (a as usize) < n && (b as usize) < n);
    let ids = if dense_ok {
        IdMap::identity(n)
    } else {
        let ids: BTreeSet<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
        if ids.len() > n {
            return Err(GraphError::BadNodeId(*ids.iter().next_back().unwrap(), n).into());
        }
        IdMap::from_ids(ids)
    };
    let edges = raw
        .iter()
        .map(|&(a, b)| (ids.to_dense(a).unwrap().index(), ids.to_dense(b).unwrap().index()))
        .collect::<Vec<_>>();
    let graph = CommGraph::new(n, edges)?;
    Ok(GraphFile { graph, ids })
}

pub fn read_graph(path: &Path) -> Result<GraphFile, FileError> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn format_graph(graph: &CommGraph) -> String {
    let mut out = format!("{} {}\n", graph.n(), graph.m());
    for e in graph.edges() {
        let _ = writeln!(out, "{} {}", e.u, e.v);
    }
    out
}

pub fn parse_label(tok: &str, kind: LabelKind, line: usize) -> Result<Label, FileError> {
    match kind {
        LabelKind::Bit => match tok {
            "0" => Ok(Label::Bit(false)),
            "1" => Ok(Label::Bit(true)),
            _ => Err(parse_err(line, format!("bad bit label `{tok}`"))),
        },
        LabelKind::Weight => {
            if tok.eq_ignore_ascii_case("inf") {
                Ok(Label::Weight(Weight::Infinite))
            } else {
                tok.parse::<i64>()
                    .map(Label::w)
                    .map_err(|_| parse_err(line, format!("bad weight `{tok}`")))
            }
        }
    }
}

fn parse_edge_line(
    ids: &IdMap,
    l: &str,
    ln: usize,
    kind: LabelKind,
) -> Result<(EdgeId, Label), FileError> {
    let toks: Vec<&str> = l.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(parse_err(ln, "expected `u v label`"));
    }
    let a = parse_u64(toks[0], ln)?;
    let b = parse_u64(toks[1], ln)?;
    let (Some(a), Some(b)) = (ids.to_dense(a), ids.to_dense(b)) else {
        return Err(parse_err(ln, "unknown node id"));
    };
    if a == b {
        return Err(GraphError::SelfLoop(a).into());
    }
    Ok((EdgeId::new(a, b), parse_label(toks[2], kind, ln)?))
}

pub fn parse_labelling(text: &str, file: &GraphFile, kind: LabelKind) -> Result<Labelling, FileError> {
    let mut labels = BTreeMap::new();
    for (ln, l) in content_lines(text) {
        let (e, label) = parse_edge_line(&file.ids, l, ln, kind)?;
        if labels.insert(e, label).is_some() {
            return Err(GraphError::DuplicateEdge(e).into());
        }
    }
    Ok(Labelling::new(&file.graph, labels)?)
}

pub fn format_labelling(labelling: &Labelling) -> String {
    let mut out = String::new();
    for (e, l) in labelling.iter() {
        let _ = writeln!(out, "{} {} {}", e.u, e.v, l);
    }
    out
}

/// Parses a batch trace. Empty blocks are kept (they are valid `α = 0`
/// batches).
pub fn parse_batches(text: &str, ids: &IdMap, kind: LabelKind) -> Result<Vec<BatchUpdate>, FileError> {
    let mut batches = vec![BatchUpdate::new()];
    let mut saw_content = false;
    for (ln, l) in content_lines(text) {
        saw_content = true;
        if l == "---" {
            batches.push(BatchUpdate::new());
            continue;
        }
        let (e, label) = parse_edge_line(ids, l, ln, kind)?;
        batches.last_mut().unwrap().push(e, label)?;
    }
    if !saw_content {
        batches.clear();
    }
    Ok(batches)
}

pub fn format_batches(batches: &[BatchUpdate]) -> String {
    let mut out = String::new();
    for (i, b) in batches.iter().enumerate() {
        if i > 0 {
            out.push_str("---\n");
        }
        for (e, l) in b.iter() {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, l);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_graph_and_batches() {
        let g = CommGraph::new(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let text = format_graph(&g);
        let file = parse_graph(&text).unwrap();
        assert_eq!(file.graph, g);

        let batches = vec![
            BatchUpdate::from_changes([(EdgeId::of(0, 1), Label::w(4))]).unwrap(),
            BatchUpdate::new(),
            BatchUpdate::from_changes([(EdgeId::of(2, 3), Label::Weight(Weight::Infinite))]).unwrap(),
        ];
        let parsed = parse_batches(&format_batches(&batches), &file.ids, LabelKind::Weight).unwrap();
        assert_eq!(parsed, batches);
    }

    #[test]
    fn sparse_ids_are_remapped() {
        let file = parse_graph("3 2\n10 500\n500 42\n").unwrap();
        assert_eq!(file.graph.n(), 3);
        assert_eq!(file.ids.to_dense(10), Some(NodeId(0)));
        assert_eq!(file.ids.to_dense(42), Some(NodeId(1)));
        assert_eq!(file.ids.to_external(NodeId(2)), 500);
        let lab = parse_labelling("10 500 3\n500 42 inf\n", &file, LabelKind::Weight).unwrap();
        assert_eq!(lab.weight(EdgeId::of(0, 2)), Weight::Finite(3));
        assert_eq!(lab.weight(EdgeId::of(1, 2)), Weight::Infinite);
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(parse_graph("2 1\n0\n"), Err(FileError::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("2 2\n0 1\n"), Err(FileError::Parse { .. })));
        let file = parse_graph("2 1\n0 1\n").unwrap();
        assert!(parse_batches("0 1 x\n", &file.ids, LabelKind::Bit).is_err());
        assert!(matches!(
            parse_batches("0 1 1\n1 0 0\n", &file.ids, LabelKind::Bit),
            Err(FileError::Graph(GraphError::DuplicateChange(_)))
        ));
    }
}
