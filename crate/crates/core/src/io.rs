//! Line-oriented text format for combinatorial maps.
//!
//! ```text
//! # comment
//! v 0: 1 2 3          neighbors of vertex 0, counterclockwise
//! frontier: 4 5       optional
//! facehint: inf       optional, degree of incomplete faces
//! ```
//!
//! Graphs with loops or parallel edges use `h <id> <tail> <twin>` lines
//! instead; the rotation at a vertex is the order of its `h` lines. Files
//! written by the embedder may also carry `map <v> <v'>` correspondence lines.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::map::{CombinatorialMap, HalfEdge, VertexId};
use crate::rational::Degree;

/// A parsed file: the map plus any `map` correspondence lines.
#[derive(Debug, Clone)]
pub struct Document {
    pub map: CombinatorialMap,
    pub correspondence: Vec<(u64, u64)>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Form {
    Vertex,
    HalfEdge,
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, msg: msg.into() }
}

fn number(tok: &str, line: usize) -> Result<u64> {
    tok.parse().map_err(|_| syntax(line, format!("expected a non-negative integer, found '{tok}'")))
}

pub fn parse_map(text: &str) -> Result<CombinatorialMap> {
    parse_document(text).map(|d| d.map)
}

pub fn parse_document(text: &str) -> Result<Document> {
    let mut form = None;
    let mut vertex_lines: Vec<(u64, Vec<u64>, usize)> = Vec::new();
    let mut he_lines: Vec<(u64, u64, u64, usize)> = Vec::new();
    let mut frontier: Vec<(u64, usize)> = Vec::new();
    let mut hint = None;
    let mut correspondence = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut set_form = |f: Form| -> Result<()> {
            match form {
                Some(g) if g != f => Err(syntax(line_no, "a file uses either 'v' lines or 'h' lines, not both")),
                _ => {
                    form = Some(f);
                    Ok(())
                }
            }
        };
        if let Some(rest) = line.strip_prefix("frontier:") {
            for tok in rest.split_whitespace() {
                frontier.push((number(tok, line_no)?, line_no));
            }
        } else if let Some(rest) = line.strip_prefix("facehint:") {
            let rest = rest.trim();
            hint = Some(match rest {
                "inf" | "infinite" => Degree::Infinite,
                _ => {
                    let d = number(rest, line_no)?;
                    if d == 0 {
                        return Err(syntax(line_no, "face degree must be positive"));
                    }
                    Degree::Finite(d)
                }
            });
        } else if let Some(rest) = line.strip_prefix("v ") {
            set_form(Form::Vertex)?;
            let (id, nbrs) = rest
                .split_once(':')
                .ok_or_else(|| syntax(line_no, "expected 'v <id>: <neighbors>'"))?;
            let id = number(id.trim(), line_no)?;
            let nbrs = nbrs.split_whitespace().map(|t| number(t, line_no)).collect::<Result<Vec<_>>>()?;
            vertex_lines.push((id, nbrs, line_no));
        } else if let Some(rest) = line.strip_prefix("h ") {
            set_form(Form::HalfEdge)?;
            let toks = rest.split_whitespace().map(|t| number(t, line_no)).collect::<Result<Vec<_>>>()?;
            match toks.as_slice() {
                &[h, tail, twin] => he_lines.push((h, tail, twin, line_no)),
                _ => return Err(syntax(line_no, "expected 'h <halfedge-id> <tail-id> <twin-id>'")),
            }
        } else if let Some(rest) = line.strip_prefix("map ") {
            let toks = rest.split_whitespace().map(|t| number(t, line_no)).collect::<Result<Vec<_>>>()?;
            match toks.as_slice() {
                &[a, b] => correspondence.push((a, b)),
                _ => return Err(syntax(line_no, "expected 'map <v> <v'>'")),
            }
        } else {
            return Err(syntax(line_no, format!("unrecognised line '{line}'")));
        }
    }

    let mut map = match form {
        None => return Err(Error::NoVertices),
        Some(Form::Vertex) => build_from_vertex_lines(&vertex_lines, &frontier, hint)?,
        Some(Form::HalfEdge) => build_from_half_edge_lines(&he_lines, &frontier, hint)?,
    };
    map.set_face_hint(hint);
    Ok(Document { map, correspondence })
}

fn frontier_mask(index: &HashMap<u64, VertexId>, n: usize, frontier: &[(u64, usize)]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &(label, line) in frontier {
        let v = *index
            .get(&label)
            .ok_or_else(|| syntax(line, format!("frontier vertex {label} is not defined")))?;
        mask[v] = true;
    }
    Ok(mask)
}

fn build_from_vertex_lines(
    lines: &[(u64, Vec<u64>, usize)],
    frontier: &[(u64, usize)],
    hint: Option<Degree>,
) -> Result<CombinatorialMap> {
    let mut index = HashMap::new();
    for (i, (id, _, line)) in lines.iter().enumerate() {
        if index.insert(*id, i).is_some() {
            return Err(syntax(*line, format!("vertex {id} defined twice")));
        }
    }
    let mut neighbors = Vec::with_capacity(lines.len());
    for (_, nbrs, line) in lines {
        let dense = nbrs
            .iter()
            .map(|n| index.get(n).copied().ok_or_else(|| syntax(*line, format!("neighbor {n} is not defined"))))
            .collect::<Result<Vec<_>>>()?;
        neighbors.push(dense);
    }
    let labels = lines.iter().map(|(id, _, _)| *id).collect();
    let mask = frontier_mask(&index, lines.len(), frontier)?;
    if lines.len() == 1 && neighbors[0].is_empty() {
        let mut m = CombinatorialMap::isolated_vertex(lines[0].0);
        m.set_face_hint(hint);
        return Ok(m);
    }
    CombinatorialMap::from_neighbor_lists(labels, &neighbors, mask, hint)
}

fn build_from_half_edge_lines(
    lines: &[(u64, u64, u64, usize)],
    frontier: &[(u64, usize)],
    hint: Option<Degree>,
) -> Result<CombinatorialMap> {
    let mut vindex: HashMap<u64, VertexId> = HashMap::new();
    let mut labels = Vec::new();
    let mut hindex = HashMap::new();
    for (i, &(h, tail, _, line)) in lines.iter().enumerate() {
        if hindex.insert(h, i).is_some() {
            return Err(syntax(line, format!("half-edge {h} defined twice")));
        }
        vindex.entry(tail).or_insert_with(|| {
            labels.push(tail);
            labels.len() - 1
        });
    }
    let mut half_edges = Vec::with_capacity(lines.len());
    let mut rotation = vec![Vec::new(); labels.len()];
    for (i, &(_, tail, twin, line)) in lines.iter().enumerate() {
        let twin = *hindex
            .get(&twin)
            .ok_or_else(|| Error::Pairing(format!("line {line}: twin {twin} is not defined")))?;
        let v = vindex[&tail];
        half_edges.push(HalfEdge { tail: v, twin });
        rotation[v].push(i);
    }
    let mask = frontier_mask(&vindex, labels.len(), frontier)?;
    CombinatorialMap::from_parts(labels, half_edges, rotation, mask, hint)
}

/// Canonical text form: `v` lines for simple maps, `h` lines otherwise, then
/// the frontier and the face hint.
pub fn serialize_map(map: &CombinatorialMap) -> String {
    let mut out = String::new();
    if map.is_simple() {
        for v in map.vertices() {
            let _ = write!(out, "v {}:", map.label(v));
            for w in map.neighbors(v) {
                let _ = write!(out, " {}", map.label(w));
            }
            out.push('\n');
        }
    } else {
        for v in map.vertices() {
            for &h in map.rotation(v) {
                let _ = writeln!(out, "h {h} {} {}", map.label(v), map.twin(h));
            }
        }
    }
    let frontier: Vec<String> = map.frontier().map(|v| map.label(v).to_string()).collect();
    if !frontier.is_empty() {
        let _ = writeln!(out, "frontier: {}", frontier.join(" "));
    }
    if let Some(h) = map.face_hint() {
        let _ = writeln!(out, "facehint: {h}");
    }
    out
}

/// Serialization followed by `map <v> <v'>` correspondence lines.
pub fn serialize_document(doc: &Document) -> String {
    let mut out = serialize_map(&doc.map);
    for (a, b) in &doc.correspondence {
        let _ = writeln!(out, "map {a} {b}");
    }
    out
}
