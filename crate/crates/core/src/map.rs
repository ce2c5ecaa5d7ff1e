//! Oriented combinatorial maps (rotation systems over paired half-edges).
//!
//! Rotations are counterclockwise. A frontier vertex is a vertex of a
//! truncated infinite graph whose rotation is only partially known: its
//! rotation is stored as a linear arc and the missing part (the *gap*) sits
//! between the last and the first entry.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::rational::Degree;

pub type VertexId = usize;
pub type HalfEdgeId = usize;

type RestrictedParts = (
    Vec<u64>,
    Vec<HalfEdge>,
    Vec<Vec<HalfEdgeId>>,
    Vec<Option<VertexId>>,
    Vec<Option<HalfEdgeId>>,
);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdge {
    pub tail: VertexId,
    pub twin: HalfEdgeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialMap {
    labels: Vec<u64>,
    half_edges: Vec<HalfEdge>,
    rotation: Vec<Vec<HalfEdgeId>>,
    slot: Vec<usize>,
    frontier: Vec<bool>,
    face_hint: Option<Degree>,
}

impl CombinatorialMap {
    /// Builds a map from raw parts and checks every structural invariant.
    pub fn from_parts(
        labels: Vec<u64>,
        half_edges: Vec<HalfEdge>,
        rotation: Vec<Vec<HalfEdgeId>>,
        frontier: Vec<bool>,
        face_hint: Option<Degree>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::NoVertices);
        }
        if rotation.len() != n || frontier.len() != n {
            return Err(Error::MalformedMap("vertex tables differ in length".into()));
        }
        let mut slot = vec![usize::MAX; half_edges.len()];
        for (v, rot) in rotation.iter().enumerate() {
            for (i, &h) in rot.iter().enumerate() {
                let he = half_edges
                    .get(h)
                    .ok_or_else(|| Error::MalformedMap(format!("half-edge {h} out of range")))?;
                if he.tail != v {
                    return Err(Error::MalformedMap(format!(
                        "half-edge {h} listed at vertex {} but has tail {}",
                        labels[v], labels[he.tail]
                    )));
                }
                if slot[h] != usize::MAX {
                    return Err(Error::MalformedMap(format!("half-edge {h} appears twice")));
                }
                slot[h] = i;
            }
        }
        for (h, he) in half_edges.iter().enumerate() {
            if slot[h] == usize::MAX {
                return Err(Error::MalformedMap(format!("half-edge {h} has no rotation slot")));
            }
            if he.twin == h || he.twin >= half_edges.len() || half_edges[he.twin].twin != h {
                return Err(Error::Pairing(format!("half-edge {h} is not properly paired")));
            }
        }
        let map = CombinatorialMap {
            labels,
            half_edges,
            rotation,
            slot,
            frontier,
            face_hint,
        };
        if !map.is_connected() {
            return Err(Error::MalformedMap("graph is not connected".into()));
        }
        Ok(map)
    }

    /// Builds a map of a simple graph from counterclockwise neighbor lists.
    /// `neighbors[v]` lists dense vertex indices.
    pub fn from_neighbor_lists(
        labels: Vec<u64>,
        neighbors: &[Vec<VertexId>],
        frontier: Vec<bool>,
        face_hint: Option<Degree>,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::NoVertices);
        }
        let mut half_edges = Vec::new();
        let mut rotation = vec![Vec::new(); n];
        let mut index: HashMap<(VertexId, VertexId), HalfEdgeId> = HashMap::new();
        for (v, list) in neighbors.iter().enumerate() {
            for &w in list {
                if w >= n {
                    return Err(Error::Pairing(format!("vertex {} lists an unknown neighbor", labels[v])));
                }
                if w == v {
                    return Err(Error::Pairing(format!(
                        "loop at {}; use the half-edge form",
                        labels[v]
                    )));
                }
                if index.insert((v, w), half_edges.len()).is_some() {
                    return Err(Error::Pairing(format!(
                        "{} lists {} twice; use the half-edge form for multi-edges",
                        labels[v], labels[w]
                    )));
                }
                rotation[v].push(half_edges.len());
                half_edges.push(HalfEdge { tail: v, twin: usize::MAX });
            }
        }
        for (&(v, w), &h) in &index {
            match index.get(&(w, v)) {
                Some(&t) => half_edges[h].twin = t,
                None => {
                    return Err(Error::Pairing(format!(
                        "{} lists {} but {} does not list {}",
                        labels[v], labels[w], labels[w], labels[v]
                    )))
                }
            }
        }
        Self::from_parts(labels, half_edges, rotation, frontier, face_hint)
    }

    /// Map with a single isolated vertex and no edges.
    pub fn isolated_vertex(label: u64) -> Self {
        CombinatorialMap {
            labels: vec![label],
            half_edges: Vec::new(),
            rotation: vec![Vec::new()],
            slot: Vec::new(),
            frontier: vec![false],
            face_hint: None,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.half_edges.len()
    }

    pub fn num_edges(&self) -> usize {
        self.half_edges.len() / 2
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.labels.len()
    }

    pub fn label(&self, v: VertexId) -> u64 {
        self.labels[v]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: u64) -> Option<VertexId> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn half_edge(&self, h: HalfEdgeId) -> HalfEdge {
        self.half_edges[h]
    }

    pub fn tail(&self, h: HalfEdgeId) -> VertexId {
        self.half_edges[h].tail
    }

    pub fn twin(&self, h: HalfEdgeId) -> HalfEdgeId {
        self.half_edges[h].twin
    }

    pub fn head(&self, h: HalfEdgeId) -> VertexId {
        self.tail(self.twin(h))
    }

    pub fn rotation(&self, v: VertexId) -> &[HalfEdgeId] {
        &self.rotation[v]
    }

    pub fn slot(&self, h: HalfEdgeId) -> usize {
        self.slot[h]
    }

    pub fn is_frontier(&self, v: VertexId) -> bool {
        self.frontier[v]
    }

    pub fn frontier(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|&v| self.frontier[v])
    }

    pub fn has_frontier(&self) -> bool {
        self.frontier.iter().any(|&f| f)
    }

    pub fn face_hint(&self) -> Option<Degree> {
        self.face_hint
    }

    pub fn set_face_hint(&mut self, hint: Option<Degree>) {
        self.face_hint = hint;
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Number of rotation slots at `v`; a loop occupies two.
    pub fn degree(&self, v: VertexId) -> usize {
        self.rotation[v].len()
    }

    pub fn vertex_degree(&self, v: VertexId) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.degree(v))
    }

    /// Half-edge following `h` counterclockwise around its tail, or `None`
    /// when that step crosses the gap of a frontier vertex.
    pub fn rot_next(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        let v = self.tail(h);
        let rot = &self.rotation[v];
        let i = self.slot[h];
        if i + 1 < rot.len() {
            Some(rot[i + 1])
        } else if self.frontier[v] {
            None
        } else {
            Some(rot[0])
        }
    }

    pub fn rot_prev(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        let v = self.tail(h);
        let rot = &self.rotation[v];
        let i = self.slot[h];
        if i > 0 {
            Some(rot[i - 1])
        } else if self.frontier[v] {
            None
        } else {
            Some(rot[rot.len() - 1])
        }
    }

    /// Face successor: `next(u->v) = (v->w)` with `w` right after `u` in the
    /// rotation at `v`.
    pub fn face_next(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        self.rot_next(self.twin(h))
    }

    pub fn face_prev(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        self.rot_prev(h).map(|g| self.twin(g))
    }

    /// Neighbors in rotation order (with repetition for multi-edges).
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.rotation[v].iter().map(move |&h| self.head(h))
    }

    pub fn is_loop(&self, h: HalfEdgeId) -> bool {
        self.head(h) == self.tail(h)
    }

    pub fn adjacent(&self, v: VertexId, w: VertexId) -> bool {
        v != w && self.neighbors(v).any(|x| x == w)
    }

    /// No loops and no multi-edges.
    pub fn is_simple(&self) -> bool {
        self.simplicity_violations().is_empty()
    }

    /// Half-edges witnessing loops or repeated edges.
    pub fn simplicity_violations(&self) -> Vec<HalfEdgeId> {
        let mut out = Vec::new();
        for v in self.vertices() {
            let mut seen = HashMap::new();
            for &h in &self.rotation[v] {
                let w = self.head(h);
                if w == v || seen.insert(w, h).is_some() {
                    out.push(h);
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }

    /// Whether the vertex subset induces a connected subgraph.
    pub fn is_connected_subset(&self, set: &[bool]) -> bool {
        let Some(start) = self.vertices().find(|&v| set[v]) else {
            return false;
        };
        let mut seen = vec![false; self.num_vertices()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in self.neighbors(v) {
                if set[w] && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        self.vertices().all(|v| !set[v] || seen[v])
    }

    /// Subgraph induced by `keep` as a finite stand-alone map: rotations are
    /// restricted to surviving half-edges and all vertices are interior.
    /// Returns the map and the old-to-new vertex table.
    pub fn induced_subgraph(&self, keep: &[bool]) -> Result<(CombinatorialMap, Vec<Option<VertexId>>)> {
        let (labels, half_edges, rotation, old_to_new, _) = self.restricted_parts(keep);
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        if half_edges.is_empty() {
            if n == 1 {
                return Ok((CombinatorialMap::isolated_vertex(labels[0]), old_to_new));
            }
            return Err(Error::Disconnected);
        }
        let map = CombinatorialMap::from_parts(labels, half_edges, rotation, vec![false; n], None)
            .map_err(|e| match e {
                Error::MalformedMap(m) if m.contains("not connected") => Error::Disconnected,
                other => other,
            })?;
        Ok((map, old_to_new))
    }

    /// Truncation to `keep`, marking `frontier` vertices (and previous
    /// frontier vertices) as partially known. Each frontier rotation is
    /// re-linearised so that the removed half-edges and any earlier gap form a
    /// single gap at the wrap position.
    pub fn truncate(&self, keep: &[bool], frontier: &[bool]) -> Result<(CombinatorialMap, Vec<Option<VertexId>>)> {
        let (labels, half_edges, _, old_to_new, he_map) = self.restricted_parts(keep);
        let mut rotation = vec![Vec::new(); labels.len()];
        let mut new_frontier = vec![false; labels.len()];
        for v in self.vertices().filter(|&v| keep[v]) {
            let nv = old_to_new[v].unwrap();
            let is_frontier = self.frontier[v] || frontier[v];
            new_frontier[nv] = is_frontier;
            // Cyclic token sequence: Some(new half-edge) or None for a hole.
            let mut tokens: Vec<Option<HalfEdgeId>> = self.rotation[v].iter().map(|&h| he_map[h]).collect();
            if self.frontier[v] {
                tokens.push(None);
            }
            if !is_frontier {
                if tokens.iter().any(Option::is_none) {
                    return Err(Error::Construction(format!(
                        "interior vertex {} loses edges in truncation",
                        self.labels[v]
                    )));
                }
                rotation[nv] = tokens.into_iter().flatten().collect();
                continue;
            }
            let len = tokens.len();
            let holes: Vec<usize> = (0..len).filter(|&i| tokens[i].is_none()).collect();
            if holes.is_empty() {
                rotation[nv] = tokens.into_iter().flatten().collect();
                continue;
            }
            // Number of maximal hole runs in cyclic order.
            let runs = holes
                .iter()
                .filter(|&&i| tokens[(i + len - 1) % len].is_some())
                .count()
                .max(usize::from(holes.len() == len));
            if runs > 1 {
                return Err(Error::Construction(format!(
                    "frontier vertex {} would need {runs} gaps",
                    self.labels[v]
                )));
            }
            // Start right after the hole run.
            let start = (0..len)
                .find(|&i| tokens[i].is_some() && tokens[(i + len - 1) % len].is_none())
                .unwrap_or(0);
            rotation[nv] = (0..len).filter_map(|k| tokens[(start + k) % len]).collect();
        }
        if labels.is_empty() {
            return Err(Error::EmptySet);
        }
        let map = CombinatorialMap::from_parts(labels, half_edges, rotation, new_frontier, self.face_hint)?;
        Ok((map, old_to_new))
    }

    fn restricted_parts(
        &self,
        keep: &[bool],
    ) -> RestrictedParts {
        let mut old_to_new = vec![None; self.num_vertices()];
        let mut labels = Vec::new();
        for v in self.vertices().filter(|&v| keep[v]) {
            old_to_new[v] = Some(labels.len());
            labels.push(self.labels[v]);
        }
        let mut he_map = vec![None; self.num_half_edges()];
        let mut half_edges = Vec::new();
        for h in 0..self.num_half_edges() {
            if keep[self.tail(h)] && keep[self.head(h)] {
                he_map[h] = Some(half_edges.len());
                half_edges.push(HalfEdge { tail: old_to_new[self.tail(h)].unwrap(), twin: usize::MAX });
            }
        }
        for h in 0..self.num_half_edges() {
            if let Some(nh) = he_map[h] {
                half_edges[nh].twin = he_map[self.twin(h)].unwrap();
            }
        }
        let mut rotation = vec![Vec::new(); labels.len()];
        for v in self.vertices().filter(|&v| keep[v]) {
            rotation[old_to_new[v].unwrap()] = self.rotation[v].iter().filter_map(|&h| he_map[h]).collect();
        }
        (labels, half_edges, rotation, old_to_new, he_map)
    }

    /// Vertex-renumbering-free edit access for builders in this crate.
    pub(crate) fn into_parts(self) -> (Vec<u64>, Vec<HalfEdge>, Vec<Vec<HalfEdgeId>>, Vec<bool>, Option<Degree>) {
        (self.labels, self.half_edges, self.rotation, self.frontier, self.face_hint)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn path3() -> CombinatorialMap {
        CombinatorialMap::from_neighbor_lists(
            vec![0, 1, 2],
            &[vec![1], vec![0, 2], vec![1]],
            vec![false; 3],
            None,
        )
        .unwrap()
    }

    #[test]
    fn degrees_and_pairing() {
        let m = path3();
        assert_eq!(m.num_edges(), 2);
        assert_eq!(m.vertex_degree(1).unwrap(), 2);
        assert_eq!(m.vertex_degree(0).unwrap(), 1);
        assert!(matches!(m.vertex_degree(7), Err(Error::UnknownVertex(7))));
        for h in 0..m.num_half_edges() {
            assert_eq!(m.twin(m.twin(h)), h);
            assert_ne!(m.twin(h), h);
        }
    }

    #[test]
    fn unpaired_neighbor_is_rejected() {
        let err = CombinatorialMap::from_neighbor_lists(vec![0, 1], &[vec![1], vec![]], vec![false; 2], None)
            .unwrap_err();
        assert!(matches!(err, Error::Pairing(_)));
    }

    #[test]
    fn disconnected_is_rejected() {
        let err = CombinatorialMap::from_neighbor_lists(
            vec![0, 1, 2, 3],
            &[vec![1], vec![0], vec![3], vec![2]],
            vec![false; 4],
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::MalformedMap(_)));
    }

    #[test]
    fn loop_and_plain_edge_degree_three() {
        // Vertex 0 carries a loop (half-edges 0,1) and an edge to 1 (2,3).
        let he = vec![
            HalfEdge { tail: 0, twin: 1 },
            HalfEdge { tail: 0, twin: 0 },
            HalfEdge { tail: 0, twin: 3 },
            HalfEdge { tail: 1, twin: 2 },
        ];
        let m = CombinatorialMap::from_parts(vec![0, 1], he, vec![vec![0, 1, 2], vec![3]], vec![false; 2], None)
            .unwrap();
        assert_eq!(m.vertex_degree(0).unwrap(), 3);
        assert!(!m.is_simple());
    }

    #[test]
    fn induced_subgraph_keeps_rotation_order() {
        let m = path3();
        let (sub, table) = m.induced_subgraph(&[true, true, false]).unwrap();
        assert_eq!(sub.num_vertices(), 2);
        assert_eq!(sub.num_edges(), 1);
        assert_eq!(table, vec![Some(0), Some(1), None]);
        assert!(matches!(m.induced_subgraph(&[true, false, true]), Err(Error::Disconnected)));
    }
}
