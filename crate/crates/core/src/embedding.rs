//! Embedding a locally tessellating graph into a tessellating supergraph.
//!
//! Step 1 hangs a binary tree into every infinigon corner of a flat vertex.
//! Step 2 walks outwards from `W` level by level and closes an unbounded face
//! by an edge between its two vertices on `S_n(W)` as soon as it meets more
//! than `R_ε` vertices of `B_n(W)`.
//!
//! Everything is materialised inside `B_M(W)`, where `M` is the smaller of the
//! horizon and the faithful radius of the input around `W`. Levels beyond `M`
//! only join vertices outside `B_M(W)`. A face still open at the end either
//! stays infinite or closes with more than `R_ε` vertices, so verification
//! uses `R_ε + 1` as its degree.

use std::collections::BTreeSet;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::{distances_from, frontier_distance};
use crate::classify::extended_edges;
use crate::curvature::{corner_value, vertex_curvature};
use crate::error::{Error, Result};
use crate::faces::{trace_faces, FaceTable};
use crate::io::{serialize_document, Document};
use crate::map::{CombinatorialMap, HalfEdge, HalfEdgeId, VertexId};
use crate::rational::{int, rat, Degree, FaceDegree, Rational};

/// `max{6, 2 diam(W), (2 + min|v|)/ε}`, rounded up. The minimum degree is
/// taken over the interior vertices of the map.
pub fn closing_parameter(map: &CombinatorialMap, w: &[VertexId], eps: &Rational) -> Result<u64> {
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    if !eps.is_positive() {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    let diam = diameter(map, w)?;
    let min_deg = map
        .vertices()
        .filter(|&v| !map.is_frontier(v))
        .map(|v| map.degree(v))
        .min()
        .ok_or_else(|| Error::Precondition("no interior vertex".into()))?;
    let third = int(2 + min_deg as i64) / eps;
    let third = third.ceil().to_integer().to_u64().ok_or_else(|| Error::TooLarge("closing parameter".into()))?;
    Ok(6.max(2 * diam as u64).max(third))
}

fn diameter(map: &CombinatorialMap, w: &[VertexId]) -> Result<usize> {
    let mut diam = 0;
    for &v in w {
        map.check_vertex(v)?;
        let d = distances_from(map, &[v]);
        for &u in w {
            diam = diam.max(d[u].ok_or(Error::Disconnected)?);
        }
    }
    Ok(diam)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedFace {
    /// Induction level at which the face was closed.
    pub level: usize,
    pub x: VertexId,
    pub y: VertexId,
    /// Degree of the polygon created by the closing edge.
    pub degree: usize,
}

#[derive(Debug, Clone)]
pub struct EmbeddingResult {
    pub supergraph: CombinatorialMap,
    /// `correspondence[v]` is the supergraph vertex of input vertex `v`.
    pub correspondence: Vec<Option<VertexId>>,
    pub epsilon: Rational,
    pub closing_parameter: u64,
    /// Input vertex and the number of trees hung at it.
    pub added_trees: Vec<(VertexId, usize)>,
    pub closed_faces: Vec<ClosedFace>,
    pub horizon: usize,
    pub materialized_radius: usize,
    /// Whether the materialised complement of `W` is connected.
    pub complement_connected: bool,
}

impl EmbeddingResult {
    /// Graph file text with `map <v> <v'>` lines (by label).
    pub fn to_text(&self, original: &CombinatorialMap) -> String {
        let correspondence = self
            .correspondence
            .iter()
            .enumerate()
            .filter_map(|(v, img)| img.map(|i| (original.label(v), self.supergraph.label(i))))
            .collect();
        serialize_document(&Document { map: self.supergraph.clone(), correspondence })
    }
}

/// Rotation system under edit.
struct Editable {
    labels: Vec<u64>,
    half_edges: Vec<HalfEdge>,
    rotation: Vec<Vec<HalfEdgeId>>,
    frontier: Vec<bool>,
    hint: Option<Degree>,
    next_label: u64,
}

impl Editable {
    fn from_map(map: &CombinatorialMap) -> Self {
        let (labels, half_edges, rotation, frontier, hint) = map.clone().into_parts();
        let next_label = labels.iter().max().map_or(0, |m| m + 1);
        Editable { labels, half_edges, rotation, frontier, hint, next_label }
    }

    fn to_map(&self) -> Result<CombinatorialMap> {
        CombinatorialMap::from_parts(
            self.labels.clone(),
            self.half_edges.clone(),
            self.rotation.clone(),
            self.frontier.clone(),
            self.hint,
        )
    }

    fn add_vertex(&mut self, frontier: bool) -> VertexId {
        self.labels.push(self.next_label);
        self.next_label += 1;
        self.rotation.push(Vec::new());
        self.frontier.push(frontier);
        self.labels.len() - 1
    }

    /// New edge `u-v`; returns the half-edges `u->v` and `v->u`, not yet placed.
    fn add_edge(&mut self, u: VertexId, v: VertexId) -> (HalfEdgeId, HalfEdgeId) {
        let h = self.half_edges.len();
        self.half_edges.push(HalfEdge { tail: u, twin: h + 1 });
        self.half_edges.push(HalfEdge { tail: v, twin: h });
        (h, h + 1)
    }

    fn position(&self, h: HalfEdgeId) -> usize {
        let v = self.half_edges[h].tail;
        self.rotation[v].iter().position(|&x| x == h).unwrap()
    }

    fn insert_before(&mut self, anchor: HalfEdgeId, new: HalfEdgeId) {
        let v = self.half_edges[anchor].tail;
        let i = self.position(anchor);
        self.rotation[v].insert(i, new);
    }

    fn insert_after(&mut self, anchor: HalfEdgeId, new: HalfEdgeId) {
        let v = self.half_edges[anchor].tail;
        let i = self.position(anchor);
        self.rotation[v].insert(i + 1, new);
    }

    /// Binary tree of the given depth below a new root joined to `v` by a
    /// half-edge placed just before `anchor` in the rotation at `v`.
    fn hang_tree(&mut self, v: VertexId, anchor: HalfEdgeId, depth: usize) -> usize {
        let root = self.add_vertex(depth == 0);
        let (down, up) = self.add_edge(v, root);
        self.insert_before(anchor, down);
        self.rotation[root].push(up);
        let mut count = 1;
        let mut level = vec![root];
        for d in 0..depth {
            let mut next = Vec::with_capacity(level.len() * 2);
            for &p in &level {
                for _ in 0..2 {
                    let c = self.add_vertex(d + 1 == depth);
                    let (pc, cp) = self.add_edge(p, c);
                    self.rotation[p].push(pc);
                    self.rotation[c].push(cp);
                    next.push(c);
                    count += 1;
                }
            }
            level = next;
        }
        count
    }
}

/// Runs both construction steps on `B_M(W)`, `M = min(horizon, faithful
/// radius around W)`.
pub fn embed(map: &CombinatorialMap, w: &[VertexId], eps: &Rational, horizon: usize) -> Result<EmbeddingResult> {
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    for &v in w {
        map.check_vertex(v)?;
    }
    if !map.is_simple() {
        return Err(Error::Precondition("the embedding needs a simple graph".into()));
    }
    let r_eps = closing_parameter(map, w, eps)?;

    let dist = distances_from(map, w);
    let faithful = frontier_distance(map, &dist).unwrap_or(usize::MAX);
    let m = horizon.min(faithful);
    if m == 0 {
        return Err(Error::NotFaithful { radius: horizon, vertex: w[0], depth: 0 });
    }
    let keep: Vec<bool> = dist.iter().map(|d| d.is_some_and(|d| d <= m)).collect();
    let front: Vec<bool> = dist.iter().map(|d| *d == Some(m)).collect();
    let (base, table) = map.truncate(&keep, &front)?;

    let mut in_w = vec![false; map.num_vertices()];
    for &v in w {
        in_w[v] = true;
    }
    let w_base: Vec<VertexId> = w.iter().map(|&v| table[v].unwrap()).collect();
    let mut w_mask = vec![false; base.num_vertices()];
    for &v in &w_base {
        w_mask[v] = true;
    }
    if !base.is_connected_subset(&w_mask) {
        return Err(Error::Precondition("W does not induce a connected subgraph".into()));
    }
    let complement: Vec<bool> = w_mask.iter().map(|b| !b).collect();
    let complement_connected = complement.iter().all(|b| !b) || base.is_connected_subset(&complement);

    let faces = trace_faces(&base);
    let base_dist = distances_from(&base, &w_base);
    for v in base.vertices().filter(|&v| !base.is_frontier(v)) {
        let k = vertex_curvature(&base, &faces, v)?;
        if k.is_positive() {
            return Err(Error::Precondition(format!("vertex {} has positive curvature {k}", base.label(v))));
        }
    }

    // Step 1.
    let mut ed = Editable::from_map(&base);
    let mut added_trees = Vec::new();
    for v in base.vertices().filter(|&v| !base.is_frontier(v)) {
        if !vertex_curvature(&base, &faces, v)?.is_zero() {
            continue;
        }
        let anchors: Vec<HalfEdgeId> = base
            .rotation(v)
            .iter()
            .copied()
            .filter(|&h| faces.degree(faces.face_of(h)) == FaceDegree::Known(Degree::Infinite))
            .collect();
        if anchors.is_empty() {
            continue;
        }
        let depth = m - base_dist[v].unwrap() - 1;
        for &a in &anchors {
            ed.hang_tree(v, a, depth);
        }
        let orig = table.iter().position(|&t| t == Some(v)).unwrap();
        added_trees.push((orig, anchors.len()));
    }

    // Step 2.
    let mut closed_faces = Vec::new();
    for n in 0..=m {
        let current = ed.to_map()?;
        let faces = trace_faces(&current);
        let d = distances_from(&current, &w_base);
        let in_ball = |v: VertexId| d[v].is_some_and(|x| x <= n);
        let mut closings = Vec::new();
        let unbounded = |f: &&crate::faces::FaceOrbit| !f.complete && f.degree == FaceDegree::Known(Degree::Infinite);
        for f in faces.faces().iter().filter(unbounded) {
            let mut seq: Vec<VertexId> = f.walk.iter().map(|&h| current.tail(h)).collect();
            seq.push(current.head(*f.walk.last().unwrap()));
            let inside: BTreeSet<VertexId> = seq.iter().copied().filter(|&v| in_ball(v)).collect();
            if (inside.len() as u64) <= r_eps {
                continue;
            }
            let on_sphere: BTreeSet<VertexId> = inside.iter().copied().filter(|&v| d[v] == Some(n)).collect();
            let first = seq.iter().position(|&v| in_ball(v)).unwrap();
            let last = seq.iter().rposition(|&v| in_ball(v)).unwrap();
            let contiguous = seq[first..=last].iter().all(|&v| in_ball(v));
            if on_sphere.len() != 2 || !contiguous || seq[first] == seq[last] {
                return Err(Error::Construction(format!(
                    "face {} meets S_{n}(W) in {} vertices; expected exactly two",
                    f.id,
                    on_sphere.len()
                )));
            }
            // Edge x-y: before the walk's half-edge leaving x, after the
            // reversed half-edge arriving at y.
            let at_x = f.walk[first];
            let at_y = current.twin(f.walk[last - 1]);
            closings.push((seq[first], seq[last], at_x, at_y, last - first + 1));
        }
        for (x, y, at_x, at_y, degree) in closings {
            let (xy, yx) = ed.add_edge(x, y);
            ed.insert_before(at_x, xy);
            ed.insert_after(at_y, yx);
            closed_faces.push(ClosedFace { level: n, x, y, degree });
        }
    }

    let supergraph = ed.to_map()?;
    Ok(EmbeddingResult {
        supergraph,
        correspondence: table,
        epsilon: eps.clone(),
        closing_parameter: r_eps,
        added_trees,
        closed_faces,
        horizon,
        materialized_radius: m,
        complement_connected,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    /// False when the premise of the property does not hold.
    pub applicable: bool,
    pub failures: Vec<String>,
}

impl PropertyCheck {
    fn new(name: &'static str) -> Self {
        PropertyCheck { name, passed: true, applicable: true, failures: Vec::new() }
    }

    fn fail(&mut self, msg: String) {
        self.passed = false;
        self.failures.push(msg);
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    pub checks: Vec<PropertyCheck>,
    /// Faces created in Step 2 all have degree at least `max{6, 1/ε}`.
    pub closed_faces_large: bool,
    /// Complete faces of the supergraph all have multiplicity-one corners.
    pub complete_faces_polygons: bool,
}

impl EmbeddingReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.closed_faces_large && self.complete_faces_polygons
    }
}

/// Face degree for verification: open unbounded faces count as `R_ε + 1`.
fn effective_degree(faces: &FaceTable, f: usize, r_eps: u64) -> Degree {
    match faces.degree(f) {
        FaceDegree::Known(Degree::Infinite) => Degree::Finite(r_eps + 1),
        FaceDegree::Known(d) => d,
        FaceDegree::Unknown => Degree::Finite(r_eps + 1),
    }
}

/// Corner curvatures `(vertex, value)` of the supergraph at interior vertices.
fn supergraph_corners(g: &CombinatorialMap, faces: &FaceTable, r_eps: u64) -> Vec<(VertexId, Rational)> {
    faces
        .corners()
        .iter()
        .filter(|c| !g.is_frontier(c.vertex))
        .map(|c| (c.vertex, corner_value(g.degree(c.vertex), effective_degree(faces, c.face, r_eps))))
        .collect()
}

fn supergraph_vertex(g: &CombinatorialMap, faces: &FaceTable, v: VertexId, r_eps: u64) -> Rational {
    let deg = g.degree(v);
    let mut k = Rational::one() - rat(deg as i64, 2);
    for c in faces.corners_at(v) {
        k += effective_degree(faces, c.face, r_eps).reciprocal() * int(c.multiplicity as i64);
    }
    k
}

fn min_rational(a: Rational, b: Rational) -> Rational {
    a.min(b)
}

/// Mechanical check of (G1)-(G5) on the materialised region.
pub fn verify_properties(result: &EmbeddingResult, original: &CombinatorialMap, w: &[VertexId]) -> Result<EmbeddingReport> {
    let m = result.materialized_radius;
    let dist = distances_from(original, w);
    let keep: Vec<bool> = dist.iter().map(|d| d.is_some_and(|d| d <= m)).collect();
    let front: Vec<bool> = dist.iter().map(|d| *d == Some(m)).collect();
    let (base, table) = original.truncate(&keep, &front)?;
    let g = &result.supergraph;
    let corr = |v_base: VertexId| -> VertexId {
        let orig = table.iter().position(|&t| t == Some(v_base)).unwrap();
        result.correspondence[orig].unwrap()
    };
    let base_faces = trace_faces(&base);
    let g_faces = trace_faces(g);
    let eps = &result.epsilon;
    let r_eps = result.closing_parameter;
    let w_base: Vec<VertexId> = w.iter().map(|&v| table[v].unwrap()).collect();
    let w_img: Vec<VertexId> = w_base.iter().map(|&v| corr(v)).collect();

    // (G1)
    let mut g1 = PropertyCheck::new("G1");
    let ext = extended_edges(&base, &base_faces);
    for &v in &w_base {
        if base.is_frontier(v) {
            continue;
        }
        let infinigons = base
            .rotation(v)
            .iter()
            .filter(|&&h| base_faces.degree(base_faces.face_of(h)) == FaceDegree::Known(Degree::Infinite))
            .count();
        let k = vertex_curvature(&base, &base_faces, v)?;
        let expected = if infinigons == 0 || k.is_negative() { base.degree(v) } else { base.degree(v) + infinigons };
        let got = g.degree(corr(v));
        if got != expected {
            g1.fail(format!("vertex {}: degree {got}, expected {expected}", base.label(v)));
        }
        let corners_nonpositive = base_faces
            .corners_at(v)
            .all(|c| !corner_value(base.degree(v), base_faces.degree(c.face).known().unwrap()).is_positive());
        if corners_nonpositive {
            let inner = ext.iter().any(|e| {
                let p = &e.path;
                if e.closed {
                    p.contains(&v)
                } else {
                    p[1..p.len() - 1].contains(&v)
                }
            });
            if (got > base.degree(v)) != inner {
                g1.fail(format!("vertex {}: edges added = {}, inner extended-edge vertex = {inner}", base.label(v), got > base.degree(v)));
            }
        }
    }

    // (G2)
    let mut g2 = PropertyCheck::new("G2");
    for &a in &w_base {
        for &b in &w_base {
            if a < b && base.adjacent(a, b) != g.adjacent(corr(a), corr(b)) {
                g2.fail(format!("adjacency of {} and {} changed", base.label(a), base.label(b)));
            }
        }
    }
    let negative_on_w = w_base
        .iter()
        .all(|&v| !base.is_frontier(v) && vertex_curvature(&base, &base_faces, v).is_ok_and(|k| k.is_negative()));
    if negative_on_w {
        let b1: BTreeSet<VertexId> = w_base.iter().flat_map(|&v| base.neighbors(v).chain([v])).collect();
        let b1_img: BTreeSet<VertexId> = b1.iter().map(|&v| corr(v)).collect();
        let b1_g: BTreeSet<VertexId> = w_img.iter().flat_map(|&v| g.neighbors(v).chain([v])).collect();
        if b1_img != b1_g {
            g2.fail("B_1(W) gained or lost vertices".into());
        }
        for &a in &b1 {
            for &b in &b1 {
                if a < b && base.adjacent(a, b) != g.adjacent(corr(a), corr(b)) {
                    g2.fail(format!("adjacency in B_1(W) of {} and {} changed", base.label(a), base.label(b)));
                }
            }
        }
    }

    // (G3)
    let mut g3 = PropertyCheck::new("G3");
    for (i, &a) in w_base.iter().enumerate() {
        let da = distances_from(&base, &[a]);
        let dg = distances_from(g, &[w_img[i]]);
        for (j, &b) in w_base.iter().enumerate() {
            if da[b] != dg[w_img[j]] {
                g3.fail(format!("distance {}-{}: {:?} became {:?}", base.label(a), base.label(b), da[b], dg[w_img[j]]));
            }
        }
    }

    // (G4)
    let mut g4 = PropertyCheck::new("G4");
    let base_corner_sup = base_faces
        .corners()
        .iter()
        .filter(|c| !base.is_frontier(c.vertex))
        .filter_map(|c| base_faces.degree(c.face).known().map(|d| corner_value(base.degree(c.vertex), d)))
        .max();
    match base_corner_sup {
        Some(sup) if !sup.is_positive() => {
            let bound = min_rational(Rational::zero(), sup + eps);
            for (v, k) in supergraph_corners(g, &g_faces, r_eps) {
                if k > bound {
                    g4.fail(format!("corner at {} has curvature {k} > {bound}", g.label(v)));
                }
            }
        }
        _ => g4.applicable = false,
    }

    // (G5)
    let mut g5 = PropertyCheck::new("G5");
    let base_vertex_sup = base
        .vertices()
        .filter(|&v| !base.is_frontier(v))
        .filter_map(|v| vertex_curvature(&base, &base_faces, v).ok())
        .max();
    match base_vertex_sup {
        Some(sup) if !sup.is_positive() && *eps < rat(1, 1806) => {
            let bound = min_rational(Rational::zero(), sup + eps);
            for v in g.vertices().filter(|&v| !g.is_frontier(v)) {
                let k = supergraph_vertex(g, &g_faces, v, r_eps);
                if k > bound {
                    g5.fail(format!("vertex {} has curvature {k} > {bound}", g.label(v)));
                }
            }
        }
        _ => g5.applicable = false,
    }

    let floor = {
        let inv = (Rational::one() / eps).ceil().to_integer();
        inv.max(6.into()).to_usize().unwrap_or(usize::MAX)
    };
    let closed_faces_large = result.closed_faces.iter().all(|c| c.degree >= floor);
    let complete_faces_polygons = g_faces
        .complete_faces()
        .all(|f| g_faces.corners_of(f.id).all(|c| c.multiplicity == 1));

    Ok(EmbeddingReport { checks: vec![g1, g2, g3, g4, g5], closed_faces_large, complete_faces_polygons })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{line, pq_ball, regular_tree};

    #[test]
    fn closing_parameter_examples() {
        let t = regular_tree(3, 4).unwrap();
        assert_eq!(closing_parameter(&t, &[0], &int(1)).unwrap(), 6);
        assert_eq!(closing_parameter(&t, &[0], &int(5)).unwrap(), 6);
        let far: Vec<VertexId> = t.vertices().filter(|&v| distances_from(&t, &[0])[v] == Some(2)).collect();
        let path = vec![far[0], 1, 0, 2, far[far.len() - 1]];
        assert_eq!(diameter(&t, &path).unwrap(), 4);
        assert_eq!(closing_parameter(&t, &path, &rat(1, 10)).unwrap(), 50);
        assert!(closing_parameter(&t, &[], &int(1)).is_err());
    }

    #[test]
    fn tree_steps() {
        let t = regular_tree(3, 8).unwrap();
        let r = embed(&t, &[0], &int(1), 8).unwrap();
        assert!(r.added_trees.is_empty());
        assert!(!r.closed_faces.is_empty());
        assert!(r.closed_faces.iter().all(|c| c.degree >= 6));
        let rep = verify_properties(&r, &t, &[0]).unwrap();
        assert!(rep.complete_faces_polygons && rep.closed_faces_large);
        for c in &rep.checks[..4] {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn line_gets_two_trees_per_vertex() {
        let l = line(6).unwrap();
        let r = embed(&l, &[0], &int(1), 5).unwrap();
        assert_eq!(r.added_trees.len(), 9);
        assert!(r.added_trees.iter().all(|&(_, n)| n == 2));
        assert_eq!(r.supergraph.degree(r.correspondence[0].unwrap()), 4);
    }

    #[test]
    fn flat_lattice_is_untouched() {
        let g = pq_ball(4, 4, 5).unwrap();
        let r = embed(&g, &[0], &rat(1, 2), 4).unwrap();
        assert!(r.added_trees.is_empty() && r.closed_faces.is_empty());
        let rep = verify_properties(&r, &g, &[0]).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
    }

    #[test]
    fn positive_curvature_is_rejected() {
        let g = crate::generate::platonic(crate::generate::Platonic::Cube).unwrap();
        assert!(matches!(embed(&g, &[0], &int(1), 2), Err(Error::Precondition(_))));
    }
}
