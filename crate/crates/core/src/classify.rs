//! Degenerate faces and pairs, extended edges, and classification against the
//! tessellation axioms.
//!
//! On a truncated map only the part strictly inside the frontier is
//! certified: with `N` the distance from the root to the nearest frontier
//! vertex, every check is restricted to features meeting `B_{N-1}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{Signed, Zero};

use crate::ball::{distances_from, frontier_distance};
use crate::curvature::CurvatureReport;
use crate::error::{Error, Result};
use crate::faces::{FaceId, FaceTable};
use crate::map::{CombinatorialMap, HalfEdgeId, VertexId};
use crate::rational::{Degree, FaceCurvature, FaceDegree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Class {
    Tessellating,
    StrictlyLocallyTessellating,
    LocallyTessellating,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedEdge {
    /// Vertex sequence; for a closed cycle of degree-two vertices the first
    /// vertex is not repeated.
    pub path: Vec<VertexId>,
    pub regular: bool,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DegenerateFace(FaceId),
    DegeneratePair(FaceId, FaceId),
    NonRegularExtendedEdge(ExtendedEdge),
    TerminalVertex(VertexId),
    Loop(HalfEdgeId),
    MultiEdge(VertexId, VertexId),
    /// Both sides of the edge lie in the same face.
    EdgeInOneFace(HalfEdgeId),
    /// The two faces share more than a vertex or an edge.
    LongIntersection(FaceId, FaceId),
    /// A face that is neither a polygon nor an infinigon.
    NotPolygonal(FaceId),
}

#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub class: Class,
    pub witnesses: Vec<Violation>,
    /// `Some(N - 1)` on truncated maps, `None` when the whole map is known.
    pub certified_radius: Option<usize>,
    pub extended_edges: Vec<ExtendedEdge>,
    pub has_infinite_faces: bool,
}

impl ClassificationResult {
    pub fn is_locally_tessellating(&self) -> bool {
        self.class <= Class::LocallyTessellating
    }

    pub fn is_strictly_locally_tessellating(&self) -> bool {
        self.class <= Class::StrictlyLocallyTessellating
    }

    pub fn is_tessellating(&self) -> bool {
        self.class == Class::Tessellating
    }
}

/// Vertices whose whole neighbourhood of features is known.
#[derive(Debug, Clone)]
pub struct Certified {
    pub mask: Vec<bool>,
    pub radius: Option<usize>,
}

pub fn certified_region(map: &CombinatorialMap, root: VertexId) -> Result<Certified> {
    map.check_vertex(root)?;
    if !map.has_frontier() {
        return Ok(Certified { mask: vec![true; map.num_vertices()], radius: None });
    }
    let dist = distances_from(map, &[root]);
    let n = frontier_distance(map, &dist).unwrap_or(0);
    if n < 2 {
        return Err(Error::Precondition(format!("undecided at radius {n}: the frontier is too close to the root")));
    }
    let mask = dist.iter().map(|d| d.is_some_and(|d| d < n)).collect();
    Ok(Certified { mask, radius: Some(n - 1) })
}

fn edge_key(map: &CombinatorialMap, h: HalfEdgeId) -> HalfEdgeId {
    h.min(map.twin(h))
}

pub fn degenerate_faces(faces: &FaceTable) -> Vec<FaceId> {
    (0..faces.len()).filter(|&f| faces.corners_of(f).any(|c| c.multiplicity >= 2)).collect()
}

/// Face pairs whose intersection (shared vertices and shared edges) has at
/// least two connected components.
pub fn degenerate_pairs(map: &CombinatorialMap, faces: &FaceTable) -> Vec<(FaceId, FaceId)> {
    pair_intersections(map, faces, None)
        .into_iter()
        .filter(|(_, x)| x.components >= 2)
        .map(|(p, _)| p)
        .collect()
}

#[derive(Debug, Clone, Default)]
struct Intersection {
    vertices: Vec<VertexId>,
    edges: Vec<HalfEdgeId>,
    components: usize,
}

fn face_edges(map: &CombinatorialMap, faces: &FaceTable, f: FaceId) -> BTreeSet<HalfEdgeId> {
    faces.face(f).walk.iter().map(|&h| edge_key(map, h)).collect()
}

/// Intersections of every pair of distinct faces sharing a vertex. With a
/// certified mask only components meeting it are counted.
fn pair_intersections(
    map: &CombinatorialMap,
    faces: &FaceTable,
    certified: Option<&[bool]>,
) -> BTreeMap<(FaceId, FaceId), Intersection> {
    let verts: Vec<BTreeSet<VertexId>> =
        (0..faces.len()).map(|f| faces.face_vertices(map, f).into_iter().collect()).collect();
    let edges: Vec<BTreeSet<HalfEdgeId>> = (0..faces.len()).map(|f| face_edges(map, faces, f)).collect();
    let mut faces_at: Vec<BTreeSet<FaceId>> = vec![BTreeSet::new(); map.num_vertices()];
    for (f, vs) in verts.iter().enumerate() {
        for &v in vs {
            faces_at[v].insert(f);
        }
    }
    let mut pairs = BTreeSet::new();
    for (v, fs) in faces_at.iter().enumerate() {
        if certified.is_some_and(|c| !c[v]) {
            continue;
        }
        let fs: Vec<FaceId> = fs.iter().copied().collect();
        for i in 0..fs.len() {
            for j in i + 1..fs.len() {
                pairs.insert((fs[i], fs[j]));
            }
        }
    }
    let mut out = BTreeMap::new();
    for (f, g) in pairs {
        let shared_v: Vec<VertexId> = verts[f].intersection(&verts[g]).copied().collect();
        let shared_e: Vec<HalfEdgeId> = edges[f].intersection(&edges[g]).copied().collect();
        let index: HashMap<VertexId, usize> = shared_v.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..shared_v.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &e in &shared_e {
            let (a, b) = (index[&map.tail(e)], index[&map.head(e)]);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut roots = BTreeSet::new();
        for (i, &v) in shared_v.iter().enumerate() {
            if certified.is_none_or(|c| c[v]) {
                roots.insert(find(&mut parent, i));
            }
        }
        out.insert((f, g), Intersection { vertices: shared_v, edges: shared_e, components: roots.len() });
    }
    out
}

/// Maximal paths of at least two edges whose inner vertices all have degree
/// two. Paths running into the frontier are cut there.
pub fn extended_edges(map: &CombinatorialMap, faces: &FaceTable) -> Vec<ExtendedEdge> {
    let inner = |v: VertexId| !map.is_frontier(v) && map.degree(v) == 2 && !map.rotation(v).iter().any(|&h| map.is_loop(h));
    let mut seen = vec![false; map.num_vertices()];
    let mut out = Vec::new();
    for start in map.vertices() {
        if seen[start] || !inner(start) {
            continue;
        }
        // Walk both ways from `start` through inner vertices.
        let mut sides: Vec<Vec<VertexId>> = Vec::new();
        let mut closed = false;
        for &first in map.rotation(start) {
            let mut side = Vec::new();
            let mut prev_h = first;
            loop {
                let w = map.head(prev_h);
                if w == start {
                    closed = true;
                    break;
                }
                side.push(w);
                if !inner(w) {
                    break;
                }
                let back = map.twin(prev_h);
                prev_h = *map.rotation(w).iter().find(|&&h| h != back).unwrap();
            }
            sides.push(side);
            if closed {
                break;
            }
        }
        let path: Vec<VertexId> = if closed {
            let mut p = vec![start];
            p.extend(sides[0].iter().copied());
            p
        } else {
            let mut p: Vec<VertexId> = sides[1].iter().rev().copied().collect();
            p.push(start);
            p.extend(sides[0].iter().copied());
            p
        };
        for &v in &path {
            if inner(v) {
                seen[v] = true;
            }
        }
        let h = map.rotation(start)[0];
        let infinite = |f: FaceId| faces.degree(f) == FaceDegree::Known(Degree::Infinite);
        let regular = infinite(faces.face_of(h)) && infinite(faces.face_of(map.twin(h)));
        out.push(ExtendedEdge { path, regular, closed });
    }
    out
}

/// Checks (T1), (T2)/(T2*) and (T3)/(T3*) on the certified region around
/// `root`.
pub fn classify(map: &CombinatorialMap, faces: &FaceTable, root: VertexId) -> Result<ClassificationResult> {
    let cert = certified_region(map, root)?;
    let c = &cert.mask;
    let mut witnesses = Vec::new();

    for h in 0..map.num_half_edges() {
        if h > map.twin(h) || !(c[map.tail(h)] || c[map.head(h)]) {
            continue;
        }
        if map.is_loop(h) {
            witnesses.push(Violation::Loop(h));
        } else if faces.face_of(h) == faces.face_of(map.twin(h)) && c[map.tail(h)] && c[map.head(h)] {
            witnesses.push(Violation::EdgeInOneFace(h));
        }
    }
    for v in map.vertices().filter(|&v| c[v]) {
        let mut seen = BTreeSet::new();
        for w in map.neighbors(v) {
            if w != v && !seen.insert(w) && v < w {
                witnesses.push(Violation::MultiEdge(v, w));
            }
        }
        if map.degree(v) == 1 {
            witnesses.push(Violation::TerminalVertex(v));
        }
    }
    for f in degenerate_faces(faces) {
        if faces.corners_of(f).any(|k| k.multiplicity >= 2 && c[k.vertex]) {
            witnesses.push(Violation::DegenerateFace(f));
            witnesses.push(Violation::NotPolygonal(f));
        }
    }

    let ext: Vec<ExtendedEdge> = extended_edges(map, faces)
        .into_iter()
        .filter(|e| e.path.iter().any(|&v| c[v]))
        .collect();
    for e in ext.iter().filter(|e| !e.regular) {
        witnesses.push(Violation::NonRegularExtendedEdge(e.clone()));
    }

    let mut t2_fails = false;
    for ((f, g), x) in pair_intersections(map, faces, Some(c)) {
        if x.components >= 2 {
            witnesses.push(Violation::DegeneratePair(f, g));
        } else if x.components == 1 && x.edges.len() >= 2 {
            t2_fails = true;
            let on_regular = x.vertices.iter().all(|v| ext.iter().any(|e| e.regular && e.path.contains(v)));
            if !on_regular {
                witnesses.push(Violation::LongIntersection(f, g));
            }
        }
    }

    let has_infinite_faces = (0..faces.len()).any(|f| {
        faces.degree(f) == FaceDegree::Known(Degree::Infinite) && faces.face_vertices(map, f).iter().any(|&v| c[v])
    });
    if (0..faces.len()).any(|f| faces.degree(f) == FaceDegree::Unknown && faces.face_vertices(map, f).iter().any(|&v| c[v])) {
        return Err(Error::Precondition("face degrees near the root are unknown".into()));
    }

    let class = if !witnesses.is_empty() {
        Class::Other
    } else if t2_fails {
        Class::LocallyTessellating
    } else if has_infinite_faces {
        Class::StrictlyLocallyTessellating
    } else {
        Class::Tessellating
    };
    Ok(ClassificationResult { class, witnesses, certified_radius: cert.radius, extended_edges: ext, has_infinite_faces })
}

/// The faces in a degenerate face or a degenerate pair.
pub fn degenerate_face_set(map: &CombinatorialMap, faces: &FaceTable) -> BTreeSet<FaceId> {
    let mut out: BTreeSet<FaceId> = degenerate_faces(faces).into_iter().collect();
    for (f, g) in degenerate_pairs(map, faces) {
        out.insert(f);
        out.insert(g);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureMode {
    Corner,
    Vertex,
    Face,
}

/// Consequences of non-positive curvature that can be checked directly.
#[derive(Debug, Clone)]
pub struct SideConditions {
    pub mode: CurvatureMode,
    /// The curvature sign condition holds on the evaluated region.
    pub nonpositive: bool,
    pub negative: bool,
    /// Where the sign condition fails: the offending vertex (or a vertex of
    /// the offending face or corner).
    pub positive_at: Vec<VertexId>,
    pub simple: bool,
    pub terminal_vertices: Vec<VertexId>,
    pub irregular_extended_edges: Vec<ExtendedEdge>,
    pub extended_edges: Vec<ExtendedEdge>,
}

impl SideConditions {
    /// The implications expected from the sign condition are all satisfied
    /// (vacuously when it fails).
    pub fn consistent(&self) -> bool {
        if !self.nonpositive {
            return true;
        }
        let mut ok = true;
        if self.mode == CurvatureMode::Corner || self.mode == CurvatureMode::Face {
            ok &= self.simple;
        }
        if self.mode != CurvatureMode::Face {
            ok &= self.terminal_vertices.is_empty() && self.irregular_extended_edges.is_empty();
            if self.negative {
                ok &= self.extended_edges.is_empty();
            }
        }
        ok
    }
}

pub fn nonpositive_side_conditions(
    map: &CombinatorialMap,
    faces: &FaceTable,
    mode: CurvatureMode,
) -> SideConditions {
    let report = CurvatureReport::compute(map, faces);
    let mut positive_at = Vec::new();
    let mut negative = true;
    match mode {
        CurvatureMode::Corner => {
            for (corner, k) in &report.corners {
                if k.is_positive() {
                    positive_at.push(corner.vertex);
                }
                negative &= k.is_negative();
            }
        }
        CurvatureMode::Vertex => {
            for (&v, k) in &report.vertices {
                if k.is_positive() {
                    positive_at.push(v);
                }
                negative &= k.is_negative();
            }
        }
        CurvatureMode::Face => {
            for (&f, k) in &report.faces {
                if let FaceCurvature::Value(k) = k {
                    if k.is_positive() {
                        positive_at.extend(faces.face_vertices(map, f).first());
                    }
                    negative &= !k.is_zero() && k.is_negative();
                }
            }
        }
    }
    positive_at.sort_unstable();
    positive_at.dedup();
    let ext = extended_edges(map, faces);
    SideConditions {
        mode,
        nonpositive: positive_at.is_empty(),
        negative,
        positive_at,
        simple: map.is_simple(),
        terminal_vertices: map.vertices().filter(|&v| !map.is_frontier(v) && map.degree(v) == 1).collect(),
        irregular_extended_edges: ext.iter().filter(|e| !e.regular).cloned().collect(),
        extended_edges: ext,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faces::trace_faces;
    use crate::generate::{line, platonic, pq_ball, regular_tree, Platonic};
    use crate::io::parse_map;
    use crate::map::tests::path3;

    #[test]
    fn path_face_is_degenerate() {
        let m = path3();
        assert_eq!(degenerate_faces(&trace_faces(&m)), vec![0]);
    }

    #[test]
    fn cube_has_no_degeneracy() {
        let m = platonic(Platonic::Cube).unwrap();
        let t = trace_faces(&m);
        assert!(degenerate_faces(&t).is_empty());
        assert!(degenerate_pairs(&m, &t).is_empty());
        assert_eq!(classify(&m, &t, 0).unwrap().class, Class::Tessellating);
    }

    #[test]
    fn parallel_edges() {
        // Three parallel edges: every two of the three 2-gons share one edge.
        let three = parse_map("h 0 0 1\nh 2 0 3\nh 4 0 5\nh 1 1 0\nh 5 1 4\nh 3 1 2\n").unwrap();
        let t = trace_faces(&three);
        assert_eq!(t.len(), 3);
        assert!(degenerate_pairs(&three, &t).is_empty());
        // Four parallel edges: opposite 2-gons meet only in the two endpoints.
        let four = parse_map("h 0 0 1\nh 2 0 3\nh 4 0 5\nh 6 0 7\nh 1 1 0\nh 7 1 6\nh 5 1 4\nh 3 1 2\n").unwrap();
        let t = trace_faces(&four);
        assert_eq!(t.len(), 4);
        assert_eq!(degenerate_pairs(&four, &t).len(), 2);
    }

    #[test]
    fn square_with_chord() {
        let m = parse_map("v 0: 1 2 3\nv 1: 2 0\nv 2: 3 0 1\nv 3: 0 2\n").unwrap();
        let t = trace_faces(&m);
        assert!(degenerate_pairs(&m, &t).is_empty());
    }

    #[test]
    fn example_classes() {
        let m = pq_ball(7, 3, 4).unwrap();
        let r = classify(&m, &trace_faces(&m), 0).unwrap();
        assert!(r.is_strictly_locally_tessellating());
        assert_eq!(r.certified_radius, Some(3));

        let m = regular_tree(3, 4).unwrap();
        let r = classify(&m, &trace_faces(&m), 0).unwrap();
        assert_eq!(r.class, Class::StrictlyLocallyTessellating);

        let m = line(5).unwrap();
        let r = classify(&m, &trace_faces(&m), 0).unwrap();
        assert_eq!(r.class, Class::LocallyTessellating);
        assert!(!r.is_strictly_locally_tessellating());
    }

    #[test]
    fn side_conditions() {
        let m = pq_ball(4, 4, 3).unwrap();
        let s = nonpositive_side_conditions(&m, &trace_faces(&m), CurvatureMode::Corner);
        assert!(s.nonpositive && s.simple && s.terminal_vertices.is_empty() && s.consistent());

        let m = pq_ball(7, 3, 3).unwrap();
        let s = nonpositive_side_conditions(&m, &trace_faces(&m), CurvatureMode::Corner);
        assert!(s.negative && s.extended_edges.is_empty());

        let m = path3();
        let t = trace_faces(&m);
        let s = nonpositive_side_conditions(&m, &t, CurvatureMode::Vertex);
        assert!(!s.nonpositive && s.positive_at.contains(&0) && s.consistent());
    }
}
