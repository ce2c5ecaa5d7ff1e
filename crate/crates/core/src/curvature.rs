//! Exact corner, vertex and face curvature.
//!
//! The corner curvature of `(v, f)` is `1/|v| - 1/2 + 1/|f|` with
//! `1/|f| = 0` for infinite faces. Vertex and face curvature sum corner
//! curvature with multiplicity.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::faces::{Corner, FaceId, FaceTable};
use crate::map::{CombinatorialMap, VertexId};
use crate::rational::{int, rat, recip, Degree, FaceCurvature, FaceDegree, Rational};

/// `1/|v| - 1/2 + 1/|f|`.
pub fn corner_value(vertex_degree: usize, face_degree: Degree) -> Rational {
    recip(vertex_degree as u64) - rat(1, 2) + face_degree.reciprocal()
}

/// Vertex curvature from the vertex degree and the list of incident face
/// degrees, one entry per corner visit.
pub fn vertex_value(face_degrees: &[Degree]) -> Rational {
    let n = face_degrees.len();
    if n == 0 {
        return int(2);
    }
    let mut k = Rational::one() - rat(n as i64, 2);
    for d in face_degrees {
        k += d.reciprocal();
    }
    k
}

fn known_degree(faces: &FaceTable, f: FaceId, v: VertexId) -> Result<Degree> {
    faces.degree(f).known().ok_or(Error::UnknownFaceDegree { vertex: v })
}

fn require_interior(map: &CombinatorialMap, v: VertexId) -> Result<()> {
    map.check_vertex(v)?;
    if map.is_frontier(v) {
        return Err(Error::Precondition(format!(
            "vertex {} lies on the frontier; its rotation is not fully known",
            map.label(v)
        )));
    }
    Ok(())
}

pub fn corner_curvature(map: &CombinatorialMap, faces: &FaceTable, corner: &Corner) -> Result<Rational> {
    require_interior(map, corner.vertex)?;
    let d = known_degree(faces, corner.face, corner.vertex)?;
    Ok(corner_value(map.degree(corner.vertex), d))
}

/// `κ_V(v)`; an isolated vertex has curvature 2.
pub fn vertex_curvature(map: &CombinatorialMap, faces: &FaceTable, v: VertexId) -> Result<Rational> {
    require_interior(map, v)?;
    let deg = map.degree(v);
    if deg == 0 {
        return Ok(int(2));
    }
    let mut k = Rational::zero();
    for c in faces.corners_at(v) {
        let d = known_degree(faces, c.face, v)?;
        k += corner_value(deg, d) * int(c.multiplicity as i64);
    }
    Ok(k)
}

/// `κ_F(f)`. An incomplete face with infinite degree hint that meets a vertex
/// of degree at least 3 is reported as unbounded below.
pub fn face_curvature(map: &CombinatorialMap, faces: &FaceTable, f: FaceId) -> Result<FaceCurvature> {
    let face = faces.face(f);
    if !face.complete {
        match face.degree {
            FaceDegree::Known(Degree::Infinite) => {
                let heavy = faces
                    .face_vertices(map, f)
                    .into_iter()
                    .any(|v| map.is_frontier(v) || map.degree(v) >= 3);
                if heavy {
                    return Ok(FaceCurvature::UnboundedNegative);
                }
            }
            _ => {
                return Err(Error::Precondition(format!("face {f} is not fully materialised")));
            }
        }
    }
    let mut k = Rational::zero();
    for c in faces.corners_of(f) {
        let d = known_degree(faces, f, c.vertex)?;
        require_interior(map, c.vertex)?;
        k += corner_value(map.degree(c.vertex), d) * int(c.multiplicity as i64);
    }
    Ok(FaceCurvature::Value(k))
}

/// All curvature values that can be evaluated on the materialised region.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub corners: Vec<(Corner, Rational)>,
    pub vertices: BTreeMap<VertexId, Rational>,
    pub faces: BTreeMap<FaceId, FaceCurvature>,
    pub sup_corner: Option<Rational>,
    pub sup_vertex: Option<Rational>,
    pub sup_face: Option<FaceCurvature>,
}

fn face_curvature_cmp(a: &FaceCurvature, b: &FaceCurvature) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    match (a, b) {
        (FaceCurvature::UnboundedNegative, FaceCurvature::UnboundedNegative) => Equal,
        (FaceCurvature::UnboundedNegative, _) => Less,
        (_, FaceCurvature::UnboundedNegative) => Greater,
        (FaceCurvature::Value(x), FaceCurvature::Value(y)) => x.cmp(y),
    }
}

impl CurvatureReport {
    pub fn compute(map: &CombinatorialMap, faces: &FaceTable) -> Self {
        let corners: Vec<(Corner, Rational)> = faces
            .corners()
            .iter()
            .filter_map(|c| corner_curvature(map, faces, c).ok().map(|k| (*c, k)))
            .collect();
        let vertices: BTreeMap<VertexId, Rational> = map
            .vertices()
            .filter_map(|v| vertex_curvature(map, faces, v).ok().map(|k| (v, k)))
            .collect();
        let face_map: BTreeMap<FaceId, FaceCurvature> = (0..faces.len())
            .filter_map(|f| face_curvature(map, faces, f).ok().map(|k| (f, k)))
            .collect();
        let sup_corner = corners.iter().map(|(_, k)| k).max().cloned();
        let sup_vertex = vertices.values().max().cloned();
        let sup_face = face_map.values().max_by(|a, b| face_curvature_cmp(a, b)).cloned();
        CurvatureReport { corners, vertices, faces: face_map, sup_corner, sup_vertex, sup_face }
    }
}

/// `Σ_{v∈W} κ_V^{G_W}(v)` over the subgraph induced by `w`, which must be
/// connected.
pub fn gauss_bonnet(map: &CombinatorialMap, w: &[VertexId]) -> Result<Rational> {
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut keep = vec![false; map.num_vertices()];
    for &v in w {
        map.check_vertex(v)?;
        keep[v] = true;
    }
    let (sub, _) = map.induced_subgraph(&keep)?;
    let faces = crate::faces::trace_faces(&sub);
    let mut total = Rational::zero();
    for v in sub.vertices() {
        total += vertex_curvature(&sub, &faces, v)?;
    }
    Ok(total)
}

/// The gap below zero for negatively curved vertices: `-1/1806`.
pub fn higuchi_bound() -> Rational {
    rat(-1, 1806)
}

#[derive(Debug, Clone, PartialEq)]
pub enum HiguchiOutcome {
    /// Every evaluated vertex is negatively curved and the supremum respects
    /// the gap.
    Holds { sup: Rational },
    /// Vertices with curvature strictly between `-1/1806` and 0.
    Violated { sup: Rational, witnesses: Vec<VertexId> },
    /// Some vertex has non-negative curvature.
    NotApplicable { vertex: VertexId, curvature: Rational },
}

pub fn higuchi_gap(map: &CombinatorialMap, faces: &FaceTable) -> Result<HiguchiOutcome> {
    if !map.is_simple() {
        return Err(Error::Precondition("the gap check needs a simple map".into()));
    }
    let report = CurvatureReport::compute(map, faces);
    if let Some((&v, k)) = report.vertices.iter().find(|(_, k)| !k.is_negative()) {
        return Ok(HiguchiOutcome::NotApplicable { vertex: v, curvature: k.clone() });
    }
    let sup = report
        .sup_vertex
        .ok_or_else(|| Error::Precondition("no vertex curvature could be evaluated".into()))?;
    let bound = higuchi_bound();
    let witnesses: Vec<VertexId> = report
        .vertices
        .iter()
        .filter(|(_, k)| **k > bound)
        .map(|(&v, _)| v)
        .collect();
    if witnesses.is_empty() {
        Ok(HiguchiOutcome::Holds { sup })
    } else {
        Ok(HiguchiOutcome::Violated { sup, witnesses })
    }
}

/// Maximum negative vertex curvature over all degree vectors `(n; l_1..l_n)`
/// with `n <= max_n`, face degrees in `3..=max_l` or infinite, and every
/// maximiser (face degrees sorted ascending, infinity last).
#[derive(Debug, Clone)]
pub struct DegreeVectorMaximum {
    pub max: Rational,
    pub argmax: Vec<Vec<Degree>>,
    /// Complete vectors evaluated after pruning.
    pub visited: u64,
}

fn degree_values(max_l: u64) -> Vec<Degree> {
    (3..=max_l).map(Degree::Finite).chain([Degree::Infinite]).collect()
}

pub fn max_negative_vertex_curvature(max_n: usize, max_l: u64) -> Option<DegreeVectorMaximum> {
    let values = degree_values(max_l);
    let recips: Vec<Rational> = values.iter().map(|d| d.reciprocal()).collect();
    let mut best: Option<DegreeVectorMaximum> = None;
    let mut visited = 0;
    for n in 1..=max_n {
        let base = Rational::one() - rat(n as i64, 2);
        let mut stack = Vec::with_capacity(n);
        search(&values, &recips, n, 0, base, &mut stack, &mut best, &mut visited);
    }
    best.map(|b| DegreeVectorMaximum { visited, ..b })
}

fn search(
    values: &[Degree],
    recips: &[Rational],
    remaining: usize,
    from: usize,
    partial: Rational,
    stack: &mut Vec<usize>,
    best: &mut Option<DegreeVectorMaximum>,
    visited: &mut u64,
) {
    if remaining == 0 {
        *visited += 1;
        if !partial.is_negative() {
            return;
        }
        let vector = || stack.iter().map(|&i| values[i]).collect::<Vec<_>>();
        match best {
            Some(b) if partial < b.max => {}
            Some(b) if partial == b.max => b.argmax.push(vector()),
            _ => *best = Some(DegreeVectorMaximum { max: partial, argmax: vec![vector()], visited: 0 }),
        }
        return;
    }
    for i in from..values.len() {
        // Face degrees are taken in ascending order, so every later slot
        // contributes at most recips[i].
        let bound = &partial + &recips[i] * int(remaining as i64);
        if let Some(b) = best.as_ref() {
            if bound < b.max {
                break;
            }
        }
        stack.push(i);
        search(values, recips, remaining - 1, i, &partial + &recips[i], stack, best, visited);
        stack.pop();
    }
}

/// Maximum of `κ_V` over the vectors with `finite` face degrees in
/// `3..=max_l` (ascending) followed by `infinite` infinite faces, among those
/// accepted by `keep`. Returns the maximum and a maximiser.
pub fn max_vertex_curvature_with(
    finite: usize,
    infinite: usize,
    max_l: u64,
    keep: impl Fn(&[u64]) -> bool,
) -> Option<(Rational, Vec<u64>)> {
    let mut best: Option<(Rational, Vec<u64>)> = None;
    let mut ls = vec![3u64; finite];
    loop {
        if keep(&ls) {
            let mut degrees: Vec<Degree> = ls.iter().map(|&l| Degree::Finite(l)).collect();
            degrees.extend(std::iter::repeat_n(Degree::Infinite, infinite));
            let k = vertex_value(&degrees);
            if best.as_ref().is_none_or(|(b, _)| k > *b) {
                best = Some((k, ls.clone()));
            }
        }
        // Next non-decreasing tuple.
        let Some(pos) = (0..finite).rev().find(|&i| ls[i] < max_l) else { break };
        let next = ls[pos] + 1;
        for l in &mut ls[pos..] {
            *l = next;
        }
    }
    best
}
