//! Cut locus, admissibility of distance spheres, cyclic sphere enumeration
//! and growth of distance balls.

use std::collections::BTreeSet;

use num_traits::{One, Signed};

use crate::ball::{ball, BallDecomposition};
use crate::curvature::CurvatureReport;
use crate::error::{Error, Result};
use crate::faces::{trace_faces, FaceId, FaceTable};
use crate::map::{CombinatorialMap, HalfEdgeId, VertexId};
use crate::rational::{int, to_f64, Degree, FaceDegree, Rational};

/// Vertices within `horizon` of `v0` at which the distance to `v0` has a
/// local maximum.
pub fn cut_locus(map: &CombinatorialMap, v0: VertexId, horizon: usize) -> Result<Vec<VertexId>> {
    let b = ball(map, v0, horizon + 1).or_else(|e| match e {
        Error::NotFaithful { .. } if !map.has_frontier() => ball(map, v0, horizon),
        other => Err(other),
    })?;
    Ok(map
        .vertices()
        .filter(|&v| b.dist[v].is_some_and(|d| d <= horizon))
        .filter(|&v| {
            let d = b.dist[v].unwrap();
            map.neighbors(v).all(|w| b.dist[w].is_some_and(|dw| dw <= d))
        })
        .collect())
}

/// Ball data needed by the sphere queries: the decomposition and faces.
pub struct SphereContext<'a> {
    pub map: &'a CombinatorialMap,
    pub faces: FaceTable,
    pub ball: BallDecomposition,
}

impl<'a> SphereContext<'a> {
    /// Requires `B_{horizon}(v0)` to be faithful.
    pub fn new(map: &'a CombinatorialMap, v0: VertexId, horizon: usize) -> Result<Self> {
        let ball = ball(map, v0, horizon)?;
        Ok(SphereContext { map, faces: trace_faces(map), ball })
    }

    fn dist(&self, v: VertexId) -> Option<usize> {
        self.ball.dist[v]
    }

    fn in_ball(&self, v: VertexId, n: usize) -> bool {
        self.ball.in_ball(v, n)
    }

    /// Next half-edge after `h` in the rotation at its tail whose head lies
    /// in `B_n`.
    fn restricted_next(&self, h: HalfEdgeId, n: usize) -> HalfEdgeId {
        let v = self.map.tail(h);
        let rot = self.map.rotation(v);
        let i = self.map.slot(h);
        (1..=rot.len()).map(|k| rot[(i + k) % rot.len()]).find(|&g| self.in_ball(self.map.head(g), n)).unwrap()
    }

    /// Faces of the map lying in the rotation range `(from, to]` at a vertex.
    fn corner_range(&self, from: HalfEdgeId, to: HalfEdgeId) -> Vec<FaceId> {
        let v = self.map.tail(from);
        let rot = self.map.rotation(v);
        let i = self.map.slot(from);
        let mut out = Vec::new();
        for k in 1..=rot.len() {
            let g = rot[(i + k) % rot.len()];
            out.push(self.faces.face_of(g));
            if g == to {
                break;
            }
        }
        out
    }

    /// `|f ∩ B_n|` and `|f ∩ (V \ B_n)|` (`None` for infinitely many).
    pub fn split_counts(&self, f: FaceId, n: usize) -> (usize, Option<usize>) {
        let verts = self.faces.face_vertices(self.map, f);
        let inside = verts.iter().filter(|&&v| self.in_ball(v, n)).count();
        let face = self.faces.face(f);
        let outside = if face.complete {
            Some(verts.len() - inside)
        } else {
            match face.degree {
                FaceDegree::Known(Degree::Finite(q)) => Some((q as usize).saturating_sub(inside)),
                _ => None,
            }
        };
        (inside, outside)
    }

    fn is_boundary_face(&self, f: FaceId, n: usize) -> bool {
        let verts = self.faces.face_vertices(self.map, f);
        let inside = verts.iter().any(|&v| self.in_ball(v, n));
        let outside = verts.iter().any(|&v| !self.in_ball(v, n)) || !self.faces.face(f).complete;
        inside && outside
    }

    /// Boundary walks of `B_n`: for each face of the subgraph induced by
    /// `B_n` that touches the outside, the cyclic sequence of boundary faces
    /// of `B_n` met along it and the vertices of `S_n` in walk order.
    pub fn boundary_cycles(&self, n: usize) -> Vec<BoundaryCycle> {
        let map = self.map;
        if n == 0 {
            let v0 = self.ball.root;
            let faces = map.rotation(v0).iter().map(|&h| self.faces.face_of(h)).collect();
            return vec![self.finish_cycle(faces, vec![v0], n)];
        }
        let mut seen = vec![false; map.num_half_edges()];
        let mut out = Vec::new();
        for start in 0..map.num_half_edges() {
            if seen[start] || !self.in_ball(map.tail(start), n) || !self.in_ball(map.head(start), n) {
                continue;
            }
            let mut faces = Vec::new();
            let mut sphere = Vec::new();
            let mut h = start;
            loop {
                seen[h] = true;
                let v = map.tail(h);
                if self.dist(v) == Some(n) {
                    sphere.push(v);
                }
                let back = map.twin(h);
                let next = self.restricted_next(back, n);
                faces.extend(self.corner_range(back, next));
                h = next;
                if h == start {
                    break;
                }
            }
            let cycle = self.finish_cycle(faces, sphere, n);
            if !cycle.faces.is_empty() {
                out.push(cycle);
            }
        }
        out
    }

    fn finish_cycle(&self, faces: Vec<FaceId>, sphere: Vec<VertexId>, n: usize) -> BoundaryCycle {
        let faces = dedup_cyclic(faces.into_iter().filter(|&f| self.is_boundary_face(f, n)).collect());
        let mut order = Vec::new();
        for v in sphere {
            if !order.contains(&v) {
                order.push(v);
            }
        }
        BoundaryCycle { faces, sphere: order }
    }

    /// The outer boundary walk of `B_n`: the one meeting the most boundary
    /// faces.
    pub fn outer_cycle(&self, n: usize) -> Option<BoundaryCycle> {
        self.boundary_cycles(n).into_iter().max_by_key(|c| (c.faces.len(), c.sphere.len()))
    }

    /// Do `u` and `w` lie on a common boundary face of `B_n`?
    fn share_boundary_face(&self, u: VertexId, w: VertexId, n: usize) -> bool {
        let fu: BTreeSet<FaceId> = self.faces.corners_at(u).map(|c| c.face).collect();
        self.faces.corners_at(w).any(|c| fu.contains(&c.face) && self.is_boundary_face(c.face, n))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryCycle {
    pub faces: Vec<FaceId>,
    pub sphere: Vec<VertexId>,
}

fn dedup_cyclic(mut xs: Vec<FaceId>) -> Vec<FaceId> {
    xs.dedup();
    while xs.len() > 1 && xs.first() == xs.last() {
        xs.pop();
    }
    xs
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityViolation {
    pub property: u8,
    pub level: usize,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct AdmissibilityReport {
    pub horizon: usize,
    /// `passed[k]` for property `k + 1`.
    pub passed: [bool; 5],
    pub violations: Vec<AdmissibilityViolation>,
}

impl AdmissibilityReport {
    pub fn all_passed(&self) -> bool {
        self.passed.iter().all(|&p| p)
    }

    pub fn property(&self, k: u8) -> bool {
        self.passed[(k - 1) as usize]
    }
}

/// Checks properties (1)-(5) of distance spheres around `v0` for every
/// `n < horizon`. Needs `B_horizon(v0)` faithful.
pub fn check_admissibility(map: &CombinatorialMap, v0: VertexId, horizon: usize) -> Result<AdmissibilityReport> {
    let ctx = SphereContext::new(map, v0, horizon)?;
    let mut violations = Vec::new();
    let mut fail = |property: u8, level: usize, detail: String| {
        violations.push(AdmissibilityViolation { property, level, detail });
    };
    for n in 0..horizon {
        let s_n = ctx.ball.sphere(n);
        let s_next = ctx.ball.sphere(n + 1);
        let down = |w: VertexId| -> Vec<VertexId> { map.neighbors(w).filter(|&u| ctx.dist(u) == Some(n)).collect() };
        let up = |v: VertexId| -> BTreeSet<VertexId> { map.neighbors(v).filter(|&u| ctx.dist(u) == Some(n + 1)).collect() };

        for &v in s_n {
            if up(v).is_empty() {
                fail(1, n, format!("vertex {} has no neighbor in S_{}", map.label(v), n + 1));
            }
        }
        for &w in s_next {
            let d: BTreeSet<VertexId> = down(w).into_iter().collect();
            if d.len() > 2 {
                fail(2, n, format!("vertex {} has {} neighbors in S_{n}", map.label(w), d.len()));
            }
            let d: Vec<VertexId> = d.into_iter().collect();
            for i in 0..d.len() {
                for j in i + 1..d.len() {
                    for u in [d[i], d[j]] {
                        if up(u).iter().all(|&x| x == w) {
                            fail(3, n, format!(
                                "vertices {} and {} share {} but {} has no other neighbor in S_{}",
                                map.label(d[i]), map.label(d[j]), map.label(w), map.label(u), n + 1
                            ));
                        }
                    }
                }
            }
        }

        let cycles = ctx.boundary_cycles(n);
        for c in &cycles {
            let k2 = c.faces.len();
            if k2 >= 2 && k2 % 2 == 0 {
                for offset in 0..2 {
                    let hit = (0..k2 / 2).all(|j| {
                        let odd = c.faces[(2 * j + offset) % k2];
                        let even = c.faces[(2 * j + 1 + offset) % k2];
                        ctx.split_counts(odd, n).0 == 1 && ctx.split_counts(even, n).1 == Some(1)
                    });
                    if hit {
                        fail(4, n, format!("alternating boundary pattern around B_{n}"));
                    }
                }
            }
        }

        match enumerate_sphere(&ctx, n) {
            Ok(_) => {}
            Err(detail) => fail(5, n, detail),
        }
    }
    let mut passed = [true; 5];
    for v in &violations {
        passed[(v.property - 1) as usize] = false;
    }
    Ok(AdmissibilityReport { horizon, passed, violations })
}

/// A cyclic order of `S_n` in which neighbours share a boundary face of
/// `B_n`, read off the outer boundary walk.
fn enumerate_sphere(ctx: &SphereContext<'_>, n: usize) -> std::result::Result<Vec<VertexId>, String> {
    let sphere = ctx.ball.sphere(n);
    if sphere.len() == 1 {
        return Ok(sphere.to_vec());
    }
    let cycle = ctx.outer_cycle(n).ok_or_else(|| format!("B_{n} has no boundary walk"))?;
    let order = cycle.sphere;
    if order.len() != sphere.len() {
        return Err(format!("the boundary walk of B_{n} meets {} of {} sphere vertices", order.len(), sphere.len()));
    }
    for i in 0..order.len() {
        let (u, w) = (order[i], order[(i + 1) % order.len()]);
        if !ctx.share_boundary_face(u, w, n) {
            return Err(format!(
                "consecutive sphere vertices {} and {} share no boundary face",
                ctx.map.label(u),
                ctx.map.label(w)
            ));
        }
    }
    Ok(order)
}

/// Cyclic enumerations of `S_0..S_horizon`, each rotated so that its first
/// vertex is the first neighbour of the previous level's first vertex.
#[derive(Debug, Clone)]
pub struct SphereEnumeration {
    pub per_level: Vec<Vec<VertexId>>,
}

pub fn sphere_enumeration(map: &CombinatorialMap, v0: VertexId, horizon: usize) -> Result<SphereEnumeration> {
    let ctx = SphereContext::new(map, v0, horizon)?;
    let mut per_level: Vec<Vec<VertexId>> = Vec::with_capacity(horizon + 1);
    for n in 0..=horizon {
        let mut order = if n < horizon || !map.has_frontier() {
            enumerate_sphere(&ctx, n).map_err(Error::Precondition)?
        } else {
            // The last level may touch the frontier; use the walk order.
            ctx.outer_cycle(n).map(|c| c.sphere).unwrap_or_else(|| ctx.ball.sphere(n).to_vec())
        };
        if let Some(prev) = per_level.last() {
            let anchor = prev[0];
            let len = order.len();
            let adj = |i: usize| map.adjacent(anchor, order[i % len]);
            if let Some(i) = (0..len).find(|&i| adj(i) && !adj(i + len - 1)) {
                order.rotate_left(i);
            } else if let Some(i) = (0..len).find(|&i| adj(i)) {
                order.rotate_left(i);
            }
        }
        per_level.push(order);
    }
    Ok(SphereEnumeration { per_level })
}

#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub sphere_sizes: Vec<usize>,
    pub ball_sizes: Vec<usize>,
    pub vertex_curvature_sup: Rational,
    pub max_vertex_degree: usize,
    pub max_face_degree: Degree,
    /// `-2 κ_V(G) q/(q-1)`.
    pub lower_factor: Rational,
    /// Levels `n` with `|S_n| < factor |B_{n-1}|`.
    pub violations: Vec<usize>,
    /// `(1/N) log |S_N|`.
    pub mu_estimate: f64,
    /// `log(|S_N| / |S_{N-1}|)`.
    pub mu_ratio_estimate: f64,
    pub mu_bounds: (f64, f64),
}

impl GrowthReport {
    pub fn inequality_holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mu_within_bounds(&self) -> bool {
        let (lo, hi) = self.mu_bounds;
        self.mu_estimate >= lo - 1e-12 && self.mu_estimate <= hi + 1e-12
    }
}

pub fn growth_check(map: &CombinatorialMap, v0: VertexId, horizon: usize) -> Result<GrowthReport> {
    if horizon == 0 {
        return Err(Error::Precondition("horizon must be positive".into()));
    }
    if !map.is_simple() {
        return Err(Error::Precondition("growth bounds need a simple graph".into()));
    }
    let b = ball(map, v0, horizon)?;
    let faces = trace_faces(map);
    let report = CurvatureReport::compute(map, &faces);
    let sup = report
        .sup_vertex
        .clone()
        .ok_or_else(|| Error::Precondition("no vertex curvature available".into()))?;
    if !sup.is_negative() {
        return Err(Error::Precondition(format!("vertex curvature sup {sup} is not negative")));
    }
    if horizon >= 2 {
        let cut = cut_locus(map, v0, horizon - 1)?;
        if !cut.is_empty() {
            return Err(Error::Precondition(format!("cut locus is not empty ({} vertices)", cut.len())));
        }
    }
    let max_vertex_degree = map.vertices().filter(|&v| !map.is_frontier(v)).map(|v| map.degree(v)).max().unwrap_or(0);
    let max_face_degree = faces
        .faces()
        .iter()
        .filter_map(|f| f.degree.known())
        .max_by(|a, c| match (a, c) {
            (Degree::Infinite, Degree::Infinite) => std::cmp::Ordering::Equal,
            (Degree::Infinite, _) => std::cmp::Ordering::Greater,
            (_, Degree::Infinite) => std::cmp::Ordering::Less,
            (Degree::Finite(x), Degree::Finite(y)) => x.cmp(y),
        })
        .unwrap_or(Degree::Infinite);
    let ratio = max_face_degree.ratio_q_over_q_minus_1().unwrap_or_else(Rational::one);
    let lower_factor = int(-2) * &sup * ratio;
    let sphere_sizes = b.sphere_sizes();
    let ball_sizes: Vec<usize> = (0..=horizon).map(|k| b.ball_size(k)).collect();
    let violations = (1..=horizon)
        .filter(|&n| int(sphere_sizes[n] as i64) < &lower_factor * int(ball_sizes[n - 1] as i64))
        .collect();
    let s_n = sphere_sizes[horizon] as f64;
    let mu_estimate = s_n.ln() / horizon as f64;
    let mu_ratio_estimate = (s_n / sphere_sizes[horizon - 1] as f64).ln();
    let lo = (1.0 + to_f64(&lower_factor)).ln();
    let hi = (max_vertex_degree as f64 - 1.0).ln();
    Ok(GrowthReport {
        sphere_sizes,
        ball_sizes,
        vertex_curvature_sup: sup,
        max_vertex_degree,
        max_face_degree,
        lower_factor,
        violations,
        mu_estimate,
        mu_ratio_estimate,
        mu_bounds: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{platonic, pq_ball, regular_tree, Platonic};
    use crate::rational::rat;

    #[test]
    fn cube_cut_locus_is_antipode() {
        let m = platonic(Platonic::Cube).unwrap();
        for v in m.vertices() {
            let cut = cut_locus(&m, v, 3).unwrap();
            assert_eq!(cut.len(), 1);
            assert_eq!(crate::ball::distances_from(&m, &[v])[cut[0]], Some(3));
        }
    }

    #[test]
    fn no_cut_locus_in_nonpositive_examples() {
        assert!(cut_locus(&pq_ball(7, 3, 6).unwrap(), 0, 5).unwrap().is_empty());
        assert!(cut_locus(&regular_tree(3, 6).unwrap(), 0, 5).unwrap().is_empty());
        assert!(cut_locus(&pq_ball(7, 3, 5).unwrap(), 0, 5).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let r = check_admissibility(&pq_ball(7, 3, 7).unwrap(), 0, 6).unwrap();
        assert!(r.all_passed(), "{:?}", r.violations);
        let r = check_admissibility(&pq_ball(4, 4, 6).unwrap(), 0, 5).unwrap();
        assert!(r.all_passed(), "{:?}", r.violations);
        let octa = platonic(Platonic::Octahedron).unwrap();
        let r = check_admissibility(&octa, 0, 2).unwrap();
        assert!(!r.property(2));
    }

    #[test]
    fn sphere_enumeration_is_aligned() {
        let m = pq_ball(7, 3, 5).unwrap();
        let e = sphere_enumeration(&m, 0, 4).unwrap();
        assert_eq!(e.per_level.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 7, 21, 56, 147]);
        for n in 1..e.per_level.len() {
            assert!(m.adjacent(e.per_level[n - 1][0], e.per_level[n][0]));
        }
    }

    #[test]
    fn growth_examples() {
        let g = growth_check(&pq_ball(7, 3, 6).unwrap(), 0, 6).unwrap();
        assert_eq!(g.lower_factor, rat(1, 2));
        assert!(g.inequality_holds() && g.mu_within_bounds());
        let t = growth_check(&regular_tree(3, 6).unwrap(), 0, 6).unwrap();
        assert_eq!(t.lower_factor, int(1));
        for n in 1..=6 {
            assert_eq!(t.sphere_sizes[n], 3 << (n - 1));
            assert_eq!(t.ball_sizes[n - 1], (3 << (n - 1)) - 2);
        }
        assert!(t.inequality_holds());
        assert!((t.mu_ratio_estimate - 2f64.ln()).abs() < 1e-12);
    }
}
