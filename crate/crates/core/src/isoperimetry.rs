//! Cheeger constants: exhaustive search over small connected sets and the
//! lower bounds in terms of degrees and curvature.

use num_traits::{One, Signed};

use crate::ball::distances_from;
use crate::curvature::vertex_curvature;
use crate::error::{Error, Result};
use crate::faces::{trace_faces, FaceTable};
use crate::map::{CombinatorialMap, VertexId};
use crate::rational::{int, recip, Degree, FaceDegree, Rational};

/// Default cap on the number of connected sets visited by one search.
pub const DEFAULT_MAX_SETS: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureLowerBounds {
    pub p_sup: usize,
    pub q_sup: Degree,
    pub constant: Rational,
    pub sup_curvature: Rational,
    pub sup_curvature_per_degree: Rational,
    pub alpha: Rational,
    pub beta: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBounds {
    pub p: usize,
    pub q: Degree,
    pub alpha: Rational,
    pub beta: Rational,
    /// Bounds through the curvature constant `C`; `None` when the curvature
    /// is positive somewhere in the region or `C` is undefined.
    pub curvature: Option<CurvatureLowerBounds>,
}

#[derive(Debug, Clone)]
pub struct CheegerEstimate {
    pub alpha_upper: Option<Rational>,
    pub alpha_witness: Vec<VertexId>,
    pub beta_upper: Option<Rational>,
    pub beta_witness: Vec<VertexId>,
    pub lower: Option<LowerBounds>,
    pub max_size: usize,
    pub region: Vec<VertexId>,
    pub sets: u64,
}

impl CheegerEstimate {
    /// Whether the lower bounds stay below the best sets found.
    pub fn consistent(&self) -> bool {
        let Some(lb) = &self.lower else { return true };
        let ok = |lower: &Rational, upper: &Option<Rational>| upper.as_ref().is_none_or(|u| lower <= u);
        let mut fine = ok(&lb.alpha, &self.alpha_upper) && ok(&lb.beta, &self.beta_upper);
        if let Some(c) = &lb.curvature {
            fine &= ok(&c.alpha, &self.alpha_upper) && ok(&c.beta, &self.beta_upper);
        }
        fine
    }
}

fn region_mask(map: &CombinatorialMap, region: &[VertexId]) -> Result<Vec<bool>> {
    let mut mask = vec![false; map.num_vertices()];
    for &v in region {
        map.check_vertex(v)?;
        if map.is_frontier(v) {
            return Err(Error::Precondition(format!(
                "vertex {} lies on the frontier, its edges are not all known",
                map.label(v)
            )));
        }
        mask[v] = true;
    }
    Ok(mask)
}

/// Smallest degree among faces with a corner in the region.
fn min_face_degree(faces: &FaceTable, mask: &[bool]) -> Result<Degree> {
    let mut q = Degree::Infinite;
    for c in faces.corners() {
        if !mask[c.vertex] {
            continue;
        }
        match faces.degree(c.face) {
            FaceDegree::Known(d) => q = q.min(d),
            FaceDegree::Unknown => return Err(Error::UnknownFaceDegree { vertex: c.vertex }),
        }
    }
    Ok(q)
}

fn max_face_degree(faces: &FaceTable, mask: &[bool]) -> Result<Degree> {
    let mut q = Degree::Finite(0);
    for c in faces.corners() {
        if !mask[c.vertex] {
            continue;
        }
        match faces.degree(c.face) {
            FaceDegree::Known(d) => q = q.max(d),
            FaceDegree::Unknown => return Err(Error::UnknownFaceDegree { vertex: c.vertex }),
        }
    }
    Ok(q)
}

/// `(1 + 2/(Q-2)) (1 + 2/((P-2)(Q-2)-2))` with `1/inf = 1/(0*inf - 2) = 0`.
pub fn curvature_constant(p_sup: usize, q_sup: Degree) -> Option<Rational> {
    match q_sup {
        Degree::Infinite => Some(Rational::one()),
        Degree::Finite(q) if q > 2 => {
            let denom = (p_sup as i64 - 2) * (q as i64 - 2) - 2;
            if denom <= 0 {
                return None;
            }
            let first = Rational::one() + int(2) / int(q as i64 - 2);
            let second = Rational::one() + int(2) / int(denom);
            Some(first * second)
        }
        Degree::Finite(_) => None,
    }
}

/// Lower bounds for `α_U` and `β_U` from the smallest vertex and face degrees
/// in `region`, together with the curvature form when it applies.
pub fn cheeger_lower_bounds(map: &CombinatorialMap, faces: &FaceTable, region: &[VertexId]) -> Result<LowerBounds> {
    if region.is_empty() {
        return Err(Error::EmptySet);
    }
    let mask = region_mask(map, region)?;
    let p = region.iter().map(|&v| map.degree(v)).min().unwrap();
    if p == 0 {
        return Err(Error::Precondition("isolated vertex in the region".into()));
    }
    let q = min_face_degree(faces, &mask)?;
    let k = q
        .two_q_over_q_minus_2()
        .ok_or_else(|| Error::Precondition(format!("bounds undefined for faces of degree {q}")))?;
    let alpha = Rational::one() - recip(p as u64) * &k;
    let beta = int(p as i64) - &k;

    let curvature = (|| -> Result<Option<CurvatureLowerBounds>> {
        let p_sup = region.iter().map(|&v| map.degree(v)).max().unwrap();
        let q_sup = max_face_degree(faces, &mask)?;
        let mut sup: Option<Rational> = None;
        let mut sup_per: Option<Rational> = None;
        for &v in region {
            let kv = vertex_curvature(map, faces, v)?;
            let per = &kv / int(map.degree(v) as i64);
            sup = Some(sup.map_or(kv.clone(), |s| s.max(kv)));
            sup_per = Some(sup_per.map_or(per.clone(), |s| s.max(per)));
        }
        let (sup, sup_per) = (sup.unwrap(), sup_per.unwrap());
        if sup.is_positive() {
            return Ok(None);
        }
        let Some(c) = curvature_constant(p_sup, q_sup) else { return Ok(None) };
        let alpha = -int(2) * &c * &sup_per;
        let beta = -int(2) * &c * &sup;
        Ok(Some(CurvatureLowerBounds {
            p_sup,
            q_sup,
            constant: c,
            sup_curvature: sup,
            sup_curvature_per_degree: sup_per,
            alpha,
            beta,
        }))
    })()?;
    Ok(LowerBounds { p, q, alpha, beta, curvature })
}

/// Running state of a connected set during enumeration.
struct Subset<'a> {
    map: &'a CombinatorialMap,
    mask: &'a [bool],
    max_size: usize,
    max_sets: u64,
    members: Vec<VertexId>,
    in_set: Vec<bool>,
    /// Number of members equal or adjacent to each vertex.
    near: Vec<u32>,
    volume: u64,
    internal: u64,
    visited: u64,
}

impl<'a> Subset<'a> {
    fn new(map: &'a CombinatorialMap, mask: &'a [bool], max_size: usize, max_sets: u64) -> Self {
        let n = map.num_vertices();
        Subset {
            map,
            mask,
            max_size,
            max_sets,
            members: Vec::with_capacity(max_size),
            in_set: vec![false; n],
            near: vec![0; n],
            volume: 0,
            internal: 0,
            visited: 0,
        }
    }

    fn push(&mut self, w: VertexId) {
        let map = self.map;
        for &h in map.rotation(w) {
            let u = map.head(h);
            if self.in_set[u] || u == w {
                self.internal += if u == w { 1 } else { 2 };
            }
            self.near[u] += 1;
        }
        self.near[w] += 1;
        self.in_set[w] = true;
        self.members.push(w);
        self.volume += map.degree(w) as u64;
    }

    fn pop(&mut self) {
        let map = self.map;
        let w = self.members.pop().unwrap();
        self.in_set[w] = false;
        self.near[w] -= 1;
        for &h in map.rotation(w) {
            let u = map.head(h);
            if self.in_set[u] || u == w {
                self.internal -= if u == w { 1 } else { 2 };
            }
            self.near[u] -= 1;
        }
        self.volume -= map.degree(w) as u64;
    }

    fn boundary(&self) -> u64 {
        self.volume - self.internal
    }

    /// Enumerates every connected subset of the region whose smallest vertex
    /// is `anchor`, each exactly once.
    fn run(&mut self, anchor: VertexId, visit: &mut dyn FnMut(&Subset) -> Result<()>) -> Result<()> {
        self.push(anchor);
        let mut ext: Vec<VertexId> = self.map.neighbors(anchor).filter(|&u| u > anchor && self.mask[u]).collect();
        ext.sort_unstable();
        ext.dedup();
        let r = self.extend(anchor, ext, visit);
        self.pop();
        r
    }

    fn extend(&mut self, anchor: VertexId, mut ext: Vec<VertexId>, visit: &mut dyn FnMut(&Subset) -> Result<()>) -> Result<()> {
        self.visited += 1;
        if self.visited > self.max_sets {
            return Err(Error::TooLarge(format!("more than {} connected sets", self.max_sets)));
        }
        visit(self)?;
        if self.members.len() == self.max_size {
            return Ok(());
        }
        while let Some(w) = ext.pop() {
            // Neighbors of w that are neither members nor adjacent to one.
            let mut next = ext.clone();
            for u in self.map.neighbors(w) {
                if u > anchor && self.mask[u] && self.near[u] == 0 && !next.contains(&u) {
                    next.push(u);
                }
            }
            self.push(w);
            let r = self.extend(anchor, next, visit);
            self.pop();
            r?;
        }
        Ok(())
    }
}

/// Calls `visit` on every connected subset of `region` with at most
/// `max_size` vertices. The callback sees the members, `|∂_E W|` and `vol(W)`.
pub fn for_each_connected_subset(
    map: &CombinatorialMap,
    region: &[VertexId],
    max_size: usize,
    max_sets: u64,
    mut visit: impl FnMut(&[VertexId], u64, u64) -> Result<()>,
) -> Result<u64> {
    let mask = region_mask(map, region)?;
    let mut anchors = region.to_vec();
    anchors.sort_unstable();
    anchors.dedup();
    let mut state = Subset::new(map, &mask, max_size.max(1), max_sets);
    let mut cb = |s: &Subset| visit(&s.members, s.boundary(), s.volume);
    for a in anchors {
        state.run(a, &mut cb)?;
    }
    Ok(state.visited)
}

/// Minimises `|∂_E W| / vol(W)` and `|∂_E W| / |W|` over connected
/// `W ⊆ region` with `|W| <= max_size`.
pub fn cheeger_bruteforce(map: &CombinatorialMap, region: &[VertexId], max_size: usize, max_sets: u64) -> Result<CheegerEstimate> {
    let mut best_alpha: Option<(u64, u64, Vec<VertexId>)> = None;
    let mut best_beta: Option<(u64, u64, Vec<VertexId>)> = None;
    let sets = for_each_connected_subset(map, region, max_size, max_sets, |w, boundary, volume| {
        if volume > 0 && best_alpha.as_ref().is_none_or(|(b, v, _)| (boundary as u128) * (*v as u128) < (*b as u128) * (volume as u128)) {
            best_alpha = Some((boundary, volume, w.to_vec()));
        }
        let size = w.len() as u64;
        if best_beta.as_ref().is_none_or(|(b, s, _)| (boundary as u128) * (*s as u128) < (*b as u128) * (size as u128)) {
            best_beta = Some((boundary, size, w.to_vec()));
        }
        Ok(())
    })?;
    let faces = trace_faces(map);
    let lower = cheeger_lower_bounds(map, &faces, region).ok();
    let ratio = |b: u64, d: u64| Rational::new((b as i64).into(), (d as i64).into());
    let sorted = |mut w: Vec<VertexId>| {
        w.sort_unstable();
        w
    };
    let (alpha_upper, alpha_witness) = match best_alpha {
        Some((b, v, w)) => (Some(ratio(b, v)), sorted(w)),
        None => (None, Vec::new()),
    };
    let (beta_upper, beta_witness) = match best_beta {
        Some((b, s, w)) => (Some(ratio(b, s)), sorted(w)),
        None => (None, Vec::new()),
    };
    let mut region = region.to_vec();
    region.sort_unstable();
    Ok(CheegerEstimate { alpha_upper, alpha_witness, beta_upper, beta_witness, lower, max_size, region, sets })
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub q: Degree,
    pub checked: u64,
    /// Sets whose complement has more than two components.
    pub skipped: u64,
    pub violations: Vec<Vec<VertexId>>,
}

/// Checks `|∂_E W| >= vol(W) - 2q/(q-2) (|W| + c(W) - 2)` on connected
/// `W ⊆ region` with `|W| <= max_size` and `c(W) <= 2`. Components of the
/// complement that reach the frontier are counted once, as the exterior.
pub fn check_isoperimetric_inequality(
    map: &CombinatorialMap,
    v0: VertexId,
    region: &[VertexId],
    max_size: usize,
    max_sets: u64,
) -> Result<InequalityReport> {
    let faces = trace_faces(map);
    let mask = region_mask(map, region)?;
    let q = min_face_degree(&faces, &mask)?;
    // K = num / den
    let (num, den): (i128, i128) = match q {
        Degree::Infinite => (2, 1),
        Degree::Finite(q) if q > 2 => (2 * q as i128, q as i128 - 2),
        Degree::Finite(_) => return Err(Error::Precondition(format!("inequality undefined for faces of degree {q}"))),
    };
    let counter = ComplementCounter::new(map, v0);
    let mut scratch = vec![0u32; map.num_vertices()];
    let mut stamp = 0u32;
    let mut member = vec![false; map.num_vertices()];
    let mut report = InequalityReport { q, checked: 0, skipped: 0, violations: Vec::new() };
    for_each_connected_subset(map, region, max_size, max_sets, |w, boundary, volume| {
        for &v in w {
            member[v] = true;
        }
        let c = counter.count(w, &member, &mut scratch, &mut stamp);
        for &v in w {
            member[v] = false;
        }
        if c > 2 {
            report.skipped += 1;
            return Ok(());
        }
        report.checked += 1;
        let lhs = boundary as i128 * den;
        let rhs = volume as i128 * den - num * (w.len() as i128 + c as i128 - 2);
        if lhs < rhs {
            let mut w = w.to_vec();
            w.sort_unstable();
            report.violations.push(w);
        }
        Ok(())
    })?;
    Ok(report)
}

/// Counts components of the complement of a set, merging those that reach
/// the frontier.
struct ComplementCounter<'a> {
    map: &'a CombinatorialMap,
    dist: Vec<usize>,
    /// `outward[d]`: every non-frontier vertex at distance at least `d` has a
    /// neighbor farther from the root, so walking outward from there reaches
    /// the frontier without returning.
    outward: Vec<bool>,
}

impl<'a> ComplementCounter<'a> {
    fn new(map: &'a CombinatorialMap, v0: VertexId) -> Self {
        let dist: Vec<usize> = distances_from(map, &[v0]).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect();
        let maxd = dist.iter().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0);
        let mut dead_end = vec![false; maxd + 2];
        for v in map.vertices() {
            if dist[v] == usize::MAX || map.is_frontier(v) {
                continue;
            }
            if !map.neighbors(v).any(|w| dist[w] != usize::MAX && dist[w] > dist[v]) {
                dead_end[dist[v]] = true;
            }
        }
        let mut outward = vec![map.has_frontier(); maxd + 2];
        for d in (0..=maxd).rev() {
            outward[d] = outward[d + 1] && !dead_end[d];
        }
        ComplementCounter { map, dist, outward }
    }

    fn exterior_from(&self, v: VertexId, reach: usize) -> bool {
        self.map.is_frontier(v) || (self.dist[v] != usize::MAX && self.dist[v] > reach && self.outward[self.dist[v]])
    }

    fn count(&self, w: &[VertexId], member: &[bool], seen: &mut [u32], stamp: &mut u32) -> usize {
        *stamp += 1;
        let s = *stamp;
        let reach = w.iter().map(|&v| self.dist[v]).max().unwrap_or(0);
        let mut holes = 0;
        let mut exterior = false;
        let mut stack = Vec::new();
        for &x in w {
            for start in self.map.neighbors(x) {
                if member[start] || seen[start] == s {
                    continue;
                }
                seen[start] = s;
                stack.clear();
                stack.push(start);
                let mut escapes = false;
                // Exterior vertices end the search; components meeting only
                // through them are both exterior anyway.
                while let Some(v) = stack.pop() {
                    if self.exterior_from(v, reach) {
                        escapes = true;
                        continue;
                    }
                    for u in self.map.neighbors(v) {
                        if member[u] {
                            continue;
                        }
                        if seen[u] != s {
                            seen[u] = s;
                            stack.push(u);
                        } else if self.exterior_from(u, reach) {
                            escapes = true;
                        }
                    }
                }
                if escapes {
                    exterior = true;
                } else {
                    holes += 1;
                }
            }
        }
        holes + usize::from(exterior)
    }
}

/// `α_U` and `β_U` lower bounds on `U = {v : d(v0, v) >= r}` minus the
/// frontier, for each radius.
pub fn cheeger_at_infinity_proxy(map: &CombinatorialMap, v0: VertexId, radii: &[usize]) -> Result<Vec<(usize, LowerBounds)>> {
    map.check_vertex(v0)?;
    let faces = trace_faces(map);
    let dist = distances_from(map, &[v0]);
    radii
        .iter()
        .map(|&r| {
            let region: Vec<VertexId> =
                map.vertices().filter(|&v| !map.is_frontier(v) && dist[v].is_some_and(|d| d >= r)).collect();
            cheeger_lower_bounds(map, &faces, &region).map(|b| (r, b))
        })
        .collect()
}

/// Non-frontier vertices within distance `r` of `v0`.
pub fn interior_ball(map: &CombinatorialMap, v0: VertexId, r: usize) -> Vec<VertexId> {
    let dist = distances_from(map, &[v0]);
    map.vertices().filter(|&v| !map.is_frontier(v) && dist[v].is_some_and(|d| d <= r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{pq_ball, radial_tree, regular_tree};
    use crate::rational::rat;

    fn bounds(map: &CombinatorialMap, r: usize) -> LowerBounds {
        let faces = trace_faces(map);
        cheeger_lower_bounds(map, &faces, &interior_ball(map, 0, r)).unwrap()
    }

    #[test]
    fn tree_bounds_are_one_third_and_one() {
        let t = regular_tree(3, 6).unwrap();
        let b = bounds(&t, 4);
        assert_eq!((b.alpha.clone(), b.beta.clone()), (rat(1, 3), int(1)));
        let c = b.curvature.unwrap();
        assert_eq!(c.constant, int(1));
        assert_eq!((c.alpha, c.beta), (rat(1, 3), int(1)));
    }

    #[test]
    fn heptagonal_bounds() {
        let m = pq_ball(3, 7, 7).unwrap();
        let b = bounds(&m, 3);
        assert_eq!((b.p, b.q), (3, Degree::Finite(7)));
        assert_eq!(b.alpha, rat(1, 15));
        let c = b.curvature.unwrap();
        assert_eq!(c.constant, rat(7, 3));
        assert_eq!(c.sup_curvature, rat(-1, 14));
        assert_eq!(c.beta, rat(1, 3));
        assert_eq!(c.alpha, rat(1, 9));
    }

    #[test]
    fn square_grid_bound_is_zero() {
        let m = pq_ball(4, 4, 6).unwrap();
        assert_eq!(bounds(&m, 3).alpha, int(0));
    }

    #[test]
    fn tree_bruteforce_single_ball() {
        let t = regular_tree(3, 6).unwrap();
        let est = cheeger_bruteforce(&t, &interior_ball(&t, 0, 4), 8, DEFAULT_MAX_SETS).unwrap();
        // Subtrees with n vertices have boundary n + 2 and volume 3n.
        assert_eq!(est.alpha_upper, Some(rat(10, 24)));
        assert_eq!(est.beta_upper, Some(rat(10, 8)));
        assert!(est.consistent());
        let mut sizes = Vec::new();
        for_each_connected_subset(&t, &interior_ball(&t, 0, 1), 4, 1000, |w, b, v| {
            sizes.push((w.len(), b, v));
            Ok(())
        })
        .unwrap();
        assert!(sizes.contains(&(4, 6, 12)));
        assert_eq!(sizes.len(), 4 + 3 + 3 + 1);
    }

    #[test]
    fn subsets_enumerated_once() {
        let m = pq_ball(4, 4, 4).unwrap();
        let region = interior_ball(&m, 0, 2);
        let mut seen = std::collections::HashSet::new();
        for_each_connected_subset(&m, &region, 5, 1_000_000, |w, _, _| {
            let mut w = w.to_vec();
            w.sort_unstable();
            assert!(seen.insert(w));
            Ok(())
        })
        .unwrap();
        // Fixed polyominoes of size up to five restricted to a 13-cell diamond.
        assert!(seen.len() > 100);
    }

    #[test]
    fn inequality_holds_on_tilings() {
        for (p, q, r, k) in [(3, 7, 7, 6), (7, 3, 5, 5), (4, 4, 6, 6)] {
            let m = pq_ball(p, q, r).unwrap();
            let rep = check_isoperimetric_inequality(&m, 0, &interior_ball(&m, 0, 2), k, DEFAULT_MAX_SETS).unwrap();
            assert!(rep.violations.is_empty(), "{{{p},{q}}}: {:?}", rep.violations.first());
            assert!(rep.checked > 0);
        }
        let t = regular_tree(3, 7).unwrap();
        let rep = check_isoperimetric_inequality(&t, 0, &interior_ball(&t, 0, 3), 6, DEFAULT_MAX_SETS).unwrap();
        assert!(rep.violations.is_empty());
    }

    #[test]
    fn hole_is_counted() {
        // The ring around a vertex of the square grid leaves that vertex as a hole.
        let m = pq_ball(4, 4, 5).unwrap();
        let dist = distances_from(&m, &[0]);
        let counter = ComplementCounter::new(&m, 0);
        let ring: Vec<VertexId> = m
            .vertices()
            .filter(|&v| dist[v] == Some(1) || (dist[v] == Some(2) && m.neighbors(v).filter(|&u| dist[u] == Some(1)).count() == 2))
            .collect();
        assert_eq!(ring.len(), 8);
        let mut member = vec![false; m.num_vertices()];
        for &v in &ring {
            member[v] = true;
        }
        let (mut seen, mut stamp) = (vec![0; m.num_vertices()], 0);
        assert_eq!(counter.count(&ring, &member, &mut seen, &mut stamp), 2);
    }

    #[test]
    fn radial_tree_proxy_increases() {
        let t = radial_tree(|r| 3 + r, 7).unwrap();
        let seq = cheeger_at_infinity_proxy(&t, 0, &[0, 1, 2, 3, 4, 5, 6]).unwrap();
        for (r, b) in &seq {
            assert_eq!(b.alpha, Rational::one() - rat(2, 3 + *r as i64));
        }
    }
}
