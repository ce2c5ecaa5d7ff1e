//! Generators for faithful balls of standard infinite planar graphs and for a
//! few small closed examples.
//!
//! `{p,q}` balls (vertex degree `p`, face degree `q`) are grown by face
//! completion: vertices are completed in BFS order, and every open corner of
//! the vertex being completed is closed into a `q`-gon, reusing the part of
//! the face that is already present. Vertex ids follow BFS discovery order.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::ball::distances_from;
use crate::error::{Error, Result};
use crate::map::{CombinatorialMap, HalfEdge, HalfEdgeId, VertexId};
use crate::rational::Degree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Platonic {
    Tetrahedron,
    Cube,
    Octahedron,
    Dodecahedron,
    Icosahedron,
}

impl Platonic {
    /// (vertex degree, face degree)
    pub fn degrees(self) -> (usize, usize) {
        match self {
            Platonic::Tetrahedron => (3, 3),
            Platonic::Cube => (3, 4),
            Platonic::Octahedron => (4, 3),
            Platonic::Dodecahedron => (3, 5),
            Platonic::Icosahedron => (5, 3),
        }
    }
}

impl FromStr for Platonic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "tetra" | "tetrahedron" => Platonic::Tetrahedron,
            "cube" | "hexahedron" => Platonic::Cube,
            "octa" | "octahedron" => Platonic::Octahedron,
            "dodeca" | "dodecahedron" => Platonic::Dodecahedron,
            "icosa" | "icosahedron" => Platonic::Icosahedron,
            other => return Err(Error::Unsupported(format!("unknown solid '{other}'"))),
        })
    }
}

/// What to generate. `radius` is carried separately by [`GeneratorSpec`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Ball of the tiling with vertex degree `p` and face degree `q`.
    Pq { p: usize, q: usize },
    /// `p`-regular tree.
    RegularTree { p: usize },
    /// Tree whose vertices at distance `r` from the root have degree `base + r`.
    RadialTree { base: usize },
    /// The line graph over the integers.
    Line,
    PlatonicSolid(Platonic),
    /// Octahedron with pendant rays of length `radius` at both hubs.
    OctahedronHub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub radius: usize,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, radius: usize) -> Self {
        GeneratorSpec { kind, radius }
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    /// `pq:P,Q`, `tree:P`, `radtree[:BASE]`, `line`, `platonic:NAME` (or the
    /// bare solid name), `octahub`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let nums = |a: Option<&str>| -> Result<Vec<usize>> {
            a.unwrap_or("")
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Unsupported(format!("bad number '{t}'"))))
                .collect()
        };
        match head {
            "pq" => match nums(args)?.as_slice() {
                &[p, q] => Ok(GeneratorKind::Pq { p, q }),
                _ => Err(Error::Unsupported("expected pq:P,Q".into())),
            },
            "tree" => match nums(args)?.as_slice() {
                &[p] => Ok(GeneratorKind::RegularTree { p }),
                _ => Err(Error::Unsupported("expected tree:P".into())),
            },
            "radtree" => match nums(args)?.as_slice() {
                [] => Ok(GeneratorKind::RadialTree { base: 3 }),
                &[b] => Ok(GeneratorKind::RadialTree { base: b }),
                _ => Err(Error::Unsupported("expected radtree[:BASE]".into())),
            },
            "line" => Ok(GeneratorKind::Line),
            "octahub" => Ok(GeneratorKind::OctahedronHub),
            "platonic" => Ok(GeneratorKind::PlatonicSolid(args.unwrap_or("").parse()?)),
            other => Ok(GeneratorKind::PlatonicSolid(other.parse().map_err(|_| {
                Error::Unsupported(format!("unknown generator '{s}'"))
            })?)),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::Pq { p, q } => write!(f, "pq:{p},{q}"),
            GeneratorKind::RegularTree { p } => write!(f, "tree:{p}"),
            GeneratorKind::RadialTree { base } => write!(f, "radtree:{base}"),
            GeneratorKind::Line => f.write_str("line"),
            GeneratorKind::PlatonicSolid(s) => write!(f, "platonic:{s:?}"),
            GeneratorKind::OctahedronHub => f.write_str("octahub"),
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<CombinatorialMap> {
    if spec.radius < 1 && !matches!(spec.kind, GeneratorKind::PlatonicSolid(_)) {
        return Err(Error::Unsupported("radius must be at least 1".into()));
    }
    match spec.kind {
        GeneratorKind::Pq { p, q } => pq_ball(p, q, spec.radius),
        GeneratorKind::RegularTree { p } => regular_tree(p, spec.radius),
        GeneratorKind::RadialTree { base } => radial_tree(|r| base + r, spec.radius),
        GeneratorKind::Line => line(spec.radius),
        GeneratorKind::PlatonicSolid(s) => platonic(s),
        GeneratorKind::OctahedronHub => octahedron_hub(spec.radius),
    }
}

/// Ball of radius `radius` around a vertex of the `{p,q}` tiling.
pub fn pq_ball(p: usize, q: usize, radius: usize) -> Result<CombinatorialMap> {
    if p < 3 || q < 3 {
        return Err(Error::Unsupported(format!("{{{p},{q}}} needs p, q >= 3")));
    }
    if radius < 1 {
        return Err(Error::Unsupported("radius must be at least 1".into()));
    }
    let mut b = FaceBuilder::new(p, q);
    let closed = b.grow(Some(radius))?;
    let map = b.into_map(Some(Degree::Finite(q as u64)))?;
    if closed {
        return renumber_bfs(&map, 0);
    }
    let dist = distances_from(&map, &[0]);
    let keep: Vec<bool> = dist.iter().map(|d| d.is_some_and(|d| d <= radius)).collect();
    let frontier: Vec<bool> = dist.iter().map(|d| *d == Some(radius)).collect();
    let (ball, table) = map.truncate(&keep, &frontier)?;
    renumber_bfs(&ball, table[0].unwrap())
}

pub fn platonic(solid: Platonic) -> Result<CombinatorialMap> {
    let (p, q) = solid.degrees();
    let mut b = FaceBuilder::new(p, q);
    if !b.grow(None)? {
        return Err(Error::Construction("surface did not close".into()));
    }
    let map = b.into_map(None)?;
    renumber_bfs(&map, 0)
}

pub fn regular_tree(p: usize, radius: usize) -> Result<CombinatorialMap> {
    if p < 2 {
        return Err(Error::Unsupported("tree degree must be at least 2".into()));
    }
    radial_tree(|_| p, radius)
}

/// Spherically symmetric tree: the root has `degree_at(0)` children and every
/// vertex at distance `r >= 1` has degree `degree_at(r)`. Leaves at distance
/// `radius` are frontier; faces are infinigons.
pub fn radial_tree(degree_at: impl Fn(usize) -> usize, radius: usize) -> Result<CombinatorialMap> {
    let mut neighbors: Vec<Vec<VertexId>> = vec![Vec::new()];
    let mut depth = vec![0usize];
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let r = depth[v];
        if r == radius {
            continue;
        }
        let deg = degree_at(r);
        let children = if r == 0 { deg } else { deg.saturating_sub(1) };
        if children == 0 {
            return Err(Error::Unsupported(format!("degree {deg} at radius {r} leaves no children")));
        }
        for _ in 0..children {
            let c = neighbors.len();
            neighbors.push(vec![v]);
            depth.push(r + 1);
            neighbors[v].push(c);
            queue.push_back(c);
        }
    }
    let n = neighbors.len();
    let frontier = depth.iter().map(|&d| d == radius).collect();
    CombinatorialMap::from_neighbor_lists((0..n as u64).collect(), &neighbors, frontier, Some(Degree::Infinite))
}

/// Segment `-radius..=radius` of the line over the integers. Vertex 0 is the
/// origin, then `+1, -1, +2, -2, ...`.
pub fn line(radius: usize) -> Result<CombinatorialMap> {
    let id = |x: i64| -> usize {
        match x {
            0 => 0,
            x if x > 0 => (2 * x - 1) as usize,
            x => (-2 * x) as usize,
        }
    };
    let r = radius as i64;
    let n = 2 * radius + 1;
    let mut neighbors = vec![Vec::new(); n];
    let mut frontier = vec![false; n];
    for x in -r..=r {
        let v = id(x);
        if x < r {
            neighbors[v].push(id(x + 1));
        }
        if x > -r {
            neighbors[v].push(id(x - 1));
        }
        frontier[v] = x.abs() == r;
    }
    CombinatorialMap::from_neighbor_lists((0..n as u64).collect(), &neighbors, frontier, Some(Degree::Infinite))
}

/// The octahedron (4-cycle `0..3`, hubs 4 inside and 5 outside) with a pendant
/// path of `ray` edges at each hub. A finite graph.
pub fn octahedron_hub(ray: usize) -> Result<CombinatorialMap> {
    let (a, b) = (4usize, 5usize);
    let n = 6 + 2 * ray;
    let mut nb: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for i in 0..4 {
        nb[i] = vec![b, (i + 1) % 4, a, (i + 3) % 4];
    }
    let ray_a: Vec<VertexId> = (6..6 + ray).collect();
    let ray_b: Vec<VertexId> = (6 + ray..6 + 2 * ray).collect();
    nb[a] = vec![0];
    nb[a].extend(ray_a.first());
    nb[a].extend([1, 2, 3]);
    nb[b] = vec![3, 2, 1];
    nb[b].extend(ray_b.first());
    nb[b].push(0);
    for (hub, ray) in [(a, &ray_a), (b, &ray_b)] {
        for (k, &v) in ray.iter().enumerate() {
            let prev = if k == 0 { hub } else { ray[k - 1] };
            nb[v].push(prev);
            if let Some(&next) = ray.get(k + 1) {
                nb[v].push(next);
            }
        }
    }
    CombinatorialMap::from_neighbor_lists((0..n as u64).collect(), &nb, vec![false; n], None)
}

/// Renumbers vertices in BFS discovery order from `root` (neighbors taken in
/// rotation order); labels become the new ids.
pub fn renumber_bfs(map: &CombinatorialMap, root: VertexId) -> Result<CombinatorialMap> {
    let n = map.num_vertices();
    let mut order = Vec::with_capacity(n);
    let mut new_id = vec![usize::MAX; n];
    new_id[root] = 0;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for w in map.neighbors(v) {
            if new_id[w] == usize::MAX {
                new_id[w] = order.len();
                order.push(w);
            }
        }
    }
    let (_, half_edges, rotation, frontier, hint) = map.clone().into_parts();
    let half_edges = half_edges
        .into_iter()
        .map(|he| HalfEdge { tail: new_id[he.tail], twin: he.twin })
        .collect();
    let rotation = order.iter().map(|&v| rotation[v].clone()).collect();
    let frontier = order.iter().map(|&v| frontier[v]).collect();
    CombinatorialMap::from_parts((0..n as u64).collect(), half_edges, rotation, frontier, hint)
}

/// Partial `{p,q}` map under construction. Each vertex keeps the known part of
/// its rotation as a counterclockwise arc; the unknown part lies between the
/// back and the front. A vertex with `p` entries has its rotation determined.
struct FaceBuilder {
    p: usize,
    q: usize,
    tail: Vec<VertexId>,
    twin: Vec<HalfEdgeId>,
    arcs: Vec<VecDeque<HalfEdgeId>>,
    done: Vec<bool>,
}

impl FaceBuilder {
    fn new(p: usize, q: usize) -> Self {
        FaceBuilder {
            p,
            q,
            tail: Vec::new(),
            twin: Vec::new(),
            arcs: vec![VecDeque::new()],
            done: vec![false],
        }
    }

    fn new_vertex(&mut self) -> VertexId {
        self.arcs.push(VecDeque::new());
        self.done.push(false);
        self.arcs.len() - 1
    }

    fn new_edge(&mut self, u: VertexId, w: VertexId) -> (HalfEdgeId, HalfEdgeId) {
        let h = self.tail.len();
        self.tail.extend([u, w]);
        self.twin.extend([h + 1, h]);
        (h, h + 1)
    }

    fn head(&self, h: HalfEdgeId) -> VertexId {
        self.tail[self.twin[h]]
    }

    fn pos(&self, h: HalfEdgeId) -> usize {
        self.arcs[self.tail[h]].iter().position(|&x| x == h).unwrap()
    }

    fn full(&self, v: VertexId) -> bool {
        self.arcs[v].len() == self.p
    }

    fn rot_next(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        let v = self.tail[h];
        let i = self.pos(h);
        let arc = &self.arcs[v];
        if i + 1 < arc.len() {
            Some(arc[i + 1])
        } else if self.full(v) {
            Some(arc[0])
        } else {
            None
        }
    }

    fn rot_prev(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        let v = self.tail[h];
        let i = self.pos(h);
        let arc = &self.arcs[v];
        if i > 0 {
            Some(arc[i - 1])
        } else if self.full(v) {
            Some(arc[arc.len() - 1])
        } else {
            None
        }
    }

    fn check_degree(&self, v: VertexId) -> Result<()> {
        if self.arcs[v].len() > self.p {
            return Err(Error::Construction(format!(
                "vertex {v} exceeds degree {} while closing faces",
                self.p
            )));
        }
        Ok(())
    }

    /// Adds a path of `len` edges from `from` (appended after the back of its
    /// arc) to `to` (inserted before the front of its arc).
    fn add_path(&mut self, from: VertexId, to: VertexId, len: usize) -> Result<()> {
        let mut prev = from;
        for _ in 1..len {
            let y = self.new_vertex();
            let (h, t) = self.new_edge(prev, y);
            self.arcs[prev].push_back(h);
            self.arcs[y].push_back(t);
            prev = y;
        }
        let (h, t) = self.new_edge(prev, to);
        self.arcs[prev].push_back(h);
        self.arcs[to].push_front(t);
        self.check_degree(from)?;
        self.check_degree(to)
    }

    /// Closes every corner at `v`, giving it degree `p`.
    fn complete(&mut self, v: VertexId) -> Result<()> {
        let (p, q) = (self.p, self.q);
        if self.arcs[v].is_empty() {
            let y = self.new_vertex();
            let (h, t) = self.new_edge(v, y);
            self.arcs[v].push_back(h);
            self.arcs[y].push_back(t);
        }
        loop {
            let d = self.arcs[v].len();
            let h_last = *self.arcs[v].back().unwrap();
            let h_first = *self.arcs[v].front().unwrap();

            // Walk the face after `h_last` backwards from its twin.
            let start = self.twin[h_last];
            let mut cur = start;
            let mut a = 1;
            let mut closed = false;
            while let Some(g) = self.rot_prev(cur) {
                let prev = self.twin[g];
                if prev == start {
                    closed = true;
                    break;
                }
                cur = prev;
                a += 1;
                if a > q {
                    return Err(Error::Construction(format!("face at vertex {v} longer than {q}")));
                }
            }
            if closed {
                if a != q || d != p {
                    return Err(Error::Construction(format!(
                        "face at vertex {v} closed with {a} edges at degree {d}"
                    )));
                }
                return Ok(());
            }
            let x_a = self.tail[cur];
            if d < p {
                if x_a == v || a >= q {
                    return Err(Error::Construction(format!("cannot open a new corner at vertex {v}")));
                }
                self.add_path(v, x_a, q - a)?;
                continue;
            }
            // Last corner: walk the same face forwards from the first half-edge.
            let mut cur = h_first;
            let mut b = 1;
            while let Some(nx) = self.rot_next(self.twin[cur]) {
                cur = nx;
                b += 1;
                if a + b > q {
                    return Err(Error::Construction(format!("face at vertex {v} longer than {q}")));
                }
            }
            let x_b = self.head(cur);
            if a + b >= q || x_a == x_b {
                return Err(Error::Construction(format!(
                    "last face at vertex {v} cannot be closed ({a}+{b} of {q})"
                )));
            }
            self.add_path(x_b, x_a, q - a - b)?;
        }
    }

    /// Completes vertices layer by layer. With `Some(r)`, stops after layer
    /// `r - 1`; with `None`, runs until every vertex is complete. Returns
    /// whether the surface closed up.
    fn grow(&mut self, radius: Option<usize>) -> Result<bool> {
        let mut n = 0;
        loop {
            if radius.is_some_and(|r| n >= r) {
                return Ok(self.done.iter().all(|&d| d));
            }
            let dist = self.distances();
            let layer: Vec<VertexId> = (0..self.arcs.len()).filter(|&v| dist[v] == Some(n)).collect();
            if layer.is_empty() {
                return Ok(self.done.iter().all(|&d| d));
            }
            for v in layer {
                if !self.done[v] {
                    self.complete(v)?;
                    self.done[v] = true;
                }
            }
            n += 1;
            if radius.is_none() && n > 10_000 {
                return Err(Error::Construction("surface does not close".into()));
            }
        }
    }

    fn distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.arcs.len()];
        dist[0] = Some(0);
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for &h in &self.arcs[v] {
                let w = self.head(h);
                if dist[w].is_none() {
                    dist[w] = Some(dist[v].unwrap() + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    fn into_map(self, hint: Option<Degree>) -> Result<CombinatorialMap> {
        let n = self.arcs.len();
        let half_edges = (0..self.tail.len())
            .map(|h| HalfEdge { tail: self.tail[h], twin: self.twin[h] })
            .collect();
        let rotation = self.arcs.into_iter().map(Vec::from).collect();
        let frontier = self.done.iter().map(|&d| !d).collect();
        CombinatorialMap::from_parts((0..n as u64).collect(), half_edges, rotation, frontier, hint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faces::trace_faces;
    use crate::rational::FaceDegree;

    fn euler(map: &CombinatorialMap) -> i64 {
        map.num_vertices() as i64 - map.num_edges() as i64 + trace_faces(map).len() as i64
    }

    #[test]
    fn platonic_solids_close_up() {
        let expected = [
            (Platonic::Tetrahedron, 4, 6, 4),
            (Platonic::Cube, 8, 12, 6),
            (Platonic::Octahedron, 6, 12, 8),
            (Platonic::Dodecahedron, 20, 30, 12),
            (Platonic::Icosahedron, 12, 30, 20),
        ];
        for (solid, v, e, f) in expected {
            let m = platonic(solid).unwrap();
            assert_eq!((m.num_vertices(), m.num_edges(), trace_faces(&m).len()), (v, e, f), "{solid:?}");
            assert!(!m.has_frontier());
            assert!(m.is_simple());
            assert_eq!(euler(&m), 2);
        }
    }

    #[test]
    fn seven_three_radius_one() {
        let m = pq_ball(7, 3, 1).unwrap();
        assert_eq!(m.degree(0), 7);
        let t = trace_faces(&m);
        let complete: Vec<_> = t.complete_faces().collect();
        assert_eq!(complete.len(), 7);
        assert!(complete.iter().all(|f| f.degree == FaceDegree::Known(Degree::Finite(3))));
        assert!(complete.iter().all(|f| f.walk.iter().any(|&h| m.tail(h) == 0)));
    }

    #[test]
    fn pq_balls_are_regular() {
        for (p, q, r) in [(7, 3, 4), (3, 7, 5), (4, 5, 4), (4, 4, 5), (3, 6, 5), (6, 3, 4), (5, 4, 3)] {
            let m = pq_ball(p, q, r).unwrap();
            assert!(m.is_simple(), "{{{p},{q}}}");
            for v in m.vertices().filter(|&v| !m.is_frontier(v)) {
                assert_eq!(m.degree(v), p, "{{{p},{q}}} vertex {v}");
            }
            for f in trace_faces(&m).complete_faces() {
                assert_eq!(f.walk.len(), q, "{{{p},{q}}}");
            }
        }
    }

    #[test]
    fn sphere_sizes_match_known_growth() {
        let sizes = |m: &CombinatorialMap, r: usize| crate::ball::ball(m, 0, r).unwrap().sphere_sizes();
        assert_eq!(sizes(&pq_ball(4, 4, 5).unwrap(), 5), vec![1, 4, 8, 12, 16, 20]);
        assert_eq!(sizes(&pq_ball(6, 3, 4).unwrap(), 4), vec![1, 6, 12, 18, 24]);
        assert_eq!(sizes(&pq_ball(7, 3, 6).unwrap(), 6), vec![1, 7, 21, 56, 147, 385, 1008]);
    }

    #[test]
    fn tree_counts() {
        let m = regular_tree(3, 2).unwrap();
        assert_eq!(m.num_vertices(), 10);
        assert_eq!(m.frontier().count(), 6);
        let r = radial_tree(|r| 3 + r, 3).unwrap();
        assert_eq!(r.num_vertices(), 1 + 3 + 9 + 36);
        assert_eq!(r.degree(1), 4);
    }

    #[test]
    fn line_segment() {
        let m = line(3).unwrap();
        assert_eq!(m.num_vertices(), 7);
        assert_eq!(m.frontier().count(), 2);
        assert!(m.adjacent(0, 1) && m.adjacent(0, 2) && m.adjacent(1, 3));
    }

    #[test]
    fn octahedron_hub_is_planar() {
        let m = octahedron_hub(2).unwrap();
        assert_eq!(euler(&m), 2);
        assert_eq!(m.degree(4), 5);
        assert_eq!(m.degree(0), 4);
        let plain = octahedron_hub(0).unwrap();
        let t = trace_faces(&plain);
        assert_eq!(t.len(), 8);
        assert!(t.faces().iter().all(|f| f.walk.len() == 3));
    }

    #[test]
    fn spec_strings() {
        assert_eq!("pq:7,3".parse::<GeneratorKind>().unwrap(), GeneratorKind::Pq { p: 7, q: 3 });
        assert_eq!("cube".parse::<GeneratorKind>().unwrap(), GeneratorKind::PlatonicSolid(Platonic::Cube));
        assert_eq!("radtree".parse::<GeneratorKind>().unwrap(), GeneratorKind::RadialTree { base: 3 });
        assert!("pq:7".parse::<GeneratorKind>().is_err());
        assert!(generate(&GeneratorSpec::new(GeneratorKind::Line, 0)).is_err());
    }
}
