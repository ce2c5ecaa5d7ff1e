//! Distance balls, spheres and boundary faces.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::faces::{FaceId, FaceTable};
use crate::map::{CombinatorialMap, VertexId};

/// Graph distances from a set of sources over the whole map.
pub fn distances_from(map: &CombinatorialMap, sources: &[VertexId]) -> Vec<Option<usize>> {
    let mut dist = vec![None; map.num_vertices()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v].unwrap();
        for w in map.neighbors(v) {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Smallest distance from `sources` to a frontier vertex, if any.
pub fn frontier_distance(map: &CombinatorialMap, dist: &[Option<usize>]) -> Option<usize> {
    map.frontier().filter_map(|v| dist[v]).min()
}

#[derive(Debug, Clone)]
pub struct BallDecomposition {
    pub root: VertexId,
    pub radius: usize,
    /// Distance to the root for every vertex of the map.
    pub dist: Vec<Option<usize>>,
    /// `layers[k]` is the sphere `S_k`, sorted by vertex id.
    pub layers: Vec<Vec<VertexId>>,
}

impl BallDecomposition {
    pub fn sphere(&self, k: usize) -> &[VertexId] {
        &self.layers[k]
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn ball_size(&self, k: usize) -> usize {
        self.layers[..=k].iter().map(Vec::len).sum()
    }

    pub fn in_ball(&self, v: VertexId, k: usize) -> bool {
        self.dist[v].is_some_and(|d| d <= k)
    }

    /// Membership mask of `B_k`.
    pub fn ball_mask(&self, k: usize) -> Vec<bool> {
        self.dist.iter().map(|d| d.is_some_and(|d| d <= k)).collect()
    }

    /// Faces meeting both `B_k` and its complement.
    pub fn boundary_faces(&self, map: &CombinatorialMap, faces: &FaceTable, k: usize) -> Vec<FaceId> {
        (0..faces.len())
            .filter(|&f| {
                let verts = faces.face_vertices(map, f);
                let inside = verts.iter().any(|&v| self.in_ball(v, k));
                let outside = verts.iter().any(|&v| !self.in_ball(v, k));
                // An open chain always continues beyond the truncation.
                inside && (outside || !faces.face(f).complete)
            })
            .collect()
    }
}

/// BFS layers `S_0..S_n` around `root`. Fails when a frontier vertex lies at
/// depth `< n`, since the ball would not be faithful.
pub fn ball(map: &CombinatorialMap, root: VertexId, n: usize) -> Result<BallDecomposition> {
    map.check_vertex(root)?;
    let dist = distances_from(map, &[root]);
    if let Some((v, d)) = map
        .frontier()
        .filter_map(|v| dist[v].map(|d| (v, d)))
        .filter(|&(_, d)| d < n)
        .min_by_key(|&(v, d)| (d, v))
    {
        return Err(Error::NotFaithful { radius: n, vertex: v, depth: d });
    }
    let mut layers = vec![Vec::new(); n + 1];
    for v in map.vertices() {
        if let Some(d) = dist[v] {
            if d <= n {
                layers[d].push(v);
            }
        }
    }
    Ok(BallDecomposition { root, radius: n, dist, layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faces::trace_faces;
    use crate::generate::{platonic, pq_ball, regular_tree, Platonic};

    #[test]
    fn tree_layers() {
        let m = regular_tree(3, 2).unwrap();
        let b = ball(&m, 0, 2).unwrap();
        assert_eq!(b.sphere_sizes(), vec![1, 3, 6]);
        assert!(matches!(ball(&m, 0, 3), Err(Error::NotFaithful { .. })));
    }

    #[test]
    fn square_lattice_layers() {
        let m = pq_ball(4, 4, 3).unwrap();
        let b = ball(&m, 0, 2).unwrap();
        assert_eq!(b.sphere_sizes(), vec![1, 4, 8]);
    }

    #[test]
    fn cube_layers_from_every_vertex() {
        let m = platonic(Platonic::Cube).unwrap();
        for v in m.vertices() {
            assert_eq!(ball(&m, v, 3).unwrap().sphere_sizes(), vec![1, 3, 3, 1]);
        }
    }

    #[test]
    fn boundary_faces_of_cube_ball() {
        let m = platonic(Platonic::Cube).unwrap();
        let faces = trace_faces(&m);
        let b = ball(&m, 0, 3).unwrap();
        assert_eq!(b.boundary_faces(&m, &faces, 0).len(), 3);
        assert_eq!(b.boundary_faces(&m, &faces, 1).len(), 6);
        assert_eq!(b.boundary_faces(&m, &faces, 3).len(), 0);
    }
}
