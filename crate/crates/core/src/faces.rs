//! Face tracing: orbits of the face-successor permutation, corners and face
//! degrees.
//!
//! Around a frontier vertex the successor is undefined across the gap, so a
//! face of a truncated map is either a closed orbit (complete) or a maximal
//! open chain starting right after one gap and ending right before the next
//! (incomplete). An incomplete face takes the map's face-degree hint.

use std::collections::BTreeMap;

use crate::map::{CombinatorialMap, HalfEdgeId, VertexId};
use crate::rational::{Degree, FaceDegree};

pub type FaceId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceOrbit {
    pub id: FaceId,
    pub walk: Vec<HalfEdgeId>,
    pub degree: FaceDegree,
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub vertex: VertexId,
    pub face: FaceId,
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct FaceTable {
    faces: Vec<FaceOrbit>,
    face_of: Vec<FaceId>,
    corners: Vec<Corner>,
    corners_at: Vec<Vec<usize>>,
    corners_of: Vec<Vec<usize>>,
}

impl FaceTable {
    pub fn faces(&self) -> &[FaceOrbit] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> &FaceOrbit {
        &self.faces[f]
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Face containing half-edge `h`; the corner just before `h` in the
    /// rotation at its tail belongs to that face.
    pub fn face_of(&self, h: HalfEdgeId) -> FaceId {
        self.face_of[h]
    }

    pub fn corners(&self) -> &[Corner] {
        &self.corners
    }

    pub fn corners_at(&self, v: VertexId) -> impl Iterator<Item = &Corner> {
        self.corners_at[v].iter().map(move |&i| &self.corners[i])
    }

    pub fn corners_of(&self, f: FaceId) -> impl Iterator<Item = &Corner> {
        self.corners_of[f].iter().map(move |&i| &self.corners[i])
    }

    pub fn degree(&self, f: FaceId) -> FaceDegree {
        self.faces[f].degree
    }

    pub fn complete_faces(&self) -> impl Iterator<Item = &FaceOrbit> {
        self.faces.iter().filter(|f| f.complete)
    }

    /// Vertices met by the face walk, in walk order and without repetition.
    /// For an open chain the head of the last half-edge is included.
    pub fn face_vertices(&self, map: &CombinatorialMap, f: FaceId) -> Vec<VertexId> {
        let face = &self.faces[f];
        let mut out = Vec::with_capacity(face.walk.len() + 1);
        let push = |v: VertexId, out: &mut Vec<VertexId>| {
            if !out.contains(&v) {
                out.push(v);
            }
        };
        for &h in &face.walk {
            push(map.tail(h), &mut out);
        }
        if !face.complete {
            if let Some(&last) = face.walk.last() {
                push(map.head(last), &mut out);
            }
        }
        out
    }
}

/// Partitions all half-edges into face orbits.
pub fn trace_faces(map: &CombinatorialMap) -> FaceTable {
    let nh = map.num_half_edges();
    let mut face_of = vec![usize::MAX; nh];
    let mut faces: Vec<FaceOrbit> = Vec::new();

    // Open chains start at the first half-edge of every frontier arc.
    for v in map.frontier() {
        let Some(&start) = map.rotation(v).first() else { continue };
        if face_of[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut walk = Vec::new();
        let mut cur = Some(start);
        while let Some(h) = cur {
            if face_of[h] != usize::MAX {
                break;
            }
            face_of[h] = id;
            walk.push(h);
            cur = map.face_next(h);
        }
        let degree = match map.face_hint() {
            Some(d) => FaceDegree::Known(d),
            None => FaceDegree::Unknown,
        };
        faces.push(FaceOrbit { id, walk, degree, complete: false });
    }

    for start in 0..nh {
        if face_of[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut walk = Vec::new();
        let mut h = start;
        loop {
            face_of[h] = id;
            walk.push(h);
            h = map
                .face_next(h)
                .expect("orbits not reached from a gap are closed");
            if h == start {
                break;
            }
        }
        let degree = FaceDegree::Known(Degree::Finite(walk.len() as u64));
        faces.push(FaceOrbit { id, walk, degree, complete: true });
    }

    let mut corners = Vec::new();
    let mut corners_at = vec![Vec::new(); map.num_vertices()];
    let mut corners_of = vec![Vec::new(); faces.len()];
    for face in &faces {
        let mut counts: BTreeMap<VertexId, usize> = BTreeMap::new();
        for &h in &face.walk {
            *counts.entry(map.tail(h)).or_default() += 1;
        }
        for (vertex, multiplicity) in counts {
            let idx = corners.len();
            corners.push(Corner { vertex, face: face.id, multiplicity });
            corners_at[vertex].push(idx);
            corners_of[face.id].push(idx);
        }
    }

    FaceTable { faces, face_of, corners, corners_at, corners_of }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{platonic, Platonic};

    fn single_edge() -> CombinatorialMap {
        CombinatorialMap::from_neighbor_lists(vec![0, 1], &[vec![1], vec![0]], vec![false; 2], None).unwrap()
    }

    #[test]
    fn single_edge_has_one_face_of_degree_two() {
        let t = trace_faces(&single_edge());
        assert_eq!(t.len(), 1);
        assert_eq!(t.degree(0), FaceDegree::Known(Degree::Finite(2)));
        assert!(t.corners().iter().all(|c| c.multiplicity == 1));
    }

    #[test]
    fn path_on_three_vertices_is_degenerate() {
        let m = CombinatorialMap::from_neighbor_lists(
            vec![0, 1, 2],
            &[vec![1], vec![0, 2], vec![1]],
            vec![false; 3],
            None,
        )
        .unwrap();
        let t = trace_faces(&m);
        assert_eq!(t.len(), 1);
        assert_eq!(t.degree(0), FaceDegree::Known(Degree::Finite(4)));
        let middle: Vec<_> = t.corners_at(1).collect();
        assert_eq!(middle.len(), 1);
        assert_eq!(middle[0].multiplicity, 2);
    }

    #[test]
    fn cube_has_six_square_faces() {
        let m = platonic(Platonic::Cube).unwrap();
        let t = trace_faces(&m);
        assert_eq!(t.len(), 6);
        assert!(t.faces().iter().all(|f| f.degree == FaceDegree::Known(Degree::Finite(4))));
        assert_eq!(m.num_vertices() as i64 - m.num_edges() as i64 + t.len() as i64, 2);
    }
}
