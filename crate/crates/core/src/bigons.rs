//! Minimal bigons: pairs of internally disjoint geodesics with common
//! endpoints, and the vertices they enclose.

use std::collections::VecDeque;

use crate::ball::{distances_from, frontier_distance};
use crate::error::{Error, Result};
use crate::map::{CombinatorialMap, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bigon {
    pub first: Vec<VertexId>,
    pub second: Vec<VertexId>,
    /// Vertices enclosed by the two paths and not on them.
    pub interior: Vec<VertexId>,
}

impl Bigon {
    pub fn length(&self) -> usize {
        self.first.len() - 1
    }
}

#[derive(Debug, Clone)]
pub struct BigonReport {
    pub bigons: Vec<Bigon>,
    pub starts: usize,
}

impl BigonReport {
    pub fn with_nonempty_interior(&self) -> impl Iterator<Item = &Bigon> {
        self.bigons.iter().filter(|b| !b.interior.is_empty())
    }
}

/// Upper limit on geodesics enumerated between one pair of endpoints.
const MAX_GEODESICS: usize = 20_000;

/// All minimal bigons of length at most `horizon` whose endpoints both lie in
/// `B_{R-1-horizon}(v0)`, `R` being the distance from `v0` to the frontier.
/// On a finite map every vertex is a possible endpoint.
pub fn minimal_bigons(map: &CombinatorialMap, v0: VertexId, horizon: usize) -> Result<BigonReport> {
    map.check_vertex(v0)?;
    let root_dist = distances_from(map, &[v0]);
    let starts: Vec<VertexId> = match frontier_distance(map, &root_dist) {
        None => map.vertices().collect(),
        Some(r) => {
            if r < horizon + 1 {
                return Err(Error::NotFaithful { radius: horizon + 1, vertex: v0, depth: r });
            }
            let reach = r - 1 - horizon;
            map.vertices().filter(|&v| root_dist[v].is_some_and(|d| d <= reach)).collect()
        }
    };
    let mut is_start = vec![false; map.num_vertices()];
    for &s in &starts {
        is_start[s] = true;
    }

    let mut bigons = Vec::new();
    for &s in &starts {
        let dist = distances_from(map, &[s]);
        for t in map.vertices() {
            let Some(k) = dist[t] else { continue };
            if k < 2 || k > horizon || !is_start[t] || t < s {
                continue;
            }
            let paths = geodesics(map, &dist, s, t)?;
            for i in 0..paths.len() {
                for j in i + 1..paths.len() {
                    let (p, q) = (&paths[i], &paths[j]);
                    if (1..k).all(|x| p[x] != q[x]) {
                        let interior = enclosed(map, p, q);
                        bigons.push(Bigon { first: p.clone(), second: q.clone(), interior });
                    }
                }
            }
        }
    }
    Ok(BigonReport { bigons, starts: starts.len() })
}

/// Every geodesic from `s` to `t`, as vertex sequences.
fn geodesics(map: &CombinatorialMap, dist: &[Option<usize>], s: VertexId, t: VertexId) -> Result<Vec<Vec<VertexId>>> {
    let mut out = Vec::new();
    let mut stack = vec![t];
    fn walk(
        map: &CombinatorialMap,
        dist: &[Option<usize>],
        s: VertexId,
        stack: &mut Vec<VertexId>,
        out: &mut Vec<Vec<VertexId>>,
    ) -> Result<()> {
        let v = *stack.last().unwrap();
        if v == s {
            out.push(stack.iter().rev().copied().collect());
            if out.len() > MAX_GEODESICS {
                return Err(Error::TooLarge("too many geodesics between one pair of vertices".into()));
            }
            return Ok(());
        }
        let d = dist[v].unwrap();
        let preds: Vec<VertexId> = map.neighbors(v).filter(|&u| dist[u] == Some(d - 1)).collect();
        for u in preds {
            stack.push(u);
            walk(map, dist, s, stack, out)?;
            stack.pop();
        }
        Ok(())
    }
    walk(map, dist, s, &mut stack, &mut out)?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Vertices enclosed by the simple cycle `p` followed by `q` reversed. Each
/// side of the cycle is flooded; a side reaching a frontier vertex is the
/// outside. On a finite map the smaller side is taken.
fn enclosed(map: &CombinatorialMap, p: &[VertexId], q: &[VertexId]) -> Vec<VertexId> {
    let mut cycle: Vec<VertexId> = p.to_vec();
    cycle.extend(q.iter().rev().skip(1).take(q.len() - 2));
    let len = cycle.len();
    let mut on_cycle = vec![false; map.num_vertices()];
    for &v in &cycle {
        on_cycle[v] = true;
    }
    // 0 = unvisited, 1 = left, 2 = right
    let mut side = vec![0u8; map.num_vertices()];
    let mut queues = [VecDeque::new(), VecDeque::new()];
    let mut members: [Vec<VertexId>; 2] = [Vec::new(), Vec::new()];
    let mut escaped = [false; 2];
    for i in 0..len {
        let c = cycle[i];
        let (next, prev) = (cycle[(i + 1) % len], cycle[(i + len - 1) % len]);
        let rot = map.rotation(c);
        let out = rot.iter().position(|&h| map.head(h) == next).unwrap();
        let back = rot.iter().position(|&h| map.head(h) == prev).unwrap();
        // Counterclockwise from the outgoing edge to the incoming one is the
        // left side.
        let mut k = (out + 1) % rot.len();
        let mut s = 0;
        while k != out {
            if k == back {
                s = 1;
            } else {
                let w = map.head(rot[k]);
                if !on_cycle[w] && side[w] == 0 {
                    side[w] = s as u8 + 1;
                    queues[s].push_back(w);
                    members[s].push(w);
                }
            }
            k = (k + 1) % rot.len();
        }
    }
    loop {
        let mut progressed = false;
        for s in 0..2 {
            if escaped[s] {
                continue;
            }
            if let Some(v) = queues[s].pop_front() {
                progressed = true;
                if map.is_frontier(v) {
                    escaped[s] = true;
                    continue;
                }
                for w in map.neighbors(v) {
                    if !on_cycle[w] && side[w] == 0 {
                        side[w] = s as u8 + 1;
                        queues[s].push_back(w);
                        members[s].push(w);
                    }
                }
            }
        }
        if escaped[0] || escaped[1] {
            let inner = if escaped[0] { 1 } else { 0 };
            if escaped[inner] {
                return Vec::new();
            }
            while let Some(v) = queues[inner].pop_front() {
                for w in map.neighbors(v) {
                    if !on_cycle[w] && side[w] == 0 {
                        side[w] = inner as u8 + 1;
                        queues[inner].push_back(w);
                        members[inner].push(w);
                    }
                }
            }
            let mut m = members[inner].clone();
            m.sort_unstable();
            return m;
        }
        if !progressed {
            let inner = if members[0].len() <= members[1].len() { 0 } else { 1 };
            let mut m = members[inner].clone();
            m.sort_unstable();
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{pq_ball, regular_tree};

    #[test]
    fn square_lattice_bigons() {
        let m = pq_ball(4, 4, 6).unwrap();
        let r = minimal_bigons(&m, 0, 2).unwrap();
        let squares: Vec<_> = r.bigons.iter().filter(|b| b.length() == 2).collect();
        assert!(!squares.is_empty());
        assert!(squares.iter().all(|b| b.interior.is_empty()));
        let r = minimal_bigons(&pq_ball(4, 4, 9).unwrap(), 0, 4).unwrap();
        assert!(r.with_nonempty_interior().any(|b| b.interior.len() == 1));
    }

    #[test]
    fn trees_have_no_bigons() {
        let t = regular_tree(3, 7).unwrap();
        assert!(minimal_bigons(&t, 0, 3).unwrap().bigons.is_empty());
    }

    #[test]
    fn seven_three_interiors_are_empty() {
        let m = pq_ball(7, 3, 6).unwrap();
        let r = minimal_bigons(&m, 0, 4).unwrap();
        assert!(!r.bigons.is_empty());
        assert_eq!(r.with_nonempty_interior().count(), 0);
    }
}
