//! Nearest neighbor operators in polar coordinates around a root, the
//! structure of the radial blocks `E_n`, and the search for finitely
//! supported eigenfunctions.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ball::{distances_from, frontier_distance};
use crate::error::{Error, Result};
use crate::linalg::{
    bareiss_rank, integer_rows, normalize, rational_kernel, rational_mod_p, rationalize, row_times_sparse, svd_rank,
    ModEchelon,
};
use crate::map::{CombinatorialMap, VertexId};
use crate::metric::sphere_enumeration;
use crate::rational::{to_f64, Rational};

/// `(Aφ)(v) = a(v,v) φ(v) + Σ_{w~v} a(v,w) φ(w)`, with `a(v,w) != 0` exactly
/// when `v ~ w`.
#[derive(Debug, Clone)]
pub struct NearestNeighborOperator {
    pub diagonal: Vec<Rational>,
    off: HashMap<(VertexId, VertexId), Rational>,
}

impl NearestNeighborOperator {
    /// The combinatorial Laplacian.
    pub fn laplacian(map: &CombinatorialMap) -> Self {
        let mut diagonal = vec![Rational::zero(); map.num_vertices()];
        let mut off: HashMap<(VertexId, VertexId), Rational> = HashMap::new();
        for v in map.vertices() {
            for w in map.neighbors(v) {
                if w != v {
                    diagonal[v] += Rational::one();
                    *off.entry((v, w)).or_insert_with(Rational::zero) -= Rational::one();
                }
            }
        }
        NearestNeighborOperator { diagonal, off }
    }

    /// Independent random nonzero rationals on every ordered adjacent pair
    /// and on the diagonal.
    pub fn random(map: &CombinatorialMap, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |nonzero: bool| -> Rational {
            loop {
                let n: i64 = rng.gen_range(-9..=9);
                let d: i64 = rng.gen_range(1..=7);
                if n != 0 || !nonzero {
                    return Rational::new(n.into(), d.into());
                }
            }
        };
        let diagonal = map.vertices().map(|_| draw(false)).collect();
        let mut off = HashMap::new();
        for v in map.vertices() {
            for w in map.neighbors(v) {
                if w != v {
                    off.entry((v, w)).or_insert_with(|| draw(true));
                }
            }
        }
        NearestNeighborOperator { diagonal, off }
    }

    /// The Laplacian plus a random rational potential.
    pub fn laplacian_with_potential(map: &CombinatorialMap, seed: u64) -> Self {
        let mut a = Self::laplacian(map);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for d in a.diagonal.iter_mut() {
            *d += Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=9).into());
        }
        a
    }

    pub fn coefficient(&self, v: VertexId, w: VertexId) -> Rational {
        if v == w {
            self.diagonal[v].clone()
        } else {
            self.off.get(&(v, w)).cloned().unwrap_or_else(Rational::zero)
        }
    }

    /// `(Aφ)(v)` for `φ` given on all vertices.
    pub fn apply_at(&self, map: &CombinatorialMap, phi: &[Rational], v: VertexId) -> Rational {
        let mut s = &self.diagonal[v] * &phi[v];
        let mut seen: Vec<VertexId> = Vec::with_capacity(map.degree(v));
        for w in map.neighbors(v) {
            if w != v && !seen.contains(&w) && !phi[w].is_zero() {
                seen.push(w);
                s += self.coefficient(v, w) * &phi[w];
            }
        }
        s
    }
}

/// Sparse rational matrix as `(row, col, value)` triples with nonzero values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, Rational)>,
}

impl SparseMatrix {
    fn build(rows: &[VertexId], cols: &[VertexId], a: &NearestNeighborOperator, map: &CombinatorialMap) -> Self {
        let col_index: HashMap<VertexId, usize> = cols.iter().enumerate().map(|(j, &v)| (v, j)).collect();
        let mut entries = Vec::new();
        for (i, &v) in rows.iter().enumerate() {
            let mut targets: Vec<usize> = map.neighbors(v).chain([v]).filter_map(|w| col_index.get(&w).copied()).collect();
            targets.sort_unstable();
            targets.dedup();
            for j in targets {
                let c = a.coefficient(v, cols[j]);
                if !c.is_zero() {
                    entries.push((i, j, c));
                }
            }
        }
        SparseMatrix { rows: rows.len(), cols: cols.len(), entries }
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.rows];
        for (i, j, a) in &self.entries {
            if !x[*j].is_zero() {
                out[*i] += a * &x[*j];
            }
        }
        out
    }

    pub fn dense(&self) -> Vec<Vec<Rational>> {
        let mut m = vec![vec![Rational::zero(); self.cols]; self.rows];
        for (i, j, a) in &self.entries {
            m[*i][*j] = a.clone();
        }
        m
    }

    pub fn dense_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (i, j, a) in &self.entries {
            m[(*i, *j)] = to_f64(a);
        }
        m
    }

    fn row_support(&self) -> Vec<Vec<usize>> {
        let mut s = vec![Vec::new(); self.rows];
        for (i, j, _) in &self.entries {
            s[*i].push(*j);
        }
        s
    }

    fn column_support(&self) -> Vec<Vec<usize>> {
        let mut s = vec![Vec::new(); self.cols];
        for (i, j, _) in &self.entries {
            s[*j].push(*i);
        }
        s
    }
}

/// Blocks of `A` over the spheres `S_0, ..., S_horizon`:
/// `(Aφ)_n = E_{n-1} φ_{n-1} + D_n φ_n + E'_n φ_{n+1}` with
/// `E_n(i,j) = a(v_i^{(n+1)}, v_j^{(n)})` and `E'_n(j,i) = a(v_j^{(n)}, v_i^{(n+1)})`.
#[derive(Debug, Clone)]
pub struct PolarOperator {
    pub spheres: Vec<Vec<VertexId>>,
    pub d: Vec<SparseMatrix>,
    pub e: Vec<SparseMatrix>,
    pub e_prime: Vec<SparseMatrix>,
}

/// Polar form of `a` around `v0` using the shifted cyclic sphere
/// enumerations.
pub fn polar_decompose(
    map: &CombinatorialMap,
    a: &NearestNeighborOperator,
    v0: VertexId,
    horizon: usize,
) -> Result<PolarOperator> {
    let spheres = sphere_enumeration(map, v0, horizon)?.per_level;
    let h = spheres.len() - 1;
    let mut d = Vec::with_capacity(h + 1);
    let mut e = Vec::with_capacity(h);
    let mut e_prime = Vec::with_capacity(h);
    for n in 0..=h {
        d.push(SparseMatrix::build(&spheres[n], &spheres[n], a, map));
        if n < h {
            e.push(SparseMatrix::build(&spheres[n + 1], &spheres[n], a, map));
            e_prime.push(SparseMatrix::build(&spheres[n], &spheres[n + 1], a, map));
        }
    }
    Ok(PolarOperator { spheres, d, e, e_prime })
}

impl PolarOperator {
    pub fn horizon(&self) -> usize {
        self.spheres.len() - 1
    }

    /// `(Aφ)_n` from the blocks, for `φ` given sphere by sphere.
    pub fn apply_level(&self, phi: &[Vec<Rational>], n: usize) -> Vec<Rational> {
        let mut out = self.d[n].mul_vec(&phi[n]);
        let mut add = |v: Vec<Rational>| {
            for (o, x) in out.iter_mut().zip(v) {
                *o += x;
            }
        };
        if n > 0 {
            add(self.e[n - 1].mul_vec(&phi[n - 1]));
        }
        if n < self.horizon() {
            add(self.e_prime[n].mul_vec(&phi[n + 1]));
        }
        out
    }
}

/// Compares the block formula with direct application of `a` on `trials`
/// random rational functions supported in the ball. Returns the number of
/// trials that agreed exactly on every sphere inside `B_{horizon-1}`.
pub fn check_reconstruction(
    map: &CombinatorialMap,
    a: &NearestNeighborOperator,
    polar: &PolarOperator,
    trials: usize,
    seed: u64,
) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = polar.horizon();
    let mut agreed = 0;
    for _ in 0..trials {
        let mut phi_full = vec![Rational::zero(); map.num_vertices()];
        let mut phi: Vec<Vec<Rational>> = Vec::with_capacity(h + 1);
        for sphere in &polar.spheres {
            let level: Vec<Rational> = sphere
                .iter()
                .map(|_| Rational::new(rng.gen_range(-50i64..=50).into(), rng.gen_range(1i64..=12).into()))
                .collect();
            for (&v, x) in sphere.iter().zip(&level) {
                phi_full[v] = x.clone();
            }
            phi.push(level);
        }
        let ok = (0..h).all(|n| {
            let blocks = polar.apply_level(&phi, n);
            polar.spheres[n].iter().zip(&blocks).all(|(&v, b)| a.apply_at(map, &phi_full, v) == *b)
        });
        if ok {
            agreed += 1;
        }
    }
    agreed
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMethod {
    /// Full rank modulo `2^61 - 1`, which implies full rank over the rationals.
    Modular,
    /// Fraction-free elimination over the integers.
    Bareiss,
    /// Singular values above `1e-10` times the largest.
    Numerical,
}

#[derive(Debug, Clone)]
pub struct EBlockCheck {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    /// Every column has a nonzero entry.
    pub columns_nonzero: bool,
    /// Every row has one or two nonzero entries.
    pub rows_one_or_two: bool,
    /// Two entries in a row sit in cyclically succeeding columns.
    pub pairs_succeed: bool,
    /// Two columns share at most one row, and columns sharing one have
    /// another nonzero entry each.
    pub columns_overlap: bool,
    pub rank: usize,
    pub method: RankMethod,
}

impl EBlockCheck {
    pub fn injective(&self) -> bool {
        self.rank == self.cols
    }

    pub fn structure_holds(&self) -> bool {
        self.columns_nonzero && self.rows_one_or_two && self.pairs_succeed && self.columns_overlap
    }
}

/// Largest block handed to fraction-free elimination.
const BAREISS_LIMIT: usize = 400;

/// Exact rank of a rational sparse matrix: modular first, Bareiss when the
/// modular rank is deficient and the block is small, numerical otherwise.
pub fn exact_rank(m: &SparseMatrix) -> (usize, RankMethod) {
    let full = m.cols.min(m.rows);
    let modular = (|| {
        let mut rows = vec![vec![0u64; m.cols]; m.rows];
        for (i, j, a) in &m.entries {
            rows[*i][*j] = rational_mod_p(a)?;
        }
        let mut ech = ModEchelon::new(m.cols);
        for r in rows {
            ech.insert(r);
            if ech.is_full() {
                break;
            }
        }
        Some(ech.rank())
    })();
    if modular == Some(full) {
        return (full, RankMethod::Modular);
    }
    if m.rows.max(m.cols) <= BAREISS_LIMIT {
        return (bareiss_rank(integer_rows(&m.dense())), RankMethod::Bareiss);
    }
    (svd_rank(&m.dense_f64(), 1e-10), RankMethod::Numerical)
}

/// Checks the structure and injectivity of every `E_n`.
pub fn check_e_structure(polar: &PolarOperator) -> Vec<EBlockCheck> {
    polar
        .e
        .iter()
        .enumerate()
        .map(|(n, e)| {
            let rows = e.row_support();
            let cols = e.column_support();
            let s = e.cols;
            let columns_nonzero = cols.iter().all(|c| !c.is_empty());
            let rows_one_or_two = rows.iter().all(|r| (1..=2).contains(&r.len()));
            let pairs_succeed = rows.iter().filter(|r| r.len() == 2).all(|r| {
                let (a, b) = (r[0].min(r[1]), r[0].max(r[1]));
                b == a + 1 || (a == 0 && b == s - 1)
            });
            let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
            for r in rows.iter().filter(|r| r.len() >= 2) {
                for x in 0..r.len() {
                    for y in x + 1..r.len() {
                        *shared.entry((r[x].min(r[y]), r[x].max(r[y]))).or_insert(0) += 1;
                    }
                }
            }
            let columns_overlap = shared.iter().all(|(&(a, b), &k)| k <= 1 && cols[a].len() >= 2 && cols[b].len() >= 2);
            let (rank, method) = exact_rank(e);
            EBlockCheck {
                n,
                rows: e.rows,
                cols: e.cols,
                columns_nonzero,
                rows_one_or_two,
                pairs_succeed,
                columns_overlap,
                rank,
                method,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenfunction {
    pub lambda: Rational,
    /// Values on the support, largest absolute value 1.
    pub values: Vec<(VertexId, Rational)>,
    /// Dimension of the eigenspace inside the search region.
    pub multiplicity: usize,
}

#[derive(Debug, Clone)]
pub struct EigenSearch {
    /// Size of `B_{horizon-2}`, where eigenfunctions are sought.
    pub support_region: usize,
    /// Dimension of the largest `A`-invariant subspace of functions on
    /// `B_{horizon-2}` that `A` maps into functions vanishing on
    /// `S_{horizon-1}`. Zero certifies that no eigenfunction exists.
    pub unobservable_dimension: usize,
    pub found: Vec<Eigenfunction>,
    /// Real eigenvalues of the restriction that were tested.
    pub candidates_tested: usize,
    /// Eigenvalues of the invariant subspace that could not be confirmed
    /// exactly (for example non-real ones).
    pub unresolved: usize,
}

/// All `(λ, φ)` with `φ` supported in `B_{horizon-2}(v0)` and `Aφ = λφ` on
/// `B_{horizon-1}(v0)`.
pub fn finitely_supported_eigenfunctions(
    map: &CombinatorialMap,
    a: &NearestNeighborOperator,
    v0: VertexId,
    horizon: usize,
) -> Result<EigenSearch> {
    map.check_vertex(v0)?;
    if horizon < 2 {
        return Err(Error::Precondition("horizon must be at least 2".into()));
    }
    let dist = distances_from(map, &[v0]);
    if let Some(r) = frontier_distance(map, &dist) {
        if r < horizon {
            return Err(Error::NotFaithful { radius: horizon, vertex: v0, depth: r });
        }
    }
    let cols: Vec<VertexId> = map.vertices().filter(|&v| dist[v].is_some_and(|d| d + 2 <= horizon)).collect();
    let outer: Vec<VertexId> = map.vertices().filter(|&v| dist[v] == Some(horizon - 1)).collect();
    let m = cols.len();
    let inner = SparseMatrix::build(&cols, &cols, a, map);
    let boundary = SparseMatrix::build(&outer, &cols, a, map);

    // Rows spanning the observability space: B, B A, B A^2, ... mod p.
    let unobservable_dimension = (|| -> Option<usize> {
        let to_mod = |s: &SparseMatrix| -> Option<Vec<(usize, usize, u64)>> {
            s.entries.iter().map(|(i, j, x)| rational_mod_p(x).map(|y| (*i, *j, y))).collect()
        };
        let a_mod = to_mod(&inner)?;
        let b_mod = to_mod(&boundary)?;
        let mut ech = ModEchelon::new(m);
        let mut frontier: Vec<Vec<u64>> = Vec::new();
        for i in 0..boundary.rows {
            let mut row = vec![0u64; m];
            for &(r, j, x) in &b_mod {
                if r == i {
                    row[j] = x;
                }
            }
            if ech.insert(row.clone()) {
                frontier.push(row);
            }
        }
        while !frontier.is_empty() && !ech.is_full() {
            let mut next = Vec::new();
            for row in frontier {
                let r = row_times_sparse(&row, &a_mod, m);
                if ech.insert(r.clone()) {
                    next.push(r);
                }
            }
            frontier = next;
        }
        Some(m - ech.rank())
    })();

    let mut search = EigenSearch {
        support_region: m,
        unobservable_dimension: unobservable_dimension.unwrap_or(m),
        found: Vec::new(),
        candidates_tested: 0,
        unresolved: 0,
    };
    if search.unobservable_dimension == 0 || m == 0 {
        return Ok(search);
    }

    // Candidate eigenvalues of the restriction, confirmed exactly.
    let dense = inner.dense_f64();
    let eigen = dense.clone().complex_eigenvalues();
    let mut reals: Vec<f64> = eigen.iter().filter(|z| z.im.abs() < 1e-8).map(|z| z.re).collect();
    reals.sort_by(f64::total_cmp);
    reals.dedup_by(|x, y| (*x - *y).abs() < 1e-7);
    let inner_dense = inner.dense();
    let boundary_dense = boundary.dense();
    let mut confirmed_dim = 0;
    for lambda_f in reals {
        search.candidates_tested += 1;
        let lambda = rationalize(lambda_f, 10_000);
        if (to_f64(&lambda) - lambda_f).abs() > 1e-6 {
            continue;
        }
        let mut stacked: Vec<Vec<Rational>> = inner_dense.clone();
        for (i, row) in stacked.iter_mut().enumerate() {
            row[i] -= &lambda;
        }
        stacked.extend(boundary_dense.iter().cloned());
        let kernel = rational_kernel(&stacked, m);
        if kernel.is_empty() {
            continue;
        }
        confirmed_dim += kernel.len();
        let mut phi = kernel[0].clone();
        normalize(&mut phi);
        let values = cols.iter().zip(phi).filter(|(_, x)| !x.is_zero()).map(|(&v, x)| (v, x)).collect();
        search.found.push(Eigenfunction { lambda, values, multiplicity: kernel.len() });
    }
    search.unresolved = search.unobservable_dimension.saturating_sub(confirmed_dim);
    Ok(search)
}

/// `Aφ - λφ` on `B_{horizon-1}`, which must vanish for a found eigenfunction.
pub fn eigen_residual(
    map: &CombinatorialMap,
    a: &NearestNeighborOperator,
    v0: VertexId,
    horizon: usize,
    f: &Eigenfunction,
) -> Vec<(VertexId, Rational)> {
    let dist = distances_from(map, &[v0]);
    let mut phi = vec![Rational::zero(); map.num_vertices()];
    for (v, x) in &f.values {
        phi[*v] = x.clone();
    }
    map.vertices()
        .filter(|&v| dist[v].is_some_and(|d| d < horizon))
        .map(|v| (v, a.apply_at(map, &phi, v) - &f.lambda * &phi[v]))
        .filter(|(_, r)| !r.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{octahedron_hub, pq_ball, regular_tree};
    use crate::rational::int;

    #[test]
    fn tree_blocks() {
        let t = regular_tree(3, 6).unwrap();
        let a = NearestNeighborOperator::laplacian(&t);
        let p = polar_decompose(&t, &a, 0, 5).unwrap();
        assert_eq!(check_reconstruction(&t, &a, &p, 10, 0), 10);
        for (n, e) in p.e.iter().enumerate() {
            let rows = e.row_support();
            assert!(rows.iter().all(|r| r.len() == 1));
            let per_col = if n == 0 { 3 } else { 2 };
            assert!(e.column_support().iter().all(|c| c.len() == per_col));
            assert!(e.entries.iter().all(|(_, _, x)| *x == int(-1)));
        }
        assert!(check_e_structure(&p).iter().all(|c| c.injective() && c.structure_holds()));
    }

    #[test]
    fn random_operators_on_hyperbolic_ball() {
        let m = pq_ball(7, 3, 5).unwrap();
        for seed in 0..2 {
            let a = NearestNeighborOperator::random(&m, seed);
            let p = polar_decompose(&m, &a, 0, 4).unwrap();
            assert_eq!(check_reconstruction(&m, &a, &p, 10, seed), 10);
            let checks = check_e_structure(&p);
            assert!(checks.iter().all(|c| c.injective() && c.structure_holds()), "{checks:?}");
            let s = finitely_supported_eigenfunctions(&m, &a, 0, 5).unwrap();
            assert_eq!(s.unobservable_dimension, 0);
            assert!(s.found.is_empty());
        }
    }

    #[test]
    fn octahedron_hub_has_a_localized_eigenfunction() {
        let m = octahedron_hub(3).unwrap();
        let a = NearestNeighborOperator::laplacian(&m);
        let s = finitely_supported_eigenfunctions(&m, &a, 0, 5).unwrap();
        let six = s.found.iter().find(|f| f.lambda == int(6)).expect("lambda = 6");
        assert_eq!(six.values, vec![(0, int(1)), (1, int(-1)), (2, int(1)), (3, int(-1))]);
        assert!(eigen_residual(&m, &a, 0, 5, six).is_empty());
    }
}
