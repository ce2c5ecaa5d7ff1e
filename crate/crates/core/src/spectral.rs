//! Dirichlet Laplacians on finite truncations, their low eigenvalues, and
//! the Cheeger lower bounds for the bottom of the spectrum.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ball::distances_from;
use crate::error::{Error, Result};
use crate::faces::trace_faces;
use crate::generate::GeneratorKind;
use crate::isoperimetry::cheeger_lower_bounds;
use crate::map::{CombinatorialMap, VertexId};
use crate::rational::{to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    /// `Δφ(v) = Σ_{w~v} (φ(v) - φ(w))`
    Combinatorial,
    /// `Δ̃ = D^{-1} Δ`, written in the symmetric form `D^{-1/2} Δ D^{-1/2}`.
    Normalized,
}

/// A Laplacian restricted to `domain`, functions vanishing elsewhere.
#[derive(Debug, Clone)]
pub struct DirichletLaplacian {
    pub kind: LaplacianKind,
    pub domain: Vec<VertexId>,
    pub matrix: DMatrix<f64>,
}

/// Dirichlet restriction of the Laplacian to `domain`. Diagonal entries are
/// full vertex degrees, so edges leaving the domain still count.
pub fn laplacian(map: &CombinatorialMap, kind: LaplacianKind, domain: &[VertexId]) -> Result<DirichletLaplacian> {
    let mut index = vec![usize::MAX; map.num_vertices()];
    for (i, &v) in domain.iter().enumerate() {
        map.check_vertex(v)?;
        if map.is_frontier(v) {
            return Err(Error::Precondition(format!("frontier vertex {} in a Dirichlet domain", map.label(v))));
        }
        index[v] = i;
    }
    let n = domain.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (i, &v) in domain.iter().enumerate() {
        for &h in map.rotation(v) {
            m[(i, i)] += 1.0;
            let j = index[map.head(h)];
            if j != usize::MAX {
                m[(i, j)] -= 1.0;
            }
        }
    }
    if kind == LaplacianKind::Normalized {
        let scale: Vec<f64> = domain.iter().map(|&v| 1.0 / (map.degree(v).max(1) as f64).sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] *= scale[i] * scale[j];
            }
        }
    }
    Ok(DirichletLaplacian { kind, domain: domain.to_vec(), matrix: m })
}

/// Eigenvalues in increasing order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub max_residual: f64,
}

const MAX_SWEEPS: usize = 10_000;

/// Symmetric eigendecomposition; every pair must satisfy
/// `‖Mx - λx‖ <= tol ‖M‖`.
pub fn symmetric_eigen(matrix: &DMatrix<f64>, tol: f64) -> Result<Eigen> {
    let n = matrix.nrows();
    if n == 0 {
        return Ok(Eigen { values: Vec::new(), vectors: DMatrix::zeros(0, 0), max_residual: 0.0 });
    }
    let norm = matrix.norm().max(f64::MIN_POSITIVE);
    let eig = SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::NoConvergence { residual: f64::INFINITY })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let mut max_residual: f64 = 0.0;
    for (c, &lambda) in values.iter().enumerate() {
        let x: DVector<f64> = vectors.column(c).into_owned();
        let r = (matrix * &x - &x * lambda).norm();
        max_residual = max_residual.max(r);
    }
    if max_residual > tol * norm {
        return Err(Error::NoConvergence { residual: max_residual });
    }
    Ok(Eigen { values, vectors, max_residual })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn bottom_of_spectrum(matrix: &DMatrix<f64>, tol: f64) -> Result<f64> {
    symmetric_eigen(matrix, tol)?
        .values
        .first()
        .copied()
        .ok_or_else(|| Error::Precondition("empty matrix".into()))
}

/// Non-frontier vertices at distance `< r` from `v0`.
pub fn dirichlet_domain(map: &CombinatorialMap, v0: VertexId, r: usize) -> Vec<VertexId> {
    let dist = distances_from(map, &[v0]);
    map.vertices().filter(|&v| !map.is_frontier(v) && dist[v].is_some_and(|d| d < r)).collect()
}

/// `a + b √d` with rational `a`, `b` and a positive integer `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSurd {
    pub a: Rational,
    pub b: Rational,
    pub d: BigInt,
}

impl QuadraticSurd {
    /// `√r` for a non-negative rational, with the square part pulled out of
    /// the radicand.
    pub fn sqrt(r: &Rational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Precondition("square root of a negative number".into()));
        }
        // √(n/m) = √(n m) / m
        let prod = r.numer() * r.denom();
        let (outer, inner) = split_square(&prod);
        let b = Rational::new(outer, r.denom().clone());
        if inner.is_one() || b.is_zero() {
            return Ok(QuadraticSurd { a: b, b: Rational::zero(), d: BigInt::one() });
        }
        Ok(QuadraticSurd { a: Rational::zero(), b, d: inner })
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        QuadraticSurd { a: &self.a * s, b: &self.b * s, d: self.d.clone() }
    }

    /// `c - self`
    pub fn subtract_from(&self, c: &Rational) -> Self {
        QuadraticSurd { a: c - &self.a, b: -&self.b, d: self.d.clone() }
    }
}

/// Writes `n = outer² · inner` with `inner` free of small square factors.
fn split_square(n: &BigInt) -> (BigInt, BigInt) {
    if n.is_zero() {
        return (BigInt::zero(), BigInt::one());
    }
    let root = n.sqrt();
    if &root * &root == *n {
        return (root, BigInt::one());
    }
    let mut inner = n.clone();
    let mut outer = BigInt::one();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= inner && p < limit {
        let sq = &p * &p;
        while (&inner % &sq).is_zero() {
            inner /= &sq;
            outer *= &p;
        }
        p += 1;
    }
    (outer, inner)
}

impl fmt::Display for QuadraticSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let radical = if self.b.abs().is_one() { format!("√{}", self.d) } else { format!("{}√{}", self.b.abs(), self.d) };
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{sign}{radical}")
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {sign} {radical}", self.a)
        }
    }
}

/// `1 - √(1 - α²)`, exactly.
pub fn cheeger_spectral_bound(alpha: &Rational) -> Result<QuadraticSurd> {
    let one = Rational::one();
    Ok(QuadraticSurd::sqrt(&(&one - alpha * alpha))?.subtract_from(&one))
}

#[derive(Debug, Clone)]
pub struct SpectralRow {
    pub radius: usize,
    pub domain_size: usize,
    pub bottom_combinatorial: f64,
    pub bottom_normalized: f64,
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub alpha_lower: Rational,
    pub p: usize,
    /// `1 - √(1 - α²)`
    pub bound_normalized: QuadraticSurd,
    /// `(1 - √(1 - α²)) p`
    pub bound_combinatorial: QuadraticSurd,
    pub rows: Vec<SpectralRow>,
    pub tol: f64,
}

impl SpectralReport {
    pub fn bounds_hold(&self) -> bool {
        let (bn, bc) = (self.bound_normalized.to_f64(), self.bound_combinatorial.to_f64());
        self.rows
            .iter()
            .all(|r| bn <= r.bottom_normalized + self.tol && bc <= r.bottom_combinatorial + self.tol)
    }

    pub fn nonincreasing(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[1].bottom_combinatorial <= w[0].bottom_combinatorial + self.tol
                && w[1].bottom_normalized <= w[0].bottom_normalized + self.tol
        })
    }
}

/// Dirichlet bottoms of `Δ` and `Δ̃` on `B_r(v0)` for each radius, compared
/// with the Cheeger bounds computed from all non-frontier vertices.
pub fn verify_spectral_bounds(map: &CombinatorialMap, v0: VertexId, radii: &[usize], tol: f64) -> Result<SpectralReport> {
    map.check_vertex(v0)?;
    let faces = trace_faces(map);
    let interior: Vec<VertexId> = map.vertices().filter(|&v| !map.is_frontier(v)).collect();
    let lb = cheeger_lower_bounds(map, &faces, &interior)?;
    let alpha = lb.alpha.clone().max(Rational::zero());
    let bound_normalized = cheeger_spectral_bound(&alpha)?;
    let bound_combinatorial = bound_normalized.scale(&Rational::from_integer(BigInt::from(lb.p)));
    let mut rows = Vec::new();
    for &r in radii {
        let domain = dirichlet_domain(map, v0, r);
        if domain.is_empty() {
            continue;
        }
        let c = bottom_of_spectrum(&laplacian(map, LaplacianKind::Combinatorial, &domain)?.matrix, tol)?;
        let n = bottom_of_spectrum(&laplacian(map, LaplacianKind::Normalized, &domain)?.matrix, tol)?;
        rows.push(SpectralRow { radius: r, domain_size: domain.len(), bottom_combinatorial: c, bottom_normalized: n });
    }
    Ok(SpectralReport { alpha_lower: lb.alpha, p: lb.p, bound_normalized, bound_combinatorial, rows, tol })
}

/// A spherically symmetric rooted tree: `children[n]` is the number of
/// children of each vertex at depth `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialProfile {
    pub children: Vec<usize>,
}

impl RadialProfile {
    pub fn from_degrees(degree_at: impl Fn(usize) -> usize, depth: usize) -> Self {
        let children = (0..depth).map(|n| if n == 0 { degree_at(0) } else { degree_at(n).saturating_sub(1) }).collect();
        RadialProfile { children }
    }

    /// Profile of a tree generator, if the generator is one.
    pub fn of_generator(kind: &GeneratorKind, depth: usize) -> Option<Self> {
        match *kind {
            GeneratorKind::RegularTree { p } => Some(Self::from_degrees(|_| p, depth)),
            GeneratorKind::RadialTree { base } => Some(Self::from_degrees(|r| base + r, depth)),
            _ => None,
        }
    }

    fn degree(&self, n: usize) -> f64 {
        if n == 0 {
            self.children[0] as f64
        } else {
            self.children[n] as f64 + 1.0
        }
    }

    /// Vertices at depth `n`, saturating.
    pub fn level_size(&self, n: usize) -> u128 {
        self.children[..n].iter().fold(1u128, |acc, &c| acc.saturating_mul(c as u128))
    }

    /// Jacobi matrix of radial functions on depths `from..to`.
    fn jacobi(&self, from: usize, to: usize) -> DMatrix<f64> {
        let n = to - from;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.degree(from + i);
            if i + 1 < n {
                let off = -(self.children[from + i] as f64).sqrt();
                m[(i, i + 1)] = off;
                m[(i + 1, i)] = off;
            }
        }
        m
    }

    /// Dirichlet spectrum of `Δ` on depths `inner..outer`, as sorted
    /// `(eigenvalue, multiplicity)` pairs. The space splits into radial
    /// functions below each depth-`inner` vertex and, for every deeper
    /// vertex, functions on its children summing to zero.
    pub fn dirichlet_spectrum(&self, inner: usize, outer: usize, tol: f64) -> Result<Vec<(f64, u128)>> {
        if outer > self.children.len() {
            return Err(Error::Precondition(format!("profile known to depth {} only", self.children.len())));
        }
        let mut out = Vec::new();
        for k in inner..outer {
            let mult = if k == inner {
                self.level_size(inner)
            } else {
                self.level_size(k - 1).saturating_mul(self.children[k - 1].saturating_sub(1) as u128)
            };
            if mult == 0 {
                continue;
            }
            for v in symmetric_eigen(&self.jacobi(k, outer), tol)?.values {
                out.push((v, mult));
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(out)
    }
}

/// The `k` smallest eigenvalues, repeated by multiplicity.
pub fn smallest_with_multiplicity(spectrum: &[(f64, u128)], k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k);
    for &(v, m) in spectrum {
        for _ in 0..m.min(k as u128) {
            if out.len() == k {
                return out;
            }
            out.push(v);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct EssentialProxyRow {
    pub radius: usize,
    pub alpha_lower: Rational,
    pub smallest: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EssentialProxyReport {
    pub width: usize,
    pub rows: Vec<EssentialProxyRow>,
}

impl EssentialProxyReport {
    pub fn alpha_nondecreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].alpha_lower <= w[1].alpha_lower)
    }

    /// Each of the k smallest eigenvalues grows strictly from row to row.
    pub fn eigenvalues_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| {
            w[0].smallest.len() == w[1].smallest.len()
                && w[0].smallest.iter().zip(&w[1].smallest).all(|(a, b)| b > a)
        })
    }
}

/// Lower bound on `α` over `{v : d(v0, v) >= r}` and the `k` smallest
/// Dirichlet eigenvalues of `Δ` on the annulus `r <= d < r + width`, for a
/// spherically symmetric tree.
pub fn essential_spectrum_proxy(
    profile: &RadialProfile,
    radii: &[usize],
    width: usize,
    k: usize,
    tol: f64,
) -> Result<EssentialProxyReport> {
    let mut rows = Vec::new();
    for &r in radii {
        let outer = r + width;
        if outer > profile.children.len() {
            return Err(Error::Precondition(format!("profile known to depth {} only", profile.children.len())));
        }
        // p over the region and q = ∞ give α >= 1 - 2/p.
        let p = (r..outer).map(|n| profile.degree(n) as i64).min().unwrap_or(0);
        let alpha_lower = if p > 0 { Rational::one() - Rational::new(2.into(), p.into()) } else { Rational::zero() };
        let spectrum = profile.dirichlet_spectrum(r, outer, tol)?;
        rows.push(EssentialProxyRow { radius: r, alpha_lower, smallest: smallest_with_multiplicity(&spectrum, k) });
    }
    Ok(EssentialProxyReport { width, rows })
}

/// The same proxy on a materialised map, with dense eigensolves.
pub fn essential_spectrum_proxy_dense(
    map: &CombinatorialMap,
    v0: VertexId,
    radii: &[usize],
    width: usize,
    k: usize,
    tol: f64,
) -> Result<EssentialProxyReport> {
    let faces = trace_faces(map);
    let dist = distances_from(map, &[v0]);
    let mut rows = Vec::new();
    for &r in radii {
        let domain: Vec<VertexId> = map
            .vertices()
            .filter(|&v| !map.is_frontier(v) && dist[v].is_some_and(|d| d >= r && d < r + width))
            .collect();
        if domain.is_empty() {
            return Err(Error::EmptySet);
        }
        let alpha_lower = cheeger_lower_bounds(map, &faces, &domain)?.alpha;
        let eig = symmetric_eigen(&laplacian(map, LaplacianKind::Combinatorial, &domain)?.matrix, tol)?;
        let smallest = eig.values.into_iter().take(k).collect();
        rows.push(EssentialProxyRow { radius: r, alpha_lower, smallest });
    }
    Ok(EssentialProxyReport { width, rows })
}
