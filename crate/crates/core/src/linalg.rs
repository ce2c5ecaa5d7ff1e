//! Exact and modular rank computations, rational kernels, and a floating
//! point rank for cross-checks.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Rational;

/// The Mersenne prime `2^61 - 1`.
pub const MODULUS: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % MODULUS as u128) as u64
}

fn add_mod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MODULUS {
        s - MODULUS
    } else {
        s
    }
}

fn sub_mod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MODULUS - b
    }
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b);
        }
        b = mul_mod(b, b);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, MODULUS - 2)
}

fn bigint_mod(n: &BigInt) -> u64 {
    let m = BigInt::from(MODULUS);
    n.mod_floor(&m).to_u64().unwrap()
}

/// Image of a rational in `Z/pZ`; `None` if `p` divides the denominator.
pub fn rational_mod_p(r: &Rational) -> Option<u64> {
    let d = bigint_mod(r.denom());
    if d == 0 {
        return None;
    }
    Some(mul_mod(bigint_mod(r.numer()), inv_mod(d)))
}

/// Rows kept in reduced echelon form modulo `MODULUS`, accepting new rows
/// one at a time.
#[derive(Debug, Clone)]
pub struct ModEchelon {
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl ModEchelon {
    pub fn new(cols: usize) -> Self {
        ModEchelon { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.cols
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    /// Adds `row` to the span; returns whether the rank grew.
    pub fn insert(&mut self, mut row: Vec<u64>) -> bool {
        debug_assert_eq!(row.len(), self.cols);
        for (r, &p) in self.rows.iter().zip(&self.pivots) {
            let c = row[p];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(r) {
                    if y != 0 {
                        *x = sub_mod(*x, mul_mod(c, y));
                    }
                }
            }
        }
        let Some(p) = row.iter().position(|&x| x != 0) else { return false };
        let inv = inv_mod(row[p]);
        for x in row.iter_mut() {
            *x = mul_mod(*x, inv);
        }
        for r in self.rows.iter_mut() {
            let c = r[p];
            if c != 0 {
                for (x, &y) in r.iter_mut().zip(&row) {
                    if y != 0 {
                        *x = sub_mod(*x, mul_mod(c, y));
                    }
                }
            }
        }
        self.rows.push(row);
        self.pivots.push(p);
        true
    }
}

pub fn rank_mod_p(rows: impl IntoIterator<Item = Vec<u64>>, cols: usize) -> usize {
    let mut e = ModEchelon::new(cols);
    for r in rows {
        e.insert(r);
        if e.is_full() {
            break;
        }
    }
    e.rank()
}

/// Product of a row vector with a sparse matrix given as `(row, col, value)`
/// triples, modulo `MODULUS`.
pub fn row_times_sparse(row: &[u64], entries: &[(usize, usize, u64)], cols: usize) -> Vec<u64> {
    let mut out = vec![0; cols];
    for &(i, j, a) in entries {
        if row[i] != 0 {
            out[j] = add_mod(out[j], mul_mod(row[i], a));
        }
    }
    out
}

/// Rank of an integer matrix by fraction-free Bareiss elimination.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let v = (&m[rank][c] * &m[r][k] - &m[r][c] * &m[rank][k]) / &prev;
                m[r][k] = v;
            }
            m[r][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Clears denominators row by row.
pub fn integer_rows(m: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect()
}

/// Basis of the right kernel of a rational matrix, by reduced row echelon
/// form. Each basis vector has a 1 in its free coordinate.
pub fn rational_kernel(m: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = Rational::one() / &a[r][c];
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); cols];
        v[free] = Rational::one();
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = -a[i][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Numerical rank: singular values above `rel_tol` times the largest.
pub fn svd_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Nearest rational with denominator at most `max_den`, by continued
/// fractions.
pub fn rationalize(x: f64, max_den: i64) -> Rational {
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i64;
        let (p2, q2) = (ai.saturating_mul(p1).saturating_add(p0), ai.saturating_mul(q1).saturating_add(q0));
        if q2 > max_den || q2 <= 0 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = v - a;
        if frac.abs() < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return Rational::from_integer(BigInt::from(x.round() as i64));
    }
    Rational::new(BigInt::from(p1), BigInt::from(q1))
}

/// `true` if every entry of the vector is zero.
pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Scales a nonzero vector so that its largest entry in absolute value is 1
/// and the first nonzero entry is positive.
pub fn normalize(v: &mut [Rational]) {
    let Some(first) = v.iter().find(|x| !x.is_zero()).cloned() else { return };
    let max = v.iter().map(|x| x.abs()).max().unwrap();
    let s = if first.is_negative() { -max } else { max };
    for x in v.iter_mut() {
        *x /= &s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn modular_and_exact_ranks_agree() {
        let m = vec![
            vec![rat(1, 2), rat(1, 3), int(0)],
            vec![int(1), rat(2, 3), int(0)],
            vec![int(0), int(1), int(5)],
        ];
        assert_eq!(bareiss_rank(integer_rows(&m)), 2);
        let rows: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|x| rational_mod_p(x).unwrap()).collect()).collect();
        assert_eq!(rank_mod_p(rows, 3), 2);
        let f = DMatrix::from_fn(3, 3, |i, j| crate::rational::to_f64(&m[i][j]));
        assert_eq!(svd_rank(&f, 1e-10), 2);
        let k = rational_kernel(&m, 3);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![rat(10, 3), int(-5), int(1)]);
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(6.0000000001, 1000), int(6));
        assert_eq!(rationalize(-0.75, 1000), rat(-3, 4));
        assert_eq!(rationalize(1.0 / 7.0, 1000), rat(1, 7));
    }

    #[test]
    fn normalization() {
        let mut v = vec![int(0), int(-2), int(2), int(1)];
        normalize(&mut v);
        assert_eq!(v, vec![int(0), int(1), int(-1), rat(-1, 2)]);
    }
}
