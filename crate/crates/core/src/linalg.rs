//! Sparse exact linear algebra over the rationals, and a dense rank routine
//! modulo a large prime used as an independent oracle.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::coeff::Rational;

/// Sparse vector: strictly increasing column indices, nonzero values.
pub(crate) type Row = Vec<(usize, Rational)>;

/// `a + k*b`.
fn axpy(a: &Row, k: &Rational, b: &Row) -> Row {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, k * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + k * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn entry(row: &Row, col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| &row[i].1)
}

/// Reduced row echelon form, built incrementally. Rows are keyed by their
/// pivot column, have pivot entry 1, and carry no other pivot column; the
/// result depends only on the row space, not on insertion order.
#[derive(Clone, Debug, Default)]
pub(crate) struct Rref {
    rows: BTreeMap<usize, Row>,
}

impl Rref {
    pub fn new() -> Self {
        Rref::default()
    }

    #[cfg(test)]
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &BTreeMap<usize, Row> {
        &self.rows
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Normal form of `v` modulo the row space: no pivot columns remain.
    pub fn reduce(&self, v: &Row) -> Row {
        let mut out = v.clone();
        let pivots: Vec<(usize, Rational)> =
            v.iter().filter(|(c, _)| self.rows.contains_key(c)).cloned().collect();
        for (c, k) in pivots {
            out = axpy(&out, &-k, &self.rows[&c]);
        }
        out
    }

    /// Adds a row; returns whether the rank grew.
    pub fn insert(&mut self, v: &Row) -> bool {
        let r = self.reduce(v);
        let Some((p, lead)) = r.first().cloned() else { return false };
        let inv = lead.recip();
        let r: Row = r.into_iter().map(|(c, x)| (c, x * &inv)).collect();
        for row in self.rows.values_mut() {
            if let Some(k) = entry(row, p).cloned() {
                *row = axpy(row, &-k, &r);
            }
        }
        self.rows.insert(p, r);
        true
    }
}

/// Solution set of `Σ a_j p_j + c = 0` over the rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Affine {
    Inconsistent,
    Solutions { particular: Vec<Rational>, directions: Vec<Vec<Rational>> },
}

/// Solves equations given as sparse rows over `n` unknowns, the constant
/// term sitting in column `n`.
pub(crate) fn solve_affine(n: usize, equations: &[Row]) -> Affine {
    let mut rref = Rref::new();
    for e in equations {
        rref.insert(e);
    }
    if rref.is_pivot(n) {
        return Affine::Inconsistent;
    }
    let mut particular = alloc::vec![Rational::zero(); n];
    for (&p, row) in rref.rows() {
        if let Some(c) = entry(row, n) {
            particular[p] = -c;
        }
    }
    let mut directions = Vec::new();
    for f in (0..n).filter(|&f| !rref.is_pivot(f)) {
        let mut d = alloc::vec![Rational::zero(); n];
        d[f] = Rational::one();
        for (&p, row) in rref.rows() {
            if let Some(c) = entry(row, f) {
                d[p] = -c;
            }
        }
        directions.push(d);
    }
    Affine::Solutions { particular, directions }
}

pub(crate) const PRIME: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn int_mod(x: &BigInt) -> u64 {
    let p = BigInt::from(PRIME);
    x.mod_floor(&p).to_u64().expect("reduced below the prime")
}

/// Image of a rational in `Z/p`, or `None` if the denominator vanishes.
pub(crate) fn rational_mod(x: &Rational) -> Option<u64> {
    let d = int_mod(x.denom());
    if d == 0 {
        return None;
    }
    let n = int_mod(&x.numer().abs());
    let n = if x.is_negative() { (PRIME - n) % PRIME } else { n };
    Some(mulmod(n, powmod(d, PRIME - 2)))
}

/// Rank of a dense matrix over `Z/p`.
pub(crate) fn rank_mod_p(mut m: Vec<Vec<u64>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, r);
        let inv = powmod(m[rank][c], PRIME - 2);
        for x in m[rank].iter_mut() {
            *x = mulmod(*x, inv);
        }
        let pivot = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let k = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + PRIME - mulmod(k, y)) % PRIME;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of a sparse rational matrix estimated through a random projection
/// modulo a 61-bit prime: `rank(R·M)` for a random `R` with as many rows as
/// `M` has columns. Equals the true rank with overwhelming probability.
pub(crate) fn randomized_rank(rows: &[Row], cols: usize, seed: u64) -> usize {
    let k = cols.min(rows.len());
    if k == 0 {
        return 0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut proj = alloc::vec![alloc::vec![0u64; cols]; k];
    for row in rows {
        let modded: Vec<(usize, u64)> =
            row.iter().map(|(c, x)| (*c, rational_mod(x).expect("denominator invertible mod p"))).collect();
        for target in proj.iter_mut() {
            let r = rng.next_u64() % PRIME;
            for &(c, x) in &modded {
                target[c] = (target[c] + mulmod(r, x)) % PRIME;
            }
        }
    }
    rank_mod_p(proj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q, qi};

    fn row(v: &[(usize, i64)]) -> Row {
        v.iter().map(|&(c, x)| (c, qi(x))).collect()
    }

    #[test]
    fn rref_is_order_independent() {
        let rs = [row(&[(0, 1), (1, 2), (3, 1)]), row(&[(1, 1), (2, -1)]), row(&[(0, 2), (2, 4), (3, 2)])];
        let mut a = Rref::new();
        for r in &rs {
            a.insert(r);
        }
        let mut b = Rref::new();
        for r in rs.iter().rev() {
            b.insert(r);
        }
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.rank(), 2);
        assert!(a.reduce(&rs[2]).is_empty());
    }

    #[test]
    fn affine_solutions() {
        // p0 + p1 - 1 = 0
        let e = alloc::vec![alloc::vec![(0, qi(1)), (1, qi(1)), (2, qi(-1))]];
        let Affine::Solutions { particular, directions } = solve_affine(2, &e) else { panic!() };
        assert_eq!(particular, alloc::vec![qi(1), qi(0)]);
        assert_eq!(directions, alloc::vec![alloc::vec![qi(-1), qi(1)]]);
        let bad = alloc::vec![row(&[(0, 1)]), row(&[(0, 1), (1, 1)])];
        assert_eq!(solve_affine(1, &bad), Affine::Inconsistent);
    }

    #[test]
    fn modular_images() {
        let half = rational_mod(&q(1, 2)).unwrap();
        assert_eq!(mulmod(half, 2), 1);
        let neg = rational_mod(&q(-3, 1)).unwrap();
        assert_eq!((neg + 3) % PRIME, 0);
    }

    #[test]
    fn randomized_rank_matches() {
        let rs = [row(&[(0, 1), (1, 2)]), row(&[(0, 2), (1, 4)]), row(&[(2, 5)])];
        assert_eq!(randomized_rank(&rs, 3, 7), 2);
    }
}
