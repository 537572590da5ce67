//! Fraction-free integer linear algebra shared by the hull kernel.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Integer type the kernel can run on. `i128` is used when a determinant
/// bound proves it cannot overflow; `BigInt` otherwise.
pub(crate) trait ExactInt: Clone + Debug + Hash + Eq + Ord + Integer + Signed {
    fn from_big(b: &BigInt) -> Self;
    fn to_big(&self) -> BigInt;
}

impl ExactInt for i128 {
    fn from_big(b: &BigInt) -> Self {
        b.to_i128().expect("value checked against the i128 bound")
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ExactInt for BigInt {
    fn from_big(b: &BigInt) -> Self {
        b.clone()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

pub(crate) fn dot<T: ExactInt>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Bareiss determinant of a square matrix.
pub(crate) fn determinant<T: ExactInt>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    if n == 0 {
        return T::one();
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone())
                    / prev.clone();
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

/// Rank of a (possibly rectangular) integer matrix.
pub(crate) fn rank<T: ExactInt>(mut m: Vec<Vec<T>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    let mut prev = T::one();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (m[i][j].clone() * m[r][c].clone() - m[i][c].clone() * m[r][j].clone())
                    / prev.clone();
                m[i][j] = v;
            }
            m[i][c] = T::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Generalized cross product of `k-1` vectors in `Z^k`, divided by the gcd of
/// its entries. The result is orthogonal to every row.
pub(crate) fn primitive_normal<T: ExactInt>(rows: &[Vec<T>], k: usize) -> Vec<T> {
    debug_assert_eq!(rows.len() + 1, k);
    let mut w: Vec<T> = (0..k)
        .map(|c| {
            let minor: Vec<Vec<T>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != c)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let d = determinant(minor);
            if c % 2 == 1 {
                -d
            } else {
                d
            }
        })
        .collect();
    make_primitive(&mut w);
    w
}

pub(crate) fn make_primitive<T: ExactInt>(w: &mut [T]) {
    let g = w.iter().fold(T::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in w.iter_mut() {
            *x = x.clone() / g.clone();
        }
    }
}

/// Reduced row echelon data of rational vectors: returns the indices of the
/// rows that were independent when processed in order, and the pivot column
/// of each one.
pub(crate) fn greedy_independent(rows: &[Vec<BigRational>]) -> (Vec<usize>, Vec<usize>) {
    let mut basis: Vec<(Vec<BigRational>, usize)> = Vec::new();
    let mut picked = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for (b, pc) in &basis {
            if !v[*pc].is_zero() {
                let f = v[*pc].clone() / b[*pc].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= f.clone() * y;
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            // keep basis reduced on the new pivot column
            for (b, _) in basis.iter_mut() {
                if !b[pc].is_zero() {
                    let f = b[pc].clone() / v[pc].clone();
                    for (x, y) in b.iter_mut().zip(&v) {
                        *x -= f.clone() * y;
                    }
                }
            }
            basis.push((v, pc));
            picked.push(idx);
        }
    }
    let pivots = basis.iter().map(|(_, pc)| *pc).collect();
    (picked, pivots)
}

/// `ln(2)`-free upper bound, in bits, for any k×k minor of a matrix whose
/// entries are bounded by `max_entry`.
pub(crate) fn hadamard_bits(k: usize, max_entry: &BigInt) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let m = max_entry.bits() as f64 + 1.0;
    k as f64 * (0.5 * (k as f64).log2() + m)
}
