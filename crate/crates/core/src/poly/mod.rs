//! Sparse multivariate polynomials keyed by exponent vectors.
//!
//! Two coefficient domains are supported: exact rationals ([`ExactPoly`]) for
//! everything that feeds polyhedral geometry, and complex doubles
//! ([`NumericPoly`]) for path tracking. Conversion only goes one way,
//! exact to numeric.

mod parse;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use parse::{parse_polynomial, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error("direction has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("the zero polynomial has no weighted value")]
    ZeroPolynomial,
}

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        ExponentVector(entries)
    }

    pub fn zero(arity: usize) -> Self {
        ExponentVector(vec![0; arity])
    }

    /// The `i`-th unit vector.
    pub fn unit(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        ExponentVector(e)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn dot(&self, q: &[i64]) -> i64 {
        self.0.iter().zip(q).map(|(&a, &b)| a as i64 * b).sum()
    }

    /// Componentwise sum; both vectors must have equal length.
    pub fn add(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Places `self` at `offset` inside a zero vector of length `arity`.
    pub fn embed(&self, arity: usize, offset: usize) -> ExponentVector {
        let mut e = vec![0; arity];
        e[offset..offset + self.0.len()].copy_from_slice(&self.0);
        ExponentVector(e)
    }

    pub fn to_rational(&self) -> Vec<BigRational> {
        self.0
            .iter()
            .map(|&a| BigRational::from_integer(BigInt::from(a)))
            .collect()
    }
}

impl Ord for ExponentVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for ExponentVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Support of a polynomial: the exponents of its nonzero terms.
pub type SupportSet = BTreeSet<ExponentVector>;

/// Which coefficient field a polynomial lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Exact,
    Numeric,
}

/// Arithmetic needed from a coefficient type.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + std::ops::Neg<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
{
    const DOMAIN: Domain;
    fn from_u32(k: u32) -> Self;
}

impl Coefficient for BigRational {
    const DOMAIN: Domain = Domain::Exact;
    fn from_u32(k: u32) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
}

impl Coefficient for Complex64 {
    const DOMAIN: Domain = Domain::Numeric;
    fn from_u32(k: u32) -> Self {
        Complex64::new(k as f64, 0.0)
    }
}

/// Sparse polynomial in `arity` variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<C> {
    arity: usize,
    terms: BTreeMap<ExponentVector, C>,
}

pub type ExactPoly = Polynomial<BigRational>;
pub type NumericPoly = Polynomial<Complex64>;

impl<C: Coefficient> Polynomial<C> {
    pub fn zero(arity: usize) -> Self {
        Polynomial {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: C) -> Self {
        Self::from_terms(arity, [(ExponentVector::zero(arity), c)])
    }

    /// The polynomial `x_i`.
    pub fn variable(arity: usize, i: usize) -> Self {
        Self::from_terms(arity, [(ExponentVector::unit(arity, i), C::one())])
    }

    /// Collects like terms and drops zeros.
    ///
    /// Panics if an exponent vector has the wrong length.
    pub fn from_terms<I>(arity: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExponentVector, C)>,
    {
        let mut p = Self::zero(arity);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: ExponentVector, c: C) {
        assert_eq!(e.len(), self.arity, "exponent length must equal arity");
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(e, sum);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> Domain {
        C::DOMAIN
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExponentVector, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> Option<&C> {
        self.terms.get(e)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.degree()).max().unwrap_or(0)
    }

    /// True for the zero polynomial and for nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.degree() == 0)
    }

    pub fn support(&self) -> SupportSet {
        self.terms.keys().cloned().collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        Self::from_terms(
            self.arity,
            self.terms.iter().map(|(e, c)| (e.clone(), c.clone() * s.clone())),
        )
    }

    /// Multiplies by the monomial `x^e`.
    pub fn mul_monomial(&self, e: &ExponentVector) -> Self {
        Polynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(a, c)| (a.add(e), c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut p = Self::zero(self.arity);
        for (a, c) in &self.terms {
            for (b, d) in &other.terms {
                p.add_term(a.add(b), c.clone() * d.clone());
            }
        }
        p
    }

    /// Re-reads the polynomial in a ring of `arity` variables, with its own
    /// variables placed starting at `offset`.
    pub fn embed(&self, arity: usize, offset: usize) -> Self {
        assert!(offset + self.arity <= arity);
        Polynomial {
            arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.embed(arity, offset), c.clone()))
                .collect(),
        }
    }

    /// Formal partial derivative with respect to variable `i` (0-based).
    pub fn partial_derivative(&self, i: usize) -> Result<Self, PolyError> {
        if i >= self.arity {
            return Err(PolyError::IndexOutOfRange {
                index: i,
                arity: self.arity,
            });
        }
        let mut p = Self::zero(self.arity);
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut d = e.0.clone();
            d[i] -= 1;
            p.add_term(ExponentVector(d), c.clone() * C::from_u32(k));
        }
        Ok(p)
    }

    fn check_direction(&self, q: &[i64]) -> Result<(), PolyError> {
        if q.len() != self.arity {
            return Err(PolyError::LengthMismatch {
                expected: self.arity,
                got: q.len(),
            });
        }
        if q.iter().all(|&x| x == 0) {
            return Err(PolyError::ZeroDirection);
        }
        Ok(())
    }

    /// `min ⟨q, α⟩` over the support.
    pub fn weighted_value(&self, q: &[i64]) -> Result<i64, PolyError> {
        self.check_direction(q)?;
        self.terms
            .keys()
            .map(|e| e.dot(q))
            .min()
            .ok_or(PolyError::ZeroPolynomial)
    }

    /// Sum of the terms whose exponents minimize `⟨q, ·⟩`.
    pub fn face_polynomial(&self, q: &[i64]) -> Result<Self, PolyError> {
        self.check_direction(q)?;
        Ok(self.minimizing_terms(q))
    }

    /// Like [`Self::face_polynomial`] but accepts `q = 0`, which selects
    /// every term. `q` must have length `arity`.
    pub fn minimizing_terms(&self, q: &[i64]) -> Self {
        let Some(min) = self.terms.keys().map(|e| e.dot(q)).min() else {
            return Self::zero(self.arity);
        };
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.dot(q) == min)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }
}

impl Polynomial<BigRational> {
    pub fn to_numeric(&self) -> NumericPoly {
        Polynomial {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), Complex64::new(rational_to_f64(c), 0.0)))
                .collect(),
        }
    }

    /// Evaluates at a complex point after converting coefficients to doubles.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64, PolyError> {
        self.to_numeric().evaluate(point)
    }

    /// Renders the polynomial in the input grammar, highest terms first.
    pub fn to_text<S: AsRef<str>>(&self, vars: &[S]) -> String {
        assert_eq!(vars.len(), self.arity);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.degree() == 0 {
                factors.push(mag.to_string());
            }
            for (v, &a) in vars.iter().zip(e.entries()) {
                match a {
                    0 => {}
                    1 => factors.push(v.as_ref().to_string()),
                    _ => factors.push(format!("{}^{}", v.as_ref(), a)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl Polynomial<Complex64> {
    /// Direct evaluation of `Σ a_α x^α`.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64, PolyError> {
        if point.len() != self.arity {
            return Err(PolyError::LengthMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| c * monomial_value(e.entries(), point))
            .sum())
    }
}

pub(crate) fn monomial_value(e: &[u32], point: &[Complex64]) -> Complex64 {
    e.iter()
        .zip(point)
        .filter(|(&a, _)| a > 0)
        .fold(Complex64::new(1.0, 0.0), |acc, (&a, z)| acc * z.powu(a))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large numerator/denominator: scale down before dividing.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000) as usize;
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn circle() -> ExactPoly {
        parse_polynomial("x^2 + y^2 - 1", &["x", "y"]).unwrap()
    }

    #[test]
    fn derivative_power_rule() {
        let p = parse_polynomial("3*x^2*y + y", &["x", "y"]).unwrap();
        let want = parse_polynomial("6*x*y", &["x", "y"]).unwrap();
        assert_eq!(p.partial_derivative(0).unwrap(), want);
        assert_eq!(
            circle().partial_derivative(0).unwrap(),
            parse_polynomial("2x", &["x", "y"]).unwrap()
        );
        let x2 = parse_polynomial("x^2", &["x", "y"]).unwrap();
        assert!(x2.partial_derivative(1).unwrap().is_zero());
        assert_eq!(
            x2.partial_derivative(2),
            Err(PolyError::IndexOutOfRange { index: 2, arity: 2 })
        );
    }

    #[test]
    fn support_reads_exponents() {
        let s: Vec<_> = circle().support().into_iter().map(|e| e.0).collect();
        assert_eq!(s, vec![vec![0, 0], vec![0, 2], vec![2, 0]]);
        assert!(ExactPoly::zero(2).support().is_empty());
        let l = parse_polynomial("x - 3 + 2*x*l", &["x", "y", "l"]).unwrap();
        let s: BTreeSet<Vec<u32>> = l.support().into_iter().map(|e| e.0).collect();
        let want: BTreeSet<Vec<u32>> = [vec![1, 0, 0], vec![0, 0, 0], vec![1, 0, 1]].into();
        assert_eq!(s, want);
    }

    #[test]
    fn face_polynomial_examples() {
        let vars = ["x", "y"];
        let p = circle();
        let f = |w: [i64; 2]| p.face_polynomial(&w).unwrap().to_text(&vars);
        assert_eq!(f([-1, -1]), "x^2 + y^2");
        assert_eq!(f([1, 1]), "-1");
        assert_eq!(f([0, -1]), "y^2");
        assert_eq!(p.face_polynomial(&[0, 0]), Err(PolyError::ZeroDirection));
        assert!(ExactPoly::zero(2).face_polynomial(&[1, 0]).unwrap().is_zero());
    }

    #[test]
    fn weighted_value_examples() {
        let p = circle();
        assert_eq!(p.weighted_value(&[-1, -1]), Ok(-2));
        assert_eq!(p.weighted_value(&[1, 1]), Ok(0));
        let x = parse_polynomial("x", &["x", "y"]).unwrap();
        assert_eq!(x.weighted_value(&[5, 7]), Ok(5));
        assert_eq!(
            ExactPoly::zero(2).weighted_value(&[1, 1]),
            Err(PolyError::ZeroPolynomial)
        );
    }

    #[test]
    fn evaluate_examples() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let p = circle();
        assert_eq!(p.evaluate(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap(), c(0.0, 0.0));
        assert_eq!(p.evaluate(&[c(3.0, 0.0), c(4.0, 0.0)]).unwrap(), c(24.0, 0.0));
        let xy = parse_polynomial("x*y", &["x", "y"]).unwrap();
        assert_eq!(xy.evaluate(&[c(2.0, 0.0), c(0.0, 1.0)]).unwrap(), c(0.0, 2.0));
        assert!(matches!(
            p.evaluate(&[c(1.0, 0.0)]),
            Err(PolyError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn printing_is_canonical() {
        let vars = ["x", "y"];
        let p = parse_polynomial("1/2*x - y^3", &vars).unwrap();
        assert_eq!(p.to_text(&vars), "-y^3 + 1/2*x");
        assert_eq!(ExactPoly::zero(2).to_text(&vars), "0");
        let r = parse_polynomial("-3/4", &vars).unwrap();
        assert_eq!(r.to_text(&vars), "-3/4");
        assert_eq!(r.coefficient(&ExponentVector::zero(2)), Some(&q(-3, 4)));
    }

    #[test]
    fn embed_moves_variables() {
        let p = circle().embed(3, 0);
        assert_eq!(p.to_text(&["x", "y", "l"]), "x^2 + y^2 - 1");
        let v = ExactPoly::variable(2, 1).embed(4, 2);
        assert_eq!(v.to_text(&["a", "b", "c", "d"]), "d");
    }
}
