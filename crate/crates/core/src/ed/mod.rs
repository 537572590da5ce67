//! The Lagrange system of the Euclidean distance problem, its Newton
//! polytopes, the mixed-volume bound and the face classifier.
//!
//! Variables are ordered `(x_1, …, x_n, λ_1, …, λ_m)` and all indices are
//! 0-based in code.

mod random;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Polytope};
use crate::mixed_volume::{mixed_volume, Algorithm, MixedVolumeError, MixedVolumeResult};
use crate::poly::{ExactPoly, ExponentVector, PolyError, SupportSet};

pub use random::{random_coefficient, randomize_coefficients, sample_u};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EdError {
    #[error("need n > m >= 1, got n = {n}, m = {m}")]
    Shape { n: usize, m: usize },
    #[error("polynomial {index} has arity {got}, expected {expected}")]
    Arity {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("polynomial {index} is constant")]
    ConstantPolynomial { index: usize },
    #[error("u has length {got}, expected {expected}")]
    ULength { expected: usize, got: usize },
    #[error("u has a zero coordinate at index {index}")]
    ZeroU { index: usize },
    #[error("direction has length {got}, expected {expected}")]
    DirectionLength { expected: usize, got: usize },
    #[error("direction vector must be nonzero")]
    ZeroDirection,
    #[error(transparent)]
    MixedVolume(#[from] MixedVolumeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `X = {f_1 = … = f_m = 0} ⊂ C^n` together with a data point `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct EDProblem {
    vars: Vec<String>,
    polys: Vec<ExactPoly>,
    u: Vec<BigRational>,
}

impl EDProblem {
    pub fn new(
        vars: Vec<String>,
        polys: Vec<ExactPoly>,
        u: Vec<BigRational>,
    ) -> Result<Self, EdError> {
        let n = vars.len();
        let m = polys.len();
        if m == 0 || m >= n {
            return Err(EdError::Shape { n, m });
        }
        for (index, f) in polys.iter().enumerate() {
            if f.arity() != n {
                return Err(EdError::Arity {
                    index,
                    expected: n,
                    got: f.arity(),
                });
            }
            if f.is_constant() {
                return Err(EdError::ConstantPolynomial { index });
            }
        }
        if u.len() != n {
            return Err(EdError::ULength {
                expected: n,
                got: u.len(),
            });
        }
        Ok(EDProblem { vars, polys, u })
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn m(&self) -> usize {
        self.polys.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn polys(&self) -> &[ExactPoly] {
        &self.polys
    }

    pub fn u(&self) -> &[BigRational] {
        &self.u
    }

    pub fn with_u(&self, u: Vec<BigRational>) -> Result<Self, EdError> {
        Self::new(self.vars.clone(), self.polys.clone(), u)
    }

    /// Same supports, coefficients replaced by seeded random rationals.
    pub fn with_random_coefficients(&self, seed: u64) -> Self {
        let mut rng = random::rng(seed);
        EDProblem {
            vars: self.vars.clone(),
            polys: self
                .polys
                .iter()
                .map(|f| randomize_coefficients(f, &mut rng))
                .collect(),
            u: self.u.clone(),
        }
    }

    /// Names of the multiplier variables, chosen to avoid the `x` names.
    pub fn lambda_names(&self) -> Vec<String> {
        let taken: BTreeSet<&str> = self.vars.iter().map(String::as_str).collect();
        let mut base = String::from("l");
        while (1..=self.m()).any(|j| taken.contains(format!("{base}{j}").as_str())) {
            base.push('_');
        }
        (1..=self.m()).map(|j| format!("{base}{j}")).collect()
    }

    /// `x` names followed by the multiplier names.
    pub fn all_var_names(&self) -> Vec<String> {
        let mut names = self.vars.clone();
        names.extend(self.lambda_names());
        names
    }

    fn check_u_nonzero(&self) -> Result<(), EdError> {
        match self.u.iter().position(Zero::is_zero) {
            Some(index) => Err(EdError::ZeroU { index }),
            None => Ok(()),
        }
    }

    fn check_direction(&self, w: &[i64]) -> Result<(), EdError> {
        let d = self.n() + self.m();
        if w.len() != d {
            return Err(EdError::DirectionLength {
                expected: d,
                got: w.len(),
            });
        }
        if w.iter().all(|&x| x == 0) {
            return Err(EdError::ZeroDirection);
        }
        Ok(())
    }
}

/// `F_j = f_j` and `L_i = x_i − u_i + Σ_j λ_j ∂_i f_j` in `n + m` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangeSystem {
    pub f: Vec<ExactPoly>,
    pub l: Vec<ExactPoly>,
}

impl LagrangeSystem {
    pub fn arity(&self) -> usize {
        self.f.len() + self.l.len()
    }

    /// `F_1, …, F_m, L_1, …, L_n`.
    pub fn equations(&self) -> Vec<ExactPoly> {
        self.f.iter().chain(&self.l).cloned().collect()
    }
}

pub fn build_lagrange_system(problem: &EDProblem) -> LagrangeSystem {
    let n = problem.n();
    let d = n + problem.m();
    let f = problem.polys.iter().map(|p| p.embed(d, 0)).collect();
    let l = (0..n)
        .map(|i| {
            let mut li = ExactPoly::variable(d, i)
                .add(&ExactPoly::constant(d, -problem.u[i].clone()));
            for (j, fj) in problem.polys.iter().enumerate() {
                let di = fj.partial_derivative(i).expect("index below arity").embed(d, 0);
                li = li.add(&di.mul_monomial(&ExponentVector::unit(d, n + j)));
            }
            li
        })
        .collect();
    LagrangeSystem { f, l }
}

/// `{ε_i} ∪ {0} ∪ {(α − ε_i) ⊕ η_j : α ∈ supp f_j, α_i ≥ 1}`, read off the
/// supports of the `f_j` without expanding `L_i`.
pub fn structural_support(problem: &EDProblem, i: usize) -> SupportSet {
    let n = problem.n();
    let d = n + problem.m();
    let mut s = SupportSet::new();
    s.insert(ExponentVector::unit(d, i));
    s.insert(ExponentVector::zero(d));
    for (j, f) in problem.polys.iter().enumerate() {
        for (a, _) in f.terms() {
            if a.entries()[i] >= 1 {
                let mut e = a.entries().to_vec();
                e[i] -= 1;
                e.resize(d, 0);
                e[n + j] = 1;
                s.insert(ExponentVector::new(e));
            }
        }
    }
    s
}

fn support_points(s: &SupportSet) -> Vec<Vec<i64>> {
    s.iter()
        .map(|e| e.entries().iter().map(|&a| a as i64).collect())
        .collect()
}

/// Newton polytopes `P_1, …, P_m` of the `f_j` and `P′_1, …, P′_n` of the
/// `L_i`, all in `R^{n+m}`.
#[derive(Clone, Debug)]
pub struct EDPolytopes {
    pub p: Vec<Polytope>,
    pub p_prime: Vec<Polytope>,
    /// Indices `i` whose expanded `L_i` has a support different from the
    /// structural one.
    pub support_mismatches: Vec<usize>,
}

impl EDPolytopes {
    /// `P_1, …, P_m, P′_1, …, P′_n`.
    pub fn all(&self) -> Vec<Polytope> {
        self.p.iter().chain(&self.p_prime).cloned().collect()
    }
}

pub fn ed_polytopes(problem: &EDProblem) -> Result<EDPolytopes, EdError> {
    problem.check_u_nonzero()?;
    let d = problem.n() + problem.m();
    let p = problem
        .polys
        .iter()
        .map(|f| {
            let s: SupportSet = f.support().iter().map(|e| e.embed(d, 0)).collect();
            Polytope::from_int_points(&support_points(&s))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let system = build_lagrange_system(problem);
    let mut p_prime = Vec::with_capacity(problem.n());
    let mut support_mismatches = Vec::new();
    for i in 0..problem.n() {
        let s = structural_support(problem, i);
        if s != system.l[i].support() {
            support_mismatches.push(i);
        }
        p_prime.push(Polytope::from_int_points(&support_points(&s))?);
    }
    Ok(EDPolytopes {
        p,
        p_prime,
        support_mismatches,
    })
}

/// `MV(P_1, …, P_m, P′_1, …, P′_n)`.
pub fn ed_degree_bound(
    problem: &EDProblem,
    algorithm: Algorithm,
    seed: u64,
) -> Result<MixedVolumeResult, EdError> {
    let polys = ed_polytopes(problem)?;
    Ok(mixed_volume(&polys.all(), algorithm, seed)?)
}

/// Which terms of `L_i` survive under a direction: `−u_i`, `x_i`, the
/// multiplier sum, or a combination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FaceCase {
    /// `−u_i`
    C3,
    /// `x_i`
    C4,
    /// `Σ λ_k [∂_i f_k]_w`
    C5,
    /// `x_i − u_i`
    C6,
    /// `−u_i + Σ λ_k [∂_i f_k]_w`
    C7,
    /// `x_i + Σ λ_k [∂_i f_k]_w`
    C8,
    /// `x_i − u_i + Σ λ_k [∂_i f_k]_w`
    C9,
}

impl FaceCase {
    /// Classifies by which of `0` (for `−u_i`), `w_i` (for `x_i`) and `e_i`
    /// (for the sum) attain the minimum.
    pub fn classify(w_i: i64, e_i: Option<i64>) -> FaceCase {
        let min = e_i.map_or(w_i.min(0), |e| e.min(w_i).min(0));
        let c = min == 0;
        let x = w_i == min;
        let s = e_i == Some(min);
        match (c, x, s) {
            (true, false, false) => FaceCase::C3,
            (false, true, false) => FaceCase::C4,
            (false, false, true) => FaceCase::C5,
            (true, true, false) => FaceCase::C6,
            (true, false, true) => FaceCase::C7,
            (false, true, true) => FaceCase::C8,
            (true, true, true) => FaceCase::C9,
            (false, false, false) => unreachable!("the minimum is attained"),
        }
    }

    pub fn has_constant(self) -> bool {
        matches!(self, FaceCase::C3 | FaceCase::C6 | FaceCase::C7 | FaceCase::C9)
    }

    pub fn has_x(self) -> bool {
        matches!(self, FaceCase::C4 | FaceCase::C6 | FaceCase::C8 | FaceCase::C9)
    }

    pub fn has_sum(self) -> bool {
        matches!(self, FaceCase::C5 | FaceCase::C7 | FaceCase::C8 | FaceCase::C9)
    }

    /// Template of the face function, e.g. `x_i - u_i + sum`.
    pub fn formula(self) -> &'static str {
        match self {
            FaceCase::C3 => "-u_i",
            FaceCase::C4 => "x_i",
            FaceCase::C5 => "sum_{k in S_i} l_k [d_i f_k]_w",
            FaceCase::C6 => "x_i - u_i",
            FaceCase::C7 => "-u_i + sum_{k in S_i} l_k [d_i f_k]_w",
            FaceCase::C8 => "x_i + sum_{k in S_i} l_k [d_i f_k]_w",
            FaceCase::C9 => "x_i - u_i + sum_{k in S_i} l_k [d_i f_k]_w",
        }
    }
}

impl fmt::Display for FaceCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Support data of all equations under one direction `w = (w_x, v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceProfile {
    pub w: Vec<i64>,
    /// `h_j = min ⟨w_x, α⟩` over `supp f_j`.
    pub h: Vec<i64>,
    /// `h[j][i]` over `supp ∂_i f_j`; `None` when the derivative vanishes.
    pub h_partial: Vec<Vec<Option<i64>>>,
    /// `min_j (v_j + h_j)`.
    pub e: i64,
    /// `min_j (v_j + h_j^i)` over the finite terms.
    pub e_partial: Vec<Option<i64>>,
    pub s: Vec<usize>,
    pub s_partial: Vec<Vec<usize>>,
    pub cases: Vec<FaceCase>,
}

pub fn face_profile(problem: &EDProblem, w: &[i64]) -> Result<FaceProfile, EdError> {
    problem.check_direction(w)?;
    let n = problem.n();
    let m = problem.m();
    let (wx, v) = w.split_at(n);
    let min_over = |f: &ExactPoly| f.terms().map(|(a, _)| a.dot(wx)).min();
    let h: Vec<i64> = problem
        .polys
        .iter()
        .map(|f| min_over(f).expect("nonzero polynomial"))
        .collect();
    let h_partial: Vec<Vec<Option<i64>>> = problem
        .polys
        .iter()
        .map(|f| {
            (0..n)
                .map(|i| min_over(&f.partial_derivative(i).expect("index below arity")))
                .collect()
        })
        .collect();
    let e = (0..m).map(|j| v[j] + h[j]).min().expect("m >= 1");
    let s = (0..m).filter(|&j| v[j] + h[j] == e).collect();
    let mut e_partial = Vec::with_capacity(n);
    let mut s_partial = Vec::with_capacity(n);
    let mut cases = Vec::with_capacity(n);
    for i in 0..n {
        let vals: Vec<Option<i64>> = (0..m).map(|j| h_partial[j][i].map(|x| v[j] + x)).collect();
        let ei = vals.iter().flatten().copied().min();
        s_partial.push(match ei {
            Some(ei) => (0..m).filter(|&j| vals[j] == Some(ei)).collect(),
            None => Vec::new(),
        });
        e_partial.push(ei);
        cases.push(FaceCase::classify(wx[i], ei));
    }
    Ok(FaceProfile {
        w: w.to_vec(),
        h,
        h_partial,
        e,
        e_partial,
        s,
        s_partial,
        cases,
    })
}

impl FaceProfile {
    /// The face function of `L_i` predicted by its case tag.
    pub fn predicted_face(&self, problem: &EDProblem, i: usize) -> ExactPoly {
        let n = problem.n();
        let d = n + problem.m();
        let case = self.cases[i];
        let mut out = ExactPoly::zero(d);
        if case.has_x() {
            out = out.add(&ExactPoly::variable(d, i));
        }
        if case.has_constant() {
            out = out.add(&ExactPoly::constant(d, -problem.u[i].clone()));
        }
        if case.has_sum() {
            let wx = &self.w[..n];
            for &k in &self.s_partial[i] {
                let face = problem.polys[k]
                    .partial_derivative(i)
                    .expect("index below arity")
                    .minimizing_terms(wx)
                    .embed(d, 0);
                out = out.add(&face.mul_monomial(&ExponentVector::unit(d, n + k)));
            }
        }
        out
    }
}

/// `(F_1)_w, …, (F_m)_w, (L_1)_w, …, (L_n)_w`.
pub fn facial_system(problem: &EDProblem, w: &[i64]) -> Result<Vec<ExactPoly>, EdError> {
    problem.check_direction(w)?;
    let system = build_lagrange_system(problem);
    Ok(system
        .equations()
        .iter()
        .map(|p| p.face_polynomial(w))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Primitive inner facet normals of `P_1 + … + P_m + P′_1 + … + P′_n`.
///
/// Directions in lower-dimensional cones of the normal fan are not
/// enumerated, so this is a candidate set and not a complete one.
pub fn candidate_directions(problem: &EDProblem) -> Result<Vec<Vec<i64>>, EdError> {
    let polys = ed_polytopes(problem)?;
    let all = polys.all();
    let mut sum = all[0].clone();
    for p in &all[1..] {
        sum = sum.minkowski_sum(p)?;
    }
    Ok(sum
        .facet_normals()
        .iter()
        .map(|n| {
            n.iter()
                .map(|x| x.to_i64().expect("normal entries fit i64"))
                .collect()
        })
        .collect())
}
