//! Numerical solution counting by total-degree homotopy continuation.
//!
//! Every path of the start system `z_i^{d_i} = z_0^{d_i}` is tracked on a
//! random affine chart, endpoints are refined by Newton's method on the affine
//! target, then deduplicated and classified. Randomness (the `γ` constant and
//! the chart) comes only from the seed, and every path is computed
//! sequentially, so results do not depend on how many workers run.

mod eval;
mod probe;
mod track;

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ed::{build_lagrange_system, EDProblem};
use crate::poly::NumericPoly;

use eval::Compiled;
use track::{refine, Homotopy, Outcome, Telemetry};

pub use probe::{facial_solution_probe, ProbeVerdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("system has {equations} equations in {vars} variables")]
    NotSquare { equations: usize, vars: usize },
    #[error("equation {index} is constant")]
    ConstantEquation { index: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Scaled residual a refined endpoint must reach.
    pub residual_tol: f64,
    /// Relative radius within which endpoints are merged.
    pub dedup_radius: f64,
    /// A coordinate counts as nonzero above this modulus.
    pub torus_tol: f64,
    /// Relative singular-value cutoff for numerical rank.
    pub rank_tol: f64,
    pub min_step: f64,
    /// Failed paths tolerated before the count is flagged unreliable.
    pub max_failed_paths: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            residual_tol: 1e-10,
            dedup_radius: 1e-8,
            torus_tol: 1e-8,
            rank_tol: 1e-8,
            min_step: 1e-14,
            max_failed_paths: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathStatus {
    Converged,
    /// Ended at infinity.
    Diverged,
    Failed,
}

#[derive(Clone, Debug)]
pub struct TrackedPath {
    pub index: usize,
    pub start: Vec<Complex64>,
    /// Affine endpoint when converged, otherwise the last projective point.
    pub end: Vec<Complex64>,
    pub status: PathStatus,
    pub residual: f64,
    pub t_reached: f64,
    pub steps: usize,
    pub newton_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub point: Vec<Complex64>,
    /// Number of converged paths in the cluster.
    pub multiplicity: usize,
    pub residual: f64,
    pub torus: bool,
    pub real: bool,
    /// Jacobian of the whole square system has full numerical rank.
    pub nonsingular: bool,
    /// Set by callers that know which variety the solution lives on.
    pub regular: Option<bool>,
    /// Index of the first path in the cluster.
    pub path: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSummary {
    pub total: usize,
    pub converged: usize,
    pub diverged: usize,
    pub failed: usize,
    pub steps: usize,
    pub newton_iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    pub paths: Vec<TrackedPath>,
    pub gamma: Complex64,
    /// Reasons the count should not be trusted; empty when it can be.
    pub unreliable: Vec<String>,
}

impl SolutionSet {
    pub fn total(&self) -> usize {
        self.solutions.len()
    }

    pub fn torus(&self) -> usize {
        self.solutions.iter().filter(|s| s.torus).count()
    }

    pub fn regular(&self) -> Option<usize> {
        self.solutions
            .iter()
            .map(|s| s.regular.map(usize::from))
            .sum()
    }

    pub fn summary(&self) -> PathSummary {
        let mut s = PathSummary {
            total: self.paths.len(),
            ..Default::default()
        };
        for p in &self.paths {
            match p.status {
                PathStatus::Converged => s.converged += 1,
                PathStatus::Diverged => s.diverged += 1,
                PathStatus::Failed => s.failed += 1,
            }
            s.steps += p.steps;
            s.newton_iterations += p.newton_iterations;
        }
        s
    }

    pub fn is_reliable(&self) -> bool {
        self.unreliable.is_empty()
    }

    /// Whether every solution's conjugate is also a solution.
    pub fn closed_under_conjugation(&self, radius: f64) -> bool {
        self.solutions.iter().all(|s| {
            let conj: Vec<Complex64> = s.point.iter().map(|z| z.conj()).collect();
            self.solutions
                .iter()
                .any(|o| close(&o.point, &conj, radius))
        })
    }
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn close(a: &[Complex64], b: &[Complex64], radius: f64) -> bool {
    dist(a, b) <= radius * norm(a).max(norm(b)).max(1.0)
}

/// Numerical rank of the Jacobian of `polys` at `x`: singular values above
/// `tol · σ_max` are kept.
pub fn jacobian_rank_estimate(polys: &[NumericPoly], x: &[Complex64], tol: f64) -> usize {
    let Some(first) = polys.first() else { return 0 };
    let sys = Compiled::new(polys, first.arity());
    let (_, j) = sys.values_and_jacobian(x);
    numerical_rank(j, tol)
}

fn numerical_rank(j: DMatrix<Complex64>, tol: f64) -> usize {
    if j.is_empty() {
        return 0;
    }
    let sv = j.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

fn unit_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Tracks all `∏ d_i` total-degree paths for a square system.
pub fn solve_square_system(
    polys: &[NumericPoly],
    seed: u64,
    options: &SolverOptions,
) -> Result<SolutionSet, SolverError> {
    let n = polys.first().map_or(0, |p| p.arity());
    if polys.len() != n || polys.iter().any(|p| p.arity() != n) {
        return Err(SolverError::NotSquare {
            equations: polys.len(),
            vars: n,
        });
    }
    if let Some(index) = polys.iter().position(|p| p.is_constant()) {
        return Err(SolverError::ConstantEquation { index });
    }
    let degrees: Vec<u32> = polys.iter().map(|p| p.total_degree()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = unit_complex(&mut rng);
    let patch: Vec<Complex64> = (0..=n).map(|_| gaussian_complex(&mut rng)).collect();

    let start_polys: Vec<NumericPoly> = (0..n)
        .map(|i| {
            let d = degrees[i];
            let mut hi = vec![0; n + 1];
            hi[i + 1] = d;
            let mut lo = vec![0; n + 1];
            lo[0] = d;
            NumericPoly::from_terms(
                n + 1,
                [
                    (crate::poly::ExponentVector::new(hi), Complex64::new(1.0, 0.0)),
                    (crate::poly::ExponentVector::new(lo), Complex64::new(-1.0, 0.0)),
                ],
            )
        })
        .collect();
    let homotopy = Homotopy {
        target: Compiled::homogenize(polys, n),
        start: Compiled::new(&start_polys, n + 1),
        gamma,
        patch,
        min_step: options.min_step,
    };
    let affine = Compiled::new(polys, n);

    let total: usize = degrees.iter().map(|&d| d as usize).product();
    let paths: Vec<TrackedPath> = (0..total)
        .into_par_iter()
        .map(|index| run_path(index, &degrees, &homotopy, &affine, options))
        .collect();

    Ok(collect_solutions(paths, gamma, &affine, options))
}

fn start_point(index: usize, degrees: &[u32]) -> Vec<Complex64> {
    let mut k = index;
    degrees
        .iter()
        .map(|&d| {
            let r = k % d as usize;
            k /= d as usize;
            Complex64::from_polar(1.0, 2.0 * PI * r as f64 / d as f64)
        })
        .collect()
}

fn run_path(
    index: usize,
    degrees: &[u32],
    h: &Homotopy,
    affine: &Compiled,
    options: &SolverOptions,
) -> TrackedPath {
    let start = start_point(index, degrees);
    let mut proj = Vec::with_capacity(start.len() + 1);
    proj.push(Complex64::new(1.0, 0.0));
    proj.extend_from_slice(&start);
    let scale: Complex64 = h.patch.iter().zip(&proj).map(|(a, z)| a * z).sum();
    let z0 = DVector::from_iterator(proj.len(), proj.iter().map(|z| z / scale));

    let mut tel = Telemetry {
        steps: 0,
        newton_iterations: 0,
    };
    let (z, t) = match h.track(z0, &mut tel) {
        Outcome::Reached(z) => (z, 1.0),
        Outcome::Stalled { z, t } => (z, t),
    };
    let at_infinity = z[0].norm() / z.norm() < 1e-6;
    let mut path = TrackedPath {
        index,
        start,
        end: z.iter().copied().collect(),
        status: PathStatus::Failed,
        residual: f64::INFINITY,
        t_reached: t,
        steps: tel.steps,
        newton_iterations: 0,
    };
    // only endpoints that reached t = 1, or stalled right next to it, are
    // worth refining on the affine chart
    if t >= 1.0 - 1e-6 && !at_infinity {
        let x0 = DVector::from_iterator(z.len() - 1, z.iter().skip(1).map(|v| v / z[0]));
        let (x, res) = refine(affine, x0.clone(), 50, &mut tel);
        // refinement must polish the endpoint, not jump to another root
        let moved = (&x - &x0).norm() <= 1e-3 * x0.norm().max(1.0);
        if res <= options.residual_tol && moved {
            path.status = PathStatus::Converged;
            path.residual = res;
            path.end = x.iter().copied().collect();
        }
    }
    if path.status != PathStatus::Converged && at_infinity && t >= 1.0 - 1e-6 {
        path.status = PathStatus::Diverged;
    }
    path.newton_iterations = tel.newton_iterations;
    path
}

fn collect_solutions(
    paths: Vec<TrackedPath>,
    gamma: Complex64,
    affine: &Compiled,
    options: &SolverOptions,
) -> SolutionSet {
    let mut solutions: Vec<Solution> = Vec::new();
    for p in paths.iter().filter(|p| p.status == PathStatus::Converged) {
        if let Some(s) = solutions
            .iter_mut()
            .find(|s| close(&s.point, &p.end, options.dedup_radius))
        {
            s.multiplicity += 1;
            continue;
        }
        let (_, j) = affine.values_and_jacobian(&p.end);
        let n = p.end.len();
        let scale = norm(&p.end).max(1.0);
        solutions.push(Solution {
            point: p.end.clone(),
            multiplicity: 1,
            residual: p.residual,
            torus: p.end.iter().all(|z| z.norm() > options.torus_tol),
            real: p.end.iter().all(|z| z.im.abs() <= 1e-8 * scale),
            nonsingular: numerical_rank(j, options.rank_tol) == n,
            regular: None,
            path: p.index,
        });
    }
    let mut unreliable = Vec::new();
    let failed = paths.iter().filter(|p| p.status == PathStatus::Failed).count();
    if failed > options.max_failed_paths {
        unreliable.push(format!("{failed} path(s) failed"));
    }
    let clustered = solutions.iter().filter(|s| s.multiplicity > 1).count();
    if clustered > 0 {
        unreliable.push(format!("{clustered} solution(s) reached by several paths"));
    }
    SolutionSet {
        solutions,
        paths,
        gamma,
        unreliable,
    }
}

/// Critical points of the distance from `u` to `X`, found numerically.
#[derive(Clone, Debug)]
pub struct EdCount {
    /// Distinct solutions whose `x` part is a regular point of `X`.
    pub regular: usize,
    /// Distinct solutions with all `n + m` coordinates nonzero.
    pub torus: usize,
    pub total: usize,
    pub solutions: SolutionSet,
}

pub fn count_ed_critical_points(
    problem: &EDProblem,
    seed: u64,
    options: &SolverOptions,
) -> Result<EdCount, SolverError> {
    let n = problem.n();
    let m = problem.m();
    let system = build_lagrange_system(problem);
    let numeric: Vec<NumericPoly> = system.equations().iter().map(|p| p.to_numeric()).collect();
    let mut set = solve_square_system(&numeric, seed, options)?;
    let fs: Vec<NumericPoly> = problem.polys().iter().map(|p| p.to_numeric()).collect();
    for s in &mut set.solutions {
        s.regular = Some(jacobian_rank_estimate(&fs, &s.point[..n], options.rank_tol) == m);
    }
    Ok(EdCount {
        regular: set.regular().unwrap_or(0),
        torus: set.torus(),
        total: set.total(),
        solutions: set,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::EDProblem;
    use crate::poly::parse_polynomial;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn numeric(texts: &[&str], vars: &[&str]) -> Vec<NumericPoly> {
        texts
            .iter()
            .map(|t| parse_polynomial(t, vars).unwrap().to_numeric())
            .collect()
    }

    fn q(k: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(k))
    }

    #[test]
    fn four_real_points() {
        let set = solve_square_system(&numeric(&["x^2 - 1", "y^2 - 1"], &["x", "y"]), 3, &SolverOptions::default())
            .unwrap();
        assert_eq!(set.total(), 4);
        assert!(set.is_reliable());
        for s in &set.solutions {
            assert!(s.real);
            for z in &s.point {
                assert!((z.re.abs() - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn linear_system() {
        let set = solve_square_system(&numeric(&["x - 3", "y + 2"], &["x", "y"]), 0, &SolverOptions::default())
            .unwrap();
        assert_eq!(set.total(), 1);
        let p = &set.solutions[0].point;
        assert!((p[0] - Complex64::new(3.0, 0.0)).norm() < 1e-12);
        assert!((p[1] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn circle_critical_points() {
        let vars = ["x", "y", "l"];
        let set = solve_square_system(
            &numeric(&["x^2 + y^2 - 1", "x - 3 + 2l*x", "y - 4 + 2l*y"], &vars),
            11,
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(set.total(), 2, "{:?}", set.summary());
        let mut lambdas: Vec<f64> = set.solutions.iter().map(|s| s.point[2].re).collect();
        lambdas.sort_by(f64::total_cmp);
        assert!((lambdas[0] + 3.0).abs() < 1e-10);
        assert!((lambdas[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_square() {
        let err = solve_square_system(&numeric(&["x - 1"], &["x", "y"]), 0, &SolverOptions::default());
        assert!(matches!(err, Err(SolverError::NotSquare { .. })));
    }

    #[test]
    fn rank_examples() {
        let c = numeric(&["x^2 + y^2 - 1"], &["x", "y"]);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(jacobian_rank_estimate(&c, &[one, zero], 1e-8), 1);
        assert_eq!(jacobian_rank_estimate(&c, &[zero, zero], 1e-8), 0);
        let xy = numeric(&["x", "y"], &["x", "y"]);
        assert_eq!(jacobian_rank_estimate(&xy, &[Complex64::new(0.3, 2.0), one], 1e-8), 2);
    }

    #[test]
    fn circle_count() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let f = parse_polynomial("x^2 + y^2 - 1", &vars).unwrap();
        let pr = EDProblem::new(vars, vec![f], vec![q(3), q(4)]).unwrap();
        let c = count_ed_critical_points(&pr, 1, &SolverOptions::default()).unwrap();
        assert_eq!((c.regular, c.torus, c.total), (2, 2, 2));
        assert!(c.solutions.closed_under_conjugation(1e-8));
    }

    #[test]
    fn same_result_for_any_worker_count() {
        let polys = numeric(&["x^2 + y^2 - 1", "x - 3 + 2l*x", "y - 4 + 2l*y"], &["x", "y", "l"]);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| solve_square_system(&polys, 5, &SolverOptions::default()).unwrap())
        };
        let a = run(1);
        let b = run(4);
        let pa: Vec<_> = a.solutions.iter().map(|s| s.point.clone()).collect();
        let pb: Vec<_> = b.solutions.iter().map(|s| s.point.clone()).collect();
        assert_eq!(pa, pb);
    }
}
