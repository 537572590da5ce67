//! Best-effort search for torus solutions of a facial system.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::Compiled;
use super::gaussian_complex;
use crate::ed::{facial_system, EDProblem, EdError};
use crate::poly::NumericPoly;

const STARTS: usize = 40;
const ITERS: usize = 200;
const WITNESS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum ProbeVerdict {
    SolutionFound {
        witness: Vec<[f64; 2]>,
        residual: f64,
    },
    /// Nothing found; this does not prove that no solution exists, except when
    /// `reason` names a face without torus zeros.
    NoneFoundHeuristic { reason: String },
}

/// Looks for a point of `(C*)^{n+m}` where every face polynomial under `w`
/// vanishes.
///
/// A face that is a nonzero monomial has no torus zeros, which settles the
/// question before any search. Otherwise the face system, which is invariant
/// under a one-parameter torus action, is cut by one random affine hyperplane
/// and solved by least-squares Newton steps from random starts.
pub fn facial_solution_probe(
    problem: &EDProblem,
    w: &[i64],
    seed: u64,
) -> Result<ProbeVerdict, EdError> {
    let faces = facial_system(problem, w)?;
    let names = problem.all_var_names();
    if let Some(k) = faces.iter().position(|f| f.num_terms() == 1) {
        return Ok(ProbeVerdict::NoneFoundHeuristic {
            reason: format!("face {} is the monomial {}", k, faces[k].to_text(&names)),
        });
    }
    let d = names.len();
    let numeric: Vec<NumericPoly> = faces.iter().map(|f| f.to_numeric()).collect();
    let face_sys = Compiled::new(&numeric, d);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slice: Vec<Complex64> = (0..d).map(|_| gaussian_complex(&mut rng)).collect();
    for _ in 0..STARTS {
        let start: Vec<Complex64> = (0..d)
            .map(|_| Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU)))
            .collect();
        if let Some((z, res)) = gauss_newton(&face_sys, &slice, start) {
            let scale = z.norm().max(1.0);
            if res < WITNESS_TOL && z.iter().all(|c| c.norm() > 1e-6 * scale) {
                return Ok(ProbeVerdict::SolutionFound {
                    witness: z.iter().map(|c| [c.re, c.im]).collect(),
                    residual: res,
                });
            }
        }
    }
    Ok(ProbeVerdict::NoneFoundHeuristic {
        reason: format!("no torus point found from {STARTS} random starts"),
    })
}

fn gauss_newton(
    faces: &Compiled,
    slice: &[Complex64],
    start: Vec<Complex64>,
) -> Option<(DVector<Complex64>, f64)> {
    let d = start.len();
    let k = faces.len();
    let mut z = DVector::from_vec(start);
    for _ in 0..ITERS {
        let (v, j) = faces.values_and_jacobian(z.as_slice());
        let mut rhs = DVector::zeros(k + 1);
        let mut jac = nalgebra::DMatrix::zeros(k + 1, d);
        for i in 0..k {
            rhs[i] = -v[i];
            for c in 0..d {
                jac[(i, c)] = j[(i, c)];
            }
        }
        rhs[k] = Complex64::new(1.0, 0.0) - slice.iter().zip(z.iter()).map(|(a, x)| a * x).sum::<Complex64>();
        for c in 0..d {
            jac[(k, c)] = slice[c];
        }
        let dz = jac.svd(true, true).solve(&rhs, 1e-12).ok()?;
        if !dz.norm().is_finite() {
            return None;
        }
        z += &dz;
        if dz.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    let res = faces.scaled_residual(z.as_slice());
    res.is_finite().then_some((z, res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn problem(f: &str, u: &[i64]) -> EDProblem {
        let vars = vec!["x".to_string(), "y".to_string()];
        let f = parse_polynomial(f, &vars).unwrap();
        let u = u.iter().map(|&k| BigRational::from_integer(BigInt::from(k))).collect();
        EDProblem::new(vars, vec![f], u).unwrap()
    }

    fn check_witness(pr: &EDProblem, w: &[i64], witness: &[[f64; 2]]) {
        let z: Vec<Complex64> = witness.iter().map(|c| Complex64::new(c[0], c[1])).collect();
        for f in facial_system(pr, w).unwrap() {
            assert!(f.evaluate(&z).unwrap().norm() < 1e-8);
        }
        assert!(z.iter().all(|c| c.norm() > 1e-6));
    }

    #[test]
    fn positive_direction_short_circuits() {
        let pr = problem("x^2 + y^2 - 1", &[3, 4]);
        let v = facial_solution_probe(&pr, &[1, 1, 1], 0).unwrap();
        assert!(matches!(v, ProbeVerdict::NoneFoundHeuristic { .. }));
        let v = facial_solution_probe(&pr, &[0, 0, 1], 0).unwrap();
        assert!(matches!(v, ProbeVerdict::NoneFoundHeuristic { .. }));
    }

    #[test]
    fn isotropic_face_has_torus_points() {
        // faces: x^2 + y^2, x(1 + 2l), y(1 + 2l); solved by y = ix, l = -1/2
        let pr = problem("x^2 + y^2 + 1", &[3, 4]);
        let w = [-1, -1, 0];
        match facial_solution_probe(&pr, &w, 2).unwrap() {
            ProbeVerdict::SolutionFound { witness, residual } => {
                assert!(residual < 1e-10);
                check_witness(&pr, &w, &witness);
                assert!((witness[2][0] + 0.5).abs() < 1e-6);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn double_line_face_has_torus_points() {
        // faces: (x - y)^2, 2l(x - y), -2l(x - y); solved by x = y
        let pr = problem("x^2 - 2x*y + y^2 + 1", &[3, 4]);
        let w = [-1, -1, -1];
        match facial_solution_probe(&pr, &w, 9).unwrap() {
            ProbeVerdict::SolutionFound { witness, .. } => check_witness(&pr, &w, &witness),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn separated_faces_have_none() {
        // faces: x + y, x, y
        let pr = problem("x + y + 1", &[3, 4]);
        let v = facial_solution_probe(&pr, &[-1, -1, 0], 0).unwrap();
        assert!(matches!(v, ProbeVerdict::NoneFoundHeuristic { .. }));
    }
}
