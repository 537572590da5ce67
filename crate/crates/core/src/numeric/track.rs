//! Path tracking for `H(z, t) = (1 − t)·γ·G(z) + t·F(z)` on a random affine
//! chart of projective space.
//!
//! Working projectively keeps paths bounded: a path that diverges in affine
//! coordinates ends at a point with `z_0 = 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::eval::Compiled;

const MAX_STEP: f64 = 0.05;
const MAX_STEPS: usize = 50_000;
const CORRECTOR_ITERS: usize = 3;

pub(crate) struct Homotopy {
    pub target: Compiled,
    pub start: Compiled,
    pub gamma: Complex64,
    /// Chart `⟨a, z⟩ = 1`.
    pub patch: Vec<Complex64>,
    pub min_step: f64,
}

pub(crate) enum Outcome {
    Reached(DVector<Complex64>),
    Stalled { z: DVector<Complex64>, t: f64 },
}

pub(crate) struct Telemetry {
    pub steps: usize,
    pub newton_iterations: usize,
}

impl Homotopy {
    fn eval(&self, z: &[Complex64], t: f64) -> (DVector<Complex64>, DMatrix<Complex64>, DVector<Complex64>) {
        let (fv, fj) = self.target.values_and_jacobian(z);
        let (gv, gj) = self.start.values_and_jacobian(z);
        let s = self.gamma * (1.0 - t);
        let k = fv.len();
        let d = z.len();
        let mut h = DVector::zeros(k + 1);
        let mut j = DMatrix::zeros(k + 1, d);
        let mut ht = DVector::zeros(k + 1);
        for i in 0..k {
            h[i] = gv[i] * s + fv[i] * t;
            ht[i] = fv[i] - gv[i] * self.gamma;
            for c in 0..d {
                j[(i, c)] = gj[(i, c)] * s + fj[(i, c)] * t;
            }
        }
        h[k] = self.patch.iter().zip(z).map(|(a, x)| a * x).sum::<Complex64>() - 1.0;
        for c in 0..d {
            j[(k, c)] = self.patch[c];
        }
        (h, j, ht)
    }

    /// `dz/dt = −J⁻¹ ∂H/∂t`.
    fn velocity(&self, z: &DVector<Complex64>, t: f64) -> Option<DVector<Complex64>> {
        let (_, j, ht) = self.eval(z.as_slice(), t);
        j.lu().solve(&(-ht))
    }

    fn rk4(&self, z: &DVector<Complex64>, t: f64, h: f64) -> Option<DVector<Complex64>> {
        let k1 = self.velocity(z, t)?;
        let k2 = self.velocity(&(z + &k1 * Complex64::from(h / 2.0)), t + h / 2.0)?;
        let k3 = self.velocity(&(z + &k2 * Complex64::from(h / 2.0)), t + h / 2.0)?;
        let k4 = self.velocity(&(z + &k3 * Complex64::from(h)), t + h)?;
        let sum = k1 + (k2 + k3) * Complex64::from(2.0) + k4;
        Some(z + sum * Complex64::from(h / 6.0))
    }

    fn correct(
        &self,
        mut z: DVector<Complex64>,
        t: f64,
        tel: &mut Telemetry,
    ) -> Option<DVector<Complex64>> {
        let mut last = f64::INFINITY;
        for _ in 0..CORRECTOR_ITERS {
            let (h, j, _) = self.eval(z.as_slice(), t);
            let dz = j.lu().solve(&(-h))?;
            tel.newton_iterations += 1;
            let size = dz.norm();
            if !size.is_finite() || size > last {
                return None;
            }
            z += &dz;
            if size <= 1e-10 * z.norm().max(1.0) {
                return Some(z);
            }
            last = size;
        }
        (last <= 1e-7 * z.norm().max(1.0)).then_some(z)
    }

    pub fn track(&self, start: DVector<Complex64>, tel: &mut Telemetry) -> Outcome {
        let mut z = start;
        let mut t = 0.0;
        let mut h = 0.01;
        let mut streak = 0;
        while t < 1.0 {
            if tel.steps >= MAX_STEPS || h < self.min_step {
                return Outcome::Stalled { z, t };
            }
            tel.steps += 1;
            let step = h.min(1.0 - t);
            let next_t = if step == 1.0 - t { 1.0 } else { t + step };
            let next = self
                .rk4(&z, t, step)
                .and_then(|p| self.correct(p, next_t, tel));
            match next {
                Some(p) => {
                    z = p;
                    t = next_t;
                    streak += 1;
                    if streak >= 3 {
                        h = (h * 2.0).min(MAX_STEP);
                        streak = 0;
                    }
                }
                None => {
                    h /= 2.0;
                    streak = 0;
                }
            }
        }
        Outcome::Reached(z)
    }
}

/// Newton's method on a square affine system; returns the point of least
/// scaled residual seen and that residual.
pub(crate) fn refine(
    sys: &Compiled,
    x: DVector<Complex64>,
    max_iters: usize,
    tel: &mut Telemetry,
) -> (DVector<Complex64>, f64) {
    let mut best_res = sys.scaled_residual(x.as_slice());
    let mut best = x.clone();
    let mut x = x;
    for _ in 0..max_iters {
        let (v, j) = sys.values_and_jacobian(x.as_slice());
        let Some(dx) = j.lu().solve(&(-v)) else { break };
        if !dx.norm().is_finite() {
            break;
        }
        tel.newton_iterations += 1;
        x += &dx;
        let r = sys.scaled_residual(x.as_slice());
        if r <= best_res {
            best_res = r;
            best = x.clone();
        }
        if dx.norm() <= 1e-15 * x.norm().max(1.0) {
            break;
        }
    }
    (best, best_res)
}
