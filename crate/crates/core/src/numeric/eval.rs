//! Dense-exponent polynomial systems for repeated evaluation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::poly::NumericPoly;

type Term = (Complex64, Vec<u32>);

#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    pub nvars: usize,
    polys: Vec<Vec<Term>>,
    max_exp: Vec<u32>,
}

impl Compiled {
    pub fn new(polys: &[NumericPoly], nvars: usize) -> Self {
        let polys: Vec<Vec<Term>> = polys
            .iter()
            .map(|p| p.terms().map(|(e, c)| (*c, e.entries().to_vec())).collect())
            .collect();
        Self::from_terms(polys, nvars)
    }

    fn from_terms(polys: Vec<Vec<Term>>, nvars: usize) -> Self {
        let mut max_exp = vec![0; nvars];
        for (_, e) in polys.iter().flatten() {
            for (m, &a) in max_exp.iter_mut().zip(e) {
                *m = (*m).max(a);
            }
        }
        Compiled {
            nvars,
            polys,
            max_exp,
        }
    }

    /// Homogenizes every polynomial to its total degree with a new leading
    /// variable `z_0`.
    pub fn homogenize(polys: &[NumericPoly], nvars: usize) -> Self {
        let terms = polys
            .iter()
            .map(|p| {
                let d = p.total_degree();
                p.terms()
                    .map(|(e, c)| {
                        let mut h = Vec::with_capacity(nvars + 1);
                        h.push(d - e.degree());
                        h.extend_from_slice(e.entries());
                        (*c, h)
                    })
                    .collect()
            })
            .collect();
        Self::from_terms(terms, nvars + 1)
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    fn powers(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        z.iter()
            .zip(&self.max_exp)
            .map(|(&x, &m)| {
                let mut p = Vec::with_capacity(m as usize + 1);
                p.push(Complex64::new(1.0, 0.0));
                for k in 1..=m as usize {
                    p.push(p[k - 1] * x);
                }
                p
            })
            .collect()
    }

    #[cfg(test)]
    pub fn values(&self, z: &[Complex64]) -> DVector<Complex64> {
        let pw = self.powers(z);
        DVector::from_iterator(
            self.len(),
            self.polys.iter().map(|terms| {
                terms
                    .iter()
                    .map(|(c, e)| {
                        e.iter()
                            .enumerate()
                            .fold(*c, |acc, (v, &a)| acc * pw[v][a as usize])
                    })
                    .sum()
            }),
        )
    }

    /// `|p(z)| / max(1, Σ |c_α z^α|)` for each polynomial, maximized.
    pub fn scaled_residual(&self, z: &[Complex64]) -> f64 {
        let pw = self.powers(z);
        self.polys
            .iter()
            .map(|terms| {
                let mut sum = Complex64::new(0.0, 0.0);
                let mut mag = 0.0;
                for (c, e) in terms {
                    let t = e
                        .iter()
                        .enumerate()
                        .fold(*c, |acc, (v, &a)| acc * pw[v][a as usize]);
                    sum += t;
                    mag += t.norm();
                }
                sum.norm() / mag.max(1.0)
            })
            .fold(0.0, f64::max)
    }

    pub fn values_and_jacobian(&self, z: &[Complex64]) -> (DVector<Complex64>, DMatrix<Complex64>) {
        let pw = self.powers(z);
        let mut vals = DVector::zeros(self.len());
        let mut jac = DMatrix::zeros(self.len(), self.nvars);
        for (i, terms) in self.polys.iter().enumerate() {
            for (c, e) in terms {
                vals[i] += e
                    .iter()
                    .enumerate()
                    .fold(*c, |acc, (v, &a)| acc * pw[v][a as usize]);
                for (v, &a) in e.iter().enumerate() {
                    if a == 0 {
                        continue;
                    }
                    let mut d = c * a as f64 * pw[v][a as usize - 1];
                    for (u, &b) in e.iter().enumerate() {
                        if u != v {
                            d *= pw[u][b as usize];
                        }
                    }
                    jac[(i, v)] += d;
                }
            }
        }
        (vals, jac)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, ExactPoly};

    fn numeric(texts: &[&str], vars: &[&str]) -> Vec<NumericPoly> {
        texts
            .iter()
            .map(|t| parse_polynomial(t, vars).unwrap().to_numeric())
            .collect()
    }

    #[test]
    fn jacobian_matches_derivatives() {
        let vars = ["x", "y"];
        let ps = numeric(&["x^3*y - 2y^2 + x", "x*y + 1"], &vars);
        let c = Compiled::new(&ps, 2);
        let z = [Complex64::new(0.3, -1.1), Complex64::new(2.0, 0.5)];
        let (v, j) = c.values_and_jacobian(&z);
        for (i, p) in ps.iter().enumerate() {
            assert!((v[i] - p.evaluate(&z).unwrap()).norm() < 1e-12);
            for k in 0..2 {
                let d = p.partial_derivative(k).unwrap().evaluate(&z).unwrap();
                assert!((j[(i, k)] - d).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn homogenized_agrees_on_affine_chart() {
        let vars = ["x", "y"];
        let p: ExactPoly = parse_polynomial("x^2 + 3y - 1", &vars).unwrap();
        let h = Compiled::homogenize(&[p.to_numeric()], 2);
        let s = Complex64::new(0.7, 0.2);
        let x = Complex64::new(1.5, 0.0);
        let y = Complex64::new(-0.5, 1.0);
        let hv = h.values(&[s, s * x, s * y])[0];
        let pv = p.evaluate(&[x, y]).unwrap();
        assert!((hv - s * s * pv).norm() < 1e-12);
    }
}
