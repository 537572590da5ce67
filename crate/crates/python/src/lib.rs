//! Python bindings: `import eddeg`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict, PyList};

use eddeg_core::cli::{self, parse_rational, ProblemFile, Seeds};
use eddeg_core::ed::{self, sample_u, EDProblem};
use eddeg_core::geometry::Polytope;
use eddeg_core::mixed_volume::{self as mv, Algorithm};
use eddeg_core::numeric::{self, SolverOptions};
use eddeg_core::poly::parse_polynomial as parse_exact;

fn value_error<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn algorithm(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(PyValueError::new_err)
}

/// A variety `f_1 = ... = f_m = 0` together with a data point `u`.
#[pyclass(name = "Problem", module = "eddeg", frozen)]
struct PyProblem {
    inner: EDProblem,
    options: SolverOptions,
}

#[pymethods]
impl PyProblem {
    /// `u` entries may be ints or strings such as `"3/4"`; when omitted, `u`
    /// is sampled from `seed`. With `random_coefficients`, the given
    /// polynomials only fix the supports.
    #[new]
    #[pyo3(signature = (vars, polynomials, u=None, seed=0, random_coefficients=false))]
    fn new(
        vars: Vec<String>,
        polynomials: Vec<String>,
        u: Option<Vec<Bound<'_, PyAny>>>,
        seed: u64,
        random_coefficients: bool,
    ) -> PyResult<Self> {
        let polys = polynomials
            .iter()
            .map(|t| parse_exact(t, &vars))
            .collect::<Result<Vec<_>, _>>()
            .map_err(value_error)?;
        let u = match u {
            None => sample_u(vars.len(), seed),
            Some(items) => items
                .iter()
                .map(|x| {
                    let s = x.str()?.to_string();
                    parse_rational(&s)
                        .ok_or_else(|| PyValueError::new_err(format!("invalid rational `{s}`")))
                })
                .collect::<PyResult<Vec<_>>>()?,
        };
        let mut inner = EDProblem::new(vars, polys, u).map_err(value_error)?;
        if random_coefficients {
            inner = inner.with_random_coefficients(seed);
        }
        Ok(PyProblem {
            inner,
            options: SolverOptions::default(),
        })
    }

    /// Reads a problem file.
    #[staticmethod]
    #[pyo3(signature = (path, seed=None))]
    fn from_file(path: &str, seed: Option<u64>) -> PyResult<Self> {
        let file = ProblemFile::read(path.as_ref()).map_err(value_error)?;
        let inner = file
            .problem(seed.or(file.seed).unwrap_or(0))
            .map_err(value_error)?;
        Ok(PyProblem {
            inner,
            options: file.options,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.inner.vars().to_vec()
    }

    #[getter]
    fn polynomials(&self) -> Vec<String> {
        let vars = self.inner.vars();
        self.inner.polys().iter().map(|f| f.to_text(vars)).collect()
    }

    #[getter]
    fn u(&self) -> Vec<String> {
        self.inner.u().iter().map(|x| x.to_string()).collect()
    }

    /// `f_1..f_m, L_1..L_n` in the variables `x` then the multipliers.
    fn lagrange_system(&self) -> Vec<String> {
        let names = self.inner.all_var_names();
        ed::build_lagrange_system(&self.inner)
            .equations()
            .iter()
            .map(|p| p.to_text(&names))
            .collect()
    }

    /// Vertex lists of `P_1..P_m` and `P'_1..P'_n`.
    fn polytopes(&self) -> PyResult<(Vec<Vec<Vec<i64>>>, Vec<Vec<Vec<i64>>>)> {
        let ps = ed::ed_polytopes(&self.inner).map_err(value_error)?;
        let conv = |v: &[Polytope]| -> Vec<Vec<Vec<i64>>> { v.iter().map(lattice).collect() };
        Ok((conv(&ps.p), conv(&ps.p_prime)))
    }

    #[pyo3(signature = (algorithm="ie", seed=0))]
    fn bound(&self, py: Python<'_>, algorithm: &str, seed: u64) -> PyResult<u64> {
        let alg = self::algorithm(algorithm)?;
        let r = py
            .detach(|| ed::ed_degree_bound(&self.inner, alg, seed))
            .map_err(value_error)?;
        r.as_u64()
            .ok_or_else(|| PyValueError::new_err("mixed volume is not an integer"))
    }

    /// Numerical count; returns a dict with `regular`, `torus`, `total`,
    /// `reliable` and the distinct `solutions` as lists of complex numbers.
    #[pyo3(signature = (seed=0, residual_tol=None))]
    fn count<'py>(
        &self,
        py: Python<'py>,
        seed: u64,
        residual_tol: Option<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut options = self.options.clone();
        if let Some(t) = residual_tol {
            options.residual_tol = t;
        }
        let c = py
            .detach(|| numeric::count_ed_critical_points(&self.inner, seed, &options))
            .map_err(value_error)?;
        let d = PyDict::new(py);
        d.set_item("regular", c.regular)?;
        d.set_item("torus", c.torus)?;
        d.set_item("total", c.total)?;
        d.set_item("reliable", c.solutions.is_reliable())?;
        let sols = PyList::empty(py);
        for s in &c.solutions.solutions {
            let pt: Vec<Bound<'py, PyComplex>> = s
                .point
                .iter()
                .map(|z| PyComplex::from_doubles(py, z.re, z.im))
                .collect();
            sols.append(pt)?;
        }
        d.set_item("solutions", sols)?;
        Ok(d)
    }

    /// Case tags and predicted face functions of the `L_i` under `w`.
    fn face_profile<'py>(&self, py: Python<'py>, w: Vec<i64>) -> PyResult<Bound<'py, PyDict>> {
        let prof = ed::face_profile(&self.inner, &w).map_err(value_error)?;
        let names = self.inner.all_var_names();
        let d = PyDict::new(py);
        d.set_item("h", prof.h.clone())?;
        d.set_item("h_partial", prof.h_partial.clone())?;
        d.set_item("e", prof.e)?;
        d.set_item("e_partial", prof.e_partial.clone())?;
        d.set_item("s", prof.s.clone())?;
        d.set_item("s_partial", prof.s_partial.clone())?;
        d.set_item(
            "cases",
            prof.cases.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        )?;
        d.set_item(
            "predicted",
            (0..self.inner.n())
                .map(|i| prof.predicted_face(&self.inner, i).to_text(&names))
                .collect::<Vec<_>>(),
        )?;
        Ok(d)
    }

    fn facial_system(&self, w: Vec<i64>) -> PyResult<Vec<String>> {
        let names = self.inner.all_var_names();
        Ok(ed::facial_system(&self.inner, &w)
            .map_err(value_error)?
            .iter()
            .map(|p| p.to_text(&names))
            .collect())
    }

    fn candidate_directions(&self) -> PyResult<Vec<Vec<i64>>> {
        ed::candidate_directions(&self.inner).map_err(value_error)
    }

    /// The full verification report as a JSON string.
    #[pyo3(signature = (seed=0))]
    fn verify(&self, py: Python<'_>, seed: u64) -> PyResult<String> {
        let seeds = Seeds {
            solver: seed,
            lifting: seed,
            probe: seed,
        };
        let report = py
            .detach(|| cli::verify_problem(&self.inner, &seeds, &self.options))
            .map_err(value_error)?;
        Ok(report.to_json())
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(vars={:?}, polynomials={:?}, u={:?})",
            self.vars(),
            self.polynomials(),
            self.u()
        )
    }
}

fn lattice(p: &Polytope) -> Vec<Vec<i64>> {
    p.vertices()
        .iter()
        .map(|v| v.iter().map(|x| i64::try_from(x.to_integer()).unwrap_or(i64::MAX)).collect())
        .collect()
}

/// Normalized mixed volume of lattice polytopes given as point lists; the
/// convex hull of each list is taken first.
#[pyfunction]
#[pyo3(signature = (polytopes, algorithm="ie", seed=0))]
fn mixed_volume(polytopes: Vec<Vec<Vec<i64>>>, algorithm: &str, seed: u64) -> PyResult<u64> {
    let alg = self::algorithm(algorithm)?;
    let ps = polytopes
        .iter()
        .map(|pts| Polytope::from_int_points(pts))
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_error)?;
    let r = mv::mixed_volume(&ps, alg, seed).map_err(value_error)?;
    r.as_u64()
        .ok_or_else(|| PyValueError::new_err("mixed volume is not an integer"))
}

/// Parses and reprints a polynomial in canonical form.
#[pyfunction]
fn normalize_polynomial(text: &str, vars: Vec<String>) -> PyResult<String> {
    Ok(parse_exact(text, &vars).map_err(value_error)?.to_text(&vars))
}

#[pymodule]
fn eddeg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(mixed_volume, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_polynomial, m)?)?;
    Ok(())
}
