//! Python bindings. Points are lists of complex homogeneous coordinates,
//! algebra elements are real coordinate lists in the orthonormal basis of
//! `sl(k+1, C)`, matrices are nested lists of complex numbers.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pk_cutoff::cutoff::{self, CutoffConfig, CutoffFunction};
use pk_cutoff::geometry::{self, Ball, CompactSetSpec, ProjectivePoint};
use pk_cutoff::lie::{self, AlgebraElement, CMatrix, NormalizedMatrix, ShearParams};
use pk_cutoff::regularize::{self, FunctionOnP};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn point(z: Vec<Complex64>) -> PyResult<ProjectivePoint> {
    ProjectivePoint::new(z).map_err(err)
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn shear_params(h: Vec<Complex64>, epsilon: f64) -> PyResult<ShearParams> {
    ShearParams::new(h, epsilon).map_err(err)
}

/// Fubini–Study distance between two points.
#[pyfunction]
fn fs_distance(p: Vec<Complex64>, q: Vec<Complex64>) -> PyResult<f64> {
    Ok(geometry::fs_distance(&point(p)?, &point(q)?))
}

/// `(chart, affine coordinates)`; the maximum-modulus chart when `chart` is None.
#[pyfunction]
#[pyo3(signature = (p, chart=None))]
fn to_chart(p: Vec<Complex64>, chart: Option<usize>) -> PyResult<(usize, Vec<Complex64>)> {
    let c = geometry::to_chart(&point(p)?, chart).map_err(err)?;
    Ok((c.chart(), c.affine()))
}

#[pyfunction]
fn algebra_dim(k: usize) -> usize {
    lie::algebra_real_dim(k)
}

/// `Φ(x)` as a nested list.
#[pyfunction]
fn phi(k: usize, x: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
    let x = AlgebraElement::from_coords(k, &x).map_err(err)?;
    Ok(rows(lie::phi(&x).map_err(err)?.mat()))
}

#[pyfunction]
fn phi_inverse(a: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    let a = NormalizedMatrix::new(matrix(a)?).map_err(err)?;
    Ok(lie::phi_inverse(&a).map_err(err)?.coords())
}

#[pyfunction]
#[pyo3(signature = (k, x, h, epsilon=lie::DEFAULT_EPSILON))]
fn h_map(k: usize, x: Vec<f64>, h: Vec<Complex64>, epsilon: f64) -> PyResult<Vec<f64>> {
    let x = AlgebraElement::from_coords(k, &x).map_err(err)?;
    Ok(lie::h_map(&x, &shear_params(h, epsilon)?).map_err(err)?.coords())
}

/// `|det DH_h(x)|` by central differences.
#[pyfunction]
#[pyo3(signature = (k, x, h, step=1e-4, epsilon=lie::DEFAULT_EPSILON))]
fn jacobian_h(k: usize, x: Vec<f64>, h: Vec<Complex64>, step: f64, epsilon: f64) -> PyResult<f64> {
    let x = AlgebraElement::from_coords(k, &x).map_err(err)?;
    lie::jacobian_h(&x, &shear_params(h, epsilon)?, step).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (k, sigma=lie::DEFAULT_SIGMA, samples=5000, seed=0))]
fn estimate_c(py: Python<'_>, k: usize, sigma: f64, samples: usize, seed: u64) -> PyResult<f64> {
    py.detach(|| lie::estimate_c(k, sigma, samples, seed)).map_err(err)
}

/// Log-log slope and its standard error for `(delta, seminorm)` rows.
#[pyfunction]
fn scaling_slope(rows: Vec<(f64, f64)>) -> PyResult<(f64, f64)> {
    regularize::scaling_slope(&rows).map_err(err)
}

/// Finite union of closed Fubini–Study balls.
#[pyclass(name = "CompactSet", frozen)]
struct PyCompactSet {
    inner: CompactSetSpec,
}

#[pymethods]
impl PyCompactSet {
    /// `balls` is a list of `(centre, radius)`.
    #[new]
    fn new(balls: Vec<(Vec<Complex64>, f64)>) -> PyResult<Self> {
        let balls = balls
            .into_iter()
            .map(|(c, radius)| Ok(Ball { center: point(c)?, radius }))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self { inner: CompactSetSpec::new(balls).map_err(err)? })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.dim()
    }

    fn distance(&self, p: Vec<Complex64>) -> PyResult<f64> {
        Ok(geometry::dist_to_set(&point(p)?, &self.inner))
    }
}

#[pyclass(name = "CutoffConfig", frozen)]
struct PyCutoffConfig {
    inner: CutoffConfig,
}

#[pymethods]
impl PyCutoffConfig {
    /// Estimates and validates `C`, then fixes `θ_max` and `C'`.
    #[staticmethod]
    #[pyo3(signature = (k, sigma=lie::DEFAULT_SIGMA, delta0=0.4, samples=regularize::DEFAULT_SAMPLES, seed=42))]
    fn calibrate(py: Python<'_>, k: usize, sigma: f64, delta0: f64, samples: usize, seed: u64) -> PyResult<Self> {
        let inner = py.detach(|| CutoffConfig::calibrate(k, sigma, delta0, samples, seed)).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }
    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }
    #[getter]
    fn delta0(&self) -> f64 {
        self.inner.delta0
    }
    #[getter]
    fn samples(&self) -> usize {
        self.inner.samples
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }
    #[getter]
    fn c_prime(&self) -> f64 {
        self.inner.c_prime
    }
    #[getter]
    fn theta_max(&self) -> f64 {
        self.inner.theta_max
    }

    fn theta(&self, delta: f64) -> PyResult<f64> {
        cutoff::choose_theta(&self.inner, delta).map_err(err)
    }
}

/// The cut-off `χ_δ` of a compact set.
#[pyclass(name = "Cutoff", frozen)]
struct PyCutoff {
    inner: CutoffFunction,
}

#[pymethods]
impl PyCutoff {
    #[new]
    fn new(py: Python<'_>, set: &PyCompactSet, delta: f64, config: &PyCutoffConfig) -> PyResult<Self> {
        let (set, config) = (&set.inner, &config.inner);
        let inner = py.detach(|| cutoff::build_cutoff(set, delta, config)).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta()
    }

    #[getter]
    fn theta(&self) -> f64 {
        self.inner.theta()
    }

    fn __call__(&self, p: Vec<Complex64>) -> PyResult<f64> {
        Ok(self.inner.eval_point(&point(p)?))
    }

    fn eval_many(&self, py: Python<'_>, points: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
        let points = points.into_iter().map(point).collect::<PyResult<Vec<_>>>()?;
        Ok(py.detach(|| points.iter().map(|p| self.inner.eval_point(p)).collect()))
    }

    /// Identity/support check and displacement audit, as a dict.
    #[pyo3(signature = (n_inner=200, n_outer=200, n_chart=100, seed=1))]
    fn verify<'py>(
        &self,
        py: Python<'py>,
        n_inner: usize,
        n_outer: usize,
        n_chart: usize,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = py
            .detach(|| cutoff::verify_cutoff_with_audit(&self.inner, n_inner, n_outer, n_chart, seed))
            .map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("max_dev_on_K", r.max_dev_on_k)?;
        out.set_item("max_val_off_Kdelta", r.max_val_off_kdelta)?;
        out.set_item("euclid_audit_max", r.euclid_audit_max)?;
        out.set_item("euclid_audit_bound", r.euclid_audit_bound)?;
        out.set_item("fs_audit_max", r.fs_audit_max)?;
        out.set_item("fs_audit_bound", r.fs_audit_bound)?;
        out.set_item("pass", r.pass)?;
        Ok(out)
    }
}

#[pymodule]
fn pkcutoff(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fs_distance, m)?)?;
    m.add_function(wrap_pyfunction!(to_chart, m)?)?;
    m.add_function(wrap_pyfunction!(algebra_dim, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(phi_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(h_map, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian_h, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_c, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_slope, m)?)?;
    m.add_class::<PyCompactSet>()?;
    m.add_class::<PyCutoffConfig>()?;
    m.add_class::<PyCutoff>()?;
    Ok(())
}
