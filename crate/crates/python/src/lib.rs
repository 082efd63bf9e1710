//! Python bindings. Reports are returned as JSON strings with the same schema
//! the command line writes.

use jacobilab::linalg::random_orthogonal;
use jacobilab::report::{self, RunConfig};
use jacobilab::tensor_io::{tensor_from_json, tensor_to_json};
use jacobilab::{AlgebraicCurvatureTensor, Sign, SkewEndomorphism, TwoRootModelParams};
use nalgebra::{DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: jacobilab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_sign(sign: i32) -> PyResult<Sign> {
    match sign {
        1 => Ok(Sign::Plus),
        -1 => Ok(Sign::Minus),
        other => Err(PyValueError::new_err(format!("sign must be +1 or -1, got {other}"))),
    }
}

fn frame(dim: usize, seed: Option<u64>) -> DMatrix<f64> {
    seed.map_or_else(|| DMatrix::identity(dim, dim), |s| random_orthogonal(dim, s))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// An algebraic curvature tensor with 0-based component access.
#[pyclass(name = "CurvatureTensor", module = "jacobilab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTensor {
    inner: AlgebraicCurvatureTensor,
}

#[pymethods]
impl PyTensor {
    /// Constant sectional curvature one.
    #[staticmethod]
    fn r0(dim: usize) -> Self {
        Self { inner: jacobilab::build_r0(dim) }
    }

    /// The tensor generated by the skew map with frame constants `nus`.
    #[staticmethod]
    #[pyo3(signature = (dim, nus, frame_seed=None))]
    fn rp(dim: usize, nus: Vec<f64>, frame_seed: Option<u64>) -> PyResult<Self> {
        let p = SkewEndomorphism::from_frame(&frame(dim, frame_seed), &nus).map_err(err)?;
        Ok(Self { inner: jacobilab::build_rp(&p) })
    }

    /// `sign*(-Rp/3 + mu*R0)`.
    #[staticmethod]
    #[pyo3(signature = (dim, mu, nus, sign=1, frame_seed=None))]
    fn two_root(dim: usize, mu: f64, nus: Vec<f64>, sign: i32, frame_seed: Option<u64>) -> PyResult<Self> {
        let params = TwoRootModelParams::new(dim, mu, nus, frame(dim, frame_seed), parse_sign(sign)?).map_err(err)?;
        Ok(Self { inner: jacobilab::build_two_root_model(&params).map_err(err)? })
    }

    /// Generator entries `(i, j, k, l, value)`, 0-based.
    #[staticmethod]
    fn from_generators(dim: usize, entries: Vec<(usize, usize, usize, usize, f64)>) -> PyResult<Self> {
        Ok(Self { inner: jacobilab::build_act(dim, &entries).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: tensor_from_json(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        tensor_to_json(&self.inner)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn get(&self, i: usize, j: usize, k: usize, l: usize) -> PyResult<f64> {
        let n = self.inner.dim();
        if [i, j, k, l].iter().any(|&x| x >= n) {
            return Err(err(jacobilab::Error::IndexOutOfRange { i, j, k, l, dim: n }));
        }
        Ok(self.inner.get(i, j, k, l))
    }

    fn components(&self) -> Vec<f64> {
        self.inner.components().to_vec()
    }

    fn scaled(&self, c: f64) -> Self {
        Self { inner: &self.inner * c }
    }

    fn add(&self, other: &PyTensor) -> PyResult<Self> {
        if other.inner.dim() != self.inner.dim() {
            return Err(err(jacobilab::Error::DimensionMismatch {
                expected: self.inner.dim(),
                actual: other.inner.dim(),
            }));
        }
        Ok(Self { inner: &self.inner + &other.inner })
    }

    fn max_abs_diff(&self, other: &PyTensor) -> f64 {
        self.inner.max_abs_diff(&other.inner)
    }

    fn sectional_curvature(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
        self.check_len(&x)?;
        self.check_len(&y)?;
        jacobilab::sectional_curvature(&self.inner, &DVector::from_vec(x), &DVector::from_vec(y)).map_err(err)
    }

    /// Matrix of `Y -> R(Y, x)x` as a list of rows.
    fn jacobi_matrix(&self, x: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        self.check_len(&x)?;
        Ok(rows(jacobilab::jacobi_matrix(&self.inner, &DVector::from_vec(x)).as_matrix()))
    }

    /// Clustered reduced spectrum at `x` as `[(value, multiplicity), ...]`, ascending.
    #[pyo3(signature = (x, rel_tol=1e-7))]
    fn spectrum(&self, x: Vec<f64>, rel_tol: f64) -> PyResult<Vec<(f64, usize)>> {
        self.check_len(&x)?;
        let prof = jacobilab::spectral_profile(&self.inner, &DVector::from_vec(x), rel_tol).map_err(err)?;
        Ok(prof.clusters.clusters.iter().map(|c| (c.value, c.multiplicity)).collect())
    }

    fn __repr__(&self) -> String {
        format!("CurvatureTensor(dim={}, max_abs={})", self.inner.dim(), self.inner.max_abs())
    }
}

impl PyTensor {
    fn check_len(&self, x: &[f64]) -> PyResult<()> {
        if x.len() != self.inner.dim() {
            return Err(err(jacobilab::Error::DimensionMismatch {
                expected: self.inner.dim(),
                actual: x.len(),
            }));
        }
        Ok(())
    }
}

fn config(command: &str, samples: usize, seed: u64, rel_tol: f64) -> PyResult<RunConfig> {
    if samples == 0 || !(rel_tol > 0.0) {
        return Err(PyValueError::new_err("samples must be >= 1 and rel_tol > 0"));
    }
    Ok(RunConfig {
        command: command.into(),
        input: "<python>".into(),
        samples,
        seed,
        rel_tol,
    })
}

/// Analysis report (k-root, Osserman, k-stein) as JSON.
#[pyfunction]
#[pyo3(signature = (tensor, samples=256, seed=0, rel_tol=1e-7))]
fn analyze(tensor: &PyTensor, samples: usize, seed: u64, rel_tol: f64) -> PyResult<String> {
    let rep = report::analyze(&tensor.inner, config("analyze", samples, seed, rel_tol)?).map_err(err)?;
    Ok(report::to_json(&rep))
}

/// Structural identity probes as JSON.
#[pyfunction]
#[pyo3(signature = (tensor, samples=256, seed=0, rel_tol=1e-7))]
fn probe(tensor: &PyTensor, samples: usize, seed: u64, rel_tol: f64) -> PyResult<String> {
    let rep = report::probe(&tensor.inner, config("probe", samples, seed, rel_tol)?).map_err(err)?;
    Ok(report::to_json(&rep))
}

/// Simple-root factorization pipeline as JSON.
#[pyfunction]
#[pyo3(signature = (tensor, samples=256, seed=0, rel_tol=1e-7))]
fn factorize(tensor: &PyTensor, samples: usize, seed: u64, rel_tol: f64) -> PyResult<String> {
    let rep = report::factorize(&tensor.inner, config("factorize", samples, seed, rel_tol)?).map_err(err)?;
    Ok(report::to_json(&rep))
}

#[pyfunction]
fn rho(n: u64) -> PyResult<u64> {
    if n == 0 {
        return Err(PyValueError::new_err("rho needs n >= 1"));
    }
    Ok(jacobilab::rho(n))
}

/// `(code, message, admissible q range or None)`.
#[pyfunction]
fn screen(n: usize) -> PyResult<(String, String, Option<(u64, u64)>)> {
    let s = jacobilab::dimension_screen(n).map_err(err)?;
    Ok((s.code, s.message, s.q_range))
}

#[pymodule]
#[pyo3(name = "jacobilab")]
fn jacobilab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTensor>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(rho, m)?)?;
    m.add_function(wrap_pyfunction!(screen, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
