use std::collections::BTreeMap;

use polybridge_core::exact::{format_rational, parse_rational, parse_unipoly};
use polybridge_core::green::{
    bvp_solve as core_bvp_solve, bvp_verify, green_function, GreenFunction,
};
use polybridge_core::hermite::{hermite_solve as core_hermite_solve, HermiteSpec};
use polybridge_core::index_sets::{self, IndexSetI, IndexSetJ};
use polybridge_core::prediction::{predict, verify_prediction};
use polybridge_core::sim::{
    compare_covariance, make_bridge_paths, simulate_xn, terminal_residual, SimConfig,
};
use polybridge_core::{BridgeModel, GreenReport, PredictionModel, Rational, UniPoly};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: polybridge_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction(py: Python<'_>, r: &Rational) -> PyResult<PyObject> {
    let ctor = py.import("fractions")?.getattr("Fraction")?;
    Ok(ctor.call1((format_rational(r),))?.unbind())
}

/// Accepts `int`, `fractions.Fraction` or a `"p/q"` string.
fn rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    parse_rational(&value.str()?.to_string()).map_err(err)
}

fn coeffs(py: Python<'_>, p: &UniPoly) -> PyResult<Vec<PyObject>> {
    p.coeffs().iter().map(|c| fraction(py, c)).collect()
}

fn coeff_map(
    py: Python<'_>,
    polys: &BTreeMap<usize, UniPoly>,
) -> PyResult<BTreeMap<usize, Vec<PyObject>>> {
    polys
        .iter()
        .map(|(&k, p)| Ok((k, coeffs(py, p)?)))
        .collect()
}

fn jset(n: usize, j: Vec<usize>) -> PyResult<IndexSetJ> {
    IndexSetJ::new(n, &j).map_err(err)
}

fn iset(n: usize, i: Vec<usize>) -> PyResult<IndexSetI> {
    IndexSetI::new(n, &i).map_err(err)
}

#[pyfunction]
fn j_to_i(n: usize, j: Vec<usize>) -> PyResult<Vec<usize>> {
    Ok(index_sets::j_to_i(&jset(n, j)?).elems().to_vec())
}

#[pyfunction]
fn i_to_j(n: usize, i: Vec<usize>) -> PyResult<Vec<usize>> {
    Ok(index_sets::i_to_j(&iset(n, i)?)
        .map_err(err)?
        .elems()
        .to_vec())
}

#[pyfunction]
fn is_admissible(n: usize, i: Vec<usize>) -> PyResult<bool> {
    Ok(index_sets::is_admissible(&iset(n, i)?))
}

#[pyfunction]
fn dual_set(n: usize, i: Vec<usize>) -> PyResult<Vec<usize>> {
    Ok(index_sets::dual_set(&iset(n, i)?).elems().to_vec())
}

#[pyfunction]
fn admissible_sets(n: usize) -> PyResult<Vec<Vec<usize>>> {
    Ok(index_sets::admissible_sets(n)
        .map_err(err)?
        .iter()
        .map(|s| s.elems().to_vec())
        .collect())
}

#[pyfunction]
fn non_admissible_pairs(n: usize) -> PyResult<Vec<(Vec<usize>, Vec<usize>)>> {
    Ok(index_sets::non_admissible_pairs(n)
        .map_err(err)?
        .iter()
        .map(|(a, b)| (a.elems().to_vec(), b.elems().to_vec()))
        .collect())
}

/// Polynomial of degree `< 2n` with `p^(i)(0) = a[i]` and `p^(ι)(1) = b[k]` for the k-th `ι ∈ I`.
#[pyfunction]
fn hermite_solve(
    py: Python<'_>,
    n: usize,
    i: Vec<usize>,
    a: Vec<Bound<'_, PyAny>>,
    b: Vec<Bound<'_, PyAny>>,
) -> PyResult<Vec<PyObject>> {
    let a = a.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
    let b = b.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
    let spec = HermiteSpec::from_lists(iset(n, i)?, a, b).map_err(err)?;
    coeffs(py, &core_hermite_solve(&spec))
}

/// Solution of `v^(2n) = (-1)^n u` with the boundary conditions selected by `I`.
#[pyfunction]
fn bvp_solve(py: Python<'_>, n: usize, i: Vec<usize>, u: &str) -> PyResult<Vec<PyObject>> {
    let u = parse_unipoly(u).map_err(err)?;
    coeffs(py, &core_bvp_solve(&iset(n, i)?, &u))
}

#[pyfunction]
fn bvp_check(n: usize, i: Vec<usize>, u: &str) -> PyResult<bool> {
    let set = iset(n, i)?;
    let u = parse_unipoly(u).map_err(err)?;
    Ok(bvp_verify(&core_bvp_solve(&set, &u), &u, &set).passed)
}

/// Monte Carlo comparison of the empirical and exact bridge covariance.
#[pyfunction]
#[pyo3(signature = (n, j, paths=200_000, steps=100, seed=42, stride=10, grid_stride=1))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    n: usize,
    j: Vec<usize>,
    paths: usize,
    steps: usize,
    seed: u64,
    stride: usize,
    grid_stride: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let j = jset(n, j)?;
    let free = IndexSetJ::empty(n).map_err(err)?;
    let config = SimConfig::new(free, steps, paths, seed).with_record_stride(stride);
    let (comparison, residual) = py
        .allow_threads(|| {
            let ensemble = simulate_xn(&config)?;
            let bridge = make_bridge_paths(&ensemble, &j)?;
            Ok((
                compare_covariance(&bridge, &j, grid_stride)?,
                terminal_residual(&bridge),
            ))
        })
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("max_z_score", comparison.max_z_score)?;
    out.set_item("max_abs_err", comparison.max_abs_err)?;
    out.set_item("terminal_residual", residual)?;
    out.set_item("grid", comparison.grid.clone())?;
    out.set_item("empirical", comparison.empirical.clone())?;
    out.set_item("exact", comparison.exact.clone())?;
    out.set_item("passed", comparison.passes(4.0, 0.01) && residual <= 1e-10)?;
    Ok(out)
}

/// Bridge of the (n−1)-fold integrated Brownian motion pinned on `J`.
#[pyclass(name = "Bridge", frozen)]
struct PyBridge {
    inner: BridgeModel,
}

#[pymethods]
impl PyBridge {
    #[new]
    fn new(n: usize, j: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: BridgeModel::new(&jset(n, j)?),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: BridgeModel::from_json(text).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn j(&self) -> Vec<usize> {
        self.inner.j.elems().to_vec()
    }

    /// Drift polynomial coefficients keyed by `j`, lowest degree first.
    #[getter]
    fn drift(&self, py: Python<'_>) -> PyResult<BTreeMap<usize, Vec<PyObject>>> {
        coeff_map(py, &self.inner.drift)
    }

    #[getter]
    fn psi_tilde(&self, py: Python<'_>) -> PyResult<Vec<Vec<PyObject>>> {
        self.inner.psi_tilde.iter().map(|p| coeffs(py, p)).collect()
    }

    /// Exact covariance at rational `(s, t)`.
    fn cov(
        &self,
        py: Python<'_>,
        s: &Bound<'_, PyAny>,
        t: &Bound<'_, PyAny>,
    ) -> PyResult<PyObject> {
        fraction(py, &self.inner.cov.eval(&rational(s)?, &rational(t)?))
    }

    fn cov_float(&self, s: f64, t: f64) -> f64 {
        self.inner.cov.eval_f64(s, t)
    }

    fn to_plain(&self) -> String {
        self.inner.to_plain()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_latex(&self) -> String {
        self.inner.to_latex()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Bridge(n={}, J={})", self.inner.n, self.inner.j)
    }
}

/// Green function of the boundary value problem selected by `I`.
#[pyclass(name = "Green", frozen)]
struct PyGreen {
    inner: GreenFunction,
}

#[pymethods]
impl PyGreen {
    #[new]
    fn new(n: usize, i: Vec<usize>) -> PyResult<Self> {
        Ok(Self {
            inner: green_function(&iset(n, i)?),
        })
    }

    #[getter]
    fn lower(&self) -> String {
        self.inner.piece.lower().to_plain()
    }

    #[getter]
    fn upper(&self) -> String {
        self.inner.piece.upper().to_plain()
    }

    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }

    fn eval(
        &self,
        py: Python<'_>,
        s: &Bound<'_, PyAny>,
        t: &Bound<'_, PyAny>,
    ) -> PyResult<PyObject> {
        fraction(py, &self.inner.piece.eval(&rational(s)?, &rational(t)?))
    }

    fn report(&self) -> PyGreenReport {
        PyGreenReport {
            inner: GreenReport::new(&self.inner.set),
        }
    }

    fn __repr__(&self) -> String {
        format!("Green(n={}, I={})", self.inner.n, self.inner.set)
    }
}

/// Comparison of `G_I` with the Green function of the dual set.
#[pyclass(name = "GreenReport", frozen)]
struct PyGreenReport {
    inner: GreenReport,
}

#[pymethods]
impl PyGreenReport {
    #[getter]
    fn symmetric(&self) -> bool {
        self.inner.symmetric
    }

    #[getter]
    fn dual(&self) -> Vec<usize> {
        self.inner.dual.elems().to_vec()
    }

    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed()
    }

    fn to_plain(&self) -> String {
        self.inner.to_plain()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_latex(&self) -> String {
        self.inner.to_latex()
    }
}

/// Decomposition of the bridge after the present time `t0`.
#[pyclass(name = "Prediction", frozen)]
struct PyPrediction {
    inner: PredictionModel,
}

#[pymethods]
impl PyPrediction {
    #[new]
    fn new(n: usize, j: Vec<usize>, t0: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self {
            inner: predict(&jset(n, j)?, &rational(t0)?).map_err(err)?,
        })
    }

    #[getter]
    fn t0(&self, py: Python<'_>) -> PyResult<PyObject> {
        fraction(py, &self.inner.t0)
    }

    /// Coefficients of `Q_i` on the shifted clock, one list per derivative order.
    #[getter]
    fn q(&self, py: Python<'_>) -> PyResult<Vec<Vec<PyObject>>> {
        self.inner.q.iter().map(|p| coeffs(py, p)).collect()
    }

    #[getter]
    fn p_tilde(&self, py: Python<'_>) -> PyResult<BTreeMap<usize, Vec<PyObject>>> {
        coeff_map(py, &self.inner.p_tilde)
    }

    fn verify(&self) -> bool {
        verify_prediction(&self.inner)
    }

    fn absolute(&self) -> Self {
        Self {
            inner: self.inner.to_absolute(),
        }
    }

    fn to_plain(&self) -> String {
        self.inner.to_plain()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn to_latex(&self) -> String {
        self.inner.to_latex()
    }
}

#[pymodule]
fn polybridge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBridge>()?;
    m.add_class::<PyGreen>()?;
    m.add_class::<PyGreenReport>()?;
    m.add_class::<PyPrediction>()?;
    m.add_function(wrap_pyfunction!(j_to_i, m)?)?;
    m.add_function(wrap_pyfunction!(i_to_j, m)?)?;
    m.add_function(wrap_pyfunction!(is_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(dual_set, m)?)?;
    m.add_function(wrap_pyfunction!(admissible_sets, m)?)?;
    m.add_function(wrap_pyfunction!(non_admissible_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(hermite_solve, m)?)?;
    m.add_function(wrap_pyfunction!(bvp_solve, m)?)?;
    m.add_function(wrap_pyfunction!(bvp_check, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
