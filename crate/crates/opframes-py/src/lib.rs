//! Python bindings: operator families over matrix algebras, optimal
//! (K-)frame bounds, and the stability certifiers. Matrices cross the
//! boundary as nested lists of Python complex numbers; certificates come
//! back as plain dicts via JSON.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;

use opframes::instance::{GenKind, GenParams, KKind};
use opframes::linalg::CMat;
use opframes::perturb;
use opframes::{AdjointableOp, Error, ModuleVector, OperatorFamily};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mat_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<CMat> {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if nr == 0 || nc == 0 || rows.iter().any(|r| r.len() != nc) {
        return Err(PyValueError::new_err("matrix rows must be nonempty and equal length"));
    }
    Ok(CMat::from_fn(nr, nc, |i, j| rows[i][j]))
}

fn mat_to_rows(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyObject {
    match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_py(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py(py)
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_py(py)
            }
        }
        serde_json::Value::String(s) => s.into_py(py),
        serde_json::Value::Array(a) => {
            a.iter().map(|x| json_to_py(py, x)).collect::<Vec<_>>().into_py(py)
        }
        serde_json::Value::Object(o) => {
            let d = pyo3::types::PyDict::new_bound(py);
            for (k, val) in o {
                d.set_item(k, json_to_py(py, val)).unwrap();
            }
            d.into_py(py)
        }
    }
}

fn cert_to_py(py: Python<'_>, c: &perturb::Certificate) -> PyObject {
    json_to_py(py, &serde_json::to_value(c).expect("certificate serializes"))
}

/// An adjointable operator on the module, held as its flattened
/// `nk`-by-`nk` matrix.
#[pyclass(name = "Operator")]
#[derive(Clone)]
struct PyOperator {
    inner: AdjointableOp,
}

#[pymethods]
impl PyOperator {
    #[new]
    fn new(k: usize, n: usize, flat: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = mat_from_rows(flat)?;
        Ok(Self {
            inner: AdjointableOp::from_flat(k, n, m).map_err(err)?,
        })
    }

    #[staticmethod]
    fn identity(k: usize, n: usize) -> Self {
        Self {
            inner: AdjointableOp::identity(k, n),
        }
    }

    fn adjoint(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    /// `self` after `other`.
    fn compose(&self, other: &PyOperator) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.compose(&other.inner).map_err(err)?,
        })
    }

    fn norm(&self) -> f64 {
        self.inner.op_norm()
    }

    fn is_co_isometry(&self, tol: f64) -> bool {
        self.inner.is_co_isometry(tol)
    }

    fn flat(&self) -> Vec<Vec<Complex64>> {
        mat_to_rows(self.inner.flat())
    }

    fn __repr__(&self) -> String {
        format!(
            "Operator(k={}, n={}, norm={:.6})",
            self.inner.k(),
            self.inner.n(),
            self.inner.op_norm()
        )
    }
}

/// A module vector, held as its flattened `k`-by-`nk` matrix.
#[pyclass(name = "Vector")]
#[derive(Clone)]
struct PyVector {
    inner: ModuleVector,
}

#[pymethods]
impl PyVector {
    #[new]
    fn new(k: usize, n: usize, flat: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = mat_from_rows(flat)?;
        Ok(Self {
            inner: ModuleVector::from_flat(k, n, m).map_err(err)?,
        })
    }

    fn norm(&self) -> f64 {
        self.inner.scalar_norm()
    }

    /// The algebra-valued inner product `<self, other>` as a k-by-k matrix.
    fn inner_product(&self, other: &PyVector) -> PyResult<Vec<Vec<Complex64>>> {
        let a = self.inner.inner_product(&other.inner).map_err(err)?;
        Ok(mat_to_rows(a.matrix()))
    }
}

/// A family of adjointable operators with its frame calculus.
#[pyclass(name = "Family")]
#[derive(Clone)]
struct PyFamily {
    inner: OperatorFamily,
}

#[pymethods]
impl PyFamily {
    #[new]
    fn new(ops: Vec<PyOperator>) -> PyResult<Self> {
        Ok(Self {
            inner: OperatorFamily::new(ops.into_iter().map(|o| o.inner).collect())
                .map_err(err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn frame_operator(&self) -> PyOperator {
        PyOperator {
            inner: self.inner.frame_operator(),
        }
    }

    /// Optimal bounds: `(lower, upper, classification)`.
    fn bounds(&self) -> PyResult<(f64, f64, String)> {
        let b = self.inner.optimal_bounds().map_err(err)?;
        let cls = serde_json::to_value(b.classification).expect("classification");
        let name = cls
            .get("kind")
            .and_then(|k| k.as_str())
            .unwrap_or("unknown")
            .to_string();
        Ok((b.lower, b.upper, name))
    }

    /// K-frame bounds: `(lower, upper, is_k_frame, unconstrained)`.
    fn k_bounds(&self, k_op: &PyOperator) -> PyResult<(f64, f64, bool, bool)> {
        let b = self.inner.k_optimal_bounds(&k_op.inner).map_err(err)?;
        Ok((b.lower, b.upper, b.k_frame, b.unconstrained))
    }

    fn apply(&self, op_index: usize, x: &PyVector) -> PyResult<PyVector> {
        let ops = self.inner.ops();
        let op = ops
            .get(op_index)
            .ok_or_else(|| PyValueError::new_err("operator index out of range"))?;
        Ok(PyVector {
            inner: op.apply(&x.inner).map_err(err)?,
        })
    }

    /// Sampled norm-ratio extrema `(min_ratio, max_ratio)`.
    #[pyo3(signature = (samples, seed, k_op=None))]
    fn probe(
        &self,
        samples: usize,
        seed: u64,
        k_op: Option<&PyOperator>,
    ) -> PyResult<(f64, f64)> {
        let p = self
            .inner
            .norm_char_probe(samples, seed, k_op.map(|k| &k.inner))
            .map_err(err)?;
        Ok((p.min_ratio, p.max_ratio))
    }
}

#[pyfunction]
#[pyo3(signature = (t, r, m=None, k_op=None))]
fn certify_min_constant(
    py: Python<'_>,
    t: &PyFamily,
    r: &PyFamily,
    m: Option<f64>,
    k_op: Option<&PyOperator>,
) -> PyResult<PyObject> {
    let k = k_op.map(|k| &k.inner);
    let m = match m {
        Some(m) => m,
        None => perturb::derive_min_constant(&t.inner, &r.inner, k).map_err(err)?,
    };
    let c = perturb::certify_min_constant(&t.inner, &r.inner, m, k).map_err(err)?;
    Ok(cert_to_py(py, &c))
}

#[pyfunction]
#[pyo3(signature = (t, r, plus=true))]
fn certify_bessel_perturbation(
    py: Python<'_>,
    t: &PyFamily,
    r: &PyFamily,
    plus: bool,
) -> PyResult<PyObject> {
    let sign = if plus {
        perturb::Sign::Plus
    } else {
        perturb::Sign::Minus
    };
    let c = perturb::certify_bessel_perturbation(&t.inner, &r.inner, sign).map_err(err)?;
    Ok(cert_to_py(py, &c))
}

#[pyfunction]
fn certify_alpha_beta(
    py: Python<'_>,
    t: &PyFamily,
    r: &PyFamily,
    alpha: f64,
    beta: f64,
    k_op: &PyOperator,
) -> PyResult<PyObject> {
    let c = perturb::certify_alpha_beta(&t.inner, &r.inner, alpha, beta, &k_op.inner)
        .map_err(err)?;
    Ok(cert_to_py(py, &c))
}

/// Generate a seeded instance; returns its canonical JSON text.
#[pyfunction]
#[pyo3(signature = (kind, k, n, count, seed, target=None, epsilon=None, co_isometry=true))]
#[allow(clippy::too_many_arguments)]
fn random_instance_json(
    kind: &str,
    k: usize,
    n: usize,
    count: usize,
    seed: u64,
    target: Option<f64>,
    epsilon: Option<f64>,
    co_isometry: bool,
) -> PyResult<String> {
    let kind: GenKind = kind.parse().map_err(err)?;
    let params = GenParams {
        target,
        epsilon,
        k_kind: Some(if co_isometry {
            KKind::CoIsometry
        } else {
            KKind::General
        }),
    };
    let inst = opframes::random_instance(kind, k, n, count, seed, params).map_err(err)?;
    Ok(inst.to_json())
}

/// Parse canonical instance JSON; returns `(families, k_operator)` with
/// families as a dict of `Family`.
#[pyfunction]
fn parse_instance_json(
    py: Python<'_>,
    text: &str,
) -> PyResult<(PyObject, Option<PyOperator>)> {
    let inst = opframes::Instance::from_json(text).map_err(err)?;
    let d = pyo3::types::PyDict::new_bound(py);
    for (name, fam) in &inst.families {
        d.set_item(name, PyFamily { inner: fam.clone() }.into_py(py))?;
    }
    Ok((
        d.into_py(py),
        inst.k_operator.map(|k| PyOperator { inner: k }),
    ))
}

#[pymodule]
fn opframes_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOperator>()?;
    m.add_class::<PyVector>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(certify_min_constant, m)?)?;
    m.add_function(wrap_pyfunction!(certify_bessel_perturbation, m)?)?;
    m.add_function(wrap_pyfunction!(certify_alpha_beta, m)?)?;
    m.add_function(wrap_pyfunction!(random_instance_json, m)?)?;
    m.add_function(wrap_pyfunction!(parse_instance_json, m)?)?;
    Ok(())
}
