//! Python bindings: Möbius maps, points, unit tangent vectors, winding and
//! the nested-sequence runs. Boundary points are floats with `math.inf`
//! standing for `∞`.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hypwind::schottky::{self, NestedSequence, NestedSpec};
use hypwind::walpha::{self, AlphaRun};
use hypwind::{checks, hplane, tangent, winding};
use hypwind::{BoundaryPoint, HPoint, MoebiusMap, UnitVector};

create_exception!(
    hypwind,
    HypwindError,
    PyValueError,
    "Error raised by the geometry core."
);

fn err(e: hypwind::Error) -> PyErr {
    HypwindError::new_err(e.to_string())
}

fn to_boundary(x: f64) -> PyResult<BoundaryPoint> {
    if x.is_infinite() {
        Ok(BoundaryPoint::Infinity)
    } else {
        BoundaryPoint::real(x).map_err(err)
    }
}

fn from_boundary(x: BoundaryPoint) -> f64 {
    x.as_real().unwrap_or(f64::INFINITY)
}

#[pyclass(name = "MoebiusMap", module = "hypwind", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyMoebius(MoebiusMap);

#[pymethods]
impl PyMoebius {
    /// Normalizes `[[a, b], [c, d]]` to determinant one.
    #[new]
    fn new(a: f64, b: f64, c: f64, d: f64) -> PyResult<Self> {
        MoebiusMap::new(a, b, c, d).map(PyMoebius).map_err(err)
    }

    #[staticmethod]
    fn identity() -> Self {
        PyMoebius(MoebiusMap::IDENTITY)
    }

    #[staticmethod]
    fn translation(s: f64) -> Self {
        PyMoebius(MoebiusMap::translation(s))
    }

    #[staticmethod]
    fn dilation(factor: f64) -> Self {
        PyMoebius(MoebiusMap::dilation(factor))
    }

    #[staticmethod]
    fn rotation(phi: f64) -> Self {
        PyMoebius(MoebiusMap::rotation(phi))
    }

    /// Hyperbolic map with repelling point `minus`, attracting point `plus`
    /// and translation length `length`.
    #[staticmethod]
    fn hyperbolic(minus: f64, plus: f64, length: f64) -> PyResult<Self> {
        MoebiusMap::hyperbolic_from_axis(to_boundary(minus)?, to_boundary(plus)?, length)
            .map(PyMoebius)
            .map_err(err)
    }

    fn entries(&self) -> (f64, f64, f64, f64) {
        let [a, b, c, d] = self.0.entries();
        (a, b, c, d)
    }

    fn trace(&self) -> f64 {
        self.0.trace()
    }

    fn compose(&self, other: &PyMoebius) -> Self {
        PyMoebius(self.0.compose(&other.0))
    }

    fn __mul__(&self, other: &PyMoebius) -> Self {
        self.compose(other)
    }

    fn inverse(&self) -> Self {
        PyMoebius(self.0.inverse())
    }

    fn conjugate_by(&self, f: &PyMoebius) -> Self {
        PyMoebius(self.0.conjugate_by(&f.0))
    }

    fn apply_point(&self, z: &PyPoint) -> PyPoint {
        PyPoint(self.0.apply_point(z.0))
    }

    fn apply_boundary(&self, x: f64) -> PyResult<f64> {
        Ok(from_boundary(self.0.apply_boundary(to_boundary(x)?)))
    }

    /// `"elliptic"`, `"parabolic"`, `"hyperbolic"` or `"identity"`.
    fn classify(&self) -> String {
        format!("{:?}", self.0.classify()).to_lowercase()
    }

    /// `(minus, plus, length)` of a hyperbolic map.
    fn axis(&self) -> PyResult<(f64, f64, f64)> {
        let a = self.0.axis_data().map_err(err)?;
        Ok((from_boundary(a.minus), from_boundary(a.plus), a.length))
    }

    fn approx_eq(&self, other: &PyMoebius, tol: f64) -> bool {
        self.0.approx_eq(&other.0, tol)
    }

    fn __repr__(&self) -> String {
        let [a, b, c, d] = self.0.entries();
        format!("MoebiusMap({a:?}, {b:?}, {c:?}, {d:?})")
    }
}

#[pyclass(name = "HPoint", module = "hypwind", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyPoint(HPoint);

#[pymethods]
impl PyPoint {
    #[new]
    fn new(x: f64, y: f64) -> PyResult<Self> {
        HPoint::new(x, y).map(PyPoint).map_err(err)
    }

    #[getter]
    fn x(&self) -> f64 {
        self.0.x()
    }

    #[getter]
    fn y(&self) -> f64 {
        self.0.y()
    }

    fn dist(&self, other: &PyPoint) -> f64 {
        hplane::dist(self.0, other.0)
    }

    fn __repr__(&self) -> String {
        format!("HPoint({:?}, {:?})", self.0.x(), self.0.y())
    }
}

#[pyclass(name = "UnitVector", module = "hypwind", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyVector(UnitVector);

#[pymethods]
impl PyVector {
    /// Vector at `base` pointing towards the boundary point `forward`.
    #[new]
    fn new(base: &PyPoint, forward: f64) -> PyResult<Self> {
        Ok(PyVector(UnitVector::frame_from(
            base.0,
            to_boundary(forward)?,
        )))
    }

    /// The vector at `i` pointing to `∞`.
    #[staticmethod]
    fn reference() -> Self {
        PyVector(UnitVector::reference())
    }

    #[staticmethod]
    fn from_frame(g: &PyMoebius) -> Self {
        PyVector(UnitVector::from_frame(g.0))
    }

    fn frame(&self) -> PyMoebius {
        PyMoebius(*self.0.frame())
    }

    fn basepoint(&self) -> PyPoint {
        PyPoint(self.0.basepoint())
    }

    fn forward(&self) -> f64 {
        from_boundary(self.0.forward())
    }

    fn backward(&self) -> f64 {
        from_boundary(self.0.backward())
    }

    fn eval(&self, t: f64) -> PyPoint {
        PyPoint(self.0.eval(t))
    }

    fn geodesic_flow(&self, t: f64) -> Self {
        PyVector(self.0.geodesic_flow(t))
    }

    fn horocycle_flow(&self, s: f64) -> Self {
        PyVector(self.0.horocycle_flow(s))
    }

    fn apply_isometry(&self, g: &PyMoebius) -> Self {
        PyVector(self.0.apply_isometry(&g.0))
    }

    fn rotate(&self, theta: f64) -> Self {
        PyVector(self.0.rotate(theta))
    }

    fn direction_angle(&self) -> f64 {
        self.0.direction_angle()
    }

    fn __repr__(&self) -> String {
        let p = self.0.basepoint();
        format!(
            "UnitVector(HPoint({:?}, {:?}), {:?})",
            p.x(),
            p.y(),
            self.forward()
        )
    }
}

#[pyfunction]
fn dist(z: &PyPoint, w: &PyPoint) -> f64 {
    hplane::dist(z.0, w.0)
}

/// `B_ξ(x, y)`.
#[pyfunction]
fn busemann(xi: f64, x: &PyPoint, y: &PyPoint) -> PyResult<f64> {
    Ok(hplane::busemann(to_boundary(xi)?, x.0, y.0))
}

#[pyfunction]
fn d1(v: &PyVector, w: &PyVector) -> f64 {
    tangent::d1(&v.0, &w.0)
}

#[pyfunction]
fn d2(v: &PyVector, w: &PyVector) -> f64 {
    tangent::d2(&v.0, &w.0)
}

/// Wound vector with its winding time and crossing times.
#[pyfunction]
fn wind<'py>(py: Python<'py>, g: &PyMoebius, u: &PyVector) -> PyResult<Bound<'py, PyDict>> {
    let w = winding::wind(&g.0, &u.0).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("vector", PyVector(w.vector))?;
    d.set_item("tau", w.tau)?;
    d.set_item("t_cross", w.t_cross)?;
    d.set_item("t_cross_wound", w.t_cross_wound)?;
    Ok(d)
}

#[pyfunction]
fn winding_time(g: &PyMoebius, u: &PyVector) -> PyResult<f64> {
    winding::winding_time(&g.0, &u.0).map_err(err)
}

#[pyclass(name = "NestedSequence", module = "hypwind", frozen)]
struct PySequence(NestedSequence);

#[pymethods]
impl PySequence {
    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn generators(&self) -> Vec<PyMoebius> {
        self.0.gens.iter().map(|g| PyMoebius(*g)).collect()
    }

    #[getter]
    fn lengths(&self) -> Vec<f64> {
        self.0.lengths.clone()
    }

    /// Crossing times of the axes with the reference ray.
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.0.t.clone()
    }

    fn validate(&self) -> bool {
        schottky::validate_nested(&self.0).passes()
    }

    fn certify(&self) -> bool {
        schottky::certify_schottky(&self.0).passes()
    }
}

/// Nested sequence with axes `(−A_n, A_n)`; lengths default to `2^{−(2n+3)}`.
#[pyfunction]
#[pyo3(signature = (depth = 3, first_scale = std::f64::consts::E, margin = 4.0, lengths = None))]
fn build_nested(
    depth: usize,
    first_scale: f64,
    margin: f64,
    lengths: Option<Vec<f64>>,
) -> PyResult<PySequence> {
    let mut spec = NestedSpec::with_depth(depth);
    spec.first_scale = first_scale;
    spec.margin = margin;
    if let Some(l) = lengths {
        spec.lengths = l;
    }
    schottky::build_nested(&spec).map(PySequence).map_err(err)
}

#[pyclass(name = "AlphaRun", module = "hypwind", frozen)]
struct PyRun(AlphaRun);

#[pymethods]
impl PyRun {
    #[getter]
    fn pick(&self) -> Vec<usize> {
        self.0.pick.clone()
    }

    #[getter]
    fn r(&self) -> Vec<f64> {
        self.0.r.clone()
    }

    #[getter]
    fn endpoints(&self) -> Vec<f64> {
        self.0.endpoints.clone()
    }

    #[getter]
    fn endpoint_gaps(&self) -> Vec<f64> {
        self.0.endpoint_gaps.clone()
    }

    #[getter]
    fn tau_inc(&self) -> Vec<f64> {
        self.0.tau_inc.clone()
    }

    /// Estimate of the limit vector `w_α`.
    fn w_alpha(&self) -> PyVector {
        PyVector(walpha::w_alpha(&self.0))
    }
}

/// Runs along `pick`, by default the whole sequence.
#[pyfunction]
#[pyo3(signature = (seq, pick = None))]
fn run_alpha(seq: &PySequence, pick: Option<Vec<usize>>) -> PyResult<PyRun> {
    let pick = pick.unwrap_or_else(|| (0..seq.0.len()).collect());
    walpha::run_alpha(&seq.0, &pick).map(PyRun).map_err(err)
}

/// Convergence report as a dict; `rows` holds the `w_α` rows as tuples
/// `(t, n_star, d1_upper, d2_upper, bound, level)`.
#[pyfunction]
#[pyo3(signature = (run, t_max = 25.0, step = 0.25, levels = 4))]
fn verify_wss<'py>(
    py: Python<'py>,
    run: &PyRun,
    t_max: f64,
    step: f64,
    levels: usize,
) -> PyResult<Bound<'py, PyDict>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(HypwindError::new_err(format!("step {step} outside (0, 1]")));
    }
    let r = walpha::verify_wss(&run.0, t_max, step, levels);
    let rows: Vec<_> = r
        .w_alpha_rows()
        .map(|row| {
            (
                row.t,
                row.n_star,
                row.d1_upper,
                row.d2_upper,
                row.bound,
                row.level,
            )
        })
        .collect();
    let d = PyDict::new(py);
    d.set_item("pass", r.pass)?;
    d.set_item("d2_pass", r.d2_pass)?;
    d.set_item("violations", r.violations)?;
    d.set_item("d2_violations", r.d2_violations)?;
    d.set_item("levels_covered", r.levels_covered)?;
    d.set_item("t_levels", r.t_levels)?;
    d.set_item("first_met", r.first_met)?;
    d.set_item("d2_first_met", r.d2_first_met)?;
    d.set_item("rows", rows)?;
    Ok(d)
}

#[pyfunction]
fn diagonal_avoid(seq: &PySequence, targets: Vec<f64>) -> PyResult<Vec<usize>> {
    walpha::diagonal_avoid(&seq.0, &targets).map_err(err)
}

/// Seeded invariant suites as a list of dicts.
#[pyfunction]
#[pyo3(signature = (seed = 0, trials = 1000))]
fn run_checks<'py>(py: Python<'py>, seed: u64, trials: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
    if trials == 0 {
        return Err(HypwindError::new_err("trials must be positive"));
    }
    checks::run_all(seed, trials)
        .into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("suite", r.suite)?;
            d.set_item("trials", r.trials)?;
            d.set_item("worst_slack", r.worst_slack)?;
            d.set_item("violations", r.violations)?;
            Ok(d)
        })
        .collect()
}

#[pymodule(name = "hypwind")]
fn hypwind_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HypwindError", m.py().get_type::<HypwindError>())?;
    m.add_class::<PyMoebius>()?;
    m.add_class::<PyPoint>()?;
    m.add_class::<PyVector>()?;
    m.add_class::<PySequence>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(dist, m)?)?;
    m.add_function(wrap_pyfunction!(busemann, m)?)?;
    m.add_function(wrap_pyfunction!(d1, m)?)?;
    m.add_function(wrap_pyfunction!(d2, m)?)?;
    m.add_function(wrap_pyfunction!(wind, m)?)?;
    m.add_function(wrap_pyfunction!(winding_time, m)?)?;
    m.add_function(wrap_pyfunction!(build_nested, m)?)?;
    m.add_function(wrap_pyfunction!(run_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(verify_wss, m)?)?;
    m.add_function(wrap_pyfunction!(diagonal_avoid, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
