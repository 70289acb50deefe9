//! Python bindings: certified functions, tanh, ODE solving and Turing machine simulation.
//!
//! Dyadic inputs accept `int`, `float` (converted exactly) or `str` (`"-3"`, `"0.375"`,
//! `"1/64"`, `"+3p-2"`). Balls come back as [`PyBall`] with exact text and float views.

use odem_core::discrete_ode::{parse_ode_file, solve_certified, solve_explicit, solve_recurrence};
use odem_core::dyadic_ball::{tanh_ball, Ball, Dyadic, Precision};
use odem_core::funlib::{CertifiedFn, NAMES};
use odem_core::turing::machines::catalog;
use odem_core::turing::{
    encode_word, exec_space_trajectory, exec_time_trajectory, parse_word, reference_run, Config,
    EncodedConfig, TuringMachine,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyFloat, PyInt, PyString};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dyadic(obj: &Bound<'_, PyAny>) -> PyResult<Dyadic> {
    if obj.is_instance_of::<PyString>() {
        return Dyadic::parse_loose(&obj.extract::<String>()?).map_err(value_err);
    }
    if obj.is_instance_of::<PyInt>() {
        let v: i64 = obj.extract()?;
        return Ok(Dyadic::from_int(v));
    }
    if obj.is_instance_of::<PyFloat>() {
        let v: f64 = obj.extract()?;
        return Dyadic::from_f64(v)
            .ok_or_else(|| PyValueError::new_err(format!("{v} is not finite")));
    }
    Err(PyValueError::new_err("expected int, float or str"))
}

fn precision(bits: i64) -> PyResult<Precision> {
    Precision::new(bits).map_err(value_err)
}

/// A dyadic ball `center +/- radius`.
#[pyclass(name = "Ball", module = "odem", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyBall(Ball);

#[pymethods]
impl PyBall {
    /// Exact center in the `+mantissa_hex p exponent` form.
    #[getter]
    fn center(&self) -> String {
        self.0.center().to_string()
    }

    #[getter]
    fn radius(&self) -> String {
        self.0.radius().to_string()
    }

    #[getter]
    fn center_float(&self) -> f64 {
        self.0.center().to_f64()
    }

    #[getter]
    fn radius_float(&self) -> f64 {
        self.0.radius().to_f64()
    }

    fn contains(&self, x: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.0.contains(&dyadic(x)?))
    }

    fn __float__(&self) -> f64 {
        self.0.center().to_f64()
    }

    fn __repr__(&self) -> String {
        format!(
            "Ball({:e} +/- {:e})",
            self.0.center().to_f64(),
            self.0.radius().to_f64()
        )
    }
}

/// Names accepted by [`eval_fn`].
#[pyfunction]
fn functions() -> Vec<&'static str> {
    NAMES.to_vec()
}

/// Enclosure of `tanh(x)` at `prec` bits.
#[pyfunction]
#[pyo3(signature = (x, prec = 64))]
fn tanh(x: &Bound<'_, PyAny>, prec: i64) -> PyResult<PyBall> {
    Ok(PyBall(tanh_ball(
        &Ball::exact(dyadic(x)?),
        precision(prec)?,
    )))
}

/// Evaluate a certified function at accuracy `2^-m` on `[-2^n, 2^n]`.
///
/// Returns a dict with `value`, `target` (None off the validity band) and `pass`.
#[pyfunction]
#[pyo3(signature = (name, x, m, n = 0, prec = None))]
fn eval_fn<'py>(
    py: Python<'py>,
    name: &str,
    x: &Bound<'py, PyAny>,
    m: u32,
    n: u32,
    prec: Option<i64>,
) -> PyResult<Bound<'py, PyDict>> {
    let f = CertifiedFn::from_name(name).map_err(value_err)?;
    let x = dyadic(x)?;
    let p = prec.map(precision).transpose()?;
    let s = py.detach(|| f.sample(m, n, &x, p));
    let d = PyDict::new(py);
    d.set_item("value", PyBall(s.value))?;
    d.set_item("target", s.target.map(PyBall))?;
    d.set_item("pass", s.pass)?;
    Ok(d)
}

/// Solve a system given in the text format for `steps` steps.
///
/// `method` is `recurrence`, `explicit` or `certified` (then `prec` is the radius target in bits).
#[pyfunction]
#[pyo3(signature = (system, steps, y, prec = 64, method = "recurrence"))]
fn solve(
    py: Python<'_>,
    system: &str,
    steps: u64,
    y: Vec<Bound<'_, PyAny>>,
    prec: u32,
    method: &str,
) -> PyResult<Vec<PyBall>> {
    let (sys, kind) = parse_ode_file(system).map_err(value_err)?;
    let y: Vec<Ball> = y
        .iter()
        .map(|v| dyadic(v).map(Ball::exact))
        .collect::<PyResult<_>>()?;
    if y.len() != sys.n_y() {
        return Err(PyValueError::new_err(format!(
            "the system takes {} parameters, got {}",
            sys.n_y(),
            y.len()
        )));
    }
    let p = precision(i64::from(prec))?;
    let out = py.detach(|| match method {
        "recurrence" => Ok(solve_recurrence(&sys, kind, steps, &y, p)),
        "explicit" => Ok(solve_explicit(&sys, kind, steps, &y, p)),
        "certified" => Ok(solve_certified(&sys, kind, steps, &y, prec).0),
        other => Err(format!("unknown method `{other}`")),
    });
    Ok(out
        .map_err(PyValueError::new_err)?
        .into_iter()
        .map(PyBall)
        .collect())
}

/// Exact radix-4 encoding of a word over `0`, `1`, `3`, in the hex dyadic form.
#[pyfunction(name = "encode_word")]
fn encode_word_py(word: &str) -> PyResult<String> {
    let w = parse_word(word).map_err(value_err)?;
    Ok(encode_word(&w).map_err(value_err)?.to_string())
}

/// Built-in machine names.
#[pyfunction]
fn machines() -> Vec<&'static str> {
    catalog().into_iter().map(|(n, _, _)| n).collect()
}

fn machine(name_or_text: &str) -> PyResult<(TuringMachine, Vec<u8>)> {
    if let Some((_, m, input)) = catalog().into_iter().find(|(n, _, _)| *n == name_or_text) {
        return Ok((m, input));
    }
    Ok((
        TuringMachine::parse(name_or_text).map_err(value_err)?,
        Vec::new(),
    ))
}

/// Run the analytic simulation next to the exact interpreter.
///
/// `machine` is a built-in name or a machine in the text format. Without `space` the run is
/// time-bounded. Returns a dict with per-step `deviations`, `within` flags, the `final`
/// decoded configuration (or None) and the `reference` configuration.
#[pyfunction]
#[pyo3(signature = (machine, steps, input = None, m = 8, space = None, rounding = true))]
fn tm_compare<'py>(
    py: Python<'py>,
    machine: &str,
    steps: u64,
    input: Option<&str>,
    m: u32,
    space: Option<usize>,
    rounding: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let (tm, default_input) = self::machine(machine)?;
    let input = match input {
        Some(s) => parse_word(s).map_err(value_err)?,
        None => default_input,
    };
    let c0 = Config::initial(&tm, &input);
    let bound = space.unwrap_or(steps as usize + input.len());
    let reference = reference_run(&tm, &c0, steps, None).map_err(value_err)?;
    let e0 = EncodedConfig::exact(&c0);
    let traj = py.detach(|| match space {
        Some(s) => exec_space_trajectory(&tm, m, s, steps, &e0, rounding),
        None => exec_time_trajectory(&tm, m, steps, &e0, input.len(), rounding),
    });
    let devs: Vec<_> = traj
        .iter()
        .zip(&reference)
        .map(|(e, c)| e.deviation(c))
        .collect();
    let d = PyDict::new(py);
    d.set_item(
        "deviations",
        devs.iter()
            .map(|v| v.tape_max().to_f64())
            .collect::<Vec<_>>(),
    )?;
    d.set_item(
        "within",
        devs.iter().map(|v| v.within(m)).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "final",
        traj.last()
            .and_then(|e| e.decode(bound))
            .map(|c| c.to_string()),
    )?;
    d.set_item("reference", reference.last().map(|c| c.to_string()))?;
    Ok(d)
}

#[pymodule]
fn odem(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBall>()?;
    m.add_function(wrap_pyfunction!(functions, m)?)?;
    m.add_function(wrap_pyfunction!(tanh, m)?)?;
    m.add_function(wrap_pyfunction!(eval_fn, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(encode_word_py, m)?)?;
    m.add_function(wrap_pyfunction!(machines, m)?)?;
    m.add_function(wrap_pyfunction!(tm_compare, m)?)?;
    Ok(())
}
