//! Python bindings. Every function returns the same report tree as `--format json` of the CLI,
//! as a dict.

use propends::cli::{self, LatticeArg, Report, RunConfig, SubgroupArg};
use propends::ends::Strategy;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn err(e: propends::Error) -> PyErr {
    match cli::exit_code(&e) {
        2 => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_dict(py: Python<'_>, r: propends::Result<Report>) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(&r.map_err(err)?.to_value()).expect("json");
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn config(p: u32, depth: usize, max_cosets: usize, seed: u64) -> RunConfig {
    RunConfig {
        p,
        p_defaulted: false,
        depth,
        max_cosets,
        seed,
        ..RunConfig::default()
    }
}

#[pyfunction]
#[pyo3(signature = (expr, p=2, depth=6, max_cosets=20000))]
fn ends(py: Python<'_>, expr: &str, p: u32, depth: usize, max_cosets: usize) -> PyResult<Py<PyAny>> {
    to_dict(
        py,
        cli::run_ends(expr, &config(p, depth, max_cosets, 0), Strategy::Mixed),
    )
}

#[pyfunction]
#[pyo3(signature = (expr, kernel, p=2, modulus=None, max_cosets=20000))]
fn kurosh(
    py: Python<'_>,
    expr: &str,
    kernel: &str,
    p: u32,
    modulus: Option<u32>,
    max_cosets: usize,
) -> PyResult<Py<PyAny>> {
    let h = SubgroupArg::Kernel { spec: kernel, modulus };
    to_dict(py, cli::run_kurosh(expr, &h, &config(p, 6, max_cosets, 0)))
}

#[pyfunction]
#[pyo3(signature = (group, module="augmentation", p=2, trials=64, enum_budget=1 << 22, seed=0))]
fn decompose(
    py: Python<'_>,
    group: &str,
    module: &str,
    p: u32,
    trials: usize,
    enum_budget: u64,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let cfg = RunConfig {
        trials,
        enum_budget,
        ..config(p, 6, 20000, seed)
    };
    to_dict(py, cli::run_decompose(group, module, &cfg))
}

/// `sigma` as a list of integer rows.
#[pyfunction]
#[pyo3(signature = (sigma, p=2))]
fn classify_lattice(py: Python<'_>, sigma: Vec<Vec<i64>>, p: u32) -> PyResult<Py<PyAny>> {
    let text: Vec<String> = sigma
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    let text = text.join(";");
    to_dict(
        py,
        cli::run_classify_lattice(&LatticeArg::Sigma(&text), &config(p, 6, 20000, 0)),
    )
}

#[pyfunction]
#[pyo3(signature = (r, p=2))]
fn schreier(py: Python<'_>, r: usize, p: u32) -> PyResult<Py<PyAny>> {
    to_dict(py, cli::run_schreier(r, &config(p, 6, 20000, 0)))
}

#[pyfunction]
fn normalize(expr: &str) -> PyResult<String> {
    cli::normalize(expr).map_err(err)
}

#[pyfunction]
fn selftest(py: Python<'_>) -> PyResult<Py<PyAny>> {
    to_dict(py, cli::run_selftest(&RunConfig::default()))
}

#[pymodule]
fn propends_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(ends, m)?)?;
    m.add_function(wrap_pyfunction!(kurosh, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(classify_lattice, m)?)?;
    m.add_function(wrap_pyfunction!(schreier, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
