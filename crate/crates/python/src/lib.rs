//! Python bindings. Structured results come back as plain dicts and lists.

use meanfield_core::{cavity, diluted, oracle, popdyn, recursion, Error, Kernel, Mode};
use pyo3::create_exception;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(meanfield_opt, DomainError, PyValueError);
create_exception!(meanfield_opt, ContractError, PyValueError);
create_exception!(meanfield_opt, CapacityError, PyValueError);
create_exception!(meanfield_opt, NumericError, PyArithmeticError);

fn err(e: Error) -> PyErr {
    match e {
        Error::Domain(m) => DomainError::new_err(m),
        Error::Contract(m) => ContractError::new_err(m),
        Error::Capacity(m) => CapacityError::new_err(m),
        e @ Error::Numeric { .. } => NumericError::new_err(e.to_string()),
    }
}

fn kernel(name: &str) -> PyResult<Kernel> {
    name.parse().map_err(DomainError::new_err)
}

fn mode(name: &str) -> PyResult<Mode> {
    name.parse().map_err(DomainError::new_err)
}

/// Round-trips through JSON; non-finite reals become `None`.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn graph(weights: Vec<Vec<f64>>) -> PyResult<oracle::WeightedCompleteGraph> {
    let n = weights.len();
    if weights.iter().any(|row| row.len() != n) {
        return Err(DomainError::new_err("weight matrix must be square"));
    }
    let upper: Vec<f64> = (0..n).flat_map(|i| weights[i][i + 1..].to_vec()).collect();
    oracle::WeightedCompleteGraph::from_upper(n, &upper).map_err(err)
}

#[pyfunction]
fn ground_state_energy(py: Python<'_>, kernel_name: &str) -> PyResult<f64> {
    let k = kernel(kernel_name)?;
    py.detach(|| cavity::ground_state_energy(k)).map_err(err)
}

#[pyfunction]
fn fixed_point_g0(kernel_name: &str, c: f64) -> PyResult<f64> {
    cavity::fixed_point_g0(kernel(kernel_name)?, c).map_err(err)
}

#[pyfunction]
fn lambda_map(kernel_name: &str, t: f64, c: f64) -> PyResult<f64> {
    cavity::lambda_map(kernel(kernel_name)?, t, c).map_err(err)
}

#[pyfunction]
fn curve_area(kernel_name: &str, c: f64) -> PyResult<f64> {
    cavity::curve_area(kernel(kernel_name)?, c).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (kernel_name, c, x_limit = 10.0, n_points = 1000))]
fn solve_order_parameter(
    py: Python<'_>,
    kernel_name: &str,
    c: f64,
    x_limit: f64,
    n_points: usize,
) -> PyResult<Py<PyAny>> {
    let k = kernel(kernel_name)?;
    let curve = py
        .detach(|| cavity::solve_order_parameter(k, c, x_limit, n_points))
        .map_err(err)?;
    to_py(py, &curve)
}

/// Solves the full-problem curve and returns its consistency residual.
#[pyfunction]
#[pyo3(signature = (kernel_name, x_limit = 50.0, n_points = 4000))]
fn verify_consistency(py: Python<'_>, kernel_name: &str, x_limit: f64, n_points: usize) -> PyResult<f64> {
    let k = kernel(kernel_name)?;
    py.detach(|| {
        let curve = cavity::solve_order_parameter(k, k.c_star(), x_limit, n_points)?;
        cavity::verify_consistency(k, &curve)
    })
    .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (kernel_name, x_limit = 50.0, n_points = 4000))]
fn constants_record(py: Python<'_>, kernel_name: &str, x_limit: f64, n_points: usize) -> PyResult<Py<PyAny>> {
    let k = kernel(kernel_name)?;
    let r = py
        .detach(|| cavity::constants_record(k, x_limit, n_points))
        .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn tsp_constant_from_lambda(py: Python<'_>, lambda: f64) -> PyResult<Py<PyAny>> {
    let r = py.detach(|| cavity::tsp_constant_from_lambda(lambda)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn q_from_lambda(lambda: f64) -> PyResult<f64> {
    diluted::q_from_lambda(lambda).map_err(err)
}

#[pyfunction]
fn limit_f(lambda: f64, x: f64) -> PyResult<f64> {
    let m = diluted::DilutedMatchingModel::from_lambda(lambda).map_err(err)?;
    diluted::limit_f(&m, x).map_err(err)
}

#[pyfunction]
fn h_matching(x: f64, q: f64) -> PyResult<f64> {
    diluted::h_matching(x, q).map_err(err)
}

#[pyfunction]
fn matching_edge_cost(q: f64) -> PyResult<f64> {
    diluted::matching_edge_cost(q).map_err(err)
}

#[pyfunction]
fn total_diluted_cost(lambda: f64) -> PyResult<f64> {
    diluted::total_diluted_cost(lambda).map_err(err)
}

#[pyfunction]
fn longest_edge_limit(q: f64) -> PyResult<f64> {
    diluted::longest_edge_limit(q).map_err(err)
}

/// Keys: `converged`, `trace` (list of records), `a`, `b` (survival values
/// on the grid), `cost` (`None` unless converged).
#[pyfunction]
#[pyo3(signature = (mode_name, lambda, n_cells = 2000, k_max = 10_000))]
fn run_iteration(py: Python<'_>, mode_name: &str, lambda: f64, n_cells: usize, k_max: usize) -> PyResult<Py<PyAny>> {
    let m = mode(mode_name)?;
    let run = py
        .detach(|| recursion::run_iteration(m, lambda, n_cells, k_max))
        .map_err(err)?;
    let cost = if run.trace.converged {
        Some(recursion::cost_from_f(&run.b, m).map_err(err)?)
    } else {
        None
    };
    let out = serde_json::json!({
        "converged": run.trace.converged,
        "trace": run.trace.records,
        "a": run.a.values,
        "b": run.b.values,
        "cost": cost,
    });
    to_py(py, &out)
}

/// Population after `generations` steps from the all-`λ/2` boundary.
#[pyfunction]
#[pyo3(signature = (mode_name, lambda, generations, pop_size, seed))]
fn run_population(
    py: Python<'_>,
    mode_name: &str,
    lambda: f64,
    generations: usize,
    pop_size: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let m = mode(mode_name)?;
    let pop = py
        .detach(|| popdyn::run_population(lambda, m, generations, pop_size, seed, recursion::Side::B))
        .map_err(err)?;
    let out = serde_json::json!({
        "samples": pop.samples,
        "mean": pop.mean(),
        "std_error": pop.std_error(),
        "atom_fraction": pop.atom_fraction(),
    });
    to_py(py, &out)
}

#[pyfunction]
fn sample_instance(n: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let g = oracle::sample_instance(n, seed).map_err(err)?;
    Ok((0..n).map(|i| (0..n).map(|j| g.weight(i, j)).collect()).collect())
}

#[pyfunction]
fn min_diluted_matching(py: Python<'_>, weights: Vec<Vec<f64>>, lambda: f64) -> PyResult<Py<PyAny>> {
    let g = graph(weights)?;
    let r = py.detach(|| oracle::min_diluted_matching(&g, lambda)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn held_karp_tsp(py: Python<'_>, weights: Vec<Vec<f64>>) -> PyResult<Py<PyAny>> {
    let g = graph(weights)?;
    let r = py.detach(|| oracle::held_karp_tsp(&g)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn min_diluted_two_factor(py: Python<'_>, weights: Vec<Vec<f64>>, lambda: f64) -> PyResult<Py<PyAny>> {
    let g = graph(weights)?;
    let r = py.detach(|| oracle::min_diluted_two_factor(&g, lambda)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn ensemble_stats(py: Python<'_>, n: usize, lambda: f64, replicas: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let s = py
        .detach(|| oracle::ensemble_stats(n, lambda, replicas, seed))
        .map_err(err)?;
    to_py(py, &s)
}

#[pymodule]
fn meanfield_opt(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("ContractError", py.get_type::<ContractError>())?;
    m.add("CapacityError", py.get_type::<CapacityError>())?;
    m.add("NumericError", py.get_type::<NumericError>())?;
    m.add_function(wrap_pyfunction!(ground_state_energy, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point_g0, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_map, m)?)?;
    m.add_function(wrap_pyfunction!(curve_area, m)?)?;
    m.add_function(wrap_pyfunction!(solve_order_parameter, m)?)?;
    m.add_function(wrap_pyfunction!(verify_consistency, m)?)?;
    m.add_function(wrap_pyfunction!(constants_record, m)?)?;
    m.add_function(wrap_pyfunction!(tsp_constant_from_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(q_from_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(limit_f, m)?)?;
    m.add_function(wrap_pyfunction!(h_matching, m)?)?;
    m.add_function(wrap_pyfunction!(matching_edge_cost, m)?)?;
    m.add_function(wrap_pyfunction!(total_diluted_cost, m)?)?;
    m.add_function(wrap_pyfunction!(longest_edge_limit, m)?)?;
    m.add_function(wrap_pyfunction!(run_iteration, m)?)?;
    m.add_function(wrap_pyfunction!(run_population, m)?)?;
    m.add_function(wrap_pyfunction!(sample_instance, m)?)?;
    m.add_function(wrap_pyfunction!(min_diluted_matching, m)?)?;
    m.add_function(wrap_pyfunction!(held_karp_tsp, m)?)?;
    m.add_function(wrap_pyfunction!(min_diluted_two_factor, m)?)?;
    m.add_function(wrap_pyfunction!(ensemble_stats, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
