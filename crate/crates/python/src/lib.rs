//! Python bindings: run the command-line pipeline in process and get the
//! summary rows back as dicts, plus a few direct evaluators.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use motslab::cli::{cmd_audit, cmd_catalog, cmd_constraints, cmd_eigen, cmd_surface, CommandOutput, RunConfig};
use motslab::data::{energy_momentum as em, parse_data};
use motslab::surface::{compute_geometry, hawking_energy as e_h};
use motslab::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::UnknownData(_) | Error::InvalidParameter(_) | Error::BoundaryMismatch(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn config(options: Option<&Bound<'_, PyDict>>) -> PyResult<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(opts) = options {
        let mut pairs = BTreeMap::new();
        for (k, v) in opts.iter() {
            pairs.insert(k.extract::<String>()?, v.str()?.to_string());
        }
        for (k, v) in &pairs {
            cfg.set(k, v).map_err(to_py)?;
        }
    }
    cfg.validate().map_err(to_py)?;
    Ok(cfg)
}

fn rows<'py>(py: Python<'py>, out: &CommandOutput) -> PyResult<Vec<Bound<'py, PyDict>>> {
    out.summary
        .rows
        .iter()
        .map(|row| {
            let d = PyDict::new(py);
            for (h, v) in out.summary.header.iter().zip(row) {
                match v.parse::<f64>() {
                    Ok(x) if !v.is_empty() => d.set_item(h, x)?,
                    _ => d.set_item(h, v)?,
                }
            }
            Ok(d)
        })
        .collect()
}

/// Run `catalog`, `constraints`, `surface`, `eigen` or `audit` with config
/// keys given as a dict. Returns `(exit_code, rows)`; nothing is written to disk.
#[pyfunction]
#[pyo3(signature = (command, options=None))]
fn run<'py>(
    py: Python<'py>,
    command: &str,
    options: Option<&Bound<'py, PyDict>>,
) -> PyResult<(i32, Vec<Bound<'py, PyDict>>)> {
    let cfg = config(options)?;
    let out = match command {
        "catalog" => cmd_catalog(),
        "constraints" => cmd_constraints(&cfg),
        "surface" => cmd_surface(&cfg),
        "eigen" => cmd_eigen(&cfg),
        "audit" => cmd_audit(&cfg),
        other => return Err(PyValueError::new_err(format!("unknown command `{other}`"))),
    }
    .map_err(to_py)?;
    Ok((out.code, rows(py, &out)?))
}

/// `(μ, |J|)` of a catalog entry at a point.
#[pyfunction]
fn energy_momentum(data: &str, x: [f64; 3]) -> PyResult<(f64, f64)> {
    let d = parse_data(data).map_err(to_py)?;
    let e = em(d.as_ref(), &x).map_err(to_py)?;
    Ok((e.mu, e.j_norm))
}

/// Hawking energy of a surface, e.g. `hawking_energy("schwarzschild-iso:m=1", "sphere:r=0.5")`.
#[pyfunction]
#[pyo3(signature = (data, surface, grid="32x64"))]
fn hawking_energy(data: &str, surface: &str, grid: &str) -> PyResult<f64> {
    let mut cfg = RunConfig::default();
    for (k, v) in [("data", data), ("surface", surface), ("grid", grid)] {
        cfg.set(k, v).map_err(to_py)?;
    }
    let d = cfg.data_ref().map_err(to_py)?;
    let g = compute_geometry(&cfg.chart().map_err(to_py)?, d.as_ref()).map_err(to_py)?;
    e_h(&g).map_err(to_py)
}

/// Full command line, arguments without the program name. Returns the exit code.
#[pyfunction]
fn main(args: Vec<String>) -> i32 {
    motslab::cli::run(std::iter::once("motslab".to_string()).chain(args))
}

#[pymodule]
fn motslab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(energy_momentum, m)?)?;
    m.add_function(wrap_pyfunction!(hawking_energy, m)?)?;
    m.add_function(wrap_pyfunction!(main, m)?)?;
    m.add("THEOREM_IDS", motslab::audit::THEOREM_IDS.to_vec())?;
    Ok(())
}
