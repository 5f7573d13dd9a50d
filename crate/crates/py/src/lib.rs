//! Python bindings: exact invariants, critical point data, Chern-Simons
//! values, leading asymptotics and the verification suites.

use fig8::chernsimons::cs_set;
use fig8::invariants::{jones_fig8_sine, tau_rational, LevelContext, SurgeryCoefficient};
use fig8::saddle::{leading_tau_asymptotics, su2_critical_points, SigmaMode};
use fig8::verify::{self as checks, VerificationReport};
use fig8::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn surgery(p: i64, q: i64) -> PyResult<SurgeryCoefficient> {
    SurgeryCoefficient::new(p, q).map_err(value_err)
}

fn level(r: u32) -> PyResult<LevelContext> {
    LevelContext::new(r).map_err(value_err)
}

/// `tau_r(M_{p/q})` as a complex number.
#[pyfunction]
fn tau(p: i64, q: i64, r: u32) -> PyResult<Complex64> {
    Ok(tau_rational(&level(r)?, &surgery(p, q)?))
}

/// Complex conjugate of `tau_r(M_{p/q})`.
#[pyfunction]
fn tau_bar(p: i64, q: i64, r: u32) -> PyResult<Complex64> {
    Ok(tau(p, q, r)?.conj())
}

/// `J'_K(r)` of the figure-eight knot.
#[pyfunction]
fn jones(r: u32) -> PyResult<f64> {
    Ok(jones_fig8_sine(&level(r)?, r))
}

/// SU(2) stationary points of the phase as a JSON array.
#[pyfunction]
fn critical_points(p: i64, q: i64) -> PyResult<String> {
    let pts = su2_critical_points(&surgery(p, q)?).map_err(value_err)?;
    serde_json::to_string(&pts).map_err(value_err)
}

/// Chern-Simons values of the flat SU(2) classes, mod 1 and sorted.
#[pyfunction]
fn chern_simons(p: i64, q: i64) -> PyResult<Vec<f64>> {
    cs_set(&surgery(p, q)?).map_err(value_err)
}

/// Leading asymptotic prediction for the conjugate invariant at level `r`.
#[pyfunction]
#[pyo3(signature = (p, q, r, m = 4, sigma_mode = "calibrate"))]
fn asymptotics(p: i64, q: i64, r: u32, m: i64, sigma_mode: &str) -> PyResult<Complex64> {
    let mode: SigmaMode = sigma_mode.parse().map_err(value_err)?;
    let (v, _) = leading_tau_asymptotics(&surgery(p, q)?, r, m, mode).map_err(value_err)?;
    Ok(v)
}

fn run_suite(suite: &str) -> fig8::Result<Vec<VerificationReport>> {
    let one = |p, q| SurgeryCoefficient::new(p, q);
    Ok(match suite {
        "specfun" => vec![checks::check_specfun()],
        "qdilog" => [5, 11, 51].iter().map(|&r| checks::check_qdilog(r, 200)).collect::<fig8::Result<_>>()?,
        "invariants" => vec![checks::check_invariants(100)?],
        "repvar" => vec![checks::check_repvar()?],
        "chernsimons" => vec![checks::check_chernsimons()?],
        "saddle" => vec![checks::check_saddle(&one(1, 1)?)?, checks::check_saddle(&one(0, 1)?)?],
        "volume" => vec![checks::volume_scan(&[50, 100, 200, 400])?],
        other => return Err(fig8::Error::InvalidParameter(format!("unknown suite {other:?}"))),
    })
}

/// Run a verification suite and return its reports as a JSON array.
#[pyfunction]
fn verify(suite: &str) -> PyResult<String> {
    let reports = run_suite(suite).map_err(value_err)?;
    serde_json::to_string(&reports).map_err(value_err)
}

#[pymodule]
fn fig8py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(tau, m)?)?;
    m.add_function(wrap_pyfunction!(tau_bar, m)?)?;
    m.add_function(wrap_pyfunction!(jones, m)?)?;
    m.add_function(wrap_pyfunction!(critical_points, m)?)?;
    m.add_function(wrap_pyfunction!(chern_simons, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotics, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_dispatch() {
        let reps = run_suite("repvar").unwrap();
        assert!(reps.iter().all(|r| r.passed));
        assert!(run_suite("nothing").is_err());
    }
}
