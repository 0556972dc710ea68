//! Python bindings for `kflow`.

use kflow::cli::{self, named_profile, Experiment, ExperimentConfig};
use kflow::fit::log_space;
use kflow::fourier::TrigPoly;
use kflow::inviscid::{measure_decay, solve_inviscid, DecayQuantity};
use kflow::nonlinear::{run_theorem14, Theorem14Config};
use kflow::spectral_kernels::{compute_kernel_set, CGrid};
use kflow::viscous::{enhanced_dissipation_metrics, solve_toy_model, DissipationOptions};
use kflow::wave_op::WaveOperator;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::collections::HashMap;
use std::path::PathBuf;

fn err(e: kflow::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Names accepted by `run_experiment`.
#[pyfunction]
fn experiments() -> Vec<&'static str> {
    Experiment::ALL.iter().map(|e| e.name()).collect()
}

/// Runs a named experiment and returns its summary as a JSON string.
#[pyfunction]
#[pyo3(signature = (name, settings=None, out=None))]
fn run_experiment(name: &str, settings: Option<HashMap<String, String>>, out: Option<PathBuf>) -> PyResult<String> {
    let mut cfg = ExperimentConfig::defaults(Experiment::parse(name).map_err(err)?);
    let mut keys: Vec<_> = settings.unwrap_or_default().into_iter().collect();
    keys.sort();
    for (k, v) in keys {
        cfg.set(&k, &v).map_err(err)?;
    }
    if let Some(o) = out {
        cfg.out = o;
    }
    let s = cli::run(&cfg).map_err(err)?;
    serde_json::to_string(&s).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Rayleigh-layer kernel quantities at wave speed `c`.
#[pyfunction]
fn kernel_set<'py>(py: Python<'py>, alpha: f64, c: f64) -> PyResult<Bound<'py, PyDict>> {
    let k = compute_kernel_set(alpha, c).map_err(err)?;
    let d = PyDict::new(py);
    for (name, v) in [("ii", k.ii), ("a", k.a), ("b", k.b), ("a1", k.a1), ("b1", k.b1), ("j0", k.j0), ("j1", k.j1), ("yc", k.layer.yc)] {
        d.set_item(name, v)?;
    }
    Ok(d)
}

/// Linearized Euler decay series by the representation formula.
#[pyfunction]
#[pyo3(signature = (alpha, times, data="sin2y", ny=64))]
fn inviscid_series<'py>(py: Python<'py>, alpha: f64, times: Vec<f64>, data: &str, ny: usize) -> PyResult<Bound<'py, PyDict>> {
    let w = named_profile(data, alpha, ny).map_err(err)?;
    let sol = solve_inviscid(&w, &times).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t", &sol.times)?;
    for q in [DecayQuantity::V, DecayQuantity::V1, DecayQuantity::V2, DecayQuantity::OmegaCritical, DecayQuantity::V1Critical, DecayQuantity::V2Critical] {
        d.set_item(q.name(), sol.series(q))?;
    }
    Ok(d)
}

/// Log-log slope of one decay quantity over `[t_min, t_max]`.
#[pyfunction]
#[pyo3(signature = (alpha, quantity, data="sin2y", t_min=10.0, t_max=100.0, samples=16))]
fn decay_slope(alpha: f64, quantity: &str, data: &str, t_min: f64, t_max: f64, samples: usize) -> PyResult<f64> {
    let q = DecayQuantity::parse(quantity).map_err(err)?;
    let w = named_profile(data, alpha, 64).map_err(err)?;
    let sol = solve_inviscid(&w, &log_space(t_min, t_max, samples)).map_err(err)?;
    Ok(measure_decay(&sol, q, (t_min, t_max)).map_err(err)?.slope)
}

/// `(‖D(ω)‖², ⟨ω, ω − ψ⟩)` for `ω = Σ (re + i im) e^{iky}` given as `(k, re, im)` triples.
#[pyfunction]
#[pyo3(signature = (alpha, coeffs, m=512))]
fn wave_norm_identity(alpha: f64, coeffs: Vec<(i64, f64, f64)>, m: usize) -> PyResult<(f64, f64)> {
    let terms: Vec<(i64, Complex64)> = coeffs.into_iter().map(|(k, re, im)| (k, Complex64::new(re, im))).collect();
    let op = WaveOperator::new(alpha, CGrid::new(m).map_err(err)?).map_err(err)?;
    Ok(op.norm_identity(&TrigPoly::from_terms(&terms)))
}

/// One linearized Navier–Stokes mode run to `tau/nu`.
#[pyfunction]
#[pyo3(signature = (alpha, nu, a0=1.0, tau=1.0, data="cosy+0.7sin2y"))]
fn enhanced_dissipation<'py>(py: Python<'py>, alpha: f64, nu: f64, a0: f64, tau: f64, data: &str) -> PyResult<Bound<'py, PyDict>> {
    let w = named_profile(data, alpha, 32).map_err(err)?;
    let r = enhanced_dissipation_metrics(&w, nu, a0, tau, &DissipationOptions::default()).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("c_fit", r.c_fit)?;
    d.set_item("t_d", r.t_d)?;
    d.set_item("residual", r.residual)?;
    d.set_item("t_end", r.t_end)?;
    d.set_item("k1_bound_excess", r.k1_bound_excess)?;
    d.set_item("k_slack_min", r.k_slack_min)?;
    d.set_item("grad_sq_scaled", r.spacetime.grad_sq_scaled)?;
    d.set_item("dx_scaled", r.spacetime.dx_scaled)?;
    d.set_item("t", &r.series.t)?;
    d.set_item("norm", &r.series.norm)?;
    d.set_item("velocity", &r.series.vel)?;
    Ok(d)
}

/// Toy model with shear amplitude `a`, started from `cos y + 0.7 sin 2y`.
#[pyfunction]
#[pyo3(signature = (nu, a, t_end, dt=0.02, samples=200))]
fn toy_model<'py>(py: Python<'py>, nu: f64, a: f64, t_end: f64, dt: f64, samples: usize) -> PyResult<Bound<'py, PyDict>> {
    let w0 = TrigPoly::cos(1).add(&TrigPoly::sin(2).scale(Complex64::new(0.7, 0.0)));
    let tr = solve_toy_model(&w0, nu, a, t_end, dt, samples).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("t", &tr.times)?;
    d.set_item("norm", &tr.norm)?;
    d.set_item("sin_norm", &tr.sin_norm)?;
    d.set_item("envelope_constant", tr.envelope_constant(1.0_f64.min(t_end), t_end))?;
    Ok(d)
}

/// Nonlinear run around the bar state with a random perturbation of size `nu^gamma`.
#[pyfunction]
#[pyo3(signature = (nu=5e-4, gamma=0.7, n=128, tau=1.0, seed=14))]
fn theorem14<'py>(py: Python<'py>, nu: f64, gamma: f64, n: usize, tau: f64, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let cfg = Theorem14Config { nu, gamma, n, tau, seed, ..Default::default() };
    let r = run_theorem14(&cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("c3", r.c3)?;
    d.set_item("energy_closure", r.energy_closure)?;
    d.set_item("p2_band", r.p2_band)?;
    d.set_item("p2_band_heat", r.p2_band_heat)?;
    d.set_item("t", &r.times)?;
    d.set_item("nonshear", &r.nonshear)?;
    d.set_item("p2", &r.p2)?;
    Ok(d)
}

#[pymodule]
fn pykflow(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(experiments, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_set, m)?)?;
    m.add_function(wrap_pyfunction!(inviscid_series, m)?)?;
    m.add_function(wrap_pyfunction!(decay_slope, m)?)?;
    m.add_function(wrap_pyfunction!(wave_norm_identity, m)?)?;
    m.add_function(wrap_pyfunction!(enhanced_dissipation, m)?)?;
    m.add_function(wrap_pyfunction!(toy_model, m)?)?;
    m.add_function(wrap_pyfunction!(theorem14, m)?)?;
    Ok(())
}
