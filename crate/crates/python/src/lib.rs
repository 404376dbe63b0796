//! Python bindings. Vectors cross the boundary as 3-tuples of floats and
//! rate breakdowns as dicts.

use std::collections::HashMap;

use gravdec::decoherence::{self, crossover_x, PiecewiseOptions, TauMode, TauOptions};
use gravdec::kernels::{GravitonParams, InternalBathParams, KernelSpec};
use gravdec::stochastic::{self, TimeGrid};
use gravdec::tensor::SpatialVector;
use gravdec::trajectory::SuperpositionConfig;
use gravdec::{config, runner, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

type Vec3 = (f64, f64, f64);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Numerical { .. } | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn vector(v: Vec3) -> SpatialVector {
    SpatialVector::new(v.0, v.1, v.2)
}

fn breakdown(g: decoherence::GammaBreakdown) -> HashMap<&'static str, f64> {
    HashMap::from([
        ("graviton", g.graviton),
        ("internal_velocity", g.internal_velocity),
        ("cross", g.cross),
        ("total", g.total),
    ])
}

/// Decoherence parameters in natural units.
#[pyclass(name = "DecoherenceParams", frozen, skip_from_py_object)]
pub struct PyDecoherenceParams {
    inner: decoherence::DecoherenceParams,
}

#[pymethods]
impl PyDecoherenceParams {
    #[new]
    #[pyo3(signature = (m0, lambda_g, xi, v, t_f, lambda_=1.0, gamma=1.0, beta=1.0, mean_velocity=(0.0, 0.0, 0.0), lambda_int=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        m0: f64,
        lambda_g: f64,
        xi: Vec3,
        v: Vec3,
        t_f: f64,
        lambda_: f64,
        gamma: f64,
        beta: f64,
        mean_velocity: Vec3,
        lambda_int: Option<f64>,
    ) -> PyResult<Self> {
        let graviton = GravitonParams::new(m0, lambda_g).map_err(to_py)?;
        let bath = InternalBathParams::new(lambda_, gamma, beta, lambda_int).map_err(to_py)?;
        let config = SuperpositionConfig::with_mean_velocity(
            vector(v),
            vector(xi),
            vector(mean_velocity),
            t_f,
        )
        .map_err(to_py)?;
        Ok(PyDecoherenceParams {
            inner: decoherence::DecoherenceParams::new(graviton, bath, config),
        })
    }

    /// `𝒦` for the configured `Ξ` and `v`.
    #[getter]
    fn k_factor(&self) -> f64 {
        self.inner.k_factor()
    }

    #[getter]
    fn kappa(&self) -> f64 {
        decoherence::kappa(&self.inner)
    }

    /// `Λ_g t_f`.
    #[getter]
    fn x(&self) -> f64 {
        self.inner.x()
    }

    fn gamma_closed(&self) -> PyResult<HashMap<&'static str, f64>> {
        decoherence::gamma_vac_closed(&self.inner)
            .map(breakdown)
            .map_err(to_py)
    }

    #[pyo3(signature = (rel_tol=1e-10))]
    fn gamma_quadrature(&self, rel_tol: f64) -> PyResult<HashMap<&'static str, f64>> {
        decoherence::gamma_general_with_kernel(
            &self.inner,
            &KernelSpec::vacuum(self.inner.graviton),
            &PiecewiseOptions { rel_tol },
        )
        .map(breakdown)
        .map_err(to_py)
    }

    #[pyo3(signature = (mode="full", lo=1e-6, hi=1e6))]
    fn tau_dec(&self, mode: &str, lo: f64, hi: f64) -> PyResult<f64> {
        let mode = match mode {
            "full" => TauMode::Full,
            "cross_only" => TauMode::CrossOnly,
            other => {
                return Err(PyValueError::new_err(format!(
                    "mode must be 'full' or 'cross_only', got '{other}'"
                )))
            }
        };
        decoherence::tau_dec(
            &self.inner,
            &TauOptions {
                mode,
                bracket: (lo, hi),
            },
        )
        .map_err(to_py)
    }

    /// Monte-Carlo `⟨cos Φ⟩` on `n` uniform nodes over `[0, t_f]`; needs `lambda_ = 0`.
    fn mc_decoherence_factor(
        &self,
        n: usize,
        n_real: usize,
        seed: u64,
    ) -> PyResult<HashMap<&'static str, f64>> {
        let grid = TimeGrid::new(0.0, self.inner.config.t_f, n).map_err(to_py)?;
        let r =
            stochastic::mc_decoherence_factor(&self.inner, &grid, n_real, seed).map_err(to_py)?;
        Ok(HashMap::from([
            ("estimate", r.estimate),
            ("std_error", r.std_error),
            ("gamma_discretized", r.gamma_discretized),
        ]))
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyfunction]
fn cutoff_f(x: f64) -> f64 {
    gravdec::kernels::cutoff_f(x)
}

#[pyfunction]
fn g_of_x(x: f64) -> PyResult<f64> {
    decoherence::g_of_x(x).map_err(to_py)
}

#[pyfunction]
fn contract_k(xi: Vec3, v: Vec3) -> PyResult<f64> {
    gravdec::tensor::contract_k(&vector(xi), &vector(v)).map_err(to_py)
}

/// `𝒫^{ijkl}` with 1-based indices.
#[pyfunction]
fn projector_component(i: usize, j: usize, k: usize, l: usize) -> PyResult<f64> {
    gravdec::tensor::projector_component(i, j, k, l).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (kappa, lambda_=1.0, lo=1.0, hi=100.0))]
fn crossover(kappa: f64, lambda_: f64, lo: f64, hi: f64) -> PyResult<f64> {
    crossover_x(lambda_, kappa, lo, hi).map_err(to_py)
}

/// Noise samples as nested lists `[realization][node][i][j]`.
#[pyfunction]
fn sample_noise(
    m0: f64,
    lambda_g: f64,
    t0: f64,
    t1: f64,
    n: usize,
    n_real: usize,
    seed: u64,
) -> PyResult<Vec<Vec<[[f64; 3]; 3]>>> {
    let p = GravitonParams::new(m0, lambda_g).map_err(to_py)?;
    let grid = TimeGrid::new(t0, t1, n).map_err(to_py)?;
    let realizations = stochastic::sample_noise(&grid, &p, n_real, seed).map_err(to_py)?;
    Ok(realizations
        .into_iter()
        .map(|r| {
            r.samples
                .iter()
                .map(|m| std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])))
                .collect()
        })
        .collect())
}

/// Runs a configuration document; returns `(output, success)` where output
/// is the CSV text, or the report for verify mode.
#[pyfunction]
fn run_config(text: &str) -> PyResult<(String, bool)> {
    let cfg = config::parse_config(text).map_err(to_py)?;
    let outcome = runner::run(&cfg).map_err(to_py)?;
    let text = match &outcome.table {
        Some(t) => t.render().map_err(to_py)?,
        None => outcome.report.clone(),
    };
    Ok((text, outcome.success))
}

#[pymodule]
pub fn pygravdec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDecoherenceParams>()?;
    m.add_function(wrap_pyfunction!(cutoff_f, m)?)?;
    m.add_function(wrap_pyfunction!(g_of_x, m)?)?;
    m.add_function(wrap_pyfunction!(contract_k, m)?)?;
    m.add_function(wrap_pyfunction!(projector_component, m)?)?;
    m.add_function(wrap_pyfunction!(crossover, m)?)?;
    m.add_function(wrap_pyfunction!(sample_noise, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add("RNG_NAME", stochastic::RNG_NAME)?;
    Ok(())
}
