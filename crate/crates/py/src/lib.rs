//! Python bindings for `nsmimo`.
//!
//! Matrices cross the boundary as nested lists of Python `complex`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nsmimo::analysis;
use nsmimo::channel::{self, validate_config};
use nsmimo::cli::plan::parse_norm_mode;
use nsmimo::complexity::op_counts;
use nsmimo::linalg::{C64, CMat};
use nsmimo::preconditioners::{self, KindTag};
use nsmimo::simulate;
use nsmimo::{Error, MonteCarloPlan, NormMode, PrecoderSpec, SumRateEstimate};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Io(_) | Error::DegenerateBudgetExceeded { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_rows(m: &CMat) -> Vec<Vec<C64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(rows: Vec<Vec<C64>>) -> PyResult<CMat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a square matrix"));
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j]))
}

fn spec_for(scheme: &str, omega: f64) -> PyResult<PrecoderSpec> {
    match scheme.to_ascii_lowercase().as_str() {
        "zf" => Ok(PrecoderSpec::zf()),
        "mrt" => Ok(PrecoderSpec::mrt()),
        other => {
            let tag: KindTag = other.parse().map_err(py_err)?;
            Ok(PrecoderSpec::ns(tag.with_omega(omega)))
        }
    }
}

/// System dimensions, correlation level, transmit SNR and normalization mode.
#[pyclass(name = "SystemConfig", frozen)]
struct PySystemConfig {
    inner: channel::SystemConfig,
}

#[pymethods]
impl PySystemConfig {
    #[new]
    #[pyo3(signature = (m, k, c, rho_t, norm_mode = "per"))]
    fn new(m: usize, k: usize, c: f64, rho_t: f64, norm_mode: &str) -> PyResult<Self> {
        let mode = parse_norm_mode(norm_mode).map_err(py_err)?;
        let inner = channel::SystemConfig::new(m, k, c, rho_t).map_err(py_err)?.with_norm_mode(mode);
        Ok(PySystemConfig {
            inner: validate_config(inner).map_err(py_err)?,
        })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn rho_t(&self) -> f64 {
        self.inner.rho_t
    }

    #[getter]
    fn norm_mode(&self) -> &'static str {
        match self.inner.norm_mode {
            NormMode::PerRealization => "per",
            NormMode::Statistical => "stat",
        }
    }

    /// `cM`.
    fn effective_dim(&self) -> usize {
        self.inner.effective_dim()
    }

    /// `K/M`.
    fn loading(&self) -> f64 {
        self.inner.loading()
    }

    /// `K/(cM)`.
    fn effective_loading(&self) -> f64 {
        self.inner.effective_loading()
    }

    /// Asymptotically optimal relaxation for this configuration.
    fn omega_star(&self) -> f64 {
        preconditioners::omega_star(self.inner.m, self.inner.k, self.inner.c)
    }

    fn __repr__(&self) -> String {
        format!(
            "SystemConfig(m={}, k={}, c={}, rho_t={}, norm_mode='{}')",
            self.inner.m,
            self.inner.k,
            self.inner.c,
            self.inner.rho_t,
            self.norm_mode()
        )
    }
}

#[pyfunction]
fn omega_star(m: usize, k: usize, c: f64) -> f64 {
    preconditioners::omega_star(m, k, c)
}

/// `(a_bar, b_bar)` for effective loading `K/(cM)`.
#[pyfunction]
fn mp_edges(r_eff: f64) -> PyResult<(f64, f64)> {
    let e = preconditioners::mp_edges(r_eff).map_err(py_err)?;
    Ok((e.a_bar, e.b_bar))
}

/// Gram matrix `G` of one seeded draw.
#[pyfunction]
fn draw_gram(config: &PySystemConfig, seed: u64) -> PyResult<Vec<Vec<C64>>> {
    let (_, g) = channel::draw_gram(&config.inner, seed).map_err(py_err)?;
    Ok(to_rows(&g))
}

/// `(D, D⁻¹)` of an NS precondition kind for the Gram matrix `g`.
#[pyfunction]
#[pyo3(signature = (kind, g, omega = 1.0))]
fn build_precondition(kind: &str, g: Vec<Vec<C64>>, omega: f64) -> PyResult<(Vec<Vec<C64>>, Vec<Vec<C64>>)> {
    let tag: KindTag = kind.parse().map_err(py_err)?;
    let p = preconditioners::build_precondition(tag.with_omega(omega), &from_rows(g)?).map_err(py_err)?;
    Ok((to_rows(&p.d), to_rows(&p.d_inv)))
}

/// Spectral norm of `I − D⁻¹G`; below one the series converges.
#[pyfunction]
fn spectral_check(d_inv: Vec<Vec<C64>>, g: Vec<Vec<C64>>) -> PyResult<f64> {
    Ok(preconditioners::spectral_check(&from_rows(d_inv)?, &from_rows(g)?))
}

#[pyfunction]
fn ins_coefficients(m: f64, k: f64, c: f64, omega: f64) -> (f64, f64, f64) {
    let x = analysis::ins_coefficients(m, k, c, omega);
    (x.c1, x.c2, x.c3)
}

#[pyfunction]
fn icns_coefficients(m: f64, k: f64, c: f64, omega: f64) -> (f64, f64, f64, f64, f64) {
    let x = analysis::icns_coefficients(m, k, c, omega);
    (x.c4, x.c5, x.c6, x.c7, x.c8)
}

#[pyfunction]
fn ins_sum_rate(m: f64, k: f64, c: f64, omega: f64, rho_t: f64) -> f64 {
    analysis::ins_sum_rate(m, k, c, omega, rho_t)
}

#[pyfunction]
fn icns_sum_rate(m: f64, k: f64, c: f64, omega: f64, rho_t: f64) -> f64 {
    analysis::icns_sum_rate(m, k, c, omega, rho_t)
}

#[pyfunction]
fn zf_sum_rate(m: f64, k: f64, c: f64, rho_t: f64) -> PyResult<f64> {
    analysis::zf_sum_rate(m, k, c, rho_t).map_err(py_err)
}

#[pyfunction]
fn mrt_sum_rate_lb(m: f64, k: f64, c: f64, rho_t: f64) -> f64 {
    analysis::mrt_sum_rate_lb(m, k, c, rho_t)
}

#[pyfunction]
fn r_star(c: f64, rho_t: f64) -> f64 {
    analysis::r_star(c, rho_t)
}

#[pyfunction]
fn ins_zf_ratio(r: f64, c: f64, rho_t: f64) -> PyResult<f64> {
    analysis::ins_zf_ratio(r, c, rho_t).map_err(py_err)
}

#[pyfunction]
fn case1_gaps(py: Python<'_>, r_over_c: f64) -> PyResult<Bound<'_, PyDict>> {
    let g = analysis::case1_gaps(r_over_c);
    let d = PyDict::new(py);
    d.set_item("sig_gap_user1", g.sig_gap_user1)?;
    d.set_item("int_gap_user1", g.int_gap_user1)?;
    d.set_item("sig_gap_others", g.sig_gap_others)?;
    d.set_item("int_gap_others", g.int_gap_others)?;
    Ok(d)
}

/// `(mults, divs, extrapolated)` for an NS scheme at `k` users.
#[pyfunction]
fn complexity(kind: &str, k: u64) -> PyResult<(u64, u64, bool)> {
    let tag: KindTag = kind.parse().map_err(py_err)?;
    let r = op_counts(tag, k).map_err(py_err)?;
    Ok((r.mults, r.divs, r.extrapolated))
}

fn estimate_dict(py: Python<'_>, e: SumRateEstimate) -> PyResult<Bound<'_, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("mean", e.mean)?;
    d.set_item("std_error", e.std_error)?;
    d.set_item("trials", e.trials)?;
    d.set_item("per_user_means", e.per_user_means)?;
    d.set_item("skipped", e.skipped)?;
    Ok(d)
}

fn mc_plan(trials: usize, seed: u64, threads: Option<usize>) -> MonteCarloPlan {
    let plan = MonteCarloPlan::new(trials, seed);
    match threads {
        Some(w) => plan.with_width(w),
        None => plan,
    }
}

/// Monte Carlo ergodic sum-rate of `scheme` (`ZF`, `MRT` or an NS kind).
/// `omega` defaults to the configuration's optimal relaxation.
#[pyfunction]
#[pyo3(signature = (config, scheme, omega = None, trials = 1000, seed = 1, threads = None))]
fn ergodic_sum_rate<'py>(
    py: Python<'py>,
    config: &PySystemConfig,
    scheme: &str,
    omega: Option<f64>,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = spec_for(scheme, omega.unwrap_or_else(|| config.omega_star()))?;
    let cfg = config.inner;
    let plan = mc_plan(trials, seed, threads);
    let e = py.detach(|| simulate::ergodic_sum_rate(&cfg, &spec, &plan)).map_err(py_err)?;
    estimate_dict(py, e)
}

/// Monte Carlo estimate of the statistical sum-rate approximation.
#[pyfunction]
#[pyo3(signature = (config, scheme, omega = None, trials = 1000, seed = 1, threads = None))]
fn sum_rate_simu_approx<'py>(
    py: Python<'py>,
    config: &PySystemConfig,
    scheme: &str,
    omega: Option<f64>,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let spec = spec_for(scheme, omega.unwrap_or_else(|| config.omega_star()))?;
    let cfg = config.inner;
    let plan = mc_plan(trials, seed, threads);
    let e = py.detach(|| simulate::sum_rate_simu_approx(&cfg, &spec, &plan)).map_err(py_err)?;
    estimate_dict(py, e)
}

/// Empirical Gram moments at inner dimension `cm` as a list of
/// `(name, empirical, target, rel_err, exact)` tuples.
#[pyfunction]
#[pyo3(signature = (cm, trials = 20000, seed = 1))]
fn gram_moments(py: Python<'_>, cm: usize, trials: usize, seed: u64) -> PyResult<Vec<(String, f64, f64, f64, bool)>> {
    let plan = MonteCarloPlan::new(trials, seed);
    let reports = py.detach(|| simulate::lemma2_moments(cm, &plan)).map_err(py_err)?;
    Ok(reports
        .into_iter()
        .map(|r| (r.name, r.empirical, r.target, r.rel_err, r.exact))
        .collect())
}

#[pymodule]
pub fn nsmimo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemConfig>()?;
    m.add_function(wrap_pyfunction!(omega_star, m)?)?;
    m.add_function(wrap_pyfunction!(mp_edges, m)?)?;
    m.add_function(wrap_pyfunction!(draw_gram, m)?)?;
    m.add_function(wrap_pyfunction!(build_precondition, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_check, m)?)?;
    m.add_function(wrap_pyfunction!(ins_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(icns_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(ins_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(icns_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(zf_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(mrt_sum_rate_lb, m)?)?;
    m.add_function(wrap_pyfunction!(r_star, m)?)?;
    m.add_function(wrap_pyfunction!(ins_zf_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(case1_gaps, m)?)?;
    m.add_function(wrap_pyfunction!(complexity, m)?)?;
    m.add_function(wrap_pyfunction!(ergodic_sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(sum_rate_simu_approx, m)?)?;
    m.add_function(wrap_pyfunction!(gram_moments, m)?)?;
    Ok(())
}
