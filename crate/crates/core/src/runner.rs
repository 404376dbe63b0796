//! Mode dispatch for the command-line tool.
//!
//! Each mode produces a CSV table, a plain-text report, or both. Sweep
//! points are evaluated in parallel and written in input order.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::{GammaMethod, Mode, RunConfig, Units};
use crate::csv::{Cell, CsvTable};
use crate::decoherence::{
    closed_rate_at, g_of_x, gamma_general_with_kernel, gamma_piecewise, gamma_vac_closed,
    internal_velocity_term, kappa, tau_dec, DecoherenceParams, GammaBreakdown, PiecewiseOptions,
    TauOptions,
};
use crate::error::{Error, Result};
use crate::kernels::{
    cutoff_f, graviton_vacuum_kernel, internal_ohmic_kernel_regulated,
    internal_white_noise_amplitude, InternalBathParams, KernelSpec,
};
use crate::quadrature::Quadrature;
use crate::stochastic::{
    build_covariance, mc_decoherence_factor_with_kernel, phase_coefficients, sample_from, TimeGrid,
    MAX_GRID_NODES, RNG_NAME,
};
use crate::tensor::{angular_integral_numeric, Rank4Projector};
use crate::units::{planck_time, si_cross_check};

/// Environment variable naming the directory for relative output paths.
pub const OUTPUT_DIR_ENV: &str = "GRAVDEC_OUTPUT_DIR";
/// Environment variable forcing single-threaded execution when set to a value other than `0`.
pub const SINGLE_THREAD_ENV: &str = "GRAVDEC_SINGLE_THREAD";

/// Tables and text produced by one run.
#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub table: Option<CsvTable>,
    /// Extra tables keyed by destination path (sample realizations).
    pub side_tables: Vec<(PathBuf, CsvTable)>,
    pub report: String,
    /// False when a verify check failed.
    pub success: bool,
}

/// One verify check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub achieved: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, achieved: f64, tolerance: f64, detail: String) -> Self {
        CheckResult {
            name,
            achieved,
            tolerance,
            passed: achieved.is_finite() && achieved <= tolerance,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: achieved {:.3e}, tolerance {:.3e}{}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.achieved,
            self.tolerance,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!(" ({})", self.detail)
            }
        )
    }
}

pub fn single_thread_requested() -> bool {
    std::env::var(SINGLE_THREAD_ENV)
        .map(|v| !v.is_empty() && v != "0")
        .unwrap_or(false)
}

/// Runs `cfg`, honouring the single-thread environment switch.
pub fn run_with_env(cfg: &RunConfig) -> Result<RunOutcome> {
    if single_thread_requested() {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(|| run(cfg))
    } else {
        run(cfg)
    }
}

pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    match cfg.mode {
        Mode::Kernel => table_only(run_kernel(cfg)?),
        Mode::Gamma => table_only(run_gamma(cfg)?),
        Mode::Figure => table_only(run_figure(cfg)?),
        Mode::Tau => table_only(run_tau(cfg)?),
        Mode::Sample => run_sample(cfg),
        Mode::Verify => run_verify(cfg),
    }
}

fn table_only(table: CsvTable) -> Result<RunOutcome> {
    Ok(RunOutcome {
        table: Some(table),
        success: true,
        ..Default::default()
    })
}

/// Where the primary output goes: `output` if set, resolved against the
/// output-directory variable when relative; else `<mode>.csv` in that
/// directory; else `None` for standard output.
pub fn resolve_output(cfg: &RunConfig) -> Option<PathBuf> {
    resolve_path(cfg.output.as_deref(), cfg.mode)
}

fn resolve_path(path: Option<&Path>, mode: Mode) -> Option<PathBuf> {
    let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from);
    match (path, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(format!(
            "{}.{}",
            mode.name(),
            if mode == Mode::Verify { "txt" } else { "csv" }
        ))),
        (None, None) => None,
    }
}

fn sweep_points(cfg: &RunConfig) -> Vec<Option<(String, f64)>> {
    match &cfg.sweep {
        Some(s) => s
            .values()
            .into_iter()
            .map(|v| Some((s.variable.clone(), v)))
            .collect(),
        None => vec![None],
    }
}

fn config_at(cfg: &RunConfig, point: &Option<(String, f64)>) -> Result<RunConfig> {
    match point {
        Some((var, value)) => cfg.with_value(var, *value),
        None => Ok(cfg.clone()),
    }
}

fn kernel_rows(cfg: &RunConfig) -> Result<CsvTable> {
    let p = cfg.decoherence_params()?;
    let lambda_g = p.graviton.lambda_g;
    let taus = match &cfg.sweep {
        Some(s) => s.values(),
        None => (0..=200).map(|i| i as f64 * 0.1 / lambda_g).collect(),
    };
    let with_ohmic = p.bath.lambda_int.is_some();
    let mut header = vec!["tau", "x", "F", "graviton_scalar", "white_noise_amplitude"];
    if with_ohmic {
        header.push("ohmic_regulated");
    }
    let rows: Vec<Vec<Cell>> = taus
        .par_iter()
        .map(|&tau| {
            let x = lambda_g * tau;
            let mut row = vec![
                tau.into(),
                x.into(),
                cutoff_f(x).into(),
                graviton_vacuum_kernel(tau, 0.0, &p.graviton).into(),
                internal_white_noise_amplitude(&p.bath).into(),
            ];
            if with_ohmic {
                row.push(internal_ohmic_kernel_regulated(tau, &p.bath)?.into());
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut table = CsvTable::new(header);
    for r in rows {
        table.push(r)?;
    }
    Ok(table)
}

pub fn run_kernel(cfg: &RunConfig) -> Result<CsvTable> {
    kernel_rows(cfg)
}

/// Rate by the configured method, including the mean-velocity term.
pub fn gamma_for(
    p: &DecoherenceParams,
    method: GammaMethod,
    rel_tol: f64,
) -> Result<GammaBreakdown> {
    match method {
        GammaMethod::Closed => {
            let mut still = *p;
            still.config.big_v = crate::tensor::SpatialVector::ZERO;
            let g = gamma_vac_closed(&still)?;
            Ok(GammaBreakdown::new(
                g.graviton,
                internal_velocity_term(p),
                g.cross,
            ))
        }
        GammaMethod::Quadrature => gamma_general_with_kernel(
            p,
            &KernelSpec::vacuum(p.graviton),
            &PiecewiseOptions { rel_tol },
        ),
    }
}

pub fn run_gamma(cfg: &RunConfig) -> Result<CsvTable> {
    let si = cfg.units == Units::Si;
    let mut header: Vec<String> = Vec::new();
    if let Some(s) = &cfg.sweep {
        header.push(s.variable.clone());
    }
    for h in [
        "t_f",
        "x",
        "K",
        "kappa",
        "graviton",
        "internal_velocity",
        "cross",
        "total",
    ] {
        header.push(h.to_string());
    }
    if si {
        header.push("si_literal_cross".to_string());
    }
    let rows: Vec<Vec<Cell>> = sweep_points(cfg)
        .par_iter()
        .map(|point| {
            let c = config_at(cfg, point)?;
            let p = c.decoherence_params()?;
            let g = gamma_for(&p, c.method, c.rel_tol)?;
            let mut row: Vec<Cell> = Vec::new();
            if let Some((_, v)) = point {
                row.push((*v).into());
            }
            for x in [
                p.config.t_f,
                p.x(),
                p.k_factor(),
                kappa(&p),
                g.graviton,
                g.internal_velocity,
                g.cross,
                g.total,
            ] {
                row.push(x.into());
            }
            if si {
                row.push(si_cross_check(&c.si_params()?)?.si_literal.into());
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut table = CsvTable::new(header);
    for r in rows {
        table.push(r)?;
    }
    Ok(table)
}

/// Column label for a κ value, e.g. `1e-4`.
pub fn kappa_label(k: f64) -> String {
    format!("{k:e}")
}

/// `x`, `G(x)`, and per κ the cross term `λ²κx³` and the bracket total.
/// Multiply by `(8m₀²/5π)Λ_g²𝒦` to recover `Γ`.
pub fn run_figure(cfg: &RunConfig) -> Result<CsvTable> {
    let mut header = vec!["x".to_string(), "G".to_string()];
    for &k in &cfg.kappa_list {
        header.push(format!("cross_kappa_{}", kappa_label(k)));
        header.push(format!("total_kappa_{}", kappa_label(k)));
    }
    let (a, b, n) = (cfg.x_min.ln(), cfg.x_max.ln(), cfg.x_count);
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                cfg.x_max
            } else if i == 0 {
                cfg.x_min
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect();
    let l2 = cfg.lambda * cfg.lambda;
    let rows: Vec<Vec<Cell>> = xs
        .par_iter()
        .map(|&x| {
            let g = g_of_x(x)?;
            let mut row: Vec<Cell> = vec![x.into(), g.into()];
            for &k in &cfg.kappa_list {
                let cross = l2 * k * x.powi(3);
                row.push(cross.into());
                row.push((g + cross).into());
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut table = CsvTable::new(header);
    for r in rows {
        table.push(r)?;
    }
    Ok(table)
}

pub fn run_tau(cfg: &RunConfig) -> Result<CsvTable> {
    let si = cfg.units == Units::Si;
    let mut header: Vec<String> = Vec::new();
    if let Some(s) = &cfg.sweep {
        header.push(s.variable.clone());
    }
    header.push("tau".to_string());
    if si {
        header.push("tau_seconds".to_string());
    }
    header.push("gamma_at_tau".to_string());
    let opts = TauOptions {
        mode: cfg.tau_mode,
        bracket: (cfg.tau_lo, cfg.tau_hi),
    };
    let rows: Vec<Vec<Cell>> = sweep_points(cfg)
        .par_iter()
        .map(|point| {
            let c = config_at(cfg, point)?;
            let p = c.decoherence_params()?;
            let tau = tau_dec(&p, &opts)?;
            let mut row: Vec<Cell> = Vec::new();
            if let Some((_, v)) = point {
                row.push((*v).into());
            }
            row.push(tau.into());
            if si {
                row.push((tau * planck_time()).into());
            }
            row.push(closed_rate_at(&p, tau, opts.mode)?.into());
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut table = CsvTable::new(header);
    for r in rows {
        table.push(r)?;
    }
    Ok(table)
}

/// Parameters with the internal bath switched off, for Monte-Carlo comparison.
fn graviton_only(p: &DecoherenceParams) -> DecoherenceParams {
    DecoherenceParams {
        bath: InternalBathParams::decoupled(),
        ..*p
    }
}

pub fn run_sample(cfg: &RunConfig) -> Result<RunOutcome> {
    let p = graviton_only(&cfg.decoherence_params()?);
    let grid = TimeGrid::new(0.0, p.config.t_f, cfg.grid_n)?;
    let kernel = KernelSpec::vacuum(p.graviton);
    let mc = mc_decoherence_factor_with_kernel(&p, &kernel, &grid, cfg.n_real, cfg.seed)?;
    let continuum = gamma_piecewise(
        &p,
        &kernel,
        &PiecewiseOptions {
            rel_tol: cfg.rel_tol,
        },
    )?;

    let mut table = CsvTable::new([
        "seed",
        "rng",
        "n_real",
        "grid_n",
        "estimate",
        "std_error",
        "gamma_discretized",
        "exp_minus_gamma",
        "gamma_continuum",
    ]);
    table.push(vec![
        cfg.seed.into(),
        "ChaCha20".into(),
        cfg.n_real.into(),
        cfg.grid_n.into(),
        mc.estimate.into(),
        mc.std_error.into(),
        mc.gamma_discretized.into(),
        (-mc.gamma_discretized).exp().into(),
        continuum.graviton.into(),
    ])?;

    let mut side_tables = Vec::new();
    if let Some(requested) = cfg.sample_output.as_deref() {
        let path = resolve_path(Some(requested), Mode::Sample).unwrap_or_else(|| requested.into());
        {
            let cov = build_covariance(&grid, &p.graviton)?;
            let realizations = sample_from(&cov, cfg.n_real, cfg.seed);
            let nodes = grid.nodes();
            let mut samples =
                CsvTable::new(["realization", "t", "n11", "n22", "n33", "n12", "n13", "n23"]);
            for (k, r) in realizations.iter().enumerate() {
                for (a, m) in r.samples.iter().enumerate() {
                    samples.push(vec![
                        k.into(),
                        nodes[a].into(),
                        m[(0, 0)].into(),
                        m[(1, 1)].into(),
                        m[(2, 2)].into(),
                        m[(0, 1)].into(),
                        m[(0, 2)].into(),
                        m[(1, 2)].into(),
                    ])?;
                }
            }
            side_tables.push((path, samples));
        }
    }
    let report = format!("seed = {}\nrng = {}\n", cfg.seed, RNG_NAME);
    Ok(RunOutcome {
        table: Some(table),
        side_tables,
        report,
        success: true,
    })
}

/// Worst relative disagreement between the closed-form `F` and quadrature
/// of its integral definition over 50 log-spaced points in `[0.5, 100]`.
pub fn check_f_function() -> CheckResult {
    let (a, b) = (0.5f64.ln(), 100f64.ln());
    let worst = (0..50)
        .into_par_iter()
        .map(|i| {
            let x = (a + (b - a) * i as f64 / 49.0).exp();
            let q = Quadrature::with_rel_tol(1e-13).max_frequency(x).integrate(
                |s| s.powi(5) * (s * x).cos(),
                0.0,
                1.0,
            );
            let closed = cutoff_f(x);
            (closed - q.value).abs() / q.value.abs()
        })
        .reduce(|| 0.0, f64::max);
    CheckResult::new(
        "f_closed_vs_quadrature",
        worst,
        1e-8,
        "50 points, x in [0.5, 100]".into(),
    )
}

pub fn check_angular_integral() -> Result<CheckResult> {
    let num = angular_integral_numeric(6)?;
    let target = Rank4Projector::canonical().scaled(8.0 * PI / 15.0);
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    worst = worst.max((num.tensor.get(i, j, k, l) - target.get(i, j, k, l)).abs());
                }
            }
        }
    }
    Ok(CheckResult::new(
        "angular_integral",
        worst,
        1e-10,
        "componentwise vs (8pi/15) P".into(),
    ))
}

/// Closed form vs quadrature on `x ∈ {1,5,10,25,50} × κ ∈ {0,1e-5,1e-4}`.
/// `perturbation` scales the kernel seen by the quadrature.
pub fn check_closed_vs_quadrature(
    base: &DecoherenceParams,
    perturbation: f64,
    rel_tol: f64,
) -> Result<CheckResult> {
    let mut cases = Vec::new();
    for &x in &[1.0, 5.0, 10.0, 25.0, 50.0] {
        for &k in &[0.0, 1e-5, 1e-4] {
            cases.push((x, k));
        }
    }
    let errs: Vec<f64> = cases
        .par_iter()
        .map(|&(x, k)| {
            let mut p = *base;
            p.config.big_v = crate::tensor::SpatialVector::ZERO;
            p.bath.lambda = 1.0;
            p.config.t_f = x / p.graviton.lambda_g;
            // κ = γπΛ/(108 m₀² β): choose γ to hit the target.
            p.bath.gamma =
                k * 108.0 * p.graviton.m0.powi(2) * p.bath.beta / (PI * p.graviton.lambda_g);
            let closed = gamma_vac_closed(&p)?;
            let kernel = KernelSpec::vacuum(p.graviton).scaled(perturbation);
            let quad = gamma_piecewise(&p, &kernel, &PiecewiseOptions { rel_tol })?;
            Ok((closed.total - quad.total).abs() / closed.total)
        })
        .collect::<Result<_>>()?;
    let worst = errs.into_iter().fold(0.0, f64::max);
    Ok(CheckResult::new(
        "closed_vs_quadrature",
        worst,
        1e-4,
        "x in {1,5,10,25,50}, kappa in {0,1e-5,1e-4}".into(),
    ))
}

pub fn run_verify(cfg: &RunConfig) -> Result<RunOutcome> {
    let p = cfg.decoherence_params()?;
    let mut checks = vec![check_f_function(), check_angular_integral()?];
    checks.push(check_closed_vs_quadrature(
        &p,
        cfg.perturb_prefactor,
        cfg.rel_tol,
    )?);

    let g = graviton_only(&p);
    let grid = TimeGrid::new(0.0, g.config.t_f, cfg.grid_n.min(MAX_GRID_NODES))?;
    let kernel = KernelSpec::vacuum(g.graviton);
    let mc = mc_decoherence_factor_with_kernel(&g, &kernel, &grid, cfg.n_real, cfg.seed)?;
    let target = (-mc.gamma_discretized).exp();
    checks.push(CheckResult::new(
        "mc_decoherence_factor",
        (mc.estimate - target).abs() / mc.std_error.max(f64::MIN_POSITIVE),
        3.0,
        format!(
            "standard errors; estimate {:.6e}, exp(-gamma) {:.6e}, n_real {}, grid_n {}",
            mc.estimate, target, cfg.n_real, cfg.grid_n
        ),
    ));

    let fine = TimeGrid::new(0.0, g.config.t_f, 128)?;
    let cov = build_covariance(&fine, &g.graviton)?;
    let coeffs = phase_coefficients(&g, &fine)?;
    let discrete = 0.5 * cov.quadratic_form(&coeffs, &coeffs);
    let continuum = gamma_piecewise(
        &g,
        &kernel,
        &PiecewiseOptions {
            rel_tol: cfg.rel_tol,
        },
    )?;
    checks.push(CheckResult::new(
        "mc_discretization",
        (discrete - continuum.graviton).abs() / continuum.graviton,
        0.02,
        "relative, 128 nodes".into(),
    ));

    let mut report = format!("gravdec verify\nseed = {}\nrng = {}\n", cfg.seed, RNG_NAME);
    if cfg.perturb_prefactor != 1.0 {
        report.push_str(&format!(
            "kernel prefactor perturbed by factor {}\n",
            cfg.perturb_prefactor
        ));
    }
    for c in &checks {
        report.push_str(&c.line());
        report.push('\n');
    }
    let success = checks.iter().all(|c| c.passed);
    report.push_str(if success {
        "all checks passed\n"
    } else {
        "some checks failed\n"
    });
    Ok(RunOutcome {
        table: None,
        side_tables: Vec::new(),
        report,
        success,
    })
}
