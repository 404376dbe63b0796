//! Flat `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. Keys
//! may appear once. Command-line overrides replace file values and are
//! reported as line 0 in errors. See the README for the full key table.

use std::path::PathBuf;

use crate::decoherence::{DecoherenceParams, TauMode};
use crate::error::{Error, Result};
use crate::kernels::{GravitonParams, InternalBathParams};
use crate::tensor::SpatialVector;
use crate::trajectory::SuperpositionConfig;
use crate::units::{si_to_planck, SiParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Kernel,
    Gamma,
    Figure,
    Tau,
    Sample,
    Verify,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Kernel => "kernel",
            Mode::Gamma => "gamma",
            Mode::Figure => "figure",
            Mode::Tau => "tau",
            Mode::Sample => "sample",
            Mode::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Natural,
    Si,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepScale {
    #[default]
    Linear,
    Log,
}

/// How `gamma` mode evaluates the rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaMethod {
    #[default]
    Closed,
    Quadrature,
}

/// Sweep variables that accept any real value; every other one must stay positive.
const SIGNED_SWEEP_VARIABLES: [&str; 2] = ["tau", "lambda"];

pub const SWEEP_VARIABLES: [&str; 9] = [
    "tau",
    "t_f",
    "m0",
    "lambda_g",
    "lambda",
    "gamma",
    "beta",
    "temperature",
    "lambda_int",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: SweepScale,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    return self.stop;
                }
                let f = i as f64 / (n - 1) as f64;
                match self.scale {
                    SweepScale::Linear => self.start + f * (self.stop - self.start),
                    SweepScale::Log => {
                        (self.start.ln() + f * (self.stop.ln() - self.start.ln())).exp()
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub units: Units,
    pub m0: f64,
    pub lambda_g: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// Inverse temperature (natural units).
    pub beta: Option<f64>,
    /// Temperature in kelvin (SI units).
    pub temperature: Option<f64>,
    pub lambda_int: Option<f64>,
    pub xi: SpatialVector,
    pub v: SpatialVector,
    pub mean_velocity: SpatialVector,
    pub t_f: f64,
    pub sweep: Option<Sweep>,
    pub output: Option<PathBuf>,
    pub sample_output: Option<PathBuf>,
    pub seed: u64,
    pub n_real: usize,
    pub grid_n: usize,
    pub kappa_list: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
    pub method: GammaMethod,
    pub rel_tol: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub tau_mode: TauMode,
    /// Multiplies the graviton kernel used by the quadrature check in verify mode.
    pub perturb_prefactor: f64,
}

impl RunConfig {
    /// Defaults for every key except `mode`.
    pub fn with_mode(mode: Mode) -> Self {
        RunConfig {
            mode,
            units: Units::Natural,
            m0: 1.0,
            lambda_g: 1.0,
            lambda: 1.0,
            gamma: 1.0,
            beta: None,
            temperature: None,
            lambda_int: None,
            xi: SpatialVector::new(1.0, 0.0, 0.0),
            v: SpatialVector::new(0.0, 1.0, 0.0),
            mean_velocity: SpatialVector::ZERO,
            t_f: 10.0,
            sweep: None,
            output: None,
            sample_output: None,
            seed: 1,
            n_real: 10_000,
            grid_n: 64,
            kappa_list: vec![1e-5, 1e-4, 1e-3],
            x_min: 0.1,
            x_max: 50.0,
            x_count: 500,
            method: GammaMethod::Closed,
            rel_tol: 1e-10,
            tau_lo: 1e-6,
            tau_hi: 1e6,
            tau_mode: TauMode::Full,
            perturb_prefactor: 1.0,
        }
    }

    /// Physics parameters in natural units, converting from SI if requested.
    pub fn decoherence_params(&self) -> Result<DecoherenceParams> {
        match self.units {
            Units::Natural => {
                let graviton = GravitonParams::new(self.m0, self.lambda_g)?;
                let bath = InternalBathParams::new(
                    self.lambda,
                    self.gamma,
                    self.beta.unwrap_or(1.0),
                    self.lambda_int,
                )?;
                let config = SuperpositionConfig::with_mean_velocity(
                    self.v,
                    self.xi,
                    self.mean_velocity,
                    self.t_f,
                )?;
                Ok(DecoherenceParams::new(graviton, bath, config))
            }
            Units::Si => si_to_planck(&self.si_params()?),
        }
    }

    pub fn si_params(&self) -> Result<SiParams> {
        let temperature = self
            .temperature
            .ok_or_else(|| Error::Config("SI units need a temperature".to_string()))?;
        Ok(SiParams {
            m0: self.m0,
            lambda_g: self.lambda_g,
            lambda: self.lambda,
            gamma: self.gamma,
            temperature,
            lambda_int: self.lambda_int,
            xi: self.xi,
            v: self.v,
            big_v: self.mean_velocity,
            t_f: self.t_f,
        })
    }

    /// Copy with one sweep variable set.
    pub fn with_value(&self, variable: &str, value: f64) -> Result<RunConfig> {
        let mut c = self.clone();
        match variable {
            "t_f" => c.t_f = value,
            "m0" => c.m0 = value,
            "lambda_g" => c.lambda_g = value,
            "lambda" => c.lambda = value,
            "gamma" => c.gamma = value,
            "beta" => c.beta = Some(value),
            "temperature" => c.temperature = Some(value),
            "lambda_int" => c.lambda_int = Some(value),
            other => {
                return Err(Error::Config(format!(
                    "'{other}' cannot be swept in {} mode",
                    self.mode.name()
                )))
            }
        }
        Ok(c)
    }
}

fn parse_err(line: usize, key: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    let x: f64 = value
        .parse()
        .map_err(|_| parse_err(line, key, format!("'{value}' is not a number")))?;
    if !x.is_finite() {
        return Err(parse_err(line, key, format!("'{value}' is not finite")));
    }
    Ok(x)
}

fn parse_positive(line: usize, key: &str, value: &str) -> Result<f64> {
    let x = parse_f64(line, key, value)?;
    if x <= 0.0 {
        return Err(parse_err(line, key, format!("must be positive, got {x}")));
    }
    Ok(x)
}

fn parse_nonnegative(line: usize, key: &str, value: &str) -> Result<f64> {
    let x = parse_f64(line, key, value)?;
    if x < 0.0 {
        return Err(parse_err(line, key, format!("must be >= 0, got {x}")));
    }
    Ok(x)
}

fn parse_count(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| parse_err(line, key, format!("'{value}' is not a nonnegative integer")))
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| parse_f64(line, key, s.trim()))
        .collect()
}

fn parse_vector(line: usize, key: &str, value: &str) -> Result<SpatialVector> {
    let xs = parse_list(line, key, value)?;
    if xs.len() != 3 {
        return Err(parse_err(
            line,
            key,
            format!("expected 3 comma-separated components, got {}", xs.len()),
        ));
    }
    Ok(SpatialVector::new(xs[0], xs[1], xs[2]))
}

/// Splits a document into `(line, key, value)` entries, rejecting duplicates.
fn entries(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, content, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(parse_err(line, key, "empty key"));
        }
        if let Some((first, _, _)) = out.iter().find(|(_, k, _)| k == key) {
            return Err(parse_err(
                line,
                key,
                format!("duplicate key, first set on line {first}"),
            ));
        }
        out.push((line, key.to_string(), value.to_string()));
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with_overrides(text, &[])
}

/// Parses `text`, then applies `(key, value)` overrides from the command line.
pub fn parse_config_with_overrides(
    text: &str,
    overrides: &[(String, String)],
) -> Result<RunConfig> {
    let mut items = entries(text)?;
    for (key, value) in overrides {
        match items.iter_mut().find(|(_, k, _)| k == key) {
            Some(item) => *item = (0, key.clone(), value.clone()),
            None => items.push((0, key.clone(), value.clone())),
        }
    }

    let (mode_line, mode_value) = items
        .iter()
        .find(|(_, k, _)| k == "mode")
        .map(|(l, _, v)| (*l, v.clone()))
        .ok_or_else(|| parse_err(0, "mode", "mode is required"))?;
    let mode = match mode_value.as_str() {
        "kernel" => Mode::Kernel,
        "gamma" => Mode::Gamma,
        "figure" => Mode::Figure,
        "tau" => Mode::Tau,
        "sample" => Mode::Sample,
        "verify" => Mode::Verify,
        other => {
            return Err(parse_err(
                mode_line,
                "mode",
                format!("unknown mode '{other}' (kernel, gamma, figure, tau, sample, verify)"),
            ))
        }
    };

    let mut cfg = RunConfig::with_mode(mode);
    let mut sweep_var: Option<(usize, String)> = None;
    let mut sweep_start = None;
    let mut sweep_stop = None;
    let mut sweep_count = None;
    let mut sweep_scale = SweepScale::Linear;
    let mut line_of = std::collections::HashMap::new();

    for (line, key, value) in &items {
        let (line, key, value) = (*line, key.as_str(), value.as_str());
        line_of.insert(key.to_string(), line);
        match key {
            "mode" => {}
            "units" => {
                cfg.units = match value {
                    "natural" => Units::Natural,
                    "si" => Units::Si,
                    _ => return Err(parse_err(line, key, "expected 'natural' or 'si'")),
                }
            }
            "m0" => cfg.m0 = parse_positive(line, key, value)?,
            "lambda_g" => cfg.lambda_g = parse_positive(line, key, value)?,
            "lambda" => cfg.lambda = parse_nonnegative(line, key, value)?,
            "gamma" => cfg.gamma = parse_nonnegative(line, key, value)?,
            "beta" => cfg.beta = Some(parse_positive(line, key, value)?),
            "temperature" => cfg.temperature = Some(parse_positive(line, key, value)?),
            "lambda_int" => cfg.lambda_int = Some(parse_positive(line, key, value)?),
            "xi" => cfg.xi = parse_vector(line, key, value)?,
            "v" => cfg.v = parse_vector(line, key, value)?,
            "mean_velocity" => cfg.mean_velocity = parse_vector(line, key, value)?,
            "t_f" => cfg.t_f = parse_positive(line, key, value)?,
            "sweep" => {
                if !SWEEP_VARIABLES.contains(&value) {
                    return Err(parse_err(
                        line,
                        key,
                        format!("unknown sweep variable '{value}'"),
                    ));
                }
                sweep_var = Some((line, value.to_string()));
            }
            "sweep_start" => sweep_start = Some((line, parse_f64(line, key, value)?)),
            "sweep_stop" => sweep_stop = Some((line, parse_f64(line, key, value)?)),
            "sweep_count" => sweep_count = Some((line, parse_count(line, key, value)?)),
            "sweep_scale" => {
                sweep_scale = match value {
                    "linear" => SweepScale::Linear,
                    "log" => SweepScale::Log,
                    _ => return Err(parse_err(line, key, "expected 'linear' or 'log'")),
                }
            }
            "output" => cfg.output = Some(PathBuf::from(value)),
            "sample_output" => cfg.sample_output = Some(PathBuf::from(value)),
            "seed" => {
                cfg.seed = value
                    .parse()
                    .map_err(|_| parse_err(line, key, format!("'{value}' is not a u64")))?
            }
            "n_real" => cfg.n_real = parse_count(line, key, value)?,
            "grid_n" => cfg.grid_n = parse_count(line, key, value)?,
            "kappa_list" => {
                let ks = parse_list(line, key, value)?;
                if ks.iter().any(|&k| k < 0.0) {
                    return Err(parse_err(line, key, "kappa values must be >= 0"));
                }
                cfg.kappa_list = ks;
            }
            "x_min" => cfg.x_min = parse_positive(line, key, value)?,
            "x_max" => cfg.x_max = parse_positive(line, key, value)?,
            "x_count" => cfg.x_count = parse_count(line, key, value)?,
            "method" => {
                cfg.method = match value {
                    "closed" => GammaMethod::Closed,
                    "quadrature" => GammaMethod::Quadrature,
                    _ => return Err(parse_err(line, key, "expected 'closed' or 'quadrature'")),
                }
            }
            "rel_tol" => {
                let r = parse_positive(line, key, value)?;
                if r < 1e-13 {
                    return Err(parse_err(line, key, "must be >= 1e-13"));
                }
                cfg.rel_tol = r;
            }
            "tau_lo" => cfg.tau_lo = parse_positive(line, key, value)?,
            "tau_hi" => cfg.tau_hi = parse_positive(line, key, value)?,
            "tau_mode" => {
                cfg.tau_mode = match value {
                    "full" => TauMode::Full,
                    "cross_only" => TauMode::CrossOnly,
                    _ => return Err(parse_err(line, key, "expected 'full' or 'cross_only'")),
                }
            }
            "perturb_prefactor" => cfg.perturb_prefactor = parse_positive(line, key, value)?,
            _ => return Err(parse_err(line, key, "unknown key")),
        }
    }

    let at = |key: &str| line_of.get(key).copied().unwrap_or(0);

    match cfg.units {
        Units::Natural if cfg.temperature.is_some() => {
            return Err(parse_err(
                at("temperature"),
                "temperature",
                "natural units take 'beta'",
            ))
        }
        Units::Si if cfg.beta.is_some() => {
            return Err(parse_err(
                at("beta"),
                "beta",
                "SI units take 'temperature' in kelvin",
            ))
        }
        Units::Si
            if cfg.temperature.is_none()
                && sweep_var.as_ref().map(|(_, v)| v.as_str()) != Some("temperature") =>
        {
            return Err(parse_err(
                at("units"),
                "temperature",
                "SI units need a temperature",
            ))
        }
        _ => {}
    }
    if cfg.x_count < 2 {
        return Err(parse_err(at("x_count"), "x_count", "must be >= 2"));
    }
    if cfg.x_max <= cfg.x_min {
        return Err(parse_err(at("x_max"), "x_max", "must exceed x_min"));
    }
    if cfg.tau_hi <= cfg.tau_lo {
        return Err(parse_err(at("tau_hi"), "tau_hi", "must exceed tau_lo"));
    }
    if cfg.n_real < 2 {
        return Err(parse_err(at("n_real"), "n_real", "must be >= 2"));
    }
    if cfg.grid_n < 2 {
        return Err(parse_err(at("grid_n"), "grid_n", "must be >= 2"));
    }
    if cfg.kappa_list.is_empty() {
        return Err(parse_err(
            at("kappa_list"),
            "kappa_list",
            "needs at least one value",
        ));
    }

    if let Some((line, variable)) = sweep_var {
        let (sl, start) =
            sweep_start.ok_or_else(|| parse_err(line, "sweep_start", "sweep needs sweep_start"))?;
        let (_, stop) =
            sweep_stop.ok_or_else(|| parse_err(line, "sweep_stop", "sweep needs sweep_stop"))?;
        let count = sweep_count.map(|(_, c)| c).unwrap_or(50);
        if count < 2 {
            return Err(parse_err(at("sweep_count"), "sweep_count", "must be >= 2"));
        }
        let positive =
            !SIGNED_SWEEP_VARIABLES.contains(&variable.as_str()) || sweep_scale == SweepScale::Log;
        if positive && (start <= 0.0 || stop <= 0.0) {
            return Err(parse_err(
                sl,
                "sweep_start",
                format!("'{variable}' sweep bounds must be positive"),
            ));
        }
        if variable == "tau" && mode != Mode::Kernel {
            return Err(parse_err(
                line,
                "sweep",
                "'tau' is only swept in kernel mode",
            ));
        }
        if variable != "tau" && mode == Mode::Kernel {
            return Err(parse_err(line, "sweep", "kernel mode sweeps 'tau'"));
        }
        if variable == "lambda" && start < 0.0 {
            return Err(parse_err(sl, "sweep_start", "lambda must be >= 0"));
        }
        if (variable == "beta" && cfg.units == Units::Si)
            || (variable == "temperature" && cfg.units == Units::Natural)
        {
            return Err(parse_err(
                line,
                "sweep",
                format!("'{variable}' does not match the units"),
            ));
        }
        cfg.sweep = Some(Sweep {
            variable,
            start,
            stop,
            count,
            scale: sweep_scale,
        });
    } else if let Some((line, _)) = sweep_start.or(sweep_stop) {
        return Err(parse_err(
            line,
            "sweep",
            "sweep bounds given without 'sweep'",
        ));
    }

    // Validate the physics once so bad combinations fail at parse time.
    if mode != Mode::Figure && mode != Mode::Verify && cfg.sweep.is_none() {
        cfg.decoherence_params()
            .map_err(|e| parse_err(0, "parameters", e.to_string()))?;
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_example() {
        let c = parse_config("mode = figure\nkappa_list = 1e-5,1e-4,1e-3").unwrap();
        assert_eq!(c.mode, Mode::Figure);
        assert_eq!(c.kappa_list, vec![1e-5, 1e-4, 1e-3]);
        assert_eq!((c.x_min, c.x_max, c.x_count), (0.1, 50.0, 500));
    }

    #[test]
    fn negative_mass_rejected() {
        let e = parse_config("mode = gamma\nm0 = -1").unwrap_err();
        match e {
            Error::Parse { line, key, .. } => assert_eq!((line, key.as_str()), (2, "m0")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_document_needs_mode() {
        let e = parse_config("").unwrap_err();
        assert!(matches!(e, Error::Parse { ref key, .. } if key == "mode"));
        assert!(e.to_string().contains("mode"));
    }

    #[test]
    fn unknown_and_duplicate_keys() {
        let e = parse_config("mode = gamma\n# c\nfoo = 1").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, ref key, .. } if key == "foo"));
        let e = parse_config("mode = gamma\nm0 = 1\nm0 = 2").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn comments_vectors_and_overrides() {
        let text = "mode = gamma # trailing\nxi = 0, 2, 0\nt_f = 3\n";
        let c = parse_config_with_overrides(
            text,
            &[("t_f".into(), "4".into()), ("seed".into(), "9".into())],
        )
        .unwrap();
        assert_eq!(c.xi, SpatialVector::new(0.0, 2.0, 0.0));
        assert_eq!(c.t_f, 4.0);
        assert_eq!(c.seed, 9);
        assert!(parse_config("mode = gamma\nxi = 1,2").is_err());
        assert!(parse_config("mode = gamma\nt_f = abc").is_err());
        assert!(parse_config("mode = gamma\nt_f = nan").is_err());
    }

    #[test]
    fn sweep_validation() {
        let c = parse_config(
            "mode = gamma\nsweep = t_f\nsweep_start = 1\nsweep_stop = 100\nsweep_count = 3\nsweep_scale = log",
        )
        .unwrap();
        let s = c.sweep.unwrap();
        let v = s.values();
        assert_eq!(v.len(), 3);
        assert!((v[1] - 10.0).abs() < 1e-12);
        assert_eq!(v[2], 100.0);
        assert!(
            parse_config("mode = gamma\nsweep = t_f\nsweep_start = 0\nsweep_stop = 1").is_err()
        );
        assert!(parse_config(
            "mode = gamma\nsweep = t_f\nsweep_start = 1\nsweep_stop = 2\nsweep_count = 1"
        )
        .is_err());
        assert!(
            parse_config("mode = gamma\nsweep = tau\nsweep_start = 1\nsweep_stop = 2").is_err()
        );
        assert!(
            parse_config("mode = kernel\nsweep = tau\nsweep_start = -5\nsweep_stop = 5").is_ok()
        );
    }

    #[test]
    fn unit_keys_must_match() {
        assert!(parse_config("mode = gamma\ntemperature = 300").is_err());
        assert!(parse_config("mode = gamma\nunits = si\nbeta = 1").is_err());
        assert!(parse_config("mode = gamma\nunits = si").is_err());
        let c = parse_config(
            "mode = tau\nunits = si\nm0 = 1e-14\nlambda_g = 1e12\ntemperature = 300\nxi = 1e-6,0,0\nv = 0,1e-3,0\nt_f = 1e-3",
        )
        .unwrap();
        assert_eq!(c.units, Units::Si);
        assert!(c.decoherence_params().is_ok());
    }
}
