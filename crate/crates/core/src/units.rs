//! SI ↔ Planck-unit conversion (`ℏ = c = k_B = G = 1`).
//!
//! All physics runs in Planck units. [`si_literal_cross_rate`] evaluates the
//! SI form of the cross term as printed with `ℏ, c, k_B, G` restored; it is
//! a report value only, because `𝒦` built from metres and metres per second
//! does not make that expression dimensionless.

use crate::decoherence::{kappa, DecoherenceParams};
use crate::error::{ensure_positive, Error, Result};
use crate::kernels::{GravitonParams, InternalBathParams};
use crate::tensor::{contract_k, SpatialVector};
use crate::trajectory::SuperpositionConfig;

/// CODATA 2018, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// m/s (exact).
pub const C: f64 = 299_792_458.0;
/// J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// CODATA 2018, m³/(kg·s²).
pub const G_NEWTON: f64 = 6.674_30e-11;

pub fn planck_mass() -> f64 {
    (HBAR * C / G_NEWTON).sqrt()
}

pub fn planck_time() -> f64 {
    (HBAR * G_NEWTON / C.powi(5)).sqrt()
}

pub fn planck_length() -> f64 {
    (HBAR * G_NEWTON / C.powi(3)).sqrt()
}

pub fn planck_temperature() -> f64 {
    planck_mass() * C * C / K_B
}

/// Parameter set in SI units. `gamma` is given in units of `ℏ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiParams {
    /// kg
    pub m0: f64,
    /// rad/s
    pub lambda_g: f64,
    pub lambda: f64,
    /// units of ℏ
    pub gamma: f64,
    /// K
    pub temperature: f64,
    /// rad/s
    pub lambda_int: Option<f64>,
    /// m
    pub xi: SpatialVector,
    /// m/s
    pub v: SpatialVector,
    /// m/s
    pub big_v: SpatialVector,
    /// s
    pub t_f: f64,
}

impl SiParams {
    fn validate(&self) -> Result<()> {
        ensure_positive("m0", self.m0)?;
        ensure_positive("lambda_g", self.lambda_g)?;
        ensure_positive("temperature", self.temperature)?;
        ensure_positive("t_f", self.t_f)?;
        if let Some(l) = self.lambda_int {
            ensure_positive("lambda_int", l)?;
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::Domain(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::Domain(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        self.xi.checked("xi")?;
        self.v.checked("v")?;
        self.big_v.checked("V")?;
        Ok(())
    }
}

pub fn si_to_planck(si: &SiParams) -> Result<DecoherenceParams> {
    si.validate()?;
    let (tp, lp) = (planck_time(), planck_length());
    let graviton = GravitonParams::new(si.m0 / planck_mass(), si.lambda_g * tp)?;
    let bath = InternalBathParams::new(
        si.lambda,
        si.gamma,
        planck_temperature() / si.temperature,
        si.lambda_int.map(|l| l * tp),
    )?;
    let config = SuperpositionConfig::with_mean_velocity(
        si.v.scale(1.0 / C),
        si.xi.scale(1.0 / lp),
        si.big_v.scale(1.0 / C),
        si.t_f / tp,
    )?;
    Ok(DecoherenceParams::new(graviton, bath, config))
}

pub fn planck_to_si(p: &DecoherenceParams) -> SiParams {
    let (tp, lp) = (planck_time(), planck_length());
    SiParams {
        m0: p.graviton.m0 * planck_mass(),
        lambda_g: p.graviton.lambda_g / tp,
        lambda: p.bath.lambda,
        gamma: p.bath.gamma,
        temperature: planck_temperature() / p.bath.beta,
        lambda_int: p.bath.lambda_int.map(|l| l / tp),
        xi: p.config.xi.scale(lp),
        v: p.config.v.scale(C),
        big_v: p.config.big_v.scale(C),
        t_f: p.config.t_f * tp,
    }
}

/// `(2𝒦/135)(G k_B/ℏ⁴c⁵) γ T Λ_g⁶ t_f³` with `𝒦` formed from the SI vectors.
pub fn si_literal_cross_rate(si: &SiParams) -> Result<f64> {
    si.validate()?;
    let k = contract_k(&si.xi, &si.v)?;
    Ok(
        2.0 * k / 135.0 * G_NEWTON * K_B / (HBAR.powi(4) * C.powi(5))
            * si.gamma
            * si.temperature
            * si.lambda_g.powi(6)
            * si.t_f.powi(3),
    )
}

/// Side-by-side values of the cross term for the report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiCrossCheck {
    /// Cross term evaluated in Planck units.
    pub planck: f64,
    /// The SI-literal expression.
    pub si_literal: f64,
    /// `si_literal / planck`.
    pub ratio: f64,
}

pub fn si_cross_check(si: &SiParams) -> Result<SiCrossCheck> {
    let p = si_to_planck(si)?;
    let x = p.x();
    let planck = p.rate_scale() * p.bath.lambda.powi(2) * kappa(&p) * x.powi(3);
    let si_literal = si_literal_cross_rate(si)?;
    Ok(SiCrossCheck {
        planck,
        si_literal,
        ratio: si_literal / planck,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SiParams {
        SiParams {
            m0: 1e-14,
            lambda_g: 1e12,
            lambda: 1.0,
            gamma: 3.0,
            temperature: 300.0,
            lambda_int: Some(1e15),
            xi: SpatialVector::new(1e-6, 0.0, 0.0),
            v: SpatialVector::new(0.0, 1e-3, 0.0),
            big_v: SpatialVector::new(0.0, 0.0, 2e-3),
            t_f: 1e-3,
        }
    }

    #[test]
    fn planck_mass_and_time() {
        assert!((planck_mass() - 2.176_434e-8).abs() < 1e-13);
        let mut s = sample();
        s.m0 = planck_mass();
        s.t_f = planck_time();
        let p = si_to_planck(&s).unwrap();
        assert!((p.graviton.m0 - 1.0).abs() < 1e-15);
        assert!((p.config.t_f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let s = sample();
        let back = planck_to_si(&si_to_planck(&s).unwrap());
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
        assert!(close(back.m0, s.m0));
        assert!(close(back.lambda_g, s.lambda_g));
        assert!(close(back.temperature, s.temperature));
        assert!(close(back.lambda_int.unwrap(), s.lambda_int.unwrap()));
        assert!(close(back.t_f, s.t_f));
        assert!(close(back.xi.x, s.xi.x));
        assert!(close(back.v.y, s.v.y));
        assert!(close(back.big_v.z, s.big_v.z));
        assert_eq!(back.gamma, s.gamma);
    }

    #[test]
    fn nonpositive_inputs_rejected() {
        let edits: [fn(&mut SiParams); 4] = [
            |s: &mut SiParams| s.m0 = 0.0,
            |s: &mut SiParams| s.lambda_g = -1.0,
            |s: &mut SiParams| s.temperature = 0.0,
            |s: &mut SiParams| s.t_f = -1e-3,
        ];
        for f in edits {
            let mut s = sample();
            f(&mut s);
            assert!(si_to_planck(&s).is_err());
        }
    }

    #[test]
    fn literal_formula_is_report_only() {
        let c = si_cross_check(&sample()).unwrap();
        assert!(c.planck > 0.0 && c.si_literal > 0.0);
        assert!(c.ratio.is_finite());
    }
}
