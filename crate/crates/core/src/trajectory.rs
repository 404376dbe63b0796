//! Two-branch superposition with a triangular separation profile.
//!
//! The branches leave each other with relative velocity `2v` for `t_f/2` and
//! return with `−2v`, so `Δξ(t) = 2v·w(t)` where `w` is the unit-slope tent
//! on `[0, t_f]`.

use crate::error::{domain, ensure_positive, Result};
use crate::tensor::SpatialVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionConfig {
    /// Branch half-velocity `v`.
    pub v: SpatialVector,
    /// Average position `Ξ`, constant in time.
    pub xi: SpatialVector,
    /// Average velocity `V`, constant in time. Zero for a static `Ξ`.
    pub big_v: SpatialVector,
    /// Duration of the superposition.
    pub t_f: f64,
}

impl SuperpositionConfig {
    pub fn new(v: SpatialVector, xi: SpatialVector, t_f: f64) -> Result<Self> {
        Self::with_mean_velocity(v, xi, SpatialVector::ZERO, t_f)
    }

    pub fn with_mean_velocity(
        v: SpatialVector,
        xi: SpatialVector,
        big_v: SpatialVector,
        t_f: f64,
    ) -> Result<Self> {
        v.checked("v")?;
        xi.checked("xi")?;
        big_v.checked("V")?;
        ensure_positive("t_f", t_f)?;
        Ok(SuperpositionConfig { v, xi, big_v, t_f })
    }

    pub fn with_duration(&self, t_f: f64) -> Result<Self> {
        ensure_positive("t_f", t_f)?;
        Ok(SuperpositionConfig { t_f, ..*self })
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.t_f).contains(&t) {
            return domain(format!("time {t} outside [0, {}]", self.t_f));
        }
        Ok(())
    }

    /// Tent profile `w(t)`: `t` on the first half, `t_f − t` on the second.
    pub fn profile(&self, t: f64) -> f64 {
        if t <= 0.5 * self.t_f {
            t
        } else {
            self.t_f - t
        }
    }

    /// `dw/dt` with the left value at the apex.
    pub fn profile_slope(&self, t: f64) -> f64 {
        if t <= 0.5 * self.t_f {
            1.0
        } else {
            -1.0
        }
    }

    /// Branch separation `Δξ(t)`.
    pub fn delta_xi(&self, t: f64) -> Result<SpatialVector> {
        self.check_time(t)?;
        Ok(self.v.scale(2.0 * self.profile(t)))
    }

    /// Relative velocity `Δv(t)`; returns the left value `+2v` at `t_f/2`.
    pub fn delta_v(&self, t: f64) -> Result<SpatialVector> {
        self.check_time(t)?;
        Ok(self.v.scale(2.0 * self.profile_slope(t)))
    }

    /// `∫ₐᵇ Δv dt`, evaluated piecewise in closed form.
    pub fn integrated_delta_v(&self, a: f64, b: f64) -> Result<SpatialVector> {
        self.check_time(a)?;
        self.check_time(b)?;
        let h = 0.5 * self.t_f;
        let first = b.min(h) - a.min(h);
        let second = b.max(h) - a.max(h);
        Ok(self.v.scale(2.0 * (first - second)))
    }
}
