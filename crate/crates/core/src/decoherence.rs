//! The decoherence exponent `Γ(t_f)` for the two-branch superposition.
//!
//! With `x = Λ_g t_f` the vacuum result reads
//!
//! ```text
//! Γ(t_f) = (8 m₀² / 5π) Λ_g² 𝒦 [ G(x) + λ² κ x³ ]
//! ```
//!
//! where the first term comes from the graviton noise alone and the second
//! from the graviton × internal-bath coupling. [`gamma_piecewise`] evaluates
//! the same quantity from its defining double integrals and serves as the
//! oracle for [`gamma_vac_closed`].

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{
    internal_white_noise_amplitude, GravitonParams, InternalBathParams, KernelSpec,
};
use crate::quadrature::{Quadrature, Rect};
use crate::roots::find_root_bracketed;
use crate::tensor::contract_k;
use crate::trajectory::SuperpositionConfig;

/// Below this `x` the pure-graviton factor `G` is summed from its Taylor series.
pub const G_SERIES_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceParams {
    pub graviton: GravitonParams,
    pub bath: InternalBathParams,
    pub config: SuperpositionConfig,
}

impl DecoherenceParams {
    pub fn new(
        graviton: GravitonParams,
        bath: InternalBathParams,
        config: SuperpositionConfig,
    ) -> Self {
        DecoherenceParams {
            graviton,
            bath,
            config,
        }
    }

    /// `𝒦 = 𝒫^{ijkl} Ξ_i v_j Ξ_k v_l`.
    pub fn k_factor(&self) -> f64 {
        contract_k(&self.config.xi, &self.config.v).expect("config vectors are validated finite")
    }

    /// Dimensionless duration `Λ_g t_f`.
    pub fn x(&self) -> f64 {
        self.graviton.lambda_g * self.config.t_f
    }

    pub fn with_duration(&self, t_f: f64) -> Result<Self> {
        Ok(DecoherenceParams {
            config: self.config.with_duration(t_f)?,
            ..*self
        })
    }

    /// `(8 m₀² / 5π) Λ_g² 𝒦`, the scale in front of the dimensionless bracket.
    pub fn rate_scale(&self) -> f64 {
        8.0 * self.graviton.m0.powi(2) / (5.0 * PI)
            * self.graviton.lambda_g.powi(2)
            * self.k_factor()
    }
}

/// `Γ` split by physical origin.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GammaBreakdown {
    /// Graviton noise alone.
    pub graviton: f64,
    /// Internal-bath white noise acting through the mean velocity `V`.
    pub internal_velocity: f64,
    /// Graviton × internal-bath term.
    pub cross: f64,
    pub total: f64,
}

impl GammaBreakdown {
    pub fn new(graviton: f64, internal_velocity: f64, cross: f64) -> Self {
        GammaBreakdown {
            graviton,
            internal_velocity,
            cross,
            total: graviton + internal_velocity + cross,
        }
    }
}

/// Pure-graviton factor
/// `G(x) = 1 + (2/3x)[sin x − 8 sin(x/2)] + x⁻²[(2/3)cos x − (32/3)cos(x/2) + 10]`.
pub fn g_of_x(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Domain(format!("G(x) needs x > 0, got {x}")));
    }
    Ok(if x < G_SERIES_THRESHOLD {
        g_series(x)
    } else {
        g_closed(x)
    })
}

/// Closed form of `G`; cancels catastrophically for small `x`.
pub fn g_closed(x: f64) -> f64 {
    let h = 0.5 * x;
    1.0 + 2.0 / (3.0 * x) * (x.sin() - 8.0 * h.sin())
        + (2.0 / 3.0 * x.cos() - 32.0 / 3.0 * h.cos() + 10.0) / (x * x)
}

/// Taylor series `G(x) = ⅓ Σ_{n≥2} (−1)ⁿ x²ⁿ (2 − 8·4⁻ⁿ) / [(2n)!(2n+2)]`,
/// leading term `x⁴/288`.
pub fn g_series(x: f64) -> f64 {
    let x2 = x * x;
    // term_n = (−1)ⁿ x²ⁿ / (2n)!, starting at n = 2.
    let mut term = x2 * x2 / 24.0;
    let mut quarter_pow = 1.0 / 16.0;
    let mut sum = 0.0;
    for n in 2..60 {
        let contribution = term * (2.0 - 8.0 * quarter_pow) / (2 * n + 2) as f64;
        sum += contribution;
        if contribution.abs() < 1e-17 * sum.abs() {
            break;
        }
        term *= -x2 / (((2 * n + 1) * (2 * n + 2)) as f64);
        quarter_pow *= 0.25;
    }
    sum / 3.0
}

/// `κ = γπΛ_g / (108 m₀² β)`.
pub fn kappa(p: &DecoherenceParams) -> f64 {
    p.bath.gamma * PI * p.graviton.lambda_g / (108.0 * p.graviton.m0.powi(2) * p.bath.beta)
}

/// Closed-form vacuum rate for a static mean position (`V = 0`).
pub fn gamma_vac_closed(p: &DecoherenceParams) -> Result<GammaBreakdown> {
    if !p.config.big_v.is_zero() {
        return Err(Error::Config(
            "closed form assumes V = 0; use gamma_general for a moving mean".to_string(),
        ));
    }
    let x = p.x();
    let scale = p.rate_scale();
    let graviton = scale * g_of_x(x)?;
    let cross = scale * p.bath.lambda.powi(2) * kappa(p) * x.powi(3);
    Ok(GammaBreakdown::new(graviton, 0.0, cross))
}

/// Tolerance settings for [`gamma_piecewise`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseOptions {
    pub rel_tol: f64,
}

impl Default for PiecewiseOptions {
    fn default() -> Self {
        PiecewiseOptions { rel_tol: 1e-10 }
    }
}

/// The individual integrals behind [`gamma_piecewise`], without prefactors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseIntegrals {
    /// `∫₀^{t_f/2}∫₀^{t_f/2} t t′ N(t,t′)`.
    pub first_half: f64,
    /// `∫_{t_f/2}^{t_f}∫_{t_f/2}^{t_f} (t_f−t)(t_f−t′) N(t,t′)`.
    pub second_half: f64,
    /// `∫₀^{t_f/2}∫_{t_f/2}^{t_f} t (t_f−t′) N(t,t′)`.
    pub mixed: f64,
    /// `∫₀^{t_f/2} t² N(t) + ∫_{t_f/2}^{t_f} (t_f−t)² N(t)`.
    pub coincidence: f64,
    pub abs_error_estimate: f64,
}

/// Evaluates the double integrals of the triangular-trajectory rate against
/// the scalar part of `kernel`.
pub fn piecewise_integrals(
    config: &SuperpositionConfig,
    kernel: &KernelSpec,
    opts: &PiecewiseOptions,
) -> Result<PiecewiseIntegrals> {
    let t_f = config.t_f;
    let h = 0.5 * t_f;
    let q = Quadrature::with_rel_tol(opts.rel_tol).max_frequency(kernel.max_frequency());
    let scale = kernel.coincidence(0.0).abs() * h.powi(4);
    let q2 = q.abs_tol(opts.rel_tol * 1e-3 * scale);

    let r1 = q2.integrate_2d(
        |t, s| t * s * kernel.scalar(t, s),
        &[Rect::new(0.0, h, 0.0, h)],
    );
    let r2 = q2.integrate_2d(
        |t, s| (t_f - t) * (t_f - s) * kernel.scalar(t, s),
        &[Rect::new(h, t_f, h, t_f)],
    );
    let r3 = q2.integrate_2d(
        |t, s| t * (t_f - s) * kernel.scalar(t, s),
        &[Rect::new(0.0, h, h, t_f)],
    );
    let c1 = q.integrate(|t| t * t * kernel.coincidence(t), 0.0, h);
    let c2 = q.integrate(|t| (t_f - t).powi(2) * kernel.coincidence(t), h, t_f);

    let results = [r1, r2, r3, c1, c2];
    let err: f64 = results.iter().map(|r| r.abs_error_estimate).sum();
    if results.iter().any(|r| !r.converged || !r.value.is_finite()) {
        return Err(Error::Numerical {
            message: "rate quadrature did not converge".to_string(),
            achieved: err,
        });
    }
    Ok(PiecewiseIntegrals {
        first_half: r1.value,
        second_half: r2.value,
        mixed: r3.value,
        coincidence: c1.value + c2.value,
        abs_error_estimate: err,
    })
}

/// Rate for the triangular trajectory by direct quadrature against any
/// graviton kernel. The mean velocity is ignored here; see [`gamma_general`].
pub fn gamma_piecewise(
    p: &DecoherenceParams,
    kernel: &KernelSpec,
    opts: &PiecewiseOptions,
) -> Result<GammaBreakdown> {
    let k = p.k_factor();
    if k == 0.0 {
        return Ok(GammaBreakdown::new(0.0, 0.0, 0.0));
    }
    let ints = piecewise_integrals(&p.config, kernel, opts)?;
    let graviton = 8.0 * k * (ints.first_half + ints.second_half + 2.0 * ints.mixed);
    let b = &p.bath;
    let cross_coeff = 16.0 * b.lambda.powi(2) * b.gamma * PI / (b.beta * p.graviton.m0.powi(2));
    let cross = cross_coeff * k * ints.coincidence;
    Ok(GammaBreakdown::new(graviton, 0.0, cross))
}

/// `(λ²πγ/β) ∫₀^{t_f} (V·Δv)² dt`, the white-noise term driven by the mean velocity.
pub fn internal_velocity_term(p: &DecoherenceParams) -> f64 {
    let c = &p.config;
    let amplitude = internal_white_noise_amplitude(&p.bath);
    let h = 0.5 * c.t_f;
    // Δv is piecewise constant: +2v on (0, t_f/2], −2v after.
    let first = c.big_v.dot(&c.v.scale(2.0)).powi(2) * h;
    let second = c.big_v.dot(&c.v.scale(-2.0)).powi(2) * (c.t_f - h);
    amplitude * (first + second)
}

/// Full rate including the mean-velocity term, using the vacuum graviton kernel.
pub fn gamma_general(p: &DecoherenceParams) -> Result<GammaBreakdown> {
    gamma_general_with_kernel(
        p,
        &KernelSpec::vacuum(p.graviton),
        &PiecewiseOptions::default(),
    )
}

pub fn gamma_general_with_kernel(
    p: &DecoherenceParams,
    kernel: &KernelSpec,
    opts: &PiecewiseOptions,
) -> Result<GammaBreakdown> {
    let g = gamma_piecewise(p, kernel, opts)?;
    Ok(GammaBreakdown::new(
        g.graviton,
        internal_velocity_term(p),
        g.cross,
    ))
}

/// Which part of `Γ` is inverted for the decoherence time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauMode {
    /// Graviton, cross and mean-velocity terms.
    #[default]
    Full,
    /// Graviton × internal term only.
    CrossOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauOptions {
    pub mode: TauMode,
    /// Search interval in units of `1/Λ_g`.
    pub bracket: (f64, f64),
}

impl Default for TauOptions {
    fn default() -> Self {
        TauOptions {
            mode: TauMode::Full,
            bracket: (1e-6, 1e6),
        }
    }
}

/// Closed-form `Γ` at duration `t`, including the mean-velocity term.
pub fn closed_rate_at(p: &DecoherenceParams, t: f64, mode: TauMode) -> Result<f64> {
    let q = p.with_duration(t)?;
    let x = q.x();
    let scale = q.rate_scale();
    let cross = scale * q.bath.lambda.powi(2) * kappa(&q) * x.powi(3);
    Ok(match mode {
        TauMode::CrossOnly => cross,
        TauMode::Full => scale * g_of_x(x)? + cross + internal_velocity_term(&q),
    })
}

/// Decoherence time: the root of `Γ(τ) = 1` by bisection on the closed-form rate.
pub fn tau_dec(p: &DecoherenceParams, opts: &TauOptions) -> Result<f64> {
    let (lo, hi) = opts.bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::Domain(format!("invalid tau bracket [{lo}, {hi}]")));
    }
    let lambda = p.graviton.lambda_g;
    let (t_lo, t_hi) = (lo / lambda, hi / lambda);
    let rate = |t: f64| closed_rate_at(p, t, opts.mode);
    let g_hi = rate(t_hi)?;
    if g_hi.is_nan() || g_hi < 1.0 {
        return Err(Error::NoDecoherenceInRange {
            t_max: t_hi,
            gamma_max: g_hi,
        });
    }
    let g_lo = rate(t_lo)?;
    if g_lo >= 1.0 {
        return Err(Error::Bracket {
            lo: t_lo,
            hi: t_hi,
            g_lo: g_lo - 1.0,
            g_hi: g_hi - 1.0,
        });
    }
    find_root_bracketed(
        |t| rate(t).map(|g| g - 1.0).unwrap_or(f64::NAN),
        t_lo,
        t_hi,
        0.0,
    )
}

/// `τ = (135 β / (2 𝒦 λ² γ Λ_g⁶))^{1/3}`, the inverse of the cross term alone.
pub fn tau_dec_cross_only_closed(p: &DecoherenceParams) -> Result<f64> {
    let denom =
        2.0 * p.k_factor() * p.bath.lambda.powi(2) * p.bath.gamma * p.graviton.lambda_g.powi(6);
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::Config(
            "cross-term decoherence time needs K, lambda and gamma nonzero".to_string(),
        ));
    }
    Ok((135.0 * p.bath.beta / denom).cbrt())
}

/// `x*` solving `λ²κx³ = G(x)` on `[lo, hi]`: where the cross term overtakes
/// the pure-graviton term.
pub fn crossover_x(lambda: f64, kappa: f64, lo: f64, hi: f64) -> Result<f64> {
    let l2k = lambda * lambda * kappa;
    find_root_bracketed(
        |x| l2k * x.powi(3) - g_of_x(x).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-12,
    )
}
