//! Two-time noise kernels.
//!
//! The graviton kernel factorizes as a scalar function of `(t, t′)` times the
//! isotropic tensor `𝒫^{ijkl}` from [`crate::tensor`], so only the scalar
//! coefficient is evaluated here. The internal bath contributes a scalar
//! kernel which is white noise in the high-temperature limit.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::quadrature::Quadrature;
use crate::tensor::Rank4Projector;

/// Below this `|x|` the cutoff function is summed from its Taylor series.
pub const F_SERIES_THRESHOLD: f64 = 0.5;

/// Mass and frequency cutoff of the graviton bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravitonParams {
    pub m0: f64,
    pub lambda_g: f64,
}

impl GravitonParams {
    pub fn new(m0: f64, lambda_g: f64) -> Result<Self> {
        ensure_positive("m0", m0)?;
        ensure_positive("lambda_g", lambda_g)?;
        Ok(GravitonParams { m0, lambda_g })
    }

    /// `m₀²Λ_g⁶ / 15π`, the scale of the vacuum kernel.
    pub fn prefactor(&self) -> f64 {
        self.m0 * self.m0 * self.lambda_g.powi(6) / (15.0 * PI)
    }

    /// Coincidence value `lim_{t′→t}` of the scalar vacuum kernel, `m₀²Λ_g⁶/90π`.
    pub fn coincidence(&self) -> f64 {
        self.prefactor() / 6.0
    }
}

/// Internal-bath coupling, Ohmic strength, inverse temperature and an optional
/// exponential frequency regulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalBathParams {
    pub lambda: f64,
    pub gamma: f64,
    pub beta: f64,
    pub lambda_int: Option<f64>,
}

impl InternalBathParams {
    pub fn new(lambda: f64, gamma: f64, beta: f64, lambda_int: Option<f64>) -> Result<Self> {
        ensure_finite("lambda", lambda)?;
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::Domain(format!("gamma must be >= 0, got {gamma}")));
        }
        ensure_positive("beta", beta)?;
        if let Some(l) = lambda_int {
            ensure_positive("lambda_int", l)?;
        }
        Ok(InternalBathParams {
            lambda,
            gamma,
            beta,
            lambda_int,
        })
    }

    /// A bath with no coupling to the particle.
    pub fn decoupled() -> Self {
        InternalBathParams {
            lambda: 0.0,
            gamma: 0.0,
            beta: 1.0,
            lambda_int: None,
        }
    }
}

/// Second moments of a single bath oscillator in some initial state.
pub trait OscillatorStateMoments: Send + Sync {
    /// `⟨H_ω⟩`.
    fn mean_energy(&self, omega: f64) -> f64;
    /// `⟨a_ω²⟩`; `⟨(a_ω†)²⟩` is its complex conjugate.
    fn pair_moment(&self, omega: f64) -> Complex64;
}

/// The oscillator ground state: `⟨H⟩ = ω/2`, `⟨a²⟩ = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct VacuumState;

impl OscillatorStateMoments for VacuumState {
    fn mean_energy(&self, omega: f64) -> f64 {
        0.5 * omega
    }
    fn pair_moment(&self, _omega: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// A thermal state at inverse temperature `beta`.
#[derive(Debug, Clone, Copy)]
pub struct ThermalState {
    pub beta: f64,
}

impl OscillatorStateMoments for ThermalState {
    fn mean_energy(&self, omega: f64) -> f64 {
        0.5 * omega / (0.5 * omega * self.beta).tanh()
    }
    fn pair_moment(&self, _omega: f64) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
}

/// Checks `⟨H_ω⟩ ≥ ω/2` on the supplied frequencies.
pub fn satisfies_vacuum_bound(state: &dyn OscillatorStateMoments, omegas: &[f64]) -> bool {
    omegas
        .iter()
        .all(|&w| state.mean_energy(w) >= 0.5 * w * (1.0 - 4.0 * f64::EPSILON))
}

/// `F(x) = x⁻⁶ ∫₀ˣ y⁵ cos y dy`, an even function with `F(0) = 1/6`.
pub fn cutoff_f(x: f64) -> f64 {
    let x = x.abs();
    if x < F_SERIES_THRESHOLD {
        cutoff_f_series(x)
    } else {
        cutoff_f_closed(x)
    }
}

/// Closed form of `F`. Loses accuracy near `x = 0`.
pub fn cutoff_f_closed(x: f64) -> f64 {
    let x2 = x * x;
    let x4 = x2 * x2;
    ((5.0 * x4 - 60.0 * x2 + 120.0) * x.cos() + x * (x4 - 20.0 * x2 + 120.0) * x.sin() - 120.0)
        / (x4 * x2)
}

/// `Σₙ (−1)ⁿ x²ⁿ / [(2n)! (2n+6)]`.
pub fn cutoff_f_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    for n in 0..40 {
        let contribution = term / (2 * n + 6) as f64;
        sum += contribution;
        if contribution.abs() < 1e-17 * sum.abs() {
            break;
        }
        term *= -x2 / (((2 * n + 1) * (2 * n + 2)) as f64);
    }
    sum
}

/// `⟨{q_ω(t), q_ω(t′)}⟩ = (2/mω²)⟨H⟩cos ω(t−t′) + (2/mω) Re[⟨a²⟩e^{−iω(t+t′)}]`.
pub fn oscillator_anticommutator(
    t: f64,
    t_prime: f64,
    omega: f64,
    m: f64,
    state: &dyn OscillatorStateMoments,
) -> Result<f64> {
    ensure_positive("omega", omega)?;
    ensure_positive("m", m)?;
    ensure_finite("t", t)?;
    ensure_finite("t_prime", t_prime)?;
    Ok(anticommutator_unchecked(t, t_prime, omega, m, state))
}

fn anticommutator_unchecked(
    t: f64,
    t_prime: f64,
    omega: f64,
    m: f64,
    state: &dyn OscillatorStateMoments,
) -> f64 {
    let h = state.mean_energy(omega);
    let a2 = state.pair_moment(omega);
    let phase = Complex64::from_polar(1.0, -omega * (t + t_prime));
    2.0 / (m * omega * omega) * h * (omega * (t - t_prime)).cos()
        + 2.0 / (m * omega) * (a2 * phase).re
}

/// Scalar coefficient `(m₀²Λ_g⁶/15π) F[Λ_g(t−t′)]` of the vacuum graviton
/// kernel; the full kernel is this value times `𝒫^{ijkl}`.
pub fn graviton_vacuum_kernel(t: f64, t_prime: f64, p: &GravitonParams) -> f64 {
    p.prefactor() * cutoff_f(p.lambda_g * (t - t_prime))
}

/// `(ω/2) coth(ωβ/2)`.
pub fn thermal_mean_energy(omega: f64, beta: f64) -> Result<f64> {
    ensure_positive("omega", omega)?;
    ensure_positive("beta", beta)?;
    Ok(ThermalState { beta }.mean_energy(omega))
}

/// Amplitude `λ²πγ/β` of the high-temperature white-noise kernel.
pub fn internal_white_noise_amplitude(p: &InternalBathParams) -> f64 {
    p.lambda * p.lambda * PI * p.gamma / p.beta
}

/// The delta-correlated internal kernel `A δ(t − t′)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhiteNoiseKernel {
    pub amplitude: f64,
}

impl WhiteNoiseKernel {
    pub fn new(p: &InternalBathParams) -> Self {
        WhiteNoiseKernel {
            amplitude: internal_white_noise_amplitude(p),
        }
    }

    /// `∫dt′ A δ(t − t′) f(t′) = A f(t)` for `t` inside the window.
    pub fn smear<F: Fn(f64) -> f64>(&self, f: F, t: f64) -> f64 {
        self.amplitude * f(t)
    }
}

/// `½λ²γ ∫₀^∞ dϖ ϖ coth(ϖβ/2) e^{−ϖ/Λ_int} cos ϖτ` by adaptive quadrature.
pub fn internal_ohmic_kernel_regulated(tau: f64, p: &InternalBathParams) -> Result<f64> {
    ensure_finite("tau", tau)?;
    let cutoff = p
        .lambda_int
        .ok_or_else(|| Error::Config("the regulated Ohmic kernel needs lambda_int".to_string()))?;
    let tau = tau.abs();
    let beta = p.beta;
    // e^{-46} · 46 is below 1e-18 of the peak of ϖ e^{-ϖ/Λ}.
    let upper = 46.0 * cutoff;
    let integrand = |w: f64| {
        let thermal = w / (0.5 * w * beta).tanh();
        thermal * (-w / cutoff).exp() * (w * tau).cos()
    };
    let q = Quadrature::with_rel_tol(1e-10)
        .max_frequency(tau)
        .max_subdivisions(200_000);
    let r = q.integrate(integrand, 0.0, upper);
    if !r.converged {
        return Err(Error::Numerical {
            message: format!("regulated Ohmic kernel did not converge at tau = {tau}"),
            achieved: r.abs_error_estimate,
        });
    }
    Ok(0.5 * p.lambda * p.lambda * p.gamma * r.value)
}

/// A graviton noise kernel `N^{ijkl}(t, t′) = scalar(t, t′) · 𝒫^{ijkl}`.
#[derive(Clone)]
pub enum KernelSpec {
    /// Minkowski vacuum with a sharp frequency cutoff.
    GravitonVacuum(GravitonParams),
    /// Arbitrary oscillator state, integrated numerically over `ω ∈ [0, Λ_g]`.
    GravitonState {
        params: GravitonParams,
        state: Arc<dyn OscillatorStateMoments>,
    },
    /// `factor` times another kernel.
    Scaled { factor: f64, inner: Box<KernelSpec> },
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::GravitonVacuum(p) => f.debug_tuple("GravitonVacuum").field(p).finish(),
            KernelSpec::GravitonState { params, .. } => f
                .debug_struct("GravitonState")
                .field("params", params)
                .finish_non_exhaustive(),
            KernelSpec::Scaled { factor, inner } => f
                .debug_struct("Scaled")
                .field("factor", factor)
                .field("inner", inner)
                .finish(),
        }
    }
}

impl KernelSpec {
    pub fn vacuum(p: GravitonParams) -> Self {
        KernelSpec::GravitonVacuum(p)
    }

    pub fn scaled(self, factor: f64) -> Self {
        KernelSpec::Scaled {
            factor,
            inner: Box::new(self),
        }
    }

    pub fn params(&self) -> &GravitonParams {
        match self {
            KernelSpec::GravitonVacuum(p) => p,
            KernelSpec::GravitonState { params, .. } => params,
            KernelSpec::Scaled { inner, .. } => inner.params(),
        }
    }

    /// Scalar coefficient multiplying `𝒫^{ijkl}`.
    pub fn scalar(&self, t: f64, t_prime: f64) -> f64 {
        match self {
            KernelSpec::GravitonVacuum(p) => graviton_vacuum_kernel(t, t_prime, p),
            KernelSpec::GravitonState { params, state } => {
                let state = state.as_ref();
                // ω⁵ times the anticommutator normalized to its vacuum value (1/mω) cos.
                let integrand =
                    |w: f64| w.powi(5) * w * anticommutator_unchecked(t, t_prime, w, 1.0, state);
                let r = Quadrature::with_rel_tol(1e-12)
                    .max_frequency((t - t_prime).abs().max((t + t_prime).abs()))
                    .integrate(integrand, 0.0, params.lambda_g);
                params.m0 * params.m0 / (15.0 * PI) * r.value
            }
            KernelSpec::Scaled { factor, inner } => factor * inner.scalar(t, t_prime),
        }
    }

    /// `lim_{t′→t}` of the scalar coefficient.
    pub fn coincidence(&self, t: f64) -> f64 {
        match self {
            KernelSpec::GravitonVacuum(p) => p.coincidence(),
            KernelSpec::GravitonState { .. } => self.scalar(t, t),
            KernelSpec::Scaled { factor, inner } => factor * inner.coincidence(t),
        }
    }

    /// Highest angular frequency in `t` or `t′` carried by the kernel.
    pub fn max_frequency(&self) -> f64 {
        self.params().lambda_g
    }

    /// Full tensor kernel at `(t, t′)`.
    pub fn tensor(&self, t: f64, t_prime: f64) -> Rank4Projector {
        Rank4Projector::canonical().scaled(self.scalar(t, t_prime))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_1d;

    fn f_by_quadrature(x: f64) -> f64 {
        integrate_1d(|y| y.powi(5) * y.cos(), 0.0, x, 1e-13).value / x.powi(6)
    }

    #[test]
    fn f_at_zero_and_pi() {
        assert_eq!(cutoff_f(0.0), 1.0 / 6.0);
        let oracle = f_by_quadrature(PI);
        assert!((oracle + 0.140286).abs() < 1e-6, "oracle F(pi) = {oracle}");
        assert!((cutoff_f(PI) - oracle).abs() < 1e-12);
    }

    #[test]
    fn f_is_even() {
        for &x in &[1e-3, 0.3, 0.5, 2.0, 17.5, 150.0] {
            assert_eq!(cutoff_f(-x), cutoff_f(x));
        }
    }

    #[test]
    fn f_branches_agree_near_threshold() {
        for i in 0..=40 {
            let x = 0.3 + 0.01 * i as f64;
            let a = cutoff_f_series(x);
            let b = cutoff_f_closed(x);
            assert!((a - b).abs() <= 1e-9 * a.abs(), "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn f_is_bounded() {
        for i in 0..=4000 {
            let x = -200.0 + 0.1 * i as f64;
            assert!(cutoff_f(x).abs() <= 1.0 / 6.0, "x = {x}");
        }
    }

    #[test]
    fn f_derivative_identity() {
        // d/dx [x⁶ F(x)] = x⁵ cos x, checked by central differences.
        let g = |x: f64| x.powi(6) * cutoff_f(x);
        for i in 0..50 {
            let x = 0.2 + 0.37 * i as f64;
            let h = 1e-5 * x.max(1.0);
            let fd = (g(x + h) - g(x - h)) / (2.0 * h);
            let exact = x.powi(5) * x.cos();
            let scale = exact.abs().max(x.powi(5) * 1e-3);
            assert!(
                (fd - exact).abs() <= 1e-6 * scale,
                "x = {x}: {fd} vs {exact}"
            );
        }
    }

    #[test]
    fn anticommutator_vacuum_and_thermal() {
        let (m, w) = (2.0, 1.5);
        for &(t, tp) in &[(0.0, 0.0), (0.3, 1.7), (-2.0, 4.1)] {
            let v = oscillator_anticommutator(t, tp, w, m, &VacuumState).unwrap();
            assert!((v - (w * (t - tp)).cos() / (m * w)).abs() < 1e-15);
        }
        let beta = 0.8;
        let th = oscillator_anticommutator(1.0, 1.0, w, m, &ThermalState { beta }).unwrap();
        let nbar = 1.0 / ((w * beta).exp() - 1.0);
        assert!((th - (1.0 + 2.0 * nbar) / (m * w)).abs() < 1e-14);
        assert!((th - 1.0 / ((0.5 * w * beta).tanh() * m * w)).abs() < 1e-14);
        assert!(oscillator_anticommutator(0.0, 0.0, 0.0, m, &VacuumState).is_err());
        assert!(oscillator_anticommutator(0.0, 0.0, 1.0, -1.0, &VacuumState).is_err());
    }

    struct Squeezed {
        r: f64,
    }

    impl OscillatorStateMoments for Squeezed {
        fn mean_energy(&self, omega: f64) -> f64 {
            omega * (self.r.sinh().powi(2) + 0.5)
        }
        fn pair_moment(&self, _omega: f64) -> Complex64 {
            Complex64::new(-self.r.sinh() * self.r.cosh(), 0.0)
        }
    }

    #[test]
    fn anticommutator_pair_moment_term() {
        let s = Squeezed { r: 0.4 };
        let (t, tp, w, m) = (0.2, 0.5, 3.0, 1.0);
        let got = oscillator_anticommutator(t, tp, w, m, &s).unwrap();
        let h = s.mean_energy(w);
        let a2 = s.pair_moment(w).re;
        let want = 2.0 / (m * w * w) * h * (w * (t - tp)).cos()
            + 2.0 / (m * w) * a2 * (w * (t + tp)).cos();
        assert!((got - want).abs() < 1e-14);
        assert!(satisfies_vacuum_bound(&s, &[0.1, 1.0, 10.0]));
    }

    #[test]
    fn vacuum_kernel_properties() {
        let p = GravitonParams::new(1.3, 2.0).unwrap();
        let c = graviton_vacuum_kernel(0.7, 0.7, &p);
        assert!((c - p.m0.powi(2) * p.lambda_g.powi(6) / (90.0 * PI)).abs() < 1e-13 * c);
        assert_eq!(
            graviton_vacuum_kernel(0.2, 1.9, &p),
            graviton_vacuum_kernel(1.9, 0.2, &p)
        );
        let p2 = GravitonParams::new(2.6, 2.0).unwrap();
        let a = graviton_vacuum_kernel(0.2, 1.0, &p);
        let b = graviton_vacuum_kernel(0.2, 1.0, &p2);
        assert!((b - 4.0 * a).abs() < 1e-14 * b.abs());
        assert!(GravitonParams::new(0.0, 1.0).is_err());
    }

    #[test]
    fn state_kernel_reproduces_vacuum() {
        let p = GravitonParams::new(1.0, 1.5).unwrap();
        let general = KernelSpec::GravitonState {
            params: p,
            state: Arc::new(VacuumState),
        };
        let vac = KernelSpec::vacuum(p);
        for &(t, tp) in &[(0.0, 0.0), (1.0, 3.5), (4.0, 0.5)] {
            let a = general.scalar(t, tp);
            let b = vac.scalar(t, tp);
            assert!((a - b).abs() < 1e-10 * p.coincidence(), "{a} vs {b}");
        }
        assert!((general.coincidence(2.0) - vac.coincidence(2.0)).abs() < 1e-10);
    }

    #[test]
    fn thermal_energy_limits() {
        let e = thermal_mean_energy(1.0, 2.0).unwrap();
        let e2 = std::f64::consts::E.powi(2);
        assert!((e - 0.5 * (e2 + 1.0) / (e2 - 1.0)).abs() < 1e-15);
        assert!((e - 0.656518).abs() < 1e-6);
        assert_eq!(thermal_mean_energy(2.0, 100.0).unwrap(), 1.0);
        let beta = 1e-6;
        assert!((thermal_mean_energy(1e-3, beta).unwrap() - 1.0 / beta).abs() < 1e-9 / beta);
        let mut prev = f64::INFINITY;
        for i in 1..50 {
            let b = 0.1 * i as f64;
            let v = thermal_mean_energy(0.7, b).unwrap();
            assert!(v <= prev && v >= 0.35);
            prev = v;
        }
        assert!(thermal_mean_energy(-1.0, 1.0).is_err());
        assert!(thermal_mean_energy(1.0, 0.0).is_err());
    }

    #[test]
    fn white_noise_amplitude() {
        let mut p = InternalBathParams::new(1.0, 1.0, PI, None).unwrap();
        assert!((internal_white_noise_amplitude(&p) - 1.0).abs() < 1e-15);
        let a = internal_white_noise_amplitude(&p);
        p.beta /= 2.0;
        assert!((internal_white_noise_amplitude(&p) - 2.0 * a).abs() < 1e-15);
        p.lambda = 0.0;
        assert_eq!(internal_white_noise_amplitude(&p), 0.0);
        let k = WhiteNoiseKernel { amplitude: 3.0 };
        assert_eq!(k.smear(|t| t * t, 2.0), 12.0);
    }

    #[test]
    fn regulated_ohmic_kernel() {
        let p = InternalBathParams::new(0.5, 2.0, 0.3, Some(4.0)).unwrap();
        for &tau in &[0.0, 0.4, 1.3] {
            let a = internal_ohmic_kernel_regulated(tau, &p).unwrap();
            let b = internal_ohmic_kernel_regulated(-tau, &p).unwrap();
            assert_eq!(a, b);
        }
        let missing = InternalBathParams::new(0.5, 2.0, 0.3, None).unwrap();
        assert!(matches!(
            internal_ohmic_kernel_regulated(0.1, &missing),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn regulated_ohmic_kernel_zero_temperature() {
        let cutoff = 3.0;
        let p = InternalBathParams::new(0.8, 1.5, 1e9, Some(cutoff)).unwrap();
        for &tau in &[0.0, 0.1, 0.5, 2.0, 7.0] {
            let got = internal_ohmic_kernel_regulated(tau, &p).unwrap();
            let lt2 = (cutoff * tau).powi(2);
            let closed = 0.5 * p.lambda.powi(2) * p.gamma * cutoff * cutoff * (1.0 - lt2)
                / (1.0 + lt2).powi(2);
            assert!(
                (got - closed).abs() <= 1e-8 * cutoff * cutoff,
                "tau {tau}: {got} vs {closed}"
            );
        }
    }
}
