//! Graviton-induced decoherence of a composite particle.
//!
//! The crate evaluates the noise kernels of a weak quantized gravitational
//! field in its vacuum state and of an Ohmic bath of internal degrees of
//! freedom, and turns them into the decoherence exponent `Γ(t_f)` for a
//! particle held in a two-branch spatial superposition.
//!
//! Module map:
//!
//! * [`tensor`]: polarization tensors and the isotropic rank-4 projector `𝒫`.
//! * [`kernels`]: the cutoff function `F`, graviton and internal-bath kernels.
//! * [`trajectory`]: the triangular branch-separation profile.
//! * [`decoherence`]: `Γ(t_f)` in closed form and by quadrature, `τ_dec`.
//! * [`units`]: conversion between SI and Planck units.
//! * [`stochastic`]: Gaussian sampling of the tensor noise and Monte-Carlo checks.
//! * [`quadrature`] and [`roots`]: the independent numerical machinery.
//! * [`config`], [`csv`] and [`runner`]: the command-line surface.

pub mod config;
pub mod csv;
pub mod decoherence;
pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod roots;
pub mod runner;
pub mod stochastic;
pub mod tensor;
pub mod trajectory;
pub mod units;

mod sum;

pub use decoherence::{
    g_of_x, gamma_general, gamma_piecewise, gamma_vac_closed, kappa, tau_dec, DecoherenceParams,
    GammaBreakdown, TauMode, TauOptions,
};
pub use error::{Error, Result};
pub use kernels::{
    cutoff_f, graviton_vacuum_kernel, internal_ohmic_kernel_regulated,
    internal_white_noise_amplitude, oscillator_anticommutator, thermal_mean_energy, GravitonParams,
    InternalBathParams, KernelSpec, OscillatorStateMoments, ThermalState, VacuumState,
};
pub use stochastic::{build_covariance, mc_decoherence_factor, sample_noise, TimeGrid};
pub use tensor::{
    angular_integral_numeric, contract_k, polarization_pair, projector_component, PolarizationPair,
    Rank4Projector, SpatialVector,
};
pub use trajectory::SuperpositionConfig;
