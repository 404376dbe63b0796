//! Gaussian sampling of the tensor graviton noise `𝒩^{ij}(t)` and a
//! Monte-Carlo estimate of the decoherence factor.
//!
//! The covariance on a grid is `C[(a,ij),(b,kl)] = S(t_a,t_b) 𝒫^{ijkl}` with
//! `S` the scalar vacuum kernel. It factorizes as `S ⊗ M`, so only the
//! `n × n` scalar part needs an eigendecomposition; `M` (the 6×6 component
//! block of `𝒫`) has the exact rank-5 factor [`projector_factor`].
//!
//! Components are stored in the order `11, 22, 33, 12, 13, 23`.
//!
//! Realization `k` draws from ChaCha20 seeded with `seed` on stream `k`, so
//! results do not depend on thread count or scheduling.

use nalgebra::{DMatrix, Matrix3, Matrix6, SMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::decoherence::DecoherenceParams;
use crate::error::{Error, Result};
use crate::kernels::{GravitonParams, KernelSpec};
use crate::sum::compensated_sum;
use crate::tensor::{Rank4Projector, SYM_PAIRS};

/// Default cap on grid nodes; the covariance is `6n`-dimensional.
pub const MAX_GRID_NODES: usize = 256;

/// Relative floor below which negative eigenvalues are clipped to zero.
pub const EIGEN_CLIP_REL: f64 = 1e-8;

/// Generator identification recorded in reports.
pub const RNG_NAME: &str =
    "ChaCha20 (rand_chacha 0.9), seed_from_u64(seed), stream = realization index";

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub t1: f64,
    pub n: usize,
}

impl TimeGrid {
    /// Uniform grid with `n ≥ 2` nodes on `[t0, t1]`.
    pub fn new(t0: f64, t1: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("time grid needs n >= 2, got {n}")));
        }
        if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
            return Err(Error::Domain(format!(
                "time grid needs t1 > t0, got [{t0}, {t1}]"
            )));
        }
        Ok(TimeGrid { t0, t1, n })
    }

    /// Degenerate one-node grid; its spacing is zero.
    pub fn single(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("non-finite time {t}")));
        }
        Ok(TimeGrid { t0: t, t1: t, n: 1 })
    }

    pub fn dt(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.t1 - self.t0) / (self.n - 1) as f64
        }
    }

    pub fn node(&self, a: usize) -> f64 {
        if a + 1 == self.n {
            self.t1
        } else {
            self.t0 + a as f64 * self.dt()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|a| self.node(a)).collect()
    }
}

/// Exact factor `L` with `L Lᵀ` equal to the component block of `𝒫`.
pub fn projector_factor() -> SMatrix<f64, 6, 5> {
    let mut l = SMatrix::<f64, 6, 5>::zeros();
    l[(0, 0)] = SQRT3;
    l[(1, 0)] = -SQRT3;
    l[(0, 1)] = 1.0;
    l[(1, 1)] = 1.0;
    l[(2, 1)] = -2.0;
    l[(3, 2)] = SQRT3;
    l[(4, 3)] = SQRT3;
    l[(5, 4)] = SQRT3;
    l
}

/// Grid covariance of the graviton noise in Kronecker form.
#[derive(Debug, Clone)]
pub struct NoiseCovariance {
    pub grid: TimeGrid,
    /// `S(t_a, t_b)`, exactly symmetric.
    pub scalar: DMatrix<f64>,
    /// Component block of `𝒫`.
    pub block: Matrix6<f64>,
    /// Most negative eigenvalue of the full covariance before clipping.
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Number of scalar eigenvalues clipped to zero.
    pub clipped: usize,
    /// `U √λ` from the clipped eigendecomposition of `S`.
    factor: DMatrix<f64>,
}

impl NoiseCovariance {
    pub fn dim(&self) -> usize {
        6 * self.grid.n
    }

    /// Entry `C[(a,p),(b,q)]` with `p, q` component indices.
    pub fn entry(&self, a: usize, p: usize, b: usize, q: usize) -> f64 {
        self.scalar[(a, b)] * self.block[(p, q)]
    }

    /// Dense `6n × 6n` matrix, row index `6a + p`.
    pub fn full_matrix(&self) -> DMatrix<f64> {
        let n = self.grid.n;
        DMatrix::from_fn(6 * n, 6 * n, |r, c| self.entry(r / 6, r % 6, c / 6, c % 6))
    }

    /// `vᵀ C w` for vectors in the `6a + p` layout.
    pub fn quadratic_form(&self, v: &[f64], w: &[f64]) -> f64 {
        let n = self.grid.n;
        let mut terms = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let mut inner = 0.0;
                for p in 0..6 {
                    for q in 0..6 {
                        inner += v[6 * a + p] * self.block[(p, q)] * w[6 * b + q];
                    }
                }
                terms.push(self.scalar[(a, b)] * inner);
            }
        }
        compensated_sum(terms)
    }

    /// Draws realization `k` of the seeded family.
    pub fn realize(&self, seed: u64, k: u64) -> NoiseRealization {
        let n = self.grid.n;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(k);
        let mut z = DMatrix::<f64>::zeros(n, 5);
        for a in 0..n {
            for c in 0..5 {
                z[(a, c)] = rng.sample(StandardNormal);
            }
        }
        let y = &self.factor * z;
        let l = projector_factor();
        let samples = (0..n)
            .map(|a| {
                let comps = l * y.row(a).transpose();
                let x11 = comps[0];
                let x22 = comps[1];
                let x33 = -(x11 + x22);
                Matrix3::new(
                    x11, comps[3], comps[4], //
                    comps[3], x22, comps[5], //
                    comps[4], comps[5], x33,
                )
            })
            .collect();
        NoiseRealization { samples }
    }
}

/// One sampled noise history: a symmetric traceless matrix per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    pub samples: Vec<Matrix3<f64>>,
}

impl NoiseRealization {
    /// Components in the `6a + p` layout.
    pub fn components(&self) -> Vec<f64> {
        self.samples
            .iter()
            .flat_map(|m| SYM_PAIRS.iter().map(move |&(i, j)| m[(i, j)]))
            .collect()
    }

    pub fn max_abs_trace(&self) -> f64 {
        self.samples
            .iter()
            .map(|m| m.trace().abs())
            .fold(0.0, f64::max)
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.samples
            .iter()
            .map(|m| (m - m.transpose()).abs().max())
            .fold(0.0, f64::max)
    }
}

pub fn build_covariance(grid: &TimeGrid, p: &GravitonParams) -> Result<NoiseCovariance> {
    build_covariance_with_kernel(grid, &KernelSpec::vacuum(*p), MAX_GRID_NODES)
}

pub fn build_covariance_with_kernel(
    grid: &TimeGrid,
    kernel: &KernelSpec,
    max_nodes: usize,
) -> Result<NoiseCovariance> {
    let n = grid.n;
    if n > max_nodes {
        return Err(Error::Config(format!(
            "grid has {n} nodes, maximum is {max_nodes}"
        )));
    }
    let nodes = grid.nodes();
    let mut scalar = DMatrix::<f64>::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let s = if a == b {
                kernel.coincidence(nodes[a])
            } else {
                kernel.scalar(nodes[a], nodes[b])
            };
            scalar[(a, b)] = s;
            scalar[(b, a)] = s;
        }
    }
    if scalar.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numerical {
            message: "non-finite kernel value on grid".to_string(),
            achieved: f64::NAN,
        });
    }
    let block = Rank4Projector::canonical().component_block();

    let eig = SymmetricEigen::new(scalar.clone());
    let s_max = eig.eigenvalues.max();
    let s_min = eig.eigenvalues.min();
    // The block eigenvalues are {6, 6, 3, 3, 3, 0}.
    let (max_eigenvalue, min_eigenvalue) = (6.0 * s_max.max(0.0), 6.0 * s_min.min(0.0));
    let floor = -EIGEN_CLIP_REL * s_max.abs();
    if s_min < floor {
        return Err(Error::Numerical {
            message: format!("covariance is indefinite: most negative eigenvalue {min_eigenvalue}"),
            achieved: min_eigenvalue,
        });
    }
    let mut clipped = 0;
    let mut factor = eig.eigenvectors;
    for (c, &lam) in eig.eigenvalues.iter().enumerate() {
        let root = if lam > 0.0 {
            lam.sqrt()
        } else {
            clipped += 1;
            0.0
        };
        factor.column_mut(c).scale_mut(root);
    }
    Ok(NoiseCovariance {
        grid: *grid,
        scalar,
        block,
        min_eigenvalue,
        max_eigenvalue,
        clipped,
        factor,
    })
}

/// `n_real` realizations; realization `k` uses stream `k` of `seed`.
pub fn sample_noise(
    grid: &TimeGrid,
    p: &GravitonParams,
    n_real: usize,
    seed: u64,
) -> Result<Vec<NoiseRealization>> {
    let cov = build_covariance(grid, p)?;
    Ok(sample_from(&cov, n_real, seed))
}

pub fn sample_from(cov: &NoiseCovariance, n_real: usize, seed: u64) -> Vec<NoiseRealization> {
    (0..n_real as u64)
        .into_par_iter()
        .map(|k| cov.realize(seed, k))
        .collect()
}

/// Coefficients `g` with `Φ = g · 𝒩` for the rectangle-rule phase
/// `Φ = Σ_a Δt 𝒩^{ij}(t_a) 2Ξ_i Δξ_j(t_a)`.
pub fn phase_coefficients(p: &DecoherenceParams, grid: &TimeGrid) -> Result<Vec<f64>> {
    let dt = grid.dt();
    let xi = p.config.xi.to_array();
    let mut g = Vec::with_capacity(6 * grid.n);
    for t in grid.nodes() {
        let d = p.config.delta_xi(t)?.to_array();
        for &(i, j) in &SYM_PAIRS {
            let c = if i == j {
                2.0 * xi[i] * d[i]
            } else {
                2.0 * (xi[i] * d[j] + xi[j] * d[i])
            };
            g.push(dt * c);
        }
    }
    Ok(g)
}

/// Monte-Carlo estimate of `⟨cos Φ⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// `½ gᵀ C g`; `⟨cos Φ⟩ → exp(−gamma_discretized)`.
    pub gamma_discretized: f64,
    pub n_real: usize,
    pub seed: u64,
}

pub fn mc_decoherence_factor(
    p: &DecoherenceParams,
    grid: &TimeGrid,
    n_real: usize,
    seed: u64,
) -> Result<McEstimate> {
    mc_decoherence_factor_with_kernel(p, &KernelSpec::vacuum(p.graviton), grid, n_real, seed)
}

pub fn mc_decoherence_factor_with_kernel(
    p: &DecoherenceParams,
    kernel: &KernelSpec,
    grid: &TimeGrid,
    n_real: usize,
    seed: u64,
) -> Result<McEstimate> {
    if p.bath.lambda != 0.0 {
        return Err(Error::Config(
            "Monte-Carlo comparison needs lambda = 0; the internal bath enters only analytically"
                .to_string(),
        ));
    }
    if n_real < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 realizations, got {n_real}"
        )));
    }
    let cov = build_covariance_with_kernel(grid, kernel, MAX_GRID_NODES)?;
    let g = phase_coefficients(p, grid)?;
    let gamma_discretized = 0.5 * cov.quadratic_form(&g, &g);

    let cosines: Vec<f64> = (0..n_real as u64)
        .into_par_iter()
        .map(|k| {
            let x = cov.realize(seed, k).components();
            let phi = compensated_sum(g.iter().zip(&x).map(|(a, b)| a * b));
            phi.cos()
        })
        .collect();
    let n = n_real as f64;
    let mean = compensated_sum(cosines.iter().copied()) / n;
    let var = compensated_sum(cosines.iter().map(|c| (c - mean).powi(2))) / (n - 1.0);
    let std_error = (var / n).sqrt();
    if !(mean.is_finite() && std_error.is_finite()) {
        return Err(Error::Numerical {
            message: "non-finite Monte-Carlo moments".to_string(),
            achieved: var,
        });
    }
    Ok(McEstimate {
        estimate: mean,
        std_error,
        gamma_discretized,
        n_real,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{cutoff_f, InternalBathParams};
    use crate::tensor::SpatialVector;
    use crate::trajectory::SuperpositionConfig;
    use std::f64::consts::PI;

    fn gp() -> GravitonParams {
        GravitonParams::new(0.5, 1.0).unwrap()
    }

    fn params(xi: SpatialVector, t_f: f64) -> DecoherenceParams {
        DecoherenceParams::new(
            gp(),
            InternalBathParams::decoupled(),
            SuperpositionConfig::new(SpatialVector::new(0.0, 1.0, 0.0), xi, t_f).unwrap(),
        )
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
        assert!(TimeGrid::new(1.0, 1.0, 4).is_err());
        let g = TimeGrid::new(0.0, 3.0, 4).unwrap();
        assert_eq!(g.nodes(), vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(TimeGrid::single(2.0).unwrap().dt(), 0.0);
    }

    #[test]
    fn factor_reproduces_block() {
        let l = projector_factor();
        let block = Rank4Projector::canonical().component_block();
        assert!((l * l.transpose() - block).abs().max() < 1e-14);
    }

    #[test]
    fn single_node_is_coincidence_times_projector() {
        let p = gp();
        let cov = build_covariance(&TimeGrid::single(0.3).unwrap(), &p).unwrap();
        let c = cov.full_matrix();
        let block = Rank4Projector::canonical().component_block();
        let expect = p.m0.powi(2) / (90.0 * PI) * block;
        assert!(
            (c - DMatrix::from_iterator(6, 6, expect.iter().copied()))
                .abs()
                .max()
                < 1e-15
        );
    }

    #[test]
    fn trace_probe_is_null() {
        let cov = build_covariance(&TimeGrid::new(0.0, 5.0, 6).unwrap(), &gp()).unwrap();
        let c = cov.full_matrix();
        let probe = DMatrix::from_fn(36, 1, |r, _| if r % 6 < 3 { 1.0 } else { 0.0 });
        assert!((&c * probe).abs().max() < 1e-15);
        assert_eq!((&c - c.transpose()).abs().max(), 0.0);
    }

    #[test]
    fn two_node_off_diagonal() {
        let p = gp();
        let cov = build_covariance(&TimeGrid::new(0.0, PI, 2).unwrap(), &p).unwrap();
        let expect = p.prefactor() * cutoff_f(PI);
        assert!((cov.scalar[(0, 1)] - expect).abs() < 1e-15);
        assert!((cutoff_f(PI) + 0.140286).abs() < 1e-6);
    }

    #[test]
    fn oversized_grid_rejected() {
        let g = TimeGrid::new(0.0, 1.0, MAX_GRID_NODES + 1).unwrap();
        assert!(matches!(build_covariance(&g, &gp()), Err(Error::Config(_))));
    }

    #[test]
    fn samples_are_symmetric_traceless_and_deterministic() {
        let grid = TimeGrid::new(0.0, 4.0, 16).unwrap();
        let a = sample_noise(&grid, &gp(), 50, 7).unwrap();
        let b = sample_noise(&grid, &gp(), 50, 7).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert_eq!(r.max_asymmetry(), 0.0);
            assert!(r.max_abs_trace() <= 1e-10);
        }
        let c = sample_noise(&grid, &gp(), 50, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn realization_does_not_depend_on_batch_size() {
        let grid = TimeGrid::new(0.0, 4.0, 8).unwrap();
        let a = sample_noise(&grid, &gp(), 10, 3).unwrap();
        let b = sample_noise(&grid, &gp(), 40, 3).unwrap();
        assert_eq!(a[..], b[..10]);
    }

    #[test]
    fn zero_position_gives_unit_factor() {
        let p = params(SpatialVector::ZERO, 5.0);
        let grid = TimeGrid::new(0.0, 5.0, 16).unwrap();
        let r = mc_decoherence_factor(&p, &grid, 100, 1).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.std_error, 0.0);
        assert_eq!(r.gamma_discretized, 0.0);
    }

    #[test]
    fn coupled_bath_rejected() {
        let mut p = params(SpatialVector::new(1.0, 0.0, 0.0), 5.0);
        p.bath = InternalBathParams::new(0.5, 1.0, 1.0, None).unwrap();
        let grid = TimeGrid::new(0.0, 5.0, 16).unwrap();
        assert!(matches!(
            mc_decoherence_factor(&p, &grid, 100, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn estimate_is_bounded_and_error_shrinks() {
        let p = params(SpatialVector::new(1.0, 0.0, 0.0), 10.0);
        let grid = TimeGrid::new(0.0, 10.0, 33).unwrap();
        let a = mc_decoherence_factor(&p, &grid, 2000, 11).unwrap();
        let b = mc_decoherence_factor(&p, &grid, 4000, 11).unwrap();
        assert!(a.estimate <= 1.0 + 3.0 * a.std_error);
        let ratio = a.std_error / b.std_error;
        assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.2, "ratio {ratio}");
        let target = (-a.gamma_discretized).exp();
        assert!((a.estimate - target).abs() < 4.0 * a.std_error);
    }
}
