//! Polarization tensors and the isotropic rank-4 projector.
//!
//! Indices are 0-based in code. The public helper [`projector_component`]
//! takes 1-based indices, matching the usual physics notation `i, j ∈ {1,2,3}`.

use std::f64::consts::PI;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::{Matrix3, Matrix6, SymmetricEigen, Vector3};

use crate::error::{domain, ensure_finite, Result};
use crate::quadrature::gauss_legendre;

/// A real 3-vector in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpatialVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SpatialVector {
    pub const ZERO: SpatialVector = SpatialVector {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        SpatialVector { x, y, z }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        SpatialVector::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Returns `self` if every component is finite.
    pub fn checked(self, name: &str) -> Result<Self> {
        ensure_finite(&format!("{name}.x"), self.x)?;
        ensure_finite(&format!("{name}.y"), self.y)?;
        ensure_finite(&format!("{name}.z"), self.z)?;
        Ok(self)
    }

    pub fn dot(&self, other: &SpatialVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &SpatialVector) -> SpatialVector {
        SpatialVector::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    pub fn scale(&self, s: f64) -> SpatialVector {
        SpatialVector::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector along `self`.
    pub fn normalized(&self) -> Result<SpatialVector> {
        self.checked("vector")?;
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return domain("cannot normalize a zero vector");
        }
        Ok(self.scale(1.0 / n))
    }

    fn as_na(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }
}

impl Index<usize> for SpatialVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("SpatialVector index {i} out of range"),
        }
    }
}

impl Add for SpatialVector {
    type Output = SpatialVector;
    fn add(self, o: SpatialVector) -> SpatialVector {
        SpatialVector::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for SpatialVector {
    type Output = SpatialVector;
    fn sub(self, o: SpatialVector) -> SpatialVector {
        SpatialVector::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for SpatialVector {
    type Output = SpatialVector;
    fn neg(self) -> SpatialVector {
        self.scale(-1.0)
    }
}

impl Mul<SpatialVector> for f64 {
    type Output = SpatialVector;
    fn mul(self, v: SpatialVector) -> SpatialVector {
        v.scale(self)
    }
}

#[inline]
fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

/// Index pairs of the six independent components of a symmetric 3×3 matrix,
/// in the order `11, 22, 33, 12, 13, 23`.
pub const SYM_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// A rank-4 tensor on 3-space, stored as `components[i][j][k][l]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank4Projector {
    pub components: [[[[f64; 3]; 3]; 3]; 3],
}

impl Rank4Projector {
    pub fn zeros() -> Self {
        Rank4Projector {
            components: [[[[0.0; 3]; 3]; 3]; 3],
        }
    }

    pub fn from_fn<F: Fn(usize, usize, usize, usize) -> f64>(f: F) -> Self {
        let mut t = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        t.components[i][j][k][l] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    /// `𝒫^{ijkl} = 3(δ^{ik}δ^{jl} + δ^{il}δ^{jk}) − 2δ^{ij}δ^{kl}`.
    pub fn canonical() -> Self {
        Self::from_fn(|i, j, k, l| {
            3.0 * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k))
                - 2.0 * delta(i, j) * delta(k, l)
        })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.components[i][j][k][l]
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_fn(|i, j, k, l| s * self.get(i, j, k, l))
    }

    /// `T^{ijkl} a_i b_j c_k d_l`.
    pub fn contract(
        &self,
        a: &SpatialVector,
        b: &SpatialVector,
        c: &SpatialVector,
        d: &SpatialVector,
    ) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        s += self.get(i, j, k, l) * a[i] * b[j] * c[k] * d[l];
                    }
                }
            }
        }
        s
    }

    /// `(T X)_{ij} = T^{ijkl} X_{kl}`.
    pub fn apply(&self, x: &Matrix3<f64>) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| {
            let mut s = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    s += self.get(i, j, k, l) * x[(k, l)];
                }
            }
            s
        })
    }

    /// Largest violation of `T^{ijkl} = T^{jikl} = T^{ijlk} = T^{klij}`.
    pub fn max_pair_asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let t = self.get(i, j, k, l);
                        m = m
                            .max((t - self.get(j, i, k, l)).abs())
                            .max((t - self.get(i, j, l, k)).abs())
                            .max((t - self.get(k, l, i, j)).abs());
                    }
                }
            }
        }
        m
    }

    /// Largest `|δ_{ij} T^{ijkl}|` over `k, l`.
    pub fn max_first_pair_trace(&self) -> f64 {
        let mut m = 0.0_f64;
        for k in 0..3 {
            for l in 0..3 {
                let tr: f64 = (0..3).map(|i| self.get(i, i, k, l)).sum();
                m = m.max(tr.abs());
            }
        }
        m
    }

    /// Largest `|δ_{kl} T^{ijkl}|` over `i, j`.
    pub fn max_second_pair_trace(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let tr: f64 = (0..3).map(|k| self.get(i, j, k, k)).sum();
                m = m.max(tr.abs());
            }
        }
        m
    }

    /// Matrix of the linear map `X ↦ T X` on symmetric matrices in the
    /// orthonormal basis `E11, E22, E33, (E12+E21)/√2, (E13+E31)/√2, (E23+E32)/√2`.
    pub fn symmetric_map_matrix(&self) -> Matrix6<f64> {
        let basis: Vec<Matrix3<f64>> = SYM_PAIRS
            .iter()
            .map(|&(i, j)| {
                let mut m = Matrix3::zeros();
                if i == j {
                    m[(i, i)] = 1.0;
                } else {
                    let s = std::f64::consts::FRAC_1_SQRT_2;
                    m[(i, j)] = s;
                    m[(j, i)] = s;
                }
                m
            })
            .collect();
        Matrix6::from_fn(|a, b| basis[a].component_mul(&self.apply(&basis[b])).sum())
    }

    /// Eigenvalues of [`Self::symmetric_map_matrix`], sorted descending.
    pub fn symmetric_spectrum(&self) -> [f64; 6] {
        let eig = SymmetricEigen::new(self.symmetric_map_matrix());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        [ev[0], ev[1], ev[2], ev[3], ev[4], ev[5]]
    }

    /// Covariance block of the six independent components of a symmetric
    /// random matrix whose second moments are `T^{ijkl}`:
    /// `block[(c, d)] = T^{i_c j_c k_d l_d}` with pairs from [`SYM_PAIRS`].
    pub fn component_block(&self) -> Matrix6<f64> {
        Matrix6::from_fn(|c, d| {
            let (i, j) = SYM_PAIRS[c];
            let (k, l) = SYM_PAIRS[d];
            self.get(i, j, k, l)
        })
    }
}

/// Component of `𝒫` with 1-based indices.
pub fn projector_component(i: usize, j: usize, k: usize, l: usize) -> Result<f64> {
    for (name, idx) in [("i", i), ("j", j), ("k", k), ("l", l)] {
        if !(1..=3).contains(&idx) {
            return domain(format!("index {name} = {idx} outside 1..=3"));
        }
    }
    Ok(Rank4Projector::canonical().get(i - 1, j - 1, k - 1, l - 1))
}

/// `𝒦 = 𝒫^{ijkl} Ξ_i v_j Ξ_k v_l`.
pub fn contract_k(xi: &SpatialVector, v: &SpatialVector) -> Result<f64> {
    xi.checked("xi")?;
    v.checked("v")?;
    Ok(Rank4Projector::canonical().contract(xi, v, xi, v))
}

/// The `+` and `×` polarization tensors for propagation direction `khat`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationPair {
    pub plus: Matrix3<f64>,
    pub cross: Matrix3<f64>,
    pub khat: SpatialVector,
}

impl PolarizationPair {
    /// `ε^+_{ij}ε^+_{kl} + ε^×_{ij}ε^×_{kl}`.
    pub fn polarization_sum(&self) -> Rank4Projector {
        Rank4Projector::from_fn(|i, j, k, l| {
            self.plus[(i, j)] * self.plus[(k, l)] + self.cross[(i, j)] * self.cross[(k, l)]
        })
    }

    /// `P^{ik}P^{jl} + P^{il}P^{jk} − P^{ij}P^{kl}` with `P = 1 − k̂k̂ᵀ`.
    pub fn transverse_projector_sum(&self) -> Rank4Projector {
        let k = self.khat.as_na();
        let p = Matrix3::identity() - k * k.transpose();
        Rank4Projector::from_fn(|i, j, kk, l| {
            p[(i, kk)] * p[(j, l)] + p[(i, l)] * p[(j, kk)] - p[(i, j)] * p[(kk, l)]
        })
    }
}

/// Builds `ε^+ = e1e1ᵀ − e2e2ᵀ` and `ε^× = e1e2ᵀ + e2e1ᵀ` from a transverse
/// dyad. `e1` is the coordinate axis least aligned with `k̂` (lowest index on
/// ties) with its `k̂` component removed; `e2 = k̂ × e1`.
pub fn polarization_pair(khat: &SpatialVector) -> Result<PolarizationPair> {
    let k = khat.normalized()?;
    let abs = [k.x.abs(), k.y.abs(), k.z.abs()];
    let mut axis = 0;
    for i in 1..3 {
        if abs[i] < abs[axis] {
            axis = i;
        }
    }
    let mut a = [0.0; 3];
    a[axis] = 1.0;
    let a = SpatialVector::from_array(a);
    let e1 = (a - k.scale(a.dot(&k))).normalized()?;
    let e2 = k.cross(&e1);
    let (u, w) = (e1.as_na(), e2.as_na());
    let plus = u * u.transpose() - w * w.transpose();
    let cross = u * w.transpose() + w * u.transpose();
    Ok(PolarizationPair {
        plus,
        cross,
        khat: k,
    })
}

/// Smallest polar order for which the product rule integrates the degree-4
/// polarization sum exactly.
pub const MIN_EXACT_ANGULAR_ORDER: usize = 3;

/// Numerical value of `∫dΩ Σ_s ε_s^{ij} ε_s^{kl}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularIntegral {
    pub tensor: Rank4Projector,
    /// Gauss–Legendre nodes in `cos θ`.
    pub polar_nodes: usize,
    /// Uniform nodes in `φ`.
    pub azimuthal_nodes: usize,
    /// `false` when the order is below [`MIN_EXACT_ANGULAR_ORDER`] and the
    /// result is only approximate.
    pub exact_for_degree4: bool,
}

/// Integrates the polarization sum over the unit sphere with a product
/// Gauss–Legendre (in `cos θ`) × uniform (in `φ`, `2·order` nodes) rule.
pub fn angular_integral_numeric(quadrature_order: usize) -> Result<AngularIntegral> {
    if quadrature_order == 0 {
        return domain("angular quadrature order must be at least 1");
    }
    let (nodes, weights) = gauss_legendre(quadrature_order);
    let n_phi = 2 * quadrature_order;
    let dphi = 2.0 * PI / n_phi as f64;
    let mut acc = Rank4Projector::zeros();
    for (&u, &w) in nodes.iter().zip(&weights) {
        let s = (1.0 - u * u).max(0.0).sqrt();
        for b in 0..n_phi {
            let phi = dphi * (b as f64 + 0.5);
            let k = SpatialVector::new(s * phi.cos(), s * phi.sin(), u);
            let sum = polarization_pair(&k)?.polarization_sum();
            let wt = w * dphi;
            for i in 0..3 {
                for j in 0..3 {
                    for kk in 0..3 {
                        for l in 0..3 {
                            acc.components[i][j][kk][l] += wt * sum.get(i, j, kk, l);
                        }
                    }
                }
            }
        }
    }
    Ok(AngularIntegral {
        tensor: acc,
        polar_nodes: quadrature_order,
        azimuthal_nodes: n_phi,
        exact_for_degree4: quadrature_order >= MIN_EXACT_ANGULAR_ORDER,
    })
}
