//! Adaptive quadrature used to cross-check every closed form in the crate.
//!
//! The 1D integrator is a globally adaptive Gauss–Kronrod (7/15) scheme: each
//! panel is evaluated with both rules and the panel error is `|K15 − G7|`. The
//! panel with the largest error is bisected until the total error meets the
//! requested tolerance. Integrands that oscillate can declare their highest
//! angular frequency, in which case the initial panels are no wider than half
//! the shortest period.
//!
//! The 2D integrator is a tensor product of two nested 1D integrations over a
//! list of axis-aligned rectangles. Rectangle edges should sit on any kinks
//! of the integrand.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::sum::compensated_sum;

// Published 15-point Kronrod tables, kept at full printed precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Estimated absolute error, always `>= 0`.
    pub abs_error_estimate: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
    /// `false` when the subdivision budget ran out before the tolerance was met.
    pub converged: bool,
}

/// An axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }
}

/// Settings for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Highest angular frequency present in the integrand, if known.
    pub max_frequency: Option<f64>,
    /// Bisections allowed beyond the initial panels.
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_frequency: None,
            max_subdivisions: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    // Largest error first; earlier panels win ties.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for (j, (&x, &w)) in XGK[..7].iter().zip(WGK[..7].iter()).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += w * (f1 + f2);
        abs_sum += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error, abs_sum * half.abs())
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Quadrature {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn max_frequency(mut self, omega: f64) -> Self {
        self.max_frequency = if omega > 0.0 && omega.is_finite() {
            Some(omega)
        } else {
            None
        };
        self
    }

    pub fn max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    fn initial_panels(&self, a: f64, b: f64) -> usize {
        match self.max_frequency {
            Some(w) => {
                let n = ((b - a).abs() * w / std::f64::consts::PI).ceil();
                (n as usize).clamp(1, 1_000_000)
            }
            None => 1,
        }
    }

    /// Integrates `f` over `[a, b]`. Reversed limits negate the result.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> QuadratureResult {
        if a == b {
            return QuadratureResult {
                value: 0.0,
                abs_error_estimate: 0.0,
                evaluations: 0,
                converged: true,
            };
        }
        if a > b {
            let r = self.integrate(f, b, a);
            return QuadratureResult {
                value: -r.value,
                ..r
            };
        }

        let n0 = self.initial_panels(a, b);
        let width = (b - a) / n0 as f64;
        let mut heap = BinaryHeap::with_capacity(n0 + 16);
        let mut total = 0.0;
        let mut total_err = 0.0;
        let mut total_abs = 0.0;
        let mut seq = 0usize;
        for i in 0..n0 {
            let pa = a + width * i as f64;
            let pb = if i + 1 == n0 {
                b
            } else {
                a + width * (i + 1) as f64
            };
            let (value, error, abs_value) = kronrod_panel(&f, pa, pb);
            total += value;
            total_err += error;
            total_abs += abs_value;
            heap.push(Panel {
                a: pa,
                b: pb,
                value,
                error,
                abs_value,
                seq,
            });
            seq += 1;
        }
        let mut evaluations = 15 * n0;

        let roundoff = |abs_total: f64| 50.0 * f64::EPSILON * abs_total;
        let target = |total: f64, abs_total: f64| {
            self.abs_tol
                .max(self.rel_tol * total.abs())
                .max(roundoff(abs_total))
        };

        let mut converged = total_err <= target(total, total_abs);
        let mut splits = 0;
        while !converged && splits < self.max_subdivisions {
            let worst = heap.pop().expect("panel heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Panel cannot be split further in floating point.
                heap.push(worst);
                break;
            }
            let (v1, e1, r1) = kronrod_panel(&f, worst.a, mid);
            let (v2, e2, r2) = kronrod_panel(&f, mid, worst.b);
            evaluations += 30;
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
            total_abs += r1 + r2 - worst.abs_value;
            heap.push(Panel {
                a: worst.a,
                b: mid,
                value: v1,
                error: e1,
                abs_value: r1,
                seq,
            });
            heap.push(Panel {
                a: mid,
                b: worst.b,
                value: v2,
                error: e2,
                abs_value: r2,
                seq: seq + 1,
            });
            seq += 2;
            splits += 1;
            converged = total_err.max(0.0) <= target(total, total_abs);
        }

        let mut panels = heap.into_vec();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value = compensated_sum(panels.iter().map(|p| p.value));
        let err = compensated_sum(panels.iter().map(|p| p.error));
        let abs_total = compensated_sum(panels.iter().map(|p| p.abs_value));
        QuadratureResult {
            value,
            abs_error_estimate: err.max(0.0),
            evaluations,
            converged: converged || err <= target(value, abs_total),
        }
    }

    /// Integrates `f(x, y)` over the union of `subdomains` by nested 1D
    /// integration, inner over `y`, outer over `x`.
    pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
        &self,
        f: F,
        subdomains: &[Rect],
    ) -> QuadratureResult {
        let inner_cfg = Quadrature {
            rel_tol: self.rel_tol * 1e-2,
            abs_tol: self.abs_tol * 1e-2,
            ..*self
        };
        let mut values = Vec::with_capacity(subdomains.len());
        let mut error = 0.0;
        let mut evaluations = 0;
        let mut converged = true;
        for r in subdomains {
            let inner_err = std::cell::Cell::new(0.0_f64);
            let inner_evals = std::cell::Cell::new(0usize);
            let inner_ok = std::cell::Cell::new(true);
            let outer = self.integrate(
                |x| {
                    let res = inner_cfg.integrate(|y| f(x, y), r.y0, r.y1);
                    inner_err.set(inner_err.get().max(res.abs_error_estimate));
                    inner_evals.set(inner_evals.get() + res.evaluations);
                    inner_ok.set(inner_ok.get() && res.converged);
                    res.value
                },
                r.x0,
                r.x1,
            );
            values.push(outer.value);
            error += outer.abs_error_estimate + (r.x1 - r.x0).abs() * inner_err.get();
            evaluations += inner_evals.get();
            converged &= outer.converged && inner_ok.get();
        }
        QuadratureResult {
            value: compensated_sum(values),
            abs_error_estimate: error,
            evaluations,
            converged,
        }
    }
}

/// Adaptive 1D quadrature of `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> QuadratureResult {
    Quadrature::with_rel_tol(rel_tol).integrate(f, a, b)
}

/// Adaptive 2D quadrature of `f` over a list of rectangles, summed.
pub fn integrate_2d_piecewise<F: Fn(f64, f64) -> f64>(
    f: F,
    subdomains: &[Rect],
    rel_tol: f64,
) -> QuadratureResult {
    Quadrature::with_rel_tol(rel_tol).integrate_2d(f, subdomains)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, exact for polynomials of
/// degree `2n − 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like starting guess, refined by Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
