//! Bracketed root finding.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` until the bracket is narrower than `tol` or can no
/// longer be halved in floating point. Returns the endpoint with the smaller
/// residual.
pub fn find_root_bracketed<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if !(g_lo.is_finite() && g_hi.is_finite()) || g_lo.signum() == g_hi.signum() {
        return Err(Error::Bracket { lo, hi, g_lo, g_hi });
    }
    let mut best = (lo, g_lo.abs());
    if g_hi.abs() < best.1 {
        best = (hi, g_hi.abs());
    }
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid.abs() < best.1 {
            best = (mid, g_mid.abs());
        }
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let r = find_root_bracketed(|x| x - 2.0, 0.0, 10.0, 1e-14).unwrap();
        assert!((r - 2.0).abs() < 1e-13);
    }

    #[test]
    fn sine_root_is_pi() {
        let r = find_root_bracketed(f64::sin, 3.0, 4.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn cosine_has_no_root_between_three_and_four() {
        // cos stays below -0.65 on [3, 4]; its root nearest pi is 3pi/2.
        assert!(find_root_bracketed(f64::cos, 3.0, 4.0, 1e-15).is_err());
        let r = find_root_bracketed(f64::cos, 4.0, 5.0, 1e-15).unwrap();
        assert!((r - 1.5 * std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn missing_sign_change_is_an_error() {
        let err = find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn deterministic() {
        let a = find_root_bracketed(|x| x.exp() - 3.0, 0.0, 5.0, 1e-12).unwrap();
        let b = find_root_bracketed(|x| x.exp() - 3.0, 0.0, 5.0, 1e-12).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
