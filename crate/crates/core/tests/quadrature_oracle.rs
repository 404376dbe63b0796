//! Error-estimate honesty of the adaptive quadrature on integrands with
//! known antiderivatives.

use gravdec::quadrature::Quadrature;

type Case = (&'static str, fn(f64) -> f64, f64, f64, f64, Option<f64>);

fn suite() -> Vec<Case> {
    vec![
        ("x^5", |x| x.powi(5), 0.0, 1.0, 1.0 / 6.0, None),
        ("exp", f64::exp, 0.0, 3.0, 3f64.exp() - 1.0, None),
        ("sin", f64::sin, 0.0, std::f64::consts::PI, 2.0, None),
        (
            "cos 20x",
            |x| (20.0 * x).cos(),
            0.0,
            2.0,
            (40f64).sin() / 20.0,
            Some(20.0),
        ),
        (
            "1/(1+x^2)",
            |x| 1.0 / (1.0 + x * x),
            -5.0,
            5.0,
            2.0 * 5f64.atan(),
            None,
        ),
        ("sqrt", f64::sqrt, 0.0, 4.0, 16.0 / 3.0, None),
        ("ln", f64::ln, 1.0, 2.0, 2.0 * 2f64.ln() - 1.0, None),
        (
            "x exp(-x)",
            |x| x * (-x).exp(),
            0.0,
            10.0,
            1.0 - 11.0 * (-10f64).exp(),
            None,
        ),
        ("|x|", f64::abs, -1.0, 2.0, 2.5, None),
        (
            "gauss",
            |x| (-x * x).exp(),
            -6.0,
            6.0,
            std::f64::consts::PI.sqrt(),
            None,
        ),
        (
            "x^2 sin 50x",
            |x| x * x * (50.0 * x).sin(),
            0.0,
            1.0,
            (2.0 * 50f64.sin() / 2500.0) + (2.0 / 50f64.powi(3) - 1.0 / 50.0) * 50f64.cos()
                - 2.0 / 50f64.powi(3),
            Some(50.0),
        ),
        ("1/x", |x| 1.0 / x, 1.0, 100.0, 100f64.ln(), None),
        ("cosh", f64::cosh, -1.0, 1.0, 2.0 * 1f64.sinh(), None),
        ("tanh", f64::tanh, 0.0, 5.0, 5f64.cosh().ln(), None),
        ("x^(3/2)", |x| x.powf(1.5), 0.0, 1.0, 0.4, None),
        (
            "sin^2",
            |x| x.sin().powi(2),
            0.0,
            10.0,
            5.0 - (20f64).sin() / 4.0,
            Some(2.0),
        ),
        (
            "poly7",
            |x| 7.0 * x.powi(6) - 3.0 * x * x + 1.0,
            -1.0,
            1.0,
            2.0,
            None,
        ),
        (
            "exp(-x) cos 5x",
            |x| (-x).exp() * (5.0 * x).cos(),
            0.0,
            8.0,
            {
                let t = 8.0f64;
                ((-t).exp() * (5.0 * (5.0 * t).sin() - (5.0 * t).cos()) + 1.0) / 26.0
            },
            Some(5.0),
        ),
        ("1/sqrt(x)", |x| 1.0 / x.sqrt(), 1e-8, 1.0, 2.0 - 2e-4, None),
        (
            "x^5 cos x",
            |x| x.powi(5) * x.cos(),
            0.0,
            std::f64::consts::PI,
            {
                let x = std::f64::consts::PI;
                (5.0 * x.powi(4) - 60.0 * x * x + 120.0) * x.cos()
                    + x * (x.powi(4) - 20.0 * x * x + 120.0) * x.sin()
                    - 120.0
            },
            Some(1.0),
        ),
    ]
}

fn run(case: &Case, rel_tol: f64) -> (f64, f64) {
    let (_, f, a, b, _, omega) = *case;
    let mut q = Quadrature::with_rel_tol(rel_tol);
    if let Some(w) = omega {
        q = q.max_frequency(w);
    }
    let r = q.integrate(f, a, b);
    assert!(r.abs_error_estimate >= 0.0);
    (r.value, r.abs_error_estimate)
}

#[test]
fn error_estimates_are_conservative() {
    for case in suite() {
        let (value, est) = run(&case, 1e-8);
        let err = (value - case.4).abs();
        // A zero estimate is allowed only when the result is exact to rounding.
        let bound = 10.0 * est + 1e-14 * case.4.abs().max(1.0);
        assert!(err <= bound, "{}: error {err:e}, estimate {est:e}", case.0);
    }
}

#[test]
fn tighter_tolerance_never_hurts() {
    for case in suite() {
        let mut prev = f64::INFINITY;
        for &tol in &[1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11] {
            let (value, _) = run(&case, tol);
            let err = (value - case.4).abs();
            let floor = 1e-14 * case.4.abs().max(1.0);
            assert!(
                err <= prev.max(floor),
                "{} at tol {tol:e}: {err:e} > {prev:e}",
                case.0
            );
            prev = err.max(floor);
        }
    }
}
