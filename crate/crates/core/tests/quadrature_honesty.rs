use std::f64::consts::{E, PI};

use diracwalk_core::quadrature::{integrate_1d, integrate_1d_open, integrate_ball, integrate_ellipse};
use diracwalk_core::{IntegrationResult, IntegrationSpec, Method};

struct Case {
    name: &'static str,
    exact: f64,
    run: Box<dyn Fn(f64) -> IntegrationResult>,
}

fn gk(tol: f64) -> IntegrationSpec {
    IntegrationSpec::new(Method::Adaptive, tol)
}

fn de(tol: f64) -> IntegrationSpec {
    IntegrationSpec::new(Method::DoubleExponential, tol)
}

fn sp(tol: f64) -> IntegrationSpec {
    IntegrationSpec::new(Method::SphericalProduct, tol)
}

fn suite() -> Vec<Case> {
    let p = 0.3f64;
    vec![
        Case { name: "x^5", exact: 1.0 / 6.0, run: Box::new(|t| integrate_1d(|x| x.powi(5), 0.0, 1.0, &gk(t)).unwrap()) },
        Case { name: "exp", exact: E - 1.0, run: Box::new(|t| integrate_1d(f64::exp, 0.0, 1.0, &gk(t)).unwrap()) },
        Case { name: "sin", exact: 2.0, run: Box::new(|t| integrate_1d(f64::sin, 0.0, PI, &gk(t)).unwrap()) },
        Case {
            name: "lorentzian",
            exact: PI / 2.0,
            run: Box::new(|t| integrate_1d(|x| 1.0 / (1.0 + x * x), -1.0, 1.0, &gk(t)).unwrap()),
        },
        Case { name: "sqrt", exact: 2.0 / 3.0, run: Box::new(|t| integrate_1d(f64::sqrt, 0.0, 1.0, &gk(t)).unwrap()) },
        Case { name: "log", exact: -1.0, run: Box::new(|t| integrate_1d(f64::ln, 0.0, 1.0, &de(t)).unwrap()) },
        Case {
            name: "inv-sqrt",
            exact: 2.0,
            run: Box::new(|t| integrate_1d_open(|_, da, _| 1.0 / da.sqrt(), 0.0, 1.0, &de(t)).unwrap()),
        },
        Case {
            name: "arcsine",
            exact: PI,
            run: Box::new(|t| integrate_1d_open(|_, da, db| 1.0 / (da * db).sqrt(), -1.0, 1.0, &de(t)).unwrap()),
        },
        Case {
            name: "cos10",
            exact: 10f64.sin() / 10.0,
            run: Box::new(|t| integrate_1d(|x| (10.0 * x).cos(), 0.0, 1.0, &gk(t)).unwrap()),
        },
        Case {
            name: "kink",
            exact: 0.29,
            run: Box::new(|t| integrate_1d(|x| (x - 0.3).abs(), 0.0, 1.0, &gk(t).with_breakpoints(vec![0.3])).unwrap()),
        },
        Case {
            name: "gauss-odd",
            exact: (1.0 - (-4f64).exp()) / 2.0,
            run: Box::new(|t| integrate_1d(|x| x * (-x * x).exp(), 0.0, 2.0, &gk(t)).unwrap()),
        },
        Case {
            name: "runge",
            exact: 0.4 * 5f64.atan(),
            run: Box::new(|t| integrate_1d(|x| 1.0 / (1.0 + 25.0 * x * x), -1.0, 1.0, &gk(t)).unwrap()),
        },
        Case { name: "xlogx", exact: -0.25, run: Box::new(|t| integrate_1d(|x| x * x.ln(), 0.0, 1.0, &de(t)).unwrap()) },
        Case {
            name: "semicircle",
            exact: PI / 2.0,
            run: Box::new(|t| integrate_1d_open(|_, da, db| (da * db).sqrt(), -1.0, 1.0, &de(t)).unwrap()),
        },
        Case {
            name: "disk r^2",
            exact: PI / 2.0,
            run: Box::new(|t| integrate_ball(|x| x[0] * x[0] + x[1] * x[1], 2, 1.0, &sp(t)).unwrap()),
        },
        Case {
            name: "ball r^2",
            exact: 4.0 * PI / 5.0,
            run: Box::new(|t| integrate_ball(|x| x.iter().map(|v| v * v).sum(), 3, 1.0, &sp(t)).unwrap()),
        },
        Case {
            name: "ball 1/(1+r^2)",
            exact: 4.0 * PI - PI * PI,
            run: Box::new(|t| integrate_ball(|x| 1.0 / (1.0 + x.iter().map(|v| v * v).sum::<f64>()), 3, 1.0, &sp(t)).unwrap()),
        },
        Case {
            name: "4-ball r^2",
            exact: PI * PI / 3.0,
            run: Box::new(|t| integrate_ball(|x| x.iter().map(|v| v * v).sum(), 4, 1.0, &sp(t)).unwrap()),
        },
        Case {
            name: "ellipse v1^2",
            exact: PI * (p * (1.0 - p)).sqrt() * p / 4.0,
            run: Box::new(move |t| integrate_ellipse(|v| v[0] * v[0], p, &sp(t)).unwrap()),
        },
        Case {
            name: "polar DE x^2",
            exact: PI / 4.0,
            run: Box::new(|t| integrate_ball(|x| x[0] * x[0], 2, 1.0, &de(t).with_breakpoints(vec![1.0])).unwrap()),
        },
    ]
}

#[test]
fn error_estimates_are_honest() {
    let cases = suite();
    assert_eq!(cases.len(), 20);
    let mut honest = 0;
    for c in &cases {
        let r = (c.run)(1e-9);
        let true_err = (r.value - c.exact).abs();
        // an estimate at round-off level is honest if the true error is too
        let ok = true_err <= 3.0 * r.error || true_err <= 1e-14 * c.exact.abs().max(1.0);
        if ok {
            honest += 1;
        } else {
            eprintln!("{}: true {true_err:e} estimate {:e}", c.name, r.error);
        }
        assert!(true_err < 1e-7, "{}: {} vs {}", c.name, r.value, c.exact);
    }
    assert!(honest * 100 >= 95 * cases.len(), "{honest}/{} honest", cases.len());
}

#[test]
fn halving_tolerance_does_not_hurt() {
    for c in suite() {
        let coarse = ((c.run)(1e-6).value - c.exact).abs();
        let fine = ((c.run)(5e-7).value - c.exact).abs();
        assert!(fine <= coarse.max(1e-13), "{}: {fine:e} > {coarse:e}", c.name);
    }
}

#[test]
fn reruns_are_bit_identical() {
    for c in suite() {
        let a = (c.run)(1e-9);
        let b = (c.run)(1e-9);
        assert_eq!(a.value.to_bits(), b.value.to_bits(), "{}", c.name);
    }
    let mc = IntegrationSpec::new(Method::MonteCarlo, 1e-3).with_max_evals(200_000).with_seed(42);
    let a = integrate_ball(|x| x[0] * x[0], 4, 1.0, &mc).unwrap();
    let b = integrate_ball(|x| x[0] * x[0], 4, 1.0, &mc).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
}
