use super::*;
use core::f64::consts::PI;
use proptest::prelude::*;

fn cfg() -> QuadConfig {
    QuadConfig::default()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn unit_exponential() {
    let r = integrate_decaying(|x| libm::exp(-x), 1.0, &cfg()).unwrap();
    assert!(r.converged);
    assert!(r.evaluations > 0);
    assert!(rel(r.value, 1.0) < 1e-8);
}

#[test]
fn gamma_kernels() {
    // Γ(4)/2⁴ and the three interaction kernels, integrated termwise by Γ(n+1)/2^(n+1)
    let cases: [(fn(f64) -> f64, f64); 4] = [
        (|x| x * x * x * libm::exp(-2.0 * x), 3.0 / 8.0),
        (
            |x| (x * x * x * x + 2.0 * x * x * x + 5.0 * x * x + 6.0 * x + 3.0) * libm::exp(-2.0 * x),
            23.0 / 4.0,
        ),
        (|x| (3.0 * x * x + 4.0 * x + 2.0) * libm::exp(-2.0 * x), 11.0 / 4.0),
        (
            |x| (-x * x * x * x + 4.0 * x * x * x + 8.0 * x * x + 8.0 * x + 4.0) * libm::exp(-2.0 * x),
            27.0 / 4.0,
        ),
    ];
    for (f, exact) in cases {
        let r = integrate_decaying(f, 0.5, &cfg()).unwrap();
        assert!(r.converged);
        assert!(rel(r.value, exact) < 1e-8, "{} vs {exact}", r.value);
        assert!(r.abs_error_estimate <= 1e-8 * r.value.abs());
    }
}

#[test]
fn principal_value_exponential_integral() {
    // P∫₀^∞ e^{-x}/(x-1) dx = -Ei(1)/e, 40-digit mpmath reference
    let reference = -0.697_174_883_235_066_068_765_478_7;
    let r = integrate_principal_value(|x| libm::exp(-x) / (x - 1.0), 1.0, Domain::Decaying { decay_scale: 1.0 }, &cfg())
        .unwrap();
    assert!(r.converged);
    assert!(rel(r.value, reference) < 1e-7, "{}", r.value);
}

#[test]
fn principal_value_without_pole_matches_plain() {
    let f = |x: f64| x * libm::exp(-x);
    let pv = integrate_principal_value(f, 2.0, Domain::Decaying { decay_scale: 1.0 }, &cfg()).unwrap();
    let plain = integrate_decaying(f, 1.0, &cfg()).unwrap();
    assert!(rel(pv.value, plain.value) < 1e-8);
}

#[test]
fn odd_about_pole_vanishes() {
    let p = 3.0;
    let f = |x: f64| 1.0 / (x - p) + libm::pow(x - p, 3.0) + libm::sin(x - p);
    let r = integrate_principal_value(f, p, Domain::Finite { upper: 2.0 * p }, &cfg()).unwrap();
    assert!(r.value.abs() < 1e-12, "{}", r.value);
}

#[test]
fn principal_value_pole_near_finite_upper_end() {
    // P∫₀^b dx/(x-p) = ln((b-p)/p)
    let (p, b) = (1.0, 1.001);
    let r = integrate_principal_value(|x| 1.0 / (x - p), p, Domain::Finite { upper: b }, &cfg()).unwrap();
    assert!(rel(r.value, libm::log((b - p) / p)) < 1e-10);
    assert!(matches!(
        integrate_principal_value(|x| 1.0 / (x - p), p, Domain::Finite { upper: p }, &cfg()),
        Err(QuadError::PoleOnBoundary { .. })
    ));
    assert!(integrate_principal_value(|x| x, -1.0, Domain::Finite { upper: 2.0 }, &cfg()).is_err());
}

#[test]
fn non_finite_residue_is_an_error() {
    let f = |x: f64| if (x - 1.0).abs() < 0.2 { 1e308 / (x - 1.0) / (x - 1.0) } else { 0.0 };
    let err = integrate_principal_value(f, 1.0, Domain::Finite { upper: 3.0 }, &cfg()).unwrap_err();
    assert!(matches!(err, QuadError::ResidueNotFinite { .. } | QuadError::NonFinite { .. }));
}

#[test]
fn algebraic_tail() {
    let r = integrate_algebraic(|x| 1.0 / ((1.0 + x * x) * (1.0 + x * x)), 1.0, &cfg()).unwrap();
    assert!(rel(r.value, PI / 4.0) < 1e-10);
    // dimensional version: ∫ ω₀⁴/(ω₀² + u²)² du = π ω₀ / 4
    let w0 = 1.55e16;
    let r = integrate_algebraic(
        |u| {
            let d = w0 * w0 + u * u;
            w0 * w0 / d * (w0 * w0 / d)
        },
        w0,
        &cfg(),
    )
    .unwrap();
    assert!(rel(r.value, PI * w0 / 4.0) < 1e-9);
}

#[test]
fn nan_integrand_is_a_hard_error() {
    let err = integrate_decaying(|x| if x > 3.0 && x < 4.0 { f64::NAN } else { libm::exp(-x) }, 1.0, &cfg())
        .unwrap_err();
    match err {
        QuadError::NonFinite { x, .. } => assert!(x > 3.0 && x < 4.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn budget_exhaustion_is_flagged() {
    let tight = cfg().with_max_evaluations(100).with_rel_tol(1e-14);
    let r = integrate_finite(|x| libm::sqrt(x) * libm::sin(50.0 * x), 0.0, 10.0, &tight).unwrap();
    assert!(!r.converged);
    assert!(r.abs_error_estimate > 0.0);
}

#[test]
fn invalid_configs_rejected() {
    let bad = [
        QuadConfig { rel_tol: 0.0, ..cfg() },
        QuadConfig { rel_tol: 1.0, ..cfg() },
        QuadConfig {
            max_evaluations: 99,
            ..cfg()
        },
        QuadConfig {
            tail_truncation_threshold: 0.0,
            ..cfg()
        },
    ];
    for c in bad {
        assert!(matches!(integrate_finite(|x| x, 0.0, 1.0, &c), Err(QuadError::InvalidConfig(_))));
    }
}

#[test]
fn reversed_limits_flip_sign() {
    let a = integrate_finite(|x| x * x, 0.0, 2.0, &cfg()).unwrap();
    let b = integrate_finite(|x| x * x, 2.0, 0.0, &cfg()).unwrap();
    assert_eq!(a.value, -b.value);
    assert!(rel(a.value, 8.0 / 3.0) < 1e-14);
}

#[test]
fn deterministic() {
    let f = |x: f64| libm::exp(-x) / (x - 0.7) + libm::cos(x) * libm::exp(-x);
    let a = integrate_principal_value(f, 0.7, Domain::Decaying { decay_scale: 1.0 }, &cfg()).unwrap();
    let b = integrate_principal_value(f, 0.7, Domain::Decaying { decay_scale: 1.0 }, &cfg()).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.evaluations, b.evaluations);
}

proptest! {
    #[test]
    fn linearity(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, k in 0.5f64..4.0) {
        let f = move |x: f64| x * x * libm::exp(-k * x);
        let g = move |x: f64| libm::cos(x) * libm::exp(-x);
        let combined = integrate_decaying(|x| alpha * f(x) + beta * g(x), 1.0 / k.min(1.0), &cfg()).unwrap();
        let separate = alpha * integrate_decaying(f, 1.0 / k, &cfg()).unwrap().value
            + beta * integrate_decaying(g, 1.0, &cfg()).unwrap().value;
        let scale = alpha.abs() * 2.0 / (k * k * k) + beta.abs() * 0.5;
        prop_assert!((combined.value - separate).abs() <= 1e-7 * scale);
    }

    #[test]
    fn interval_splitting(split in 0.05f64..20.0) {
        let f = |x: f64| (1.0 + x) * libm::exp(-0.5 * x);
        let whole = integrate_decaying(f, 2.0, &cfg()).unwrap().value;
        let head = integrate_finite(f, 0.0, split, &cfg()).unwrap().value;
        // tail ∫_s^∞ f = shift x → x + s
        let tail = integrate_decaying(|x| f(x + split), 2.0, &cfg()).unwrap().value;
        prop_assert!(((head + tail) - whole).abs() <= 1e-8 * whole.abs());
    }

    #[test]
    fn pole_subtraction_consistency(r in -5.0f64..5.0, p in 0.2f64..5.0, upper_over_p in 1.3f64..6.0) {
        // f = smooth + r/(x - p) on [0, b]: PV = ∫ smooth + r ln((b - p)/p)
        let b = upper_over_p * p;
        let smooth = |x: f64| libm::exp(-x) * (1.0 + x);
        let pv = integrate_principal_value(|x| smooth(x) + r / (x - p), p, Domain::Finite { upper: b }, &cfg())
            .unwrap()
            .value;
        let expected = integrate_finite(smooth, 0.0, b, &cfg()).unwrap().value + r * libm::log((b - p) / p);
        let scale = expected.abs().max(r.abs());
        prop_assert!((pv - expected).abs() <= 1e-7 * scale, "{} vs {}", pv, expected);
    }
}
