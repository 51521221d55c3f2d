use proptest::prelude::*;
use randfib::params::*;
use randfib::ModelCase::{self, Linear, NonLinear};

/// Nonnegative root of `c² x² + (p² + 2c(1-p-c)) x + (1-c-2p)(1-c)` on
/// `[0, 1]` by bisection, independent of the closed form.
fn quadratic_root(p: f64, c: f64) -> f64 {
    let f = |x: f64| {
        c * c * x * x + (p * p + 2.0 * c * (1.0 - p - c)) * x + (1.0 - c - 2.0 * p) * (1.0 - c)
    };
    if f(0.0) >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn golden_examples() {
    let inv_phi = 1.0 / PHI;
    for case in [Linear, NonLinear] {
        assert!((alpha_from_p(0.5, case).unwrap() - inv_phi).abs() < 1e-12);
        assert_eq!(alpha_from_p(1.0, case).unwrap(), 1.0);
        assert_eq!(p_from_alpha(1.0, case).unwrap(), 1.0);
    }
    assert_eq!(alpha_from_p(1.0 / 3.0, NonLinear).unwrap(), 0.5);
    assert!((p_from_alpha(0.5, NonLinear).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!((p_from_alpha(inv_phi, Linear).unwrap() - 0.5).abs() < 1e-12);
    assert!((survival_probability(0.5, Linear).unwrap() - inv_phi).abs() < 1e-12);
    assert_eq!(survival_probability(0.3, NonLinear).unwrap(), 0.0);
    assert_eq!(survival_probability(1.0, Linear).unwrap(), 1.0);
    assert!((compression_rate(inv_phi).unwrap() - 0.427051).abs() < 1e-6);
    assert_eq!(compression_rate(1.0).unwrap(), 1.0);
    assert_eq!(compression_rate(0.5).unwrap(), 0.0);
}

#[test]
fn built_params() {
    let b = build_params(1.0, Linear).unwrap();
    assert_eq!((b.alpha, b.p_r, b.sigma, b.mu_r), (1.0, 1.0, 1.0, 1.0));
    let b = build_params(0.2, NonLinear).unwrap();
    assert_eq!((b.alpha, b.p_r, b.sigma), (0.5, 0.0, 0.0));
    let b = build_params(0.5, Linear).unwrap();
    assert!((b.mu_r - 1.0 / (2.0 - 1.0 / PHI)).abs() < 1e-12);
}

#[test]
fn domain_errors() {
    for case in [Linear, NonLinear] {
        assert!(alpha_from_p(0.0, case).is_err());
        assert!(alpha_from_p(1.5, case).is_err());
        assert!(survival_probability(-0.1, case).is_err());
        assert!(p_from_alpha(0.49, case).is_err());
    }
    assert!(compression_rate(1.01).is_err());
}

#[test]
fn alpha_increases_with_p() {
    for case in [Linear, NonLinear] {
        let start = if case == Linear { 1 } else { 334 };
        let mut last = 0.0;
        for i in start..=1000 {
            let a = alpha_from_p(i as f64 / 1000.0, case).unwrap();
            assert!(a > last, "{case} at {i}");
            last = a;
        }
    }
}

#[test]
fn survival_vanishes_at_the_threshold() {
    let pr = survival_probability(1.0 / 3.0 + 1e-9, NonLinear).unwrap();
    assert!(pr < 1e-6);
}

fn any_case() -> impl Strategy<Value = ModelCase> {
    prop_oneof![Just(Linear), Just(NonLinear)]
}

proptest! {
    #[test]
    fn round_trip(alpha in 0.5001f64..=1.0, case in any_case()) {
        let p = p_from_alpha(alpha, case).unwrap();
        prop_assert!((alpha_from_p(p, case).unwrap() - alpha).abs() < 1e-12);
    }

    #[test]
    fn survival_solves_the_quadratic(p in 0.01f64..=1.0, case in any_case()) {
        let c = case.c(p);
        let pr = survival_probability(p, case).unwrap();
        prop_assert!((pr - quadratic_root(p, c)).abs() < 1e-9);
        if is_zero_regime(p, case) {
            return Ok(());
        }
        let q = c * c * pr * pr + (p * p + 2.0 * c * (1.0 - p - c)) * pr + (1.0 - c - 2.0 * p) * (1.0 - c);
        prop_assert!(q.abs() < 1e-12);
    }

    #[test]
    fn alpha_from_survival(p in 0.34f64..0.999, case in any_case()) {
        // 1 - p_R = (1/c)(1 - p/alpha)
        let c = case.c(p);
        let pr = survival_probability(p, case).unwrap();
        let a = alpha_from_p(p, case).unwrap();
        prop_assert!((1.0 - pr - (1.0 - p / a) / c).abs() < 1e-12);
        prop_assert!((a - p / (1.0 - c * (1.0 - quadratic_root(p, c)))).abs() < 1e-8);
    }

    #[test]
    fn params_invariants(p in 0.01f64..=1.0, case in any_case()) {
        let b = build_params(p, case).unwrap();
        prop_assert!((b.mu_r + b.mu_l - 1.0).abs() < 1e-15);
        prop_assert!((b.mu_r - 1.0 / (2.0 - b.alpha)).abs() < 1e-15);
        prop_assert!(b.p_1 <= b.p_r + 1e-15);
        prop_assert!((0.0..=1.0).contains(&b.sigma));
        prop_assert!((0.5..=1.0).contains(&b.alpha));
        if b.p_r > 0.0 {
            prop_assert!((b.p_1 / b.p_r - b.alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_is_a_difference_quotient(p in 0.35f64..0.99, case in any_case()) {
        let h = 1e-6;
        let fd = (alpha_from_p(p + h, case).unwrap() - alpha_from_p(p - h, case).unwrap()) / (2.0 * h);
        prop_assert!((dalpha_dp(p, case).unwrap() - fd).abs() < 1e-6);
    }
}
