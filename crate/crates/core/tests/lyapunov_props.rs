use randfib::lyapunov::*;
use randfib::measure::{refine_nu_alpha, ChiTable, RefinementPolicy};
use randfib::params::{dalpha_dp, PHI};
use randfib::ModelCase::{Linear, NonLinear};

const VISWANATH: f64 = 1.131_988_24;

#[test]
fn known_values() {
    let lin = gamma_of_p(0.5, Linear, 1e-7).unwrap();
    assert!(
        (lin.gamma.exp() - VISWANATH).abs() < 1e-6,
        "{}",
        lin.gamma.exp()
    );
    for case in [Linear, NonLinear] {
        let g = gamma_of_p(1.0, case, 1e-9).unwrap();
        assert!((g.gamma - PHI.ln()).abs() < 1e-12);
    }
    let half = gamma_of_alpha(0.5, 1e-9).unwrap();
    assert!(half.gamma.abs() <= half.error_bound && half.error_bound <= 1e-9);
    let zero = gamma_of_p(0.25, NonLinear, 1e-9).unwrap();
    assert_eq!((zero.gamma, zero.method), (0.0, Method::ZeroRegime));
}

#[test]
fn continuous_past_the_threshold() {
    let g = gamma_of_p(1.0 / 3.0 + 1e-3, NonLinear, 1e-6).unwrap();
    assert!(g.gamma >= 0.0 && g.gamma < 1e-2, "{}", g.gamma);
}

#[test]
fn antisymmetry_without_the_shortcut() {
    for a in [0.55, 0.7, 0.9] {
        let tol = 1e-6;
        let g = gamma_quadrature(a, tol).unwrap();
        let h = gamma_quadrature(1.0 - a, tol).unwrap();
        assert!((g.gamma + h.gamma).abs() <= 2.0 * tol, "{a}");
    }
}

#[test]
fn gamma_increases_with_alpha() {
    let mut last = f64::NEG_INFINITY;
    for i in 0..=10 {
        let a = 0.5 + 0.05 * i as f64;
        let g = gamma_of_alpha(a, 1e-6).unwrap().gamma;
        assert!(g > last, "{a}");
        last = g;
    }
}

#[test]
fn split_ratios() {
    let (below, above) = split_ratios_closed_form(0.7);
    assert!((below + 1.275).abs() < 1e-12 && (above - 2.275).abs() < 1e-12);
    for a in [0.6, 0.8] {
        let (b, t) = gamma_split_check(a, 1e-7).unwrap();
        let (cb, ct) = split_ratios_closed_form(a);
        assert!(
            (b - cb).abs() < 1e-5 && (t - ct).abs() < 1e-5,
            "{a}: {b} {t}"
        );
    }
}

/// The inner integral over y in closed form through psi(t) = E log(1 + tY),
/// then a fine mediant sum over x.
fn double_integral_via_psi(alpha: f64) -> f64 {
    let table = ChiTable::build(alpha, 1.0 / 256.0).unwrap();
    let psi = |t: f64| {
        let (lo, hi) = table.psi(t);
        0.5 * (lo + hi)
    };
    let m = refine_nu_alpha(alpha, RefinementPolicy::default().with_mass_threshold(1e-6)).unwrap();
    m.leaves
        .iter()
        .map(|l| {
            let q = l.interval.mediant();
            let x = q.num as f64 / q.den as f64;
            let inner = (x / (1.0 + x)).ln() + psi((1.0 + x) / x) - psi(1.0 / (1.0 + x));
            l.mass * inner
        })
        .sum()
}

#[test]
fn double_integral_matches_the_psi_route() {
    for a in [0.6, 0.8] {
        let d = double_integral(a).unwrap();
        let oracle = double_integral_via_psi(a);
        assert!((d - oracle).abs() < 1e-4, "{a}: {d} vs {oracle}");
    }
}

#[test]
fn derivative_matches_finite_differences() {
    let h = 1e-3;
    for a in [0.6, 0.75, 0.9] {
        let fd = (gamma_quadrature(a + h, 1e-8).unwrap().gamma
            - gamma_quadrature(a - h, 1e-8).unwrap().gamma)
            / (2.0 * h);
        let d = gamma_prime(a, 1e-8).unwrap();
        assert!((d - fd).abs() < 1e-3, "{a}: {d} vs {fd}");
    }
    assert!(gamma_prime(0.5005, 1e-6).is_err());
}

#[test]
fn slope_at_the_dirac_end() {
    let expected = 5f64.ln() / 2.0;
    assert!(
        (gamma_prime(1.0, 1e-9).unwrap() * dalpha_dp(1.0, Linear).unwrap() - expected).abs() < 1e-9
    );
    for case in [Linear, NonLinear] {
        assert!((dgamma_dp_at_1(case).unwrap() - expected).abs() < 1e-9);
        let h = 1e-3;
        let fd = (gamma_of_p(1.0, case, 1e-8).unwrap().gamma
            - gamma_of_p(1.0 - h, case, 1e-8).unwrap().gamma)
            / h;
        assert!((fd - expected).abs() < 1e-2, "{case}: {fd}");
    }
}

#[test]
fn furstenberg_route_agrees() {
    for p in [0.5, 0.7] {
        let f = gamma_via_nu_f(p, 1e-6).unwrap();
        let g = gamma_of_p(p, Linear, 1e-7).unwrap();
        assert!(
            (f.gamma - g.gamma).abs() <= 2e-6,
            "{p}: {} vs {}",
            f.gamma,
            g.gamma
        );
    }
}

#[test]
fn curve_rows() {
    let rows = gamma_curve(NonLinear, &[0.1, 0.2, 0.3, 1.0], 1e-6).unwrap();
    assert!(rows[..3].iter().all(|r| r.gamma == 0.0 && r.alpha == 0.5));
    assert!((rows[3].gamma - PHI.ln()).abs() < 1e-12);
    assert!(gamma_curve(Linear, &[0.0], 1e-6).is_err());
    assert!(gamma_of_p(0.5, Linear, 0.0).is_err());
}
