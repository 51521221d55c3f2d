use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use randfib::cfrac::{ExtendedRational, SternBrocotInterval};
use randfib::lyapunov::{gamma_of_p, log_integral};
use randfib::measure::{mass_of_interval, SplitRule};
use randfib::montecarlo::*;
use randfib::params::{build_params, PHI};
use randfib::words::{label_trace, Letter, SignWord, TreeKind};
use randfib::ModelCase::{self, Linear, NonLinear};

fn z(estimate: f64, expected: f64, stderr: f64) -> f64 {
    (estimate - expected).abs() / stderr.max(1e-300)
}

/// `log max(|F_(n-1)|, |F_n|)` from exact labels.
fn exact_log_norm(letters: &[Letter], case: ModelCase) -> f64 {
    let tree = if case == Linear {
        TreeKind::T
    } else {
        TreeKind::Ttilde
    };
    let t = label_trace(&SignWord::new(letters.to_vec()), tree).unwrap();
    let n = t.len();
    let big = t[n - 1].magnitude().max(t[n - 2].magnitude()).clone();
    let bits = big.bits();
    if bits <= 1000 {
        BigInt::from(big).to_f64().unwrap().ln()
    } else {
        let shift = bits - 60;
        BigInt::from(big >> shift).to_f64().unwrap().ln() + shift as f64 * 2f64.ln()
    }
}

#[test]
fn seeds_are_reproducible() {
    let spec = RngSpec::new(2024);
    assert_eq!(spec.algorithm, "chacha8");
    let a = estimate_reduction(0.6, Linear, 20_000, &spec).unwrap();
    let b = estimate_reduction(0.6, Linear, 20_000, &spec).unwrap();
    assert_eq!(a, b);
    let c = simulate_growth(0.6, Linear, 20_000, &RngSpec::new(2025)).unwrap();
    assert_ne!(c, simulate_growth(0.6, Linear, 20_000, &spec).unwrap());
}

#[test]
fn growth_is_fibonacci_at_p_one() {
    for case in [Linear, NonLinear] {
        let g = simulate_growth(1.0, case, 10_000, &RngSpec::new(5)).unwrap();
        assert!((g.estimate - PHI.ln()).abs() < 1e-3);
    }
}

#[test]
fn estimators_near_closed_forms() {
    let spec = RngSpec::new(11);
    for (p, case) in [(0.6, Linear), (0.7, NonLinear)] {
        let e = estimate_reduction(p, case, 200_000, &spec).unwrap();
        let b = build_params(p, case).unwrap();
        assert!(z(e.p_r_hat, b.p_r, e.stderrs.p_r) < 4.0, "{p} {case} pR");
        assert!(
            z(e.sigma_hat, b.sigma, e.stderrs.sigma) < 4.0,
            "{p} {case} sigma"
        );
        assert!(
            z(e.alpha_hat, b.alpha, e.stderrs.alpha) < 4.0,
            "{p} {case} alpha"
        );
        assert!(
            z(e.mu_r_hat, b.mu_r, e.stderrs.mu_r) < 4.0,
            "{p} {case} muR"
        );
        let g = simulate_growth(p, case, 200_000, &spec).unwrap();
        let gamma = gamma_of_p(p, case, 1e-6).unwrap().gamma;
        assert!(
            (g.estimate - gamma).abs() < 4.0 * g.stderr + 1e-3,
            "{p} {case} growth"
        );
    }
}

#[test]
fn ergodic_average_of_log() {
    let a = 0.7;
    let li = log_integral(a, SplitRule::Standard, 1e-7).unwrap();
    let mu_r = 1.0 / (2.0 - a);
    // R steps land in [1, ∞] with law nu restricted there and rescaled, L steps in [0, 1]
    let expected = (1.0 - mu_r) / (1.0 - a) * li.below1.value + mu_r / a * li.above1.value;
    let avg = ergodic_average(a, 400_000, &RngSpec::new(3), Integrand::Log).unwrap();
    assert!(
        z(avg.estimate, expected, avg.stderr) < 4.0,
        "{} vs {expected}",
        avg.estimate
    );

    let upper = SternBrocotInterval {
        lo: ExtendedRational::new(1, 1).unwrap(),
        hi: ExtendedRational::INFINITY,
        rank: 1,
    };
    let avg = ergodic_average(a, 400_000, &RngSpec::new(4), Integrand::Indicator(upper)).unwrap();
    assert!(z(avg.estimate, mu_r, avg.stderr) < 4.0);
    assert!(ergodic_average(0.5, 1000, &RngSpec::new(1), Integrand::Log).is_err());
}

#[test]
fn nd_limit_uniform_at_one_half() {
    let freqs = nd_limit_sample(0.5, 3, 40_000, &RngSpec::new(9)).unwrap();
    assert_eq!(freqs.len(), 8);
    for f in &freqs {
        assert!(z(f.frequency, 0.125, f.stderr) < 4.0, "{}", f.interval);
    }
}

#[test]
fn nd_limit_follows_the_measure() {
    let alpha = BigRational::new(BigInt::from(7), BigInt::from(10));
    let freqs = nd_limit_sample(0.7, 2, 40_000, &RngSpec::new(10)).unwrap();
    let total: f64 = freqs.iter().map(|f| f.frequency).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for f in &freqs {
        let m = mass_of_interval(&alpha, &f.interval)
            .unwrap()
            .to_f64()
            .unwrap();
        assert!(z(f.frequency, m, f.stderr) < 4.0, "{}", f.interval);
    }
}

#[test]
fn stopping_times() {
    let s = stopping_time_stats(1.0, 2000, &RngSpec::new(1)).unwrap();
    assert_eq!(s.histogram, [(1, s.gaps)]);
    assert_eq!(s.expected, 1.0);
    let s = stopping_time_stats(0.6, 200_000, &RngSpec::new(2)).unwrap();
    assert!(
        z(s.mean, s.expected, s.stderr) < 4.0,
        "{} vs {}",
        s.mean,
        s.expected
    );
    // gaps are 1 or 1 + 3j, since deletions remove three letters
    assert!(s.histogram.iter().all(|&(g, _)| g % 3 == 1));
}

#[test]
fn coupling_holds() {
    let spec = RngSpec::new(6);
    assert!(coupling_check(0.3, 0.6, 100, 500, &spec).unwrap());
    assert!(coupling_check(0.5, 0.5, 100, 100, &spec).unwrap());
    assert!(coupling_check(0.6, 0.3, 10, 10, &spec).is_err());
}

#[test]
fn report_z_score() {
    let r = McReport::new(1.1, 0.05, 100, 1, 0, Some(1.0));
    assert!((r.z_score.unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(McReport::new(1.0, 0.1, 1, 1, 0, None).z_score, None);
}

fn letters(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop_oneof![Just(Letter::R), Just(Letter::L)], 0..max)
}

proptest! {
    #[test]
    fn tracked_norm_matches_exact_labels(word in letters(500), linear in any::<bool>()) {
        let case = if linear { Linear } else { NonLinear };
        let exact = exact_log_norm(&word, case);
        let tracked = log_norm_of(&word, case);
        prop_assert!((exact - tracked).abs() <= 1e-9 * exact.abs().max(1.0), "{exact} vs {tracked}");
    }

    #[test]
    fn incremental_state_agrees(word in letters(300), linear in any::<bool>()) {
        let case = if linear { Linear } else { NonLinear };
        let mut st = GrowthState::new(case);
        for &l in &word {
            st.push(l);
        }
        prop_assert_eq!(st.log_norm(), log_norm_of(&word, case));
    }
}
