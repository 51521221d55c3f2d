//! Simulation checks: growth rates, reduction statistics, ergodic averages
//! of the label ratio, the limit law of `n/d`, and the monotone coupling.
//!
//! Every estimator splits its work into [`BATCHES`] independent streams of a
//! seeded ChaCha8 generator, so results depend only on the seed and the
//! standard errors come from batch means.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cfrac::{ExtendedRational, SternBrocotInterval};
use crate::error::{Error, Result};
use crate::measure::intervals_up_to;
use crate::params::{alpha_from_p, compression_rate, is_zero_regime, ModelCase};
use crate::words::{Letter, Reducer};

/// Number of independent batches behind every standard error.
pub const BATCHES: usize = 20;

/// Seed plus generator name; equal specs give identical trajectories.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub algorithm: String,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec {
            seed,
            algorithm: "chacha8".to_string(),
        }
    }

    /// Independent generator number `stream` for this seed.
    pub fn stream(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn draw(rng: &mut ChaCha8Rng, p: f64) -> Letter {
    if rng.gen::<f64>() < p {
        Letter::R
    } else {
        Letter::L
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} is not in (0, 1]")))
    }
}

/// Mean and standard error of the mean.
fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

const EXACT_LIMIT: i128 = 1 << 120;
const BACK_TO_EXACT: f64 = 60.0 * std::f64::consts::LN_2;

/// The pair `(F(n-1), F(n))`, exact while small and in scaled floating point
/// otherwise.
#[derive(Debug, Clone, Copy)]
enum Pair {
    Exact(i128, i128),
    /// `(x, y)·exp(scale)` with `max(|x|, |y|)` kept near 1.
    Scaled(f64, f64, f64),
}

/// Label recursion tracking `log max(|F(n-1)|, |F(n)|)`.
#[derive(Debug, Clone, Copy)]
pub struct GrowthState {
    case: ModelCase,
    pair: Pair,
}

impl GrowthState {
    pub fn new(case: ModelCase) -> Self {
        GrowthState {
            case,
            pair: Pair::Exact(1, 1),
        }
    }

    pub fn push(&mut self, letter: Letter) {
        let abs = self.case == ModelCase::NonLinear;
        self.pair = match self.pair {
            Pair::Exact(x, y) => {
                let mut z = match letter {
                    Letter::R => y + x,
                    Letter::L => y - x,
                };
                if abs {
                    z = z.abs();
                }
                if z.abs() > EXACT_LIMIT {
                    let m = z.abs() as f64;
                    Pair::Scaled(y as f64 / m, z as f64 / m, m.ln())
                } else {
                    Pair::Exact(y, z)
                }
            }
            Pair::Scaled(x, y, s) => {
                let mut z = match letter {
                    Letter::R => y + x,
                    Letter::L => y - x,
                };
                if abs {
                    z = z.abs();
                }
                let m = y.abs().max(z.abs());
                let s = s + m.ln();
                if s < BACK_TO_EXACT {
                    let k = s.exp();
                    Pair::Exact((y / m * k).round() as i128, (z / m * k).round() as i128)
                } else {
                    Pair::Scaled(y / m, z / m, s)
                }
            }
        };
    }

    /// `log max(|F(n-1)|, |F(n)|)`.
    pub fn log_norm(&self) -> f64 {
        match self.pair {
            Pair::Exact(x, y) => (x.abs().max(y.abs()) as f64).ln(),
            Pair::Scaled(x, y, s) => s + x.abs().max(y.abs()).ln(),
        }
    }
}

/// `log max(|F(n-1)|, |F(n)|)` after feeding a whole word.
pub fn log_norm_of(letters: &[Letter], case: ModelCase) -> f64 {
    let mut g = GrowthState::new(case);
    for &l in letters {
        g.push(l);
    }
    g.log_norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    /// `(1/n) log max(|F(n-1)|, |F(n)|)`.
    pub estimate: f64,
    pub n: usize,
    pub stderr: f64,
    pub p: f64,
    pub case: ModelCase,
}

/// One trajectory of `n` steps, split into consecutive batches for the
/// standard error.
pub fn simulate_growth(p: f64, case: ModelCase, n: usize, rng: &RngSpec) -> Result<GrowthEstimate> {
    check_p(p)?;
    if n < 2 {
        return Err(Error::Domain(format!("n = {n} must be at least 2")));
    }
    let mut r = rng.stream(0);
    let mut g = GrowthState::new(case);
    let batches = BATCHES.min(n);
    let mut rates = Vec::with_capacity(batches);
    let mut done = 0;
    let mut last = g.log_norm();
    for b in 0..batches {
        let end = n * (b + 1) / batches;
        for _ in done..end {
            g.push(draw(&mut r, p));
        }
        let now = g.log_norm();
        rates.push((now - last) / (end - done) as f64);
        last = now;
        done = end;
    }
    let (_, stderr) = mean_stderr(&rates);
    Ok(GrowthEstimate {
        estimate: last / n as f64,
        n,
        stderr,
        p,
        case,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionStderrs {
    pub p_r: f64,
    pub sigma: f64,
    pub alpha: f64,
    pub mu_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionEstimates {
    pub p_r_hat: f64,
    pub sigma_hat: f64,
    pub alpha_hat: f64,
    pub mu_r_hat: f64,
    pub stderrs: ReductionStderrs,
    pub n: usize,
}

struct ReplicateStats {
    p_r: f64,
    sigma: f64,
    alpha: f64,
    mu_r: f64,
}

fn replicate(p: f64, case: ModelCase, len: usize, mut rng: ChaCha8Rng) -> ReplicateStats {
    let mut red = Reducer::with_capacity(case, len);
    for _ in 0..len {
        red.push(draw(&mut rng, p));
    }
    let w = red.letters();
    let s = w.iter().filter(|&&l| l == Letter::R).count();
    let d = red.deletions();
    let (mut from_r, mut rr) = (0usize, 0usize);
    for pair in w.windows(2) {
        if pair[0] == Letter::R {
            from_r += 1;
            if pair[1] == Letter::R {
                rr += 1;
            }
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    ReplicateStats {
        p_r: ratio(s, s + d),
        sigma: ratio(w.len(), len),
        alpha: ratio(rr, from_r),
        mu_r: ratio(s, w.len()),
    }
}

/// Survival, compression and transition frequencies from [`BATCHES`]
/// independent words of length `n / BATCHES`.
pub fn estimate_reduction(
    p: f64,
    case: ModelCase,
    n: usize,
    rng: &RngSpec,
) -> Result<ReductionEstimates> {
    check_p(p)?;
    if is_zero_regime(p, case) {
        return Err(Error::Regime(format!(
            "p = {p}: the reduced non-linear word does not grow for p <= 1/3"
        )));
    }
    let len = n / BATCHES;
    if len < 3 {
        return Err(Error::Domain(format!(
            "n = {n} is too small for {BATCHES} batches"
        )));
    }
    let reps: Vec<ReplicateStats> = (0..BATCHES as u64)
        .into_par_iter()
        .map(|i| replicate(p, case, len, rng.stream(i)))
        .collect();
    let col = |f: fn(&ReplicateStats) -> f64| mean_stderr(&reps.iter().map(f).collect::<Vec<_>>());
    let (p_r_hat, se_p) = col(|r| r.p_r);
    let (sigma_hat, se_s) = col(|r| r.sigma);
    let (alpha_hat, se_a) = col(|r| r.alpha);
    let (mu_r_hat, se_m) = col(|r| r.mu_r);
    Ok(ReductionEstimates {
        p_r_hat,
        sigma_hat,
        alpha_hat,
        mu_r_hat,
        stderrs: ReductionStderrs {
            p_r: se_p,
            sigma: se_s,
            alpha: se_a,
            mu_r: se_m,
        },
        n: len * BATCHES,
    })
}

/// Function averaged along the label-ratio chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrand {
    Log,
    /// Indicator of a closed interval.
    Indicator(SternBrocotInterval),
}

impl Integrand {
    fn eval(&self, q: f64) -> f64 {
        match self {
            Integrand::Log => q.ln(),
            Integrand::Indicator(iv) => {
                if iv.lo.to_f64() <= q && q <= iv.hi.to_f64() {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Average {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// `(1/k) Σ f(Q_i)` along the reduced chain: `R` follows `R` with
/// probability `alpha`, `L` is always followed by `R`, and the ratio moves by
/// `Q -> 1 + 1/Q` on `R` and `Q -> 1 - 1/Q` on `L`.
pub fn ergodic_average(alpha: f64, k: usize, rng: &RngSpec, f: Integrand) -> Result<Average> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in (1/2, 1)")));
    }
    let per = k / BATCHES;
    if per == 0 {
        return Err(Error::Domain(format!(
            "k = {k} is too small for {BATCHES} batches"
        )));
    }
    let burn_in = 1000;
    let means: Vec<f64> = (0..BATCHES as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng.stream(i);
            let mut q = 2.0;
            let mut last = Letter::R;
            let mut sum = 0.0;
            for step in 0..burn_in + per {
                last = if last == Letter::L || r.gen::<f64>() < alpha {
                    q = 1.0 + 1.0 / q;
                    Letter::R
                } else {
                    q = 1.0 - 1.0 / q;
                    Letter::L
                };
                if step >= burn_in {
                    sum += f.eval(q);
                }
            }
            sum / per as f64
        })
        .collect();
    let (estimate, stderr) = mean_stderr(&means);
    Ok(Average {
        estimate,
        stderr,
        samples: per * BATCHES,
    })
}

/// Empirical mass of one Stern-Brocot interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalFrequency {
    pub interval: SternBrocotInterval,
    pub frequency: f64,
    pub stderr: f64,
}

/// Draws `rank` pieces (`R` with probability `alpha`, `RL` otherwise) per
/// trial and nests intervals: the first piece gives `[1, ∞]` or `[0, 1]`;
/// with bounds `(older, newer)`, an `R` piece moves to `(newer, mediant)` and
/// an `RL` piece to `(mediant, older)`.
pub fn nd_limit_sample(
    alpha: f64,
    rank: u32,
    trials: usize,
    rng: &RngSpec,
) -> Result<Vec<IntervalFrequency>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in (0, 1)")));
    }
    if !(1..=30).contains(&rank) {
        return Err(Error::Domain(format!("rank {rank} is not in 1..=30")));
    }
    if trials == 0 {
        return Err(Error::Domain("no trials".into()));
    }
    let per = trials.div_ceil(BATCHES);
    let hits: Vec<BTreeMap<(ExtendedRational, ExtendedRational), usize>> = (0..BATCHES as u64)
        .into_par_iter()
        .map(|b| {
            let mut r = rng.stream(b);
            let mut counts = BTreeMap::new();
            let start = per * b as usize;
            for _ in start..(start + per).min(trials) {
                let (mut older, mut newer) = if r.gen::<f64>() < alpha {
                    (ExtendedRational::INFINITY, ExtendedRational::ONE)
                } else {
                    (ExtendedRational::ONE, ExtendedRational::ZERO)
                };
                for _ in 1..rank {
                    let m = older.mediant(&newer);
                    (older, newer) = if r.gen::<f64>() < alpha {
                        (newer, m)
                    } else {
                        (m, older)
                    };
                }
                let key = if older < newer {
                    (older, newer)
                } else {
                    (newer, older)
                };
                *counts.entry(key).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    let mut total: BTreeMap<(ExtendedRational, ExtendedRational), usize> = BTreeMap::new();
    for h in hits {
        for (k, v) in h {
            *total.entry(k).or_insert(0) += v;
        }
    }
    let n = trials as f64;
    Ok(intervals_up_to(rank)
        .into_iter()
        .filter(|iv| iv.rank == rank)
        .map(|iv| {
            let f = total.get(&(iv.lo, iv.hi)).copied().unwrap_or(0) as f64 / n;
            IntervalFrequency {
                interval: iv,
                frequency: f,
                stderr: (f * (1.0 - f) / n).sqrt(),
            }
        })
        .collect())
}

/// Gaps between the append times of consecutive surviving letters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoppingStats {
    pub mean: f64,
    pub stderr: f64,
    /// `1/sigma`, the long-run number of raw letters per surviving letter.
    pub expected: f64,
    pub gaps: usize,
    /// `(gap, count)`, increasing in gap.
    pub histogram: Vec<(usize, usize)>,
}

/// Fraction of each reduced word ignored at its end, where letters may
/// still be deleted later.
const TAIL_MARGIN: f64 = 0.1;

/// Reduces [`BATCHES`] non-linear words of `trials / BATCHES` letters and
/// records the gaps `n(k+1) - n(k)` between append times of consecutive
/// letters of the reduced words.
pub fn stopping_time_stats(p: f64, trials: usize, rng: &RngSpec) -> Result<StoppingStats> {
    check_p(p)?;
    if is_zero_regime(p, ModelCase::NonLinear) {
        return Err(Error::Regime(format!(
            "p = {p}: surviving letters are not renewed for p <= 1/3"
        )));
    }
    let len = trials / BATCHES;
    if len < 10 {
        return Err(Error::Domain(format!("trials = {trials} is too small")));
    }
    let per: Vec<(Vec<usize>, f64)> = (0..BATCHES as u64)
        .into_par_iter()
        .map(|b| {
            let mut r = rng.stream(b);
            let mut red = Reducer::with_capacity(ModelCase::NonLinear, len);
            for _ in 0..len {
                red.push(draw(&mut r, p));
            }
            let times = red.append_times();
            let keep = ((times.len() as f64) * (1.0 - TAIL_MARGIN)) as usize;
            let gaps: Vec<usize> = times[..keep.max(1)]
                .windows(2)
                .map(|w| w[1] - w[0])
                .collect();
            let mean = if gaps.is_empty() {
                f64::NAN
            } else {
                gaps.iter().sum::<usize>() as f64 / gaps.len() as f64
            };
            (gaps, mean)
        })
        .collect();
    let means: Vec<f64> = per
        .iter()
        .map(|(_, m)| *m)
        .filter(|m| m.is_finite())
        .collect();
    if means.is_empty() {
        return Err(Error::TooShort("no surviving letters".into()));
    }
    let (_, stderr) = mean_stderr(&means);
    let mut hist = BTreeMap::new();
    let mut count = 0;
    let mut sum = 0;
    for (gaps, _) in &per {
        for &g in gaps {
            *hist.entry(g).or_insert(0) += 1;
            count += 1;
            sum += g;
        }
    }
    let sigma = compression_rate(alpha_from_p(p, ModelCase::NonLinear)?)?;
    Ok(StoppingStats {
        mean: sum as f64 / count as f64,
        stderr,
        expected: 1.0 / sigma,
        gaps: count,
        histogram: hist.into_iter().collect(),
    })
}

/// Non-linear labels of two words driven by the same uniforms, thresholded
/// at `p` and `p_prime`; true iff the first never exceeds the second.
pub fn coupling_check(
    p: f64,
    p_prime: f64,
    n: usize,
    trials: usize,
    rng: &RngSpec,
) -> Result<bool> {
    check_p(p)?;
    check_p(p_prime)?;
    if p > p_prime {
        return Err(Error::Domain(format!("p = {p} exceeds p' = {p_prime}")));
    }
    let ok = (0..trials as u64).into_par_iter().all(|t| {
        let mut r = rng.stream(t);
        let one = BigUint::from(1u8);
        let (mut a, mut b) = (one.clone(), one.clone());
        let (mut a2, mut b2) = (one.clone(), one);
        for _ in 0..n {
            let u = r.gen::<f64>();
            let next = |x: &BigUint, y: &BigUint, plus: bool| {
                if plus {
                    x + y
                } else if x > y {
                    x - y
                } else {
                    y - x
                }
            };
            let c = next(&a, &b, u < p);
            let c2 = next(&a2, &b2, u < p_prime);
            if c > c2 {
                return false;
            }
            a = std::mem::replace(&mut b, c);
            a2 = std::mem::replace(&mut b2, c2);
        }
        true
    });
    Ok(ok)
}

/// Serialized form of a single scalar estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub estimate: f64,
    pub stderr: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub closed_form: Option<f64>,
    pub z_score: Option<f64>,
}

impl McReport {
    pub fn new(
        estimate: f64,
        stderr: f64,
        n: usize,
        trials: usize,
        seed: u64,
        closed_form: Option<f64>,
    ) -> Self {
        let z_score = closed_form.map(|c| {
            if stderr > 0.0 {
                (estimate - c) / stderr
            } else if estimate == c {
                0.0
            } else {
                f64::INFINITY.copysign(estimate - c)
            }
        });
        McReport {
            estimate,
            stderr,
            n,
            trials,
            seed,
            closed_form,
            z_score,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_result() {
        let a = simulate_growth(0.5, ModelCase::Linear, 5000, &RngSpec::new(7)).unwrap();
        let b = simulate_growth(0.5, ModelCase::Linear, 5000, &RngSpec::new(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fibonacci_growth() {
        let g = simulate_growth(1.0, ModelCase::Linear, 2000, &RngSpec::new(1)).unwrap();
        assert!((g.estimate - crate::params::PHI.ln()).abs() < 1e-3);
        // only the first batch carries the start-up offset log(sqrt 5)
        assert!(g.stderr < 2e-4, "{}", g.stderr);
    }

    #[test]
    fn no_deletions_at_p_one() {
        let e = estimate_reduction(1.0, ModelCase::Linear, 10_000, &RngSpec::new(3)).unwrap();
        assert_eq!(e.p_r_hat, 1.0);
        assert_eq!(e.sigma_hat, 1.0);
    }

    #[test]
    fn zero_regime_rejected() {
        assert!(estimate_reduction(0.3, ModelCase::NonLinear, 1000, &RngSpec::new(1)).is_err());
        assert!(stopping_time_stats(0.3, 1000, &RngSpec::new(1)).is_err());
    }

    #[test]
    fn z_score_without_spread() {
        assert_eq!(
            McReport::new(1.0, 0.0, 1, 1, 0, Some(1.0)).z_score,
            Some(0.0)
        );
    }
}
