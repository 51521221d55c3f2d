//! Certified table of `chi(v) = E[sigma(v + log X)]`, `X ~ nu_alpha`,
//! `sigma` the logistic function.
//!
//! `chi` is increasing with values in `(0, 1)` and `|chi''| <= sqrt(3)/18`.
//! Conditioning on the leaves of a Stern-Brocot partition gives an exact
//! fixed-point identity for `chi`, evaluated here in interval arithmetic on a
//! uniform grid; linear interpolation between nodes costs at most
//! `CURVATURE * h^2 / 8`. Every value the table hands out is a `[lo, hi]`
//! bracket of the true value.

use rayon::prelude::*;

use super::{visit_leaves_by, LeafKind, MeasureLeaf, SplitRule};
use crate::error::{Error, Result};

/// Bound on `|sigma''|`, hence on `|chi''|`.
pub const CURVATURE: f64 = 0.096_225_044_864_937_6;
/// The grid covers `[-GRID_HALF_WIDTH, GRID_HALF_WIDTH]`.
pub const GRID_HALF_WIDTH: f64 = 40.0;
const PARTITION_THRESHOLD: f64 = 1e-4;
const PARTITION_MAX_RANK: u32 = 60;
const MAX_ITERATIONS: usize = 200;
const ROUNDING: f64 = 4e-16;

#[derive(Clone, Copy)]
struct ChiLeaf {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    mass: f64,
    odd: bool,
}

#[derive(Debug, Clone)]
pub struct ChiTable {
    pub alpha: f64,
    pub step: f64,
    pub slack: f64,
    pub iterations: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cum_lo: Vec<f64>,
    cum_hi: Vec<f64>,
}

impl ChiTable {
    pub fn build(alpha: f64, step: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha = {alpha} is not in (0, 1)")));
        }
        if !(step > 0.0 && step <= 1.0) {
            return Err(Error::Policy(format!("grid step {step} is not in (0, 1]")));
        }
        let leaves = chi_partition(alpha);
        let n = (2.0 * GRID_HALF_WIDTH / step).round() as usize;
        let step = 2.0 * GRID_HALF_WIDTH / n as f64;
        let mut table = ChiTable {
            alpha,
            step,
            slack: CURVATURE * step * step / 8.0,
            iterations: 0,
            lo: vec![0.0; n + 1],
            hi: vec![1.0; n + 1],
            cum_lo: Vec::new(),
            cum_hi: Vec::new(),
        };
        let mut prev_width = f64::INFINITY;
        while table.iterations < MAX_ITERATIONS {
            table.iterations += 1;
            let fresh: Vec<(f64, f64)> = (0..=n)
                .into_par_iter()
                .map(|k| table.apply(&leaves, table.node(k)))
                .collect();
            for (k, (lo, hi)) in fresh.into_iter().enumerate() {
                table.lo[k] = table.lo[k].max(lo);
                table.hi[k] = table.hi[k].min(hi);
            }
            // chi is increasing
            for k in 1..=n {
                table.lo[k] = table.lo[k].max(table.lo[k - 1]);
            }
            for k in (0..n).rev() {
                table.hi[k] = table.hi[k].min(table.hi[k + 1]);
            }
            let width = table.max_node_width();
            if width >= prev_width * (1.0 - 1e-3) {
                break;
            }
            prev_width = width;
        }
        table.cum_lo = cumulative(&table.lo, step);
        table.cum_hi = cumulative(&table.hi, step);
        Ok(table)
    }

    fn node(&self, k: usize) -> f64 {
        -GRID_HALF_WIDTH + k as f64 * self.step
    }

    fn last(&self) -> usize {
        self.lo.len() - 1
    }

    pub fn max_node_width(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l)
            .fold(0.0, f64::max)
    }

    /// One application of the leaf identity at `v` using the current brackets.
    fn apply(&self, leaves: &[ChiLeaf], v: f64) -> (f64, f64) {
        let kappa = v.exp();
        let (mut lo, mut hi) = (0.0, 0.0);
        for leaf in leaves {
            let p = leaf.b + kappa * leaf.a;
            let q = leaf.d + kappa * leaf.c;
            let coef = kappa / (p * q);
            if leaf.odd {
                let base = kappa * leaf.a / p + coef;
                let (cl, ch) = self.bracket((p / q).ln());
                lo += leaf.mass * (base - coef * ch);
                hi += leaf.mass * (base - coef * cl);
            } else {
                let base = kappa * leaf.c / q - coef;
                let (cl, ch) = self.bracket((q / p).ln());
                lo += leaf.mass * (base + coef * cl);
                hi += leaf.mass * (base + coef * ch);
            }
        }
        let pad = ROUNDING * leaves.len() as f64;
        ((lo - pad).max(0.0), (hi + pad).min(1.0))
    }

    /// Bracket of `chi(v)`.
    pub fn bracket(&self, v: f64) -> (f64, f64) {
        let n = self.last();
        if v <= -GRID_HALF_WIDTH {
            // chi(v) <= e^(v - w) chi(w) for v < w
            return (0.0, self.hi[0] * (v + GRID_HALF_WIDTH).exp());
        }
        if v >= GRID_HALF_WIDTH {
            return (1.0 - (1.0 - self.lo[n]) * (GRID_HALF_WIDTH - v).exp(), 1.0);
        }
        let x = (v + GRID_HALF_WIDTH) / self.step;
        let k = (x.floor() as usize).min(n - 1);
        let t = x - k as f64;
        let lo = (1.0 - t) * self.lo[k] + t * self.lo[k + 1] - self.slack;
        let hi = (1.0 - t) * self.hi[k] + t * self.hi[k + 1] + self.slack;
        (lo.max(0.0), hi.min(1.0))
    }

    /// `∫ chi` of the interpolants from `-GRID_HALF_WIDTH` to `v` inside the grid.
    fn cum_at(&self, cum: &[f64], vals: &[f64], v: f64) -> f64 {
        let n = self.last();
        let x = (v + GRID_HALF_WIDTH) / self.step;
        let k = (x.floor() as usize).min(n - 1);
        let t = x - k as f64;
        let at = vals[k] + t * (vals[k + 1] - vals[k]);
        cum[k] + 0.5 * self.step * t * (vals[k] + at)
    }

    /// Bracket of `∫_{v1}^{v2} chi(v) dv`; `v1` may be `-∞`.
    pub fn integral(&self, v1: f64, v2: f64) -> (f64, f64) {
        if !(v2 > v1) {
            return (0.0, 0.0);
        }
        let w = GRID_HALF_WIDTH;
        let n = self.last();
        let (mut lo, mut hi) = (0.0, 0.0);
        if v1 < -w {
            let top = v2.min(-w);
            hi += self.hi[0] * ((top + w).exp() - (v1 + w).exp());
        }
        let (a, b) = (v1.max(-w), v2.min(w));
        if b > a {
            let len = b - a;
            lo += self.cum_at(&self.cum_lo, &self.lo, b)
                - self.cum_at(&self.cum_lo, &self.lo, a)
                - self.slack * len;
            hi += self.cum_at(&self.cum_hi, &self.hi, b) - self.cum_at(&self.cum_hi, &self.hi, a)
                + self.slack * len;
        }
        if v2 > w {
            let start = v1.max(w);
            let len = v2 - start;
            let gap = 1.0 - self.lo[n];
            lo += len - gap * ((w - start).exp() - (w - v2).exp());
            hi += len;
        }
        let pad = ROUNDING * (1.0 + lo.abs() + hi.abs());
        (lo.max(0.0) - pad, hi + pad)
    }

    /// Bracket of `psi(t) = E[log(1 + t X)]`.
    pub fn psi(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (0.0, 0.0);
        }
        self.integral(f64::NEG_INFINITY, t.ln())
    }

    /// Bracket of `E[log X]` from `(1 + alpha) E[log X] = (2 alpha - 1) psi(1)`.
    pub fn mean_log(&self) -> (f64, f64) {
        let (lo, hi) = self.psi(1.0);
        let k = (2.0 * self.alpha - 1.0) / (1.0 + self.alpha);
        if k >= 0.0 {
            (k * lo, k * hi)
        } else {
            (k * hi, k * lo)
        }
    }
}

fn cumulative(vals: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(vals.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in vals.windows(2) {
        acc += 0.5 * step * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Partition driving the fixed-point identity: leaves are split until the
/// mass times the largest possible Lipschitz coefficient is small.
fn chi_partition(alpha: f64) -> Vec<ChiLeaf> {
    let mut out = Vec::new();
    visit_leaves_by(
        alpha,
        SplitRule::Standard,
        PARTITION_MAX_RANK,
        |leaf: &MeasureLeaf| {
            if leaf.interval.rank == 0 {
                return true;
            }
            let (a, b, c, d) = leaf.abcd();
            let w = if a > 0.0 && d > 0.0 {
                1.0 / (4.0 * (a * b * c * d).sqrt())
            } else {
                1.0
            };
            leaf.mass * w > PARTITION_THRESHOLD
        },
        |leaf| {
            let (a, b, c, d) = leaf.abcd();
            out.push(ChiLeaf {
                a,
                b,
                c,
                d,
                mass: leaf.mass,
                odd: leaf.kind == LeafKind::Odd,
            })
        },
    );
    out
}
