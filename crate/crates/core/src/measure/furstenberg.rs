//! The invariant measure of the slope `m -> 1 + 1/m` (probability `p`),
//! `m -> 1 - 1/m` (probability `1 - p`) on the real line.
//!
//! Mass `m+ = alpha/(alpha² - alpha + 1)` sits on `[0, ∞]` distributed as
//! `nu_alpha`; mass `m- = (1 - alpha)²/(alpha² - alpha + 1)` sits on `[-∞, 0]`,
//! refined with the exchanged rule. Negative intervals are stored through
//! their mirror images.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{
    integrate_log_with, intervals_up_to, mass_exact_with_rule, mass_of_interval_f64,
    refine_with_rule, Certified, ChiTable, LeafMeasure, RefinementPolicy, SplitRule,
};
use crate::cfrac::{ExtendedRational, SternBrocotInterval};
use crate::error::{Error, Result};
use crate::params::{alpha_from_p, ModelCase};

/// `[lo, hi]`, or `[-hi, -lo]` when `negative`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedInterval {
    pub negative: bool,
    pub mirror: SternBrocotInterval,
}

impl SignedInterval {
    fn rule(&self) -> SplitRule {
        if self.negative {
            SplitRule::Exchanged
        } else {
            SplitRule::Standard
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedLineMeasure {
    pub alpha: f64,
    pub p: f64,
    pub m_plus: f64,
    pub m_minus: f64,
    /// Conditional law on `[0, ∞]`.
    pub pos: LeafMeasure,
    /// Conditional law of `-m` given `m <= 0`.
    pub neg: LeafMeasure,
}

pub fn nu_f_build(p: f64, policy: RefinementPolicy) -> Result<SignedLineMeasure> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!(
            "p = {p} is not in (0, 1); at p = 1 the measure is a point mass"
        )));
    }
    let alpha = alpha_from_p(p, ModelCase::Linear)?;
    let z = alpha * alpha - alpha + 1.0;
    Ok(SignedLineMeasure {
        alpha,
        p,
        m_plus: alpha / z,
        m_minus: (1.0 - alpha) * (1.0 - alpha) / z,
        pos: refine_with_rule(alpha, SplitRule::Standard, policy)?,
        neg: refine_with_rule(alpha, SplitRule::Exchanged, policy)?,
    })
}

impl SignedLineMeasure {
    pub fn total_mass(&self) -> f64 {
        self.m_plus * self.pos.total_mass() + self.m_minus * self.neg.total_mass()
    }

    /// Certified `∫ log|m| dnu_f`.
    pub fn integrate_log_abs(&self, table: &ChiTable) -> Result<Certified> {
        let pos = integrate_log_with(&self.pos, table)?.total;
        let neg = integrate_log_with(&self.neg, table)?.total;
        Ok(Certified {
            value: self.m_plus * pos.value + self.m_minus * neg.value,
            error_bound: self.m_plus * pos.error_bound + self.m_minus * neg.error_bound,
        })
    }
}

fn minus_one(x: ExtendedRational) -> ExtendedRational {
    ExtendedRational {
        num: x.num - x.den,
        den: x.den,
    }
}

fn one_minus(x: ExtendedRational) -> ExtendedRational {
    ExtendedRational {
        num: x.den - x.num,
        den: x.den,
    }
}

fn plus_one(x: ExtendedRational) -> ExtendedRational {
    ExtendedRational {
        num: x.num + x.den,
        den: x.den,
    }
}

fn signed(negative: bool, lo: ExtendedRational, hi: ExtendedRational, rank: u32) -> SignedInterval {
    SignedInterval {
        negative,
        mirror: SternBrocotInterval { lo, hi, rank },
    }
}

/// Preimages of `iv` under `m -> 1 + 1/m` and `m -> 1 - 1/m`.
///
/// Needs `iv` on one side of 1 (every interval of rank at least 1 is).
pub fn preimages(iv: &SignedInterval) -> (SignedInterval, SignedInterval) {
    let SternBrocotInterval { lo, hi, rank } = iv.mirror;
    if iv.negative {
        // x in [-b, -a]: 1/(x - 1) in [-1/(a+1), -1/(b+1)], 1/(1 - x) in [1/(b+1), 1/(a+1)]
        let (l, h) = (plus_one(hi).recip(), plus_one(lo).recip());
        (signed(true, l, h, rank), signed(false, l, h, rank))
    } else if lo >= ExtendedRational::ONE {
        let (l, h) = (minus_one(hi).recip(), minus_one(lo).recip());
        (signed(false, l, h, rank), signed(true, l, h, rank))
    } else {
        let (l, h) = (one_minus(lo).recip(), one_minus(hi).recip());
        (signed(true, l, h, rank), signed(false, l, h, rank))
    }
}

fn side_weights(alpha: &BigRational) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let z = alpha * alpha - alpha + &one;
    let beta = &one - alpha;
    (alpha / &z, &beta * &beta / &z)
}

/// Exact `nu_f` of a signed Stern-Brocot interval for rational alpha.
pub fn nu_f_mass_exact(alpha: &BigRational, iv: &SignedInterval) -> Result<BigRational> {
    let (m_plus, m_minus) = side_weights(alpha);
    let m = mass_exact_with_rule(alpha, iv.rule(), iv.mirror.lo, iv.mirror.hi)?;
    Ok(if iv.negative { m_minus * m } else { m_plus * m })
}

fn signed_intervals(max_rank: u32) -> Vec<SignedInterval> {
    intervals_up_to(max_rank)
        .into_iter()
        .filter(|iv| iv.rank >= 1)
        .flat_map(|iv| {
            [
                SignedInterval {
                    negative: false,
                    mirror: iv,
                },
                SignedInterval {
                    negative: true,
                    mirror: iv,
                },
            ]
        })
        .collect()
}

/// Largest defect of `nu_f(I) = p nu_f(A^-1 I) + (1 - p) nu_f(B^-1 I)` over
/// signed intervals of rank `1..=max_rank`, exactly, for rational alpha (so
/// that `p = (2 alpha - 1)/(3 alpha - alpha² - 1)` is rational too).
pub fn furstenberg_residual_exact(alpha: &BigRational, max_rank: u32) -> Result<BigRational> {
    let one = BigRational::one();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if !(alpha > &half && alpha < &one) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in (1/2, 1)")));
    }
    let p = (alpha * BigInt::from(2) - &one) / (alpha * BigInt::from(3) - alpha * alpha - &one);
    let q = &one - &p;
    let mut worst = BigRational::zero();
    for iv in signed_intervals(max_rank) {
        let (a, b) = preimages(&iv);
        let lhs = nu_f_mass_exact(alpha, &iv)?;
        let rhs = &p * nu_f_mass_exact(alpha, &a)? + &q * nu_f_mass_exact(alpha, &b)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Floating-point version of [`furstenberg_residual_exact`] at a sign
/// probability `p`.
pub fn furstenberg_residual(p: f64, max_rank: u32) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} is not in (0, 1)")));
    }
    let alpha = alpha_from_p(p, ModelCase::Linear)?;
    let z = alpha * alpha - alpha + 1.0;
    let (m_plus, m_minus) = (alpha / z, (1.0 - alpha) * (1.0 - alpha) / z);
    let nu = |iv: &SignedInterval| -> Result<f64> {
        let m = mass_of_interval_f64(alpha, iv.rule(), iv.mirror.lo, iv.mirror.hi)?;
        Ok(if iv.negative { m_minus * m } else { m_plus * m })
    };
    let mut worst: f64 = 0.0;
    for iv in signed_intervals(max_rank) {
        let (a, b) = preimages(&iv);
        let defect = nu(&iv)? - p * nu(&a)? - (1.0 - p) * nu(&b)?;
        worst = worst.max(defect.abs());
    }
    Ok(worst)
}
