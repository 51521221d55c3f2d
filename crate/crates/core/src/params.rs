//! Closed-form parameter algebra linking the sign probability `p` to the
//! Markov parameter `alpha` and the derived rates.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

/// Which recurrence is being studied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelCase {
    /// `F(n+2) = F(n+1) ± F(n)`
    Linear,
    /// `F(n+2) = |F(n+1) ± F(n)|`
    #[serde(rename = "nonlinear")]
    NonLinear,
}

impl ModelCase {
    /// Probability of appending an `R` right after a deletion.
    pub fn c(self, p: f64) -> f64 {
        match self {
            ModelCase::Linear => 1.0 - p,
            ModelCase::NonLinear => p,
        }
    }
}

impl fmt::Display for ModelCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelCase::Linear => f.write_str("linear"),
            ModelCase::NonLinear => f.write_str("nonlinear"),
        }
    }
}

impl FromStr for ModelCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" | "l" => Ok(ModelCase::Linear),
            "nonlinear" | "non-linear" | "nl" => Ok(ModelCase::NonLinear),
            other => Err(Error::Parse(format!("unknown case `{other}`"))),
        }
    }
}

/// All scalar parameters of one model instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseParams {
    pub p: f64,
    pub case: ModelCase,
    pub c: f64,
    pub alpha: f64,
    pub p_r: f64,
    pub p_1: f64,
    pub sigma: f64,
    pub mu_r: f64,
    pub mu_l: f64,
    pub phi: f64,
}

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("p = {p} is not in (0, 1]")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && (0.5..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha = {alpha} is not in [1/2, 1]")))
    }
}

/// True when the non-linear sequence is in its zero-growth regime.
pub fn is_zero_regime(p: f64, case: ModelCase) -> bool {
    case == ModelCase::NonLinear && p <= 1.0 / 3.0
}

/// `P(Y(k+1) = R | Y(k) = R)` for the surviving letters.
pub fn alpha_from_p(p: f64, case: ModelCase) -> Result<f64> {
    check_p(p)?;
    let a = match case {
        ModelCase::Linear => (3.0 * p - 2.0 + (5.0 * p * p - 8.0 * p + 4.0).sqrt()) / (2.0 * p),
        ModelCase::NonLinear => {
            if p <= 1.0 / 3.0 {
                return Ok(0.5);
            }
            2.0 * p / (p + (p * (4.0 - 3.0 * p)).sqrt())
        }
    };
    Ok(a.clamp(0.5, 1.0))
}

/// Derivative of [`alpha_from_p`] with respect to `p`.
pub fn dalpha_dp(p: f64, case: ModelCase) -> Result<f64> {
    check_p(p)?;
    Ok(match case {
        ModelCase::Linear => {
            let s = (5.0 * p * p - 8.0 * p + 4.0).sqrt();
            let num = 3.0 * p - 2.0 + s;
            let dnum = 3.0 + (5.0 * p - 4.0) / s;
            (dnum * p - num) / (2.0 * p * p)
        }
        ModelCase::NonLinear => {
            if p <= 1.0 / 3.0 {
                return Ok(0.0);
            }
            let s = (p * (4.0 - 3.0 * p)).sqrt();
            let den = p + s;
            let dden = 1.0 + (2.0 - 3.0 * p) / s;
            2.0 * (den - p * dden) / (den * den)
        }
    })
}

/// Inverse of [`alpha_from_p`] on `[1/2, 1]`.
pub fn p_from_alpha(alpha: f64, case: ModelCase) -> Result<f64> {
    check_alpha(alpha)?;
    let a2 = alpha * alpha;
    Ok(match case {
        ModelCase::Linear => (2.0 * alpha - 1.0) / (3.0 * alpha - a2 - 1.0),
        ModelCase::NonLinear => a2 / (a2 - alpha + 1.0),
    })
}

/// Probability that an appended `R` is never deleted.
pub fn survival_probability(p: f64, case: ModelCase) -> Result<f64> {
    check_p(p)?;
    if is_zero_regime(p, case) {
        return Ok(0.0);
    }
    let c = case.c(p);
    if c == 0.0 {
        // c^2 x^2 + b x + k = 0 degenerates to b x + k = 0 with root 1.
        return Ok(1.0);
    }
    let b = p * p + 2.0 * c * (1.0 - p - c);
    let k = (1.0 - c - 2.0 * p) * (1.0 - c);
    let root_disc = p * (p * p + 4.0 * c * (1.0 - p)).sqrt();
    // conjugate form when b > 0 avoids cancellation as c -> 0
    let pr = if b > 0.0 {
        2.0 * k / (-b - root_disc)
    } else {
        (-b + root_disc) / (2.0 * c * c)
    };
    Ok(pr.clamp(0.0, 1.0))
}

/// Limiting ratio of reduced length to raw length.
pub fn compression_rate(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok((2.0 * alpha - 1.0) * (2.0 - alpha) / (alpha * alpha - alpha + 1.0))
}

pub fn build_params(p: f64, case: ModelCase) -> Result<CaseParams> {
    let alpha = alpha_from_p(p, case)?;
    let p_r = survival_probability(p, case)?;
    let sigma = compression_rate(alpha)?;
    let mu_r = 1.0 / (2.0 - alpha);
    Ok(CaseParams {
        p,
        case,
        c: case.c(p),
        alpha,
        p_r,
        p_1: alpha * p_r,
        sigma,
        mu_r,
        mu_l: 1.0 - mu_r,
        phi: PHI,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_point() {
        let a = alpha_from_p(0.5, ModelCase::Linear).unwrap();
        assert!((a - 1.0 / PHI).abs() < 1e-15);
        let b = alpha_from_p(0.5, ModelCase::NonLinear).unwrap();
        assert!((b - 1.0 / PHI).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_difference() {
        for case in [ModelCase::Linear, ModelCase::NonLinear] {
            for &p in &[0.4, 0.55, 0.8, 0.99] {
                let h = 1e-6;
                let fd = (alpha_from_p(p + h, case).unwrap() - alpha_from_p(p - h, case).unwrap())
                    / (2.0 * h);
                assert!(
                    (fd - dalpha_dp(p, case).unwrap()).abs() < 1e-7,
                    "{case} {p}"
                );
            }
            assert!((dalpha_dp(1.0, case).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_p() {
        assert!(alpha_from_p(0.0, ModelCase::Linear).is_err());
        assert!(alpha_from_p(1.1, ModelCase::Linear).is_err());
        assert!(compression_rate(0.4).is_err());
    }

    #[test]
    fn case_parsing() {
        assert_eq!("linear".parse::<ModelCase>().unwrap(), ModelCase::Linear);
        assert_eq!(
            "NonLinear".parse::<ModelCase>().unwrap(),
            ModelCase::NonLinear
        );
        assert!("x".parse::<ModelCase>().is_err());
    }
}
