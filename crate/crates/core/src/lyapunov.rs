//! Lyapunov exponents: `gamma(alpha) = ∫ log x dnu_alpha(x)` and its relatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{
    integrate_log_streaming, nu_f_build, product_log_ratio, refine_nu_alpha, ChiTable, LogIntegral,
    RefinementPolicy, SplitRule,
};
use crate::params::{alpha_from_p, dalpha_dp, is_zero_regime, ModelCase, PHI};

/// How a [`GammaResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    Dirac,
    ZeroRegime,
    Furstenberg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaResult {
    pub p: Option<f64>,
    pub case: Option<ModelCase>,
    pub alpha: f64,
    pub gamma: f64,
    pub error_bound: f64,
    pub method: Method,
}

/// `(mass threshold, grid step)` pairs tried in order until the bound fits.
const LADDER: [(f64, f64); 8] = [
    (1e-3, 1.0 / 16.0),
    (1e-3, 1.0 / 64.0),
    (1e-4, 1.0 / 64.0),
    (1e-4, 1.0 / 128.0),
    (1e-5, 1.0 / 128.0),
    (1e-5, 1.0 / 256.0),
    (1e-6, 1.0 / 256.0),
    (1e-6, 1.0 / 512.0),
];

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tolerance {tol} must be positive")))
    }
}

/// Certified `∫ log x dnu_alpha` with total error bound at most `tol`.
///
/// Works for any `alpha` in `(0, 1)`, without using the symmetry.
pub fn log_integral(alpha: f64, rule: SplitRule, tol: f64) -> Result<LogIntegral> {
    check_tol(tol)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in (0, 1)")));
    }
    let mut table: Option<ChiTable> = None;
    let mut best = f64::INFINITY;
    for &(eps, h) in &LADDER {
        if table.as_ref().map(|t| t.step) != Some(h) {
            table = Some(ChiTable::build(alpha, h)?);
        }
        let t = table.as_ref().expect("built above");
        let policy = RefinementPolicy::default()
            .with_mass_threshold(eps)
            .with_grid_step(h);
        let r = integrate_log_streaming(alpha, rule, &policy, t)?;
        if r.total.error_bound <= tol {
            return Ok(r);
        }
        best = best.min(r.total.error_bound);
    }
    Err(Error::TolUnreachable { tol, best })
}

/// `gamma(alpha)` by quadrature for any `alpha` in `(0, 1)`.
pub fn gamma_quadrature(alpha: f64, tol: f64) -> Result<GammaResult> {
    let r = log_integral(alpha, SplitRule::Standard, tol)?;
    Ok(GammaResult {
        p: None,
        case: None,
        alpha,
        gamma: r.total.value,
        error_bound: r.total.error_bound,
        method: Method::Quadrature,
    })
}

pub fn gamma_of_alpha(alpha: f64, tol: f64) -> Result<GammaResult> {
    check_tol(tol)?;
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in [0, 1]")));
    }
    if alpha == 1.0 || alpha == 0.0 {
        let sign = if alpha == 1.0 { 1.0 } else { -1.0 };
        return Ok(GammaResult {
            p: None,
            case: None,
            alpha,
            gamma: sign * PHI.ln(),
            error_bound: 0.0,
            method: Method::Dirac,
        });
    }
    if alpha < 0.5 {
        let mut r = gamma_of_alpha(1.0 - alpha, tol)?;
        r.alpha = alpha;
        r.gamma = -r.gamma;
        return Ok(r);
    }
    let mut r = gamma_quadrature(alpha, tol)?;
    if alpha == 0.5 {
        // the value is zero by symmetry; keep the quadrature as a certificate
        r.error_bound += r.gamma.abs();
        r.gamma = 0.0;
    }
    Ok(r)
}

pub fn gamma_of_p(p: f64, case: ModelCase, tol: f64) -> Result<GammaResult> {
    check_tol(tol)?;
    let alpha = alpha_from_p(p, case)?;
    let mut r = if is_zero_regime(p, case) {
        GammaResult {
            p: None,
            case: None,
            alpha,
            gamma: 0.0,
            error_bound: 0.0,
            method: Method::ZeroRegime,
        }
    } else {
        gamma_of_alpha(alpha, tol)?
    };
    r.p = Some(p);
    r.case = Some(case);
    Ok(r)
}

/// `(∫₀¹ / ∫₀^∞, ∫₁^∞ / ∫₀^∞)` from the quadrature.
pub fn gamma_split_check(alpha: f64, tol: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} is not in (1/2, 1)")));
    }
    let r = log_integral(alpha, SplitRule::Standard, tol)?;
    Ok((
        r.below1.value / r.total.value,
        r.above1.value / r.total.value,
    ))
}

/// Closed forms of the two ratios of [`gamma_split_check`].
pub fn split_ratios_closed_form(alpha: f64) -> (f64, f64) {
    let den = 1.0 - 2.0 * alpha;
    (
        (alpha + 1.0) * (1.0 - alpha) / den,
        alpha * (alpha - 2.0) / den,
    )
}

/// Mass threshold of the leaf set used for the double integral.
pub const PRODUCT_MASS_THRESHOLD: f64 = 2e-4;

/// `∬ log((x + y + xy)/(x + y + 1)) dnu_alpha(x) dnu_alpha(y)`.
pub fn double_integral(alpha: f64) -> Result<f64> {
    let policy = RefinementPolicy::default().with_mass_threshold(PRODUCT_MASS_THRESHOLD);
    let m = refine_nu_alpha(alpha, policy)?;
    Ok(product_log_ratio(&m))
}

/// `d gamma / d alpha` for `1/2 + 10^-3 < alpha <= 1`.
pub fn gamma_prime(alpha: f64, tol: f64) -> Result<f64> {
    if !(alpha > 0.5 + 1e-3 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "alpha = {alpha}: the derivative formula needs 1/2 + 1e-3 < alpha <= 1"
        )));
    }
    if alpha == 1.0 {
        let (f, f2) = (PHI, PHI * PHI);
        return Ok(PHI.ln() + ((2.0 * f + f2) / (2.0 * f + 1.0)).ln());
    }
    let gamma = gamma_quadrature(alpha, tol)?.gamma;
    let z = alpha * alpha - alpha + 1.0;
    let s = 2.0 * alpha - 1.0;
    let first = gamma * (1.0 + 2.0 * alpha - 2.0 * alpha * alpha) / (s * z);
    Ok(first + s / z * double_integral(alpha)?)
}

/// `d gamma_p / dp` at `p = 1`.
pub fn dgamma_dp_at_1(case: ModelCase) -> Result<f64> {
    Ok(gamma_prime(1.0, 1e-9)? * dalpha_dp(1.0, case)?)
}

/// `∫ log|m| dnu_f(m)` for the linear sequence.
pub fn gamma_via_nu_f(p: f64, tol: f64) -> Result<GammaResult> {
    check_tol(tol)?;
    let mut best = f64::INFINITY;
    let mut table: Option<ChiTable> = None;
    for &(eps, h) in &LADDER {
        let policy = RefinementPolicy::default()
            .with_mass_threshold(eps)
            .with_grid_step(h);
        let nu = nu_f_build(p, policy)?;
        if table.as_ref().map(|t| t.step) != Some(h) {
            table = Some(ChiTable::build(nu.alpha, h)?);
        }
        let c = nu.integrate_log_abs(table.as_ref().expect("built above"))?;
        if c.error_bound <= tol {
            return Ok(GammaResult {
                p: Some(p),
                case: Some(ModelCase::Linear),
                alpha: nu.alpha,
                gamma: c.value,
                error_bound: c.error_bound,
                method: Method::Furstenberg,
            });
        }
        best = best.min(c.error_bound);
    }
    Err(Error::TolUnreachable { tol, best })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub p: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub error_bound: f64,
}

pub fn gamma_curve(case: ModelCase, grid: &[f64], tol: f64) -> Result<Vec<CurveRow>> {
    grid.iter()
        .map(|&p| {
            let r = gamma_of_p(p, case, tol)?;
            Ok(CurveRow {
                p,
                alpha: r.alpha,
                gamma: r.gamma,
                error_bound: r.error_bound,
            })
        })
        .collect()
}
