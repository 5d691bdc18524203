//! Checkable forms of the Bessel, Gamma and Gegenbauer inequalities that
//! drive the truncation bounds of the series.

use std::f64::consts::LN_2;

use super::{gegenbauer, ln_gamma, log_bessel_k, Order};
use crate::error::{Error, Result};

/// Slack below which an equality case is still reported as holding.
pub const ROUNDING_ALLOWANCE: f64 = 1e-12;

/// Outcome of an inequality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub holds: bool,
    /// Minimum relative slack `bound/value - 1` over the sides checked.
    pub slack: f64,
}

impl BoundCheck {
    fn from_log_gaps(gaps: &[f64]) -> Self {
        let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        let slack = min_gap.exp_m1();
        BoundCheck {
            holds: slack >= -ROUNDING_ALLOWANCE,
            slack,
        }
    }
}

/// `2^{μ-1} Γ(μ) e^{-x} / x^μ <= K_μ(x) <= 2^{μ+1} (2 + 1/x)^μ Γ(μ) e^{-x}`.
pub fn check_macdonald_bounds(mu: Order, x: f64) -> Result<BoundCheck> {
    let m = mu.value();
    if m < 0.5 {
        return Err(Error::domain(format!("Macdonald bounds need mu >= 1/2, got {m}")));
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("Macdonald bounds need x > 0, got {x}")));
    }
    let ln_k = log_bessel_k(m, x);
    Ok(BoundCheck::from_log_gaps(&[
        ln_k - ln_macdonald_lower(m, x),
        ln_macdonald_upper(m, x) - ln_k,
    ]))
}

pub(crate) fn ln_macdonald_lower(mu: f64, x: f64) -> f64 {
    (mu - 1.0) * LN_2 + ln_gamma(mu) - x - mu * x.ln()
}

pub(crate) fn ln_macdonald_upper(mu: f64, x: f64) -> f64 {
    (mu + 1.0) * LN_2 + mu * (2.0 + 1.0 / x).ln() + ln_gamma(mu) - x
}

/// `Γ(2μ+n)/Γ(μ+n)^2 <= 2^{μ-1} Γ(2μ+1)/Γ(μ+1)^2 · 2^n/Γ(n)` for `n >= 1`.
pub fn check_gamma_ratio_bound(mu: Order, n: u32) -> Result<BoundCheck> {
    if n == 0 {
        return Err(Error::domain("gamma ratio bound needs n >= 1"));
    }
    let (m, nf) = (mu.value(), f64::from(n));
    let lhs = ln_gamma(2.0 * m + nf) - 2.0 * ln_gamma(m + nf);
    let rhs = (m - 1.0 + nf) * LN_2 + ln_gamma(2.0 * m + 1.0) - 2.0 * ln_gamma(m + 1.0) - ln_gamma(nf);
    Ok(BoundCheck::from_log_gaps(&[rhs - lhs]))
}

/// `(μ+n) |C_n^μ(y)| <= 4^n δ_μ Γ(μ+n+1)/n!`, `δ_0 = 1`, `δ_μ = 1/Γ(μ)`.
pub fn check_gegenbauer_bound(n: u32, mu: Order, y: f64) -> Result<BoundCheck> {
    if n == 0 {
        return Err(Error::domain("Gegenbauer bound needs n >= 1"));
    }
    let (m, nf) = (mu.value(), f64::from(n));
    let value = (m + nf) * gegenbauer(n, mu, y)?.abs();
    let ln_delta = if m == 0.0 { 0.0 } else { -ln_gamma(m) };
    let ln_rhs = nf * 4f64.ln() + ln_delta + ln_gamma(m + nf + 1.0) - ln_gamma(nf + 1.0);
    if value == 0.0 {
        return Ok(BoundCheck {
            holds: true,
            slack: f64::INFINITY,
        });
    }
    Ok(BoundCheck::from_log_gaps(&[ln_rhs - value.ln()]))
}

/// Log of the upper bound `(x/2)^μ e^x / Γ(μ+1)` on `I_μ(x)`.
pub fn ln_bessel_i_upper(mu: f64, x: f64) -> f64 {
    mu * (0.5 * x).ln() + x - ln_gamma(mu + 1.0)
}

/// Upper bound `8 (2x+1)^{μ+1} μ / x` on `K_{μ+1}(x)/K_μ(x)`, valid for `μ >= 1/2`.
pub fn ln_bessel_k_ratio_upper(mu: f64, x: f64) -> f64 {
    8f64.ln() + (mu + 1.0) * (2.0 * x + 1.0).ln() + mu.ln() - x.ln()
}
