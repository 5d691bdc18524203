//! Long-time growth constant `ℵ_v^d = lim L_v^d(t)/t` and its `|v| → 0` limit.
//!
//! For `d >= 3`
//!
//! ```text
//! ℵ_v^d = π S_{d-2} |v|^{-2ν} Σ_n (-1)^n (ν+n) Γ(2ν+n) / n! · I_{ν+n}(r|v|)/K_{ν+n}(r|v|)
//! ```
//!
//! and for `d = 2` the same sum with the `n = 0` weight replaced by its limit
//! `1/2`, i.e. `π I_0/K_0 + 2π Σ_{n>=1} (-1)^n I_n/K_n`.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::sausage::{coefficients, ln_prefactor, ModelParams, MAX_TERMS};
use crate::specfun::{ln_gamma, ln_sphere_surface, log_bessel_i, log_bessel_k, log_bessel_k_and_ratio, sphere_surface, LogScaled};
use crate::summation::PairedSum;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticConstant {
    pub value: f64,
    pub terms_used: usize,
    /// Majorant of the omitted terms.
    pub trunc_bound: f64,
}

fn check(params: &ModelParams, tol: f64) -> Result<()> {
    if !(params.v_mag() > 0.0) {
        return Err(Error::domain("the growth constant needs a nonzero drift"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// `ln[(ν+n) Γ(2ν+n) / n!]`, with the `ν = n = 0` weight `1/2`.
fn ln_weight(nu: f64, n: u32) -> f64 {
    if nu == 0.0 && n == 0 {
        -LN_2
    } else {
        (nu + f64::from(n)).ln() + ln_gamma(2.0 * nu + f64::from(n)) - ln_gamma(f64::from(n) + 1.0)
    }
}

/// Natural log of the explicit majorant
/// `Γ(2ν+1) x^{2ν} / (2^ν Γ(ν+1)²) · x^{2n} e^{2x} / (2^n n! (n-1)!)`, `x = r|v|`,
/// of the `n`-th weighted ratio `(ν+n)Γ(2ν+n)/n! · I_{ν+n}(x)/K_{ν+n}(x)`, `n >= 1`.
pub fn ln_term_majorant(nu: f64, x: f64, n: u32) -> f64 {
    let nf = f64::from(n);
    ln_gamma(2.0 * nu + 1.0) + 2.0 * nu * x.ln() - nu * LN_2 - 2.0 * ln_gamma(nu + 1.0) + 2.0 * nf * x.ln()
        + 2.0 * x
        - nf * LN_2
        - ln_gamma(nf + 1.0)
        - ln_gamma(nf)
}

/// `ln |(ν+n)Γ(2ν+n)/n! · I_{ν+n}(x)/K_{ν+n}(x)|`.
pub fn ln_term(nu: f64, x: f64, n: u32) -> f64 {
    let mu = nu + f64::from(n);
    ln_weight(nu, n) + log_bessel_i(mu, x) - log_bessel_k(mu, x)
}

/// Sum of the majorants from `n_from` on; consecutive majorants have ratio
/// `x²/(2(n+1)n)`, so the remainder closes geometrically.
fn majorant_tail(nu: f64, x: f64, n_from: u32) -> f64 {
    let mut sum = 0.0;
    let mut n = n_from.max(1);
    loop {
        let b = ln_term_majorant(nu, x, n).exp();
        sum += b;
        let nf = f64::from(n);
        let rho = x * x / (2.0 * (nf + 1.0) * nf);
        if rho < 1.0 {
            let rest = b * rho / (1.0 - rho);
            if rest <= 1e-3 * sum || sum == 0.0 {
                return sum + rest;
            }
        }
        n += 1;
        if n > 100_000 {
            return f64::INFINITY;
        }
    }
}

/// `ln(π S_{d-2} / |v|^{2ν})`.
fn ln_outer(params: &ModelParams) -> f64 {
    PI.ln() + ln_sphere_surface(params.d() - 2) - 2.0 * params.nu() * params.v_mag().ln()
}

/// `ℵ_v^d` from its defining series, truncated once the majorant of the
/// remainder is below `tol` times the partial sum.
pub fn aleph(params: &ModelParams, tol: f64) -> Result<AsymptoticConstant> {
    check(params, tol)?;
    let nu = params.nu();
    let x = params.r() * params.v_mag();
    let outer = ln_outer(params);
    let mut sum = PairedSum::new();
    for n in 0..MAX_TERMS as u32 {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        sum.add(LogScaled::new(sign, outer + ln_term(nu, x, n)).to_f64());
        let value = sum.value();
        let bound = (outer + majorant_tail(nu, x, n + 1).ln()).exp();
        if bound <= tol * value.abs() {
            return Ok(AsymptoticConstant {
                value,
                terms_used: n as usize + 1,
                trunc_bound: bound,
            });
        }
    }
    Err(Error::numeric(
        "growth constant",
        format!("no convergence within {MAX_TERMS} terms"),
    ))
}

/// `ℵ_v^d` as `P|v| Σ_n [ξ_{ν,n} K_{ν+n+1}/K_{ν+n} + ζ_{ν,n}]`, the λ → 0 limit
/// of `λ²` times the transform, summed without using the Wronskian.
pub fn aleph_phi_form(params: &ModelParams, tol: f64) -> Result<AsymptoticConstant> {
    check(params, tol)?;
    let nu = params.nu();
    let x = params.r() * params.v_mag();
    let scale = LogScaled::from_log(ln_prefactor(params) + params.v_mag().ln());
    let mut sum = PairedSum::new();
    for n in 0..MAX_TERMS as u32 {
        let c = coefficients(params, n)?;
        let ratio = log_bessel_k_and_ratio(nu + f64::from(n), x).1;
        let xi = (scale * c.xi).to_f64() * ratio;
        let zeta = (scale * c.zeta).to_f64();
        // φ_{ν,n} is one term; adding its parts through the pairing would mix signs
        sum.add(xi + zeta);
        let value = sum.value();
        // |φ_{ν,n}| = weighted ratio / x, so the same majorant applies
        let bound = (ln_outer(params) + majorant_tail(nu, x, n + 1).ln()).exp();
        if bound <= tol * value.abs() {
            return Ok(AsymptoticConstant {
                value,
                terms_used: n as usize + 1,
                trunc_bound: bound,
            });
        }
    }
    Err(Error::numeric(
        "growth constant",
        format!("no convergence within {MAX_TERMS} terms"),
    ))
}

/// `(d-2) S_{d-1} r^{d-2} / 2`.
pub fn newtonian_capacity(d: u32, r: f64) -> Result<f64> {
    if d < 3 {
        return Err(Error::domain(format!("capacity limit needs d >= 3, got {d}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("radius must be > 0, got {r}")));
    }
    Ok(f64::from(d - 2) * sphere_surface(d - 1) * r.powi(d as i32 - 2) / 2.0)
}

/// `ℵ_0^d`: zero for `d = 2`, the capacity otherwise.
pub fn aleph_zero(d: u32, r: f64) -> Result<f64> {
    if d == 2 {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("radius must be > 0, got {r}")));
        }
        Ok(0.0)
    } else {
        newtonian_capacity(d, r)
    }
}

/// `ℵ_v^d` along a grid of drift magnitudes.
pub fn aleph_zero_limit(d: u32, r: f64, v_grid: &[f64], tol: f64) -> Result<Vec<f64>> {
    v_grid
        .iter()
        .map(|&v| aleph(&ModelParams::new(d, r, v)?, tol).map(|a| a.value))
        .collect()
}
