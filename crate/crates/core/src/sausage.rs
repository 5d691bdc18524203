//! Expected volume of the sausage swept by the ball `D` of radius `r` along a
//! Brownian motion with drift `v`:
//!
//! ```text
//! E[vol W(t)] = vol(D) + L_v^d(t)
//! L_v^d(t)    = P Σ_n ξ_{ν,n} g_n(t) + P |v| (Σ_n ζ_{ν,n}) t
//! ```
//!
//! with `ν = d/2 - 1`, `P = π S_{2ν} r / |v|^{2ν}` and `g_n = 2 Σ̃_v^{d+2n} /
//! (S_{d+2n-1} r^{d+2n-1})`, the inverse transform of `F_{ν+n}`.
//!
//! Two routes are provided: the time-domain series ([`expected_volume`]) and
//! numerical inversion of the transform ([`invert_transform`]).
//!
//! Truncation is certified. `g_n` is nonnegative and nondecreasing, so
//! `g_n(t) <= (e/t) F_{ν+n}(1/t) = e t α K_{ν+n+1}(rα)/K_{ν+n}(rα)` with
//! `α = sqrt(2/t + |v|²)`, and the Macdonald ratio majorant then bounds the
//! time-domain tail.

use std::f64::consts::{E, PI};

use crate::driftless::DriftlessProfile;
use crate::error::{Error, Result};
use crate::laplace::{combine_samples, sample_points, InversionConfig, TransformPoint, TransformSeries};
use crate::specfun::{ball_volume, ln_bessel_i_upper, ln_bessel_k_ratio_upper, ln_gamma, ln_sphere_surface, log_bessel_i, LogScaled};
use crate::summation::PairedSum;

/// Drift magnitudes below this are refused; use the driftless functions.
pub const MIN_DRIFT: f64 = 1e-8;
/// Upper limit on the number of series terms.
pub const MAX_TERMS: usize = 500;
/// Default relative tolerance.
pub const DEFAULT_TOL: f64 = 1e-6;

/// Dimension, ball radius and drift magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    d: u32,
    r: f64,
    v_mag: f64,
}

impl ModelParams {
    pub fn new(d: u32, r: f64, v_mag: f64) -> Result<Self> {
        if d < 2 {
            return Err(Error::domain(format!("dimension must be >= 2, got {d}")));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("radius must be > 0, got {r}")));
        }
        if !(v_mag >= 0.0 && v_mag.is_finite()) {
            return Err(Error::domain(format!("drift magnitude must be >= 0, got {v_mag}")));
        }
        Ok(ModelParams { d, r, v_mag })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn v_mag(&self) -> f64 {
        self.v_mag
    }

    /// `ν = d/2 - 1`.
    pub fn nu(&self) -> f64 {
        0.5 * f64::from(self.d) - 1.0
    }

    pub fn ball_volume(&self) -> f64 {
        ball_volume(self.d, self.r).expect("validated parameters")
    }

    pub(crate) fn require_drift(&self) -> Result<()> {
        if self.v_mag < MIN_DRIFT {
            Err(Error::domain(format!(
                "drift magnitude {} is below {MIN_DRIFT:e}; use the driftless volume instead",
                self.v_mag
            )))
        } else {
            Ok(())
        }
    }
}

/// `ξ_{ν,n}` and `ζ_{ν,n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientPair {
    pub n: u32,
    pub xi: LogScaled,
    pub zeta: LogScaled,
}

/// `ξ_{ν,n} = (-1)^n (ν+n) Γ(2ν+n) I_{ν+n}(r|v|)² / n!` and
/// `ζ_{ν,n} = (-1)^n (ν+n) Γ(2ν+n) I_{ν+n}(r|v|) I_{ν+n+1}(r|v|) / n!`,
/// with `ξ_{0,0} = I_0²/2` and `ζ_{0,0} = I_0 I_1 / 2`.
pub fn coefficients(params: &ModelParams, n: u32) -> Result<CoefficientPair> {
    if !(params.v_mag > 0.0) {
        return Err(Error::domain("coefficients need a nonzero drift"));
    }
    let x = params.r * params.v_mag;
    let mu = params.nu() + f64::from(n);
    let ln_i = log_bessel_i(mu, x);
    let ln_i1 = log_bessel_i(mu + 1.0, x);
    let ln_common = if mu == 0.0 {
        -std::f64::consts::LN_2
    } else {
        mu.ln() + ln_gamma(2.0 * params.nu() + f64::from(n)) - ln_gamma(f64::from(n) + 1.0)
    };
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    Ok(CoefficientPair {
        n,
        xi: LogScaled::new(sign, ln_common + 2.0 * ln_i),
        zeta: LogScaled::new(sign, ln_common + ln_i + ln_i1),
    })
}

/// `ln(π S_{2ν} r / |v|^{2ν})`.
pub(crate) fn ln_prefactor(params: &ModelParams) -> f64 {
    PI.ln() + ln_sphere_surface(params.d - 2) + params.r.ln() - 2.0 * params.nu() * params.v_mag.ln()
}

/// Majorants of the series remainders from index `N` on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    /// Bound on `Σ_{n>=N} |ξ_{ν,n}| K_{ν+n+1}(x)/K_{ν+n}(x)`.
    pub xi_ratio: f64,
    /// Bound on `Σ_{n>=N} |ζ_{ν,n}|`.
    pub zeta: f64,
}

/// Explicit tail bounds assembled term by term from the Bessel-`I` upper
/// bound and the Macdonald ratio bound; the remainder after the last
/// evaluated term is closed with a geometric series whose ratio majorises
/// every later term ratio.
pub fn truncation_bound(params: &ModelParams, x: f64, n_from: usize) -> Result<TailBound> {
    if n_from == 0 {
        return Err(Error::domain("truncation bound needs N >= 1"));
    }
    if !(x > 0.0) {
        return Err(Error::domain(format!("truncation bound needs x > 0, got {x}")));
    }
    let nu = params.nu();
    let rv = params.r * params.v_mag;
    if rv == 0.0 {
        return Ok(TailBound { xi_ratio: 0.0, zeta: 0.0 });
    }
    let ln_q = (2.0 * x + 1.0).ln() + 2.0 * rv.ln() - 4f64.ln();
    let xi_term = |n: f64| {
        8f64.ln() + (2.0 * x + 1.0).ln() + ln_gamma(2.0 * nu + n)
            - ln_gamma(n + 1.0)
            - 2.0 * ln_gamma(nu + n)
            - x.ln()
            + (nu + n) * ln_q
            + 2.0 * rv
    };
    let xi_ratio = |n: f64| 2.0 * ln_q.exp() / ((n + 1.0) * (nu + n));
    let ln_half_rv = (0.5 * rv).ln();
    let zeta_term = |n: f64| {
        ln_gamma(2.0 * nu + n) - ln_gamma(n + 1.0) - ln_gamma(nu + n) - ln_gamma(nu + n + 2.0)
            + (2.0 * nu + 2.0 * n + 1.0) * ln_half_rv
            + 2.0 * rv
    };
    let zeta_ratio = |n: f64| 2.0 * (0.5 * rv).powi(2) / ((n + 1.0) * (nu + n + 2.0));
    Ok(TailBound {
        xi_ratio: geometric_tail(n_from, xi_term, xi_ratio),
        zeta: geometric_tail(n_from, zeta_term, zeta_ratio),
    })
}

fn geometric_tail(n_from: usize, ln_term: impl Fn(f64) -> f64, ratio: impl Fn(f64) -> f64) -> f64 {
    let mut sum = 0.0;
    for n in n_from..n_from + 100_000 {
        let nf = n as f64;
        let b = ln_term(nf).exp();
        sum += b;
        let rho = ratio(nf);
        if rho < 1.0 {
            let rest = b * rho / (1.0 - rho);
            if rest <= 1e-3 * sum || sum == 0.0 {
                return sum + rest;
            }
        }
    }
    f64::INFINITY
}

/// Time-domain majorant of the terms `n >= N` of `L_v^d(t)`.
fn time_tail_bound(params: &ModelParams, t: f64, n_from: usize) -> Result<f64> {
    let alpha = (2.0 / t + params.v_mag * params.v_mag).sqrt();
    let tail = truncation_bound(params, params.r * alpha, n_from)?;
    let p = ln_prefactor(params).exp();
    Ok(p * E * t * alpha * tail.xi_ratio + p * params.v_mag * t * tail.zeta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Series,
    Inversion,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Series => "series",
            Route::Inversion => "inversion",
        }
    }
}

/// `E[vol W(t)]` with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeResult {
    /// Expected volume, `vol(D) + L`.
    pub value: f64,
    /// Expected volume swept outside the ball, `L_v^d(t)`.
    pub swept: f64,
    /// Certified bound on the omitted series terms.
    pub trunc_bound: f64,
    /// Quadrature (series route) or inversion (transform route) error estimate.
    pub quad_bound: f64,
    pub terms_used: usize,
    pub route: Route,
}

fn check_inputs(t: f64, tol: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be >= 0, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be > 0, got {tol}")));
    }
    Ok(())
}

/// One term `P ξ_{ν,n} g_n(t)` of the time-domain series and its quadrature
/// error. `partial` is the magnitude of the sum so far; later terms only
/// need absolute accuracy against it.
fn series_term(params: &ModelParams, n: u32, t: f64, tol: f64, partial: f64) -> Result<(f64, f64)> {
    let c = coefficients(params, n)?;
    let m = params.d + 2 * n;
    let profile = DriftlessProfile::new(m, params.r)?;
    // g_n = 2 Σ̃ / (S_{m-1} r^{m-1})
    let coef = (LogScaled::from_log(ln_prefactor(params) + std::f64::consts::LN_2) * c.xi).to_f64();
    let abs_tol = if coef != 0.0 { 1e-2 * tol * partial / coef.abs() } else { f64::INFINITY };
    let (ts, err) = profile.tilde_sigma_normalized(params.v_mag, t, tol, abs_tol)?;
    Ok((coef * ts, coef.abs() * err))
}

fn zeta_term(params: &ModelParams, n: u32, t: f64) -> Result<f64> {
    let c = coefficients(params, n)?;
    let q = LogScaled::from_log(ln_prefactor(params) + params.v_mag.ln() + t.ln());
    Ok((q * c.zeta).to_f64())
}

/// Series route for `E[vol W(t)]`: terms are added until the certified
/// remainder of both series falls below `tol` times the swept volume.
pub fn expected_volume(params: &ModelParams, t: f64, tol: f64) -> Result<VolumeResult> {
    params.require_drift()?;
    check_inputs(t, tol)?;
    let ball = params.ball_volume();
    if t == 0.0 {
        return Ok(VolumeResult {
            value: ball,
            swept: 0.0,
            trunc_bound: 0.0,
            quad_bound: 0.0,
            terms_used: 0,
            route: Route::Series,
        });
    }
    let mut xi_sum = PairedSum::new();
    let mut zeta_sum = PairedSum::new();
    let mut quad = 0.0;
    for n in 0..MAX_TERMS {
        let partial = (xi_sum.value() + zeta_sum.value()).abs();
        let (term, err) = series_term(params, n as u32, t, tol, partial)?;
        xi_sum.add(term);
        zeta_sum.add(zeta_term(params, n as u32, t)?);
        quad += err;
        let swept = xi_sum.value() + zeta_sum.value();
        let bound = time_tail_bound(params, t, n + 1)?;
        if bound <= tol * swept.abs() {
            return Ok(VolumeResult {
                value: ball + swept,
                swept,
                trunc_bound: bound,
                quad_bound: quad,
                terms_used: n + 1,
                route: Route::Series,
            });
        }
    }
    Err(Error::numeric(
        "series route",
        format!("truncation budget not reached within {MAX_TERMS} terms"),
    ))
}

/// The series route with exactly `terms` terms, for truncation audits.
pub fn expected_volume_with_terms(params: &ModelParams, t: f64, terms: usize, tol: f64) -> Result<VolumeResult> {
    params.require_drift()?;
    check_inputs(t, tol)?;
    if terms == 0 || terms > MAX_TERMS {
        return Err(Error::domain(format!("term count must be in 1..={MAX_TERMS}, got {terms}")));
    }
    let ball = params.ball_volume();
    let mut xi_sum = PairedSum::new();
    let mut zeta_sum = PairedSum::new();
    let mut quad = 0.0;
    for n in 0..terms as u32 {
        if t > 0.0 {
            let partial = (xi_sum.value() + zeta_sum.value()).abs();
            let (term, err) = series_term(params, n, t, tol, partial)?;
            xi_sum.add(term);
            zeta_sum.add(zeta_term(params, n, t)?);
            quad += err;
        }
    }
    let swept = xi_sum.value() + zeta_sum.value();
    let trunc_bound = if t > 0.0 { time_tail_bound(params, t, terms)? } else { 0.0 };
    Ok(VolumeResult {
        value: ball + swept,
        swept,
        trunc_bound,
        quad_bound: quad,
        terms_used: terms,
        route: Route::Series,
    })
}

/// Transform route: Gaver–Stehfest inversion of the transform series.
///
/// All samples share one term count, chosen so that the time-domain
/// remainder is below `tol` times the estimate and every sampled transform
/// value has converged to machine precision.
pub fn invert_transform(params: &ModelParams, t: f64, tol: f64) -> Result<VolumeResult> {
    params.require_drift()?;
    check_inputs(t, tol)?;
    if t == 0.0 {
        return Err(Error::domain("the transform route needs t > 0"));
    }
    let cfg = InversionConfig::default();
    let lambdas = sample_points(t, &cfg);
    let mut series: Vec<TransformSeries<'_>> = lambdas
        .iter()
        .map(|&l| TransformPoint::new(l, params.v_mag).map(|p| TransformSeries::new(params, p)))
        .collect::<Result<_>>()?;
    loop {
        for s in series.iter_mut() {
            s.push_term()?;
        }
        let terms = series[0].terms;
        let samples: Vec<f64> = series.iter().map(|s| s.value()).collect();
        let swept = combine_samples(&samples, t, &cfg)?;
        let bound = time_tail_bound(params, t, terms)?;
        let mut samples_converged = true;
        for s in &series {
            if s.tail_bound()? > f64::EPSILON * s.value().abs() {
                samples_converged = false;
                break;
            }
        }
        if bound <= tol * swept.abs() && samples_converged {
            // lower-order estimate from the same samples gauges the inversion error
            let low = InversionConfig::new(cfg.order() - 2, cfg.precision())?;
            let low_est = combine_samples(&samples[..low.order()], t, &low)?;
            return Ok(VolumeResult {
                value: params.ball_volume() + swept,
                swept,
                trunc_bound: bound,
                quad_bound: (swept - low_est).abs(),
                terms_used: terms,
                route: Route::Inversion,
            });
        }
        if terms >= MAX_TERMS {
            return Err(Error::numeric(
                "transform route",
                format!("truncation budget not reached within {MAX_TERMS} terms"),
            ));
        }
    }
}

/// Upper bound `(x/2)^μ e^x / Γ(μ+1)` on `I_μ(x)`, exposed for audits.
pub fn bessel_i_bound(mu: f64, x: f64) -> f64 {
    ln_bessel_i_upper(mu, x).exp()
}

/// Upper bound `8 (2x+1)^{μ+1} μ / x` on `K_{μ+1}(x)/K_μ(x)` for `μ >= 1/2`.
pub fn bessel_k_ratio_bound(mu: f64, x: f64) -> f64 {
    ln_bessel_k_ratio_upper(mu, x).exp()
}
