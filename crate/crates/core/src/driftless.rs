//! Driftless sausage profiles `L_0^m(t)` and the damped combinations
//! `Σ_v^m(t) = e^{-|v|²t/2} L_0^m(t)` and
//! `Σ̃_v^m(t) = Σ_v^m(t) + |v|² ∫_0^t Σ_v^m + (|v|⁴/4) ∫_0^t (t-s) Σ_v^m(s) ds`.
//!
//! `L_0^m` is obtained by numerical inversion of its Laplace transform, except
//! for `m = 1` and `m = 3` where the inversion is elementary.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::laplace::{driftless_transform_normalized, invert, InversionConfig};
use crate::quad::{adaptive, Tolerance};
use crate::sausage::ModelParams;
use crate::specfun::ln_sphere_surface;

/// Smallest relative tolerance requested from the time quadrature. The
/// order-16 Stehfest weights reach `~1e8`, so inverted profiles carry
/// rounding noise of a few `1e-9`.
const MIN_QUAD_TOL: f64 = 1e-8;

/// `L_0^m` for one `(m, r)`, with a memo of inverted values.
#[derive(Debug)]
pub struct DriftlessProfile {
    m: u32,
    r: f64,
    inversion: InversionConfig,
    cache: RwLock<HashMap<u64, f64>>,
}

impl DriftlessProfile {
    pub fn new(m: u32, r: f64) -> Result<Self> {
        Self::with_inversion(m, r, InversionConfig::default())
    }

    pub fn with_inversion(m: u32, r: f64, inversion: InversionConfig) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("driftless profile needs m >= 1"));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::domain(format!("radius must be > 0, got {r}")));
        }
        Ok(DriftlessProfile {
            m,
            r,
            inversion,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `S_{m-1} r^{m-1}`, the factor stripped by the normalised profile.
    fn ln_scale(&self) -> f64 {
        ln_sphere_surface(self.m - 1) + f64::from(self.m - 1) * self.r.ln()
    }

    /// `L_0^m(t)`.
    pub fn volume(&self, t: f64) -> Result<f64> {
        Ok(self.normalized(t)? * self.ln_scale().exp())
    }

    /// `L_0^m(t)` by numerical inversion even where a closed form exists.
    pub fn volume_by_inversion(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok(self.inverted(t)? * self.ln_scale().exp())
    }

    /// `L_0^m(t) / (S_{m-1} r^{m-1})`.
    pub(crate) fn normalized(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        match self.m {
            1 => Ok((2.0 * t / PI).sqrt()),
            3 => {
                let r = self.r;
                Ok((2.0 * PI * r * t + 4.0 * r * r * (2.0 * PI * t).sqrt()) / (4.0 * PI * r * r))
            }
            _ => self.inverted(t),
        }
    }

    fn inverted(&self, t: f64) -> Result<f64> {
        let key = t.to_bits();
        if let Some(&v) = self.cache.read().expect("cache lock poisoned").get(&key) {
            return Ok(v);
        }
        let (m, r) = (self.m, self.r);
        let v = invert(|l| driftless_transform_normalized(m, r, l), t, &self.inversion)?;
        self.cache.write().expect("cache lock poisoned").insert(key, v);
        Ok(v)
    }

    /// Normalised `Σ̃_v^m(t)` and its quadrature error estimate; the
    /// quadrature stops at relative error `tol` or absolute error `abs_tol`.
    pub(crate) fn tilde_sigma_normalized(&self, v_mag: f64, t: f64, tol: f64, abs_tol: f64) -> Result<(f64, f64)> {
        check_time(t)?;
        if t == 0.0 {
            return Ok((0.0, 0.0));
        }
        let v2 = v_mag * v_mag;
        let head = (-0.5 * v2 * t).exp() * self.normalized(t)?;
        if v2 == 0.0 {
            return Ok((head, 0.0));
        }
        // s = u², which removes the sqrt(s) behaviour of L_0^m at 0
        let mut failure = None;
        let integrand = |u: f64| {
            let s = u * u;
            let sigma = match self.normalized(s) {
                Ok(l) => (-0.5 * v2 * s).exp() * l,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            };
            let w = 2.0 * u * sigma;
            [w, (t - s) * w]
        };
        let tol = Tolerance {
            rel: tol.max(MIN_QUAD_TOL),
            abs: abs_tol,
        };
        let res = adaptive(integrand, 0.0, t.sqrt(), tol);
        if let Some(e) = failure {
            return Err(e);
        }
        let res = res?;
        let c2 = 0.25 * v2 * v2;
        let value = head + v2 * res.value[0] + c2 * res.value[1];
        let err = v2 * res.error[0] + c2 * res.error[1];
        Ok((value, err))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("time must be >= 0, got {t}")))
    }
}

/// Expected excess volume `L_0^m(t)` of the driftless sausage.
pub fn driftless_volume(m: u32, r: f64, t: f64) -> Result<f64> {
    DriftlessProfile::new(m, r)?.volume(t)
}

/// `Σ_v^m(t) = e^{-|v|²t/2} L_0^m(t)` with `r` and `|v|` from `params`.
pub fn sigma(params: &ModelParams, m: u32, t: f64) -> Result<f64> {
    let l = driftless_volume(m, params.r(), t)?;
    Ok((-0.5 * params.v_mag() * params.v_mag() * t).exp() * l)
}

/// `Σ̃_v^m(t)` with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TildeSigma {
    pub value: f64,
    pub quad_error: f64,
}

pub fn tilde_sigma(params: &ModelParams, m: u32, t: f64, tol: f64) -> Result<TildeSigma> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be > 0, got {tol}")));
    }
    let profile = DriftlessProfile::new(m, params.r())?;
    let (v, e) = profile.tilde_sigma_normalized(params.v_mag(), t, tol, 0.0)?;
    let scale = profile.ln_scale().exp();
    Ok(TildeSigma {
        value: v * scale,
        quad_error: e * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn vanishes_at_time_zero() {
        for m in 1..=6 {
            assert_eq!(driftless_volume(m, 1.3, 0.0).unwrap(), 0.0);
        }
        let p = ModelParams::new(3, 1.0, 0.7).unwrap();
        assert_eq!(sigma(&p, 3, 0.0).unwrap(), 0.0);
        assert_eq!(tilde_sigma(&p, 5, 0.0, 1e-8).unwrap().value, 0.0);
    }

    #[test]
    fn closed_forms() {
        let v = driftless_volume(1, 1.0, 2.0).unwrap();
        assert!(rel(v, 2.0 * (4.0 / PI).sqrt()) < 1e-15);
        assert!((v - 2.256_758_3).abs() < 1e-7);
        let v = driftless_volume(3, 1.0, 1.0).unwrap();
        assert!((v - 16.309_7).abs() < 1e-4);
    }

    #[test]
    fn inversion_matches_low_dimensional_closed_forms() {
        for m in [1u32, 3] {
            let prof = DriftlessProfile::new(m, 1.0).unwrap();
            for t in [0.01, 0.3, 2.0, 40.0] {
                let a = prof.volume(t).unwrap();
                let b = prof.volume_by_inversion(t).unwrap();
                assert!(rel(b, a) < 1e-6, "m={m} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn sigma_examples() {
        let p0 = ModelParams::new(3, 1.0, 0.0).unwrap();
        assert_eq!(sigma(&p0, 4, 1.5).unwrap(), driftless_volume(4, 1.0, 1.5).unwrap());
        let p = ModelParams::new(3, 1.0, 1.0).unwrap();
        let s = sigma(&p, 3, 2.0).unwrap();
        let expect = (-1f64).exp() * (4.0 * PI + 8.0 * PI.sqrt());
        assert!(rel(s, expect) < 1e-14);
        assert!((s - 9.839_3).abs() < 1e-4);
    }

    #[test]
    fn tilde_sigma_without_drift_is_the_profile() {
        let p = ModelParams::new(3, 1.0, 0.0).unwrap();
        let ts = tilde_sigma(&p, 4, 2.5, 1e-8).unwrap();
        assert_eq!(ts.value, driftless_volume(4, 1.0, 2.5).unwrap());
        assert_eq!(ts.quad_error, 0.0);
    }

    #[test]
    fn tilde_sigma_m3_against_elementary_integrals() {
        // Σ(s) = e^{-cs}(2πs + 4√(2πs)), c = v²/2; integrate in closed form via
        // the incomplete gamma of order 3/2 evaluated by a fine midpoint rule.
        let v: f64 = 0.5;
        let t: f64 = 1.0;
        let p = ModelParams::new(3, 1.0, v).unwrap();
        let c = 0.5 * v * v;
        let sig = |s: f64| (-c * s).exp() * (2.0 * PI * s + 4.0 * (2.0 * PI * s).sqrt());
        let n = 2_000_000;
        let h = t / n as f64;
        let (mut i1, mut i2) = (0.0, 0.0);
        for k in 0..n {
            let s = (k as f64 + 0.5) * h;
            i1 += sig(s) * h;
            i2 += (t - s) * sig(s) * h;
        }
        let expect = sig(t) + v * v * i1 + 0.25 * v.powi(4) * i2;
        let got = tilde_sigma(&p, 3, t, 1e-10).unwrap();
        assert!(rel(got.value, expect) < 1e-8, "{} vs {expect}", got.value);
    }

    #[test]
    fn ordering_of_profiles() {
        let p = ModelParams::new(2, 1.0, 0.8).unwrap();
        for m in [2u32, 4, 5] {
            for t in [0.2, 1.0, 4.0] {
                let s = sigma(&p, m, t).unwrap();
                let ts = tilde_sigma(&p, m, t, 1e-8).unwrap().value;
                assert!(ts >= s && s >= 0.0);
            }
        }
    }

    #[test]
    fn profile_is_increasing() {
        let prof = DriftlessProfile::new(4, 1.0).unwrap();
        let mut last = 0.0;
        for k in 1..30 {
            let v = prof.volume(0.1 * f64::from(k)).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn cache_is_shared_across_threads() {
        let prof = DriftlessProfile::new(6, 1.0).unwrap();
        let vals: Vec<f64> = std::thread::scope(|s| {
            let hs: Vec<_> = (0..4).map(|_| s.spawn(|| prof.volume(1.25).unwrap())).collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect()
        });
        assert!(vals.windows(2).all(|w| w[0] == w[1]));
    }
}
