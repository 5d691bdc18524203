//! Laplace-domain evaluators and a real-axis numerical inverter.
//!
//! Inversion uses the Gaver–Stehfest formula
//! `f(t) ≈ (ln 2 / t) Σ_{k=1}^{N} V_k F(k ln 2 / t)`, which only samples the
//! transform on the positive real axis, so no complex-argument Bessel
//! functions are needed.

use std::f64::consts::LN_2;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::sausage::{coefficients, ln_prefactor, truncation_bound, ModelParams, MAX_TERMS};
use crate::specfun::{ln_sphere_surface, log_bessel_k_and_ratio, LogScaled, Order};
use crate::summation::{CompensatedSum, PairedSum};

/// Transform evaluations clamp `λ` from below at this value.
pub const MIN_LAMBDA: f64 = 1e-12;

/// A Laplace variable together with `α = sqrt(2λ + |v|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformPoint {
    lambda: f64,
    alpha: f64,
}

impl TransformPoint {
    pub fn new(lambda: f64, v_mag: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("Laplace variable must be > 0, got {lambda}")));
        }
        let lambda = lambda.max(MIN_LAMBDA);
        Ok(TransformPoint {
            lambda,
            alpha: (2.0 * lambda + v_mag * v_mag).sqrt(),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    #[default]
    Standard,
    /// Weights and accumulation in double-double arithmetic.
    Extended,
}

/// Gaver–Stehfest settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InversionConfig {
    order: usize,
    precision: Precision,
}

impl Default for InversionConfig {
    fn default() -> Self {
        InversionConfig {
            order: 16,
            precision: Precision::Standard,
        }
    }
}

impl InversionConfig {
    pub const MIN_ORDER: usize = 8;
    pub const MAX_ORDER: usize = 24;

    pub fn new(order: usize, precision: Precision) -> Result<Self> {
        if !order.is_multiple_of(2) || !(Self::MIN_ORDER..=Self::MAX_ORDER).contains(&order) {
            return Err(Error::domain(format!(
                "Stehfest order must be even and within [{}, {}], got {order}",
                Self::MIN_ORDER,
                Self::MAX_ORDER
            )));
        }
        Ok(InversionConfig { order, precision })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }
}

/// Stehfest weights as double-double pairs `(hi, lo)`, computed exactly.
fn weights(order: usize) -> &'static [[f64; 2]] {
    static TABLE: OnceLock<Vec<Vec<[f64; 2]>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        (0..=InversionConfig::MAX_ORDER)
            .map(|n| {
                if n >= InversionConfig::MIN_ORDER && n % 2 == 0 {
                    exact_weights(n)
                } else {
                    Vec::new()
                }
            })
            .collect()
    });
    &table[order]
}

fn exact_weights(order: usize) -> Vec<[f64; 2]> {
    let half = order / 2;
    let fact: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), {
        let mut k = 0u32;
        move |prev| {
            k += 1;
            Some(prev * BigInt::from(k))
        }
    })
    .take(2 * order + 2)
    .collect();
    (1..=order)
        .map(|k| {
            let mut sum = BigRational::zero();
            for j in k.div_ceil(2)..=k.min(half) {
                let num = BigInt::from(j).pow(half as u32) * &fact[2 * j];
                let den = &fact[half - j] * &fact[j] * &fact[j - 1] * &fact[k - j] * &fact[2 * j - k];
                sum += BigRational::new(num, den);
            }
            if (k + half) % 2 == 1 {
                sum = -sum;
            }
            let hi = sum.to_f64().expect("Stehfest weight fits in f64");
            let lo = (sum - BigRational::from_f64(hi).expect("finite weight"))
                .to_f64()
                .unwrap_or(0.0);
            [hi, lo]
        })
        .collect()
}

/// The Stehfest weights `V_1..V_N` rounded to double precision.
pub fn stehfest_weights(cfg: &InversionConfig) -> Vec<f64> {
    weights(cfg.order).iter().map(|w| w[0]).collect()
}

/// Laplace variables `k ln 2 / t`, `k = 1..=order`, sampled by [`invert`].
pub fn sample_points(t: f64, cfg: &InversionConfig) -> Vec<f64> {
    let a = LN_2 / t;
    (1..=cfg.order).map(|k| k as f64 * a).collect()
}

/// Combines transform samples taken at [`sample_points`] into the estimate.
pub fn combine_samples(samples: &[f64], t: f64, cfg: &InversionConfig) -> Result<f64> {
    debug_assert_eq!(samples.len(), cfg.order);
    let w = weights(cfg.order);
    let a = LN_2 / t;
    let value = match cfg.precision {
        Precision::Standard => {
            let acc: CompensatedSum = w.iter().zip(samples).map(|(wk, fk)| wk[0] * fk).collect();
            acc.value()
        }
        Precision::Extended => {
            let mut acc = DoubleDouble::ZERO;
            for (wk, &fk) in w.iter().zip(samples) {
                acc = acc.add(DoubleDouble::mul_f64(wk[0], wk[1], fk));
            }
            acc.value()
        }
    } * a;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::numeric("laplace inversion", format!("non-finite estimate at t={t}")))
    }
}

/// Gaver–Stehfest estimate of the inverse transform of `f` at `t`.
pub fn invert<F>(f: F, t: f64, cfg: &InversionConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("inversion time must be > 0, got {t}")));
    }
    let samples: Vec<f64> = sample_points(t, cfg).into_iter().map(f).collect();
    combine_samples(&samples, t, cfg)
}

#[derive(Debug, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    /// `(hi + lo) * x` with an exact leading product.
    fn mul_f64(hi: f64, lo: f64, x: f64) -> DoubleDouble {
        let p = hi * x;
        let e = hi.mul_add(x, -p) + lo * x;
        let (s, c) = Self::two_sum(p, e);
        DoubleDouble { hi: s, lo: c }
    }

    fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (hi, lo) = Self::two_sum(s, e + self.lo + o.lo);
        DoubleDouble { hi, lo }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// `F_μ(λ) = α K_{μ+1}(rα) / (λ² K_μ(rα))`.
pub fn f_mu(params: &ModelParams, mu: Order, p: &TransformPoint) -> f64 {
    let ratio = log_bessel_k_and_ratio(mu.value(), params.r() * p.alpha()).1;
    p.alpha() * ratio / (p.lambda() * p.lambda())
}

/// `K_{m/2}(z) / (sqrt(2λ³) K_{m/2-1}(z))` with `z = r sqrt(2λ)`: the driftless
/// transform divided by `S_{m-1} r^{m-1}`.
pub(crate) fn driftless_transform_normalized(m: u32, r: f64, lambda: f64) -> f64 {
    let lambda = lambda.max(MIN_LAMBDA);
    let ratio = if m == 1 {
        1.0 // K_{1/2} / K_{-1/2}
    } else {
        let z = r * (2.0 * lambda).sqrt();
        log_bessel_k_and_ratio(0.5 * f64::from(m) - 1.0, z).1
    };
    ratio / (2.0 * lambda * lambda * lambda).sqrt()
}

/// Laplace transform of the driftless excess volume `L_0^m`.
pub fn driftless_transform(m: u32, r: f64, lambda: f64) -> Result<f64> {
    if m == 0 || !(r > 0.0) {
        return Err(Error::domain(format!("driftless transform needs m >= 1 and r > 0, got m={m}, r={r}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("Laplace variable must be > 0, got {lambda}")));
    }
    let scale = (ln_sphere_surface(m - 1) + f64::from(m - 1) * r.ln()).exp();
    Ok(scale * driftless_transform_normalized(m, r, lambda))
}

/// A series value with its certified truncation remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub trunc_bound: f64,
    pub terms_used: usize,
}

/// Transform of the drifted excess volume, `∫_0^∞ e^{-λt} L_v^d(t) dt`.
///
/// Both series are summed until the explicit tail majorants certify a
/// remainder below `tol` times the partial sum.
pub fn transform_l(params: &ModelParams, lambda: f64, tol: f64) -> Result<SeriesValue> {
    params.require_drift()?;
    let point = TransformPoint::new(lambda, params.v_mag())?;
    let mut state = TransformSeries::new(params, point);
    loop {
        state.push_term()?;
        let bound = state.tail_bound()?;
        let value = state.value();
        if bound <= tol * value.abs() {
            return Ok(SeriesValue {
                value,
                trunc_bound: bound,
                terms_used: state.terms,
            });
        }
        if state.terms >= MAX_TERMS {
            return Err(Error::numeric(
                "transform series",
                format!("remainder {bound:e} above tolerance after {MAX_TERMS} terms"),
            ));
        }
    }
}

/// Incremental evaluation of the two series in the transform at one point.
pub(crate) struct TransformSeries<'a> {
    params: &'a ModelParams,
    point: TransformPoint,
    ln_p: f64,
    xi_part: PairedSum,
    zeta_part: PairedSum,
    pub(crate) terms: usize,
}

impl<'a> TransformSeries<'a> {
    pub(crate) fn new(params: &'a ModelParams, point: TransformPoint) -> Self {
        TransformSeries {
            params,
            point,
            ln_p: ln_prefactor(params),
            xi_part: PairedSum::new(),
            zeta_part: PairedSum::new(),
            terms: 0,
        }
    }

    pub(crate) fn push_term(&mut self) -> Result<()> {
        let n = self.terms as u32;
        let c = coefficients(self.params, n)?;
        let mu = self.params.nu() + f64::from(n);
        let lambda = self.point.lambda();
        let ratio = log_bessel_k_and_ratio(mu, self.params.r() * self.point.alpha()).1;
        let ln_f = self.point.alpha().ln() + ratio.ln() - 2.0 * lambda.ln();
        let p = LogScaled::from_log(self.ln_p);
        self.xi_part.add((p * c.xi * LogScaled::from_log(ln_f)).to_f64());
        let q = LogScaled::from_log(self.ln_p + self.params.v_mag().ln() - 2.0 * lambda.ln());
        self.zeta_part.add((q * c.zeta).to_f64());
        self.terms += 1;
        Ok(())
    }

    pub(crate) fn value(&self) -> f64 {
        self.xi_part.value() + self.zeta_part.value()
    }

    /// Majorant of everything not yet summed.
    pub(crate) fn tail_bound(&self) -> Result<f64> {
        let x = self.params.r() * self.point.alpha();
        let tail = truncation_bound(self.params, x, self.terms)?;
        let lambda = self.point.lambda();
        let p = self.ln_p.exp();
        Ok(p * self.point.alpha() / (lambda * lambda) * tail.xi_ratio
            + p * self.params.v_mag() / (lambda * lambda) * tail.zeta)
    }
}
