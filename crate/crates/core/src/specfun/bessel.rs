//! Modified Bessel functions `I_μ`, `K_μ` of real order `μ >= 0` and positive
//! argument, evaluated in log space.
//!
//! `K` starts from the reduced order `f = μ - round(μ)` in `[-1/2, 1/2)`:
//! Temme's series for `x <= 2`, Steed's continued fraction (CF2) above, then
//! forward recurrence on the ratio `K_{f+k+1}/K_{f+k}`, which is the stable
//! direction. `I` uses its power series when `x <= max(10, μ)`; otherwise the
//! ratio `I_{μ+1}/I_μ` from CF1 is combined with `K` through the Wronskian.

use std::f64::consts::PI;

use super::{ln_gamma, LogScaled, Order};
use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 100_000;
const TINY: f64 = 1e-300;

/// Taylor coefficients of `1/Γ(1+x)` about 0.
const RGAMMA1P: [f64; 29] = [
    1.0,
    5.772_156_649_015_329e-1,
    -6.558_780_715_202_539e-1,
    -4.200_263_503_409_524e-2,
    1.665_386_113_822_914_8e-1,
    -4.219_773_455_554_433e-2,
    -9.621_971_527_876_973e-3,
    7.218_943_246_663_1e-3,
    -1.165_167_591_859_065_2e-3,
    -2.152_416_741_149_509_8e-4,
    1.280_502_823_881_162e-4,
    -2.013_485_478_078_824e-5,
    -1.250_493_482_142_670_6e-6,
    1.133_027_231_981_696e-6,
    -2.056_338_416_977_607e-7,
    6.116_095_104_481_416e-9,
    5.002_007_644_469_223e-9,
    -1.181_274_570_487_02e-9,
    1.043_426_711_691_100_5e-10,
    7.782_263_439_905_071e-12,
    -3.696_805_618_642_206e-12,
    5.100_370_287_454_476e-13,
    -2.058_326_053_566_506_6e-14,
    -5.348_122_539_423_018e-15,
    1.226_778_628_238_260_8e-15,
    -1.181_259_301_697_458_8e-16,
    1.186_692_254_751_600_4e-18,
    1.412_380_655_318_031_9e-18,
    -2.298_745_684_435_37e-19,
];

/// Returns `(gam1, gam2, 1/Γ(1+f), 1/Γ(1-f))` with
/// `gam1 = (1/Γ(1-f) - 1/Γ(1+f)) / (2f)` and `gam2 = (1/Γ(1-f) + 1/Γ(1+f)) / 2`.
fn temme_gammas(f: f64) -> (f64, f64, f64, f64) {
    let f2 = f * f;
    let mut even = 0.0;
    let mut odd = 0.0;
    for (k, c) in RGAMMA1P.iter().enumerate().rev() {
        if k % 2 == 0 {
            even = even * f2 + c;
        } else {
            odd = odd * f2 + c;
        }
    }
    // 1/Γ(1+f) = even(f²) + f·odd(f²)
    let gam1 = -odd;
    let gam2 = even;
    (gam1, gam2, gam2 + f * odd, gam2 - f * odd)
}

/// Temme's series: `(ln K_f(x), K_{f+1}(x)/K_f(x))` for `|f| <= 1/2`, small `x`.
fn k_temme(f: f64, x: f64) -> (f64, f64) {
    let x2 = 0.5 * x;
    let pimu = PI * f;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = f * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(f);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee / gampl;
    let mut q = 0.5 / (ee * gammi);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - f * f);
        c *= dd / fi;
        p /= fi - f;
        q /= fi + f;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum.ln(), sum1 * 2.0 / x / sum)
}

/// Steed's continued fraction: `(ln K_f(x), K_{f+1}(x)/K_f(x))` for `x > 2`.
fn k_steed(f: f64, x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - f * f;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    let h = a1 * h;
    let ln_k = 0.5 * (PI / (2.0 * x)).ln() - x - s.ln();
    (ln_k, (f + x + 0.5 - h) / x)
}

/// `(ln K_μ(x), K_{μ+1}(x)/K_μ(x))` for `μ >= 0`, `x > 0`.
pub(crate) fn log_bessel_k_and_ratio(mu: f64, x: f64) -> (f64, f64) {
    let nl = (mu + 0.5).floor();
    let f = mu - nl;
    let (mut ln_k, mut ratio) = if f == -0.5 {
        // K_{-1/2} = K_{1/2} = sqrt(π/2x) e^{-x}
        (0.5 * (PI / (2.0 * x)).ln() - x, 1.0)
    } else if x <= 2.0 {
        k_temme(f, x)
    } else {
        k_steed(f, x)
    };
    let steps = nl as usize;
    for k in 0..steps {
        ln_k += ratio.ln();
        ratio = 2.0 * (f + k as f64 + 1.0) / x + 1.0 / ratio;
    }
    (ln_k, ratio)
}

pub(crate) fn log_bessel_k(mu: f64, x: f64) -> f64 {
    log_bessel_k_and_ratio(mu, x).0
}

/// `I_{μ+1}(x)/I_μ(x)` by the modified Lentz algorithm.
fn i_ratio_cf1(mu: f64, x: f64) -> f64 {
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..MAX_ITER {
        let b = 2.0 * (mu + k as f64) / x;
        d += b;
        if d == 0.0 {
            d = TINY;
        }
        c = b + 1.0 / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    f
}

/// `ln I_μ(x)` from the power series; all terms are positive.
fn log_i_series(mu: f64, x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut scale = 0.0;
    for k in 1..MAX_ITER {
        let fk = k as f64;
        term *= y / (fk * (mu + fk));
        sum += term;
        if term < EPS * sum && fk * (mu + fk) > y {
            break;
        }
        if sum > 1e250 {
            scale += sum.ln();
            term /= sum;
            sum = 1.0;
        }
    }
    mu * (0.5 * x).ln() - ln_gamma(mu + 1.0) + scale + sum.ln()
}

pub(crate) fn log_bessel_i(mu: f64, x: f64) -> f64 {
    if mu == 0.5 {
        // sqrt(2/(πx)) sinh x
        return 0.5 * (2.0 / (PI * x)).ln() + x + (-(-2.0 * x).exp()).ln_1p() - std::f64::consts::LN_2;
    }
    if x <= mu.max(10.0) {
        return log_i_series(mu, x);
    }
    let h = i_ratio_cf1(mu, x);
    let (ln_k, ratio) = log_bessel_k_and_ratio(mu, x);
    -x.ln() - ln_k - (ratio + h).ln()
}

fn check_arg(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} needs a finite x > 0, got {x}")))
    }
}

/// Modified Bessel function of the first kind.
pub fn bessel_i(mu: Order, x: f64) -> Result<LogScaled> {
    check_arg("bessel_i", x)?;
    Ok(LogScaled::from_log(log_bessel_i(mu.value(), x)))
}

/// Macdonald function `K_μ`.
pub fn bessel_k(mu: Order, x: f64) -> Result<LogScaled> {
    check_arg("bessel_k", x)?;
    Ok(LogScaled::from_log(log_bessel_k(mu.value(), x)))
}

/// `K_{μ+1}(x) / K_μ(x)`, never formed from the individual values.
pub fn bessel_k_ratio(mu: Order, x: f64) -> Result<f64> {
    check_arg("bessel_k_ratio", x)?;
    Ok(log_bessel_k_and_ratio(mu.value(), x).1)
}

/// Closed form of `∫_c^∞ x I_μ(ax) K_μ(bx) dx` for `0 < a < b`, `c > 0`.
pub fn bessel_cross_integral(a: f64, b: f64, c: f64, mu: Order) -> Result<f64> {
    if !(a > 0.0 && a < b && c > 0.0) || !b.is_finite() {
        return Err(Error::domain(format!(
            "bessel_cross_integral needs 0 < a < b and c > 0, got a={a}, b={b}, c={c}"
        )));
    }
    let m = mu.value();
    let (ac, bc) = (a * c, b * c);
    let (ln_kb, kb_ratio) = log_bessel_k_and_ratio(m, bc);
    let ln_ia = log_bessel_i(m, ac);
    let ln_ia1 = log_bessel_i(m + 1.0, ac);
    // ac I_{μ+1}(ac) K_μ(bc) + bc I_μ(ac) K_{μ+1}(bc)
    let first = LogScaled::from_log(ac.ln() + ln_ia1 + ln_kb);
    let second = LogScaled::from_log(bc.ln() + ln_ia + ln_kb + kb_ratio.ln());
    let denom = LogScaled::from_f64((b - a) * (b + a));
    Ok(((first + second) / denom).to_f64())
}
