use std::f64::consts::PI;

use super::{ln_gamma, log_bessel_i, LogScaled, Order};
use crate::error::{Error, Result};

/// Gegenbauer polynomial `C_n^μ(x)`.
///
/// For `μ = 0` the normalisation is `C_0^0 = 1` and `C_n^0(cos θ) = 2 cos(nθ)/n`.
pub fn gegenbauer(n: u32, mu: Order, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("gegenbauer needs |x| <= 1, got {x}")));
    }
    let mu = mu.value();
    if n == 0 {
        return Ok(1.0);
    }
    // the three-term recurrence is stable on [-1, 1]; the explicit sum is not
    Ok(recurrence(n, mu, x))
}

#[cfg(test)]
fn explicit_sum(n: u32, mu: f64, x: f64) -> f64 {
    let two_x = 2.0 * x;
    let mut acc = crate::summation::CompensatedSum::new();
    for m in 0..=n / 2 {
        let p = n - 2 * m;
        let power = two_x.powi(p as i32);
        if power == 0.0 {
            continue;
        }
        let (mf, pf) = (f64::from(m), f64::from(p));
        let ln_coef = if mu == 0.0 {
            ln_gamma(f64::from(n) - mf) - ln_gamma(mf + 1.0) - ln_gamma(pf + 1.0)
        } else {
            ln_gamma(mu + f64::from(n) - mf) - ln_gamma(mu) - ln_gamma(mf + 1.0) - ln_gamma(pf + 1.0)
        };
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        acc.add(sign * ln_coef.exp() * power);
    }
    acc.value()
}

fn recurrence(n: u32, mu: f64, x: f64) -> f64 {
    if mu == 0.0 {
        // Chebyshev T_n, then 2 T_n / n
        let (mut t0, mut t1) = (1.0, x);
        for _ in 1..n {
            let t2 = 2.0 * x * t1 - t0;
            t0 = t1;
            t1 = t2;
        }
        return 2.0 * t1 / f64::from(n);
    }
    let (mut c0, mut c1) = (1.0, 2.0 * mu * x);
    for k in 2..=n {
        let k = f64::from(k);
        let c2 = (2.0 * x * (k + mu - 1.0) * c1 - (k + 2.0 * mu - 2.0) * c0) / k;
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// Closed form of `∫_0^π e^{-z cos θ} C_n^μ(cos θ) sin^{2μ}θ dθ`.
pub fn gegenbauer_bessel_integral(n: u32, mu: Order, z: f64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(format!(
            "gegenbauer_bessel_integral needs z > 0, got {z}"
        )));
    }
    let m = mu.value();
    let nf = f64::from(n);
    let sign = if n.is_multiple_of(2) { 1 } else { -1 };
    let value = if m == 0.0 {
        let base = PI.ln() + log_bessel_i(nf, z);
        if n == 0 {
            LogScaled::from_log(base)
        } else {
            LogScaled::new(sign, base + std::f64::consts::LN_2 - nf.ln())
        }
    } else {
        let ln_mag = m * std::f64::consts::LN_2 + 0.5 * PI.ln() + ln_gamma(m + 0.5)
            + ln_gamma(2.0 * m + nf)
            + log_bessel_i(m + nf, z)
            - ln_gamma(nf + 1.0)
            - ln_gamma(2.0 * m)
            - m * z.ln();
        LogScaled::new(sign, ln_mag)
    };
    Ok(value.to_f64())
}
