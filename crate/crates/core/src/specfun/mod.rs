//! Special functions of real argument.
//!
//! Bessel values are returned as [`LogScaled`] numbers: for the orders and
//! arguments this crate needs (`I_{ν+n}(x)^2 Γ(2ν+n)` at large `n`, or
//! `K_μ(x)` at small `x`) plain doubles overflow long before the products
//! that consume them become unrepresentable.

mod bessel;
mod bounds;
mod gegenbauer;

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg};

use crate::error::{Error, Result};

pub use bessel::{bessel_cross_integral, bessel_i, bessel_k, bessel_k_ratio};
pub(crate) use bessel::{log_bessel_i, log_bessel_k, log_bessel_k_and_ratio};
pub use bounds::{
    ln_bessel_i_upper, ln_bessel_k_ratio_upper,
    check_gamma_ratio_bound, check_gegenbauer_bound, check_macdonald_bounds, BoundCheck,
};
pub use gegenbauer::{gegenbauer, gegenbauer_bessel_integral};

/// A real number stored as a sign and the natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaled {
    sign: i8,
    logmag: f64,
}

impl LogScaled {
    pub const ZERO: LogScaled = LogScaled {
        sign: 0,
        logmag: f64::NEG_INFINITY,
    };
    pub const ONE: LogScaled = LogScaled {
        sign: 1,
        logmag: 0.0,
    };

    /// Builds a value from its parts; a zero sign yields [`LogScaled::ZERO`].
    pub fn new(sign: i8, logmag: f64) -> Self {
        match sign.signum() {
            0 => Self::ZERO,
            s => LogScaled { sign: s, logmag },
        }
    }

    /// The positive number `exp(logmag)`.
    pub fn from_log(logmag: f64) -> Self {
        LogScaled { sign: 1, logmag }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogScaled {
                sign: if x > 0.0 { 1 } else { -1 },
                logmag: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn logmag(&self) -> f64 {
        self.logmag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            LogScaled {
                sign: 1,
                logmag: self.logmag,
            }
        }
    }

    pub fn recip(self) -> Self {
        LogScaled {
            sign: self.sign,
            logmag: -self.logmag,
        }
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let sign = if n % 2 == 0 { self.sign.abs() } else { self.sign };
        Self::new(sign, self.logmag * f64::from(n))
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.logmag.exp(),
        }
    }
}

/// Signed sum, formed relative to the larger magnitude.
impl Add for LogScaled {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.logmag >= other.logmag {
            (self, other)
        } else {
            (other, self)
        };
        let ratio = (small.logmag - big.logmag).exp();
        let factor = if big.sign == small.sign {
            1.0 + ratio
        } else {
            1.0 - ratio
        };
        if factor == 0.0 {
            Self::ZERO
        } else {
            LogScaled {
                sign: big.sign,
                logmag: big.logmag + factor.ln(),
            }
        }
    }
}

impl Mul for LogScaled {
    type Output = LogScaled;
    fn mul(self, rhs: LogScaled) -> LogScaled {
        Self::new(self.sign * rhs.sign, self.logmag + rhs.logmag)
    }
}

impl Div for LogScaled {
    type Output = LogScaled;
    fn div(self, rhs: LogScaled) -> LogScaled {
        assert!(rhs.sign != 0, "LogScaled division by zero");
        Self::new(self.sign * rhs.sign, self.logmag - rhs.logmag)
    }
}

impl Neg for LogScaled {
    type Output = LogScaled;
    fn neg(self) -> LogScaled {
        LogScaled {
            sign: -self.sign,
            logmag: self.logmag,
        }
    }
}

impl fmt::Display for LogScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({})", if s < 0 { "-" } else { "" }, self.logmag),
        }
    }
}

/// Non-negative Bessel or Gegenbauer order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub fn new(mu: f64) -> Result<Self> {
        if mu.is_finite() && mu >= 0.0 {
            Ok(Order(mu))
        } else {
            Err(Error::domain(format!("order must be finite and >= 0, got {mu}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0.fract() == 0.0
    }

    pub fn is_half_integer(self) -> bool {
        (self.0 - 0.5).fract() == 0.0
    }
}

impl TryFrom<f64> for Order {
    type Error = Error;
    fn try_from(mu: f64) -> Result<Self> {
        Order::new(mu)
    }
}

/// Natural log of the Gamma function for positive arguments.
pub fn gamma_ln(z: f64) -> Result<f64> {
    if z > 0.0 && z.is_finite() {
        Ok(ln_gamma(z))
    } else {
        Err(Error::domain(format!("gamma_ln needs z > 0, got {z}")))
    }
}

pub(crate) fn ln_gamma(z: f64) -> f64 {
    libm::lgamma(z)
}

/// `S_m = 2π^{(m+1)/2} / Γ((m+1)/2)`, the area of the unit sphere in `R^{m+1}`.
pub fn sphere_surface(m: u32) -> f64 {
    ln_sphere_surface(m).exp()
}

pub(crate) fn ln_sphere_surface(m: u32) -> f64 {
    let h = 0.5 * (f64::from(m) + 1.0);
    std::f64::consts::LN_2 + h * PI.ln() - ln_gamma(h)
}

/// Volume of the closed ball of radius `r` in `R^d`.
pub fn ball_volume(d: u32, r: f64) -> Result<f64> {
    if d == 0 || !(r > 0.0) {
        return Err(Error::domain(format!(
            "ball_volume needs d >= 1 and r > 0, got d={d}, r={r}"
        )));
    }
    let h = 0.5 * f64::from(d);
    Ok((h * PI.ln() + f64::from(d) * r.ln() - ln_gamma(h + 1.0)).exp())
}
