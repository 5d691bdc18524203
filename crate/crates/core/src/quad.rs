//! Adaptive Gauss–Legendre quadrature.
//!
//! Each panel is integrated with an `n`-point rule on the whole panel and on
//! its two halves; the difference is the panel's error estimate. Panels with
//! the largest estimates are bisected until the total meets the tolerance.
//! Integrands may be vector valued (`[f64; N]`), which lets several moments
//! share one set of evaluations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const DEFAULT_POINTS: usize = 10;
const MAX_PANELS: usize = 4000;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule on `[a, b]` to a vector-valued integrand.
    pub fn integrate<const N: usize, F>(&self, f: &mut F, a: f64, b: f64) -> [f64; N]
    where
        F: FnMut(f64) -> [f64; N],
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut out = [0.0; N];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let y = f(mid + half * x);
            for (o, yi) in out.iter_mut().zip(y) {
                *o += w * yi;
            }
        }
        out.map(|o| o * half)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

fn default_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(DEFAULT_POINTS))
}

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub evaluations: usize,
}

/// Tolerances for [`adaptive`]: a component is converged when its error is
/// at most `max(abs, rel·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance { rel, abs: 0.0 }
    }
}

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
    priority: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn make_panel<const N: usize, F>(rule: &GaussLegendre, f: &mut F, a: f64, b: f64) -> Panel<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let m = 0.5 * (a + b);
    let whole = rule.integrate(f, a, b);
    let left = rule.integrate(f, a, m);
    let right = rule.integrate(f, m, b);
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        value[i] = left[i] + right[i];
        error[i] = (value[i] - whole[i]).abs();
    }
    Panel {
        a,
        b,
        value,
        error,
        priority: error.iter().sum(),
    }
}

/// Globally adaptive integration of `f` over `[a, b]`.
pub fn adaptive<const N: usize, F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral<N>>
where
    F: FnMut(f64) -> [f64; N],
{
    let rule = default_rule();
    let per_panel = 3 * rule.nodes.len();
    if a == b {
        return Ok(Integral {
            value: [0.0; N],
            error: [0.0; N],
            evaluations: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(make_panel(rule, &mut f, a, b));
    let mut evaluations = per_panel;
    loop {
        let mut value = [0.0; N];
        let mut error = [0.0; N];
        for p in heap.iter() {
            for i in 0..N {
                value[i] += p.value[i];
                error[i] += p.error[i];
            }
        }
        if value.iter().chain(&error).any(|v| !v.is_finite()) {
            return Err(Error::numeric("quadrature", "integrand produced a non-finite value"));
        }
        let converged = (0..N).all(|i| error[i] <= tol.abs.max(tol.rel * value[i].abs()));
        if converged {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        if heap.len() >= MAX_PANELS {
            return Err(Error::numeric(
                "quadrature",
                format!("no convergence after {MAX_PANELS} panels (error {error:?})"),
            ));
        }
        let worst = heap.pop().expect("heap is never empty");
        let m = 0.5 * (worst.a + worst.b);
        if m <= worst.a || m >= worst.b {
            // panel cannot be split further; accept its contribution as is
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        heap.push(make_panel(rule, &mut f, worst.a, m));
        heap.push(make_panel(rule, &mut f, m, worst.b));
        evaluations += 2 * per_panel;
    }
}

/// Scalar convenience wrapper around [`adaptive`].
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let r = adaptive(|x| [f(x)], a, b, tol)?;
    Ok((r.value[0], r.error[0]))
}

/// Integral over `[a, ∞)`: panels `[a, a+w], [a+w, a+3w], …` of doubling
/// width are integrated adaptively until a panel contributes less than
/// `1e-18` of the running total.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, first_width: f64, tol: Tolerance) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    const TAIL_FRACTION: f64 = 1e-18;
    let mut lo = a;
    let mut width = first_width;
    let mut total = 0.0;
    let mut err = 0.0;
    for _ in 0..200 {
        let (v, e) = integrate(&mut f, lo, lo + width, tol)?;
        total += v;
        err += e;
        if v.abs() <= TAIL_FRACTION * total.abs() {
            return Ok((total, err));
        }
        lo += width;
        width *= 2.0;
    }
    Err(Error::numeric("quadrature", "semi-infinite tail did not decay"))
}
