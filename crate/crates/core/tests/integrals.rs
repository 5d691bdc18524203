use sausage_core::quad::{integrate, integrate_to_infinity, Tolerance};
use sausage_core::specfun::{bessel_cross_integral, bessel_i, bessel_k, gegenbauer, gegenbauer_bessel_integral};
use sausage_core::Order;

/// ∫_c^∞ x I_mu(ax) K_mu(bx) dx by quadrature, in log space to avoid overflow.
fn cross_by_quadrature(a: f64, b: f64, c: f64, mu: f64) -> f64 {
    let o = Order::new(mu).unwrap();
    let f = |x: f64| {
        let v = bessel_i(o, a * x).unwrap() * bessel_k(o, b * x).unwrap();
        x * v.to_f64()
    };
    integrate_to_infinity(f, c, 1.0, Tolerance::relative(1e-13)).unwrap().0
}

#[test]
fn cross_integral_grid() {
    let mut worst: f64 = 0.0;
    for a in [0.5, 1.0, 2.0] {
        for gap in [0.5, 1.0, 3.0] {
            let b = a + gap;
            for c in [0.1, 0.5, 2.0] {
                for mu in [0.0, 0.75, 2.5] {
                    let closed = bessel_cross_integral(a, b, c, Order::new(mu).unwrap()).unwrap();
                    let q = cross_by_quadrature(a, b, c, mu);
                    let rel = (closed - q).abs() / q.abs();
                    worst = worst.max(rel);
                    assert!(rel < 1e-8, "a={a} b={b} c={c} mu={mu}: {closed} vs {q}");
                }
            }
        }
    }
    println!("worst relative gap {worst:e}");
}

#[test]
fn cross_integral_reference_point() {
    let closed = bessel_cross_integral(1.0, 2.0, 0.5, Order::new(0.75).unwrap()).unwrap();
    let q = cross_by_quadrature(1.0, 2.0, 0.5, 0.75);
    assert!((closed - q).abs() < 1e-8 * q);
}

#[test]
fn gegenbauer_bessel_against_quadrature() {
    for mu in [0.0, 0.5, 1.0, 2.5] {
        for n in [0u32, 1, 2, 5, 9] {
            for z in [0.3, 2.0, 7.5] {
                let o = Order::new(mu).unwrap();
                let f = |th: f64| {
                    (-z * th.cos()).exp() * gegenbauer(n, o, th.cos()).unwrap() * th.sin().powf(2.0 * mu)
                };
                let (q, _) = integrate(f, 0.0, std::f64::consts::PI, Tolerance { rel: 1e-13, abs: 1e-14 }).unwrap();
                // cancellation leaves the quadrature accurate relative to ∫|f| only
                let (l1, _) = integrate(|th: f64| f(th).abs(), 0.0, std::f64::consts::PI, Tolerance { rel: 1e-6, abs: 1e-18 }).unwrap();
                let closed = gegenbauer_bessel_integral(n, o, z).unwrap();
                assert!((closed - q).abs() <= 1e-9 * q.abs() + 1e-13 * l1, "mu={mu} n={n} z={z}: {closed} vs {q}");
            }
        }
    }
}
