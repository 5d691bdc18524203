use proptest::prelude::*;
use sausage_core::quad::{integrate_to_infinity, Tolerance};
use sausage_core::specfun::{bessel_i, bessel_k, bessel_k_ratio};
use sausage_core::Order;

// ln I_mu(x), ln K_mu(x) from a 40-digit reference implementation
const TABLE: &str = include_str!("data/bessel_reference.csv");

fn rows() -> impl Iterator<Item = (f64, f64, f64, f64)> {
    TABLE.lines().skip(1).map(|l| {
        let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
        (v[0], v[1], v[2], v[3])
    })
}

#[test]
fn matches_reference_table() {
    let mut worst: f64 = 0.0;
    for (mu, x, ln_i, ln_k) in rows() {
        let o = Order::new(mu).unwrap();
        let gi = bessel_i(o, x).unwrap().logmag();
        let gk = bessel_k(o, x).unwrap().logmag();
        // an error e in the log is a relative error e in the value
        let tol = 2e-12 + 1e-14 * ln_i.abs().max(ln_k.abs());
        assert!((gi - ln_i).abs() <= tol, "I mu={mu} x={x}: {gi} vs {ln_i}");
        assert!((gk - ln_k).abs() <= tol, "K mu={mu} x={x}: {gk} vs {ln_k}");
        worst = worst.max((gi - ln_i).abs()).max((gk - ln_k).abs());
    }
    println!("worst log error {worst:e}");
}

#[test]
fn k0_from_integral_representation() {
    // K_mu(x) = ∫_0^∞ e^{-x cosh s} cosh(mu s) ds
    for (mu, x) in [(0.0, 1.0), (0.3, 2.5), (2.0, 0.4), (4.5, 7.0)] {
        let (q, _) = integrate_to_infinity(
            |s: f64| (-x * s.cosh()).exp() * (mu * s).cosh(),
            0.0,
            1.0,
            Tolerance::relative(1e-14),
        )
        .unwrap();
        let k = bessel_k(Order::new(mu).unwrap(), x).unwrap().to_f64();
        assert!((k - q).abs() <= 1e-12 * q, "mu={mu} x={x}: {k} vs {q}");
    }
}

#[test]
fn k_ratio_known_value() {
    // K_1(1)/K_0(1)
    let r = bessel_k_ratio(Order::new(0.0).unwrap(), 1.0).unwrap();
    assert!((r - 1.429_625_398_260_464).abs() < 1e-12, "{r}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn wronskian(mu in 0.0f64..50.0, lz in (1e-3f64).ln()..(500f64).ln()) {
        let z = lz.exp();
        let o = Order::new(mu).unwrap();
        let o1 = Order::new(mu + 1.0).unwrap();
        let a = bessel_k(o1, z).unwrap() * bessel_i(o, z).unwrap();
        let b = bessel_k(o, z).unwrap() * bessel_i(o1, z).unwrap();
        let w = (a + b).to_f64() * z;
        prop_assert!((w - 1.0).abs() < 1e-11, "mu={} z={} w={}", mu, z, w);
    }

    #[test]
    fn k_ratio_exceeds_one(mu in 0.0f64..40.0, x in 1e-3f64..200.0) {
        let r = bessel_k_ratio(Order::new(mu).unwrap(), x).unwrap();
        prop_assert!(r >= 1.0);
    }
}
