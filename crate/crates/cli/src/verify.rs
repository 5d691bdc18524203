//! Cross-check battery behind `sausage verify`.

use std::io::Write;

use sausage_core::asymptotics::{aleph, aleph_phi_form};
use sausage_core::driftless::tilde_sigma;
use sausage_core::laplace::{f_mu, invert, InversionConfig, TransformPoint};
use sausage_core::sausage::{expected_volume, invert_transform};
use sausage_core::simulate::{default_threads, estimate_expected_volume_with_threads, PathConfig};
use sausage_core::specfun::sphere_surface;
use sausage_core::{ModelParams, Order, Result};

pub struct Check {
    pub name: &'static str,
    pub case: String,
    pub measured: f64,
    pub limit: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.limit
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn route_agreement(quick: bool, out: &mut Vec<Check>) -> Result<()> {
    let dims: &[u32] = if quick { &[2, 3] } else { &[2, 3, 4, 5] };
    let times: &[f64] = if quick { &[0.5, 2.0] } else { &[0.5, 2.0, 10.0] };
    for &d in dims {
        for v in [0.25, 1.0] {
            for &t in times {
                let p = ModelParams::new(d, 1.0, v)?;
                let a = expected_volume(&p, t, 1e-7)?.value;
                let b = invert_transform(&p, t, 1e-7)?.value;
                out.push(Check {
                    name: "route-agreement",
                    case: format!("d={d} v={v} t={t}"),
                    measured: rel(b, a),
                    limit: 1e-4,
                });
            }
        }
    }
    Ok(())
}

fn transform_identity(quick: bool, out: &mut Vec<Check>) -> Result<()> {
    let dims: &[u32] = if quick { &[2, 3] } else { &[2, 3, 4, 5] };
    let times: &[f64] = if quick { &[1.0] } else { &[0.5, 1.0, 5.0] };
    let cfg = InversionConfig::default();
    for &m in dims {
        for v in [0.25, 1.0] {
            for &t in times {
                let p = ModelParams::new(m, 1.0, v)?;
                let mu = Order::new(0.5 * f64::from(m) - 1.0)?;
                let inv = invert(
                    |l| TransformPoint::new(l, v).map(|pt| f_mu(&p, mu, &pt)).unwrap_or(f64::NAN),
                    t,
                    &cfg,
                )?;
                let ts = tilde_sigma(&p, m, t, 1e-9)?.value;
                let direct = 2.0 * ts / sphere_surface(m - 1);
                out.push(Check {
                    name: "transform-identity",
                    case: format!("m={m} v={v} t={t}"),
                    measured: rel(inv, direct),
                    limit: 1e-5,
                });
            }
        }
    }
    Ok(())
}

fn growth_forms(quick: bool, out: &mut Vec<Check>) -> Result<()> {
    let dims: &[u32] = if quick { &[2, 3] } else { &[2, 3, 4] };
    let xs: &[f64] = if quick { &[0.5, 2.0] } else { &[0.5, 1.0, 2.0] };
    for &d in dims {
        for &x in xs {
            let p = ModelParams::new(d, 1.0, x)?;
            let a = aleph(&p, 1e-14)?.value;
            let b = aleph_phi_form(&p, 1e-14)?.value;
            out.push(Check {
                name: "growth-constant-forms",
                case: format!("d={d} r|v|={x}"),
                measured: rel(b, a),
                limit: 1e-10,
            });
        }
    }
    Ok(())
}

fn monte_carlo(quick: bool, out: &mut Vec<Check>) -> Result<()> {
    let dims: &[usize] = if quick { &[3] } else { &[2, 3] };
    let paths = if quick { 400 } else { 2000 };
    for &d in dims {
        let (v, t) = (0.5, 1.0);
        let mut drift = vec![0.0; d];
        drift[0] = v;
        // finer than the default step so the one-sided path bias stays
        // well below the sampling error
        let cfg = PathConfig {
            d,
            r: 1.0,
            t,
            drift,
            dt: t * 2.5e-5,
            n_paths: paths,
            n_points: 4000,
            seed: 1,
        };
        let est = estimate_expected_volume_with_threads(&cfg, default_threads())?;
        let exact = expected_volume(&ModelParams::new(d as u32, 1.0, v)?, t, 1e-8)?.value;
        out.push(Check {
            name: "monte-carlo",
            case: format!("d={d} v={v} t={t} paths={paths}"),
            measured: est.z_score(exact).abs(),
            limit: 3.0,
        });
    }
    Ok(())
}

/// Runs every check, printing one line each; returns whether all passed.
pub fn run(quick: bool, w: &mut dyn Write) -> Result<bool> {
    let mut checks = Vec::new();
    route_agreement(quick, &mut checks)?;
    transform_identity(quick, &mut checks)?;
    growth_forms(quick, &mut checks)?;
    monte_carlo(quick, &mut checks)?;
    let mut all = true;
    for c in &checks {
        let tag = if c.passed() { "PASS" } else { "FAIL" };
        all &= c.passed();
        let _ = writeln!(w, "{tag} {} {} measured={:.3e} limit={:.1e}", c.name, c.case, c.measured, c.limit);
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(w, "{} checks, {failed} failed", checks.len());
    Ok(all)
}
