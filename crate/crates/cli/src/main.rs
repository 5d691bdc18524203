mod args;
mod emit;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use sausage_core::asymptotics::{aleph, aleph_zero};
use sausage_core::driftless::driftless_volume;
use sausage_core::sausage::{expected_volume, invert_transform, MIN_DRIFT};
use sausage_core::simulate::{default_threads, estimate_expected_volume_with_threads, PathConfig};
use sausage_core::specfun::ball_volume;
use sausage_core::{ModelParams, VolumeResult};

use args::{Cli, Command, Model, RouteArg};
use emit::{AsymptoteRecord, DriftlessRecord, SimulateRecord, VolumeRecord};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] sausage_core::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(sausage_core::Error::Domain(_)) => 2,
            CliError::Core(_) => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn model_params(m: &Model) -> Result<ModelParams> {
    let p = ModelParams::new(m.dim, m.radius, m.drift)?;
    if m.drift < MIN_DRIFT {
        return Err(CliError::Usage(format!(
            "drift {} is too small for the drifted formula; use `sausage driftless` for |v| = 0",
            m.drift
        )));
    }
    Ok(p)
}

fn compute(p: &ModelParams, t: f64, tol: f64, route: RouteArg) -> Result<VolumeRecord> {
    let res: VolumeResult = match route {
        RouteArg::Series => expected_volume(p, t, tol)?,
        RouteArg::Inversion => invert_transform(p, t, tol)?,
    };
    Ok(VolumeRecord {
        d: p.d(),
        r: p.r(),
        v: p.v_mag(),
        t,
        volume: res.value,
        swept: res.swept,
        trunc_bound: res.trunc_bound,
        quad_bound: res.quad_bound,
        route: res.route.as_str(),
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Volume(a) => {
            let p = model_params(&a.model)?;
            let rec = compute(&p, a.time, a.tol, a.route)?;
            emit::write(&[rec], a.output.format, a.output.out.as_deref(), false)?;
        }
        Command::Table(a) => {
            let p = model_params(&a.model)?;
            if !(a.tmin >= 0.0 && a.tmin < a.tmax && a.tmax.is_finite()) || a.steps < 2 {
                return Err(CliError::Usage(format!(
                    "need 0 <= tmin < tmax and steps >= 2, got tmin={} tmax={} steps={}",
                    a.tmin, a.tmax, a.steps
                )));
            }
            let h = (a.tmax - a.tmin) / (a.steps - 1) as f64;
            let rows = (0..a.steps)
                .map(|k| {
                    let t = if k + 1 == a.steps { a.tmax } else { a.tmin + h * k as f64 };
                    compute(&p, t, a.tol, a.route)
                })
                .collect::<Result<Vec<_>>>()?;
            emit::write(&rows, a.output.format, a.output.out.as_deref(), true)?;
        }
        Command::Asymptote(a) => {
            let p = model_params(&a.model)?;
            let c = aleph(&p, a.tol)?;
            let limit = if a.limit { Some(aleph_zero(p.d(), p.r())?) } else { None };
            let rec = AsymptoteRecord {
                d: p.d(),
                r: p.r(),
                v: p.v_mag(),
                aleph: c.value,
                terms_used: c.terms_used,
                trunc_bound: c.trunc_bound,
                limit,
                gap: limit.map(|l| c.value - l),
            };
            emit::write(&[rec], a.output.format, a.output.out.as_deref(), false)?;
        }
        Command::Simulate(a) => {
            let mut drift = a.drift.clone();
            if drift.len() == 1 && a.dim > 1 {
                drift.resize(a.dim, 0.0);
            }
            let dt = a.dt.unwrap_or(a.time * 1e-4);
            let cfg = PathConfig {
                d: a.dim,
                r: a.radius,
                t: a.time,
                drift,
                dt,
                n_paths: a.paths,
                n_points: a.points,
                seed: a.seed,
            };
            cfg.validate()?;
            let threads = a.threads.unwrap_or_else(default_threads);
            let est = estimate_expected_volume_with_threads(&cfg, threads)?;
            let v_mag = cfg.drift.iter().map(|x| x * x).sum::<f64>().sqrt();
            let formula = if v_mag < MIN_DRIFT {
                ball_volume(a.dim as u32, a.radius)? + driftless_volume(a.dim as u32, a.radius, a.time)?
            } else {
                expected_volume(&ModelParams::new(a.dim as u32, a.radius, v_mag)?, a.time, 1e-8)?.value
            };
            let rec = SimulateRecord {
                d: cfg.d,
                r: cfg.r,
                drift: cfg.drift.clone(),
                t: cfg.t,
                dt: cfg.dt,
                paths: est.n_paths,
                points: est.n_points,
                seed: est.seed,
                mean: est.mean,
                stderr: est.stderr,
                ci_low: est.ci95.0,
                ci_high: est.ci95.1,
                formula,
                z: est.z_score(formula),
                bias_note: est.bias_note,
            };
            emit::write(&[rec], a.output.format, a.output.out.as_deref(), false)?;
        }
        Command::Driftless(a) => {
            let swept = driftless_volume(a.dim, a.radius, a.time)?;
            let ball = ball_volume(a.dim, a.radius)?;
            let rec = DriftlessRecord {
                m: a.dim,
                r: a.radius,
                t: a.time,
                swept,
                volume: ball + swept,
            };
            emit::write(&[rec], a.output.format, a.output.out.as_deref(), false)?;
        }
        Command::Verify(a) => {
            let mut w = emit::open(a.out.as_deref())?;
            let ok = verify::run(a.quick, &mut w)?;
            w.flush()?;
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
