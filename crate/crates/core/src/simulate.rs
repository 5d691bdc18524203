//! Monte Carlo estimate of `E[vol W(t)]` in `d ∈ {2, 3}`.
//!
//! Each path is an Euler polyline of the drifted Brownian motion; the sausage
//! of the polyline is a union of capsules whose volume is estimated by
//! hit-or-miss sampling over the bounding box. Discretisation can only
//! shrink the sausage, so the estimator is biased low by an amount that
//! vanishes with `dt`.
//!
//! Every path draws from its own ChaCha stream keyed by `(seed, index)`, and
//! per-path results are reduced in index order, so the estimate does not
//! depend on how paths are spread over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, PartialEq)]
pub struct PathConfig {
    pub d: usize,
    pub r: f64,
    pub t: f64,
    /// Full drift vector of length `d`.
    pub drift: Vec<f64>,
    pub dt: f64,
    pub n_paths: usize,
    /// Hit-or-miss samples per path.
    pub n_points: usize,
    pub seed: u64,
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.d == 2 || self.d == 3) {
            return Err(Error::domain(format!("simulation supports d = 2 or 3, got {}", self.d)));
        }
        if self.drift.len() != self.d {
            return Err(Error::domain(format!(
                "drift has {} components, expected {}",
                self.drift.len(),
                self.d
            )));
        }
        if self.drift.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("drift must be finite"));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::domain(format!("radius must be > 0, got {}", self.r)));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::domain(format!("time must be >= 0, got {}", self.t)));
        }
        if !(self.dt > 0.0) || (self.t > 0.0 && self.dt > self.t) {
            return Err(Error::domain(format!("time step must be in (0, t], got {}", self.dt)));
        }
        if self.n_paths == 0 || self.n_points == 0 {
            return Err(Error::domain("path and point counts must be >= 1"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t / self.dt).round() as usize
    }
}

/// Vertices of a discretised path; unused coordinates are zero when `d = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub d: usize,
    pub points: Vec<[f64; 3]>,
}

fn path_rng(seed: u64, path_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(path_index);
    rng
}

fn walk(cfg: &PathConfig, rng: &mut ChaCha12Rng) -> Polyline {
    let steps = cfg.n_steps();
    let h = if steps > 0 { cfg.t / steps as f64 } else { 0.0 };
    let sd = h.sqrt();
    let mut points = Vec::with_capacity(steps + 1);
    let mut x = [0.0; 3];
    points.push(x);
    for _ in 0..steps {
        for (k, xk) in x.iter_mut().enumerate().take(cfg.d) {
            let z: f64 = rng.sample(StandardNormal);
            *xk += sd * z + cfg.drift[k] * h;
        }
        points.push(x);
    }
    Polyline { d: cfg.d, points }
}

/// The polyline of path `path_index`, starting at the origin.
pub fn sample_path(cfg: &PathConfig, path_index: u64) -> Result<Polyline> {
    cfg.validate()?;
    Ok(walk(cfg, &mut path_rng(cfg.seed, path_index)))
}

fn dist2_point_segment(p: &[f64; 3], a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let mut ab = [0.0; 3];
    let mut ap = [0.0; 3];
    for k in 0..3 {
        ab[k] = b[k] - a[k];
        ap[k] = p[k] - a[k];
    }
    let len2: f64 = ab.iter().map(|c| c * c).sum();
    let s = if len2 > 0.0 {
        (ap.iter().zip(&ab).map(|(u, v)| u * v).sum::<f64>() / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (0..3).map(|k| (ap[k] - s * ab[k]).powi(2)).sum()
}

#[derive(Debug, Clone, Copy)]
struct Sphere {
    c: [f64; 3],
    rad: f64,
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|k| (a[k] - b[k]).powi(2)).sum::<f64>().sqrt()
}

fn enclose(a: &Sphere, b: &Sphere) -> Sphere {
    let d = dist(&a.c, &b.c);
    if d + b.rad <= a.rad {
        return *a;
    }
    if d + a.rad <= b.rad {
        return *b;
    }
    let rad = 0.5 * (d + a.rad + b.rad);
    let s = (rad - a.rad) / d;
    let mut c = a.c;
    for ((ck, bk), ak) in c.iter_mut().zip(b.c).zip(a.c) {
        *ck += s * (bk - ak);
    }
    // pad against rounding so children stay inside
    Sphere { c, rad: rad * (1.0 + 1e-12) }
}

/// Bounding spheres over runs of consecutive segments: level 0 holds one
/// sphere per segment, level `k+1` node `i` encloses level `k` nodes `2i`
/// and `2i+1`.
struct SegmentTree<'a> {
    pts: &'a [[f64; 3]],
    levels: Vec<Vec<Sphere>>,
}

impl<'a> SegmentTree<'a> {
    fn new(poly: &'a Polyline) -> Self {
        let pts = &poly.points;
        let leaves: Vec<Sphere> = if pts.len() == 1 {
            vec![Sphere { c: pts[0], rad: 0.0 }]
        } else {
            pts.windows(2)
                .map(|w| {
                    let c = [0.5 * (w[0][0] + w[1][0]), 0.5 * (w[0][1] + w[1][1]), 0.5 * (w[0][2] + w[1][2])];
                    Sphere { c, rad: 0.5 * dist(&w[0], &w[1]) }
                })
                .collect()
        };
        let mut levels = vec![leaves];
        while levels.last().is_some_and(|l| l.len() > 1) {
            let below = levels.last().expect("nonempty");
            let up = below
                .chunks(2)
                .map(|ch| if ch.len() == 2 { enclose(&ch[0], &ch[1]) } else { ch[0] })
                .collect();
            levels.push(up);
        }
        SegmentTree { pts, levels }
    }

    fn segment_within(&self, p: &[f64; 3], i: usize, r2: f64) -> bool {
        if self.pts.len() == 1 {
            return dist2_point_segment(p, &self.pts[0], &self.pts[0]) <= r2;
        }
        dist2_point_segment(p, &self.pts[i], &self.pts[i + 1]) <= r2
    }

    /// Whether some segment passes within `r` of `p`.
    fn covers(&self, p: &[f64; 3], r: f64) -> bool {
        let r2 = r * r;
        let top = self.levels.len() - 1;
        let mut stack = vec![(top, 0usize)];
        while let Some((lvl, i)) = stack.pop() {
            let s = &self.levels[lvl][i];
            let dc = dist(p, &s.c);
            if dc - s.rad > r {
                continue;
            }
            if lvl == 0 {
                if self.segment_within(p, i, r2) {
                    return true;
                }
                continue;
            }
            if dc + s.rad <= r {
                // every point of the enclosed path is within r
                return true;
            }
            let below = &self.levels[lvl - 1];
            let (a, b) = (2 * i, 2 * i + 1);
            if b < below.len() {
                // visit the nearer child first
                if dist(p, &below[a].c) <= dist(p, &below[b].c) {
                    stack.push((lvl - 1, b));
                    stack.push((lvl - 1, a));
                } else {
                    stack.push((lvl - 1, a));
                    stack.push((lvl - 1, b));
                }
            } else {
                stack.push((lvl - 1, a));
            }
        }
        false
    }
}

/// Hit-or-miss estimate of the volume of the union of radius-`r` capsules
/// around the segments of `poly`.
pub fn sausage_volume_one_path<R: Rng + ?Sized>(poly: &Polyline, r: f64, n_points: usize, rng: &mut R) -> Result<f64> {
    if poly.points.is_empty() {
        return Err(Error::domain("polyline must have at least one vertex"));
    }
    if !(r > 0.0) || n_points == 0 {
        return Err(Error::domain("need r > 0 and at least one sample point"));
    }
    let d = poly.d;
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    for k in 0..d {
        lo[k] = poly.points.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min) - r;
        hi[k] = poly.points.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max) + r;
    }
    let tree = SegmentTree::new(poly);
    let mut hits = 0usize;
    let mut p = [0.0; 3];
    for _ in 0..n_points {
        for k in 0..d {
            p[k] = lo[k] + (hi[k] - lo[k]) * rng.random::<f64>();
        }
        if tree.covers(&p, r) {
            hits += 1;
        }
    }
    let box_vol: f64 = (0..d).map(|k| hi[k] - lo[k]).product();
    Ok(box_vol * hits as f64 / n_points as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub n_paths: usize,
    pub n_points: usize,
    pub seed: u64,
    /// Set: the path discretisation biases the estimate low.
    pub bias_note: bool,
}

impl McEstimate {
    fn from_samples(values: &[f64], cfg: &PathConfig) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().copied().collect::<CompensatedSum>().value() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).collect::<CompensatedSum>().value() / (n - 1.0)
        } else {
            0.0
        };
        let stderr = (var / n).sqrt();
        McEstimate {
            mean,
            stderr,
            ci95: (mean - 1.96 * stderr, mean + 1.96 * stderr),
            n_paths: values.len(),
            n_points: cfg.n_points,
            seed: cfg.seed,
            bias_note: cfg.n_steps() > 0,
        }
    }

    /// `(target - mean) / stderr`, signed so that a low estimate is positive.
    pub fn z_score(&self, target: f64) -> f64 {
        (target - self.mean) / self.stderr
    }
}

/// Default worker count: `SAUSAGE_THREADS` if set, otherwise rayon's default.
pub fn default_threads() -> usize {
    std::env::var("SAUSAGE_THREADS")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(rayon::current_num_threads)
}

fn per_path_volumes(cfg: &PathConfig, threads: usize) -> Result<Vec<f64>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::numeric("simulation", e.to_string()))?;
    pool.install(|| {
        (0..cfg.n_paths as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = path_rng(cfg.seed, i);
                let poly = walk(cfg, &mut rng);
                sausage_volume_one_path(&poly, cfg.r, cfg.n_points, &mut rng)
            })
            .collect()
    })
}

/// Mean sausage volume over `cfg.n_paths` paths using the default thread count.
pub fn estimate_expected_volume(cfg: &PathConfig) -> Result<McEstimate> {
    estimate_expected_volume_with_threads(cfg, default_threads())
}

pub fn estimate_expected_volume_with_threads(cfg: &PathConfig, threads: usize) -> Result<McEstimate> {
    let v = per_path_volumes(cfg, threads)?;
    Ok(McEstimate::from_samples(&v, cfg))
}

/// Estimates of `vol W(t) / t` for each `t` in `times` (increasing).
pub fn slope_check(cfg: &PathConfig, times: &[f64]) -> Result<Vec<(f64, McEstimate)>> {
    if times.is_empty() || times.windows(2).any(|w| w[1] <= w[0]) || times[0] <= 0.0 {
        return Err(Error::domain("slope times must be positive and increasing"));
    }
    let threads = default_threads();
    times
        .iter()
        .map(|&t| {
            let c = PathConfig { t, ..cfg.clone() };
            let v: Vec<f64> = per_path_volumes(&c, threads)?.into_iter().map(|x| x / t).collect();
            Ok((t, McEstimate::from_samples(&v, &c)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(d: usize, drift: Vec<f64>, t: f64) -> PathConfig {
        PathConfig {
            d,
            r: 1.0,
            t,
            drift,
            dt: 0.01,
            n_paths: 200,
            n_points: 2000,
            seed: 11,
        }
    }

    fn mc_volume(poly: &Polyline, reps: usize) -> (f64, f64) {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let v: Vec<f64> = (0..reps)
            .map(|_| sausage_volume_one_path(poly, 1.0, 4000, &mut rng).unwrap())
            .collect();
        let m = v.iter().sum::<f64>() / reps as f64;
        let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps as f64 - 1.0) / reps as f64).sqrt();
        (m, s)
    }

    #[test]
    fn validation() {
        assert!(cfg(4, vec![0.0; 4], 1.0).validate().is_err());
        assert!(cfg(3, vec![0.0; 2], 1.0).validate().is_err());
        let mut c = cfg(3, vec![0.0; 3], 1.0);
        c.dt = 2.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_point_is_the_ball() {
        let poly = Polyline { d: 3, points: vec![[0.0; 3]] };
        let (m, s) = mc_volume(&poly, 200);
        assert!((m - 4.0 * PI / 3.0).abs() < 4.0 * s, "{m} ± {s}");
    }

    #[test]
    fn straight_capsule() {
        let poly = Polyline {
            d: 3,
            points: vec![[0.0; 3], [2.0, 0.0, 0.0]],
        };
        let (m, s) = mc_volume(&poly, 200);
        let exact = 2.0 * PI + 4.0 * PI / 3.0;
        assert!((m - exact).abs() < 4.0 * s, "{m} ± {s} vs {exact}");
        let split = Polyline {
            d: 3,
            points: (0..=20).map(|i| [0.1 * f64::from(i), 0.0, 0.0]).collect(),
        };
        let (m2, s2) = mc_volume(&split, 200);
        assert!((m2 - exact).abs() < 4.0 * s2);
    }

    #[test]
    fn planar_stadium() {
        let poly = Polyline {
            d: 2,
            points: vec![[0.0; 3], [0.0, 3.0, 0.0]],
        };
        let (m, s) = mc_volume(&poly, 200);
        let exact = 6.0 + PI;
        assert!((m - exact).abs() < 4.0 * s);
    }

    #[test]
    fn increments_have_the_right_law() {
        let c = PathConfig {
            dt: 1.0,
            ..cfg(2, vec![0.3, -0.2], 1.0)
        };
        let n = 20_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for i in 0..n {
            let p = sample_path(&c, i).unwrap();
            let x = p.points[1][0];
            s1 += x;
            s2 += x * x;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((mean - 0.3).abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 4.0 * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn deterministic_across_threads() {
        let c = cfg(3, vec![0.5, 0.0, 0.0], 0.5);
        let a = estimate_expected_volume_with_threads(&c, 1).unwrap();
        let b = estimate_expected_volume_with_threads(&c, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(sample_path(&c, 7).unwrap(), sample_path(&c, 7).unwrap());
    }

    #[test]
    fn rotation_invariance() {
        let mut a = cfg(3, vec![1.0, 0.0, 0.0], 1.0);
        let mut b = cfg(3, vec![0.0, 0.0, 1.0], 1.0);
        a.n_paths = 400;
        b.n_paths = 400;
        b.seed = 99;
        let ea = estimate_expected_volume_with_threads(&a, 1).unwrap();
        let eb = estimate_expected_volume_with_threads(&b, 1).unwrap();
        let s = (ea.stderr.powi(2) + eb.stderr.powi(2)).sqrt();
        assert!((ea.mean - eb.mean).abs() < 3.0 * s);
    }

    #[test]
    fn ci_is_symmetric() {
        let e = estimate_expected_volume_with_threads(&cfg(2, vec![0.0, 0.0], 0.2), 1).unwrap();
        assert!((e.ci95.1 - e.mean - 1.96 * e.stderr).abs() < 1e-12);
        assert!(e.bias_note);
    }
}
