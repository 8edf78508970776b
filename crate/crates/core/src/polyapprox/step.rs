//! Polynomial approximations of the step at `delta`.
//!
//! Working in `theta` with `x = (1 - cos theta)/2`, a degree-`D` polynomial
//! in `x` is a cosine series of degree `D`. The construction takes the
//! Fourier series of the indicator of `x >= c` and tapers it with a Kaiser
//! window, then searches degree, window shape and step centre until the
//! result verifies.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::UniPoly;
use crate::rng;
use crate::{Error, Result};

/// Largest degree tried by [`step_poly`].
pub const DEFAULT_STEP_DEGREE_CAP: usize = 512;

const BETAS: [f64; 12] = [1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0, 12.0];
const CENTRES: [f64; 5] = [0.5, 0.4, 0.6, 0.3, 0.7];

/// Polynomial `Q` with `Q` in `[0, nu]` on `[0, delta - nu]`, `Q` in
/// `[1, 1 + nu]` on `[delta, 1]` and `Q` increasing on `(delta - nu, delta)`.
pub fn step_poly(delta: f64, nu: f64) -> Result<UniPoly> {
    step_poly_with_cap(delta, nu, DEFAULT_STEP_DEGREE_CAP)
}

pub fn step_poly_with_cap(delta: f64, nu: f64, cap: usize) -> Result<UniPoly> {
    if !(nu > 0.0 && nu < delta && delta < 1.0) {
        return Err(Error::param(format!("need 0 < nu < delta < 1, got delta = {delta}, nu = {nu}")));
    }
    let mut d = 8usize;
    while d <= cap {
        for &beta in &BETAS {
            for &f in &CENTRES {
                let q = kaiser_step(delta - f * nu, nu, d, beta);
                if screen(&q, delta, nu) && verify_step(&q, delta, nu).ok {
                    return Ok(q);
                }
            }
        }
        d = (d + d / 24).max(d + 2);
    }
    Err(Error::Verification(format!(
        "no step polynomial for delta = {delta}, nu = {nu} verified up to degree {cap}"
    )))
}

/// `nu/2 + (Kaiser-tapered indicator of x >= c)` in Chebyshev form on `[0, 1]`.
fn kaiser_step(c: f64, nu: f64, d: usize, beta: f64) -> UniPoly {
    let theta_c = (1.0 - 2.0 * c).clamp(-1.0, 1.0).acos();
    let i0b = bessel_i0(beta);
    let mut coeffs = Vec::with_capacity(d + 1);
    coeffs.push(nu / 2.0 + (PI - theta_c) / PI);
    for k in 1..=d {
        let r = k as f64 / (d + 1) as f64;
        let w = bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / i0b;
        let a = -2.0 * (k as f64 * theta_c).sin() / (k as f64 * PI);
        // cos(k theta) = T_k(1 - 2x) = (-1)^k T_k(2x - 1)
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.push(sign * a * w);
    }
    UniPoly::chebyshev(coeffs, (0.0, 1.0))
}

fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..200 {
        term *= q / (j * j) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Cheap necessary check on a coarse grid.
fn screen(q: &UniPoly, delta: f64, nu: f64) -> bool {
    const N: usize = 4096;
    (0..=N).all(|i| {
        let x = i as f64 / N as f64;
        let v = q.eval(x);
        if x <= delta - nu {
            (0.0..=nu).contains(&v)
        } else if x >= delta {
            (1.0..=1.0 + nu).contains(&v)
        } else {
            true
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub degree: usize,
    /// Smallest certified distance from the range `[0, nu]` on `[0, delta - nu]`.
    pub low_margin: f64,
    /// Smallest certified distance from the range `[1, 1 + nu]` on `[delta, 1]`.
    pub high_margin: f64,
    /// Smallest certified value of `dQ/dtheta` over the transition.
    pub monotone_margin: f64,
    pub grid_points: usize,
    pub ok: bool,
}

/// Certifies the three step properties.
///
/// On a uniform `theta` grid with spacing `h`, a cosine series `F` of degree
/// `D` satisfies `|F(theta) - F(theta_i)| <= D ||F|| h / 2` by Bernstein's
/// inequality, and `||F|| <= max_i |F(theta_i)| / (1 - D h / 2)`. The same
/// argument applied to `F'` (whose sup is at most `D ||F||`) certifies
/// monotonicity. The grid is refined until the slack fits or a limit is hit.
pub fn verify_step(q: &UniPoly, delta: f64, nu: f64) -> StepReport {
    let d = q.degree().max(1);
    let theta_lo = (1.0 - 2.0 * (delta - nu)).clamp(-1.0, 1.0).acos();
    let theta_hi = (1.0 - 2.0 * delta).clamp(-1.0, 1.0).acos();
    let dq = q.derivative();
    let mut n = 1usize << 14;
    loop {
        let h = PI / n as f64;
        let df = d as f64;
        let thetas: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let vals: Vec<f64> = thetas.iter().map(|&t| q.eval((1.0 - t.cos()) / 2.0)).collect();
        let grid_max = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let shrink = 1.0 - df * h / 2.0;
        let report = if shrink <= 0.0 {
            None
        } else {
            let sup = grid_max / shrink;
            let slack = df * sup * h / 2.0;
            let mut low = f64::INFINITY;
            let mut high = f64::INFINITY;
            for (&t, &v) in thetas.iter().zip(&vals) {
                if t <= theta_lo + h {
                    low = low.min(v.min(nu - v) - slack);
                }
                if t >= theta_hi - h {
                    high = high.min((v - 1.0).min(1.0 + nu - v) - slack);
                }
            }
            // dF/dtheta = Q'(x) sin(theta) / 2 on a local grid
            let span = theta_hi - theta_lo;
            let k = ((span / h).ceil() as usize).max(64);
            let hl = span / k as f64;
            let slack_d = df * df * sup * hl / 2.0;
            let mut mono = f64::INFINITY;
            for i in 0..=k {
                let t = theta_lo + i as f64 * hl;
                let fd = dq.eval((1.0 - t.cos()) / 2.0) * t.sin() / 2.0;
                mono = mono.min(fd - slack_d);
            }
            Some(StepReport {
                degree: q.degree(),
                low_margin: low,
                high_margin: high,
                monotone_margin: mono,
                grid_points: n + 1,
                ok: low >= 0.0 && high >= 0.0 && mono > 0.0,
            })
        };
        match report {
            Some(r) if r.ok || n >= 1 << 21 => return r,
            _ if n >= 1 << 21 => {
                return StepReport {
                    degree: q.degree(),
                    low_margin: f64::NEG_INFINITY,
                    high_margin: f64::NEG_INFINITY,
                    monotone_margin: f64::NEG_INFINITY,
                    grid_points: n + 1,
                    ok: false,
                }
            }
            _ => n *= 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QLargeReport {
    /// `min (C Q(z) + q(z))` over a grid of `[0, 1]`.
    pub pointwise_margin: f64,
    /// Random distributions with `E[q] <= -beta` that were checked.
    pub distributions: usize,
    /// Smallest `E[Q] * C / beta` observed (at least 1 when the claim holds).
    pub min_ratio: f64,
    pub violations: usize,
}

/// Checks that `E[q] <= -beta` and `|q| <= c_bound` force `E[Q] >= beta / c_bound`
/// over random finitely supported distributions on `[0, 1]`.
pub fn check_q_large(
    step: &UniPoly,
    q: &dyn Fn(f64) -> f64,
    c_bound: f64,
    beta: f64,
    samples: usize,
    seed: u64,
) -> QLargeReport {
    const GRID: usize = 100_000;
    let pointwise_margin = (0..=GRID)
        .map(|i| {
            let z = i as f64 / GRID as f64;
            c_bound * step.eval(z) + q(z)
        })
        .fold(f64::INFINITY, f64::min);
    let mut rng = rng::rng(seed);
    let mut distributions = 0;
    let mut min_ratio = f64::INFINITY;
    let mut violations = 0;
    let mut attempts = 0;
    while distributions < samples && attempts < 50 * samples.max(1) {
        attempts += 1;
        let k = rng.random_range(1..=6);
        let pts: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let mut w: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= s);
        let eq: f64 = pts.iter().zip(&w).map(|(&z, &p)| p * q(z)).sum();
        if eq > -beta {
            continue;
        }
        distributions += 1;
        let e_step: f64 = pts.iter().zip(&w).map(|(&z, &p)| p * step.eval(z)).sum();
        let ratio = e_step * c_bound / beta;
        min_ratio = min_ratio.min(ratio);
        if ratio < 1.0 - 1e-9 {
            violations += 1;
        }
    }
    QLargeReport { pointwise_margin, distributions, min_ratio, violations }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionOnQReport {
    /// `min (Q(z)(z - delta) + nu)` over a grid of `[0, 1]`.
    pub pointwise_margin: f64,
    pub distributions: usize,
    /// Smallest `E[Q z]/E[Q] - (delta - nu / E[Q])` over the sampled distributions.
    pub min_slack: f64,
}

/// Checks `Q(z)(z - delta) >= -nu` on `[0, 1]` and its consequence
/// `E[Q z]/E[Q] >= delta - nu/E[Q]` on random distributions.
pub fn check_condition_on_q(step: &UniPoly, delta: f64, nu: f64, samples: usize, seed: u64) -> ConditionOnQReport {
    const GRID: usize = 100_000;
    let pointwise_margin = (0..=GRID)
        .map(|i| {
            let z = i as f64 / GRID as f64;
            step.eval(z) * (z - delta) + nu
        })
        .fold(f64::INFINITY, f64::min);
    let mut rng = rng::rng(seed);
    let mut min_slack = f64::INFINITY;
    for _ in 0..samples {
        let k = rng.random_range(1..=6);
        let pts: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-9).collect();
        let s: f64 = w.iter().sum();
        let eq: f64 = pts.iter().zip(&w).map(|(&z, &p)| p / s * step.eval(z)).sum();
        let eqz: f64 = pts.iter().zip(&w).map(|(&z, &p)| p / s * step.eval(z) * z).sum();
        if eq > 1e-12 {
            min_slack = min_slack.min(eqz / eq - (delta - nu / eq));
        }
    }
    ConditionOnQReport { pointwise_margin, distributions: samples, min_slack }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(step_poly(0.1, 0.2).is_err());
        assert!(step_poly(1.0, 0.1).is_err());
        assert!(step_poly(0.1, 0.0).is_err());
    }

    #[test]
    fn coarse_step_verifies() {
        let q = step_poly(0.3, 0.1).unwrap();
        let r = verify_step(&q, 0.3, 0.1);
        assert!(r.ok, "{r:?}");
        assert!(q.eval(0.0) >= 0.0 && q.eval(0.0) <= 0.1);
        assert!(q.eval(1.0) >= 1.0 && q.eval(1.0) <= 1.1);
    }

    #[test]
    fn low_cap_is_reported() {
        assert!(matches!(step_poly_with_cap(0.1, 0.02, 10), Err(Error::Verification(_))));
    }
}
