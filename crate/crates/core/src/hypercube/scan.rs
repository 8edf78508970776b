//! Minimum boundary ratios over families of Boolean functions.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::BooleanFunction;
use crate::exec::{map_range, Exec};
use crate::rng::sub_rng;
use crate::{Error, Result};

pub const EXHAUSTIVE_MAX_N: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMode {
    /// Every non-constant function; requires `n <= 4`.
    Exhaustive,
    /// Random tables of random density plus structured families.
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TalagrandScan {
    pub n: usize,
    pub functions: usize,
    /// Minimum of `E||grad f|| / (E f (1 - E f))`.
    pub min_talagrand: f64,
    pub talagrand_argmin: BooleanFunction,
    /// Minimum of `sqrt(n) E[g] / (E f (1 - E f))`; the empirical vertex
    /// boundary constant.
    pub min_vertex_boundary: f64,
    pub vertex_boundary_argmin: BooleanFunction,
    /// Minimum of `E||grad f|| - 2 W^1[f]`.
    pub min_chain_slack: f64,
}

struct Stats {
    talagrand: f64,
    boundary: f64,
    chain: f64,
}

fn stats(f: &BooleanFunction) -> Stats {
    let w1: f64 = f.mean_gradient().iter().map(|v| v * v).sum::<f64>() / 4.0;
    let grad = f.mean_gradient_norm();
    Stats { talagrand: f.talagrand_ratio(), boundary: f.vertex_boundary_ratio(), chain: grad - 2.0 * w1 }
}

/// Scans Boolean functions on `n` bits, skipping constants.
pub fn min_talagrand_constant(n: usize, mode: ScanMode, exec: Exec) -> Result<TalagrandScan> {
    if n == 0 {
        return Err(Error::param("dimension must be positive"));
    }
    let candidates: Box<dyn Fn(usize) -> BooleanFunction + Sync + Send> = match mode {
        ScanMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX_N {
                return Err(Error::Budget(format!(
                    "exhaustive scan at n = {n} needs 2^{} functions; use sampled mode",
                    1usize << n
                )));
            }
            Box::new(move |i| BooleanFunction::from_bits(n, i as u64).expect("n <= 4"))
        }
        ScanMode::Sampled { seed, .. } => {
            if n > 20 {
                return Err(Error::param("sampled scan supports n <= 20"));
            }
            Box::new(move |i| sampled_function(n, seed, i))
        }
    };
    let total = match mode {
        ScanMode::Exhaustive => 1usize << (1usize << n),
        ScanMode::Sampled { samples, .. } => samples,
    };

    const CHUNK: usize = 4096;
    let chunk_best = map_range(exec, total.div_ceil(CHUNK), |c| {
        let mut best: Option<(f64, usize, f64, usize, f64, usize)> = None;
        for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
            let f = candidates(i);
            let m = f.mean();
            if m == 0.0 || m == 1.0 {
                continue;
            }
            let s = stats(&f);
            let b = best.get_or_insert((f64::INFINITY, 0, f64::INFINITY, 0, f64::INFINITY, 0));
            if s.talagrand < b.0 {
                (b.0, b.1) = (s.talagrand, i);
            }
            if s.boundary < b.2 {
                (b.2, b.3) = (s.boundary, i);
            }
            if s.chain < b.4 {
                b.4 = s.chain;
            }
            b.5 += 1;
        }
        best
    });

    let mut acc: Option<(f64, usize, f64, usize, f64, usize)> = None;
    for b in chunk_best.into_iter().flatten() {
        match acc.as_mut() {
            None => acc = Some(b),
            Some(a) => {
                if b.0 < a.0 {
                    (a.0, a.1) = (b.0, b.1);
                }
                if b.2 < a.2 {
                    (a.2, a.3) = (b.2, b.3);
                }
                a.4 = a.4.min(b.4);
                a.5 += b.5;
            }
        }
    }
    let a = acc.ok_or_else(|| Error::param("no non-constant function in scan"))?;
    Ok(TalagrandScan {
        n,
        functions: a.5,
        min_talagrand: a.0,
        talagrand_argmin: candidates(a.1),
        min_vertex_boundary: a.2,
        vertex_boundary_argmin: candidates(a.3),
        min_chain_slack: a.4,
    })
}

/// The `i`-th sampled function: every eighth draw comes from a structured
/// family (thresholds, subcubes, tribes), the rest are random tables.
fn sampled_function(n: usize, seed: u64, i: usize) -> BooleanFunction {
    let mut rng = sub_rng(seed, i as u64);
    let size = 1usize << n;
    let build = |f: &dyn Fn(usize) -> bool| BooleanFunction::from_fn(n, f).expect("n <= 20");
    if i % 8 != 0 {
        let p: f64 = rng.random();
        let table = (0..size).map(|_| rng.random::<f64>() < p).collect();
        return BooleanFunction::new(n, table).expect("length matches");
    }
    let mask: usize = rng.random_range(1..size);
    let flip: usize = rng.random_range(0..size);
    match (i / 8) % 3 {
        0 => {
            let k = rng.random_range(1..=mask.count_ones());
            build(&|x| ((x ^ flip) & mask).count_ones() >= k)
        }
        1 => build(&|x| (x ^ flip) & mask == mask),
        _ => {
            let w = rng.random_range(1..=n);
            build(&|x| {
                let y = x ^ flip;
                (0..n).step_by(w).any(|s| {
                    let block = ((1usize << w.min(n - s)) - 1) << s;
                    y & block == block
                })
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub d: usize,
    pub samples: usize,
    /// Estimate of `E_{J,z} W^1[f_{J|z}]` with coordinates kept w.p. `1/d`.
    pub mean_restricted_w1: f64,
    /// `W^{[d, 2d]}[f]`.
    pub band_weight: f64,
    /// `mean_restricted_w1 / band_weight`; infinite when the band is empty.
    pub ratio: f64,
}

pub fn restriction_w1_check(f: &BooleanFunction, d: usize, samples: usize, seed: u64) -> Result<RestrictionReport> {
    if d < 2 {
        return Err(Error::param("restriction check needs d >= 2"));
    }
    if samples == 0 {
        return Err(Error::param("restriction check needs at least one sample"));
    }
    let n = f.n();
    let weights = f.fourier_weights();
    let band_weight: f64 = weights.iter().enumerate().filter(|(k, _)| *k >= d && *k <= 2 * d).map(|(_, w)| w).sum();
    let mut rng = sub_rng(seed, 0);
    let p = 1.0 / d as f64;
    let mut total = 0.0;
    for _ in 0..samples {
        let keep = (0..n).filter(|_| rng.random::<f64>() < p).fold(0usize, |m, i| m | 1 << i);
        let z: usize = rng.random_range(0..1usize << n);
        let r = f.restrict(keep, z);
        total += r.fourier_weights().get(1).copied().unwrap_or(0.0);
    }
    let mean = total / samples as f64;
    let ratio = if band_weight > 0.0 { mean / band_weight } else { f64::INFINITY };
    Ok(RestrictionReport { d, samples, mean_restricted_w1: mean, band_weight, ratio })
}

/// The vertex boundary constant used downstream: the minimum exhaustive
/// vertex-boundary ratio over dimensions `1..=4`. A universal constant has
/// to serve every dimension, so the smallest observed value is taken.
pub fn pinned_boundary_constant(exec: Exec) -> Result<f64> {
    (1..=EXHAUSTIVE_MAX_N).try_fold(f64::INFINITY, |m, n| {
        Ok(m.min(min_talagrand_constant(n, ScanMode::Exhaustive, exec)?.min_vertex_boundary))
    })
}
