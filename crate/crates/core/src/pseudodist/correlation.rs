//! Mutual information, total correlation and the conditioning loops that
//! drive them down.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{PseudoDistribution, SolveParams};
use crate::exec::{map_range, Exec};
use crate::patterns::clamp_simplex;
use crate::rng::sub_rng;
use crate::{Error, Result};

const MAX_RESTARTS: usize = 10;

/// `Pr[x_u = s, x_v = r]` as a row-major `q x q` table (`u != v`).
pub fn joint_table(pd: &PseudoDistribution, u: usize, v: usize) -> Result<Vec<f64>> {
    let q = pd.alphabet().size();
    let mut j = vec![0.0; q * q];
    // positive symbols are 1..q; symbol 0 is the complement
    let mu: Vec<f64> = (1..q as u8).map(|s| pd.prob(&[(u, s)])).collect::<Result<_>>()?;
    let mv: Vec<f64> = (1..q as u8).map(|r| pd.prob(&[(v, r)])).collect::<Result<_>>()?;
    let mut both = 0.0;
    for s in 1..q {
        for r in 1..q {
            let x = pd.prob(&[(u, s as u8), (v, r as u8)])?;
            j[s * q + r] = x;
            both += x;
        }
    }
    for s in 1..q {
        j[s * q] = mu[s - 1] - (1..q).map(|r| j[s * q + r]).sum::<f64>();
    }
    for r in 1..q {
        j[r] = mv[r - 1] - (1..q).map(|s| j[s * q + r]).sum::<f64>();
    }
    j[0] = 1.0 - mu.iter().sum::<f64>() - mv.iter().sum::<f64>() + both;
    Ok(j)
}

/// KL divergence of a joint table from the product of its marginals, in
/// nats, after clamping the table to the simplex.
pub fn mutual_information(table: &[f64], q: usize) -> f64 {
    let p = clamp_simplex(table);
    let mut a = vec![0.0; q];
    let mut b = vec![0.0; q];
    for s in 0..q {
        for r in 0..q {
            a[s] += p[s * q + r];
            b[r] += p[s * q + r];
        }
    }
    let mut kl = 0.0;
    for s in 0..q {
        for r in 0..q {
            let x = p[s * q + r];
            if x > 0.0 {
                kl += x * (x / (a[s] * b[r])).ln();
            }
        }
    }
    kl.max(0.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiReport {
    /// Average over unordered pairs of distinct vertices.
    pub avg_mi: f64,
    /// Symmetric `n x n` table, zero diagonal.
    pub table: Vec<f64>,
}

/// Pairwise mutual information of all vertex pairs.
pub fn pairwise_mutual_information(pd: &PseudoDistribution, exec: Exec) -> Result<MiReport> {
    let n = pd.n();
    let q = pd.alphabet().size();
    let rows: Vec<Result<Vec<f64>>> = map_range(exec, n, |u| {
        (u + 1..n).map(|v| Ok(mutual_information(&joint_table(pd, u, v)?, q))).collect()
    });
    let mut table = vec![0.0; n * n];
    let mut total = 0.0;
    for (u, row) in rows.into_iter().enumerate() {
        for (i, mi) in row?.into_iter().enumerate() {
            let v = u + 1 + i;
            table[u * n + v] = mi;
            table[v * n + u] = mi;
            total += mi;
        }
    }
    let pairs = n * n.saturating_sub(1) / 2;
    Ok(MiReport { avg_mi: if pairs == 0 { 0.0 } else { total / pairs as f64 }, table })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TcMode {
    /// Average over every `t`-set of distinct vertices.
    Exact,
    /// Average over `samples` uniformly random `t`-sets.
    Sampled { samples: usize, seed: u64 },
}

impl Default for TcMode {
    fn default() -> Self {
        TcMode::Sampled { samples: 2000, seed: 0 }
    }
}

fn tuple_tc(pd: &PseudoDistribution, vs: &[usize]) -> Result<f64> {
    let q = pd.alphabet().size();
    let t = vs.len();
    let cells = q.pow(t as u32);
    let mut joint = vec![0.0; cells];
    let mut lits = vec![(0usize, 0u8); t];
    for (c, cell) in joint.iter_mut().enumerate() {
        let mut x = c;
        for (i, &v) in vs.iter().enumerate() {
            lits[i] = (v, (x % q) as u8);
            x /= q;
        }
        *cell = pd.prob(&lits)?;
    }
    let p = clamp_simplex(&joint);
    let mut marg = vec![vec![0.0; q]; t];
    for (c, &x) in p.iter().enumerate() {
        let mut y = c;
        for m in marg.iter_mut() {
            m[y % q] += x;
            y /= q;
        }
    }
    let mut kl = 0.0;
    for (c, &x) in p.iter().enumerate() {
        if x > 0.0 {
            let mut y = c;
            let mut prod = 1.0;
            for m in &marg {
                prod *= m[y % q];
                y /= q;
            }
            kl += x * (x / prod).ln();
        }
    }
    Ok(kl.max(0.0))
}

/// Average total `t`-wise correlation `Σ_i H(x_{v_i}) - H(x_{v_1..v_t})`
/// over `t`-sets of distinct vertices. For `t = 2` this is the average
/// pairwise mutual information, computed exactly.
pub fn total_correlation(pd: &PseudoDistribution, t: usize, mode: TcMode) -> Result<f64> {
    let n = pd.n();
    if t < 2 || t > n {
        return Err(Error::param(format!("total correlation needs 2 <= t <= n, got t = {t}")));
    }
    if !pd.is_support_backed() && t > pd.degree() {
        return Err(Error::DegreeOverflow { needed: t, available: pd.degree() });
    }
    if t == 2 {
        return Ok(pairwise_mutual_information(pd, Exec::Auto)?.avg_mi);
    }
    match mode {
        TcMode::Exact => {
            let mut total = 0.0;
            let mut count = 0usize;
            let mut idx: Vec<usize> = (0..t).collect();
            loop {
                total += tuple_tc(pd, &idx)?;
                count += 1;
                // next t-subset in lexicographic order
                let mut i = t;
                while i > 0 && idx[i - 1] == n - t + i - 1 {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                idx[i - 1] += 1;
                for j in i..t {
                    idx[j] = idx[j - 1] + 1;
                }
            }
            Ok(total / count as f64)
        }
        TcMode::Sampled { samples, seed } => {
            let mut rng = sub_rng(seed, 0);
            let mut total = 0.0;
            for _ in 0..samples.max(1) {
                let vs = rand::seq::index::sample(&mut rng, n, t).into_vec();
                total += tuple_tc(pd, &vs)?;
            }
            Ok(total / samples.max(1) as f64)
        }
    }
}

/// Result of a correlation-reduction loop.
#[derive(Clone, Debug)]
pub struct CorrelationReduction {
    pub pd: PseudoDistribution,
    /// Conditioned literals in order.
    pub transcript: Vec<(usize, u8)>,
    pub statistic: f64,
    pub target: f64,
    pub reached: bool,
    pub restarts: usize,
    pub flags: Vec<String>,
}

/// The reduction loop behind the public entry points. `stat` returns the
/// statistic together with the target it must reach, so the target may
/// depend on the current distribution.
pub(crate) fn reduce_with<F>(
    pd: &PseudoDistribution,
    ell: usize,
    restarts: usize,
    seed: u64,
    params: &SolveParams,
    stat: F,
) -> Result<CorrelationReduction>
where
    F: Fn(&PseudoDistribution) -> Result<(f64, f64)>,
{
    let n = pd.n();
    let (s0, t0) = stat(pd)?;
    let mut best = CorrelationReduction {
        pd: pd.clone(),
        transcript: Vec::new(),
        statistic: s0,
        target: t0,
        reached: s0 <= t0,
        restarts: 0,
        flags: Vec::new(),
    };
    if best.reached {
        return Ok(best);
    }
    for restart in 0..restarts.max(1) {
        let mut rng = sub_rng(seed, restart as u64);
        let mut cur = pd.clone();
        let mut transcript: Vec<(usize, u8)> = Vec::new();
        let (mut s, mut target) = (s0, t0);
        let mut used = vec![false; n];
        let mut tries = 0;
        while s > target && transcript.len() < ell && tries < 4 * n {
            tries += 1;
            let v = rng.random_range(0..n);
            if used[v] {
                continue;
            }
            used[v] = true;
            let value = cur.sample_value(v, &mut rng);
            match cur.condition_on_value(v, value, params) {
                Ok(next) => {
                    cur = next;
                    transcript.push((v, value));
                    (s, target) = stat(&cur)?;
                }
                Err(Error::NullEvent(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        let reached = s <= target;
        let better = (reached, -s, std::cmp::Reverse(transcript.len()))
            > (best.reached, -best.statistic, std::cmp::Reverse(best.transcript.len()));
        if better {
            best = CorrelationReduction {
                pd: cur,
                transcript,
                statistic: s,
                target,
                reached,
                restarts: restart,
                flags: Vec::new(),
            };
        }
        if best.reached {
            return Ok(best);
        }
    }
    best.flags.push(format!("target {:e} not reached within {} restarts", best.target, restarts.max(1)));
    Ok(best)
}

/// Conditions on random vertices, sampling each value from the current
/// marginals, until the average pairwise mutual information is at most
/// `tau` or `ell` conditionings are used; restarts with fresh randomness up
/// to ten times and returns the best run.
pub fn reduce_global_correlation(
    pd: &PseudoDistribution,
    ell: usize,
    tau: f64,
    seed: u64,
    params: &SolveParams,
) -> Result<CorrelationReduction> {
    if ell < 2 {
        return Err(Error::param("ell must be at least 2"));
    }
    reduce_with(pd, ell, MAX_RESTARTS, seed, params, |p| Ok((pairwise_mutual_information(p, Exec::Auto)?.avg_mi, tau)))
}

/// As [`reduce_global_correlation`] with the total `t`-wise correlation as
/// the statistic and `t^2 ln q / ell` as the target.
pub fn reduce_total_correlation(
    pd: &PseudoDistribution,
    t: usize,
    ell: usize,
    mode: TcMode,
    seed: u64,
    params: &SolveParams,
) -> Result<CorrelationReduction> {
    if ell < 2 {
        return Err(Error::param("ell must be at least 2"));
    }
    let q = pd.alphabet().size() as f64;
    let target = (t * t) as f64 * q.ln() / ell as f64;
    let mut out = reduce_with(pd, ell, MAX_RESTARTS, seed, params, |p| Ok((total_correlation(p, t, mode)?, target)))?;
    if !pd.is_support_backed() && ell + t > pd.degree() {
        out.flags.push(format!("ell + t = {} exceeds the degree budget {}", ell + t, pd.degree()));
    }
    Ok(out)
}
