//! Certified small-set vertex expansion records for the noisy hypercube.
//!
//! The expansion profile is `P(x) = x + (c / sqrt n) x (1 - x)` and the
//! certificate polynomial is its `ell`-fold iterate.

use serde::{Deserialize, Serialize};

use crate::polyapprox::{Basis, Iterated, UniPoly};
use crate::{Error, Result};

/// Threshold used by the noisy-hypercube certificate.
pub const SSVE_DELTA: f64 = 1.0 / 32.0;

const GRID: usize = 10_000;

/// `P(x) = x + (c / sqrt n) x (1 - x)` in the monomial basis.
pub fn expansion_profile(n: usize, c: f64) -> UniPoly {
    let a = c / (n as f64).sqrt();
    UniPoly::monomial(vec![0.0, 1.0 + a, -a])
}

/// `P_t`, evaluated by iteration.
pub fn iterate_profile(n: usize, c: f64, t: usize) -> Iterated {
    Iterated { base: expansion_profile(n, c), times: t }
}

/// `P_t` expanded into monomial coefficients; only for `t <= 8`.
pub fn iterate_profile_expanded(n: usize, c: f64, t: usize) -> Result<UniPoly> {
    if t > 8 {
        return Err(Error::DegreeOverflow { needed: 1 << t.min(62), available: 256 });
    }
    let p = expansion_profile(n, c);
    let mut acc = UniPoly::monomial(vec![0.0, 1.0]);
    for _ in 0..t {
        acc = p.compose(&acc, 256)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertPoly {
    Coefficients(UniPoly),
    /// `P_ell` for the hypercube of dimension `n` with boundary constant `c`.
    IterationPlan { n: usize, c: f64, ell: usize },
}

impl CertPoly {
    pub fn eval(&self, z: f64) -> f64 {
        match self {
            CertPoly::Coefficients(p) => p.eval(z),
            CertPoly::IterationPlan { n, c, ell } => iterate_profile(*n, *c, *ell).eval(z),
        }
    }
}

/// A polynomial `p` with `p(0) = 0`, `p(1) = 1` and `p(z) >= 3z` on
/// `[0, delta]`, witnessing that sets of density at most `delta` have at
/// least twice their size in outside neighbours.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifiedSsve {
    pub delta: f64,
    pub degree_bound: u64,
    pub p: CertPoly,
    pub provenance: String,
}

impl CertifiedSsve {
    /// Re-checks the three polynomial conditions. `p(delta) >= 3 delta` is
    /// accepted in place of equality.
    pub fn verify(&self) -> Result<()> {
        const TOL: f64 = 1e-9;
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::Verification(format!("delta {} outside (0, 1]", self.delta)));
        }
        let p0 = self.p.eval(0.0);
        let p1 = self.p.eval(1.0);
        if p0.abs() > TOL || (p1 - 1.0).abs() > TOL {
            return Err(Error::Verification(format!("p(0) = {p0}, p(1) = {p1}")));
        }
        match &self.p {
            CertPoly::IterationPlan { n, c, ell } => {
                let a = c / (*n as f64).sqrt();
                if !(a > 0.0 && a <= 1.0) {
                    return Err(Error::Verification(format!("profile slope c / sqrt n = {a} outside (0, 1]")));
                }
                // P_ell(z) / z is non-increasing on (0, 1], so the endpoint decides.
                let ratio = iterate_profile(*n, *c, *ell).eval(self.delta) / self.delta;
                if ratio < 3.0 - TOL {
                    return Err(Error::Verification(format!("p(delta) / delta = {ratio} < 3")));
                }
            }
            CertPoly::Coefficients(p) => {
                if p.basis != Basis::Monomial {
                    return Err(Error::Verification("explicit certificates must use the monomial basis".into()));
                }
                // p(z) / z - 3 is a polynomial since p(0) = 0
                let mut q = p.coeffs.get(1..).unwrap_or(&[]).to_vec();
                if q.is_empty() {
                    q.push(0.0);
                }
                q[0] -= 3.0;
                let q = UniPoly::monomial(q);
                let slope = derivative_sup(&q, (0.0, self.delta));
                let h = self.delta / GRID as f64;
                for k in 0..GRID {
                    let (lo, hi) = (k as f64 * h, (k + 1) as f64 * h);
                    if !certify_nonneg(&q, slope, lo, hi, q.eval(lo), q.eval(hi), 40, TOL) {
                        return Err(Error::Verification(format!("p(z) >= 3z not certified on [{lo}, {hi}]")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses and re-verifies a record.
    pub fn from_json(s: &str) -> Result<Self> {
        let cert: CertifiedSsve = serde_json::from_str(s)?;
        cert.verify()?;
        Ok(cert)
    }
}

/// A function with slope at most `slope` on `[lo, hi]` stays above the mean
/// of its endpoint values minus `slope (hi - lo) / 2`; bisects until that
/// bound is at least `-tol`.
#[allow(clippy::too_many_arguments)]
fn certify_nonneg(q: &UniPoly, slope: f64, lo: f64, hi: f64, qlo: f64, qhi: f64, depth: u32, tol: f64) -> bool {
    if qlo < -tol || qhi < -tol {
        return false;
    }
    if (qlo + qhi) / 2.0 - slope * (hi - lo) / 2.0 >= -tol {
        return true;
    }
    if depth == 0 {
        return false;
    }
    let mid = 0.5 * (lo + hi);
    let qm = q.eval(mid);
    certify_nonneg(q, slope, lo, mid, qlo, qm, depth - 1, tol) && certify_nonneg(q, slope, mid, hi, qm, qhi, depth - 1, tol)
}

/// Upper bound on `sup |p'|` over `interval`, which must lie in the domain
/// for the Chebyshev and Bernstein bases.
fn derivative_sup(p: &UniPoly, interval: (f64, f64)) -> f64 {
    let d = p.derivative();
    match d.basis {
        Basis::Monomial => {
            let r = interval.0.abs().max(interval.1.abs());
            d.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
        }
        Basis::Chebyshev => d.coeffs.iter().map(|c| c.abs()).sum(),
        Basis::Bernstein => d.coeffs.iter().fold(0.0, |m: f64, c| m.max(c.abs())),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub n: usize,
    pub c: f64,
    /// `ell / sqrt n`.
    pub big_c: f64,
    pub ell: usize,
    pub holds: bool,
    /// `min P_ell(x) / x` over the grid on `(0, 1/32]`.
    pub min_ratio: f64,
    /// `sup P_ell(x) / x` on `(0, 1/32]`, attained as `x -> 0`.
    pub max_ratio: f64,
    pub max_intermediate: f64,
    pub first_failure: Option<f64>,
    pub certificate: Option<CertifiedSsve>,
}

/// Chooses `ell` from the lower chain `P(x) >= x (1 + 7c / (8 sqrt n))` on
/// `[0, 1/8]` and checks `3x <= P_ell(x) <= 4x` with every iterate at most
/// `1/8` for `x` on a grid of `(0, 1/32]`.
pub fn noisy_hypercube_certificate(n: usize, c: f64) -> Result<CertReport> {
    if n == 0 || !(c > 0.0) {
        return Err(Error::param("need n >= 1 and c > 0"));
    }
    let root_n = (n as f64).sqrt();
    let a = c / root_n;
    if a > 1.0 {
        return Err(Error::param(format!("c / sqrt n = {a} exceeds 1; the profile is not monotone")));
    }
    let base = 8.0 / (7.0 * c) * 3f64.ln();
    let lower_growth = 1.0 + 7.0 * a / 8.0;
    let ell = ((base * root_n).ceil() as usize).max((3f64.ln() / lower_growth.ln()).ceil() as usize);
    let plan = iterate_profile(n, c, ell);

    let mut min_ratio = f64::INFINITY;
    let mut max_intermediate: f64 = 0.0;
    let mut first_failure = None;
    for k in 1..=GRID {
        let x = SSVE_DELTA * k as f64 / GRID as f64;
        let traj = plan.trajectory(x);
        let last = *traj.last().expect("non-empty");
        let inner = traj[..traj.len() - 1].iter().fold(0.0f64, |m, &v| m.max(v));
        max_intermediate = max_intermediate.max(inner);
        let ratio = last / x;
        min_ratio = min_ratio.min(ratio);
        if first_failure.is_none() && (ratio < 3.0 || ratio > 4.0 || inner > 0.125) {
            first_failure = Some(x);
        }
    }
    let max_ratio = (1.0 + a).powi(ell as i32);
    if first_failure.is_none() && max_ratio > 4.0 {
        first_failure = Some(0.0);
    }
    let holds = first_failure.is_none();
    let certificate = holds.then(|| CertifiedSsve {
        delta: SSVE_DELTA,
        degree_bound: plan.degree(),
        p: CertPoly::IterationPlan { n, c, ell },
        provenance: format!("noisy hypercube, dimension {n}, empirical boundary constant c = {c}"),
    });
    Ok(CertReport {
        n,
        c,
        big_c: ell as f64 / root_n,
        ell,
        holds,
        min_ratio,
        max_ratio,
        max_intermediate,
        first_failure,
        certificate,
    })
}
