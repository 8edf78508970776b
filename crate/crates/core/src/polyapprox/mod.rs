//! Univariate polynomials and the approximations built from them.
//!
//! High-degree polynomials are kept in a numerically stable basis
//! (Chebyshev or Bernstein) and never expanded into monomials.

mod bernstein;
mod step;

pub use bernstein::{sqrt_proxy, verify_proxy_properties, ProxyReport};
pub use step::{
    check_condition_on_q, check_q_large, step_poly, step_poly_with_cap, verify_step, ConditionOnQReport,
    QLargeReport, StepReport, DEFAULT_STEP_DEGREE_CAP,
};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `sum c_k x^k`.
    Monomial,
    /// `sum c_k T_k(t)` with `t` the affine image of the domain onto `[-1, 1]`.
    Chebyshev,
    /// `sum c_k C(m, k) s^k (1 - s)^(m - k)` with `s` the affine image of
    /// the domain onto `[0, 1]`.
    Bernstein,
}

/// A univariate polynomial with a nominal domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniPoly {
    pub basis: Basis,
    pub coeffs: Vec<f64>,
    pub domain: (f64, f64),
}

impl UniPoly {
    pub fn monomial(coeffs: Vec<f64>) -> Self {
        UniPoly { basis: Basis::Monomial, coeffs, domain: (0.0, 1.0) }
    }

    pub fn chebyshev(coeffs: Vec<f64>, domain: (f64, f64)) -> Self {
        UniPoly { basis: Basis::Chebyshev, coeffs, domain }
    }

    pub fn bernstein(coeffs: Vec<f64>, domain: (f64, f64)) -> Self {
        UniPoly { basis: Basis::Bernstein, coeffs, domain }
    }

    pub fn with_domain(mut self, domain: (f64, f64)) -> Self {
        self.domain = domain;
        self
    }

    /// Formal degree (number of coefficients minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.basis {
            Basis::Monomial => horner_compensated(&self.coeffs, x),
            Basis::Chebyshev => {
                let (a, b) = self.domain;
                clenshaw(&self.coeffs, (2.0 * x - a - b) / (b - a))
            }
            Basis::Bernstein => {
                let (a, b) = self.domain;
                bernstein_eval(&self.coeffs, (x - a) / (b - a))
            }
        }
    }

    /// Derivative in the same basis.
    pub fn derivative(&self) -> UniPoly {
        let c = &self.coeffs;
        let d = self.degree();
        let coeffs: Vec<f64> = match self.basis {
            Basis::Monomial => (1..c.len()).map(|k| k as f64 * c[k]).collect(),
            Basis::Chebyshev => {
                let (a, b) = self.domain;
                let scale = 2.0 / (b - a);
                let mut out = vec![0.0; d.max(1)];
                if d > 0 {
                    // c'_{k-1} = c'_{k+1} + 2 k c_k, then halve c'_0
                    let mut next = 0.0;
                    let mut next2 = 0.0;
                    for k in (1..=d).rev() {
                        let v = next2 + 2.0 * k as f64 * c[k];
                        out[k - 1] = v;
                        next2 = next;
                        next = v;
                    }
                    out[0] *= 0.5;
                }
                out.iter().map(|v| v * scale).collect()
            }
            Basis::Bernstein => {
                let (a, b) = self.domain;
                let m = d as f64 / (b - a);
                c.windows(2).map(|w| m * (w[1] - w[0])).collect()
            }
        };
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        UniPoly { basis: self.basis, coeffs, domain: self.domain }
    }

    /// `self(other(x))` for monomial-basis inputs, refusing results above
    /// `max_degree`.
    pub fn compose(&self, other: &UniPoly, max_degree: usize) -> Result<UniPoly> {
        if self.basis != Basis::Monomial || other.basis != Basis::Monomial {
            return Err(Error::param("composition is only defined for monomial-basis polynomials"));
        }
        let deg = self.degree() * other.degree();
        if deg > max_degree {
            return Err(Error::DegreeOverflow { needed: deg, available: max_degree });
        }
        let mut acc = vec![0.0; 1];
        for &ck in self.coeffs.iter().rev() {
            acc = poly_mul(&acc, &other.coeffs);
            acc[0] += ck;
        }
        acc.truncate(deg + 1);
        Ok(UniPoly::monomial(acc).with_domain(other.domain))
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation with an error-free transformation of each step.
fn horner_compensated(c: &[f64], x: f64) -> f64 {
    let Some((&last, rest)) = c.split_last() else { return 0.0 };
    let mut s = last;
    let mut err = 0.0f64;
    for &ck in rest.iter().rev() {
        let p = s * x;
        let pi = s.mul_add(x, -p);
        let t = p + ck;
        let z = t - p;
        let sigma = (p - (t - z)) + (ck - z);
        s = t;
        err = err.mul_add(x, pi + sigma);
    }
    s + err
}

fn clenshaw(c: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + t * b1 - b2
}

/// `E[c_K]` for `K ~ Binomial(m, s)`, with the weights generated outward
/// from the mode so no intermediate value overflows.
fn bernstein_eval(c: &[f64], s: f64) -> f64 {
    let m = c.len() - 1;
    if m == 0 {
        return c[0];
    }
    if s <= 0.0 {
        return c[0];
    }
    if s >= 1.0 {
        return c[m];
    }
    let mode = (((m + 1) as f64) * s).floor().min(m as f64) as usize;
    let log_pmf = ln_choose(m, mode) + mode as f64 * s.ln() + (m - mode) as f64 * (1.0 - s).ln();
    let p_mode = log_pmf.exp();
    let ratio = s / (1.0 - s);
    let mut total = p_mode * c[mode];
    let mut w = p_mode;
    for k in mode + 1..=m {
        w *= ratio * (m - k + 1) as f64 / k as f64;
        if w < 1e-300 {
            break;
        }
        total += w * c[k];
    }
    let mut w = p_mode;
    for k in (0..mode).rev() {
        w *= (k + 1) as f64 / ((m - k) as f64 * ratio);
        if w < 1e-300 {
            break;
        }
        total += w * c[k];
    }
    total
}

pub(crate) fn ln_choose(m: usize, k: usize) -> f64 {
    let k = k.min(m - k);
    (0..k).map(|i| ((m - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Binomial coefficient as a float.
pub fn choose(m: usize, k: usize) -> f64 {
    if k > m {
        return 0.0;
    }
    let k = k.min(m - k);
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// `f` applied `t` times, evaluated by iteration and never expanded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Iterated {
    pub base: UniPoly,
    pub times: usize,
}

impl Iterated {
    pub fn eval(&self, x: f64) -> f64 {
        (0..self.times).fold(x, |y, _| self.base.eval(y))
    }

    /// Every intermediate value `f^(0)(x), ..., f^(t)(x)`.
    pub fn trajectory(&self, x: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.times + 1);
        out.push(x);
        for _ in 0..self.times {
            let y = self.base.eval(*out.last().expect("non-empty"));
            out.push(y);
        }
        out
    }

    /// Formal degree `deg(f)^t`, saturating.
    pub fn degree(&self) -> u64 {
        (self.base.degree() as u64).saturating_pow(self.times as u32)
    }
}
