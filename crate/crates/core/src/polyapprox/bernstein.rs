//! Bernstein proxy for the square root on `[0, n]`.

use serde::{Deserialize, Serialize};

use super::UniPoly;
use crate::{Error, Result};

/// `B(x) = sqrt(n) * Be_m(sqrt)(x / n)` in Bernstein form on `[0, n]`.
pub fn sqrt_proxy(n: usize, m: usize) -> Result<UniPoly> {
    if n == 0 || m < 64 * n {
        return Err(Error::param(format!("sqrt proxy needs n >= 1 and m >= 64 n (n = {n}, m = {m})")));
    }
    let nf = n as f64;
    let coeffs = (0..=m).map(|k| (nf * k as f64 / m as f64).sqrt()).collect();
    Ok(UniPoly::bernstein(coeffs, (0.0, nf)))
}

/// Outcome of one checked property: whether it holds and the smallest
/// slack observed (negative when violated).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub holds: bool,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProxyReport {
    pub n: usize,
    pub m: usize,
    /// The seven shape properties, in order.
    pub properties: Vec<PropertyCheck>,
    /// `|Be_m(sqrt)(s) - sqrt(s)| <= (s(1 - s)/m)^(1/4)` on a grid.
    pub envelope: PropertyCheck,
}

impl ProxyReport {
    pub fn all_hold(&self) -> bool {
        self.envelope.holds && self.properties.iter().all(|p| p.holds)
    }
}

const TOL: f64 = 1e-12;
const GRID: usize = 20_000;

fn check(name: &str, margin: f64) -> PropertyCheck {
    PropertyCheck { name: name.into(), holds: margin >= -TOL, margin }
}

/// Checks the shape properties of a square-root proxy on `[0, n]`.
///
/// Monotonicity and concavity follow from the Bernstein coefficients, and
/// the upper bound in (1) from Jensen's inequality. The remaining pointwise
/// bounds are checked on grids, bracketing each cell with the monotone
/// values at its ends.
pub fn verify_proxy_properties(b: &UniPoly, n: usize) -> Result<ProxyReport> {
    if b.basis != super::Basis::Bernstein || b.domain != (0.0, n as f64) || n == 0 {
        return Err(Error::param("expected a Bernstein polynomial on [0, n]"));
    }
    let c = &b.coeffs;
    let m = b.degree();
    let nf = n as f64;
    let root_n = nf.sqrt();

    let first_diff_min = c.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let second_diff_max = c.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).fold(f64::NEG_INFINITY, f64::max);
    let coeff_min = c.iter().copied().fold(f64::INFINITY, f64::min);
    let slope0 = m as f64 * (c[1] - c[0]) / nf;
    let origin = c[0];

    // (1) 0 <= B(x^2) <= x on [0, sqrt n]. The coefficients sample the
    // concave sqrt, so B(y) = E[sqrt(n K / m)] <= sqrt(y) by Jensen; the
    // grid records how tight that is.
    let sampled = c
        .iter()
        .enumerate()
        .map(|(k, &ck)| -(ck - (nf * k as f64 / m as f64).sqrt()).abs())
        .fold(0.0f64, f64::min);
    let mut m1 = coeff_min.min(sampled).min(-origin.abs());
    for y in grid(0.0, nf) {
        let v = b.eval(y);
        m1 = m1.min(v).min(y.sqrt() - v);
    }

    // (2) nondecreasing
    let mut m2 = first_diff_min;
    let ys = grid(0.0, nf);
    let vals: Vec<f64> = ys.iter().map(|&y| b.eval(y)).collect();
    for w in vals.windows(2) {
        m2 = m2.min(w[1] - w[0]);
    }

    // (3) B(x^2) >= x/2 on [1/2, sqrt n]
    let mut m3 = f64::INFINITY;
    if root_n >= 0.5 {
        let xs = grid(0.5, root_n);
        for w in xs.windows(2) {
            m3 = m3.min(b.eval(w[0] * w[0]) - w[1] / 2.0);
        }
    }

    // (4) B(x) >= x/2 on [0, 1]: B(x)/x is nonincreasing, so x = 1 suffices
    let m4 = (b.eval(1.0) - 0.5).min(-second_diff_max.max(0.0));

    // (5) <u, v> <= 4 B(|u|) B(|v|) for 0/1 vectors: min(a, b) <= 4 B(a) B(b)
    let bi: Vec<f64> = (0..=n).map(|a| b.eval(a as f64)).collect();
    let mut m5 = f64::INFINITY;
    for a in 0..=n {
        for bb in a..=n {
            m5 = m5.min(4.0 * bi[a] * bi[bb] - a as f64);
        }
    }

    // (6) B(a/d) <= (2/sqrt d) B(a); for d >= slope0^2 a it follows from
    // B(y) <= slope0 y and B(a) >= sqrt(a)/2
    let mut m6 = f64::INFINITY;
    let dmax = (slope0 * slope0 * nf).ceil() as usize;
    for a in 1..=n {
        for d in 1..=dmax.max(1) {
            let df = d as f64;
            m6 = m6.min(2.0 / df.sqrt() * bi[a] - b.eval(a as f64 / df));
        }
        m6 = m6.min(bi[a] - (a as f64).sqrt() / 2.0);
    }

    // (7) concave
    let mut m7 = -second_diff_max;
    for w in vals.windows(3) {
        m7 = m7.min(-(w[2] - 2.0 * w[1] + w[0]));
    }

    // envelope of the underlying Bernstein approximation of sqrt on [0, 1]
    let mut me = f64::INFINITY;
    for s in grid(0.0, 1.0) {
        let be = b.eval(s * nf) / root_n;
        me = me.min((s * (1.0 - s) / m as f64).powf(0.25) - (be - s.sqrt()).abs());
    }

    let properties = vec![
        check("0 <= B(x^2) <= x", m1),
        check("B nondecreasing", m2),
        check("B(x^2) >= x/2 for x >= 1/2", m3),
        check("B(x) >= x/2 on [0, 1]", m4),
        check("<u,v> <= 4 B(|u|) B(|v|)", m5),
        check("B(|u|/d) <= (2/sqrt d) B(|u|)", m6),
        check("B concave", m7),
    ];
    Ok(ProxyReport { n, m, properties, envelope: check("Bernstein envelope", me) })
}

fn grid(a: f64, b: f64) -> Vec<f64> {
    (0..=GRID).map(|i| a + (b - a) * i as f64 / GRID as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proxy_rejects_small_m() {
        assert!(sqrt_proxy(4, 255).is_err());
        assert!(sqrt_proxy(0, 64).is_err());
    }

    #[test]
    fn proxy_n1_all_properties() {
        let b = sqrt_proxy(1, 64).unwrap();
        let r = verify_proxy_properties(&b, 1).unwrap();
        assert!(r.all_hold(), "{r:?}");
    }

    #[test]
    fn proxy_values_near_sqrt() {
        let b = sqrt_proxy(4, 256).unwrap();
        // Fact-style envelope at x = n/2: |B - sqrt x| <= sqrt(n) (1/(4m))^(1/4)
        let x = 2.0;
        assert!((b.eval(x) - x.sqrt()).abs() <= 2.0 * (0.25 / 256.0f64).powf(0.25));
        assert_eq!(b.eval(0.0), 0.0);
        assert!((b.eval(4.0) - 2.0).abs() < 1e-12);
    }
}
