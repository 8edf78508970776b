//! Boolean functions on `{0,1}^n`.
//!
//! Inputs are bitmasks: bit `i` of `x` is coordinate `i + 1`. Characters are
//! `chi_S(x) = (-1)^{|x & S|}` and Fourier coefficients use the uniform
//! measure, `f^(S) = E[f chi_S]`.

mod certificate;
mod scan;

pub use certificate::{
    expansion_profile, iterate_profile, iterate_profile_expanded,
    noisy_hypercube_certificate, CertPoly, CertReport, CertifiedSsve, SSVE_DELTA,
};
pub use scan::{min_talagrand_constant, pinned_boundary_constant, restriction_w1_check, RestrictionReport, ScanMode, TalagrandScan};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MAX_DIMENSION: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BooleanFunction {
    n: usize,
    table: Vec<bool>,
}

impl BooleanFunction {
    pub fn new(n: usize, table: Vec<bool>) -> Result<Self> {
        if n > MAX_DIMENSION {
            return Err(Error::param(format!("dimension {n} exceeds {MAX_DIMENSION}")));
        }
        if table.len() != 1 << n {
            return Err(Error::param(format!("truth table needs {} entries, got {}", 1usize << n, table.len())));
        }
        Ok(BooleanFunction { n, table })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        if n > MAX_DIMENSION {
            return Err(Error::param(format!("dimension {n} exceeds {MAX_DIMENSION}")));
        }
        Ok(BooleanFunction { n, table: (0..1usize << n).map(f).collect() })
    }

    /// Function whose truth table is the low `2^n` bits of `bits`.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::param("from_bits supports n <= 6"));
        }
        Self::from_fn(n, |x| bits >> x & 1 == 1)
    }

    /// `x_i` for coordinate `i` in `1..=n`.
    pub fn dictator(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::param(format!("coordinate {i} outside 1..={n}")));
        }
        Self::from_fn(n, |x| x >> (i - 1) & 1 == 1)
    }

    pub fn parity(n: usize) -> Result<Self> {
        Self::from_fn(n, |x| x.count_ones() % 2 == 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn at(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn mean(&self) -> f64 {
        self.table.iter().filter(|&&b| b).count() as f64 / self.table.len() as f64
    }

    /// `d_i f(x) = f(x^{i -> 0}) - f(x^{i -> 1})` for coordinate `i` in `1..=n`.
    pub fn partial_derivative(&self, i: usize) -> Result<Vec<i8>> {
        if i == 0 || i > self.n {
            return Err(Error::param(format!("coordinate {i} outside 1..={}", self.n)));
        }
        let bit = 1usize << (i - 1);
        Ok((0..self.table.len())
            .map(|x| self.table[x & !bit] as i8 - self.table[x | bit] as i8)
            .collect())
    }

    /// Number of coordinates whose flip changes `f(x)`, i.e. `||grad f(x)||^2`.
    pub fn sensitivity(&self, x: usize) -> usize {
        (0..self.n).filter(|&i| self.table[x] != self.table[x ^ (1 << i)]).count()
    }

    /// All Fourier coefficients, indexed by the subset bitmask.
    pub fn fourier_coefficients(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self.table.iter().map(|&b| b as u8 as f64).collect();
        walsh_hadamard(&mut a);
        let scale = 1.0 / a.len() as f64;
        a.iter_mut().for_each(|v| *v *= scale);
        a
    }

    /// `W^k[f] = sum_{|S| = k} f^(S)^2` for `k = 0..=n`.
    pub fn fourier_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n + 1];
        for (s, c) in self.fourier_coefficients().into_iter().enumerate() {
            w[s.count_ones() as usize] += c * c;
        }
        w
    }

    /// `g(x) = 1` iff `f(x) = 0` and some neighbour of `x` has `f = 1`.
    pub fn outer_boundary(&self) -> BooleanFunction {
        let table = (0..self.table.len())
            .map(|x| !self.table[x] && (0..self.n).any(|i| self.table[x ^ (1 << i)]))
            .collect();
        BooleanFunction { n: self.n, table }
    }

    /// `E ||grad f||_2`.
    pub fn mean_gradient_norm(&self) -> f64 {
        let s: f64 = (0..self.table.len()).map(|x| (self.sensitivity(x) as f64).sqrt()).sum();
        s / self.table.len() as f64
    }

    /// `E[grad f]`, one entry per coordinate.
    pub fn mean_gradient(&self) -> Vec<f64> {
        (1..=self.n)
            .map(|i| {
                let d = self.partial_derivative(i).expect("valid coordinate");
                d.iter().map(|&v| v as f64).sum::<f64>() / d.len() as f64
            })
            .collect()
    }

    /// `E ||grad f||_2 / (E f (1 - E f))`; infinite for constant functions.
    pub fn talagrand_ratio(&self) -> f64 {
        let m = self.mean();
        let var = m * (1.0 - m);
        if var == 0.0 {
            return f64::INFINITY;
        }
        self.mean_gradient_norm() / var
    }

    /// `sqrt(n) E[g] / (E f (1 - E f))` with `g` the outer boundary.
    pub fn vertex_boundary_ratio(&self) -> f64 {
        let m = self.mean();
        let var = m * (1.0 - m);
        if var == 0.0 {
            return f64::INFINITY;
        }
        (self.n as f64).sqrt() * self.outer_boundary().mean() / var
    }

    /// Restriction fixing the coordinates outside `keep` (a bitmask) to the
    /// matching bits of `z`; the result is indexed by the kept coordinates in
    /// increasing order.
    pub fn restrict(&self, keep: usize, z: usize) -> BooleanFunction {
        let kept: Vec<usize> = (0..self.n).filter(|&i| keep >> i & 1 == 1).collect();
        let base = z & !keep;
        let table = (0..1usize << kept.len())
            .map(|y| {
                let x = kept.iter().enumerate().fold(base, |acc, (j, &i)| acc | ((y >> j & 1) << i));
                self.table[x]
            })
            .collect();
        BooleanFunction { n: kept.len(), table }
    }
}

/// In-place unnormalised Walsh-Hadamard transform.
pub fn walsh_hadamard(a: &mut [f64]) {
    let n = a.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for j in block..block + h {
                let (x, y) = (a[j], a[j + h]);
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

/// Residuals of the two Fourier identities for Boolean functions:
/// `W^{>=1} - E f (1 - E f)` and `W^1 - |E grad f|^2 / 4`.
pub fn fourier_identity_residuals(f: &BooleanFunction) -> (f64, f64) {
    let w = f.fourier_weights();
    let m = f.mean();
    let high: f64 = w[1..].iter().sum();
    let g = f.mean_gradient();
    let norm2: f64 = g.iter().map(|v| v * v).sum();
    (high - m * (1.0 - m), w.get(1).copied().unwrap_or(0.0) - norm2 / 4.0)
}

/// Checks `d_i f(x) (g(x) + g(x xor e_i)) = d_i f(x)` for all `i` and `x`.
pub fn boundary_identity_holds(f: &BooleanFunction) -> bool {
    let g = f.outer_boundary();
    (1..=f.n()).all(|i| {
        let d = f.partial_derivative(i).expect("valid coordinate");
        let bit = 1usize << (i - 1);
        (0..d.len()).all(|x| {
            let gs = g.at(x) as i8 + g.at(x ^ bit) as i8;
            d[x] * gs == d[x]
        })
    })
}
