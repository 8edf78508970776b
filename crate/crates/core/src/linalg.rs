//! Dense symmetric eigensolvers and the PSD-cone projection.
//!
//! Matrices are square, stored as flat `n * n` slices. Every routine here
//! takes symmetric input, so row- and column-major layouts coincide.

use crate::{Error, Result};

/// Eigenvalues in ascending order.
pub fn eigenvalues(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    check_len(n, a)?;
    backend::eigenvalues(n, a.to_vec())
}

/// Eigenvalues in ascending order with eigenvectors stored column by column:
/// eigenvector `k` occupies `vecs[k * n..(k + 1) * n]`.
pub fn eigh(n: usize, a: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_len(n, a)?;
    backend::eigh(n, a.to_vec())
}

/// Replaces `a` by its Frobenius-nearest positive semidefinite matrix and
/// returns the smallest eigenvalue of the input.
pub fn psd_project(n: usize, a: &mut [f64]) -> Result<f64> {
    check_len(n, a)?;
    if n == 0 {
        return Ok(0.0);
    }
    let (w, v) = backend::eigh(n, a.to_vec())?;
    let neg = w.iter().take_while(|&&x| x < 0.0).count();
    if neg == 0 {
        return Ok(w[0]);
    }
    if neg <= n - neg {
        // a_+ = a - a_- = a + sum |w_k| v_k v_k^T over negative w_k
        let cols: Vec<(f64, &[f64])> = (0..neg).map(|k| (w[k], &v[k * n..(k + 1) * n])).collect();
        backend::rank_update(n, a, &cols, 1.0);
    } else {
        let cols: Vec<(f64, &[f64])> = (neg..n).map(|k| (w[k], &v[k * n..(k + 1) * n])).collect();
        backend::rank_update(n, a, &cols, 0.0);
    }
    Ok(w[0])
}

/// Smallest eigenvalue.
pub fn min_eigenvalue(n: usize, a: &[f64]) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    Ok(eigenvalues(n, a)?[0])
}

fn check_len(n: usize, a: &[f64]) -> Result<()> {
    if a.len() != n * n {
        return Err(Error::Linalg(format!("expected {} entries, got {}", n * n, a.len())));
    }
    Ok(())
}

mod backend {
    use crate::{Error, Result};
    use faer::{Mat, MatRef, Side};

    fn decompose(n: usize, a: &[f64]) -> Result<(Vec<f64>, Mat<f64>)> {
        let m = MatRef::from_column_major_slice(a, n, n);
        let e = m.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Linalg(format!("{e:?}")))?;
        let s = e.S().column_vector();
        let w: Vec<f64> = (0..n).map(|k| s[k]).collect();
        Ok((w, e.U().to_owned()))
    }

    pub fn eigenvalues(n: usize, a: Vec<f64>) -> Result<Vec<f64>> {
        let m = MatRef::from_column_major_slice(&a, n, n);
        let mut w = m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| Error::Linalg(format!("{e:?}")))?;
        w.sort_by(|x, y| x.total_cmp(y));
        Ok(w)
    }

    pub fn eigh(n: usize, a: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        let (w, u) = decompose(n, &a)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| w[i].total_cmp(&w[j]));
        let mut vecs = Vec::with_capacity(n * n);
        for &k in &order {
            vecs.extend((0..n).map(|i| u[(i, k)]));
        }
        Ok((order.iter().map(|&k| w[k]).collect(), vecs))
    }

    /// `a <- beta * a + sum_k |w_k| v_k v_k^T`.
    pub fn rank_update(n: usize, a: &mut [f64], cols: &[(f64, &[f64])], beta: f64) {
        let b = Mat::from_fn(n, cols.len(), |i, k| cols[k].1[i] * cols[k].0.abs().sqrt());
        let bbt = &b * b.transpose();
        for j in 0..n {
            for i in 0..n {
                a[j * n + i] = beta * a[j * n + i] + bbt[(i, j)];
            }
        }
    }
}
