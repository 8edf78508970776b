use serde::{Deserialize, Serialize};

use super::Graph;
use crate::{linalg, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralStats {
    /// Second largest eigenvalue of the normalized adjacency matrix.
    pub lambda2: f64,
    /// Smallest eigenvalue of the normalized adjacency matrix.
    pub lambda_min: f64,
    /// `1 - lambda2`.
    pub spectral_gap: f64,
    /// Isolated vertices, which are left out of the normalized matrix.
    pub isolated: Vec<usize>,
}

/// Spectrum of `D^{-1/2} A D^{-1/2}` restricted to non-isolated vertices.
pub fn spectral_stats(g: &Graph) -> Result<SpectralStats> {
    let keep: Vec<usize> = (0..g.n()).filter(|&u| g.degree(u) > 0).collect();
    let isolated: Vec<usize> = (0..g.n()).filter(|&u| g.degree(u) == 0).collect();
    if !isolated.is_empty() {
        log::warn!("{} isolated vertices excluded from the spectrum", isolated.len());
    }
    let k = keep.len();
    if k < 2 {
        return Ok(SpectralStats { lambda2: 0.0, lambda_min: 0.0, spectral_gap: 1.0, isolated });
    }
    let mut index = vec![usize::MAX; g.n()];
    for (i, &u) in keep.iter().enumerate() {
        index[u] = i;
    }
    let inv_sqrt: Vec<f64> = keep.iter().map(|&u| 1.0 / (g.degree(u) as f64).sqrt()).collect();
    let mut a = vec![0.0; k * k];
    for &(u, v) in g.edges() {
        let (i, j) = (index[u as usize], index[v as usize]);
        let w = inv_sqrt[i] * inv_sqrt[j];
        a[i * k + j] = w;
        a[j * k + i] = w;
    }
    let w = linalg::eigenvalues(k, &a)?;
    let lambda2 = w[k - 2];
    Ok(SpectralStats { lambda2, lambda_min: w[0], spectral_gap: 1.0 - lambda2, isolated })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_and_bipartite() {
        // K_n: normalized eigenvalues 1 and -1/(n-1)
        let s = spectral_stats(&Graph::complete(5)).unwrap();
        assert!((s.lambda2 + 0.25).abs() < 1e-12);
        let kb = Graph::complete_multipartite(&[4, 4]);
        let s = spectral_stats(&kb).unwrap();
        assert!(s.lambda2.abs() < 1e-12 && (s.lambda_min + 1.0).abs() < 1e-12);
    }

    #[test]
    fn petersen_spectrum() {
        // adjacency eigenvalues 3, 1, -2 divided by the degree
        let s = spectral_stats(&Graph::petersen()).unwrap();
        assert!((s.lambda2 - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.lambda_min + 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn isolated_vertices_excluded() {
        let g = Graph::new(5, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = spectral_stats(&g).unwrap();
        assert_eq!(s.isolated, vec![3, 4]);
        assert!((s.lambda2 + 0.5).abs() < 1e-12);
    }
}
