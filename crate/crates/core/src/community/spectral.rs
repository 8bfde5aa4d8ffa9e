use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{kmeans, Partition};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::symmetric_eigen;

/// How eigenvalues are ranked before the eigengap scan and the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenOrdering {
    /// Descending `|λ|`; strongly negative (bipartite-like) directions count.
    #[default]
    Absolute,
    /// Descending signed value.
    Signed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectralConfig {
    /// Degree regularizer; `None` uses the average degree.
    pub tau: Option<f64>,
    /// Largest K scanned; `None` uses `min(20, N / 4)` (at least 1).
    pub k_max: Option<usize>,
    /// Skip the eigengap scan and use this K.
    pub k_fixed: Option<usize>,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub seed: u64,
    pub ordering: EigenOrdering,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            tau: None,
            k_max: None,
            k_fixed: None,
            kmeans_restarts: 10,
            kmeans_max_iters: 100,
            seed: 0,
            ordering: EigenOrdering::Absolute,
        }
    }
}

/// `D_τ^{-1/2} A D_τ^{-1/2}` with `D_τ = diag(d_i + τ)`, dense row-major.
pub fn regularized_laplacian(g: &Graph, tau: f64) -> Result<Vec<f64>> {
    let n = g.n_nodes();
    if n == 0 {
        return Err(Error::domain("regularized Laplacian of an empty node set"));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::domain(format!("regularizer must be finite and nonnegative, got {tau}")));
    }
    let mut scale = Vec::with_capacity(n);
    for i in 0..n {
        let d = g.degree(i) as f64 + tau;
        if d <= 0.0 {
            return Err(Error::Numeric(format!(
                "node {i} is isolated and tau = 0: degree scaling is singular"
            )));
        }
        scale.push(1.0 / libm::sqrt(d));
    }
    let mut m = vec![0.0; n * n];
    for &(i, j) in g.edges() {
        let v = scale[i] * scale[j];
        m[i * n + j] = v;
        m[j * n + i] = v;
    }
    Ok(m)
}

fn gap_argmax(ranked: &[f64], k_max: usize, gap: impl Fn(f64, f64) -> f64) -> Result<usize> {
    let n = ranked.len();
    if k_max == 0 || k_max >= n {
        return Err(Error::domain(format!("k_max = {k_max} must lie in 1..{n}")));
    }
    let mut best_k = 1;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 1..=k_max {
        let g = gap(ranked[k - 1], ranked[k]);
        if g > best_gap {
            best_gap = g;
            best_k = k;
        }
    }
    Ok(best_k)
}

/// Eigengap heuristic: the `k ∈ 1..=k_max` maximizing `|λ_k| − |λ_{k+1}|`,
/// ties going to the smaller `k`. `eigenvalues` must be sorted by
/// descending absolute value.
pub fn select_k_eigengap(eigenvalues: &[f64], k_max: usize) -> Result<usize> {
    gap_argmax(eigenvalues, k_max, |a, b| libm::fabs(a) - libm::fabs(b))
}

/// Everything computed on the way to a partition.
#[derive(Debug, Clone)]
pub struct SpectralOutcome {
    pub partition: Partition,
    /// Eigenvalues in the configured ranking order.
    pub ranked_eigenvalues: Vec<f64>,
    pub tau: f64,
    pub k: usize,
}

pub fn spectral_cluster(g: &Graph, config: &SpectralConfig) -> Result<Partition> {
    spectral_cluster_detailed(g, config).map(|o| o.partition)
}

/// Regularized spectral clustering.
///
/// Builds `L_τ`, ranks its eigenpairs, picks K (fixed or by eigengap), embeds
/// each node as its row of the top-K eigenvectors scaled to unit length, and
/// runs k-means on those rows. Communities are numbered by smallest member.
pub fn spectral_cluster_detailed(g: &Graph, config: &SpectralConfig) -> Result<SpectralOutcome> {
    let n = g.n_nodes();
    if n < 2 {
        return Err(Error::domain("spectral clustering needs at least 2 nodes"));
    }
    let tau = config.tau.unwrap_or_else(|| 2.0 * g.n_edges() as f64 / n as f64);
    let lap = regularized_laplacian(g, tau)?;
    let eig = symmetric_eigen(&lap, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    match config.ordering {
        EigenOrdering::Absolute => {
            let v = eig.values();
            order.sort_by(|&a, &b| libm::fabs(v[b]).total_cmp(&libm::fabs(v[a])).then(a.cmp(&b)));
        }
        // already descending by value
        EigenOrdering::Signed => {}
    }
    let ranked: Vec<f64> = order.iter().map(|&j| eig.values()[j]).collect();

    let k = match config.k_fixed {
        Some(k) if k == 0 || k > n => {
            return Err(Error::domain(format!("k_fixed = {k} must lie in 1..={n}")))
        }
        Some(k) => k,
        None => {
            let k_max = config.k_max.unwrap_or_else(|| (n / 4).clamp(1, 20)).min(n - 1);
            match config.ordering {
                EigenOrdering::Absolute => select_k_eigengap(&ranked, k_max)?,
                EigenOrdering::Signed => gap_argmax(&ranked, k_max, |a, b| a - b)?,
            }
        }
    };

    let mut rows = vec![0.0; n * k];
    for (c, &j) in order.iter().take(k).enumerate() {
        for (i, &x) in eig.vector(j).iter().enumerate() {
            rows[i * k + c] = x;
        }
    }
    for row in rows.chunks_mut(k) {
        let norm = libm::sqrt(row.iter().map(|x| x * x).sum::<f64>());
        if norm < 1e-12 {
            row.iter_mut().for_each(|x| *x = 0.0);
        } else {
            row.iter_mut().for_each(|x| *x /= norm);
        }
    }

    let fit = kmeans(&rows, k, k, config.kmeans_restarts, config.kmeans_max_iters, config.seed)?;
    let partition = Partition::canonical(g, &fit.assignments)?;
    Ok(SpectralOutcome { partition, ranked_eigenvalues: ranked, tau, k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_examples() {
        let edge = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(regularized_laplacian(&edge, 0.0).unwrap(), vec![0.0, 1.0, 1.0, 0.0]);
        let l = regularized_laplacian(&edge, 1.0).unwrap();
        assert!((l[1] - 0.5).abs() < 1e-15 && (l[2] - 0.5).abs() < 1e-15);
        assert_eq!(regularized_laplacian(&Graph::empty(3), 1.0).unwrap(), vec![0.0; 9]);
        assert!(matches!(regularized_laplacian(&Graph::empty(3), 0.0), Err(Error::Numeric(_))));
    }

    #[test]
    fn eigengap_examples() {
        assert_eq!(select_k_eigengap(&[1.0, 0.98, 0.40, 0.35], 3).unwrap(), 2);
        assert_eq!(select_k_eigengap(&[1.0, 0.2, 0.1], 2).unwrap(), 1);
        assert_eq!(select_k_eigengap(&[0.8, 0.6, 0.4, 0.2], 3).unwrap(), 1);
        // absolute values decide
        assert_eq!(select_k_eigengap(&[1.0, -0.9, 0.1], 2).unwrap(), 2);
        assert!(select_k_eigengap(&[1.0, 0.5], 2).is_err());
        assert!(select_k_eigengap(&[1.0, 0.5], 0).is_err());
    }

    fn cliques(sizes: &[usize]) -> Graph {
        let mut e = Vec::new();
        let mut base = 0;
        for &s in sizes {
            for i in 0..s {
                for j in i + 1..s {
                    e.push((base + i, base + j));
                }
            }
            base += s;
        }
        Graph::from_edges(base, e).unwrap()
    }

    #[test]
    fn two_cliques_recovered() {
        let g = cliques(&[10, 10]);
        let p = spectral_cluster(&g, &SpectralConfig::default()).unwrap();
        assert_eq!(p.k(), 2);
        let mut want = vec![0; 10];
        want.extend([1; 10]);
        assert_eq!(p.assignments(), &want[..]);
    }

    #[test]
    fn complete_graph_is_one_community() {
        let g = cliques(&[12]);
        let p = spectral_cluster(&g, &SpectralConfig::default()).unwrap();
        assert_eq!(p.k(), 1);
    }

    #[test]
    fn components_map_to_communities() {
        let g = cliques(&[4, 6, 5]);
        let cfg = SpectralConfig { k_fixed: Some(3), ..Default::default() };
        let p = spectral_cluster(&g, &cfg).unwrap();
        assert_eq!(p.assignments(), &[0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn signed_ordering_runs() {
        let g = cliques(&[8, 8]);
        let cfg = SpectralConfig { ordering: EigenOrdering::Signed, ..Default::default() };
        assert_eq!(spectral_cluster(&g, &cfg).unwrap().k(), 2);
    }

    #[test]
    fn k_fixed_out_of_range() {
        let g = cliques(&[3, 3]);
        let cfg = SpectralConfig { k_fixed: Some(7), ..Default::default() };
        assert!(spectral_cluster(&g, &cfg).is_err());
    }
}
