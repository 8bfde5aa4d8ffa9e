//! Community structure: partitions, k-means and regularized spectral clustering.

mod kmeans;
mod spectral;

pub use kmeans::{kmeans, KMeansFit};
pub use spectral::{
    regularized_laplacian, select_k_eigengap, spectral_cluster, spectral_cluster_detailed,
    EigenOrdering, SpectralConfig, SpectralOutcome,
};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::pairs;

/// Community assignment of every node plus the block edge/pair counts of
/// the graph it was computed on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    assignments: Vec<usize>,
    k: usize,
    sizes: Vec<usize>,
    /// `K × K` row-major, symmetric; diagonal counts edges inside a community.
    block_edge_counts: Vec<u64>,
    /// `K × K` row-major; `C(n_a, 2)` on the diagonal, `n_a · n_b` off it.
    block_pair_counts: Vec<u64>,
}

impl Partition {
    /// Validate `assignments` (labels `0..K`, every community non-empty)
    /// and count blocks on `g`.
    pub fn new(g: &Graph, assignments: Vec<usize>) -> Result<Self> {
        if assignments.len() != g.n_nodes() {
            return Err(Error::domain(format!(
                "partition covers {} nodes, graph has {}",
                assignments.len(),
                g.n_nodes()
            )));
        }
        let k = assignments.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; k];
        for &c in &assignments {
            sizes[c] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::fit(format!("community {empty} is empty")));
        }
        let mut block_edge_counts = vec![0u64; k * k];
        for &(i, j) in g.edges() {
            let (a, b) = (assignments[i], assignments[j]);
            block_edge_counts[a * k + b] += 1;
            if a != b {
                block_edge_counts[b * k + a] += 1;
            }
        }
        let mut block_pair_counts = vec![0u64; k * k];
        for a in 0..k {
            for b in 0..k {
                block_pair_counts[a * k + b] =
                    if a == b { pairs(sizes[a]) } else { sizes[a] as u64 * sizes[b] as u64 };
            }
        }
        Ok(Partition { assignments, k, sizes, block_edge_counts, block_pair_counts })
    }

    /// Relabel so communities are numbered by their smallest member.
    pub fn canonical(g: &Graph, raw: &[usize]) -> Result<Self> {
        let mut map: Vec<Option<usize>> = Vec::new();
        let mut next = 0;
        let mut out = Vec::with_capacity(raw.len());
        for &c in raw {
            if c >= map.len() {
                map.resize(c + 1, None);
            }
            let label = *map[c].get_or_insert_with(|| {
                next += 1;
                next - 1
            });
            out.push(label);
        }
        Self::new(g, out)
    }

    /// A single community holding every node.
    pub fn trivial(g: &Graph) -> Result<Self> {
        Self::new(g, vec![0; g.n_nodes()])
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    #[inline]
    pub fn community(&self, i: usize) -> usize {
        self.assignments[i]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_nodes(&self) -> usize {
        self.assignments.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// `m_ab`: observed edges between communities `a` and `b`.
    #[inline]
    pub fn block_edges(&self, a: usize, b: usize) -> u64 {
        self.block_edge_counts[a * self.k + b]
    }

    /// `n_ab`: possible edges between communities `a` and `b`.
    #[inline]
    pub fn block_pairs(&self, a: usize, b: usize) -> u64 {
        self.block_pair_counts[a * self.k + b]
    }

    /// Structural checks for partitions read from disk.
    pub fn validate(&self) -> Result<()> {
        let k = self.k;
        let ok = self.assignments.iter().all(|&c| c < k)
            && self.sizes.len() == k
            && self.block_edge_counts.len() == k * k
            && self.block_pair_counts.len() == k * k
            && self.sizes.iter().all(|&s| s > 0)
            && (0..k).all(|a| self.assignments.iter().filter(|&&c| c == a).count() == self.sizes[a])
            && (0..k).all(|a| {
                (0..k).all(|b| {
                    self.block_edges(a, b) == self.block_edges(b, a)
                        && self.block_edges(a, b) <= self.block_pairs(a, b)
                        && self.block_pairs(a, b)
                            == if a == b {
                                pairs(self.sizes[a])
                            } else {
                                self.sizes[a] as u64 * self.sizes[b] as u64
                            }
                })
            });
        if ok { Ok(()) } else { Err(Error::domain("inconsistent partition")) }
    }
}
