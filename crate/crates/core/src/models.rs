//! Independent-edge generative models fitted to an observed graph.
//!
//! Every model assigns each unordered node pair an edge probability; sampled
//! graphs include each pair independently. Probabilities the raw formulas push
//! above 1 (degree and DC-SBM models on skewed degree sequences) are capped
//! at 1, and the fit report counts how many pairs were affected.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::community::Partition;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::{pairs, KahanSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelVariant {
    Er,
    Degree,
    Sbm,
    Dcsbm,
}

impl ModelVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelVariant::Er => "er",
            ModelVariant::Degree => "degree",
            ModelVariant::Sbm => "sbm",
            ModelVariant::Dcsbm => "dcsbm",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ModelVariant::Er => "E-R",
            ModelVariant::Degree => "Degree",
            ModelVariant::Sbm => "SBM",
            ModelVariant::Dcsbm => "DC-SBM",
        }
    }
}

/// How the degree model's scale `α` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    /// Bisection so that the capped probabilities sum to M.
    #[default]
    ExactSum,
    /// `α = 1 / 2M`, capped at 1 afterwards.
    ChungLu,
}

/// Block-rate estimator of the degree-corrected SBM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DcsbmMode {
    /// `ω_ab = m_ab` as a plain plug-in.
    Paper,
    /// `ω_ab` normalized so expected block edge counts equal `m_ab`.
    #[default]
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum EdgeProbabilityModel {
    Er {
        n_nodes: usize,
        p: f64,
    },
    Degree {
        alpha: f64,
        degrees: Vec<usize>,
        mode: DegreeMode,
    },
    Sbm {
        partition: Partition,
        /// `K × K` row-major.
        phi: Vec<f64>,
    },
    Dcsbm {
        partition: Partition,
        theta: Vec<f64>,
        /// `K × K` row-major.
        omega: Vec<f64>,
        mode: DcsbmMode,
    },
}

/// Summary of a fitted model on the graph it was fitted to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFitReport {
    pub variant: ModelVariant,
    pub parameter_count: usize,
    /// May be `-inf`.
    pub log_likelihood_per_pair: f64,
    pub estimator: String,
    /// Pairs whose raw formula exceeded 1.
    pub capped_pairs: u64,
}

impl ModelFitReport {
    pub fn capped(&self) -> bool {
        self.capped_pairs > 0
    }
}

const ALPHA_TOLERANCE: f64 = 1e-9;
const ALPHA_MAX_ITERS: usize = 200;

/// Distinct positive degrees with multiplicities.
fn degree_classes(degrees: &[usize]) -> Vec<(f64, u64)> {
    let mut sorted: Vec<usize> = degrees.iter().copied().filter(|&d| d > 0).collect();
    sorted.sort_unstable();
    let mut classes: Vec<(f64, u64)> = Vec::new();
    for d in sorted {
        match classes.last_mut() {
            Some((v, c)) if *v == d as f64 => *c += 1,
            _ => classes.push((d as f64, 1)),
        }
    }
    classes
}

/// `Σ_{i<j} min(1, α d_i d_j)` together with the capped pair count and the
/// product sum over uncapped pairs (the slope of the current linear piece).
fn capped_sum(classes: &[(f64, u64)], alpha: f64) -> (f64, f64, f64) {
    let mut total = KahanSum::new();
    let mut capped = 0.0;
    let mut slope = KahanSum::new();
    for (x, &(u, cu)) in classes.iter().enumerate() {
        for &(v, cv) in &classes[x..] {
            let count = if u == v { (cu * (cu - 1) / 2) as f64 } else { (cu * cv) as f64 };
            if count == 0.0 {
                continue;
            }
            let raw = alpha * u * v;
            if raw >= 1.0 {
                capped += count;
                total.add(count);
            } else {
                slope.add(count * u * v);
                total.add(count * raw);
            }
        }
    }
    (total.value(), capped, slope.value())
}

/// Scale `α` with `Σ_{i<j} min(1, α d_i d_j) = M`.
fn solve_alpha(degrees: &[usize], m: f64) -> Result<f64> {
    let classes = degree_classes(degrees);
    let d_min = classes[0].0;
    let (mut lo, mut hi) = (0.0_f64, 1.0 / (d_min * d_min));
    let close = |s: f64| libm::fabs(s - m) <= ALPHA_TOLERANCE;

    let (s_hi, _, _) = capped_sum(&classes, hi);
    if close(s_hi) {
        return Ok(hi);
    }
    for _ in 0..ALPHA_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let (s, capped, slope) = capped_sum(&classes, mid);
        if close(s) {
            return Ok(mid);
        }
        // the sum is piecewise linear in α; try the root of the current piece
        if slope > 0.0 {
            let guess = (m - capped) / slope;
            if guess > lo && guess < hi && close(capped_sum(&classes, guess).0) {
                return Ok(guess);
            }
        }
        if s < m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numeric(format!(
        "degree-model scale did not converge in {ALPHA_MAX_ITERS} bisection steps"
    )))
}

impl EdgeProbabilityModel {
    /// Erdős–Rényi: `p = M / C(N, 2)`.
    pub fn fit_er(g: &Graph) -> Result<Self> {
        if g.n_nodes() < 2 {
            return Err(Error::fit("the E-R model needs at least 2 nodes"));
        }
        Ok(EdgeProbabilityModel::Er {
            n_nodes: g.n_nodes(),
            p: g.n_edges() as f64 / pairs(g.n_nodes()) as f64,
        })
    }

    /// Degree model, `p_ij = min(1, α d_i d_j)`.
    pub fn fit_degree(g: &Graph, mode: DegreeMode) -> Result<Self> {
        let m = g.n_edges();
        if m == 0 {
            return Err(Error::fit("the degree model is undefined for a graph without edges"));
        }
        let degrees = g.degrees();
        let alpha = match mode {
            DegreeMode::ChungLu => 1.0 / (2.0 * m as f64),
            DegreeMode::ExactSum => solve_alpha(&degrees, m as f64)?,
        };
        Ok(EdgeProbabilityModel::Degree { alpha, degrees, mode })
    }

    /// SBM with `φ_ab = m_ab / n_ab`; blocks with no possible pairs get 0.
    pub fn fit_sbm(g: &Graph, partition: &Partition) -> Result<Self> {
        let partition = Partition::new(g, partition.assignments().to_vec())?;
        let k = partition.k();
        let mut phi = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                let n_ab = partition.block_pairs(a, b);
                if n_ab > 0 {
                    phi[a * k + b] = partition.block_edges(a, b) as f64 / n_ab as f64;
                }
            }
        }
        Ok(EdgeProbabilityModel::Sbm { partition, phi })
    }

    /// Degree-corrected SBM with `θ_i = d_i / Σ_{j∈a} d_j`.
    pub fn fit_dcsbm(g: &Graph, partition: &Partition, mode: DcsbmMode) -> Result<Self> {
        let partition = Partition::new(g, partition.assignments().to_vec())?;
        let k = partition.k();
        let degrees = g.degrees();
        let mut volume = vec![0usize; k];
        for (i, &d) in degrees.iter().enumerate() {
            volume[partition.community(i)] += d;
        }
        if let Some(a) = volume.iter().position(|&v| v == 0) {
            return Err(Error::fit(format!(
                "community {a} has total degree 0, so its degree corrections are undefined"
            )));
        }
        let theta: Vec<f64> = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| d as f64 / volume[partition.community(i)] as f64)
            .collect();

        let mut omega = vec![0.0; k * k];
        match mode {
            DcsbmMode::Paper => {
                for a in 0..k {
                    for b in 0..k {
                        omega[a * k + b] = partition.block_edges(a, b) as f64;
                    }
                }
            }
            DcsbmMode::Exact => {
                let mut members: Vec<Vec<f64>> = vec![Vec::new(); k];
                for (i, &t) in theta.iter().enumerate() {
                    members[partition.community(i)].push(t);
                }
                let mass: Vec<f64> = members.iter().map(|ts| crate::numeric::sum(ts.iter().copied())).collect();
                // Σ_{i<j∈a} θ_i θ_j from suffix sums, all terms nonnegative
                let within: Vec<f64> = members
                    .iter()
                    .map(|ts| {
                        let mut suffix = 0.0;
                        let mut acc = KahanSum::new();
                        for &t in ts.iter().rev() {
                            acc.add(t * suffix);
                            suffix += t;
                        }
                        acc.value()
                    })
                    .collect();
                for a in 0..k {
                    for b in 0..k {
                        let m_ab = partition.block_edges(a, b) as f64;
                        let denom = if a == b { within[a] } else { mass[a] * mass[b] };
                        omega[a * k + b] = if denom > 0.0 { m_ab / denom } else { 0.0 };
                    }
                }
            }
        }
        Ok(EdgeProbabilityModel::Dcsbm { partition, theta, omega, mode })
    }

    pub fn variant(&self) -> ModelVariant {
        match self {
            EdgeProbabilityModel::Er { .. } => ModelVariant::Er,
            EdgeProbabilityModel::Degree { .. } => ModelVariant::Degree,
            EdgeProbabilityModel::Sbm { .. } => ModelVariant::Sbm,
            EdgeProbabilityModel::Dcsbm { .. } => ModelVariant::Dcsbm,
        }
    }

    pub fn n_nodes(&self) -> usize {
        match self {
            EdgeProbabilityModel::Er { n_nodes, .. } => *n_nodes,
            EdgeProbabilityModel::Degree { degrees, .. } => degrees.len(),
            EdgeProbabilityModel::Sbm { partition, .. } | EdgeProbabilityModel::Dcsbm { partition, .. } => {
                partition.n_nodes()
            }
        }
    }

    pub fn partition(&self) -> Option<&Partition> {
        match self {
            EdgeProbabilityModel::Sbm { partition, .. } | EdgeProbabilityModel::Dcsbm { partition, .. } => {
                Some(partition)
            }
            _ => None,
        }
    }

    /// Estimator label, e.g. `degree/exact_sum`.
    pub fn estimator(&self) -> &'static str {
        match self {
            EdgeProbabilityModel::Er { .. } => "er/mle",
            EdgeProbabilityModel::Degree { mode: DegreeMode::ExactSum, .. } => "degree/exact_sum",
            EdgeProbabilityModel::Degree { mode: DegreeMode::ChungLu, .. } => "degree/chung_lu",
            EdgeProbabilityModel::Sbm { .. } => "sbm/mle",
            EdgeProbabilityModel::Dcsbm { mode: DcsbmMode::Exact, .. } => "dcsbm/exact",
            EdgeProbabilityModel::Dcsbm { mode: DcsbmMode::Paper, .. } => "dcsbm/paper",
        }
    }

    /// Formula value before capping.
    #[inline]
    fn raw_probability(&self, i: usize, j: usize) -> f64 {
        // canonical order so p_ij and p_ji round identically
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        match self {
            EdgeProbabilityModel::Er { p, .. } => *p,
            EdgeProbabilityModel::Degree { alpha, degrees, .. } => alpha * degrees[i] as f64 * degrees[j] as f64,
            EdgeProbabilityModel::Sbm { partition, phi } => {
                phi[partition.community(i) * partition.k() + partition.community(j)]
            }
            EdgeProbabilityModel::Dcsbm { partition, theta, omega, .. } => {
                theta[i] * theta[j] * omega[partition.community(i) * partition.k() + partition.community(j)]
            }
        }
    }

    #[inline]
    fn probability_unchecked(&self, i: usize, j: usize) -> f64 {
        self.raw_probability(i, j).clamp(0.0, 1.0)
    }

    /// Edge probability of the pair `(i, j)`, capped into `[0, 1]`.
    pub fn edge_probability(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.n_nodes();
        if i == j {
            return Err(Error::domain(format!("no self-pairs: ({i}, {j})")));
        }
        if i >= n || j >= n {
            return Err(Error::domain(format!("pair ({i}, {j}) out of range for {n} nodes")));
        }
        Ok(self.probability_unchecked(i, j))
    }

    /// Number of pairs whose raw probability exceeds 1.
    pub fn capped_pairs(&self) -> u64 {
        match self {
            EdgeProbabilityModel::Er { .. } | EdgeProbabilityModel::Sbm { .. } => 0,
            _ => {
                let n = self.n_nodes();
                let mut count = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        if self.raw_probability(i, j) > 1.0 {
                            count += 1;
                        }
                    }
                }
                count
            }
        }
    }

    /// `Σ_{i<j} p_ij`.
    pub fn expected_edges(&self) -> f64 {
        let n = self.n_nodes();
        let mut acc = KahanSum::new();
        for i in 0..n {
            for j in i + 1..n {
                acc.add(self.probability_unchecked(i, j));
            }
        }
        acc.value()
    }

    /// Draw a graph, visiting pairs `(i, j)`, `i < j`, in lexicographic order
    /// with one uniform draw each.
    pub fn sample_graph<R: Rng + ?Sized>(&self, rng: &mut R) -> Graph {
        let n = self.n_nodes();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let p = self.probability_unchecked(i, j);
                if rng.random::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        Graph::from_canonical(n, edges)
    }

    /// Bernoulli log-likelihood of `g` divided by `C(N, 2)`, with `0 · ln 0 = 0`.
    /// Returns `-inf` when `g` has an edge of probability 0 or misses an edge
    /// of probability 1.
    pub fn log_likelihood_per_pair(&self, g: &Graph) -> Result<f64> {
        let n = self.n_nodes();
        if g.n_nodes() != n {
            return Err(Error::domain(format!("model has {n} nodes, graph has {}", g.n_nodes())));
        }
        if n < 2 {
            return Err(Error::domain("log-likelihood per pair needs at least 2 nodes"));
        }
        let adjacent = g.adjacency_bits();
        let mut acc = KahanSum::new();
        for i in 0..n {
            for j in i + 1..n {
                let p = self.probability_unchecked(i, j);
                let term = if adjacent[i * n + j] {
                    if p == 0.0 {
                        return Ok(f64::NEG_INFINITY);
                    }
                    libm::log(p)
                } else {
                    if p == 1.0 {
                        return Ok(f64::NEG_INFINITY);
                    }
                    libm::log1p(-p)
                };
                acc.add(term);
            }
        }
        Ok(acc.value() / pairs(n) as f64)
    }

    /// 1, N, `N + K(K+1)/2` or `2N + K(K+1)/2`.
    pub fn parameter_count(&self) -> usize {
        let n = self.n_nodes();
        match self {
            EdgeProbabilityModel::Er { .. } => 1,
            EdgeProbabilityModel::Degree { .. } => n,
            EdgeProbabilityModel::Sbm { partition, .. } => n + partition.k() * (partition.k() + 1) / 2,
            EdgeProbabilityModel::Dcsbm { partition, .. } => 2 * n + partition.k() * (partition.k() + 1) / 2,
        }
    }

    pub fn fit_report(&self, g: &Graph) -> Result<ModelFitReport> {
        Ok(ModelFitReport {
            variant: self.variant(),
            parameter_count: self.parameter_count(),
            log_likelihood_per_pair: self.log_likelihood_per_pair(g)?,
            estimator: self.estimator().into(),
            capped_pairs: self.capped_pairs(),
        })
    }

    /// Structural checks for models read from disk.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::domain(format!("invalid model: {m}")));
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        match self {
            EdgeProbabilityModel::Er { p, .. } if !unit(*p) => bad("p outside [0, 1]"),
            EdgeProbabilityModel::Degree { alpha, .. } if !(*alpha >= 0.0 && alpha.is_finite()) => {
                bad("alpha must be finite and nonnegative")
            }
            EdgeProbabilityModel::Sbm { partition, phi } => {
                partition.validate()?;
                let k = partition.k();
                if phi.len() != k * k || !phi.iter().all(|&x| unit(x)) {
                    return bad("phi must be K x K with entries in [0, 1]");
                }
                if (0..k).any(|a| (0..k).any(|b| phi[a * k + b] != phi[b * k + a])) {
                    return bad("phi must be symmetric");
                }
                Ok(())
            }
            EdgeProbabilityModel::Dcsbm { partition, theta, omega, .. } => {
                partition.validate()?;
                let k = partition.k();
                if theta.len() != partition.n_nodes() || !theta.iter().all(|&t| t >= 0.0 && t.is_finite()) {
                    return bad("theta must be nonnegative, one entry per node");
                }
                if omega.len() != k * k || !omega.iter().all(|&w| w >= 0.0 && w.is_finite()) {
                    return bad("omega must be K x K and nonnegative");
                }
                if (0..k).any(|a| (0..k).any(|b| omega[a * k + b] != omega[b * k + a])) {
                    return bad("omega must be symmetric");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;
    use approx::assert_relative_eq;

    fn g(n: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, e.iter().copied()).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j));
            }
        }
        g(n, &e)
    }

    fn star() -> Graph {
        g(4, &[(0, 1), (0, 2), (0, 3)])
    }

    fn two_blocks() -> (Graph, Partition) {
        let graph = g(4, &[(0, 1), (2, 3), (0, 2)]);
        let p = Partition::new(&graph, vec![0, 0, 1, 1]).unwrap();
        (graph, p)
    }

    #[test]
    fn er_examples() {
        let m = EdgeProbabilityModel::fit_er(&g(4, &[(0, 1), (1, 2), (2, 3)])).unwrap();
        assert_eq!(m.edge_probability(0, 3).unwrap(), 0.5);
        let k5 = EdgeProbabilityModel::fit_er(&complete(5)).unwrap();
        assert_eq!(k5.edge_probability(1, 4).unwrap(), 1.0);
        assert!(EdgeProbabilityModel::fit_er(&Graph::empty(1)).is_err());
    }

    #[test]
    fn degree_exact_sum_star() {
        let m = EdgeProbabilityModel::fit_degree(&star(), DegreeMode::ExactSum).unwrap();
        let EdgeProbabilityModel::Degree { alpha, .. } = m else { unreachable!() };
        assert_relative_eq!(alpha, 0.25, epsilon = 1e-12);
        assert_relative_eq!(m.edge_probability(0, 1).unwrap(), 0.75, epsilon = 1e-12);
        assert_relative_eq!(m.edge_probability(2, 3).unwrap(), 0.25, epsilon = 1e-12);
        assert!((m.expected_edges() - 3.0).abs() <= 1e-9);
    }

    #[test]
    fn degree_chung_lu_star() {
        let m = EdgeProbabilityModel::fit_degree(&star(), DegreeMode::ChungLu).unwrap();
        assert_relative_eq!(m.edge_probability(0, 2).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(m.edge_probability(1, 3).unwrap(), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn degree_on_regular_graph_matches_er() {
        // 6-cycle
        let c6 = g(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]);
        let m = EdgeProbabilityModel::fit_degree(&c6, DegreeMode::ExactSum).unwrap();
        let dens = 6.0 / 15.0;
        for i in 0..6 {
            for j in i + 1..6 {
                assert_relative_eq!(m.edge_probability(i, j).unwrap(), dens, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn degree_with_capping_still_sums_to_m() {
        // hub attached to everything plus a few extra edges
        let mut e: Vec<(usize, usize)> = (1..10).map(|j| (0, j)).collect();
        e.extend([(1, 2), (3, 4)]);
        let graph = g(10, &e);
        let m = EdgeProbabilityModel::fit_degree(&graph, DegreeMode::ExactSum).unwrap();
        assert!((m.expected_edges() - 11.0).abs() <= 1e-9);
        let cl = EdgeProbabilityModel::fit_degree(&graph, DegreeMode::ChungLu).unwrap();
        assert_eq!(cl.capped_pairs(), 0);
    }

    #[test]
    fn degree_complete_graph() {
        let m = EdgeProbabilityModel::fit_degree(&complete(5), DegreeMode::ExactSum).unwrap();
        assert!((m.expected_edges() - 10.0).abs() <= 1e-9);
        assert!(EdgeProbabilityModel::fit_degree(&Graph::empty(3), DegreeMode::ExactSum).is_err());
    }

    #[test]
    fn sbm_examples() {
        let (graph, p) = two_blocks();
        let m = EdgeProbabilityModel::fit_sbm(&graph, &p).unwrap();
        let EdgeProbabilityModel::Sbm { phi, .. } = &m else { unreachable!() };
        assert_eq!(phi, &vec![1.0, 0.25, 0.25, 1.0]);

        let er = EdgeProbabilityModel::fit_er(&graph).unwrap();
        let one = EdgeProbabilityModel::fit_sbm(&graph, &Partition::trivial(&graph).unwrap()).unwrap();
        assert_eq!(one.edge_probability(1, 3).unwrap(), er.edge_probability(1, 3).unwrap());

        let planted = g(4, &[(0, 1), (2, 3)]);
        let m = EdgeProbabilityModel::fit_sbm(&planted, &Partition::new(&planted, vec![0, 0, 1, 1]).unwrap()).unwrap();
        let EdgeProbabilityModel::Sbm { phi, .. } = &m else { unreachable!() };
        assert_eq!(phi, &vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn sbm_singleton_block_has_zero_diagonal() {
        let graph = g(3, &[(0, 1), (1, 2)]);
        let m = EdgeProbabilityModel::fit_sbm(&graph, &Partition::new(&graph, vec![0, 0, 1]).unwrap()).unwrap();
        let EdgeProbabilityModel::Sbm { phi, .. } = &m else { unreachable!() };
        assert_eq!(phi[3], 0.0);
    }

    #[test]
    fn dcsbm_two_modes() {
        let (graph, p) = two_blocks();
        let plug_in = EdgeProbabilityModel::fit_dcsbm(&graph, &p, DcsbmMode::Paper).unwrap();
        let EdgeProbabilityModel::Dcsbm { theta, .. } = &plug_in else { unreachable!() };
        for (t, want) in theta.iter().zip([2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0]) {
            assert_relative_eq!(*t, want, epsilon = 1e-15);
        }
        assert_relative_eq!(plug_in.edge_probability(0, 2).unwrap(), 4.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(plug_in.edge_probability(0, 1).unwrap(), 2.0 / 9.0, epsilon = 1e-15);

        let exact = EdgeProbabilityModel::fit_dcsbm(&graph, &p, DcsbmMode::Exact).unwrap();
        let EdgeProbabilityModel::Dcsbm { omega, .. } = &exact else { unreachable!() };
        assert_relative_eq!(omega[0], 4.5, epsilon = 1e-12);
        assert_relative_eq!(exact.edge_probability(0, 1).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dcsbm_reduces_to_er_on_regular_graph() {
        let c6 = g(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]);
        let m = EdgeProbabilityModel::fit_dcsbm(&c6, &Partition::trivial(&c6).unwrap(), DcsbmMode::Exact).unwrap();
        for i in 0..6 {
            for j in i + 1..6 {
                assert_relative_eq!(m.edge_probability(i, j).unwrap(), 0.4, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn dcsbm_isolated_node_and_dead_community() {
        let graph = g(4, &[(0, 1), (1, 2)]);
        let p = Partition::new(&graph, vec![0, 0, 0, 1]).unwrap();
        match EdgeProbabilityModel::fit_dcsbm(&graph, &p, DcsbmMode::Exact) {
            Err(Error::Fit(msg)) => assert!(msg.contains("community 1")),
            other => panic!("{other:?}"),
        }
        let p = Partition::new(&graph, vec![0, 0, 0, 0]).unwrap();
        let m = EdgeProbabilityModel::fit_dcsbm(&graph, &p, DcsbmMode::Exact).unwrap();
        for j in 0..3 {
            assert_eq!(m.edge_probability(3, j).unwrap(), 0.0);
        }
    }

    #[test]
    fn capping_engages() {
        let graph = g(2, &[(0, 1)]);
        let p = Partition::trivial(&graph).unwrap();
        let m = EdgeProbabilityModel::Dcsbm {
            partition: p,
            theta: vec![0.9, 0.9],
            omega: vec![2.0],
            mode: DcsbmMode::Paper,
        };
        assert_eq!(m.edge_probability(0, 1).unwrap(), 1.0);
        assert_eq!(m.capped_pairs(), 1);
        assert!(m.edge_probability(1, 1).is_err());
        assert!(m.edge_probability(0, 2).is_err());
    }

    #[test]
    fn degree_probability_example() {
        let m = EdgeProbabilityModel::Degree { alpha: 0.25, degrees: vec![3, 1], mode: DegreeMode::ExactSum };
        assert_eq!(m.edge_probability(0, 1).unwrap(), 0.75);
        assert_eq!(m.edge_probability(1, 0).unwrap(), 0.75);
    }

    #[test]
    fn sampling_extremes_and_determinism() {
        let zero = EdgeProbabilityModel::Er { n_nodes: 12, p: 0.0 };
        let one = EdgeProbabilityModel::Er { n_nodes: 12, p: 1.0 };
        for s in 0..5 {
            assert_eq!(zero.sample_graph(&mut stream(s, &[])).n_edges(), 0);
            assert_eq!(one.sample_graph(&mut stream(s, &[])).n_edges(), 66);
        }
        let half = EdgeProbabilityModel::Er { n_nodes: 30, p: 0.5 };
        assert_eq!(half.sample_graph(&mut stream(9, &[1])), half.sample_graph(&mut stream(9, &[1])));
        assert_ne!(half.sample_graph(&mut stream(9, &[1])), half.sample_graph(&mut stream(9, &[2])));
    }

    #[test]
    fn likelihood_examples() {
        let m = EdgeProbabilityModel::Er { n_nodes: 3, p: 0.5 };
        let ll = m.log_likelihood_per_pair(&g(3, &[(0, 1)])).unwrap();
        assert_relative_eq!(ll, -core::f64::consts::LN_2, epsilon = 1e-15);

        let k4 = complete(4);
        assert_eq!(EdgeProbabilityModel::fit_er(&k4).unwrap().log_likelihood_per_pair(&k4).unwrap(), 0.0);

        let zero = EdgeProbabilityModel::Er { n_nodes: 3, p: 0.0 };
        assert_eq!(zero.log_likelihood_per_pair(&g(3, &[(1, 2)])).unwrap(), f64::NEG_INFINITY);
        assert_eq!(zero.log_likelihood_per_pair(&Graph::empty(3)).unwrap(), 0.0);
        assert!(zero.log_likelihood_per_pair(&Graph::empty(4)).is_err());
    }

    #[test]
    fn parameter_counts() {
        let (graph, p) = two_blocks();
        assert_eq!(EdgeProbabilityModel::fit_er(&graph).unwrap().parameter_count(), 1);
        assert_eq!(EdgeProbabilityModel::fit_degree(&graph, DegreeMode::ChungLu).unwrap().parameter_count(), 4);
        assert_eq!(EdgeProbabilityModel::fit_sbm(&graph, &p).unwrap().parameter_count(), 7);
        assert_eq!(
            EdgeProbabilityModel::fit_dcsbm(&graph, &p, DcsbmMode::Exact).unwrap().parameter_count(),
            11
        );
        // 2N + K(K+1)/2 with N = 126, K = 3
        assert_eq!(2 * 126 + 3 * 4 / 2, 258);
        let sizes = [43usize, 123, 126, 201, 242, 1178];
        let mean = sizes.iter().sum::<usize>() as f64 / 6.0;
        assert!((mean - 318.8).abs() < 0.05 && libm::round(mean) == 319.0);
    }

    #[test]
    fn report_flags_capping() {
        let mut e: Vec<(usize, usize)> = (1..8).map(|j| (0, j)).collect();
        e.push((1, 2));
        let graph = g(8, &e);
        let p = Partition::trivial(&graph).unwrap();
        let r = EdgeProbabilityModel::fit_dcsbm(&graph, &p, DcsbmMode::Exact).unwrap().fit_report(&graph).unwrap();
        assert_eq!(r.parameter_count, 17);
        assert_eq!(r.estimator, "dcsbm/exact");
        assert!(r.log_likelihood_per_pair <= 0.0);
    }
}
