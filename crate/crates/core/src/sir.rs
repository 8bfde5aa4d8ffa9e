//! Discrete-time stochastic SIR epidemics on a fixed contact graph.
//!
//! Each transition is computed synchronously from the state at time `t`:
//!
//! * a susceptible node with `k` infectious neighbours becomes infectious with
//!   probability `1 − (1 − β)^k` (one Bernoulli(β) trial per infectious
//!   contact);
//! * an infectious node recovers with probability `γ`, independently of
//!   whether it also transmitted during the same transition.
//!
//! Nodes infected in a transition neither transmit nor recover until the
//! next one. Draws are consumed in node-index order, so a trajectory is a pure
//! function of `(graph, params, rng state)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::metrics::MeanCurves;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SirParams {
    pub infection_probability: f64,
    pub recovery_probability: f64,
    /// Number of transitions; trajectories hold `steps + 1` points.
    pub steps: usize,
    pub initial_infectious: usize,
}

impl Default for SirParams {
    fn default() -> Self {
        SirParams {
            infection_probability: 0.025,
            recovery_probability: 0.025,
            steps: 30,
            initial_infectious: 1,
        }
    }
}

impl SirParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.infection_probability) || !unit(self.recovery_probability) {
            return Err(Error::domain("SIR probabilities must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Compartment {
    Susceptible,
    Infectious,
    Recovered,
}

/// Compartment counts after each transition; index 0 is the initial state.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trajectory {
    pub s_counts: Vec<u32>,
    pub i_counts: Vec<u32>,
    pub r_counts: Vec<u32>,
}

impl Trajectory {
    fn with_capacity(points: usize) -> Self {
        Trajectory {
            s_counts: Vec::with_capacity(points),
            i_counts: Vec::with_capacity(points),
            r_counts: Vec::with_capacity(points),
        }
    }

    /// Number of sampled points (`steps + 1`).
    pub fn len(&self) -> usize {
        self.s_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_counts.is_empty()
    }

    fn push(&mut self, s: u32, i: u32, r: u32) {
        self.s_counts.push(s);
        self.i_counts.push(i);
        self.r_counts.push(r);
    }
}

/// `1 − (1 − β)^k` for every possible infectious-neighbour count.
fn infection_table(beta: f64, max_degree: usize) -> Vec<f64> {
    (0..=max_degree).map(|k| 1.0 - libm::pow(1.0 - beta, k as f64)).collect()
}

fn check(g: &Graph, params: &SirParams) -> Result<()> {
    params.validate()?;
    if g.n_nodes() == 0 {
        return Err(Error::domain("cannot simulate an epidemic on an empty node set"));
    }
    if params.initial_infectious > g.n_nodes() {
        return Err(Error::domain(format!(
            "{} initial infectious nodes requested in a population of {}",
            params.initial_infectious,
            g.n_nodes()
        )));
    }
    Ok(())
}

/// One epidemic, with the initial infectious set drawn uniformly without
/// replacement from `rng`.
pub fn simulate_sir<R: Rng + ?Sized>(g: &Graph, params: &SirParams, rng: &mut R) -> Result<Trajectory> {
    check(g, params)?;
    let initial = rand::seq::index::sample(rng, g.n_nodes(), params.initial_infectious).into_vec();
    run(g, params, &initial, rng)
}

/// One epidemic from a fixed initial infectious set.
pub fn simulate_sir_from<R: Rng + ?Sized>(
    g: &Graph,
    params: &SirParams,
    initial: &[usize],
    rng: &mut R,
) -> Result<Trajectory> {
    params.validate()?;
    validate_initial(g, initial)?;
    run(g, params, initial, rng)
}

fn validate_initial(g: &Graph, initial: &[usize]) -> Result<()> {
    let mut seen = vec![false; g.n_nodes()];
    for &v in initial {
        if v >= g.n_nodes() || core::mem::replace(&mut seen[v], true) {
            return Err(Error::domain(format!("invalid or repeated initial node {v}")));
        }
    }
    Ok(())
}

fn run<R: Rng + ?Sized>(g: &Graph, params: &SirParams, initial: &[usize], rng: &mut R) -> Result<Trajectory> {
    let n = g.n_nodes();
    let max_degree = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    let infect = infection_table(params.infection_probability, max_degree);
    let gamma = params.recovery_probability;

    let mut state = vec![Compartment::Susceptible; n];
    for &v in initial {
        state[v] = Compartment::Infectious;
    }
    let mut next = state.clone();
    let (mut s, mut i, mut r) = ((n - initial.len()) as u32, initial.len() as u32, 0u32);
    let mut traj = Trajectory::with_capacity(params.steps + 1);
    traj.push(s, i, r);

    for _ in 0..params.steps {
        if i == 0 {
            // absorbed
            traj.push(s, i, r);
            continue;
        }
        for v in 0..n {
            match state[v] {
                Compartment::Susceptible => {
                    let k = g
                        .neighbors(v)
                        .iter()
                        .filter(|&&u| state[u] == Compartment::Infectious)
                        .count();
                    if k > 0 && rng.random::<f64>() < infect[k] {
                        next[v] = Compartment::Infectious;
                        s -= 1;
                        i += 1;
                    }
                }
                Compartment::Infectious => {
                    if rng.random::<f64>() < gamma {
                        next[v] = Compartment::Recovered;
                        i -= 1;
                        r += 1;
                    }
                }
                Compartment::Recovered => {}
            }
        }
        state.copy_from_slice(&next);
        traj.push(s, i, r);
    }
    Ok(traj)
}

/// Stream for run `run` of an ensemble seeded with `master_seed`.
pub fn run_stream(master_seed: u64, run: usize) -> seed::SimRng {
    seed::stream(master_seed, &[run as u64])
}

/// `runs` independent epidemics; run `r` uses [`run_stream`]`(master_seed, r)`
/// and draws its own initial infectious set.
pub fn simulate_ensemble(g: &Graph, params: &SirParams, runs: usize, master_seed: u64) -> Result<Vec<Trajectory>> {
    if runs == 0 {
        return Err(Error::domain("an ensemble needs at least one run"));
    }
    (0..runs)
        .map(|r| simulate_sir(g, params, &mut run_stream(master_seed, r)))
        .collect()
}

pub const EXACT_MAX_NODES: usize = 8;
pub const EXACT_MAX_STEPS: usize = 6;

/// Exact expected compartment fractions by propagating the full joint
/// distribution over `{S, I, R}^N`. Only for tiny instances
/// (`N ≤ 8`, `steps ≤ 6`).
pub fn exact_sir_expected_curves(g: &Graph, params: &SirParams, initial: &[usize]) -> Result<MeanCurves> {
    let n = g.n_nodes();
    if n > EXACT_MAX_NODES || params.steps > EXACT_MAX_STEPS {
        return Err(Error::Refused(format!(
            "exact enumeration limited to N <= {EXACT_MAX_NODES} and steps <= {EXACT_MAX_STEPS} (got N = {n}, steps = {})",
            params.steps
        )));
    }
    params.validate()?;
    if n == 0 {
        return Err(Error::domain("cannot enumerate an empty node set"));
    }
    validate_initial(g, initial)?;
    let (beta, gamma) = (params.infection_probability, params.recovery_probability);

    // state code: node v contributes digit state_v · 3^v (0 = S, 1 = I, 2 = R)
    let n_states = 3usize.pow(n as u32);
    let pow3: Vec<usize> = (0..n).map(|v| 3usize.pow(v as u32)).collect();
    let digit = |code: usize, v: usize| (code / pow3[v]) % 3;

    let mut dist = vec![0.0; n_states];
    dist[initial.iter().map(|&v| pow3[v]).sum::<usize>()] = 1.0;

    let mut s_frac = Vec::with_capacity(params.steps + 1);
    let mut i_frac = Vec::with_capacity(params.steps + 1);
    let mut r_frac = Vec::with_capacity(params.steps + 1);
    let record = |dist: &[f64], s: &mut Vec<f64>, i: &mut Vec<f64>, r: &mut Vec<f64>| {
        let mut acc = [0.0; 3];
        for (code, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for v in 0..n {
                acc[digit(code, v)] += p;
            }
        }
        s.push(acc[0] / n as f64);
        i.push(acc[1] / n as f64);
        r.push(acc[2] / n as f64);
    };
    record(&dist, &mut s_frac, &mut i_frac, &mut r_frac);

    for _ in 0..params.steps {
        let mut out = vec![0.0; n_states];
        for (code, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            // successor distribution is a product over nodes; expand it node by node
            let mut partial: Vec<(usize, f64)> = vec![(0, p)];
            for v in 0..n {
                let options: [(usize, f64); 2] = match digit(code, v) {
                    0 => {
                        let mut escape = 1.0;
                        for &u in g.neighbors(v) {
                            if digit(code, u) == 1 {
                                escape *= 1.0 - beta;
                            }
                        }
                        [(0, escape), (1, 1.0 - escape)]
                    }
                    1 => [(1, 1.0 - gamma), (2, gamma)],
                    _ => [(2, 1.0), (2, 0.0)],
                };
                let mut grown = Vec::with_capacity(partial.len() * 2);
                for &(c, q) in &partial {
                    for &(state, w) in &options {
                        if w > 0.0 {
                            grown.push((c + state * pow3[v], q * w));
                        }
                    }
                }
                partial = grown;
            }
            for (c, q) in partial {
                out[c] += q;
            }
        }
        dist = out;
        record(&dist, &mut s_frac, &mut i_frac, &mut r_frac);
    }
    Ok(MeanCurves { s_frac, i_frac, r_frac, n_runs: 0, population: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn params(beta: f64, gamma: f64, steps: usize) -> SirParams {
        SirParams { infection_probability: beta, recovery_probability: gamma, steps, initial_infectious: 1 }
    }

    #[test]
    fn protocol_defaults() {
        let p = SirParams::default();
        assert_eq!((p.infection_probability, p.recovery_probability, p.steps, p.initial_infectious), (0.025, 0.025, 30, 1));
    }

    #[test]
    fn deterministic_wavefront() {
        let t = simulate_sir_from(&path(4), &params(1.0, 0.0, 3), &[0], &mut stream(1, &[])).unwrap();
        assert_eq!(t.i_counts, vec![1, 2, 3, 4]);
        assert_eq!(t.s_counts, vec![3, 2, 1, 0]);
    }

    #[test]
    fn no_transmission() {
        let g = path(5);
        let t = simulate_sir(&g, &params(0.0, 0.3, 30), &mut stream(4, &[])).unwrap();
        assert!(t.s_counts.iter().all(|&s| s == 4));
        assert_eq!(t.len(), 31);
    }

    #[test]
    fn forced_recovery() {
        let g = path(5);
        let ens = simulate_ensemble(&g, &params(0.0, 1.0, 3), 200, 8).unwrap();
        assert!(ens.iter().all(|t| t.r_counts[1] == 1 && t.i_counts[1] == 0));
    }

    #[test]
    fn ensemble_is_reproducible() {
        let g = path(6);
        let p = params(0.4, 0.2, 10);
        let a = simulate_ensemble(&g, &p, 20, 3).unwrap();
        assert_eq!(a, simulate_ensemble(&g, &p, 20, 3).unwrap());
        let single = simulate_ensemble(&g, &p, 1, 3).unwrap();
        assert_eq!(single[0], simulate_sir(&g, &p, &mut run_stream(3, 0)).unwrap());
        assert!(simulate_ensemble(&g, &p, 0, 3).is_err());
    }

    #[test]
    fn domain_errors() {
        let g = path(3);
        let mut p = params(0.1, 0.1, 3);
        p.initial_infectious = 4;
        assert!(simulate_sir(&g, &p, &mut stream(0, &[])).is_err());
        assert!(simulate_sir_from(&g, &params(0.1, 0.1, 3), &[1, 1], &mut stream(0, &[])).is_err());
        assert!(simulate_sir(&g, &params(1.5, 0.1, 3), &mut stream(0, &[])).is_err());
    }

    #[test]
    fn exact_static_without_dynamics() {
        let c = exact_sir_expected_curves(&path(3), &params(0.0, 0.0, 3), &[1]).unwrap();
        for t in 0..4 {
            assert_eq!((c.s_frac[t], c.i_frac[t], c.r_frac[t]), (2.0 / 3.0, 1.0 / 3.0, 0.0));
        }
    }

    #[test]
    fn exact_single_node_geometric_decay() {
        let c = exact_sir_expected_curves(&Graph::empty(1), &params(0.3, 0.5, 2), &[0]).unwrap();
        assert_eq!(c.i_frac, vec![1.0, 0.5, 0.25]);
    }

    #[test]
    fn exact_triangle_first_step() {
        // t = 1 from I = {0} on K3: each of 1, 2 infected w.p. β; node 0 stays I w.p. 1 − γ
        let k3 = Graph::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        let c = exact_sir_expected_curves(&k3, &params(0.5, 0.5, 2), &[0]).unwrap();
        assert!((c.i_frac[1] - (0.5 + 0.5 + 0.5) / 3.0).abs() < 1e-15);
        for t in 0..3 {
            assert!((c.s_frac[t] + c.i_frac[t] + c.r_frac[t] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_refuses_large() {
        assert!(matches!(
            exact_sir_expected_curves(&path(9), &params(0.1, 0.1, 2), &[0]),
            Err(Error::Refused(_))
        ));
        assert!(matches!(
            exact_sir_expected_curves(&path(3), &params(0.1, 0.1, 7), &[0]),
            Err(Error::Refused(_))
        ));
    }
}
