//! Thread-pool fan-out whose results never depend on the worker count.
//!
//! Every work unit draws from a stream addressed by its indices (see
//! `contactnet_core::seed`), and results are collected into index order before
//! any reduction, so 1 worker and 64 workers produce identical output.

use contactnet_core::graph::Graph;
use contactnet_core::sir::{run_stream, simulate_sir, SirParams, Trajectory};
use rayon::prelude::*;

use crate::error::{CliError, Context, Result};

pub const THREADS_ENV: &str = "CONTACTNET_THREADS";

pub struct Workers {
    pool: rayon::ThreadPool,
}

impl Workers {
    /// `None` lets rayon pick (one worker per core).
    pub fn new(threads: Option<usize>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            if t == 0 {
                return Err(CliError::Config("worker count must be at least 1".into()));
            }
            builder = builder.num_threads(t);
        }
        let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        Ok(Workers { pool })
    }

    /// Worker cap from `CONTACTNET_THREADS`, if set.
    pub fn from_env() -> Result<Self> {
        let threads = match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?,
            ),
            Err(_) => None,
        };
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Map `f` over `0..n` in parallel, results in index order.
    pub fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }

    /// Parallel equivalent of `contactnet_core::sir::simulate_ensemble`.
    pub fn simulate_ensemble(
        &self,
        g: &Graph,
        params: &SirParams,
        runs: usize,
        master_seed: u64,
    ) -> Result<Vec<Trajectory>> {
        if runs == 0 {
            return Err(CliError::Config("an ensemble needs at least one run".into()));
        }
        self.map_indexed(runs, |r| simulate_sir(g, params, &mut run_stream(master_seed, r)))
            .into_iter()
            .collect::<contactnet_core::Result<Vec<_>>>()
            .context(|| "epidemic ensemble".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use contactnet_core::sir::simulate_ensemble;

    #[test]
    fn matches_sequential_ensemble() {
        let g = Graph::from_edges(8, (1..8).map(|i| (i - 1, i)).chain([(0, 7), (2, 5)])).unwrap();
        let p = SirParams { infection_probability: 0.4, recovery_probability: 0.1, steps: 12, initial_infectious: 1 };
        let seq = simulate_ensemble(&g, &p, 64, 99).unwrap();
        for t in [1, 3, 8] {
            assert_eq!(Workers::new(Some(t)).unwrap().simulate_ensemble(&g, &p, 64, 99).unwrap(), seq);
        }
    }

    #[test]
    fn zero_workers_rejected() {
        assert!(Workers::new(Some(0)).is_err());
    }
}
