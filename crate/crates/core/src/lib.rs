//! Contact-network models for stochastic epidemic simulation.
//!
//! This crate is `no_std` (it needs `alloc`) and holds every algorithm of the
//! toolkit: graph construction and summary statistics, the four generative
//! edge-probability models (Erdős–Rényi, degree / Chung-Lu, SBM and DC-SBM),
//! regularized spectral clustering with eigengap model selection, a
//! discrete-time stochastic SIR engine with an exact enumeration oracle, and
//! the model-quality metrics (area between mean SIR curves, log-likelihood per
//! node pair, parameter counts).
//!
//! File formats, the experiment harness and the CLI live in the `contactnet`
//! crate.
//!
//! ```
//! use contactnet_core::graph::Graph;
//! use contactnet_core::models::EdgeProbabilityModel;
//!
//! let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
//! let er = EdgeProbabilityModel::fit_er(&g).unwrap();
//! assert_eq!(er.edge_probability(0, 3).unwrap(), 0.5);
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod community;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod metrics;
pub mod models;
pub mod numeric;
pub mod seed;
pub mod sir;

pub use error::{Error, Result};
