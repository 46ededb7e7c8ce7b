//! Random graph models, network statistics, and the graph matching problem
//! on correlated Bernoulli graphs, with seeded experiments.
//!
//! - [`graph`]: simple undirected graphs, matrix views, edge-list files.
//! - [`generators`]: G(n, M), G(n, p), Watts-Strogatz, Barabási-Albert and
//!   correlated pair samplers.
//! - [`statistics`]: clustering, path length, degree distributions.
//! - [`matching`]: edge disagreements, exact and local-search matching,
//!   alignment strength and total correlation.
//! - [`ensemble`]: reference ensembles and empirical p-values.
//! - [`cli`]: the `graphlab` command line.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod generators;
pub mod graph;
pub mod matching;
pub mod seed;
pub mod statistics;

pub use error::{GraphError, Result};
pub use graph::{Graph, ParseMode};
pub use seed::Seed;
