//! Distributed-style label-propagation graph partitioning.
//!
//! The crate partitions undirected graphs into `p` parts under vertex and
//! edge balance constraints while minimizing the edge cut and the largest
//! per-part cut. The partitioner runs on a simulated bulk-synchronous
//! runtime in which `T` logical tasks each own a slice of the vertices,
//! keep ghost copies of remote neighbors, and communicate label changes
//! through an explicit all-to-all exchange.
//!
//! ```
//! use xtrapulp::{gen, graph, metrics, partition::{partition_graph, Config}};
//!
//! let edges = gen::gen_er(1 << 10, 8, 7).unwrap();
//! let g = graph::build_csr(&edges, 1 << 10).unwrap();
//! let config = Config::new(4, 2).with_seed(1);
//! let parts = partition_graph(&g, &config).unwrap();
//! let report = metrics::QualityReport::compute(&g, &parts, 4).unwrap();
//! assert!(report.cut_ratio < 0.75);
//! ```

pub mod baselines;
pub mod bsp;
pub mod cli;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod partition;
pub mod seed;

pub use error::{Error, Result};

/// Part label.
pub type Part = u32;

/// Label of a vertex that has not been assigned yet.
pub const UNASSIGNED: Part = Part::MAX;
