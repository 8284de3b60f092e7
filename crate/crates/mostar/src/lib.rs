//! Exact Mostar index computation for bounded-degree graphs, the extremal
//! Δ-regular family that nearly attains the trivial ceiling, and certified
//! upper bounds from breadth-first search trees.
//!
//! The Mostar index of a graph sums, over all edges `uv`, the imbalance
//! `|n_uv - n_vu|` between the vertices strictly closer to `u` and those
//! strictly closer to `v`. The crate provides:
//!
//! - [`graph`]: compressed sparse row graphs, the edge-list text format,
//!   BFS distances, and component analysis;
//! - [`mostar`]: the streaming `O(n·m)` index engine, per-edge comparison
//!   tables, and orientation-based lower bounds;
//! - [`extremal`]: the Δ-regular construction whose index reaches
//!   `(Δ/2)n² - O(n log n)`, with structural verification;
//! - [`bfs_tree`]: BFS trees, subtree statistics, and the certificate
//!   `m·n - 2·Σ min(depth, subtree)` that dominates the index;
//! - [`oracle`]: an independent naive reference and exhaustive search over
//!   all small bounded-degree graphs.

pub mod bfs_tree;
pub mod extremal;
pub mod graph;
pub mod mostar;
pub mod oracle;

pub use bfs_tree::{bfs_tree, mostar_upper_certificate, BfsTree, CertificateReport};
pub use extremal::{build_extremal_graph, build_extremal_tree, LabeledExtremalGraph};
pub use graph::{DistanceRow, Graph};
pub use mostar::{mostar_index, EdgeComparison, MostarResult, Orientation};
pub use oracle::{enumerate_graphs, max_mostar, mostar_reference, SearchResult};
