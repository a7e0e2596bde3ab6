//! Exact counting of connected induced subgraphs (motifs) of size 3 to 6 in
//! directed graphs.
//!
//! Counting works from the connected subgraphs of size `k - 2`: the
//! neighborhood of each base is partitioned by neighbor class, pairs of cells
//! are counted in closed form and only adjacent neighbor pairs are visited
//! one by one. See [`engine`] for the details.

pub mod engine;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod induce;
pub mod iso;
pub mod nullmodel;
pub mod oracle;

pub use engine::{count_motifs, count_motifs_with, CountReport, EngineConfig, Histogram};
pub use error::{MotifError, Result};
pub use graph::{
    parse_edge_list, parse_edge_list_str, Class, DirectedGraph, LoadedGraph, VertexSet,
};
pub use induce::Strategy;
pub use iso::{AdjacencyCode, IsoCache, MotifId};
