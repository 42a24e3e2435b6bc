//! Domain types: graphs, colored digraphs, step kernels and graphons,
//! measured partitions, and the conversions between them.
//!
//! All types are immutable after construction and safe to share across
//! threads.

pub mod colored;
pub mod digraph;
pub mod graph;
pub mod kernel;
pub mod partition;

pub use colored::{digraphon_of_colored, ColoredDigraphon};
pub use digraph::{
    is_visible_pair, shadow, ColoredDigraph, DPair, KMColoring, NodeKMColoring, NodePartition,
};
pub use graph::{blow_up, SimpleGraph};
pub use kernel::{graphon_of_graph, StepGraphon, StepKernel};
pub use partition::{
    common_refinement, normalize_labels, refine_labels, CommonRefinement, IntervalPartition,
    SplitPair,
};
