//! Controllability of uniform and non-uniform hypergraphs through their
//! adjacency tensors, and minimum control node selection.
//!
//! Node indices are 0-based throughout the library.

pub mod controllability;
pub mod exec;
pub mod hypergraph;
pub mod ingest;
pub mod linalg;
pub mod mcn;
pub mod oracle;
pub mod simulate;
pub mod tensor;

pub use controllability::{
    extend_controllability, lemma1_check, reduced_controllability,
    reduced_controllability_from_matrix, verdict, ControllabilityError, ControllabilityVerdict,
    RankOptions, ReducedControllabilityMatrix, VerdictKind,
};
pub use exec::Parallelism;
pub use hypergraph::{
    adjacency_general, adjacency_general_with_order, adjacency_uniform, degrees, DegreeProfile,
    Hypergraph, HypergraphError,
};
pub use ingest::{build_hypergraph, multi_correlation, read_csv, TimeSeriesMatrix};
pub use mcn::{
    connected_components, mcn_by_components, mcn_exact, mcn_greedy, mcn_predicted, ExactOptions,
    Family, GreedyOptions, McnError, McnMethod, McnResult, Method, TieBreak,
};
pub use simulate::{simulate, InputSchedule, Trajectory};
pub use tensor::{AdjacencyTensor, ControlMatrix, TensorError};
