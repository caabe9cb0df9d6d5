//! Interchange, exclusion, random-walk and α-shuffle generators on small
//! weighted graphs, their spectral gaps, one-vertex network reduction and the
//! octopus form.

mod enumerate;
mod generator;
mod graph;
mod io;
pub mod perm;
mod reduce;
mod report;
mod spectral;

use thiserror::Error;

pub use enumerate::{connected_graphs, random_connected_graph, random_hyperweights};
pub use generator::{
    alpha_shuffle_generator, alpha_single_particle_rates, exclusion_generator, interchange_generator, rw_generator,
    subsets, GeneratorOperator, SparseSymmetric, StateSpace, MAX_DENSE_DIM, MAX_DIM, MAX_PERMUTATION_VERTICES,
};
pub use graph::{HyperWeights, WeightedGraph};
pub use io::{format_graph, parse_graph_file, parse_graph_str, GraphFile};
pub use reduce::{octopus_form, octopus_min_eigenvalue, reduce_vertex, reduced_dirichlet_average, reduced_weights_in_place};
pub use report::{gap_report, relative_gap, GapOptions, GapReport, ShuffleComparison};
pub use spectral::{
    dirichlet_form, eigenvalues, gap_eigenvector, gap_from_spectrum, gap_with_zero_count, min_eigenvalue,
    spectral_gap, variance, GapValue, SpectralOptions,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GapError {
    #[error("{n} vertices is outside the supported range 2..={max}")]
    Capacity { n: usize, max: usize },
    #[error("{dim} states exceeds the dense limit {max}; enable the iterative solver")]
    DenseLimit { dim: usize, max: usize },
    #[error("chain is reducible: {zero_eig_count} zero eigenvalues")]
    Reducible { zero_eig_count: usize },
    #[error("generator is identically zero; no spectral gap")]
    Degenerate,
    #[error("vertex {0} has no incident weight")]
    IsolatedVertex(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    Argument(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Io(String),
}
