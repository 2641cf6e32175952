//! Exact recovery of two planted communities in signed graphs.
//!
//! The pipeline is: sample or load a [`SignedGraph`], estimate the model
//! rates and the negative-edge weight `xi` from edge and triangle counts,
//! then run power iterations followed by sign-projected power iterations on
//! the implicit matrix `W = A+ - xi A- - rho E`.
//!
//! ```
//! use ssbm_core::{sample, estimate_graph, solve, compare, SsbmParams, SolverConfig};
//!
//! let params = SsbmParams::new(300, 16.0, 9.0, 1.0, 9.0).unwrap();
//! let (graph, truth) = sample(&params, 1).unwrap();
//! let xi = estimate_graph(&graph).xi_or(1.0);
//! let result = solve(&graph, &SolverConfig::new(xi, graph.n(), 2)).unwrap();
//! let metrics = compare(&result.labels, &truth).unwrap();
//! assert!(metrics.error_rate < 0.1);
//! ```

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod estimate;
pub mod eval;
pub mod experiments;
pub mod graph;
pub mod solver;
pub mod ssbm;

pub use estimate::{
    estimate_graph, estimate_params, mle_weights, solve_cubic_system, xi_exact, EstimatedParams,
    MleWeights,
};
pub use eval::{brute_force_mle, compare, objective, RecoveryMetrics};
pub use graph::{count_moments, parse_edge_list, GraphMoments, Sign, SignedGraph};
pub use solver::{
    build_w, gpi_stage, power_stage, sign_project, solve, RecoveryResult, SolverConfig, WOperator,
};
pub use ssbm::{it_gap, sample, sample_raw, GroundTruth, SsbmParams};
