//! Diversity curves for graphs.
//!
//! The spread of a finite metric space, `Σ_x 1 / Σ_y exp(-d(x, y))`, is an
//! effective count of distinct points. A diversity curve records the spread
//! of a graph as it is coarsened by edge contraction (and upsampled by node
//! duplication) to a range of cardinalities.
//!
//! Modules:
//! - [`graph`], [`io`]: graphs, datasets and file formats
//! - [`metrics`]: node distance tables
//! - [`simplicial`]: triangulations, boundary matrices, Hodge Laplacians
//! - [`coarsen`]: edge scoring, contraction and upsampling
//! - [`diversity`]: spread and curve assembly
//! - [`analysis`]: curve distances, permutation tests, kNN and silhouette
//! - [`genperturb`]: random graph models and edge perturbations
//!
//! ```
//! use divcurve::{diversity_curve, named, CoarseningConfig};
//!
//! let curve = diversity_curve(&named::house(), &[1, 2, 3, 4, 5], &CoarseningConfig::default(), 0).unwrap();
//! assert_eq!(curve.values[0], 1.0);
//! assert!((curve.values[4] - 2.38846).abs() < 1e-5);
//! ```

pub mod analysis;
pub mod coarsen;
pub mod diversity;
pub mod error;
pub mod genperturb;
pub mod graph;
pub mod io;
pub mod metrics;
pub mod simplicial;

pub use analysis::{
    curve_distance, curve_distance_matrix, distinguish_pair, knn_cv_accuracy, permutation_test, silhouette_score,
    spearman, DistinguishMode, TestResult,
};
pub use coarsen::{contract_edge, EdgeScorer, ScorerKind};
pub use diversity::{
    average_curves, diversity_curve, graph_spread, spread, spread_function, triangulation_curve, CoarseningConfig,
    CurveSet, DiversityCurve, HodgeParams,
};
pub use error::{Error, ErrorClass, Result};
pub use genperturb::{
    generate_graph, perturb, perturbation_sweep, GraphModel, Manifest, PerturbationKind, PerturbationScenario,
};
pub use graph::{named, Dataset, Graph};
pub use metrics::{DistanceMatrix, Metric, PairTable};
pub use simplicial::Triangulation;
