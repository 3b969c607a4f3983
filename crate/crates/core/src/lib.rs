//! Clustering from relative distance comparisons.
//!
//! The input is a multiset of triplets `(i, j, o)`, each stating that of the
//! three items `o` is the outlier. A clustering satisfies the triplet when `i`
//! and `j` share a cluster and `o` is elsewhere; the goal is a clustering
//! with as few unsatisfied triplets as possible. The number of clusters is
//! not an input.
//!
//! ```
//! use tricc::{run_variant, triplet_cost, TripletSet, Variant};
//!
//! let t = TripletSet::from_tuples(4, &[(0, 1, 2), (0, 1, 3), (2, 3, 0)]).unwrap();
//! let result = run_variant(&t, Variant::LsAdVc, None).unwrap();
//! assert_eq!(result.cost, 0);
//! assert_eq!(triplet_cost(&t, &result.clustering).unwrap(), 0);
//! ```

pub mod consistency;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod model;
pub mod partitions;
pub mod solvers;
pub mod synthgen;

pub use consistency::{
    approx_vertex_cover, build_constraint_graph, make_consistent, prune_redundant, to_cc_instance,
    ConstraintGraph, PairConflict, VertexCover,
};
pub use error::{Error, Result};
pub use evaluation::{adjusted_rand_index, run_experiment_grid, ExperimentRow, GridConfig};
pub use model::{
    cc_cost, cleanup_labels, is_satisfied, num_clusters, pair_implication, triplet_cost,
    CcInstance, Clustering, Implication, ItemUniverse, Sign, Triplet, TripletSet,
};
pub use solvers::{
    approximation_pipeline, brute_force_min_vc, brute_force_optimal, cc_local_search,
    local_search, run_variant, CcSolver, Init, SolveResult, SolverConfig, Variant,
};
pub use synthgen::{reduce_cc_to_triplets, GeneratorConfig};
