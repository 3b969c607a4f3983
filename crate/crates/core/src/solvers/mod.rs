//! Solvers for the triplet clustering problem.
//!
//! * [`local_search`] / [`run_variant`]: the practical greedy heuristic, with
//!   optional vertex-cover cleanup of the input.
//! * [`approximation_pipeline`]: cover removal followed by a pluggable
//!   correlation-clustering solver.
//! * [`exact`]: exhaustive oracles for tiny instances.

pub mod exact;
mod local_search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::consistency::{make_consistent, to_cc_instance};
use crate::error::{Error, Result};
use crate::model::{cc_cost, triplet_cost, CcInstance, Clustering, TripletSet};

pub use exact::{
    brute_force_cc, brute_force_min_vc, brute_force_min_vc_with_limit, brute_force_optimal,
    brute_force_optimal_with_limit,
};
use local_search::{sweep, CcObjective, TripletObjective};

pub const DEFAULT_MAX_PASSES: usize = 1000;

/// Starting clustering for the local search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Init {
    /// Every item in one cluster.
    AllEqual,
    /// Every item in its own cluster.
    AllDifferent,
}

impl Init {
    fn clustering(self, n: usize) -> Clustering {
        match self {
            Init::AllEqual => Clustering::all_equal(n),
            Init::AllDifferent => Clustering::all_different(n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub init: Init,
    /// Seed for shuffling the item order on every pass; `None` sweeps in
    /// ascending item order.
    pub sweep_seed: Option<u64>,
    /// Remove a vertex cover of the constraint graph before searching.
    pub vc_preprocess: bool,
    pub max_passes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            init: Init::AllDifferent,
            sweep_seed: None,
            vc_preprocess: false,
            max_passes: DEFAULT_MAX_PASSES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveResult {
    /// Labels are `1..=h`.
    pub clustering: Clustering,
    /// Unsatisfied triplets of the original input.
    pub cost: u64,
    /// Unsatisfied triplets of what the search actually saw (the cleaned set
    /// when vertex-cover preprocessing is on).
    pub cost_on_input: u64,
    pub passes: usize,
    pub removed_triplets: usize,
    /// False when the pass cap was hit before a fixed point.
    pub converged: bool,
}

/// Greedy single-item local search minimizing the number of unsatisfied
/// triplets.
pub fn local_search(triplets: &TripletSet, cfg: &SolverConfig) -> Result<SolveResult> {
    if cfg.max_passes == 0 {
        return Err(Error::InvalidConfig("max_passes must be at least 1".into()));
    }
    if triplets.n_items() == 0 {
        return Err(Error::InvalidConfig("empty item universe".into()));
    }
    let cleaned;
    let (input, removed) = if cfg.vc_preprocess {
        cleaned = make_consistent(triplets);
        (&cleaned.triplets, cleaned.removed.len())
    } else {
        (triplets, 0)
    };
    let out = sweep(
        &TripletObjective(input),
        cfg.init.clustering(triplets.n_items()),
        cfg.sweep_seed,
        cfg.max_passes,
        None,
    );
    Ok(SolveResult {
        cost: triplet_cost(triplets, &out.clustering)?,
        cost_on_input: triplet_cost(input, &out.clustering)?,
        clustering: out.clustering,
        passes: out.passes,
        removed_triplets: removed,
        converged: out.converged,
    })
}

/// The four named configurations of the local search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "ls-eq")]
    LsEq,
    #[serde(rename = "ls-ad")]
    LsAd,
    #[serde(rename = "ls-eq-vc")]
    LsEqVc,
    #[serde(rename = "ls-ad-vc")]
    LsAdVc,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::LsEq, Variant::LsAd, Variant::LsEqVc, Variant::LsAdVc];

    pub fn name(self) -> &'static str {
        match self {
            Variant::LsEq => "ls-eq",
            Variant::LsAd => "ls-ad",
            Variant::LsEqVc => "ls-eq-vc",
            Variant::LsAdVc => "ls-ad-vc",
        }
    }

    pub fn config(self, sweep_seed: Option<u64>) -> SolverConfig {
        let (init, vc_preprocess) = match self {
            Variant::LsEq => (Init::AllEqual, false),
            Variant::LsAd => (Init::AllDifferent, false),
            Variant::LsEqVc => (Init::AllEqual, true),
            Variant::LsAdVc => (Init::AllDifferent, true),
        };
        SolverConfig {
            init,
            sweep_seed,
            vc_preprocess,
            max_passes: DEFAULT_MAX_PASSES,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == lower)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown variant {s:?}")))
    }
}

pub fn run_variant(triplets: &TripletSet, variant: Variant, sweep_seed: Option<u64>) -> Result<SolveResult> {
    local_search(triplets, &variant.config(sweep_seed))
}

/// Local search for correlation clustering: all-different start, single
/// item moves on strict improvement, until a fixed point.
pub fn cc_local_search(graph: &CcInstance, sweep_seed: Option<u64>) -> Clustering {
    sweep(
        &CcObjective::new(graph),
        Clustering::all_different(graph.n_items()),
        sweep_seed,
        DEFAULT_MAX_PASSES,
        None,
    )
    .clustering
}

/// Anything that turns a correlation-clustering instance into a clustering.
pub trait CcSolver {
    fn solve(&self, graph: &CcInstance) -> Result<Clustering>;
}

impl<F> CcSolver for F
where
    F: Fn(&CcInstance) -> Result<Clustering>,
{
    fn solve(&self, graph: &CcInstance) -> Result<Clustering> {
        self(graph)
    }
}

/// [`cc_local_search`] as a [`CcSolver`].
#[derive(Clone, Copy, Debug, Default)]
pub struct LocalSearchCc {
    pub sweep_seed: Option<u64>,
}

impl CcSolver for LocalSearchCc {
    fn solve(&self, graph: &CcInstance) -> Result<Clustering> {
        Ok(cc_local_search(graph, self.sweep_seed))
    }
}

/// Exact solver by enumeration; tiny instances only.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactCc;

impl CcSolver for ExactCc {
    fn solve(&self, graph: &CcInstance) -> Result<Clustering> {
        brute_force_cc(graph).map(|(f, _)| f)
    }
}

/// Output of [`approximation_pipeline`].
#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub result: SolveResult,
    /// The instance built from the cleaned triplets.
    pub instance: CcInstance,
    /// Disagreements of the returned clustering on `instance`.
    pub cc_cost: u64,
}

/// Cover removal, mapping to correlation clustering, then `solver`.
pub fn approximation_pipeline<S: CcSolver + ?Sized>(
    triplets: &TripletSet,
    solver: &S,
) -> Result<PipelineOutcome> {
    let cleaned = make_consistent(triplets);
    let instance = to_cc_instance(&cleaned.triplets)?;
    let clustering = solver.solve(&instance)?.cleaned();
    let cc = cc_cost(&instance, &clustering)?;
    Ok(PipelineOutcome {
        result: SolveResult {
            cost: triplet_cost(triplets, &clustering)?,
            cost_on_input: triplet_cost(&cleaned.triplets, &clustering)?,
            clustering,
            passes: 0,
            removed_triplets: cleaned.removed.len(),
            converged: true,
        },
        instance,
        cc_cost: cc,
    })
}
