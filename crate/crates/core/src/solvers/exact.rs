//! Exhaustive oracles for tiny instances.

use crate::consistency::{ConstraintGraph, VertexCover};
use crate::error::{Error, Result};
use crate::model::{cc_cost, Clustering, TripletSet};
use crate::partitions::SetPartitions;

use super::SolveResult;

pub const OPTIMAL_ITEM_LIMIT: usize = 12;
pub const MIN_COVER_VERTEX_LIMIT: usize = 20;

/// Minimizes the triplet cost over every set partition of the universe.
/// Ties go to the first minimizer in restricted-growth-string order.
pub fn brute_force_optimal(triplets: &TripletSet) -> Result<SolveResult> {
    brute_force_optimal_with_limit(triplets, OPTIMAL_ITEM_LIMIT)
}

/// [`brute_force_optimal`] with a caller-chosen universe limit.
///
/// The search is a depth-first walk over restricted growth strings that
/// abandons a prefix once the triplets it already violates reach the best
/// complete cost, so it returns the same minimizer as plain enumeration.
pub fn brute_force_optimal_with_limit(triplets: &TripletSet, limit: usize) -> Result<SolveResult> {
    let n = triplets.n_items();
    if n > limit {
        return Err(Error::SizeLimit {
            what: "universe",
            size: n,
            limit,
        });
    }
    let mut search = PartitionSearch {
        triplets,
        labels: vec![usize::MAX; n],
        best: None,
        best_cost: triplets.len() as u64 + 1,
    };
    search.descend(0, 0, 0);
    let labels = search.best.expect("at least one partition exists");
    let clustering = Clustering::new(labels.iter().map(|l| l + 1).collect())?;
    Ok(SolveResult {
        cost: search.best_cost,
        cost_on_input: search.best_cost,
        clustering,
        passes: 0,
        removed_triplets: 0,
        converged: true,
    })
}

struct PartitionSearch<'a> {
    triplets: &'a TripletSet,
    /// 0-based labels; usize::MAX for items not yet assigned
    labels: Vec<usize>,
    best: Option<Vec<usize>>,
    best_cost: u64,
}

impl PartitionSearch<'_> {
    /// Violation as far as it is decided by the assigned items.
    fn violated(&self, idx: usize) -> bool {
        let t = &self.triplets.triplets()[idx];
        let (i, j) = t.close();
        let [li, lj, lo] = [i, j, t.outlier()].map(|x| self.labels[x]);
        let known = |l: usize| l != usize::MAX;
        (known(li) && known(lj) && li != lj)
            || (known(lo) && known(li) && lo == li)
            || (known(lo) && known(lj) && lo == lj)
    }

    fn descend(&mut self, item: usize, blocks: usize, violated: u64) {
        if violated >= self.best_cost {
            return;
        }
        if item == self.labels.len() {
            self.best_cost = violated;
            self.best = Some(self.labels.clone());
            return;
        }
        let incident = self.triplets.by_item(item);
        let before = incident.iter().filter(|&&idx| self.violated(idx)).count() as u64;
        let max_label = if item == 0 { 0 } else { blocks };
        for label in 0..=max_label {
            self.labels[item] = label;
            let after = incident.iter().filter(|&&idx| self.violated(idx)).count() as u64;
            let next_blocks = if label == blocks { blocks + 1 } else { blocks };
            self.descend(item + 1, next_blocks, violated + after - before);
            if self.best_cost == 0 {
                break;
            }
        }
        self.labels[item] = usize::MAX;
    }
}

/// Minimum-cost clustering of a correlation-clustering instance by plain
/// enumeration of all set partitions.
pub fn brute_force_cc(graph: &crate::model::CcInstance) -> Result<(Clustering, u64)> {
    let n = graph.n_items();
    if n > OPTIMAL_ITEM_LIMIT {
        return Err(Error::SizeLimit {
            what: "universe",
            size: n,
            limit: OPTIMAL_ITEM_LIMIT,
        });
    }
    let mut best: Option<(Clustering, u64)> = None;
    for rgs in SetPartitions::new(n) {
        let f = Clustering::new(rgs.into_iter().map(|l| l + 1).collect())?;
        let cost = cc_cost(graph, &f)?;
        if best.as_ref().is_none_or(|(_, c)| cost < *c) {
            best = Some((f, cost));
        }
    }
    Ok(best.expect("at least one partition exists"))
}

/// Minimum vertex cover by branch and bound.
pub fn brute_force_min_vc(graph: &ConstraintGraph) -> Result<VertexCover> {
    brute_force_min_vc_with_limit(graph, MIN_COVER_VERTEX_LIMIT)
}

/// [`brute_force_min_vc`] with a caller-chosen limit on the number of
/// triplets that take part in a conflict.
pub fn brute_force_min_vc_with_limit(graph: &ConstraintGraph, limit: usize) -> Result<VertexCover> {
    let vertices = graph.vertices();
    if vertices.len() > limit {
        return Err(Error::SizeLimit {
            what: "conflict vertex set",
            size: vertices.len(),
            limit,
        });
    }
    let local = |t: usize| vertices.binary_search(&t).expect("edge endpoint is a vertex");
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for (a, b) in graph.edges() {
        let (a, b) = (local(a), local(b));
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut search = CoverSearch {
        adjacency,
        removed: vec![false; vertices.len()],
        taken: Vec::new(),
        best: (0..vertices.len()).collect(),
    };
    search.descend();
    Ok(VertexCover::new(search.best.iter().map(|&v| vertices[v])))
}

struct CoverSearch {
    adjacency: Vec<Vec<usize>>,
    removed: Vec<bool>,
    taken: Vec<usize>,
    best: Vec<usize>,
}

impl CoverSearch {
    fn live_degree(&self, v: usize) -> usize {
        self.adjacency[v].iter().filter(|&&w| !self.removed[w]).count()
    }

    fn descend(&mut self) {
        let mut edges = 0;
        let mut pick: Option<(usize, usize)> = None;
        for v in 0..self.adjacency.len() {
            if self.removed[v] {
                continue;
            }
            let d = self.live_degree(v);
            edges += d;
            if d > 0 && pick.is_none_or(|(_, best)| d > best) {
                pick = Some((v, d));
            }
        }
        let Some((v, degree)) = pick else {
            if self.taken.len() < self.best.len() {
                self.best = self.taken.clone();
            }
            return;
        };
        // each remaining vertex covers at most `degree` of the live edges
        let edges = edges / 2;
        if self.taken.len() + edges.div_ceil(degree) >= self.best.len() {
            return;
        }

        // branch 1: v in the cover
        self.removed[v] = true;
        self.taken.push(v);
        self.descend();
        self.taken.pop();

        // branch 2: v stays out, so all its live neighbours go in
        let neighbours: Vec<usize> = self.adjacency[v]
            .iter()
            .copied()
            .filter(|&w| !self.removed[w])
            .collect();
        for &w in &neighbours {
            self.removed[w] = true;
            self.taken.push(w);
        }
        self.descend();
        for &w in &neighbours {
            self.removed[w] = false;
            self.taken.pop();
        }
        self.removed[v] = false;
    }
}
