//! Greedy single-item local search.
//!
//! Passes over the items; each item moves to whichever existing label (or one
//! fresh label) gives the lowest cost over the terms that mention it. A move
//! is taken only on strict improvement, so the objective decreases with every
//! move and the search stops at a fixed point of single-item moves.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{CcInstance, Clustering, Sign, TripletSet};

/// A cost that decomposes into terms, each touching a few items.
pub(crate) trait MoveObjective {
    fn n_items(&self) -> usize;

    /// Writes into `costs[l]`, for every `l` in `1..costs.len()`, the summed
    /// cost of the terms touching `u` if `u` had label `l` and every other
    /// item kept its label. Other items' labels are below `costs.len()`.
    fn incident_costs(&self, u: usize, labels: &[usize], costs: &mut [i64]);
}

pub(crate) struct TripletObjective<'a>(pub &'a TripletSet);

impl MoveObjective for TripletObjective<'_> {
    fn n_items(&self) -> usize {
        self.0.n_items()
    }

    fn incident_costs(&self, u: usize, labels: &[usize], costs: &mut [i64]) {
        let incident = self.0.by_item(u);
        // satisfied[l] accumulates in `costs`, negated at the end
        costs.fill(0);
        let mut satisfied_everywhere = 0i64;
        for &idx in incident {
            let t = &self.0.triplets()[idx];
            let (i, j) = t.close();
            let o = t.outlier();
            if u == o {
                // satisfied for any label of u except the shared label of i and j
                if labels[i] == labels[j] {
                    satisfied_everywhere += 1;
                    costs[labels[i]] -= 1;
                }
            } else {
                // satisfied only by joining the partner, and only if the outlier is elsewhere
                let partner = if u == i { j } else { i };
                if labels[partner] != labels[o] {
                    costs[labels[partner]] += 1;
                }
            }
        }
        let base = incident.len() as i64 - satisfied_everywhere;
        for c in costs.iter_mut() {
            *c = base - *c;
        }
    }
}

pub(crate) struct CcObjective {
    adjacency: Vec<Vec<(usize, Sign, u64)>>,
}

impl CcObjective {
    pub(crate) fn new(graph: &CcInstance) -> Self {
        let mut adjacency = vec![Vec::new(); graph.n_items()];
        for ((u, v), sign, w) in graph.edges() {
            adjacency[u].push((v, sign, w));
            adjacency[v].push((u, sign, w));
        }
        Self { adjacency }
    }
}

impl MoveObjective for CcObjective {
    fn n_items(&self) -> usize {
        self.adjacency.len()
    }

    fn incident_costs(&self, u: usize, labels: &[usize], costs: &mut [i64]) {
        costs.fill(0);
        let mut plus_total = 0i64;
        for &(v, sign, w) in &self.adjacency[u] {
            let w = w as i64;
            match sign {
                Sign::Plus => {
                    plus_total += w;
                    costs[labels[v]] -= w;
                }
                Sign::Minus => costs[labels[v]] += w,
            }
        }
        for c in costs.iter_mut() {
            *c += plus_total;
        }
    }
}

/// Outcome of [`sweep`].
pub(crate) struct Sweep {
    pub clustering: Clustering,
    pub passes: usize,
    pub converged: bool,
}

/// Called after each accepted move with the item, the labels after the move,
/// and the (negative) change in objective.
pub(crate) type MoveHook<'a> = &'a mut dyn FnMut(usize, &[usize], i64);

pub(crate) fn sweep<O: MoveObjective>(
    objective: &O,
    init: Clustering,
    order_seed: Option<u64>,
    max_passes: usize,
    mut on_move: Option<MoveHook<'_>>,
) -> Sweep {
    let n = objective.n_items();
    debug_assert_eq!(init.len(), n);
    let mut f = init.cleaned();
    let mut fresh = f.max_label() + 1;
    // at most n fresh labels open per pass on top of max + 1
    let mut costs = vec![0i64; 2 * n + 2];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = order_seed.map(ChaCha8Rng::seed_from_u64);

    let mut passes = 0;
    let mut converged = false;
    while passes < max_passes {
        passes += 1;
        if let Some(rng) = rng.as_mut() {
            order.shuffle(rng);
        }
        let mut changed = false;
        for &u in &order {
            let scratch = &mut costs[..=fresh];
            objective.incident_costs(u, f.labels(), scratch);
            let current = f.labels()[u];
            let mut best = current;
            for label in 1..=fresh {
                if scratch[label] < scratch[best] {
                    best = label;
                }
            }
            if best != current {
                let delta = scratch[best] - scratch[current];
                f.labels_mut()[u] = best;
                changed = true;
                if best == fresh {
                    fresh += 1;
                }
                if let Some(hook) = on_move.as_deref_mut() {
                    hook(u, f.labels(), delta);
                }
            }
        }
        f = f.cleaned();
        fresh = f.max_label() + 1;
        if !changed {
            converged = true;
            break;
        }
    }
    Sweep {
        clustering: f,
        passes,
        converged,
    }
}
