//! Constraint graph over triplets and vertex-cover based cleanup.
//!
//! Two triplets are inconsistent when, for some pair of items, one of them is
//! satisfied only if the pair shares a cluster and the other only if it does
//! not. For a fixed pair `{u, v}`, the triplets containing both items split into
//! a "same" side and a "different" side, and every same/different combination
//! is an edge. The graph is stored per pair as that bipartite clique; the
//! explicit edge list, which is quadratic in the side sizes, is never built
//! on the hot paths.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CcInstance, Sign, TripletSet};

/// Which side of a pair's bipartite clique a triplet sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Same,
    Different,
}

impl Side {
    fn index(self) -> usize {
        match self {
            Side::Same => 0,
            Side::Different => 1,
        }
    }

    fn other(self) -> Side {
        match self {
            Side::Same => Side::Different,
            Side::Different => Side::Same,
        }
    }
}

/// A pair of items with conflicting evidence. Both sides are non-empty and
/// sorted by triplet index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairConflict {
    pub pair: (usize, usize),
    pub same: Vec<usize>,
    pub diff: Vec<usize>,
}

impl PairConflict {
    fn side(&self, side: Side) -> &[usize] {
        match side {
            Side::Same => &self.same,
            Side::Different => &self.diff,
        }
    }

    pub fn n_edges(&self) -> u64 {
        self.same.len() as u64 * self.diff.len() as u64
    }
}

/// Inconsistency graph whose vertices are triplet indices.
#[derive(Clone, Debug)]
pub struct ConstraintGraph {
    n_triplets: usize,
    conflicts: Vec<PairConflict>,
    /// For every triplet, the conflicts it takes part in and on which side.
    incidence: Vec<Vec<(usize, Side)>>,
}

impl ConstraintGraph {
    /// Assembles a graph from explicit conflicts. Conflicts with an empty
    /// side are dropped; the rest are sorted by pair.
    pub fn from_conflicts(n_triplets: usize, mut conflicts: Vec<PairConflict>) -> Result<Self> {
        conflicts.retain(|c| !c.same.is_empty() && !c.diff.is_empty());
        conflicts.sort_by_key(|c| c.pair);
        let mut incidence = vec![Vec::new(); n_triplets];
        for (ci, c) in conflicts.iter_mut().enumerate() {
            c.same.sort_unstable();
            c.diff.sort_unstable();
            for (side, members) in [(Side::Same, &c.same), (Side::Different, &c.diff)] {
                for &t in members.iter() {
                    if t >= n_triplets {
                        return Err(Error::UniverseMismatch {
                            item: t,
                            n: n_triplets,
                        });
                    }
                    incidence[t].push((ci, side));
                }
            }
        }
        Ok(Self {
            n_triplets,
            conflicts,
            incidence,
        })
    }

    pub fn n_triplets(&self) -> usize {
        self.n_triplets
    }

    /// Conflicting pairs, sorted by pair.
    pub fn conflicts(&self) -> &[PairConflict] {
        &self.conflicts
    }

    pub fn is_edgeless(&self) -> bool {
        self.conflicts.is_empty()
    }

    /// Number of implicit edges counted per pair. Two triplets that clash on
    /// more than one pair are counted once per pair.
    pub fn n_edges(&self) -> u64 {
        self.conflicts.iter().map(PairConflict::n_edges).sum()
    }

    /// Triplet indices that have at least one neighbour, ascending.
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.n_triplets)
            .filter(|&t| !self.incidence[t].is_empty())
            .collect()
    }

    pub fn degree_pairs(&self, t: usize) -> &[(usize, Side)] {
        self.incidence.get(t).map_or(&[], Vec::as_slice)
    }

    /// Distinct neighbours of triplet `t`, ascending.
    pub fn neighbors(&self, t: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .degree_pairs(t)
            .iter()
            .flat_map(|&(ci, side)| self.conflicts[ci].side(side.other()).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Distinct implicit edges `(a, b)` with `a < b`, sorted. Quadratic; meant
    /// for small graphs and checks.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for c in &self.conflicts {
            for &s in &c.same {
                for &d in &c.diff {
                    out.push(if s < d { (s, d) } else { (d, s) });
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks that `cover` touches every implicit edge. Within one pair this
    /// holds iff one side is fully covered.
    pub fn check_cover(&self, cover: &VertexCover) -> Result<()> {
        let covered = cover.mask(self.n_triplets)?;
        for c in &self.conflicts {
            let s = c.same.iter().find(|&&t| !covered[t]);
            let d = c.diff.iter().find(|&&t| !covered[t]);
            if let (Some(&s), Some(&d)) = (s, d) {
                return Err(Error::InvalidCover(s.min(d), s.max(d)));
            }
        }
        Ok(())
    }

    pub fn is_cover(&self, cover: &VertexCover) -> bool {
        self.check_cover(cover).is_ok()
    }
}

/// A set of triplet indices, kept sorted and duplicate free.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexCover {
    covered: Vec<usize>,
}

impl VertexCover {
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut covered: Vec<usize> = indices.into_iter().collect();
        covered.sort_unstable();
        covered.dedup();
        Self { covered }
    }

    pub fn len(&self) -> usize {
        self.covered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.covered.is_empty()
    }

    pub fn contains(&self, t: usize) -> bool {
        self.covered.binary_search(&t).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.covered
    }

    fn mask(&self, n: usize) -> Result<Vec<bool>> {
        let mut mask = vec![false; n];
        for &t in &self.covered {
            *mask.get_mut(t).ok_or(Error::UniverseMismatch { item: t, n })? = true;
        }
        Ok(mask)
    }
}

/// Builds the constraint graph of `triplets`.
pub fn build_constraint_graph(triplets: &TripletSet) -> ConstraintGraph {
    let pairs: Vec<_> = triplets.pairs().collect();
    let conflicts: Vec<PairConflict> = pairs
        .par_iter()
        .filter_map(|&(pair, members)| {
            let (same, diff): (Vec<usize>, Vec<usize>) = members
                .iter()
                .partition(|&&idx| triplets.triplets()[idx].close() == pair);
            (!same.is_empty() && !diff.is_empty()).then_some(PairConflict { pair, same, diff })
        })
        .collect();
    ConstraintGraph::from_conflicts(triplets.len(), conflicts)
        .expect("conflict indices come from the triplet set")
}

/// Greedy maximal-matching cover: walks the implicit edges in canonical
/// order and takes both endpoints of every edge that is still uncovered.
pub fn approx_vertex_cover(graph: &ConstraintGraph) -> VertexCover {
    let mut covered = vec![false; graph.n_triplets()];
    let mut picked = Vec::new();
    for c in graph.conflicts() {
        // Cover state only grows, so every diff vertex before `next` stays covered.
        let mut next = 0;
        for &s in &c.same {
            if covered[s] {
                continue;
            }
            while next < c.diff.len() && covered[c.diff[next]] {
                next += 1;
            }
            let Some(&d) = c.diff.get(next) else {
                break;
            };
            covered[s] = true;
            covered[d] = true;
            picked.extend([s, d]);
        }
    }
    VertexCover::new(picked)
}

/// Drops redundant vertices, i.e. those whose neighbours are all in the
/// cover. Vertices are visited from the highest triplet index down, and
/// each removal is seen by later checks.
pub fn prune_redundant(graph: &ConstraintGraph, cover: &VertexCover) -> Result<VertexCover> {
    graph.check_cover(cover)?;
    let conflicts = graph.conflicts();
    // uncovered[c][side] = vertices of that side of conflict c outside the cover
    let mut in_cover = cover.mask(graph.n_triplets())?;
    let mut uncovered: Vec<[usize; 2]> = conflicts
        .iter()
        .map(|c| {
            [
                c.same.iter().filter(|&&t| !in_cover[t]).count(),
                c.diff.iter().filter(|&&t| !in_cover[t]).count(),
            ]
        })
        .collect();

    for &t in cover.indices().iter().rev() {
        let incident = graph.degree_pairs(t);
        let redundant = incident
            .iter()
            .all(|&(ci, side)| uncovered[ci][side.other().index()] == 0);
        if redundant {
            in_cover[t] = false;
            for &(ci, side) in incident {
                uncovered[ci][side.index()] += 1;
            }
        }
    }
    Ok(VertexCover::new(
        cover.indices().iter().copied().filter(|&t| in_cover[t]),
    ))
}

/// Result of removing a pruned vertex cover from a triplet set.
#[derive(Clone, Debug)]
pub struct Consistent {
    /// The surviving triplets, in their original order.
    pub triplets: TripletSet,
    /// Indices (into the input) of the removed triplets.
    pub removed: VertexCover,
    pub conflicting_pairs: usize,
    /// Cover size before redundant vertices were pruned.
    pub raw_cover_size: usize,
}

/// Removes a vertex cover of the constraint graph so that no two remaining
/// triplets are inconsistent.
pub fn make_consistent(triplets: &TripletSet) -> Consistent {
    let graph = build_constraint_graph(triplets);
    let raw = approx_vertex_cover(&graph);
    let removed = prune_redundant(&graph, &raw).expect("approximate cover is a valid cover");
    let mask = removed
        .mask(triplets.len())
        .expect("cover indices come from the triplet set");
    Consistent {
        triplets: triplets.filter_indices(|idx| !mask[idx]),
        removed,
        conflicting_pairs: graph.conflicts().len(),
        raw_cover_size: raw.len(),
    }
}

/// Maps a consistent triplet set to a correlation-clustering instance: a
/// pair becomes a `+` edge if its triplets all have it as the close pair, a
/// `-` edge if they all have one of its items as outlier, weighted by the
/// number of such triplets.
pub fn to_cc_instance(triplets: &TripletSet) -> Result<CcInstance> {
    let mut graph = CcInstance::new(triplets.n_items());
    for (pair, members) in triplets.pairs() {
        let same = members
            .iter()
            .filter(|&&idx| triplets.triplets()[idx].close() == pair)
            .count();
        let sign = if same == members.len() {
            Sign::Plus
        } else if same == 0 {
            Sign::Minus
        } else {
            return Err(Error::Inconsistent {
                u: pair.0,
                v: pair.1,
            });
        };
        graph.add_edge(pair.0, pair.1, sign, members.len() as u64)?;
    }
    Ok(graph)
}
