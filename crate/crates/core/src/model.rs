//! Items, triplets, clusterings and the two cost functions.
//!
//! Items are interned to dense indices `0..n` when data is loaded; everything
//! past the I/O boundary works on those indices. A triplet `(i, j, o)` says
//! that `o` is the outlier of the three, i.e. `i` and `j` are the close pair.
//! It is satisfied by a clustering `f` iff `f(i) = f(j) != f(o)`.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};

/// Canonical form of an unordered pair.
#[inline]
pub fn ordered_pair(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Bidirectional map between external item labels and dense indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ItemUniverse {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl ItemUniverse {
    pub fn new() -> Self {
        Self::default()
    }

    /// Universe whose labels are the decimal indices `"0"`, `"1"`, ...
    pub fn numbered(n: usize) -> Self {
        let mut universe = Self::new();
        for i in 0..n {
            universe.intern(&i.to_string());
        }
        universe
    }

    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut universe = Self::new();
        for label in labels {
            let label = label.into();
            if universe.index.contains_key(&label) {
                return Err(Error::InvalidConfig(format!("duplicate item label {label:?}")));
            }
            universe.intern(&label);
        }
        Ok(universe)
    }

    /// Returns the index of `label`, assigning the next free index if it is new.
    pub fn intern(&mut self, label: &str) -> usize {
        if let Some(&idx) = self.index.get(label) {
            return idx;
        }
        let idx = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), idx);
        idx
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, idx: usize) -> Option<&str> {
        self.labels.get(idx).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// What a triplet says about a pair of items.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Implication {
    /// The pair is the close pair of the triplet.
    Same,
    /// One of the two items is the outlier.
    Different,
    /// The triplet does not contain both items.
    NotConstrained,
}

/// One relative distance comparison: `i` and `j` are close, `o` is the outlier.
///
/// The close pair is stored sorted, so `(a, b, c)` and `(b, a, c)` are the
/// same triplet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triplet {
    i: usize,
    j: usize,
    o: usize,
}

impl Triplet {
    pub fn new(close1: usize, close2: usize, outlier: usize) -> Result<Self> {
        if close1 == close2 || close1 == outlier || close2 == outlier {
            return Err(Error::DegenerateTriplet(close1, close2, outlier));
        }
        let (i, j) = ordered_pair(close1, close2);
        Ok(Self { i, j, o: outlier })
    }

    /// The close pair, smaller index first.
    #[inline]
    pub fn close(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    #[inline]
    pub fn outlier(&self) -> usize {
        self.o
    }

    #[inline]
    pub fn items(&self) -> [usize; 3] {
        [self.i, self.j, self.o]
    }

    #[inline]
    pub fn contains(&self, u: usize) -> bool {
        self.i == u || self.j == u || self.o == u
    }

    /// The three unordered pairs of the triplet, close pair first.
    pub fn pairs(&self) -> [((usize, usize), Implication); 3] {
        [
            ((self.i, self.j), Implication::Same),
            (ordered_pair(self.i, self.o), Implication::Different),
            (ordered_pair(self.j, self.o), Implication::Different),
        ]
    }

    pub fn implication(&self, u: usize, v: usize) -> Result<Implication> {
        if u == v {
            return Err(Error::InvalidPair(u));
        }
        if !(self.contains(u) && self.contains(v)) {
            return Ok(Implication::NotConstrained);
        }
        if u == self.o || v == self.o {
            Ok(Implication::Different)
        } else {
            Ok(Implication::Same)
        }
    }

    /// Satisfaction test without bounds checks.
    #[inline]
    pub(crate) fn satisfied_by(&self, labels: &[usize]) -> bool {
        let li = labels[self.i];
        li == labels[self.j] && li != labels[self.o]
    }
}

/// Free-function form of [`Triplet::implication`].
pub fn pair_implication(t: &Triplet, u: usize, v: usize) -> Result<Implication> {
    t.implication(u, v)
}

/// A multiset of triplets over a universe of `n` items, with inverted
/// indices by item and by unordered pair.
#[derive(Clone, Debug)]
pub struct TripletSet {
    n_items: usize,
    triplets: Vec<Triplet>,
    by_item: Vec<Vec<usize>>,
    by_pair: BTreeMap<(usize, usize), Vec<usize>>,
}

impl PartialEq for TripletSet {
    fn eq(&self, other: &Self) -> bool {
        self.n_items == other.n_items && self.triplets == other.triplets
    }
}

impl Eq for TripletSet {}

impl TripletSet {
    pub fn new(n_items: usize, triplets: Vec<Triplet>) -> Result<Self> {
        let mut by_item = vec![Vec::new(); n_items];
        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (idx, t) in triplets.iter().enumerate() {
            for u in t.items() {
                if u >= n_items {
                    return Err(Error::UniverseMismatch { item: u, n: n_items });
                }
                by_item[u].push(idx);
            }
            for (pair, _) in t.pairs() {
                by_pair.entry(pair).or_default().push(idx);
            }
        }
        Ok(Self {
            n_items,
            triplets,
            by_item,
            by_pair,
        })
    }

    pub fn empty(n_items: usize) -> Self {
        Self {
            n_items,
            triplets: Vec::new(),
            by_item: vec![Vec::new(); n_items],
            by_pair: BTreeMap::new(),
        }
    }

    /// Builds from `(close1, close2, outlier)` tuples.
    pub fn from_tuples(n_items: usize, tuples: &[(usize, usize, usize)]) -> Result<Self> {
        let triplets = tuples
            .iter()
            .map(|&(a, b, c)| Triplet::new(a, b, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_items, triplets)
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn len(&self) -> usize {
        self.triplets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triplets.is_empty()
    }

    pub fn triplets(&self) -> &[Triplet] {
        &self.triplets
    }

    pub fn get(&self, idx: usize) -> Option<&Triplet> {
        self.triplets.get(idx)
    }

    /// Indices of the triplets that contain item `u`.
    pub fn by_item(&self, u: usize) -> &[usize] {
        self.by_item.get(u).map_or(&[], Vec::as_slice)
    }

    /// Indices of the triplets that contain both `u` and `v`.
    pub fn by_pair(&self, u: usize, v: usize) -> &[usize] {
        self.by_pair
            .get(&ordered_pair(u, v))
            .map_or(&[], Vec::as_slice)
    }

    /// All constrained pairs in ascending order with their triplet indices.
    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), &[usize])> + '_ {
        self.by_pair.iter().map(|(&p, idx)| (p, idx.as_slice()))
    }

    /// The triplets whose index satisfies `keep`, in their original order.
    pub fn filter_indices(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let kept = self
            .triplets
            .iter()
            .enumerate()
            .filter(|(idx, _)| keep(*idx))
            .map(|(_, t)| *t)
            .collect();
        Self::new(self.n_items, kept).expect("subset of a valid triplet set")
    }
}

/// A total assignment of items to positive cluster labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Clustering {
    labels: Vec<usize>,
}

impl Clustering {
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        if let Some(item) = labels.iter().position(|&l| l == 0) {
            return Err(Error::ZeroLabel { item });
        }
        Ok(Self { labels })
    }

    /// Every item in cluster 1.
    pub fn all_equal(n: usize) -> Self {
        Self { labels: vec![1; n] }
    }

    /// Item `u` in cluster `u + 1`.
    pub fn all_different(n: usize) -> Self {
        Self {
            labels: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> Result<usize> {
        self.labels.get(u).copied().ok_or(Error::UniverseMismatch {
            item: u,
            n: self.labels.len(),
        })
    }

    pub(crate) fn labels_mut(&mut self) -> &mut [usize] {
        &mut self.labels
    }

    pub fn max_label(&self) -> usize {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    pub fn num_clusters(&self) -> usize {
        let mut seen: Vec<usize> = self.labels.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// Relabels to `1..=h` by order of first appearance in item order.
    pub fn cleaned(&self) -> Self {
        let mut map: HashMap<usize, usize> = HashMap::new();
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                let next = map.len() + 1;
                *map.entry(l).or_insert(next)
            })
            .collect();
        Self { labels }
    }

    /// True iff both clusterings induce the same set partition.
    pub fn same_partition(&self, other: &Self) -> bool {
        self.len() == other.len() && self.cleaned() == other.cleaned()
    }
}

pub fn cleanup_labels(f: &Clustering) -> Clustering {
    f.cleaned()
}

pub fn num_clusters(f: &Clustering) -> usize {
    f.num_clusters()
}

pub fn is_satisfied(t: &Triplet, f: &Clustering) -> Result<bool> {
    for u in t.items() {
        if u >= f.len() {
            return Err(Error::UniverseMismatch { item: u, n: f.len() });
        }
    }
    Ok(t.satisfied_by(f.labels()))
}

fn check_universe(n_items: usize, f: &Clustering) -> Result<()> {
    if n_items != f.len() {
        return Err(Error::UniverseSizeMismatch {
            left: n_items,
            right: f.len(),
        });
    }
    Ok(())
}

/// Number of triplets in `triplets` (with multiplicity) not satisfied by `f`.
pub fn triplet_cost(triplets: &TripletSet, f: &Clustering) -> Result<u64> {
    check_universe(triplets.n_items(), f)?;
    Ok(triplets
        .triplets()
        .iter()
        .filter(|t| !t.satisfied_by(f.labels()))
        .count() as u64)
}

/// Sign of a correlation-clustering edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

/// A weighted signed graph: `+` edges want their endpoints together, `-`
/// edges want them apart.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CcInstance {
    n_items: usize,
    plus: BTreeMap<(usize, usize), u64>,
    minus: BTreeMap<(usize, usize), u64>,
}

impl CcInstance {
    pub fn new(n_items: usize) -> Self {
        Self {
            n_items,
            ..Self::default()
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, sign: Sign, weight: u64) -> Result<()> {
        let bad = |reason| Err(Error::InvalidEdge { u, v, reason });
        if u == v {
            return bad("self loop");
        }
        if u >= self.n_items || v >= self.n_items {
            return bad("endpoint outside the universe");
        }
        if weight == 0 {
            return bad("weight must be positive");
        }
        let pair = ordered_pair(u, v);
        if self.plus.contains_key(&pair) || self.minus.contains_key(&pair) {
            return bad("pair already has an edge");
        }
        match sign {
            Sign::Plus => self.plus.insert(pair, weight),
            Sign::Minus => self.minus.insert(pair, weight),
        };
        Ok(())
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn plus_edges(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.plus.iter().map(|(&p, &w)| (p, w))
    }

    pub fn minus_edges(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.minus.iter().map(|(&p, &w)| (p, w))
    }

    /// All edges in pair order.
    pub fn edges(&self) -> Vec<((usize, usize), Sign, u64)> {
        let mut all: Vec<_> = self
            .plus_edges()
            .map(|(p, w)| (p, Sign::Plus, w))
            .chain(self.minus_edges().map(|(p, w)| (p, Sign::Minus, w)))
            .collect();
        all.sort_unstable_by_key(|e| e.0);
        all
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<(Sign, u64)> {
        let pair = ordered_pair(u, v);
        if let Some(&w) = self.plus.get(&pair) {
            Some((Sign::Plus, w))
        } else {
            self.minus.get(&pair).map(|&w| (Sign::Minus, w))
        }
    }

    pub fn n_edges(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_unweighted(&self) -> bool {
        self.plus.values().chain(self.minus.values()).all(|&w| w == 1)
    }
}

/// Weighted disagreements of `f` on `graph`.
pub fn cc_cost(graph: &CcInstance, f: &Clustering) -> Result<u64> {
    check_universe(graph.n_items(), f)?;
    let l = f.labels();
    let plus: u64 = graph
        .plus_edges()
        .filter(|((u, v), _)| l[*u] != l[*v])
        .map(|(_, w)| w)
        .sum();
    let minus: u64 = graph
        .minus_edges()
        .filter(|((u, v), _)| l[*u] == l[*v])
        .map(|(_, w)| w)
        .sum();
    Ok(plus + minus)
}
