//! Synthetic triplets from a planted clustering, and the reduction from
//! unweighted correlation clustering to triplets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CcInstance, Clustering, Triplet, TripletSet};

/// Parameters of the planted-partition triplet generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n: usize,
    /// Clusters in the ground truth.
    pub k: usize,
    /// Fraction of the valid triplets kept, in `(0, 1]`.
    pub a: f64,
    /// Fraction of kept triplets whose outlier is swapped, in `[0, 1)`.
    pub b: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= k <= n, got k = {}, n = {}",
                self.k, self.n
            )));
        }
        if !(self.a > 0.0 && self.a <= 1.0) {
            return Err(Error::InvalidConfig(format!("a must be in (0, 1], got {}", self.a)));
        }
        if !(0.0..1.0).contains(&self.b) {
            return Err(Error::InvalidConfig(format!("b must be in [0, 1), got {}", self.b)));
        }
        Ok(())
    }
}

/// Generated data set.
#[derive(Clone, Debug)]
pub struct Generated {
    pub truth: Clustering,
    pub triplets: TripletSet,
}

/// Sampling and noise use separate streams derived from the config seed.
pub fn generate(cfg: &GeneratorConfig) -> Result<Generated> {
    cfg.validate()?;
    let truth = generate_ground_truth(cfg.n, cfg.k)?;
    let all = enumerate_valid_triplets(&truth);
    let sampled = sample_triplets(&all, cfg.a, cfg.seed)?;
    let triplets = apply_noise(&sampled, cfg.b, cfg.seed ^ NOISE_STREAM)?;
    Ok(Generated { truth, triplets })
}

const NOISE_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// Balanced round-robin ground truth: item `u` goes to cluster `u % k + 1`.
pub fn generate_ground_truth(n: usize, k: usize) -> Result<Clustering> {
    if k == 0 || k > n {
        return Err(Error::InvalidConfig(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Clustering::new((0..n).map(|u| u % k + 1).collect())
}

/// Round-robin cluster sizes, shuffled over the items with `seed`.
pub fn generate_shuffled_ground_truth(n: usize, k: usize, seed: u64) -> Result<Clustering> {
    let mut labels = generate_ground_truth(n, k)?.labels().to_vec();
    labels.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Clustering::new(labels)
}

/// Every 3-subset with exactly two co-clustered items, as the triplet whose
/// outlier is the odd one out. Ordered by the sorted subset.
pub fn enumerate_valid_triplets(truth: &Clustering) -> TripletSet {
    let l = truth.labels();
    let n = l.len();
    let mut out = Vec::with_capacity(valid_triplet_count(truth) as usize);
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let t = match (l[x] == l[y], l[x] == l[z], l[y] == l[z]) {
                    (true, false, false) => Triplet::new(x, y, z),
                    (false, true, false) => Triplet::new(x, z, y),
                    (false, false, true) => Triplet::new(y, z, x),
                    _ => continue,
                };
                out.push(t.expect("distinct items"));
            }
        }
    }
    TripletSet::new(n, out).expect("items come from the clustering")
}

/// Closed form of `enumerate_valid_triplets(truth).len()`: for every
/// cluster of size `s`, `C(s, 2) * (n - s)`.
pub fn valid_triplet_count(truth: &Clustering) -> u64 {
    let n = truth.len() as u64;
    let mut sizes = std::collections::BTreeMap::<usize, u64>::new();
    for &l in truth.labels() {
        *sizes.entry(l).or_default() += 1;
    }
    sizes.values().map(|&s| s * s.saturating_sub(1) / 2 * (n - s)).sum()
}

/// `round(x)` with halves rounded up.
fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor() as usize
}

/// `count` distinct indices from `0..len`, uniformly, via a partial
/// Fisher-Yates shuffle. Returned in draw order.
fn fisher_yates_prefix(len: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..len).collect();
    for i in 0..count.min(len) {
        let j = rng.gen_range(i..len);
        idx.swap(i, j);
    }
    idx.truncate(count.min(len));
    idx
}

/// Uniform sample without replacement of `round(a * |all|)` triplets, kept
/// in their original order.
pub fn sample_triplets(all: &TripletSet, a: f64, seed: u64) -> Result<TripletSet> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidConfig(format!("a must be in (0, 1], got {a}")));
    }
    let count = round_half_up(a * all.len() as f64).min(all.len());
    if count == all.len() {
        return Ok(all.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![false; all.len()];
    for i in fisher_yates_prefix(all.len(), count, &mut rng) {
        chosen[i] = true;
    }
    Ok(all.filter_indices(|i| chosen[i]))
}

/// Corrupts `round(b * |T|)` distinct triplets by swapping the outlier with
/// one of the close items, picked by a fair coin. Positions are drawn first,
/// then one coin per position in draw order.
pub fn apply_noise(triplets: &TripletSet, b: f64, seed: u64) -> Result<TripletSet> {
    if !(0.0..1.0).contains(&b) {
        return Err(Error::InvalidConfig(format!("b must be in [0, 1), got {b}")));
    }
    let count = round_half_up(b * triplets.len() as f64).min(triplets.len());
    if count == 0 {
        return Ok(triplets.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positions = fisher_yates_prefix(triplets.len(), count, &mut rng);
    let mut out = triplets.triplets().to_vec();
    for p in positions {
        out[p] = swap_outlier(&out[p], rng.gen_bool(0.5));
    }
    TripletSet::new(triplets.n_items(), out)
}

/// Makes one of the close items the outlier: the first if `first`, else the
/// second.
pub fn swap_outlier(t: &Triplet, first: bool) -> Triplet {
    let (i, j) = t.close();
    let o = t.outlier();
    let swapped = if first { Triplet::new(o, j, i) } else { Triplet::new(i, o, j) };
    swapped.expect("a permutation of distinct items")
}

/// Triplet instance produced from an unweighted correlation-clustering
/// graph.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub triplets: TripletSet,
    /// Items `0..real_items` are the graph's vertices; the rest are dummies.
    pub real_items: usize,
    /// For every dummy (in index order), the edge it was made for.
    pub dummies: Vec<((usize, usize), crate::model::Sign)>,
}

/// For every `+` edge `{u, v}` adds `(u, v, x)` and for every `-` edge adds
/// `(u, y, v)`, where `x` and `y` are fresh items used by that one triplet.
/// Edges are taken in pair order.
pub fn reduce_cc_to_triplets(graph: &CcInstance) -> Result<Reduction> {
    use crate::model::Sign;
    let n = graph.n_items();
    let edges = graph.edges();
    if let Some(&((u, v), _, weight)) = edges.iter().find(|e| e.2 != 1) {
        return Err(Error::UnsupportedWeights { u, v, weight });
    }
    let mut triplets = Vec::with_capacity(edges.len());
    let mut dummies = Vec::with_capacity(edges.len());
    for (k, &((u, v), sign, _)) in edges.iter().enumerate() {
        let dummy = n + k;
        triplets.push(match sign {
            Sign::Plus => Triplet::new(u, v, dummy)?,
            Sign::Minus => Triplet::new(u, dummy, v)?,
        });
        dummies.push(((u, v), sign));
    }
    Ok(Reduction {
        triplets: TripletSet::new(n + edges.len(), triplets)?,
        real_items: n,
        dummies,
    })
}
