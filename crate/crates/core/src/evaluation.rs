//! Partition agreement metrics and the synthetic experiment grid.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Clustering;
use crate::solvers::{run_variant, Variant};
use crate::synthgen::{generate, GeneratorConfig};

pub use crate::model::num_clusters;

fn choose2(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

/// Adjusted Rand index from the contingency table of the two clusterings.
///
/// When the expected and maximum index coincide (both clusterings are all
/// singletons, or both a single cluster, or there are fewer than two items)
/// the index is undefined; identical partitions then score 1, anything else
/// 0.
pub fn adjusted_rand_index(left: &Clustering, right: &Clustering) -> Result<f64> {
    if left.len() != right.len() {
        return Err(Error::UniverseSizeMismatch {
            left: left.len(),
            right: right.len(),
        });
    }
    let mut cells: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&a, &b) in left.labels().iter().zip(right.labels()) {
        *cells.entry((a, b)).or_default() += 1;
        *rows.entry(a).or_default() += 1;
        *cols.entry(b).or_default() += 1;
    }
    let index: u128 = cells.values().map(|&c| choose2(c)).sum();
    let sum_rows: u128 = rows.values().map(|&c| choose2(c)).sum();
    let sum_cols: u128 = cols.values().map(|&c| choose2(c)).sum();
    let total = choose2(left.len() as u64);

    // Scale everything by 2 * total to stay in integers:
    // ARI = (index - r*c/total) / ((r + c)/2 - r*c/total)
    let numerator = 2 * (index as i128 * total as i128 - (sum_rows * sum_cols) as i128);
    let denominator = ((sum_rows + sum_cols) * total) as i128 - 2 * (sum_rows * sum_cols) as i128;
    if denominator == 0 {
        return Ok(if left.same_partition(right) { 1.0 } else { 0.0 });
    }
    Ok(numerator as f64 / denominator as f64)
}

/// One (cell, repeat, variant) outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub repeat: usize,
    pub seed: u64,
    pub variant: Variant,
    pub n_triplets: usize,
    pub ari: f64,
    pub found_clusters: usize,
    pub cost: u64,
    pub removed: usize,
    pub runtime_ms: u64,
    /// Empty on success.
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub n_items: usize,
    pub ks: Vec<usize>,
    pub fracs: Vec<f64>,
    pub noises: Vec<f64>,
    /// Repeats for randomized cells. The cell with `a = 1, b = 0` is
    /// deterministic and runs once.
    pub repeats: usize,
    pub variants: Vec<Variant>,
    pub master_seed: u64,
    /// Record wall-clock runtimes. Off keeps output byte-reproducible.
    pub record_timing: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_items: 160,
            ks: vec![2, 4, 8, 16],
            fracs: vec![0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0],
            noises: vec![0.0, 0.1, 0.2],
            repeats: 10,
            variants: Variant::ALL.to_vec(),
            master_seed: 0,
            record_timing: false,
        }
    }
}

/// A (k, a, b, repeat) task of the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridTask {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub repeat: usize,
    pub seed: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of one grid task, a fixed mix of the master seed and the task
/// coordinates, so any cell can be rerun on its own.
pub fn task_seed(master: u64, k: usize, a: f64, b: f64, repeat: usize) -> u64 {
    [k as u64, a.to_bits(), b.to_bits(), repeat as u64]
        .into_iter()
        .fold(splitmix64(master), |h, x| splitmix64(h ^ x))
}

fn is_deterministic_cell(a: f64, b: f64) -> bool {
    a == 1.0 && b == 0.0
}

impl GridConfig {
    pub fn tasks(&self) -> Vec<GridTask> {
        let mut out = Vec::new();
        for &k in &self.ks {
            for &a in &self.fracs {
                for &b in &self.noises {
                    let repeats = if is_deterministic_cell(a, b) { 1 } else { self.repeats };
                    for repeat in 0..repeats {
                        out.push(GridTask {
                            k,
                            a,
                            b,
                            repeat,
                            seed: task_seed(self.master_seed, k, a, b, repeat),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Runs every variant on every grid task. Tasks run in parallel; rows come
/// back sorted by (k, a, b, repeat, variant). Failures are recorded in the
/// row's `error` column.
pub fn run_experiment_grid(cfg: &GridConfig) -> Vec<ExperimentRow> {
    let mut rows: Vec<ExperimentRow> = cfg
        .tasks()
        .par_iter()
        .flat_map_iter(|task| run_task(cfg, task))
        .collect();
    rows.sort_by(|x, y| {
        (x.k, x.a, x.b, x.repeat, x.variant)
            .partial_cmp(&(y.k, y.a, y.b, y.repeat, y.variant))
            .expect("grid parameters are finite")
    });
    rows
}

/// All variants of one grid task.
pub fn run_task(cfg: &GridConfig, task: &GridTask) -> Vec<ExperimentRow> {
    let blank = |variant, error: String| ExperimentRow {
        k: task.k,
        a: task.a,
        b: task.b,
        repeat: task.repeat,
        seed: task.seed,
        variant,
        n_triplets: 0,
        ari: 0.0,
        found_clusters: 0,
        cost: 0,
        removed: 0,
        runtime_ms: 0,
        error,
    };
    let gen_cfg = GeneratorConfig {
        n: cfg.n_items,
        k: task.k,
        a: task.a,
        b: task.b,
        seed: task.seed,
    };
    let data = match generate(&gen_cfg) {
        Ok(d) => d,
        Err(e) => return cfg.variants.iter().map(|&v| blank(v, e.to_string())).collect(),
    };
    cfg.variants
        .iter()
        .map(|&variant| {
            let start = Instant::now();
            let solved = run_variant(&data.triplets, variant, Some(task.seed))
                .and_then(|r| Ok((adjusted_rand_index(&r.clustering, &data.truth)?, r)));
            let elapsed = start.elapsed().as_millis() as u64;
            match solved {
                Ok((ari, r)) => ExperimentRow {
                    n_triplets: data.triplets.len(),
                    ari,
                    found_clusters: r.clustering.num_clusters(),
                    cost: r.cost,
                    removed: r.removed_triplets,
                    runtime_ms: if cfg.record_timing { elapsed } else { 0 },
                    ..blank(variant, String::new())
                },
                Err(e) => blank(variant, e.to_string()),
            }
        })
        .collect()
}

/// Per (k, a, b, variant) means over repeats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub variant: Variant,
    pub runs: usize,
    pub failures: usize,
    pub mean_ari: f64,
    pub mean_clusters: f64,
    pub mean_cost: f64,
    pub mean_removed: f64,
    pub mean_runtime_ms: f64,
}

pub fn summarize(rows: &[ExperimentRow]) -> Vec<CellSummary> {
    let mut groups: BTreeMap<(usize, u64, u64, Variant), Vec<&ExperimentRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.k, r.a.to_bits(), r.b.to_bits(), r.variant))
            .or_default()
            .push(r);
    }
    let mut out: Vec<CellSummary> = groups
        .into_values()
        .map(|group| {
            let ok: Vec<&&ExperimentRow> = group.iter().filter(|r| r.error.is_empty()).collect();
            let mean = |f: &dyn Fn(&ExperimentRow) -> f64| {
                if ok.is_empty() {
                    f64::NAN
                } else {
                    ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
                }
            };
            let first = group[0];
            CellSummary {
                k: first.k,
                a: first.a,
                b: first.b,
                variant: first.variant,
                runs: group.len(),
                failures: group.len() - ok.len(),
                mean_ari: mean(&|r| r.ari),
                mean_clusters: mean(&|r| r.found_clusters as f64),
                mean_cost: mean(&|r| r.cost as f64),
                mean_removed: mean(&|r| r.removed as f64),
                mean_runtime_ms: mean(&|r| r.runtime_ms as f64),
            }
        })
        .collect();
    out.sort_by(|x, y| {
        (x.k, x.a, x.b, x.variant)
            .partial_cmp(&(y.k, y.a, y.b, y.variant))
            .expect("grid parameters are finite")
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn c(labels: &[usize]) -> Clustering {
        Clustering::new(labels.to_vec()).unwrap()
    }

    /// ARI straight from pair counting over all item pairs.
    fn pair_counting_ari(x: &Clustering, y: &Clustering) -> f64 {
        let n = x.len();
        let (mut both, mut in_x, mut in_y, mut pairs) = (0f64, 0f64, 0f64, 0f64);
        for u in 0..n {
            for v in u + 1..n {
                let sx = x.labels()[u] == x.labels()[v];
                let sy = y.labels()[u] == y.labels()[v];
                both += (sx && sy) as u8 as f64;
                in_x += sx as u8 as f64;
                in_y += sy as u8 as f64;
                pairs += 1.0;
            }
        }
        let expected = in_x * in_y / pairs;
        (both - expected) / ((in_x + in_y) / 2.0 - expected)
    }

    #[test]
    fn ari_examples() {
        let f = c(&[1, 1, 2, 2, 3]);
        assert_eq!(adjusted_rand_index(&f, &f).unwrap(), 1.0);
        // {ab|cd} vs {ac|bd}
        assert_eq!(adjusted_rand_index(&c(&[1, 1, 2, 2]), &c(&[1, 2, 1, 2])).unwrap(), -0.5);
        assert_eq!(adjusted_rand_index(&f, &c(&[7, 7, 3, 3, 9])).unwrap(), 1.0);
    }

    #[test]
    fn ari_degenerate_cases() {
        let s = Clustering::all_different(4);
        let one = Clustering::all_equal(4);
        assert_eq!(adjusted_rand_index(&s, &s).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&one, &one).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&s, &one).unwrap(), 0.0);
        assert_eq!(adjusted_rand_index(&c(&[1]), &c(&[4])).unwrap(), 1.0);
        assert!(adjusted_rand_index(&s, &Clustering::all_equal(3)).is_err());
    }

    #[test]
    fn ari_matches_pair_counting() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let n = rng.gen_range(2..15);
            let x = Clustering::new((0..n).map(|_| rng.gen_range(1..5)).collect()).unwrap();
            let y = Clustering::new((0..n).map(|_| rng.gen_range(1..5)).collect()).unwrap();
            let direct = pair_counting_ari(&x, &y);
            let got = adjusted_rand_index(&x, &y).unwrap();
            if direct.is_finite() {
                assert!((direct - got).abs() < 1e-12, "{x:?} {y:?}");
            }
        }
    }

    #[test]
    fn num_clusters_examples() {
        assert_eq!(num_clusters(&c(&[1, 1, 2])), 2);
        assert_eq!(num_clusters(&Clustering::all_different(7)), 7);
        assert_eq!(num_clusters(&Clustering::all_equal(7)), 1);
    }

    #[test]
    fn random_partitions_average_near_zero() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1000);
        let total: f64 = (0..1000)
            .map(|_| {
                let x = Clustering::new((0..20).map(|_| rng.gen_range(1..=2)).collect()).unwrap();
                let y = Clustering::new((0..20).map(|_| rng.gen_range(1..=2)).collect()).unwrap();
                adjusted_rand_index(&x, &y).unwrap()
            })
            .sum();
        let mean = total / 1000.0;
        assert!((-0.05..=0.05).contains(&mean), "mean ARI {mean}");
    }

    #[test]
    fn default_grid_has_924_tasks() {
        assert_eq!(GridConfig::default().tasks().len(), 924);
    }

    #[test]
    fn task_seeds_are_stable_and_distinct() {
        let tasks = GridConfig::default().tasks();
        let mut seeds: Vec<u64> = tasks.iter().map(|t| t.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), tasks.len());
        assert_eq!(task_seed(0, 4, 0.1, 0.2, 3), task_seed(0, 4, 0.1, 0.2, 3));
        assert_ne!(task_seed(0, 4, 0.1, 0.2, 3), task_seed(1, 4, 0.1, 0.2, 3));
    }

    #[test]
    fn single_cell_recovers_truth() {
        let cfg = GridConfig {
            ks: vec![4],
            fracs: vec![1.0],
            noises: vec![0.0],
            variants: vec![Variant::LsAdVc],
            ..GridConfig::default()
        };
        let rows = run_experiment_grid(&cfg);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].ari, 1.0);
        assert_eq!(rows[0].found_clusters, 4);
        assert!(rows[0].error.is_empty());
    }

    #[test]
    fn grid_is_deterministic_and_records_failures() {
        let cfg = GridConfig {
            n_items: 24,
            ks: vec![2, 30],
            fracs: vec![0.2],
            noises: vec![0.1],
            repeats: 2,
            variants: vec![Variant::LsAd, Variant::LsEqVc],
            master_seed: 9,
            record_timing: false,
        };
        let rows = run_experiment_grid(&cfg);
        assert_eq!(rows, run_experiment_grid(&cfg));
        assert_eq!(rows.len(), 8);
        let failed: Vec<_> = rows.iter().filter(|r| !r.error.is_empty()).collect();
        assert_eq!(failed.len(), 4);
        assert!(failed.iter().all(|r| r.k == 30));
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 4);
        assert!(summary.iter().all(|s| s.runs == 2));
    }

    proptest! {
        #[test]
        fn ari_symmetric_and_label_invariant(x in prop::collection::vec(1usize..5, 2..20),
                                             seed: u64) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let y: Vec<usize> = x.iter().map(|_| rng.gen_range(1..5)).collect();
            let (x, y) = (c(&x), c(&y));
            let xy = adjusted_rand_index(&x, &y).unwrap();
            prop_assert_eq!(xy, adjusted_rand_index(&y, &x).unwrap());
            prop_assert!((-1.0..=1.0).contains(&xy));
            let permuted = Clustering::new(x.labels().iter().map(|l| 100 - 3 * l).collect()).unwrap();
            prop_assert_eq!(xy, adjusted_rand_index(&permuted, &y).unwrap());
            prop_assert_eq!(adjusted_rand_index(&x, &x.cleaned()).unwrap(), 1.0);
            prop_assert_eq!(xy == 1.0, x.same_partition(&y));
        }
    }
}
