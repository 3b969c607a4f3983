//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Run with `cargo test -p tricc-cli --test acceptance`.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tricc::consistency::{build_constraint_graph, make_consistent, to_cc_instance};
use tricc::evaluation::{run_task, ExperimentRow, GridConfig, GridTask};
use tricc::solvers::{brute_force_cc, brute_force_min_vc_with_limit, brute_force_optimal_with_limit};
use tricc::synthgen::{
    apply_noise, enumerate_valid_triplets, generate, generate_ground_truth, reduce_cc_to_triplets,
    GeneratorConfig,
};
use tricc::{
    cc_cost, run_variant, triplet_cost, CcInstance, Clustering, Sign, Triplet, TripletSet, Variant,
};

type Criterion = (&'static str, fn() -> Verdict);

enum Verdict {
    Pass(String),
    /// Soft threshold missed: reported, does not fail the suite.
    Report(String),
    Fail(String),
}

fn random_triplets(rng: &mut ChaCha8Rng, n: usize, m: usize) -> TripletSet {
    let mut out = Vec::with_capacity(m);
    while out.len() < m {
        let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        if let Ok(t) = Triplet::new(a, b, c) {
            out.push(t);
        }
    }
    TripletSet::new(n, out).unwrap()
}

fn random_clustering(rng: &mut ChaCha8Rng, n: usize) -> Clustering {
    let k = rng.gen_range(1..=n);
    Clustering::new((0..n).map(|_| rng.gen_range(1..=k)).collect()).unwrap()
}

fn worked_example() -> Verdict {
    // a..f = 0..5
    let t = TripletSet::from_tuples(6, &[(0, 1, 2), (1, 3, 2), (0, 1, 4), (0, 5, 2)]).unwrap();
    let f = Clustering::new(vec![1, 1, 2, 3, 1, 2]).unwrap();
    let start = Instant::now();
    let cost = triplet_cost(&t, &f).unwrap();
    let elapsed = start.elapsed();
    let satisfied: Vec<usize> = (0..t.len())
        .filter(|&i| tricc::is_satisfied(&t.triplets()[i], &f).unwrap())
        .collect();
    let detail = format!("s(f,T) = {cost}, satisfied = {satisfied:?}, {elapsed:?}");
    if cost == 3 && satisfied == [0] && elapsed < Duration::from_millis(1) {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn cleanup_invariants() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut violations = Vec::new();
    let mut checked = [0usize; 4];
    for case in 0..500 {
        let n = rng.gen_range(3..=10);
        let m = rng.gen_range(1..=40);
        let t = random_triplets(&mut rng, n, m);
        let cleaned = make_consistent(&t);
        let tp = &cleaned.triplets;

        // (i)
        checked[0] += 1;
        if !build_constraint_graph(tp).is_edgeless() {
            violations.push(format!("case {case}: (i) graph not edgeless"));
        }

        // (ii) and (iii)
        let cc = to_cc_instance(tp).unwrap();
        for _ in 0..100 {
            let f = random_clustering(&mut rng, n);
            let s = triplet_cost(tp, &f).unwrap();
            let c = cc_cost(&cc, &f).unwrap();
            checked[1] += 1;
            if !(s <= c && c <= 2 * s) {
                violations.push(format!("case {case}: (ii) s = {s}, c = {c}"));
            }
            let s_full = triplet_cost(&t, &f).unwrap();
            checked[2] += 1;
            if s_full > cleaned.removed.len() as u64 + s {
                violations.push(format!(
                    "case {case}: (iii) {s_full} > {} + {s}",
                    cleaned.removed.len()
                ));
            }
        }

        // (iv)
        let graph = build_constraint_graph(&t);
        let min_vc = brute_force_min_vc_with_limit(&graph, 40).unwrap();
        let opt = brute_force_optimal_with_limit(&t, 10).unwrap();
        checked[3] += 1;
        if min_vc.len() as u64 > opt.cost {
            violations.push(format!("case {case}: (iv) |minVC| = {} > OPT = {}", min_vc.len(), opt.cost));
        }
    }
    let elapsed = start.elapsed();
    let detail = format!(
        "checks (i) {} (ii) {} (iii) {} (iv) {}, {} violations, {elapsed:.2?}",
        checked[0],
        checked[1],
        checked[2],
        checked[3],
        violations.len()
    );
    if violations.is_empty() && elapsed < Duration::from_secs(30) {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{detail}; first: {:?}", violations.first()))
    }
}

fn reduction_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let mut largest = 0;
    for case in 0..200 {
        let n = rng.gen_range(1..=5);
        let mut g = CcInstance::new(n);
        for u in 0..n {
            for v in u + 1..n {
                match rng.gen_range(0..3) {
                    0 => g.add_edge(u, v, Sign::Plus, 1).unwrap(),
                    1 => g.add_edge(u, v, Sign::Minus, 1).unwrap(),
                    _ => {}
                }
            }
        }
        let (_, cc_opt) = brute_force_cc(&g).unwrap();
        let reduction = reduce_cc_to_triplets(&g).unwrap();
        largest = largest.max(reduction.triplets.n_items());
        let t_opt = brute_force_optimal_with_limit(&reduction.triplets, 15).unwrap().cost;
        if cc_opt != t_opt {
            mismatches.push(format!("case {case}: CC {cc_opt} vs triplets {t_opt}"));
        }
    }
    let elapsed = start.elapsed();
    let detail = format!(
        "200 instances, up to {largest} items after reduction, {} mismatches, {elapsed:.2?}",
        mismatches.len()
    );
    if mismatches.is_empty() && elapsed < Duration::from_secs(60) {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(format!("{detail}; first: {:?}", mismatches.first()))
    }
}

fn best_of_restarts(t: &TripletSet, opt: u64, base: u64, below: &mut Vec<String>) -> u64 {
    let mut best = u64::MAX;
    for restart in 0..20 {
        let r = run_variant(t, Variant::LsAdVc, Some(base * 20 + restart)).unwrap();
        if r.cost < opt {
            below.push(format!("instance {base}: LS {} < OPT {opt}", r.cost));
        }
        best = best.min(r.cost);
    }
    best
}

fn oracle_dominance() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut below = Vec::new();
    let (mut equal, mut ceiling) = (0, 0);
    for case in 0..300u64 {
        let n = rng.gen_range(3..=8);
        let m = rng.gen_range(1..=40);
        let t = random_triplets(&mut rng, n, m);
        let opt = brute_force_optimal_with_limit(&t, 8).unwrap().cost;
        if best_of_restarts(&t, opt, case, &mut below) == opt {
            equal += 1;
        }
        // best any solver restricted to the cleaned set could do
        let cleaned = make_consistent(&t).triplets;
        let exact_on_cleaned = brute_force_optimal_with_limit(&cleaned, 8).unwrap().clustering;
        if triplet_cost(&t, &exact_on_cleaned).unwrap() == opt {
            ceiling += 1;
        }
    }

    // supplementary: planted partitions with noise
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut planted_equal = 0;
    for case in 0..300u64 {
        let n = rng.gen_range(3..=8);
        let cfg = GeneratorConfig {
            n,
            k: rng.gen_range(1..=n),
            a: rng.gen_range(0.2..=1.0),
            b: rng.gen_range(0.0..0.3),
            seed: case,
        };
        let t = generate(&cfg).unwrap().triplets;
        if t.is_empty() {
            planted_equal += 1;
            continue;
        }
        let opt = brute_force_optimal_with_limit(&t, 8).unwrap().cost;
        if best_of_restarts(&t, opt, 1000 + case, &mut below) == opt {
            planted_equal += 1;
        }
    }

    let rate = equal as f64 / 300.0;
    let detail = format!(
        "uniform random triplets: equality rate {rate:.3} ({equal}/300), an exact minimizer of the \
         cleaned set is optimal on T for {ceiling}/300; planted+noise: {planted_equal}/300; \
         {} runs below optimum",
        below.len()
    );
    if !below.is_empty() || rate < 0.8 {
        Verdict::Fail(format!("{detail}; first: {:?}", below.first()))
    } else if rate < 0.9 {
        Verdict::Report(format!("{detail}; under the 0.9 target"))
    } else {
        Verdict::Pass(detail)
    }
}

/// LS-AD-VC rows for n = 160 and the given cells, repeats 0..10 each.
fn ls_ad_vc_rows(ks: &[usize], a: f64, noises: &[f64]) -> Vec<ExperimentRow> {
    let cfg = GridConfig {
        n_items: 160,
        ks: ks.to_vec(),
        fracs: vec![a],
        noises: noises.to_vec(),
        repeats: 10,
        variants: vec![Variant::LsAdVc],
        master_seed: 0,
        record_timing: false,
    };
    let mut tasks = Vec::new();
    for &k in ks {
        for &b in noises {
            for repeat in 0..10 {
                tasks.push(GridTask {
                    k,
                    a,
                    b,
                    repeat,
                    seed: tricc::evaluation::task_seed(0, k, a, b, repeat),
                });
            }
        }
    }
    std::thread::scope(|s| {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        let chunk = tasks.len().div_ceil(workers);
        let handles: Vec<_> = tasks
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().flat_map(|t| run_task(&cfg, t)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    })
}

fn mean(rows: &[&ExperimentRow], f: impl Fn(&ExperimentRow) -> f64) -> f64 {
    rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64
}

fn table_one() -> Verdict {
    let start = Instant::now();
    let ks = [2, 4, 8, 16];
    let noises = [0.0, 0.1, 0.2];
    let rows = ls_ad_vc_rows(&ks, 1.0, &noises);
    let mut ok = rows.iter().all(|r| r.error.is_empty());
    let mut cells = Vec::new();
    for &b in &noises {
        for &k in &ks {
            let cell: Vec<&ExperimentRow> = rows.iter().filter(|r| r.k == k && r.b == b).collect();
            let clusters = mean(&cell, |r| r.found_clusters as f64);
            let ari = mean(&cell, |r| r.ari);
            let good = if b == 0.0 {
                clusters == k as f64 && ari >= 0.95
            } else {
                (clusters - k as f64).abs() <= 1.0
            };
            ok &= good && cell.len() == 10;
            cells.push(format!("b={b} k={k}: {clusters:.1} clusters, ARI {ari:.3}"));
        }
    }
    let detail = format!("{}; {:.1?}", cells.join(" | "), start.elapsed());
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn noise_robustness() -> Verdict {
    let rows = ls_ad_vc_rows(&[8], 0.2, &[0.0, 0.2]);
    let ari = |b: f64| {
        let cell: Vec<&ExperimentRow> = rows.iter().filter(|r| r.b == b).collect();
        mean(&cell, |r| r.ari)
    };
    let (clean, noisy) = (ari(0.0), ari(0.2));
    let detail = format!("mean ARI {clean:.3} at b=0, {noisy:.3} at b=0.2");
    if rows.iter().all(|r| r.error.is_empty()) && (clean - noisy).abs() <= 0.1 {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn performance() -> Verdict {
    let truth = generate_ground_truth(100, 4).unwrap();
    let valid = enumerate_valid_triplets(&truth);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let drawn: Vec<Triplet> = (0..200_000)
        .map(|_| valid.triplets()[rng.gen_range(0..valid.len())])
        .collect();
    let t = apply_noise(&TripletSet::new(100, drawn).unwrap(), 0.2, 8).unwrap();
    let start = Instant::now();
    let r = run_variant(&t, Variant::LsAdVc, Some(0)).unwrap();
    let elapsed = start.elapsed();
    let ari = tricc::adjusted_rand_index(&r.clustering, &truth).unwrap();
    let detail = format!(
        "{} triplets, {} clusters, ARI {ari:.3}, {} removed, {elapsed:.2?}",
        t.len(),
        r.clustering.num_clusters(),
        r.removed_triplets
    );
    if elapsed < Duration::from_secs(60) {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn determinism() -> Verdict {
    let dir = tempfile::TempDir::new().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    fs::write(path("g.csv"), "a,b,+\nb,c,+\na,c,-\nc,d,-\n").unwrap();
    let commands: Vec<(Vec<String>, Vec<String>)> = vec![
        (
            "gen --items 60 --clusters 4 --frac 0.3 --noise 0.2 --seed 3 --out t.csv --truth gt.csv",
            vec!["t.csv", "gt.csv", "t.csv.json"],
        ),
        (
            "cluster --input t.csv --variant ls-ad-vc --seed 7 --output out.csv",
            vec!["out.csv"],
        ),
        ("cluster --input t.csv --variant ls-eq --seed 7 --output eq.csv", vec!["eq.csv"]),
        ("check --input t.csv --output clean.csv --seed 1", vec!["clean.csv"]),
        ("reduce --input g.csv --out r.csv --seed 1", vec!["r.csv"]),
        (
            "experiment --out grid.csv --summary grid.json --items 30 --ks 2,3 --fracs 0.3,1 \
             --noises 0,0.2 --repeats 2 --seed 9",
            vec!["grid.csv", "grid.json"],
        ),
    ]
    .into_iter()
    .map(|(cmd, files)| {
        let args = cmd
            .split_whitespace()
            .map(|a| if a.ends_with(".csv") || a.ends_with(".json") { path(a) } else { a.to_owned() })
            .collect();
        (args, files.into_iter().map(path).collect())
    })
    .collect();

    let run_all = || -> Result<Vec<Vec<u8>>, String> {
        let mut bytes = Vec::new();
        for (args, files) in &commands {
            let out = Command::new(env!("CARGO_BIN_EXE_tricc"))
                .args(args)
                .output()
                .map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
            }
            for f in files {
                bytes.push(fs::read(f).map_err(|e| format!("{f}: {e}"))?);
            }
        }
        Ok(bytes)
    };
    match (run_all(), run_all()) {
        (Ok(first), Ok(second)) => {
            let differing = first.iter().zip(&second).filter(|(a, b)| a != b).count();
            let detail = format!("{} commands, {} files compared, {differing} differ", commands.len(), first.len());
            if differing == 0 {
                Verdict::Pass(detail)
            } else {
                Verdict::Fail(detail)
            }
        }
        (Err(e), _) | (_, Err(e)) => Verdict::Fail(e),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 worked example", worked_example),
        ("2 cleanup invariants", cleanup_invariants),
        ("3 reduction equivalence", reduction_equivalence),
        ("4 oracle dominance", oracle_dominance),
        ("5 planted recovery", table_one),
        ("6 noise robustness", noise_robustness),
        ("7 performance", performance),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let line = match check() {
            Verdict::Pass(d) => format!("PASS criterion {name}: {d}"),
            Verdict::Report(d) => format!("PASS criterion {name} (report-only): {d}"),
            Verdict::Fail(d) => {
                failed += 1;
                format!("FAIL criterion {name}: {d}")
            }
        };
        println!("{line}");
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
