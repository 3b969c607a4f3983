//! Command implementations behind the `tricc` binary.
//!
//! Every command returns a JSON-serializable report; `main` prints it to
//! standard output. All randomness comes from `--seed` (default 0).

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use tricc::evaluation::{run_experiment_grid, summarize, GridConfig};
use tricc::io::{read_cc_instance, read_clustering, read_triplets, write_clustering, write_triplets};
use tricc::synthgen::{generate, reduce_cc_to_triplets, GeneratorConfig};
use tricc::{
    adjusted_rand_index, build_constraint_graph, local_search, make_consistent, triplet_cost,
    ItemUniverse, Sign, Variant,
};

#[derive(Debug, Parser)]
#[command(name = "tricc", version, about = "Clustering from triplet comparisons")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster the items of a triplet file.
    Cluster(ClusterArgs),
    /// Generate triplets from a planted clustering.
    Gen(GenArgs),
    /// Adjusted Rand index between two clustering files.
    Eval(EvalArgs),
    /// Constraint-graph statistics of a triplet file.
    Check(CheckArgs),
    /// Turn an unweighted signed graph into an equivalent triplet file.
    Reduce(ReduceArgs),
    /// Run the synthetic experiment grid.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "ls-ad-vc")]
    pub variant: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sweep items in ascending order instead of a seeded shuffle.
    #[arg(long)]
    pub ordered_sweep: bool,
    #[arg(long, default_value_t = tricc::solvers::DEFAULT_MAX_PASSES)]
    pub max_passes: usize,
    /// The input's first line is a header.
    #[arg(long)]
    pub header: bool,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub items: usize,
    #[arg(long)]
    pub clusters: usize,
    /// Fraction of the valid triplets to keep.
    #[arg(long, default_value_t = 1.0)]
    pub frac: f64,
    /// Fraction of kept triplets to corrupt.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Where to echo the generator config; defaults to `<out>.json`.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    /// Accepted for uniformity; evaluation is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub header: bool,
    /// Also write the consistent subset of the triplets here.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Accepted for uniformity; the cleanup is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Signed graph, `u,v,sign[,weight]` per line.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub header: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Accepted for uniformity; the reduction is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Per-cell means as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, default_value_t = 160)]
    pub items: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16")]
    pub ks: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.005,0.01,0.02,0.05,0.1,0.2,0.5,1.0")]
    pub fracs: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2")]
    pub noises: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, value_delimiter = ',', default_value = "ls-eq,ls-ad,ls-eq-vc,ls-ad-vc")]
    pub variants: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record wall-clock runtimes (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
}

/// Report printed by `cluster`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub n_items: usize,
    pub n_triplets: usize,
    pub n_removed: usize,
    pub n_clusters: usize,
    pub cost: u64,
    pub variant: Variant,
    pub seed: u64,
    pub converged: bool,
    pub passes: usize,
    pub runtime_ms: u64,
}

pub fn run(cli: &Cli) -> Result<Value> {
    Ok(match &cli.command {
        Command::Cluster(a) => serde_json::to_value(cmd_cluster(a)?)?,
        Command::Gen(a) => cmd_gen(a)?,
        Command::Eval(a) => cmd_eval(a)?,
        Command::Check(a) => cmd_check(a)?,
        Command::Reduce(a) => cmd_reduce(a)?,
        Command::Experiment(a) => cmd_experiment(a)?,
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn load_triplets(path: &Path, header: bool) -> Result<(ItemUniverse, tricc::TripletSet)> {
    read_triplets(open(path)?, header).with_context(|| format!("reading {}", path.display()))
}

pub fn cmd_cluster(args: &ClusterArgs) -> Result<RunReport> {
    let variant: Variant = args.variant.parse()?;
    let (universe, triplets) = load_triplets(&args.input, args.header)?;
    if universe.is_empty() {
        bail!("{} contains no triplets", args.input.display());
    }
    let mut cfg = variant.config((!args.ordered_sweep).then_some(args.seed));
    cfg.max_passes = args.max_passes;

    let start = Instant::now();
    let result = local_search(&triplets, &cfg)?;
    let runtime_ms = start.elapsed().as_millis() as u64;

    let cost = triplet_cost(&triplets, &result.clustering)?;
    debug_assert_eq!(cost, result.cost);
    write_clustering(create(&args.output)?, &universe, &result.clustering)?;
    Ok(RunReport {
        n_items: universe.len(),
        n_triplets: triplets.len(),
        n_removed: result.removed_triplets,
        n_clusters: result.clustering.num_clusters(),
        cost,
        variant,
        seed: args.seed,
        converged: result.converged,
        passes: result.passes,
        runtime_ms,
    })
}

pub fn cmd_gen(args: &GenArgs) -> Result<Value> {
    let cfg = GeneratorConfig {
        n: args.items,
        k: args.clusters,
        a: args.frac,
        b: args.noise,
        seed: args.seed,
    };
    let data = generate(&cfg)?;
    let universe = ItemUniverse::numbered(args.items);
    write_triplets(create(&args.out)?, &universe, &data.triplets)?;
    write_clustering(create(&args.truth)?, &universe, &data.truth)?;

    let sidecar = args.config.clone().unwrap_or_else(|| {
        let mut p = args.out.clone().into_os_string();
        p.push(".json");
        p.into()
    });
    let report = json!({
        "config": cfg,
        "n_items": args.items,
        "n_triplets": data.triplets.len(),
        "triplets": args.out,
        "truth": args.truth,
        "sidecar": sidecar,
    });
    let mut w = create(&sidecar)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()?;
    Ok(report)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<Value> {
    let pred = read_clustering(open(&args.pred)?).with_context(|| format!("reading {}", args.pred.display()))?;
    let truth =
        read_clustering(open(&args.truth)?).with_context(|| format!("reading {}", args.truth.display()))?;
    let aligned = pred.aligned_to(&truth.universe)?;
    let ari = adjusted_rand_index(&aligned, &truth.clustering)?;
    Ok(json!({
        "ari": ari,
        "n_items": truth.universe.len(),
        "pred_clusters": aligned.num_clusters(),
        "truth_clusters": truth.clustering.num_clusters(),
    }))
}

pub fn cmd_check(args: &CheckArgs) -> Result<Value> {
    let (universe, triplets) = load_triplets(&args.input, args.header)?;
    let graph = build_constraint_graph(&triplets);
    let cleaned = make_consistent(&triplets);
    if let Some(path) = &args.output {
        write_triplets(create(path)?, &universe, &cleaned.triplets)?;
    }
    Ok(json!({
        "n_items": universe.len(),
        "n_triplets": triplets.len(),
        "conflicting_pairs": graph.conflicts().len(),
        "implicit_edges": graph.n_edges(),
        "cover_size_raw": cleaned.raw_cover_size,
        "cover_size_pruned": cleaned.removed.len(),
        "n_consistent": cleaned.triplets.len(),
    }))
}

pub fn cmd_reduce(args: &ReduceArgs) -> Result<Value> {
    let (universe, graph) = read_cc_instance(open(&args.input)?, args.header)
        .with_context(|| format!("reading {}", args.input.display()))?;
    let reduction = reduce_cc_to_triplets(&graph)?;

    let mut names = universe.clone();
    for &((u, v), sign) in &reduction.dummies {
        let (lu, lv) = (universe.label(u).unwrap(), universe.label(v).unwrap());
        let mut name = match sign {
            Sign::Plus => format!("x^{{{lu},{lv}}}"),
            Sign::Minus => format!("{lu}'_{{{lv}}}"),
        };
        while names.index_of(&name).is_some() {
            name.push('~');
        }
        names.intern(&name);
    }
    write_triplets(create(&args.out)?, &names, &reduction.triplets)?;
    Ok(json!({
        "real_items": reduction.real_items,
        "dummy_items": reduction.dummies.len(),
        "n_triplets": reduction.triplets.len(),
        "plus_edges": graph.plus_edges().count(),
        "minus_edges": graph.minus_edges().count(),
    }))
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<Value> {
    let variants = args
        .variants
        .iter()
        .map(|v| v.parse::<Variant>())
        .collect::<tricc::Result<Vec<_>>>()?;
    let cfg = GridConfig {
        n_items: args.items,
        ks: args.ks.clone(),
        fracs: args.fracs.clone(),
        noises: args.noises.clone(),
        repeats: args.repeats,
        variants,
        master_seed: args.seed,
        record_timing: args.timing,
    };
    let rows = run_experiment_grid(&cfg);
    let mut w = csv::Writer::from_writer(create(&args.out)?);
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;

    let cells = summarize(&rows);
    if let Some(path) = &args.summary {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &json!({ "grid": cfg, "cells": cells }))?;
        writeln!(w)?;
        w.flush()?;
    }
    Ok(json!({
        "rows": rows.len(),
        "cells": cells.len(),
        "failures": rows.iter().filter(|r| !r.error.is_empty()).count(),
        "out": args.out,
        "summary": args.summary,
    }))
}
