//! Config-driven front end for the threshold-mechanism library: Monte Carlo
//! simulation, exact evaluation, and structural certificates (rank axioms,
//! activation-polytope membership, partitions, bounded-load orientations).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mprophet_core::config::{ExperimentConfig, MatroidSpec, MechanismSpec};
use mprophet_core::exante::{estimate_ex_ante, ExAnteRelaxation};
use mprophet_core::harness::{
    exact_evaluate, simulate, ExactReport, OrderStrategy, SimOptions, SimulationReport,
};
use mprophet_core::matroid::{Matroid, MatroidKind};
use mprophet_core::orient::{build_hypergraph, indegree_loads, orient_graph, orient_hypergraph};
use mprophet_core::partition::{partition_into, PartitionOutcome};
use mprophet_core::rng::stream;
use mprophet_core::ItemSet;
use rand::Rng;
use serde::Deserialize;

const HELP_FOOTER: &str = "\
CSV reports use this fixed column order:
  instance,mechanism,order,trials,seed,gambler_mean,gambler_stderr,
  prophet_mean,prophet_stderr,ratio,claimed_alpha,verdict
(`exact` puts the enumerated state count in the trials column and zeroes
both stderr columns.)

Environment:
  MP_THREADS    worker count for the simulation trial loop

Exit codes:
  0  every requested verdict and validation passed
  1  a guarantee verdict or structural invariant failed
  2  unreadable, malformed, or oversized input";

#[derive(Parser)]
#[command(
    name = "mprophet",
    version,
    about = "Threshold mechanisms for matroid prophet problems",
    after_help = HELP_FOOTER
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo run of a configured mechanism; reports the empirical
    /// gambler/prophet ratio and checks it against the claimed guarantee.
    Simulate(RunArgs),
    /// Exact expectation over all value realizations, mechanism draws, and
    /// (optionally) all arrival orders.  Finite supports only.
    Exact(RunArgs),
    /// Structural validation without simulation: rank axioms, activation
    /// polytope, mechanism-specific certificates.
    Check {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
    },
    /// Split the ground set into independent sets, or print a density
    /// witness showing no such cover exists.
    Partition {
        /// Config whose "matroid" block names the instance.
        #[arg(long)]
        config: PathBuf,
        /// Number of parts.
        #[arg(long)]
        k: usize,
    },
    /// Orient edges (or representation columns) so every vertex carries
    /// bounded fractional indegree under the given weights.
    Orient {
        /// Config whose "matroid" block names the instance.
        #[arg(long)]
        config: PathBuf,
        /// JSON array of per-element weights in [0, 1]; defaults to all ones.
        #[arg(long)]
        probs: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the arrival order: uniform, adversarial, exhaustive, or
    /// fixed:2,0,1.
    #[arg(long)]
    order: Option<String>,
    /// Report destination; a .json or .csv path picks one format, any other
    /// path writes both <path>.json and <path>.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Stdout format.
    #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
    format: String,
}

enum CmdError {
    /// Unreadable or malformed input: exit 2.
    Input(String),
    /// A verdict or invariant failed on well-formed input: exit 1.
    Fail(String),
}

type CmdResult = Result<(), CmdError>;

fn input(e: impl std::fmt::Display) -> CmdError {
    CmdError::Input(e.to_string())
}

fn fail(e: impl std::fmt::Display) -> CmdError {
    CmdError::Fail(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Exact(args) => cmd_exact(args),
        Command::Check { config } => cmd_check(config),
        Command::Partition { config, k } => cmd_partition(config, *k),
        Command::Orient { config, probs } => cmd_orient(config, probs.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Fail(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(1)
        }
        Err(CmdError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_file(path: &Path) -> Result<String, CmdError> {
    fs::read_to_string(path)
        .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<ExperimentConfig, CmdError> {
    ExperimentConfig::from_json(&read_file(path)?).map_err(input)
}

fn instance_label(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string()
}

fn mech_label(spec: &MechanismSpec) -> &'static str {
    match spec {
        MechanismSpec::Single => "single",
        MechanismSpec::Graphic { .. } => "graphic",
        MechanismSpec::KSparse { .. } => "ksparse",
        MechanismSpec::Cographic => "cographic",
        MechanismSpec::Cographic3ec => "cographic3ec",
        MechanismSpec::Gamma { .. } => "gamma",
        MechanismSpec::Composed { .. } => "composed",
    }
}

fn order_label(s: &OrderStrategy) -> &'static str {
    match s {
        OrderStrategy::Fixed(_) => "fixed",
        OrderStrategy::UniformRandom => "uniform",
        OrderStrategy::AdversarialPool => "adversarial",
        OrderStrategy::Exhaustive => "exhaustive",
    }
}

fn parse_order(s: &str) -> Result<OrderStrategy, CmdError> {
    match s {
        "uniform" => Ok(OrderStrategy::UniformRandom),
        "adversarial" => Ok(OrderStrategy::AdversarialPool),
        "exhaustive" => Ok(OrderStrategy::Exhaustive),
        _ => match s.strip_prefix("fixed:") {
            Some(rest) => {
                let mut perm = Vec::new();
                for tok in rest.split(',') {
                    let pos = tok.trim().parse::<usize>().map_err(|_| {
                        CmdError::Input(format!("bad position {tok:?} in fixed order"))
                    })?;
                    perm.push(pos);
                }
                Ok(OrderStrategy::Fixed(perm))
            }
            None => Err(CmdError::Input(format!(
                "unknown order strategy {s:?}; use uniform, adversarial, exhaustive, or fixed:2,0,1"
            ))),
        },
    }
}

fn thread_override() -> Result<Option<usize>, CmdError> {
    match std::env::var("MP_THREADS") {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CmdError::Input(format!(
                "MP_THREADS must be a positive integer, got {raw:?}"
            ))),
        },
    }
}

fn apply_overrides(cfg: &mut ExperimentConfig, args: &RunArgs) {
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
}

fn resolve_order(cfg: &ExperimentConfig, args: &RunArgs) -> Result<OrderStrategy, CmdError> {
    match &args.order {
        Some(s) => parse_order(s),
        None => Ok(cfg.order.build()),
    }
}

fn to_json<T: serde::Serialize>(report: &T) -> Result<String, CmdError> {
    serde_json::to_string_pretty(report)
        .map(|s| s + "\n")
        .map_err(input)
}

const CSV_HEADER: &str = "instance,mechanism,order,trials,seed,gambler_mean,gambler_stderr,\
prophet_mean,prophet_stderr,ratio,claimed_alpha,verdict";

fn sim_csv(instance: &str, mechanism: &str, r: &SimulationReport) -> String {
    format!(
        "{CSV_HEADER}\n{instance},{mechanism},{},{},{},{},{},{},{},{},{},{}\n",
        r.order_strategy,
        r.trials,
        r.seed,
        r.gambler_mean,
        r.gambler_stderr,
        r.prophet_mean,
        r.prophet_stderr,
        r.ratio,
        r.claimed_alpha,
        r.verdict
    )
}

fn exact_csv(instance: &str, mechanism: &str, order: &str, seed: u64, r: &ExactReport) -> String {
    format!(
        "{CSV_HEADER}\n{instance},{mechanism},{order},{},{seed},{},0,{},0,{},{},{}\n",
        r.states, r.gambler, r.prophet, r.ratio, r.claimed_alpha, r.verdict
    )
}

/// Writes the report to `--out` (falling back to the config's `out` stem) and
/// prints the `--format` flavor to stdout.
fn emit(args: &RunArgs, cfg: &ExperimentConfig, json: &str, csv: &str) -> CmdResult {
    let dest = args
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));
    if let Some(path) = dest {
        write_reports(&path, json, csv)?;
    }
    match args.format.as_str() {
        "csv" => print!("{csv}"),
        _ => print!("{json}"),
    }
    Ok(())
}

fn write_reports(path: &Path, json: &str, csv: &str) -> CmdResult {
    let write = |p: PathBuf, body: &str| {
        fs::write(&p, body).map_err(|e| CmdError::Input(format!("cannot write {}: {e}", p.display())))
    };
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => write(path.to_path_buf(), json),
        Some("csv") => write(path.to_path_buf(), csv),
        _ => {
            write(PathBuf::from(format!("{}.json", path.display())), json)?;
            write(PathBuf::from(format!("{}.csv", path.display())), csv)
        }
    }
}

fn cmd_simulate(args: &RunArgs) -> CmdResult {
    let mut cfg = load_config(&args.config)?;
    apply_overrides(&mut cfg, args);
    let (m, dists) = cfg.build_instance().map_err(input)?;
    let mech = cfg.build_mechanism(&m, &dists).map_err(input)?;
    let strategy = resolve_order(&cfg, args)?;
    let opts = SimOptions {
        trials: cfg.trials,
        seed: cfg.seed,
        threads: thread_override()?,
        activation_probs: None,
    };
    let report = simulate(&m, &dists, &mech, &strategy, &opts).map_err(input)?;
    let json = to_json(&report)?;
    let csv = sim_csv(&instance_label(&args.config), mech_label(&cfg.mechanism), &report);
    emit(args, &cfg, &json, &csv)?;
    if report.verdict {
        Ok(())
    } else {
        Err(fail(format!(
            "empirical ratio {:.4} fell short of the claimed guarantee 1/{}",
            report.ratio, report.claimed_alpha
        )))
    }
}

fn cmd_exact(args: &RunArgs) -> CmdResult {
    let mut cfg = load_config(&args.config)?;
    apply_overrides(&mut cfg, args);
    let (m, dists) = cfg.build_instance().map_err(input)?;
    let mech = cfg.build_mechanism(&m, &dists).map_err(input)?;
    let strategy = resolve_order(&cfg, args)?;
    let report = exact_evaluate(&m, &dists, &mech, &strategy).map_err(input)?;
    let json = to_json(&report)?;
    let csv = exact_csv(
        &instance_label(&args.config),
        mech_label(&cfg.mechanism),
        order_label(&strategy),
        cfg.seed,
        &report,
    );
    emit(args, &cfg, &json, &csv)?;
    if report.verdict {
        Ok(())
    } else {
        Err(fail(format!(
            "exact ratio {:.6} fell short of the claimed guarantee 1/{}",
            report.ratio, report.claimed_alpha
        )))
    }
}

fn fmt_items(s: &ItemSet) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn cmd_check(config: &Path) -> CmdResult {
    let cfg = load_config(config)?;
    // Past this point the file parsed; everything else is a semantic defect.
    let (m, dists) = cfg.build_instance().map_err(fail)?;
    println!(
        "instance: {} elements, rank {}",
        m.size(),
        m.rank_set(&m.ground())
    );
    check_axioms(&m)?;
    let relax_trials = cfg.trials.clamp(500, 4_000);
    let relax = estimate_ex_ante(&m, &dists, relax_trials, cfg.seed).map_err(fail)?;
    check_polytope(&m, &relax, cfg.seed)?;
    let mech = cfg.build_mechanism(&m, &dists).map_err(fail)?;
    println!(
        "mechanism: {} built, guarantee 1/{}",
        mech_label(&cfg.mechanism),
        mech.claimed_ratio()
    );
    check_mechanism_extras(&cfg, &m, &relax)?;
    println!("check passed");
    Ok(())
}

/// Exhaustive rank-axiom sweep on instances small enough to enumerate.
fn check_axioms(m: &Matroid) -> CmdResult {
    let n = m.size();
    if n > 12 {
        println!("rank axioms: skipped ({n} elements is past the exhaustive sweep)");
        return Ok(());
    }
    let full = 1usize << n;
    let mut rank = vec![0usize; full];
    for (mask, slot) in rank.iter_mut().enumerate() {
        *slot = m.rank_set(&ItemSet::from_bits(mask as u64, n));
    }
    if rank[0] != 0 {
        return Err(fail("rank of the empty set is not zero"));
    }
    for mask in 0..full {
        let set = || fmt_items(&ItemSet::from_bits(mask as u64, n));
        if rank[mask] > (mask as u64).count_ones() as usize {
            return Err(fail(format!("rank exceeds cardinality on {}", set())));
        }
        for e in 0..n {
            if mask & (1 << e) != 0 {
                continue;
            }
            let we = mask | (1 << e);
            if rank[we] < rank[mask] || rank[we] > rank[mask] + 1 {
                return Err(fail(format!(
                    "adding element {e} to {} changed the rank from {} to {}",
                    set(),
                    rank[mask],
                    rank[we]
                )));
            }
            for f in (e + 1)..n {
                if mask & (1 << f) != 0 {
                    continue;
                }
                let wf = mask | (1 << f);
                let wef = we | (1 << f);
                if rank[we] + rank[wf] < rank[wef] + rank[mask] {
                    return Err(fail(format!(
                        "submodularity fails on {} with elements {e} and {f}",
                        set()
                    )));
                }
            }
        }
    }
    println!("rank axioms: verified on all {full} subsets");
    Ok(())
}

/// Spot checks Σ_{i∈S} p_i ≤ rank(S) on singletons, the full ground set, and
/// a seeded batch of random subsets.
fn check_polytope(m: &Matroid, relax: &ExAnteRelaxation, seed: u64) -> CmdResult {
    let n = m.size();
    let slack: f64 = relax.stderr.iter().sum::<f64>() * 3.0 + 1e-9;
    let audit = |s: &ItemSet| -> CmdResult {
        let mass: f64 = s.iter().map(|i| relax.p[i]).sum();
        let r = m.rank_set(s) as f64;
        if mass > r + slack {
            return Err(fail(format!(
                "activation mass {mass:.4} exceeds rank {r} on {}",
                fmt_items(s)
            )));
        }
        Ok(())
    };
    for i in 0..n {
        audit(&ItemSet::singleton(i))?;
    }
    audit(&m.ground())?;
    let random_subsets = 200;
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut rng = stream(seed, "check", 0);
    for _ in 0..random_subsets {
        audit(&ItemSet::from_bits(rng.gen::<u64>() & all, n))?;
    }
    println!(
        "activation polytope: {} spot checks passed (slack {slack:.2e})",
        n + 1 + random_subsets
    );
    Ok(())
}

/// Mechanism-specific certificates beyond what construction already proved.
fn check_mechanism_extras(cfg: &ExperimentConfig, m: &Matroid, relax: &ExAnteRelaxation) -> CmdResult {
    match &cfg.mechanism {
        MechanismSpec::Graphic { .. } => {
            let g = match (m.kind(), m.graph()) {
                (MatroidKind::Graphic, Some(g)) => g,
                _ => return Err(fail("the forest rule needs a graphic instance")),
            };
            let head = orient_graph(g, &relax.p).map_err(fail)?;
            let hyperedges = edge_hyperedges(g.edges());
            let loads = indegree_loads(&hyperedges, g.vertex_count(), &head, &relax.p);
            let max = loads.iter().cloned().fold(0.0, f64::max);
            if max > 2.0 + 1e-6 {
                return Err(fail(format!("orientation load {max:.4} exceeds the bound 2")));
            }
            println!("orientation: maximum vertex load {max:.4} within the bound 2");
        }
        MechanismSpec::KSparse { k, .. } => {
            let rep = m
                .representation()
                .ok_or_else(|| fail("the sparse-column rule needs a vector representation"))?;
            for t in 0..rep.cols() {
                let w = (0..rep.rows()).filter(|&i| rep.get(i, t) != 0).count();
                if w > *k {
                    return Err(fail(format!(
                        "column {t} has {w} nonzero entries, above the declared sparsity {k}"
                    )));
                }
            }
            println!("column sparsity: every column has at most {k} nonzero entries");
        }
        MechanismSpec::Gamma { gamma } => match partition_into(m, *gamma).map_err(fail)? {
            PartitionOutcome::Feasible(p) => {
                println!(
                    "density: ground set covered by {} independent sets",
                    p.parts.len()
                );
            }
            PartitionOutcome::Infeasible { witness } => {
                return Err(fail(match witness {
                    Some(s) => format!(
                        "no cover by {gamma} independent sets: {} has {} elements but rank {}",
                        fmt_items(&s),
                        s.len(),
                        m.rank_set(&s)
                    ),
                    None => format!("no cover by {gamma} independent sets exists"),
                }));
            }
        },
        _ => {}
    }
    Ok(())
}

fn edge_hyperedges(edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    edges
        .iter()
        .map(|&(u, v)| if u == v { vec![u] } else { vec![u, v] })
        .collect()
}

/// Lenient instance wrapper so both bare `{"matroid": …}` documents and full
/// experiment configs feed the certificate commands.
#[derive(Deserialize)]
struct InstanceDoc {
    matroid: MatroidSpec,
}

fn load_instance(path: &Path) -> Result<Matroid, CmdError> {
    let doc: InstanceDoc = serde_json::from_str(&read_file(path)?)
        .map_err(|e| CmdError::Input(format!("config: {e}")))?;
    doc.matroid.build().map_err(input)
}

fn cmd_partition(config: &Path, k: usize) -> CmdResult {
    let m = load_instance(config)?;
    match partition_into(&m, k).map_err(input)? {
        PartitionOutcome::Feasible(p) => {
            let mut covered = p.uncoverable.clone();
            for (i, part) in p.parts.iter().enumerate() {
                if m.rank_set(part) != part.len() {
                    return Err(fail(format!("part {i} is not independent")));
                }
                if !covered.is_disjoint_from(part) {
                    return Err(fail(format!("part {i} overlaps an earlier part")));
                }
                covered = covered.union(part);
                println!("part {i}: {} ({} elements)", fmt_items(part), part.len());
            }
            if covered != m.ground() {
                return Err(fail("parts and loops do not cover the ground set"));
            }
            if !p.uncoverable.is_empty() {
                println!("loops left aside: {}", fmt_items(&p.uncoverable));
            }
            println!("partition into {k} independent sets: verified");
            Ok(())
        }
        PartitionOutcome::Infeasible { witness } => Err(fail(match witness {
            Some(s) => {
                let dense = s.iter().filter(|&i| !m.is_loop(i)).count();
                format!(
                    "no cover by {k} independent sets: witness {} has {dense} non-loop elements but {k}·rank = {}",
                    fmt_items(&s),
                    k * m.rank_set(&s)
                )
            }
            None => format!("no cover by {k} independent sets exists"),
        })),
    }
}

fn cmd_orient(config: &Path, probs: Option<&Path>) -> CmdResult {
    let m = load_instance(config)?;
    let p: Vec<f64> = match probs {
        Some(path) => serde_json::from_str(&read_file(path)?)
            .map_err(|e| CmdError::Input(format!("weights: {e}")))?,
        None => vec![1.0; m.size()],
    };
    if p.len() != m.size() {
        return Err(input(format!(
            "got {} weights for {} elements",
            p.len(),
            m.size()
        )));
    }
    let (kind, hyperedges, vertex_count, head, bound) = match m.kind() {
        MatroidKind::Graphic => {
            let g = m.graph().expect("graphic instances carry their graph");
            let head = orient_graph(g, &p).map_err(fail)?;
            ("edge", edge_hyperedges(g.edges()), g.vertex_count(), head, 2.0)
        }
        MatroidKind::Vector => {
            let hyperedges = build_hypergraph(&m).map_err(input)?;
            let rows = m
                .representation()
                .expect("vector instances carry their representation")
                .rows();
            let k = hyperedges.iter().map(Vec::len).max().unwrap_or(1);
            let head = orient_hypergraph(&hyperedges, rows, &p, k).map_err(fail)?;
            ("column", hyperedges, rows, head, k as f64)
        }
        _ => {
            return Err(input(
                "orientation needs a graphic instance or a vector representation",
            ));
        }
    };
    for (e, &h) in head.iter().enumerate() {
        let ends: Vec<String> = hyperedges[e].iter().map(|v| v.to_string()).collect();
        println!("{kind} {e} ({}) -> {h}", ends.join(", "));
    }
    let loads = indegree_loads(&hyperedges, vertex_count, &head, &p);
    for (v, load) in loads.iter().enumerate() {
        println!("load[{v}] = {load}");
    }
    let max = loads.iter().cloned().fold(0.0, f64::max);
    if max > bound + 1e-9 {
        return Err(fail(format!("maximum load {max} exceeds the bound {bound}")));
    }
    println!("maximum load {max} within the bound {bound}");
    Ok(())
}
