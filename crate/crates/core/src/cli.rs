//! Command-line front end. Every subcommand prints a human-readable table to
//! stdout and, with `--out`, writes CSV or JSON to a file.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::branching::branching_number;
use crate::error::{Error, ErrorKind, Result};
use crate::fpp::{fpp_report, sample_passage_times};
use crate::networks::{effective_conductance_spec, sample_environment};
use crate::percolation::{
    proof_percolation_fpp, proof_percolation_rwre, retention_probability_fpp, retention_probability_rwre,
    survival_monte_carlo, survival_probability,
};
use crate::ratecalc::{self, Distribution};
use crate::rng::{self, stream};
use crate::rwre::{classify, escape_probability, gw_flow_iterate};
use crate::trees::{build_truncation, TreeSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "treelab", version, about = "Random walks, networks and first-passage percolation on trees")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed; every random quantity is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write CSV/JSON output to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Level sizes, growth rate and branching number of a tree.
    Tree {
        #[arg(long)]
        tree: String,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Rate-function quantities of a finite-support law.
    Rate {
        #[arg(long)]
        dist: String,
        #[arg(long, value_enum, default_value = "p")]
        op: RateOp,
        /// Arguments for m, m-inverse, gamma and fractional-moment (list or lo:hi:step).
        #[arg(long)]
        at: Option<String>,
    },
    /// Transience/recurrence classification of the RWRE.
    Classify {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 20)]
        depth: u32,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Effective conductance from the root to the truncation frontier.
    Conductance {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        dist: String,
        #[arg(long, default_value = "10")]
        depths: String,
        #[arg(long, default_value_t = 1)]
        seeds: u32,
    },
    /// Population dynamics for the Galton-Watson flow fixed point.
    Flow {
        #[arg(long)]
        offspring: String,
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 1.0)]
        x: f64,
        #[arg(long, default_value_t = 50)]
        iters: u32,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Monte Carlo escape probabilities of the walk, one row per environment.
    Walk {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 10)]
        depth: u32,
        #[arg(long, default_value_t = 1)]
        envs: u32,
        #[arg(long, default_value_t = 500)]
        trials: u64,
    },
    /// First-passage percolation minima and level-set profiles.
    Fpp {
        #[arg(long)]
        tree: String,
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = 20)]
        depth: u32,
        #[arg(long, default_value_t = 1)]
        seeds: u32,
        #[arg(long, default_value = "0:2:0.1")]
        ygrid: String,
    },
    /// Bernoulli survival curves, or the threshold percolation of the proofs.
    Percolate {
        #[arg(long)]
        tree: String,
        #[arg(long, default_value = "0.5")]
        q: String,
        #[arg(long, default_value = "10")]
        depths: String,
        /// Monte Carlo trials alongside the exact recursion.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, value_enum)]
        proof: Option<ProofKind>,
        #[arg(long)]
        dist: Option<String>,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1.0)]
        y: f64,
        /// `eps` for the walk version, `M` for passage times.
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RateOp {
    P,
    Dual,
    M,
    MInverse,
    Gamma,
    FractionalMoment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProofKind {
    Rwre,
    Fpp,
}

/// Rendered result of one subcommand.
struct Output {
    table: String,
    json: Value,
    csv: String,
    default_format: Format,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code: 0 success, 2 configuration error, 3 resource cap,
/// 4 unsupported case.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                print!("{e}");
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand { 2 } else { 0 };
            }
            let text = e.to_string();
            let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
            eprintln!("treelab: {}", line.trim_start_matches("error: "));
            return 2;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("treelab: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.kind() {
        ErrorKind::Config => 2,
        ErrorKind::Resource => 3,
        ErrorKind::Unsupported => 4,
    }
}

fn execute(cli: Cli) -> Result<()> {
    let Common { seed, out, format, workers } = cli.common;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::arg("--workers must be at least 1"));
        }
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(|e| Error::ResourceCap(format!("thread pool: {e}")))?;
    let output = pool.install(|| dispatch(cli.command, seed))?;
    let fmt = format.unwrap_or(output.default_format);
    let rendered = match fmt {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&output.json)?;
            text.push('\n');
            text
        }
        Format::Csv => output.csv,
    };
    match (out, format) {
        (Some(path), _) => {
            std::fs::write(&path, rendered)?;
            print!("{}", output.table);
        }
        (None, Some(_)) => print!("{rendered}"),
        (None, None) => print!("{}", output.table),
    }
    Ok(())
}

fn dispatch(command: Command, seed: u64) -> Result<Output> {
    match command {
        Command::Tree { tree, depth, tol } => cmd_tree(&load_tree(&tree)?, depth, tol),
        Command::Rate { dist, op, at } => cmd_rate(&load_dist(&dist)?, op, at.as_deref()),
        Command::Classify { tree, dist, depth, tol } => cmd_classify(&load_tree(&tree)?, &load_dist(&dist)?, depth, tol),
        Command::Conductance { tree, dist, depths, seeds } => {
            cmd_conductance(&load_tree(&tree)?, &load_dist(&dist)?, &parse_u32_list(&depths)?, seeds, seed)
        }
        Command::Flow { offspring, dist, x, iters, samples } => {
            cmd_flow(&load_dist(&offspring)?, &load_dist(&dist)?, x, iters, samples, seed)
        }
        Command::Walk { tree, dist, depth, envs, trials } => {
            cmd_walk(&load_tree(&tree)?, &load_dist(&dist)?, depth, envs, trials, seed)
        }
        Command::Fpp { tree, dist, depth, seeds, ygrid } => {
            cmd_fpp(&load_tree(&tree)?, &load_dist(&dist)?, depth, seeds, &parse_grid(&ygrid)?, seed)
        }
        Command::Percolate { tree, q, depths, trials, proof, dist, k, y, bound } => {
            let spec = load_tree(&tree)?;
            let depths = parse_u32_list(&depths)?;
            match proof {
                None => cmd_survival(&spec, &parse_grid(&q)?, &depths, trials, seed),
                Some(kind) => {
                    let dist = dist.ok_or_else(|| Error::arg("--proof needs --dist"))?;
                    let depth = *depths.last().expect("non-empty list");
                    cmd_proof(&spec, &load_dist(&dist)?, kind, depth, k, y, bound, seed)
                }
            }
        }
    }
}

/// Inline JSON (starting with `{`) or a path to a JSON file.
fn read_source(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_string())
    } else {
        std::fs::read_to_string(Path::new(arg))
            .map_err(|e| Error::arg(format!("cannot read {arg}: {e}")))
    }
}

/// JSON spec or whitespace-separated parent list.
fn load_tree(arg: &str) -> Result<TreeSpec> {
    let text = read_source(arg)?;
    if text.trim_start().starts_with('{') {
        TreeSpec::from_json(&text)
    } else {
        TreeSpec::from_parent_list(&text)
    }
}

fn load_dist(arg: &str) -> Result<Distribution> {
    Ok(serde_json::from_str(&read_source(arg)?)?)
}

/// Comma-separated numbers or an inclusive `lo:hi:step` range.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::arg(format!("cannot parse grid {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let values = if parts.len() == 3 {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if !(step > 0.0) || !(hi >= lo) || ((hi - lo) / step) > 1e7 {
            return Err(bad());
        }
        let count = ((hi - lo) / step + 1e-9).floor() as u64;
        (0..=count).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect()
    } else if parts.len() == 1 {
        s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?
    } else {
        return Err(bad());
    };
    if values.is_empty() || values.iter().any(|v| v.is_nan()) {
        return Err(bad());
    }
    Ok(values)
}

fn parse_u32_list(s: &str) -> Result<Vec<u32>> {
    let values = s
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| Error::arg(format!("cannot parse list {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::arg("empty list"));
    }
    Ok(values)
}

fn with_schema(value: impl Serialize) -> Result<Value> {
    let mut value = serde_json::to_value(value)?;
    if let Value::Object(map) = &mut value {
        map.insert("schema".into(), json!(SCHEMA_VERSION));
    }
    Ok(value)
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn cmd_tree(spec: &TreeSpec, depth: u32, tol: f64) -> Result<Output> {
    let tree = build_truncation(spec, depth)?;
    let sizes = tree.level_sizes();
    let lineage = tree.lineage();
    let live: Vec<u64> = (0..=depth)
        .map(|k| tree.level(k).filter(|&v| lineage[v as usize]).count() as u64)
        .collect();
    let branching = if depth >= 4 { Some(branching_number(spec, depth, tol)?) } else { None };
    let growth = tree.growth_rate();
    let mut table = format!("vertices {}\ngrowth rate {growth}\n", tree.len());
    match &branching {
        Some(b) if b.exact.is_some() => {
            writeln!(table, "branching number {} (exact; estimate {})", b.exact.unwrap(), b.point).unwrap()
        }
        Some(b) => writeln!(table, "branching number {} in [{}, {}]{}", b.point, b.lo, b.hi, if b.inconclusive { " (inconclusive)" } else { "" }).unwrap(),
        None => table.push_str("branching number needs depth >= 4\n"),
    }
    table.push_str("depth  vertices      live\n");
    let mut csv = String::from("depth,vertices,live\n");
    for (k, (s, e)) in sizes.iter().zip(&live).enumerate() {
        writeln!(table, "{k:>5}  {s:>8}  {e:>8}").unwrap();
        writeln!(csv, "{k},{s},{e}").unwrap();
    }
    let json = with_schema(json!({
        "spec": spec,
        "depth": depth,
        "vertices": tree.len(),
        "level_sizes": sizes,
        "live": live,
        "growth_rate": growth,
        "branching": branching,
    }))?;
    Ok(Output { table, json, csv, default_format: Format::Json })
}

fn cmd_rate(law: &Distribution, op: RateOp, at: Option<&str>) -> Result<Output> {
    let args = || at.map(parse_grid).ok_or_else(|| Error::arg("this --op needs --at"))?;
    let (table, json, csv) = match op {
        RateOp::P => {
            let v = ratecalc::p_value(law)?;
            (
                format!("p = {}\nx* = {}\n", v.p, v.argmin),
                json!({"op": "p", "p": v.p, "argmin": v.argmin}),
                format!("op,p,argmin\np,{},{}\n", v.p, v.argmin),
            )
        }
        RateOp::Dual => {
            let v = ratecalc::dual_p(law)?;
            (
                format!("dual = {}\ny* = {}\n", v.value, v.argmax),
                json!({"op": "dual", "value": v.value, "argmax": v.argmax}),
                format!("op,value,argmax\ndual,{},{}\n", v.value, v.argmax),
            )
        }
        RateOp::M | RateOp::MInverse | RateOp::Gamma | RateOp::FractionalMoment => {
            let (name, f): (&str, fn(&Distribution, f64) -> Result<f64>) = match op {
                RateOp::M => ("m", ratecalc::rate_m),
                RateOp::MInverse => ("m_inverse", ratecalc::m_inverse),
                RateOp::Gamma => ("gamma", ratecalc::gamma),
                _ => ("fractional_moment", ratecalc::fractional_moment),
            };
            let rows = args()?.into_iter().map(|x| Ok((x, f(law, x)?))).collect::<Result<Vec<_>>>()?;
            let mut table = format!("{:>12}  {name}\n", "arg");
            let mut csv = String::from("op,arg,value\n");
            for (x, v) in &rows {
                writeln!(table, "{x:>12}  {v}").unwrap();
                writeln!(csv, "{name},{x},{v}").unwrap();
            }
            let values: Vec<Value> = rows.iter().map(|(x, v)| json!({"arg": x, "value": v})).collect();
            (table, json!({"op": name, "values": values}), csv)
        }
    };
    let mut json = json;
    json["law"] = serde_json::to_value(law)?;
    json["schema"] = json!(SCHEMA_VERSION);
    Ok(Output { table, json, csv, default_format: Format::Json })
}

fn cmd_classify(spec: &TreeSpec, law: &Distribution, depth: u32, tol: Option<f64>) -> Result<Output> {
    let report = classify(law, spec, depth, tol)?;
    let mut table = format!(
        "regime {:?}\ncriterion {}\np = {} (x* = {})\nbranching number {} in [{}, {}]\np·br = {}\n",
        report.regime,
        report.criterion.as_deref().unwrap_or("-"),
        report.p,
        report.p_argmin,
        report.branching.point,
        report.branching.lo,
        report.branching.hi,
        report.product,
    );
    if let Some(r) = report.boundary_resolution {
        writeln!(table, "boundary resolved as {r:?}").unwrap();
    }
    let mut csv = String::from("n,partial_sum,level_cut_sum\n");
    for n in 0..report.partial_sums.len().max(report.level_cut_sums.len()) {
        writeln!(
            csv,
            "{n},{},{}",
            opt(report.partial_sums.get(n).copied()),
            opt(report.level_cut_sums.get(n).copied())
        )
        .unwrap();
    }
    let json = with_schema(&report)?;
    Ok(Output { table, json, csv, default_format: Format::Json })
}

fn cmd_conductance(spec: &TreeSpec, law: &Distribution, depths: &[u32], seeds: u32, seed: u64) -> Result<Output> {
    if seeds == 0 {
        return Err(Error::arg("need at least one seed"));
    }
    let rows = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let s = rng::derive(seed, stream::REPLICATE, u64::from(i));
            Ok((s, effective_conductance_spec(spec, law, s, depths)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = String::from("replicate  depth  conductance\n");
    let mut csv = String::from("replicate,seed,depth,conductance\n");
    let mut replicates = Vec::new();
    for (i, (s, values)) in rows.iter().enumerate() {
        for (d, c) in depths.iter().zip(values) {
            writeln!(table, "{i:>9}  {d:>5}  {c}").unwrap();
            writeln!(csv, "{i},{s},{d},{c}").unwrap();
        }
        replicates.push(json!({"replicate": i, "seed": s, "conductance": values}));
    }
    let json = with_schema(json!({"spec": spec, "law": law, "depths": depths, "replicates": replicates}))?;
    Ok(Output { table, json, csv, default_format: Format::Csv })
}

fn cmd_flow(offspring: &Distribution, law: &Distribution, x: f64, iters: u32, samples: usize, seed: u64) -> Result<Output> {
    let report = gw_flow_iterate(law, offspring, x, iters, samples, seed)?;
    let mut table = format!("mp = {}\niteration  mean  stderr  residual\n", report.mp);
    let mut csv = String::from("iteration,mean,stderr,mean_capped,max,residual,residual_stderr\n");
    for it in &report.iterations {
        writeln!(table, "{:>9}  {}  {}  {}", it.iteration, it.mean, it.stderr, it.residual).unwrap();
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            it.iteration, it.mean, it.stderr, it.mean_capped, it.max, it.residual, it.residual_stderr
        )
        .unwrap();
    }
    let json = with_schema(&report)?;
    Ok(Output { table, json, csv, default_format: Format::Csv })
}

fn cmd_walk(spec: &TreeSpec, law: &Distribution, depth: u32, envs: u32, trials: u64, seed: u64) -> Result<Output> {
    if envs == 0 {
        return Err(Error::arg("need at least one environment"));
    }
    let tree = build_truncation(spec, depth)?;
    let rows = (0..envs)
        .into_par_iter()
        .map(|i| {
            let s = rng::derive(seed, stream::REPLICATE, u64::from(i));
            let env = sample_environment(&tree, law, s)?;
            Ok((s, escape_probability(&env, depth, trials, s)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = String::from("env  estimate  stderr  exact\n");
    let mut csv = String::from("env,seed,depth,trials,hits,estimate,stderr,exact\n");
    let mut list = Vec::new();
    for (i, (s, e)) in rows.iter().enumerate() {
        writeln!(table, "{i:>3}  {}  {}  {}", e.estimate, e.stderr, e.exact).unwrap();
        writeln!(csv, "{i},{s},{depth},{},{},{},{},{}", e.trials, e.hits, e.estimate, e.stderr, e.exact).unwrap();
        list.push(json!({"env": i, "seed": s, "escape": e}));
    }
    let mean = rows.iter().map(|(_, e)| e.estimate).sum::<f64>() / rows.len() as f64;
    writeln!(table, "mean escape {mean}").unwrap();
    let json = with_schema(json!({"spec": spec, "law": law, "depth": depth, "mean_escape": mean, "environments": list}))?;
    Ok(Output { table, json, csv, default_format: Format::Csv })
}

fn cmd_fpp(spec: &TreeSpec, law: &Distribution, depth: u32, seeds: u32, ygrid: &[f64], seed: u64) -> Result<Output> {
    let report = fpp_report(spec, law, depth, seeds, ygrid, seed)?;
    let mut table = format!(
        "branching number {}{}\npredicted rate {}\nreplicate  B_n\n",
        report.branching_number,
        if report.branching_exact { " (exact)" } else { "" },
        report.predicted_rate
    );
    let mut csv = String::from("seed,n,b_n,y,count,exponent\n");
    for (i, r) in report.replicates.iter().enumerate() {
        writeln!(table, "{i:>9}  {}", r.b_n).unwrap();
        for p in &r.points {
            writeln!(csv, "{},{},{},{},{},{}", r.seed, r.depth, r.b_n, p.y, p.count, opt(p.exponent)).unwrap();
        }
    }
    let json = with_schema(&report)?;
    Ok(Output { table, json, csv, default_format: Format::Csv })
}

fn cmd_survival(spec: &TreeSpec, qs: &[f64], depths: &[u32], trials: u64, seed: u64) -> Result<Output> {
    let mut table = String::from("q  depth  probability  monte_carlo\n");
    let mut csv = String::from("q,depth,probability,mc_estimate,mc_stderr\n");
    let mut rows = Vec::new();
    for &q in qs {
        for &n in depths {
            let exact = survival_probability(spec, q, n)?;
            let mc = if trials > 0 { Some(survival_monte_carlo(spec, q, n, trials, seed)?) } else { None };
            match mc {
                Some(m) => writeln!(table, "{q}  {n}  {exact}  {} ± {}", m.estimate, m.stderr).unwrap(),
                None => writeln!(table, "{q}  {n}  {exact}").unwrap(),
            }
            writeln!(csv, "{q},{n},{exact},{},{}", opt(mc.map(|m| m.estimate)), opt(mc.map(|m| m.stderr))).unwrap();
            rows.push(json!({"q": q, "depth": n, "probability": exact, "monte_carlo": mc}));
        }
    }
    let json = with_schema(json!({"spec": spec, "curves": rows}))?;
    Ok(Output { table, json, csv, default_format: Format::Csv })
}

#[allow(clippy::too_many_arguments)]
fn cmd_proof(spec: &TreeSpec, law: &Distribution, kind: ProofKind, depth: u32, k: u32, y: f64, bound: f64, seed: u64) -> Result<Output> {
    let tree = build_truncation(spec, depth)?;
    let (result, exact) = match kind {
        ProofKind::Rwre => {
            let env = sample_environment(&tree, law, seed)?;
            let (_, r) = proof_percolation_rwre(&env, k, y, bound)?;
            (r, retention_probability_rwre(law, k, y, bound).ok())
        }
        ProofKind::Fpp => {
            let sample = sample_passage_times(&tree, law, seed)?;
            let (_, r) = proof_percolation_fpp(&sample, k, y, bound)?;
            (r, retention_probability_fpp(law, k, y, bound).ok())
        }
    };
    let table = format!(
        "kept {} of {} edges\nq_hat = {} ± {}\nexact retention {}\nsurvives {}\n",
        result.kept,
        result.edges,
        result.q_hat,
        result.stderr,
        exact.map(|e| e.to_string()).unwrap_or_else(|| "-".into()),
        result.survives
    );
    let csv = format!(
        "k,y,bound,depth,edges,kept,q_hat,stderr,exact,survives\n{k},{y},{bound},{depth},{},{},{},{},{},{}\n",
        result.edges,
        result.kept,
        result.q_hat,
        result.stderr,
        opt(exact),
        result.survives
    );
    let json = with_schema(json!({
        "k": k, "y": y, "bound": bound, "depth": depth,
        "edges": result.edges, "kept": result.kept,
        "q_hat": result.q_hat, "stderr": result.stderr,
        "exact": exact, "survives": result.survives,
    }))?;
    Ok(Output { table, json, csv, default_format: Format::Json })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:2:0.1").unwrap().len(), 21);
        assert_eq!(parse_grid("0:2:0.1").unwrap()[3], 0.3);
        assert_eq!(parse_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("a").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["treelab", "--bogus"]), 2);
        assert_eq!(run(["treelab", "rate", "--dist", "{\"support\":[1],\"weights\":[2]}"]), 2);
        assert_eq!(run(["treelab", "rate", "--dist", "{\"support\":[0.5,2],\"weights\":[0.5,0.5]}"]), 0);
    }
}
