//! The generate / solve / oracle / verify subcommands.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::Args;

use moip::epp::run_epp_with;
use moip::fileio;
use moip::instgen::{self, Family, GenSpec};
use moip::ipsolve::IpTally;
use moip::model::{MoipInstance, ObjectiveVector};
use moip::oiplex::Permutation;
use moip::oracle::enumerate_front;
use moip::recursion::{run_aira_with, SolveStats};
use moip::sharing::{run_parallel_with, ParallelOptions, Strategy};
use moip::{Error, Result};

use crate::{EXIT_MISMATCH, EXIT_OK};

/// Front algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Aira,
    Epp,
    Cluster,
    Spread,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Aira => "aira",
            Algorithm::Epp => "epp",
            Algorithm::Cluster => "cluster",
            Algorithm::Spread => "spread",
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "aira" => Ok(Algorithm::Aira),
            "epp" => Ok(Algorithm::Epp),
            "cluster" => Ok(Algorithm::Cluster),
            "spread" => Ok(Algorithm::Spread),
            other => Err(Error::Invalid(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// Everything a solve run reports.
pub struct RunReport {
    pub algorithm: Algorithm,
    pub threads: usize,
    pub instance: String,
    pub front_size: usize,
    pub stats: SolveStats,
    pub perms: Option<Vec<Permutation>>,
}

impl RunReport {
    pub fn to_kv_block(&self) -> String {
        let mut out = format!(
            "algorithm={}\nthreads={}\ninstance={}\nfront_size={}\n",
            self.algorithm.name(),
            self.threads,
            self.instance,
            self.front_size
        );
        out.push_str(&self.stats.to_kv_block());
        if let Some(perms) = &self.perms {
            let rendered: Vec<String> = perms
                .iter()
                .map(|p| {
                    p.images()
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            out.push_str(&format!("perms={}\n", rendered.join(";")));
        }
        out
    }
}

/// Run one algorithm on an instance; the front comes back in canonical
/// order.
pub fn run_algorithm(
    inst: &MoipInstance,
    algorithm: Algorithm,
    threads: usize,
    share: bool,
    perms_override: Option<Vec<Permutation>>,
    deadline: Option<Instant>,
) -> Result<(Vec<ObjectiveVector>, SolveStats, Option<Vec<Permutation>>)> {
    let tally = IpTally::new();
    let started = Instant::now();
    match algorithm {
        Algorithm::Aira => {
            let (front, stats) = run_aira_with(inst, &tally, deadline, true)?;
            Ok((front.sorted_vectors(), stats, None))
        }
        Algorithm::Epp => {
            let (front, stats) = run_epp_with(inst, threads.max(1), &tally, deadline)?;
            Ok((front.sorted_vectors(), stats, None))
        }
        Algorithm::Cluster | Algorithm::Spread => {
            let strategy = if algorithm == Algorithm::Cluster {
                Strategy::Cluster
            } else {
                Strategy::Spread
            };
            let mut opts = ParallelOptions::new(threads.max(1), strategy);
            opts.share = share;
            opts.perms_override = perms_override;
            opts.deadline = deadline;
            let outcome = run_parallel_with(inst, &tally, &opts)?;
            let mut stats = SolveStats::default();
            for s in &outcome.per_thread {
                stats.ips_solved += s.ips_solved;
                stats.cache_hits += s.cache_hits;
                stats.bounds_in += s.bounds_in;
                stats.ahat_in += s.ahat_in;
                stats.bounds_out += s.bounds_out;
            }
            stats.wall_ms = started.elapsed().as_millis() as u64;
            Ok((outcome.front.sorted_vectors(), stats, Some(outcome.perms)))
        }
    }
}

fn default_threads() -> usize {
    std::env::var("PARETO_PAR_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1)
}

fn write_or_print(path: &Option<PathBuf>, text: &str, to_stderr: bool) -> Result<()> {
    match path {
        Some(p) => {
            std::fs::write(p, text)?;
        }
        None if to_stderr => eprint!("{text}"),
        None => print!("{text}"),
    }
    Ok(())
}

#[derive(Args)]
pub struct GenerateArgs {
    /// Problem family: knapsack, assignment, or tsp.
    #[arg(long)]
    pub family: String,
    /// Items, agents, or cities.
    #[arg(long)]
    pub size: usize,
    #[arg(long, default_value_t = 3)]
    pub objectives: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; defaults to the conventional name in the current
    /// directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overwrite an existing file.
    #[arg(long)]
    pub force: bool,
}

pub fn generate(args: &GenerateArgs) -> Result<u8> {
    let family = Family::from_str(&args.family)?;
    if args.size < 1 {
        return Err(Error::Invalid("size must be at least 1".into()));
    }
    if family == Family::Tsp && args.size < 3 {
        return Err(Error::Invalid("tsp needs at least 3 cities".into()));
    }
    if args.objectives < 2 {
        return Err(Error::Invalid("need at least 2 objectives".into()));
    }
    let spec = GenSpec {
        family,
        size: args.size,
        num_objectives: args.objectives,
        seed: args.seed,
    };
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(instgen::default_filename(&spec)));
    if path.exists() && !args.force {
        return Err(Error::Invalid(format!(
            "{} exists; pass --force to overwrite",
            path.display()
        )));
    }
    let inst = instgen::generate(&spec);
    let header = format!(
        "family={} size={} objectives={} seed={}",
        family, spec.size, spec.num_objectives, spec.seed
    );
    fileio::write_instance_file(&path, &inst, Some(&header))?;
    println!("{}", path.display());
    Ok(EXIT_OK)
}

#[derive(Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, default_value = "aira")]
    pub algorithm: String,
    /// Worker threads; defaults to $PARETO_PAR_THREADS or 1.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Cooperative time limit in seconds; expiry exits with status 3 and no
    /// front file.
    #[arg(long)]
    pub time_limit_s: Option<f64>,
    #[arg(long)]
    pub front_out: Option<PathBuf>,
    #[arg(long)]
    pub report_out: Option<PathBuf>,
    /// Diagnostic: disable bound sharing between threads.
    #[arg(long)]
    pub no_share: bool,
    /// Diagnostic: explicit permutations, e.g. "1,2,3;2,3,1" (cluster/spread
    /// only; count must equal --threads).
    #[arg(long)]
    pub seed_perms: Option<String>,
}

fn parse_perms(text: &str) -> Result<Vec<Permutation>> {
    text.split(';')
        .map(|part| {
            let images: Vec<usize> = part
                .split(',')
                .map(|tok| {
                    tok.trim()
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad permutation entry '{tok}'")))
                })
                .collect::<Result<_>>()?;
            Permutation::new(images)
        })
        .collect()
}

pub fn solve(args: &SolveArgs) -> Result<u8> {
    let algorithm = Algorithm::from_str(&args.algorithm)?;
    let threads = args.threads.unwrap_or_else(default_threads);
    if threads < 1 {
        return Err(Error::Invalid("threads must be at least 1".into()));
    }
    let inst = fileio::read_instance_file(&args.instance)?;
    let deadline = args
        .time_limit_s
        .map(|s| Instant::now() + Duration::from_secs_f64(s));
    let perms_override = match &args.seed_perms {
        Some(text) => Some(parse_perms(text)?),
        None => None,
    };
    let (front, stats, perms) = run_algorithm(
        &inst,
        algorithm,
        threads,
        !args.no_share,
        perms_override,
        deadline,
    )?;
    let report = RunReport {
        algorithm,
        threads,
        instance: args.instance.display().to_string(),
        front_size: front.len(),
        stats,
        perms,
    };
    write_or_print(&args.front_out, &fileio::write_front(&front), false)?;
    write_or_print(&args.report_out, &report.to_kv_block(), true)?;
    Ok(EXIT_OK)
}

#[derive(Args)]
pub struct OracleArgs {
    pub instance: PathBuf,
    #[arg(long)]
    pub front_out: Option<PathBuf>,
}

pub fn oracle(args: &OracleArgs) -> Result<u8> {
    let inst = fileio::read_instance_file(&args.instance)?;
    let front = enumerate_front(&inst)?;
    write_or_print(&args.front_out, &fileio::write_front(&front), false)?;
    Ok(EXIT_OK)
}

#[derive(Args)]
pub struct VerifyArgs {
    pub front_a: PathBuf,
    pub front_b: PathBuf,
}

pub fn verify(args: &VerifyArgs) -> Result<u8> {
    let a = fileio::canonical_front(&fileio::read_front(&std::fs::read_to_string(
        &args.front_a,
    )?)?);
    let b = fileio::canonical_front(&fileio::read_front(&std::fs::read_to_string(
        &args.front_b,
    )?)?);
    if a == b {
        println!("fronts match ({} vectors)", a.len());
        return Ok(EXIT_OK);
    }
    let set_a: BTreeSet<_> = a.iter().collect();
    let set_b: BTreeSet<_> = b.iter().collect();
    let only_a: Vec<_> = a.iter().filter(|v| !set_b.contains(v)).collect();
    let only_b: Vec<_> = b.iter().filter(|v| !set_a.contains(v)).collect();
    eprintln!(
        "fronts differ: {} vectors only in {}, {} only in {}",
        only_a.len(),
        args.front_a.display(),
        only_b.len(),
        args.front_b.display()
    );
    for v in only_a.iter().take(10) {
        eprintln!("< {v}");
    }
    for v in only_b.iter().take(10) {
        eprintln!("> {v}");
    }
    Ok(EXIT_MISMATCH)
}
