//! Benchmark manifests: run (instance, algorithm, threads) cells a number of
//! times, print a mean-per-cell table, and emit per-repetition CSV rows.
//!
//! Manifest format (`#` comments allowed):
//!
//! ```text
//! reps 3
//! run instances/kp10_o3_s1.moip aira 1
//! run instances/kp10_o3_s1.moip spread 4
//! ```

use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use clap::Args;

use moip::fileio;
use moip::{Error, Result};

use crate::commands::{run_algorithm, Algorithm};
use crate::{EXIT_FAILURE, EXIT_OK};

#[derive(Args)]
pub struct BenchArgs {
    pub manifest: PathBuf,
    /// Where to write per-repetition CSV rows (default: stdout after the
    /// table).
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    /// Per-run time limit in seconds.
    #[arg(long)]
    pub time_limit_s: Option<f64>,
}

struct Cell {
    instance: PathBuf,
    algorithm: Algorithm,
    threads: usize,
}

struct Manifest {
    reps: usize,
    cells: Vec<Cell>,
}

fn parse_manifest(text: &str) -> Result<Manifest> {
    let mut reps = 1;
    let mut cells = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        match toks.next().unwrap() {
            "reps" => {
                reps = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err("expected 'reps <count>'".into()))?;
                if reps < 1 {
                    return Err(err("repetition count must be positive".into()));
                }
            }
            "run" => {
                let instance = toks
                    .next()
                    .ok_or_else(|| err("expected instance path".into()))?;
                let algorithm = toks
                    .next()
                    .ok_or_else(|| err("expected algorithm".into()))
                    .and_then(|t| Algorithm::from_str(t).map_err(|e| err(e.to_string())))?;
                let threads = toks
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err("expected thread count".into()))?;
                cells.push(Cell { instance: PathBuf::from(instance), algorithm, threads });
            }
            other => return Err(err(format!("unknown directive '{other}'"))),
        }
        if let Some(extra) = toks.next() {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("trailing token '{extra}'"),
            });
        }
    }
    Ok(Manifest { reps, cells })
}

enum CellResult {
    Ok { mean_wall: u64, mean_ips: u64 },
    Failed,
}

pub fn bench(args: &BenchArgs) -> Result<u8> {
    let manifest = parse_manifest(&std::fs::read_to_string(&args.manifest)?)?;
    let mut csv = String::from("instance,algorithm,threads,rep,wall_ms,ips,front_size\n");
    let mut any_failed = false;

    // Table axes in manifest order: instances down, (algorithm, threads)
    // across, mean wall ms / mean IPs per cell.
    let mut instances: Vec<PathBuf> = Vec::new();
    let mut columns: Vec<(Algorithm, usize)> = Vec::new();
    let mut results: Vec<(usize, usize, CellResult)> = Vec::new();

    for cell in &manifest.cells {
        let row = match instances.iter().position(|p| p == &cell.instance) {
            Some(i) => i,
            None => {
                instances.push(cell.instance.clone());
                instances.len() - 1
            }
        };
        let column_key = (cell.algorithm, cell.threads);
        let col = match columns.iter().position(|c| *c == column_key) {
            Some(i) => i,
            None => {
                columns.push(column_key);
                columns.len() - 1
            }
        };

        let mut walls: Vec<u64> = Vec::new();
        let mut ips: Vec<u64> = Vec::new();
        let mut failed = None;
        match fileio::read_instance_file(&cell.instance) {
            Err(e) => failed = Some(e.to_string()),
            Ok(inst) => {
                for rep in 0..manifest.reps {
                    let deadline = args
                        .time_limit_s
                        .map(|s| Instant::now() + Duration::from_secs_f64(s));
                    let started = Instant::now();
                    match run_algorithm(&inst, cell.algorithm, cell.threads, true, None, deadline)
                    {
                        Ok((front, stats, _)) => {
                            let wall = started.elapsed().as_millis() as u64;
                            walls.push(wall);
                            ips.push(stats.ips_solved);
                            csv.push_str(&format!(
                                "{},{},{},{},{},{},{}\n",
                                cell.instance.display(),
                                cell.algorithm.name(),
                                cell.threads,
                                rep,
                                wall,
                                stats.ips_solved,
                                front.len()
                            ));
                        }
                        Err(e) => {
                            failed = Some(e.to_string());
                            break;
                        }
                    }
                }
            }
        }
        let result = match failed {
            Some(reason) => {
                any_failed = true;
                eprintln!(
                    "bench: {} {} t={}: {}",
                    cell.instance.display(),
                    cell.algorithm.name(),
                    cell.threads,
                    reason
                );
                CellResult::Failed
            }
            None => {
                let mean = |xs: &[u64]| xs.iter().sum::<u64>() / xs.len() as u64;
                CellResult::Ok { mean_wall: mean(&walls), mean_ips: mean(&ips) }
            }
        };
        results.push((row, col, result));
    }

    let mut table = String::from("instance");
    for (alg, threads) in &columns {
        table.push_str(&format!(" {}/t{}", alg.name(), threads));
    }
    table.push_str("  (mean wall_ms:ips over ");
    table.push_str(&format!("{} reps)\n", manifest.reps));
    for (row, instance) in instances.iter().enumerate() {
        table.push_str(&instance.display().to_string());
        for col in 0..columns.len() {
            let cell = results
                .iter()
                .find(|(r, c, _)| *r == row && *c == col)
                .map(|(_, _, res)| res);
            match cell {
                Some(CellResult::Ok { mean_wall, mean_ips }) => {
                    table.push_str(&format!(" {mean_wall}:{mean_ips}"));
                }
                Some(CellResult::Failed) => table.push_str(" ERROR"),
                None => table.push_str(" -"),
            }
        }
        table.push('\n');
    }

    print!("{table}");
    match &args.csv_out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(if any_failed { EXIT_FAILURE } else { EXIT_OK })
}
