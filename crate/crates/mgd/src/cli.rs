//! Command-line surface. Seven subcommands cover the workflow: `gen`
//! samples ensembles to the text format, `stat`/`test` score stored
//! ensembles, and `mc`/`tv`/`bounds`/`msep` run the Monte Carlo harness
//! operations to CSV.
//!
//! Exit codes: 0 success, 2 usage error (one-line diagnosis on stderr),
//! 1 runtime error (prefixed `mgd:` on stderr).

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::glr::{self, Mode, ThresholdParams, DEFAULT_EXACT_BUDGET, DEFAULT_RESTARTS};
use crate::harness::{
    m_separation_report, phase_diagram, tv_curve, validate_bounds, worker_pool,
    ExperimentConfig, RunMode,
};
use crate::model::io::{read_ensemble_file, write_ensemble_file};
use crate::model::{sample_alternative, sample_null, ModelParams};
use crate::util::fmt_g17;

#[derive(Parser)]
#[command(
    name = "mgd",
    about = "Correlation detection across multiple unlabeled Gaussian graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample an ensemble and store it as a text file.
    Gen(GenArgs),
    /// Maximize the alignment statistic of a stored ensemble.
    Stat(StatArgs),
    /// Run the thresholded detection test on a stored ensemble.
    Test(TestArgs),
    /// Monte Carlo error-rate sweep over an (n, m, rho) grid, to CSV.
    Mc(McArgs),
    /// Small-scale TV distance and Bayes error versus rho, to CSV.
    Tv(TvArgs),
    /// Monte Carlo validation of the quadratic-form tail bounds, to CSV.
    Bounds(BoundsArgs),
    /// Planted-mode error rates across m at fixed (n, rho), to CSV.
    Msep(MsepArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    rho: f64,
    /// Which hypothesis to sample: `alt` (correlated, stores the planted
    /// profile) or `null` (independent).
    #[arg(long, default_value = "alt")]
    hypothesis: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatArgs {
    /// Ensemble file written by `gen`.
    #[arg(long = "in")]
    input: PathBuf,
    /// exact | heuristic
    #[arg(long, default_value = "heuristic")]
    mode: String,
    #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    stat: StatArgs,
    /// Correlation level the threshold is calibrated against.
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 1.25)]
    c: f64,
}

#[derive(Args, Default)]
struct McArgs {
    /// Grid of node counts, comma-separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Grid of graph counts, comma-separated.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Grid of correlation levels, comma-separated.
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    c: Option<f64>,
    /// exact | heuristic | planted
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    out: Option<String>,
    /// Key = value file supplying any of the flags above; explicit flags
    /// take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TvArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,5")]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.3,0.6")]
    rho: Vec<f64>,
    /// Number of tail offsets per (m, rho).
    #[arg(long, default_value_t = 10)]
    grid: usize,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MsepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 500)]
    trials: u64,
    #[arg(long, default_value_t = 1.25)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e)
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Parses and runs one invocation; returns the process exit code. The
/// binary is a thin wrapper around this, so tests can drive it in-process.
pub fn cli_main(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv.iter().map(String::as_str)) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    let rendered = e.render().to_string();
                    let line = rendered
                        .lines()
                        .find(|l| !l.trim().is_empty())
                        .unwrap_or("invalid usage");
                    eprintln!("{line}");
                    2
                }
            };
        }
    };
    match run(cli.cmd) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            2
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("mgd: {e}");
            1
        }
    }
}

fn run(cmd: Cmd) -> CliResult {
    match cmd {
        Cmd::Gen(a) => run_gen(a),
        Cmd::Stat(a) => run_stat(a),
        Cmd::Test(a) => run_test(a),
        Cmd::Mc(a) => run_mc(a),
        Cmd::Tv(a) => run_tv(a),
        Cmd::Bounds(a) => run_bounds(a),
        Cmd::Msep(a) => run_msep(a),
    }
}

fn run_gen(a: GenArgs) -> CliResult {
    let params = ModelParams::new(a.n, a.m, a.rho)?;
    match a.hypothesis.as_str() {
        "alt" => {
            let (ens, profile) = sample_alternative(&params, a.seed);
            write_ensemble_file(&a.out, a.rho, &ens, Some(&profile))?;
        }
        "null" => {
            let ens = sample_null(&params, a.seed);
            write_ensemble_file(&a.out, a.rho, &ens, None)?;
        }
        other => {
            return Err(Failure::Usage(format!(
                "--hypothesis must be alt or null, got '{other}'"
            )))
        }
    }
    println!("wrote {}", a.out.display());
    Ok(())
}

fn statistic_mode(a: &StatArgs) -> std::result::Result<Mode, Failure> {
    match a.mode.as_str() {
        "exact" => Ok(Mode::Exact { budget: a.budget }),
        "heuristic" => Ok(Mode::Heuristic {
            restarts: a.restarts,
            seed: a.seed,
        }),
        other => Err(Failure::Usage(format!(
            "--mode must be exact or heuristic, got '{other}'"
        ))),
    }
}

fn run_stat(a: StatArgs) -> CliResult {
    let mode = statistic_mode(&a)?;
    let stored = read_ensemble_file(&a.input)?;
    let stat = match mode {
        Mode::Exact { budget } => glr::exact_glr(&stored.ensemble, budget)?,
        Mode::Heuristic { restarts, seed } => {
            glr::heuristic_glr(&stored.ensemble, restarts, seed)?
        }
        // statistic_mode only constructs the two modes above.
        Mode::Planted(_) => unreachable!(),
    };
    println!("statistic {}", fmt_g17(stat.value));
    println!("mode {}", mode.label());
    Ok(())
}

fn run_test(a: TestArgs) -> CliResult {
    let mode = statistic_mode(&a.stat)?;
    let tp = ThresholdParams::new(a.rho, a.c)?;
    let stored = read_ensemble_file(&a.stat.input)?;
    let outcome = glr::glr_test(&stored.ensemble, &tp, mode)?;
    println!("statistic {}", fmt_g17(outcome.statistic.value));
    println!("threshold {}", fmt_g17(outcome.threshold));
    println!("decision {}", outcome.decision);
    Ok(())
}

fn parse_config_file(path: &Path) -> std::result::Result<HashMap<String, String>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Runtime(e.into()))?;
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Failure::Usage(format!(
                "config line {}: expected `key = value`, got '{line}'",
                idx + 1
            )));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn usage<T: std::str::FromStr>(key: &str, raw: &str) -> std::result::Result<T, Failure> {
    raw.parse()
        .map_err(|_| Failure::Usage(format!("config key '{key}': cannot parse '{raw}'")))
}

fn config_list<T: std::str::FromStr>(
    key: &str,
    map: &HashMap<String, String>,
) -> std::result::Result<Vec<T>, Failure> {
    match map.get(key) {
        None => Ok(Vec::new()),
        Some(raw) => raw
            .split(',')
            .map(|piece| usage(key, piece.trim()))
            .collect(),
    }
}

fn config_scalar<T: std::str::FromStr>(
    key: &str,
    map: &HashMap<String, String>,
) -> std::result::Result<Option<T>, Failure> {
    map.get(key).map(|raw| usage(key, raw.trim())).transpose()
}

fn run_mc(a: McArgs) -> CliResult {
    let file = match &a.config {
        Some(path) => parse_config_file(path)?,
        None => HashMap::new(),
    };
    let pick_list = |flag: &Vec<usize>, key: &str| -> std::result::Result<Vec<usize>, Failure> {
        if flag.is_empty() {
            config_list(key, &file)
        } else {
            Ok(flag.clone())
        }
    };
    let n_values = pick_list(&a.n, "n")?;
    let m_values = pick_list(&a.m, "m")?;
    let rho_values = if a.rho.is_empty() {
        config_list("rho", &file)?
    } else {
        a.rho.clone()
    };
    let trials = match a.trials {
        Some(t) => t,
        None => config_scalar("trials", &file)?.unwrap_or(100),
    };
    let c = match a.c {
        Some(c) => c,
        None => config_scalar("c", &file)?.unwrap_or(1.25),
    };
    let mode_str = a
        .mode
        .clone()
        .or_else(|| file.get("mode").cloned())
        .unwrap_or_else(|| "heuristic".to_string());
    let mode: RunMode = mode_str
        .parse()
        .map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let seed = match a.seed {
        Some(s) => s,
        None => config_scalar("seed", &file)?.unwrap_or(0),
    };
    let budget = match a.budget {
        Some(b) => b,
        None => config_scalar("budget", &file)?.unwrap_or(DEFAULT_EXACT_BUDGET),
    };
    let Some(out) = a.out.clone().or_else(|| file.get("out").cloned()) else {
        return Err(Failure::Usage(
            "--out is required (flag or config key)".to_string(),
        ));
    };
    let config = ExperimentConfig {
        n_values,
        m_values,
        rho_values,
        trials_per_point: trials,
        c,
        mode,
        master_seed: seed,
        budget,
        output_path: out.clone(),
    };
    let rows = phase_diagram(&config)?;
    println!("wrote {rows} rows to {out}");
    Ok(())
}

fn run_tv(a: TvArgs) -> CliResult {
    if a.rho.is_empty() {
        return Err(Failure::Usage("--rho needs at least one value".to_string()));
    }
    let rows = tv_curve(a.n, a.m, &a.rho, a.trials, a.budget, a.seed, &a.out)?;
    println!("wrote {rows} rows to {}", a.out.display());
    Ok(())
}

fn run_bounds(a: BoundsArgs) -> CliResult {
    let rows = validate_bounds(&a.m, &a.rho, a.grid, a.samples, a.seed, &a.out)?;
    println!("wrote {rows} rows to {}", a.out.display());
    Ok(())
}

fn run_msep(a: MsepArgs) -> CliResult {
    if a.m.is_empty() {
        return Err(Failure::Usage("--m needs at least one value".to_string()));
    }
    let rows = m_separation_report(a.n, &a.m, a.rho, a.trials, a.c, a.seed, &a.out)?;
    println!("wrote {rows} rows to {}", a.out.display());
    Ok(())
}

// Keep the pool builder linked into the CLI path even though subcommands
// construct pools inside harness ops; gen/stat/test run single-threaded.
#[allow(unused)]
fn _pool_is_cli_visible() {
    let _ = worker_pool;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(cli_main(&args(&["mgd", "gen", "--bogus", "1"])), 2);
        assert_eq!(cli_main(&args(&["mgd", "nonsense"])), 2);
        assert_eq!(cli_main(&args(&["mgd"])), 2);
    }

    #[test]
    fn gen_stat_test_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ens.txt");
        let p = path.to_str().unwrap();
        assert_eq!(
            cli_main(&args(&[
                "mgd", "gen", "--n", "7", "--m", "2", "--rho", "0.6", "--seed", "3", "--out", p
            ])),
            0
        );
        let stored = read_ensemble_file(&path).unwrap();
        assert_eq!(stored.params.n, 7);
        assert!(stored.profile.is_some());
        assert_eq!(
            cli_main(&args(&[
                "mgd", "stat", "--in", p, "--mode", "exact", "--budget", "100000"
            ])),
            0
        );
        assert_eq!(
            cli_main(&args(&[
                "mgd", "test", "--in", p, "--rho", "0.6", "--mode", "exact", "--budget",
                "100000"
            ])),
            0
        );
        // Mode planted is not a realizable statistic mode here.
        assert_eq!(
            cli_main(&args(&["mgd", "stat", "--in", p, "--mode", "planted"])),
            2
        );
    }

    #[test]
    fn gen_null_hypothesis_and_bad_hypothesis() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("null.txt");
        let p = path.to_str().unwrap();
        assert_eq!(
            cli_main(&args(&[
                "mgd",
                "gen",
                "--n",
                "4",
                "--m",
                "3",
                "--rho",
                "0",
                "--hypothesis",
                "null",
                "--out",
                p
            ])),
            0
        );
        assert!(read_ensemble_file(&path).unwrap().profile.is_none());
        assert_eq!(
            cli_main(&args(&[
                "mgd",
                "gen",
                "--n",
                "4",
                "--m",
                "3",
                "--rho",
                "0",
                "--hypothesis",
                "maybe",
                "--out",
                p
            ])),
            2
        );
    }

    #[test]
    fn stat_runtime_error_on_missing_file() {
        assert_eq!(
            cli_main(&args(&["mgd", "stat", "--in", "/nonexistent/file.txt"])),
            1
        );
    }

    #[test]
    fn mc_grid_produces_expected_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        let p = path.to_str().unwrap();
        assert_eq!(
            cli_main(&args(&[
                "mgd", "mc", "--n", "8", "--m", "2,3", "--rho", "0.2,0.4", "--trials", "5",
                "--mode", "planted", "--seed", "7", "--out", p
            ])),
            0
        );
        let text = std::fs::read_to_string(&path).unwrap();
        let data_rows = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("n,"))
            .count();
        assert_eq!(data_rows, 4);
        assert!(text.ends_with("master_seed=7\n"));
    }

    #[test]
    fn mc_missing_out_is_usage_error() {
        assert_eq!(
            cli_main(&args(&[
                "mgd", "mc", "--n", "8", "--m", "2", "--rho", "0.2", "--mode", "planted"
            ])),
            2
        );
    }

    #[test]
    fn mc_reads_config_file_and_flags_override() {
        let dir = tempfile::tempdir().unwrap();
        let conf = dir.path().join("sweep.conf");
        let out_a = dir.path().join("a.csv");
        let out_b = dir.path().join("b.csv");
        std::fs::write(
            &conf,
            format!(
                "# sweep config\nn = 8\nm = 2\nrho = 0.2,0.4\ntrials = 4\nmode = planted\nseed = 9\nout = {}\n",
                out_a.display()
            ),
        )
        .unwrap();
        assert_eq!(
            cli_main(&args(&["mgd", "mc", "--config", conf.to_str().unwrap()])),
            0
        );
        let text_a = std::fs::read_to_string(&out_a).unwrap();
        assert_eq!(text_a.lines().count(), 1 + 2 + 1); // header + rows + trailer

        // Flag overrides the config's rho grid and output.
        assert_eq!(
            cli_main(&args(&[
                "mgd",
                "mc",
                "--config",
                conf.to_str().unwrap(),
                "--rho",
                "0.3",
                "--out",
                out_b.to_str().unwrap()
            ])),
            0
        );
        let text_b = std::fs::read_to_string(&out_b).unwrap();
        assert_eq!(text_b.lines().count(), 1 + 1 + 1);
        // 0.3 rendered through the g17 float formatter.
        assert!(text_b.contains("2.9999999999999999e-1"));
    }

    #[test]
    fn mc_malformed_config_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let conf = dir.path().join("bad.conf");
        std::fs::write(&conf, "n 8\n").unwrap();
        assert_eq!(
            cli_main(&args(&["mgd", "mc", "--config", conf.to_str().unwrap()])),
            2
        );
        std::fs::write(&conf, "n = eight\n").unwrap();
        assert_eq!(
            cli_main(&args(&["mgd", "mc", "--config", conf.to_str().unwrap()])),
            2
        );
    }
}
