use std::fs::{self, File};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use linecover::bench::{run_benchmark, BenchConfig};
use linecover::branch_bound::{solve_exact, BnbParams, BnbStats};
use linecover::closed_form::solve_uniform_instance;
use linecover::heuristic::{root_heuristic, HeuristicParams};
use linecover::instgen::{generate_instance, ClassSpec};
use linecover::oracle::{solve_brute_force, DEFAULT_MAX_Q};
use linecover::{CoverPlan, Instance};

const SEED_ENV: &str = "LINECOVER_SEED";

/// Exit status when a time limit stopped the search before optimality.
const EXIT_TIMEOUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "linecover",
    version,
    about = "Cover a segment with discs at minimum setup and quadratic cost"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance of class (q, s, t, u) as JSON.
    Generate(GenerateArgs),
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Solve replications of instance classes and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    q: usize,
    /// Multiplier of the variable cost coefficients.
    #[arg(long)]
    s: f64,
    /// Ratio of setup cost to variable cost coefficient.
    #[arg(long)]
    t: f64,
    /// Perturbation of the base optimum (0, 1, 2, 3 or 5).
    #[arg(long, default_value_t = 0)]
    u: u8,
    /// Seed of the random base; overridden by LINECOVER_SEED.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random increments between coefficients instead of b_i = i.
    #[arg(long)]
    random: bool,
    #[arg(short = 'o', long = "output")]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Bnb,
    Heuristic,
    Oracle,
    Uniform,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Bnb)]
    method: Method,
    /// Wall-clock limit in seconds for branch-and-bound.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Initial subgradient step factor, in (0, 2).
    #[arg(long)]
    alpha0: Option<f64>,
    /// Subgradient iterations at the root.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Write the plan as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON array of classes: {"q", "s", "t", "u", "seed", "deterministic"}.
    #[arg(long)]
    classes: PathBuf,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Per-run limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    csv: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Generate(args) => generate(args),
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut de = serde_json::Deserializer::from_reader(BufReader::new(file));
    serde_path_to_error::deserialize(&mut de).with_context(|| format!("invalid {}", path.display()))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

fn seconds(limit: Option<f64>) -> Result<Option<Duration>> {
    limit
        .map(|s| {
            if !(s.is_finite() && s > 0.0) {
                bail!("time limit must be a positive number of seconds, got {s}");
            }
            Ok(Duration::from_secs_f64(s))
        })
        .transpose()
}

fn generate(args: GenerateArgs) -> Result<ExitCode> {
    let seed = match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV} must be an unsigned integer, got {v:?}"))?,
        Err(_) => args.seed,
    };
    let spec = ClassSpec {
        q: args.q,
        amp_s: args.s,
        setup_t: args.t,
        config_u: args.u,
        seed,
        deterministic: !args.random,
    };
    let instance = generate_instance(&spec)?;
    write_json(&args.output, &instance)?;
    let mode = if spec.deterministic {
        "deterministic".to_string()
    } else {
        format!("seed {seed}")
    };
    println!(
        "class ({}) {mode}: {} discs written to {}",
        spec.label(),
        instance.len(),
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn solve(args: SolveArgs) -> Result<ExitCode> {
    let instance: Instance = read_json(&args.file)?;
    let mut params = BnbParams {
        time_limit: seconds(args.time_limit)?,
        ..Default::default()
    };
    if let Some(a) = args.alpha0 {
        params.root_dual.alpha0 = a;
        params.node_dual.alpha0 = a;
    }
    if let Some(n) = args.max_iters {
        params.root_dual.max_iters = n;
    }
    params.root_dual.validate()?;

    let mut stats = None;
    let plan = match args.method {
        Method::Bnb => {
            let (plan, s) = solve_exact(&instance, &params)?;
            stats = Some(s);
            plan
        }
        Method::Heuristic => {
            root_heuristic(&instance, &params.root_dual, &HeuristicParams::default())?
        }
        Method::Oracle => solve_brute_force(&instance, DEFAULT_MAX_Q)?,
        Method::Uniform => solve_uniform_instance(&instance)?,
    };
    print_plan(&plan);
    if let Some(s) = &stats {
        print_stats(s);
    }
    if let Some(out) = &args.json {
        write_json(out, &plan)?;
    }
    if stats.is_some_and(|s| s.optimum.is_none()) {
        println!("time limit reached: best plan shown is not proven optimal");
        return Ok(ExitCode::from(EXIT_TIMEOUT));
    }
    Ok(ExitCode::SUCCESS)
}

fn print_plan(plan: &CoverPlan) {
    println!("objective {:.6}", plan.objective);
    println!(
        "  fixed {:.6}  variable {:.6}",
        plan.fixed_cost, plan.variable_cost
    );
    for e in &plan.entries {
        println!(
            "  disc {:>4}  diameter {:.6}  center {:.6}",
            e.id, e.diameter, e.center
        );
    }
}

fn print_stats(s: &BnbStats) {
    println!(
        "nodes {}  depth {}  ub_root {:.6}  lb_root {:.6}  gap {:.6}  time {:.3}s",
        s.nodes,
        s.max_depth,
        s.ub_root,
        s.lb_root,
        s.gap,
        s.wall_time.as_secs_f64()
    );
}

fn bench(args: BenchArgs) -> Result<ExitCode> {
    let specs: Vec<ClassSpec> = read_json(&args.classes)?;
    let config = BenchConfig {
        replications: args.reps,
        time_limit: seconds(args.time_limit)?,
        jobs: args.jobs,
        ..Default::default()
    };
    let report = run_benchmark(&specs, &config, &args.csv)?;
    println!(
        "{:<16} {:>10} {:>8} {:>6} {:>12} {:>12} {:>10}",
        "class", "time_s", "nodes", "depth", "ub_root", "opt", "gap"
    );
    for c in &report.summaries {
        let opt = c.opt.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
        println!(
            "{:<16} {:>10.4} {:>8.1} {:>6.1} {:>12.3} {:>12} {:>10.6}",
            c.spec.label(),
            c.wall_time_s,
            c.nodes,
            c.depth,
            c.ub_root,
            opt,
            c.gap
        );
    }
    for (q, rho) in &report.correlations {
        match rho {
            Some(r) => println!("q = {q}: correlation(time, nodes) = {r:.4}"),
            None => println!("q = {q}: correlation(time, nodes) undefined"),
        }
    }
    let unsolved = report
        .rows
        .iter()
        .filter(|r| r.stats.optimum.is_none())
        .count();
    println!(
        "{} runs written to {}",
        report.rows.len(),
        args.csv.display()
    );
    if unsolved > 0 {
        println!("{unsolved} runs stopped at the time limit");
        return Ok(ExitCode::from(EXIT_TIMEOUT));
    }
    Ok(ExitCode::SUCCESS)
}
