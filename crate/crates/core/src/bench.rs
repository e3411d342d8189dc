//! Benchmark harness: solve every class replication with branch-and-bound
//! and write one CSV row per run plus per-class averages.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use crate::branch_bound::{solve_exact, BnbParams, BnbStats};
use crate::error::{Error, Result};
use crate::instgen::{generate_instance, ClassSpec};

pub const CSV_HEADER: [&str; 13] = [
    "class_q",
    "class_s",
    "class_t",
    "class_u",
    "seed",
    "rep",
    "wall_time_s",
    "nodes",
    "depth",
    "ub_root",
    "opt",
    "lb_root",
    "gap",
];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub replications: usize,
    /// Per-run limit; `None` runs every instance to optimality.
    pub time_limit: Option<Duration>,
    /// Worker threads, at least 1.
    pub jobs: usize,
    pub bnb: BnbParams,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            replications: 10,
            time_limit: None,
            jobs: 1,
            bnb: BnbParams::default(),
        }
    }
}

/// One solved replication.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub spec: ClassSpec,
    pub seed: u64,
    pub rep: usize,
    pub stats: BnbStats,
}

/// Averages over the replications of one class. `opt` averages the runs
/// that reached the optimum and is `None` when none did.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSummary {
    pub spec: ClassSpec,
    pub wall_time_s: f64,
    pub nodes: f64,
    pub depth: f64,
    pub ub_root: f64,
    pub opt: Option<f64>,
    pub lb_root: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summaries: Vec<ClassSummary>,
    /// Pearson correlation between wall time and node count, per `q`.
    /// `None` when undefined (fewer than two runs or a constant column).
    pub correlations: BTreeMap<usize, Option<f64>>,
}

/// Solve `replications` instances of every class; replication `r` uses
/// seed `spec.seed + r`. The CSV is written to `out` in spec order.
pub fn run_benchmark(specs: &[ClassSpec], config: &BenchConfig, out: &Path) -> Result<BenchReport> {
    // open first so an unwritable path fails before any solving
    let file = File::create(out)?;
    let report = benchmark(specs, config)?;
    report.write_csv(file)?;
    Ok(report)
}

/// As [`run_benchmark`] without writing a file.
pub fn benchmark(specs: &[ClassSpec], config: &BenchConfig) -> Result<BenchReport> {
    if config.replications == 0 {
        return Err(Error::InvalidParameter(
            "replications must be at least 1".into(),
        ));
    }
    if config.jobs == 0 {
        return Err(Error::InvalidParameter("jobs must be at least 1".into()));
    }
    for spec in specs {
        spec.validate()?;
    }
    let params = BnbParams {
        time_limit: config.time_limit,
        ..config.bnb.clone()
    };
    let tasks: Vec<(ClassSpec, usize)> = specs
        .iter()
        .flat_map(|s| (0..config.replications).map(move |r| (*s, r)))
        .collect();

    let results: Vec<Mutex<Option<Result<BenchRow>>>> =
        tasks.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = config.jobs.min(tasks.len()).max(1);
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(spec, rep)) = tasks.get(i) else {
                    break;
                };
                let row = solve_one(spec, rep, &params);
                *results[i].lock().unwrap_or_else(|e| e.into_inner()) = Some(row);
            });
        }
    });

    let mut rows = Vec::with_capacity(tasks.len());
    for slot in results {
        let row = slot.into_inner().unwrap_or_else(|e| e.into_inner());
        rows.push(row.expect("every task is run")?);
    }
    let summaries = rows.chunks(config.replications).map(summarize).collect();
    let correlations = correlations(&rows);
    Ok(BenchReport {
        rows,
        summaries,
        correlations,
    })
}

fn solve_one(spec: ClassSpec, rep: usize, params: &BnbParams) -> Result<BenchRow> {
    let seed = spec.seed.wrapping_add(rep as u64);
    let instance = generate_instance(&ClassSpec { seed, ..spec })?;
    let (_, stats) = solve_exact(&instance, params)?;
    Ok(BenchRow {
        spec,
        seed,
        rep,
        stats,
    })
}

fn summarize(rows: &[BenchRow]) -> ClassSummary {
    let n = rows.len() as f64;
    let mean = |g: &dyn Fn(&BenchRow) -> f64| rows.iter().map(g).sum::<f64>() / n;
    let solved: Vec<f64> = rows.iter().filter_map(|r| r.stats.optimum).collect();
    ClassSummary {
        spec: rows[0].spec,
        wall_time_s: mean(&|r| r.stats.wall_time.as_secs_f64()),
        nodes: mean(&|r| r.stats.nodes as f64),
        depth: mean(&|r| r.stats.max_depth as f64),
        ub_root: mean(&|r| r.stats.ub_root),
        opt: (!solved.is_empty()).then(|| solved.iter().sum::<f64>() / solved.len() as f64),
        lb_root: mean(&|r| r.stats.lb_root),
        gap: mean(&|r| r.stats.gap),
    }
}

fn correlations(rows: &[BenchRow]) -> BTreeMap<usize, Option<f64>> {
    let mut by_q: BTreeMap<usize, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let (t, n) = by_q.entry(r.spec.q).or_default();
        t.push(r.stats.wall_time.as_secs_f64());
        n.push(r.stats.nodes as f64);
    }
    by_q.into_iter()
        .map(|(q, (t, n))| (q, pearson(&t, &n)))
        .collect()
}

/// Sample Pearson correlation of two equally long series.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    let den = (saa * sbb).sqrt();
    (den > 0.0).then(|| sab / den)
}

fn opt_field(opt: Option<f64>) -> String {
    opt.map_or_else(|| "-".to_string(), |v| v.to_string())
}

impl BenchReport {
    /// Write the CSV: per-run rows of each class followed by its average row
    /// (`seed` = "-", `rep` = "avg").
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        let mut rows = self.rows.iter().peekable();
        for summary in &self.summaries {
            while let Some(r) = rows.next_if(|r| r.spec == summary.spec) {
                let s = &r.stats;
                w.write_record([
                    r.spec.q.to_string(),
                    r.spec.amp_s.to_string(),
                    r.spec.setup_t.to_string(),
                    r.spec.config_u.to_string(),
                    r.seed.to_string(),
                    r.rep.to_string(),
                    format!("{:.6}", s.wall_time.as_secs_f64()),
                    s.nodes.to_string(),
                    s.max_depth.to_string(),
                    s.ub_root.to_string(),
                    opt_field(s.optimum),
                    s.lb_root.to_string(),
                    format!("{:.6}", s.gap),
                ])?;
            }
            let c = summary;
            w.write_record([
                c.spec.q.to_string(),
                c.spec.amp_s.to_string(),
                c.spec.setup_t.to_string(),
                c.spec.config_u.to_string(),
                "-".to_string(),
                "avg".to_string(),
                format!("{:.6}", c.wall_time_s),
                c.nodes.to_string(),
                c.depth.to_string(),
                c.ub_root.to_string(),
                opt_field(c.opt),
                c.lb_root.to_string(),
                format!("{:.6}", c.gap),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}
