//! Parameter sweeps over random instances.
//!
//! A config is `key = value` text with comma-separated lists:
//!
//! ```text
//! sizes = 20, 30
//! outdegrees = 5        # or: densities = 0.25
//! patterns = ae, aea
//! body_sizes = 10
//! samples = 10
//! aps = 2
//! seed = 1
//! timeout = 30          # seconds per instance
//! engine = complement   # complement | antichain | external:CMD
//! strategy = auto
//! ```

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::budget::Budget;
use crate::checker::{check, CheckOptions, Strategy};
use crate::inclusion::Engine;

use super::{gen_formula, gen_system, parse_pattern, BenchError};

pub const SWEEP_CSV_HEADER: &str =
    "pattern,n,p,body_size,seed,verdict,wall_ms,complement_ms_list,stage_sizes,engine,status";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Density {
    Probability(f64),
    /// Expected outdegree `k`, i.e. `p = k / n`.
    Outdegree(f64),
}

impl Density {
    pub fn probability(self, n: usize) -> f64 {
        match self {
            Density::Probability(p) => p,
            Density::Outdegree(k) => (k / n as f64).min(1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub densities: Vec<Density>,
    pub patterns: Vec<String>,
    pub body_sizes: Vec<usize>,
    pub samples: usize,
    pub aps: usize,
    pub seed: u64,
    pub timeout: Duration,
    pub engine: Engine,
    pub strategy: Strategy,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sizes: vec![20],
            densities: vec![Density::Outdegree(5.0)],
            patterns: vec!["ae".into()],
            body_sizes: vec![10],
            samples: 10,
            aps: 2,
            seed: 1,
            timeout: Duration::from_secs(30),
            engine: Engine::Complement,
            strategy: Strategy::Auto,
        }
    }
}

pub fn parse_engine(s: &str) -> Result<Engine, String> {
    match s {
        "complement" => Ok(Engine::Complement),
        "antichain" => Ok(Engine::Antichain),
        _ => match s.strip_prefix("external:") {
            Some(cmd) if !cmd.trim().is_empty() => Ok(Engine::External(cmd.trim().to_string())),
            _ => Err(format!("unknown engine `{s}` (expected complement, antichain or external:CMD)")),
        },
    }
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfig, BenchError> {
    let mut cfg = SweepConfig::default();
    let mut density_set = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| BenchError::Config { line: i + 1, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let items: Vec<&str> = value.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        fn list<T: std::str::FromStr>(items: &[&str]) -> Result<Vec<T>, String> {
            items
                .iter()
                .map(|s| s.parse().map_err(|_| format!("invalid value `{s}`")))
                .collect()
        }
        fn one<T: std::str::FromStr>(value: &str) -> Result<T, String> {
            value.parse().map_err(|_| format!("invalid value `{value}`"))
        }
        let mut set_density = |d: Vec<Density>| -> Result<(), String> {
            if density_set {
                return Err("give either `densities` or `outdegrees`, once".into());
            }
            density_set = true;
            cfg.densities = d;
            Ok(())
        };
        let result: Result<(), String> = match key {
            "sizes" => list(&items).map(|v| cfg.sizes = v),
            "densities" => list(&items).and_then(|v: Vec<f64>| set_density(v.into_iter().map(Density::Probability).collect())),
            "outdegrees" => list(&items).and_then(|v: Vec<f64>| set_density(v.into_iter().map(Density::Outdegree).collect())),
            "patterns" => items
                .iter()
                .map(|p| parse_pattern(p).map(|_| p.to_string()).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()
                .map(|v| cfg.patterns = v),
            "body_sizes" => list(&items).map(|v| cfg.body_sizes = v),
            "samples" => one(value).map(|v| cfg.samples = v),
            "aps" => one(value).map(|v| cfg.aps = v),
            "seed" => one(value).map(|v| cfg.seed = v),
            "timeout" => one::<f64>(value).and_then(|v| {
                Duration::try_from_secs_f64(v)
                    .map(|d| cfg.timeout = d)
                    .map_err(|_| format!("invalid timeout `{value}`"))
            }),
            "engine" => parse_engine(value).map(|e| cfg.engine = e),
            "strategy" => value.parse().map(|s| cfg.strategy = s),
            _ => Err(format!("unknown key `{key}`")),
        };
        result.map_err(err)?;
    }
    if cfg.sizes.contains(&0) || cfg.body_sizes.contains(&0) {
        return Err(BenchError::Config {
            line: 0,
            msg: "sizes and body sizes must be positive".into(),
        });
    }
    Ok(cfg)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub pattern: String,
    pub n: usize,
    pub p: f64,
    pub body_size: usize,
    pub seed: u64,
    /// `HOLDS`, `FAILS`, `TIMEOUT` or `ERROR`.
    pub verdict: &'static str,
    pub wall: Duration,
    pub complements: usize,
    pub complement_times: Vec<Duration>,
    pub stage_sizes: Vec<usize>,
    pub engine: String,
    /// `ok`, `timeout`, `cap` or `error`.
    pub status: &'static str,
}

impl SweepRow {
    pub fn completed(&self) -> bool {
        self.status == "ok"
    }

    pub fn csv(&self) -> String {
        let join = |v: Vec<String>| v.join(";");
        format!(
            "{},{},{},{},{},{},{:.3},{},{},{},{}",
            self.pattern,
            self.n,
            self.p,
            self.body_size,
            self.seed,
            self.verdict,
            self.wall.as_secs_f64() * 1e3,
            join(self.complement_times.iter().map(|d| format!("{:.3}", d.as_secs_f64() * 1e3)).collect()),
            join(self.stage_sizes.iter().map(|s| s.to_string()).collect()),
            self.engine,
            self.status
        )
    }
}

struct Job {
    pattern: String,
    n: usize,
    p: f64,
    body_size: usize,
    seed: u64,
}

fn run_job(cfg: &SweepConfig, job: &Job) -> SweepRow {
    let t = gen_system(job.n, job.p, cfg.aps, job.seed);
    let f = gen_formula(&job.pattern, job.body_size, cfg.aps, job.seed ^ 0x5eed_f00d).expect("patterns are validated");
    let opts = CheckOptions::default()
        .with_strategy(cfg.strategy)
        .with_engine(cfg.engine.clone())
        .with_budget(Budget::with_timeout(cfg.timeout));
    let start = Instant::now();
    let result = check(&t, &f, &opts);
    let wall = start.elapsed();
    let mut row = SweepRow {
        pattern: job.pattern.clone(),
        n: job.n,
        p: job.p,
        body_size: job.body_size,
        seed: job.seed,
        verdict: "ERROR",
        wall,
        complements: 0,
        complement_times: Vec::new(),
        stage_sizes: Vec::new(),
        engine: cfg.engine.name().to_string(),
        status: "error",
    };
    match result {
        Ok(v) => {
            row.verdict = if v.holds { "HOLDS" } else { "FAILS" };
            row.status = "ok";
            row.complements = v.stats.complements;
            row.complement_times = v.stats.complement_times;
            row.stage_sizes = v.stats.stages.iter().map(|s| s.states).collect();
        }
        Err(e) if e.is_timeout() => {
            row.verdict = "TIMEOUT";
            row.status = "timeout";
        }
        Err(e) if e.is_resource() => row.status = "cap",
        Err(_) => {}
    }
    row
}

/// Runs every cell of `cfg` with `jobs` worker threads. Rows come back in
/// cell order regardless of `jobs`.
pub fn sweep(cfg: &SweepConfig, jobs: usize) -> Vec<SweepRow> {
    let mut work = Vec::new();
    for pattern in &cfg.patterns {
        for &n in &cfg.sizes {
            for &d in &cfg.densities {
                for &body_size in &cfg.body_sizes {
                    for i in 0..cfg.samples {
                        work.push(Job {
                            pattern: pattern.clone(),
                            n,
                            p: d.probability(n),
                            body_size,
                            seed: cfg.seed.wrapping_add(i as u64),
                        });
                    }
                }
            }
        }
    }
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; work.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.max(1).min(work.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = work.get(i) else { break };
                let row = run_job(cfg, job);
                rows.lock().expect("no worker panics while holding the lock")[i] = Some(row);
            });
        }
    });
    rows.into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect()
}

/// Aggregate of one `(pattern, n, p, body_size)` cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub pattern: String,
    pub n: usize,
    pub p: f64,
    pub body_size: usize,
    pub samples: usize,
    pub completed: usize,
    pub median_wall: Option<Duration>,
    pub mean_complement: Option<Duration>,
}

impl CellSummary {
    pub fn success_rate(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.completed as f64 / self.samples as f64
        }
    }
}

pub fn summarize(rows: &[SweepRow]) -> Vec<CellSummary> {
    let mut cells: Vec<CellSummary> = Vec::new();
    let mut walls: Vec<Vec<Duration>> = Vec::new();
    let mut comps: Vec<Vec<Duration>> = Vec::new();
    for r in rows {
        let i = match cells
            .iter()
            .position(|c| c.pattern == r.pattern && c.n == r.n && c.p == r.p && c.body_size == r.body_size)
        {
            Some(i) => i,
            None => {
                cells.push(CellSummary {
                    pattern: r.pattern.clone(),
                    n: r.n,
                    p: r.p,
                    body_size: r.body_size,
                    samples: 0,
                    completed: 0,
                    median_wall: None,
                    mean_complement: None,
                });
                walls.push(Vec::new());
                comps.push(Vec::new());
                cells.len() - 1
            }
        };
        cells[i].samples += 1;
        if r.completed() {
            cells[i].completed += 1;
            walls[i].push(r.wall);
            comps[i].extend(&r.complement_times);
        }
    }
    for ((c, mut w), k) in cells.iter_mut().zip(walls).zip(comps) {
        w.sort();
        c.median_wall = w.get(w.len() / 2).copied();
        if !k.is_empty() {
            c.mean_complement = Some(k.iter().sum::<Duration>() / k.len() as u32);
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = parse_sweep_config("sizes = 5, 6\noutdegrees = 2 # comment\npatterns = ae,eae\nsamples = 3\ntimeout = 0.5\nengine = antichain\n").unwrap();
        assert_eq!(cfg.sizes, [5, 6]);
        assert_eq!(cfg.densities, [Density::Outdegree(2.0)]);
        assert_eq!(cfg.patterns, ["ae", "eae"]);
        assert_eq!(cfg.timeout, Duration::from_millis(500));
        assert_eq!(cfg.engine, Engine::Antichain);
        assert!(parse_sweep_config("sizes = x").is_err());
        assert!(parse_sweep_config("densities = 0.1\noutdegrees = 2").is_err());
        assert!(parse_sweep_config("patterns = az").is_err());
    }

    #[test]
    fn rows_are_deterministic_and_ordered() {
        let cfg = SweepConfig {
            sizes: vec![4],
            body_sizes: vec![4],
            samples: 4,
            patterns: vec!["ae".into(), "aea".into()],
            ..SweepConfig::default()
        };
        let a = sweep(&cfg, 1);
        let b = sweep(&cfg, 3);
        assert_eq!(a.len(), 8);
        let key = |r: &SweepRow| (r.pattern.clone(), r.seed, r.verdict, r.complements);
        assert_eq!(a.iter().map(key).collect::<Vec<_>>(), b.iter().map(key).collect::<Vec<_>>());
        for r in &a {
            assert_eq!(r.csv().split(',').count(), SWEEP_CSV_HEADER.split(',').count());
            assert_eq!(r.complement_times.len(), r.complements);
        }
        let cells = summarize(&a);
        assert_eq!(cells.len(), 2);
        assert!(cells.iter().all(|c| c.samples == 4));
    }

    #[test]
    fn timeouts_are_not_verdicts() {
        let cfg = SweepConfig {
            sizes: vec![6],
            samples: 2,
            timeout: Duration::ZERO,
            ..SweepConfig::default()
        };
        for r in sweep(&cfg, 2) {
            assert_eq!((r.verdict, r.status), ("TIMEOUT", "timeout"));
        }
    }
}
