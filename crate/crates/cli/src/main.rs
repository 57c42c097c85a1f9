use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hypermc::automata::{parse_ba, AutomataError, Nba};
use hypermc::bench::{
    export_inclusion_instance, gen_formula, gen_system, parse_engine, parse_sweep_config, summarize, sweep,
    SWEEP_CSV_HEADER,
};
use hypermc::budget::Budget;
use hypermc::checker::{check, extract_witness, stats_report, CheckError, CheckOptions, ReportFormat, Strategy};
use hypermc::formula::{parse_hyperltl, HyperFormula};
use hypermc::inclusion::{format_cex, include, Engine, InclusionError};
use hypermc::oracle::{decide_naive, OracleError};
use hypermc::system::{explode_program, parse_program, parse_system, print_system, ProgramError, TransitionSystem};

const EXIT_HOLDS: u8 = 0;
const EXIT_FAILS: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "hypermc", version, about = "Explicit-state HyperLTL model checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a system satisfies a HyperLTL formula.
    Check(CheckArgs),
    /// Explode a boolean program into an explicit system file.
    Explode {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        bitwidth: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate random benchmark instances.
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
    /// Run a benchmark sweep and print CSV rows.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads; defaults to the available parallelism.
        #[arg(long)]
        jobs: Option<usize>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the inclusion query of a universally led formula.
    ExportInclusion {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Decide inclusion of two BA files; usable as an external engine.
    Include {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value = "complement")]
        engine: String,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long, conflicts_with = "formula_inline", required_unless_present = "formula_inline")]
    formula: Option<PathBuf>,
    #[arg(long)]
    formula_inline: Option<String>,
    /// complement, antichain or external:CMD (CMD uses {A} and {B}).
    #[arg(long, default_value = "complement")]
    engine: String,
    /// auto, pure-abv or inclusion.
    #[arg(long, default_value = "auto")]
    strategy: String,
    /// Print a witness or counterexample for the leading block when one exists.
    #[arg(long)]
    witness: bool,
    /// Cross-check the verdict with the reference decision procedure.
    #[arg(long)]
    oracle: bool,
    /// Time limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, value_enum)]
    stats: Option<StatsFormat>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsFormat {
    Csv,
    Text,
}

#[derive(Subcommand)]
enum GenCommand {
    /// A random system in the explicit format.
    System {
        #[arg(long)]
        states: usize,
        /// Edge probability.
        #[arg(long, conflicts_with = "outdegree", required_unless_present = "outdegree")]
        p: Option<f64>,
        /// Expected outdegree; sets the edge probability to k/n.
        #[arg(long)]
        outdegree: Option<f64>,
        #[arg(long, default_value_t = 2)]
        aps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A random closed formula.
    Formula {
        /// Quantifier pattern such as `aea` (a = forall, e = exists).
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        aps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Why a command stopped without an answer.
enum Failure {
    Input(String),
    Resource(String),
    Timeout,
}

impl Failure {
    fn report(&self) -> u8 {
        match self {
            Failure::Input(msg) => {
                println!("ERROR {msg}");
                EXIT_INPUT
            }
            Failure::Resource(msg) => {
                println!("ERROR {msg}");
                EXIT_RESOURCE
            }
            Failure::Timeout => {
                println!("TIMEOUT");
                EXIT_RESOURCE
            }
        }
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        if e.is_timeout() {
            Failure::Timeout
        } else if e.is_resource() {
            Failure::Resource(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<ProgramError> for Failure {
    fn from(e: ProgramError) -> Self {
        match e {
            ProgramError::TooLarge(_) => Failure::Resource(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<TransitionSystem, Failure> {
    parse_system(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_formula(path: Option<&Path>, inline: Option<&str>) -> Result<HyperFormula, Failure> {
    let (origin, text) = match (path, inline) {
        (Some(p), _) => (p.display().to_string(), read(p)?),
        (None, Some(s)) => ("formula".to_string(), s.to_string()),
        (None, None) => return Err(Failure::Input("no formula given".into())),
    };
    parse_hyperltl(&text).map_err(|e| Failure::Input(format!("{origin}: {e}")))
}

fn budget(timeout: Option<f64>) -> Result<Budget, Failure> {
    match timeout {
        None => Ok(Budget::default()),
        Some(s) if s.is_finite() && s >= 0.0 => Ok(Budget::with_timeout(Duration::from_secs_f64(s))),
        Some(s) => Err(Failure::Input(format!("invalid timeout {s}"))),
    }
}

fn run_check(args: &CheckArgs) -> Result<u8, Failure> {
    let t = load_system(&args.system)?;
    let f = load_formula(args.formula.as_deref(), args.formula_inline.as_deref())?;
    let engine = parse_engine(&args.engine).map_err(Failure::Input)?;
    let strategy: Strategy = args.strategy.parse().map_err(Failure::Input)?;
    let opts = CheckOptions::default()
        .with_engine(engine)
        .with_strategy(strategy)
        .with_budget(budget(args.timeout)?)
        .with_witness(args.witness);
    let v = check(&t, &f, &opts)?;

    if args.oracle {
        match decide_naive(&t, &f) {
            Ok(expected) if expected != v.holds => {
                return Err(Failure::Resource(format!(
                    "oracle disagrees: checker says {}, reference says {}",
                    verdict_word(v.holds),
                    verdict_word(expected)
                )));
            }
            Ok(_) => eprintln!("oracle agrees"),
            Err(e @ OracleError::Bounds(_)) | Err(e @ OracleError::TooLarge(_)) => eprintln!("oracle skipped: {e}"),
            Err(e) => return Err(Failure::Resource(format!("oracle: {e}"))),
        }
    }

    println!("{}", verdict_word(v.holds));
    if args.witness {
        match extract_witness(&v, &t) {
            Ok(w) => {
                let vars: Vec<&str> = w.vars.iter().map(|v| v.as_str()).collect();
                println!("{} for {}", w.role, vars.join(", "));
                println!("{}", w.word);
            }
            Err(e) => println!("{e}"),
        }
    }
    match args.stats {
        Some(StatsFormat::Csv) => print!("{}", stats_report(&v, ReportFormat::Csv)),
        Some(StatsFormat::Text) => print!("{}", stats_report(&v, ReportFormat::Text)),
        None => {}
    }
    Ok(if v.holds { EXIT_HOLDS } else { EXIT_FAILS })
}

fn verdict_word(holds: bool) -> &'static str {
    if holds {
        "HOLDS"
    } else {
        "FAILS"
    }
}

/// Parses two BA files over the smallest binary alphabet covering their
/// letters.
fn load_ba_pair(a: &Path, b: &Path) -> Result<(Nba, Nba), Failure> {
    let (ta, tb) = (read(a)?, read(b)?);
    let max_letter = [&ta, &tb]
        .iter()
        .flat_map(|t| t.lines())
        .filter_map(|l| l.trim().split_once(',').map(|(sym, _)| sym.trim().to_string()))
        .filter_map(|sym| sym.strip_prefix('l').and_then(|k| k.parse::<u128>().ok()))
        .max()
        .unwrap_or(0);
    let bits = (128 - max_letter.leading_zeros()) as usize;
    let aps: Vec<String> = (0..bits).map(|i| format!("x{i}")).collect();
    let parse = |path: &Path, text: &str| {
        parse_ba(text, 1, &aps).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    };
    Ok((parse(a, &ta)?, parse(b, &tb)?))
}

fn run_include(a: &Path, b: &Path, engine: &str) -> Result<u8, Failure> {
    let engine = parse_engine(engine).map_err(Failure::Input)?;
    if matches!(engine, Engine::External(_)) {
        return Err(Failure::Input("the include command runs a built-in engine".into()));
    }
    let (na, nb) = load_ba_pair(a, b)?;
    let out = include(&na, &nb, &engine, &Budget::default()).map_err(|e| match e {
        InclusionError::Automata(AutomataError::Resource(_)) => Failure::Resource(e.to_string()),
        e => Failure::Input(e.to_string()),
    })?;
    if out.included {
        println!("INCLUDED");
    } else {
        println!("NOT INCLUDED");
        if let Some(w) = &out.counterexample {
            println!("{}", format_cex(w));
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check(args) => run_check(&args),
        Command::Explode { program, bitwidth, out } => {
            let p = parse_program(&read(&program)?).map_err(|e| Failure::Input(format!("{}: {e}", program.display())))?;
            let t = explode_program(&p, bitwidth)?;
            write(&out, &print_system(&t))?;
            eprintln!("{} states, {} edges", t.num_states(), t.num_edges());
            Ok(0)
        }
        Command::Gen { what } => {
            match what {
                GenCommand::System {
                    states,
                    p,
                    outdegree,
                    aps,
                    seed,
                } => {
                    if states == 0 {
                        return Err(Failure::Input("a system needs at least one state".into()));
                    }
                    let p = p.unwrap_or_else(|| outdegree.unwrap_or(0.0) / states as f64);
                    print!("{}", print_system(&gen_system(states, p, aps, seed)));
                }
                GenCommand::Formula {
                    pattern,
                    size,
                    aps,
                    seed,
                } => {
                    if size == 0 {
                        return Err(Failure::Input("body size must be positive".into()));
                    }
                    let f = gen_formula(&pattern, size, aps, seed).map_err(|e| Failure::Input(e.to_string()))?;
                    println!("{f}");
                }
            }
            Ok(0)
        }
        Command::Sweep { config, jobs, out } => {
            let cfg = parse_sweep_config(&read(&config)?).map_err(|e| Failure::Input(e.to_string()))?;
            let jobs = jobs
                .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
                .unwrap_or(1)
                .max(1);
            let rows = sweep(&cfg, jobs);
            let mut csv = format!("{SWEEP_CSV_HEADER}\n");
            for r in &rows {
                csv.push_str(&r.csv());
                csv.push('\n');
            }
            match out {
                Some(path) => write(&path, &csv)?,
                None => print!("{csv}"),
            }
            for c in summarize(&rows) {
                let median = c.median_wall.map_or("-".to_string(), |d| format!("{:.1}ms", d.as_secs_f64() * 1e3));
                eprintln!(
                    "{} n={} p={:.4} size={}: {}/{} completed, median {median}",
                    c.pattern, c.n, c.p, c.body_size, c.completed, c.samples
                );
            }
            Ok(0)
        }
        Command::ExportInclusion {
            system,
            formula,
            out_prefix,
        } => {
            let t = load_system(&system)?;
            let f = load_formula(Some(&formula), None)?;
            let exported = export_inclusion_instance(&t, &f, &out_prefix).map_err(|e| match e {
                hypermc::bench::BenchError::Check(e) => Failure::from(e),
                e => Failure::Input(e.to_string()),
            })?;
            for p in &exported.files {
                println!("{}", p.display());
            }
            for n in &exported.notices {
                eprintln!("{n}");
            }
            Ok(0)
        }
        Command::Include { a, b, engine } => run_include(&a, &b, &engine),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = run(cli).unwrap_or_else(|f| f.report());
    ExitCode::from(code)
}
