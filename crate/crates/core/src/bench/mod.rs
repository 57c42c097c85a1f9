//! Random instances and benchmark plumbing.
//!
//! Systems follow the Erdős–Rényi–Gilbert model: every ordered pair of
//! states, self-loops included, is an edge with probability `p`. A repair
//! pass then makes every state reachable from the initial state and gives
//! every dead end a successor. Formulas are sampled by recursive descent
//! with exactly the requested number of body nodes.

mod sweep;

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automata::{export, AutomataError, ExportFormat};
use crate::budget::Budget;
use crate::checker::{inclusion_instance, CheckError};
use crate::formula::{HyperFormula, LtlBody, Quantifier, TraceVar};
use crate::system::TransitionSystem;

pub use sweep::{parse_engine, parse_sweep_config, Density, summarize, sweep, CellSummary, SweepConfig, SweepRow, SWEEP_CSV_HEADER};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid pattern `{0}`: use `a` for forall and `e` for exists")]
    Pattern(String),
    #[error("sweep config line {line}: {msg}")]
    Config { line: usize, msg: String },
}

/// Names of the first `k` generated propositions: `a`, `b`, ...
pub fn ap_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("a{i}")
            }
        })
        .collect()
}

/// Names of the first `k` generated trace variables: `p`, `q`, ...
pub fn var_names(k: usize) -> Vec<TraceVar> {
    const BASE: [&str; 6] = ["p", "q", "r", "s", "u", "v"];
    (0..k)
        .map(|i| match BASE.get(i) {
            Some(v) => TraceVar::new(*v),
            None => TraceVar::new(format!("p{i}")),
        })
        .collect()
}

/// Edge counts before and after the repair pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenReport {
    pub sampled_edges: usize,
    pub repair_edges: usize,
}

pub fn gen_system(n: usize, p: f64, ap_count: usize, seed: u64) -> TransitionSystem {
    gen_system_with_report(n, p, ap_count, seed).0
}

pub fn gen_system_with_report(n: usize, p: f64, ap_count: usize, seed: u64) -> (TransitionSystem, GenReport) {
    assert!(n >= 1, "a system needs at least one state");
    let p = p.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut succ: Vec<Vec<usize>> = (0..n)
        .map(|_| (0..n).filter(|_| rng.gen_bool(p)).collect())
        .collect();
    let sampled_edges = succ.iter().map(Vec::len).sum();

    let mut repair_edges = 0;
    let mut reached = vec![false; n];
    let mut reached_list = Vec::new();
    let visit = |from: usize, succ: &[Vec<usize>], reached: &mut Vec<bool>, list: &mut Vec<usize>| {
        let mut stack = vec![from];
        reached[from] = true;
        list.push(from);
        while let Some(s) = stack.pop() {
            for &r in &succ[s] {
                if !reached[r] {
                    reached[r] = true;
                    list.push(r);
                    stack.push(r);
                }
            }
        }
    };
    visit(0, &succ, &mut reached, &mut reached_list);
    for u in 0..n {
        if !reached[u] {
            let from = *reached_list.choose(&mut rng).expect("initial state is reached");
            succ[from].push(u);
            repair_edges += 1;
            visit(u, &succ, &mut reached, &mut reached_list);
        }
    }
    for s in succ.iter_mut() {
        if s.is_empty() {
            s.push(rng.gen_range(0..n));
            repair_edges += 1;
        }
    }
    let labels = (0..n)
        .map(|_| (0..ap_count).fold(0u64, |acc, j| acc | (rng.gen_bool(0.5) as u64) << j))
        .collect();
    let t = TransitionSystem::new(ap_names(ap_count), vec![0], succ, labels).expect("generated systems are valid");
    (
        t,
        GenReport {
            sampled_edges,
            repair_edges,
        },
    )
}

/// Parses a prefix pattern such as `"aae"`.
pub fn parse_pattern(pattern: &str) -> Result<Vec<Quantifier>, BenchError> {
    pattern
        .chars()
        .map(|c| match c {
            'a' | 'A' => Ok(Quantifier::Forall),
            'e' | 'E' => Ok(Quantifier::Exists),
            _ => Err(BenchError::Pattern(pattern.into())),
        })
        .collect()
}

/// Samples a closed formula with the given prefix and exactly `body_size`
/// body nodes. Leaves are atoms; inner nodes draw their operator with
/// weights ¬ .1, ∧/∨ .2, X .1, U/R .15, G/F .1 among those that fit the
/// remaining size.
pub fn gen_formula(pattern: &str, body_size: usize, ap_count: usize, seed: u64) -> Result<HyperFormula, BenchError> {
    assert!(body_size >= 1, "body size must be positive");
    let quants = parse_pattern(pattern)?;
    let vars = var_names(quants.len());
    let aps = ap_names(ap_count.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let body = if vars.is_empty() {
        LtlBody::Const(rng.gen_bool(0.5))
    } else {
        sample_body(&mut rng, body_size, &aps, &vars)
    };
    let prefix = quants.into_iter().zip(vars).collect();
    Ok(HyperFormula::new(prefix, body).expect("atoms range over prefix variables"))
}

#[derive(Clone, Copy)]
enum Op {
    Not,
    And,
    Or,
    Next,
    Until,
    Release,
    Globally,
    Eventually,
}

const OPS: [(Op, f64, bool); 8] = [
    (Op::Not, 0.1, false),
    (Op::And, 0.1, true),
    (Op::Or, 0.1, true),
    (Op::Next, 0.1, false),
    (Op::Until, 0.075, true),
    (Op::Release, 0.075, true),
    (Op::Globally, 0.05, false),
    (Op::Eventually, 0.05, false),
];

fn sample_body(rng: &mut ChaCha8Rng, size: usize, aps: &[String], vars: &[TraceVar]) -> LtlBody {
    if size == 1 {
        let prop = aps.choose(rng).expect("nonempty").clone();
        let var = vars.choose(rng).expect("nonempty").clone();
        return LtlBody::atom(prop, var);
    }
    let fits: Vec<(Op, f64, bool)> = OPS.iter().copied().filter(|(_, _, binary)| !binary || size >= 3).collect();
    let (op, _, _) = *fits.choose_weighted(rng, |(_, w, _)| *w).expect("positive weights");
    let unary = |rng: &mut ChaCha8Rng| sample_body(rng, size - 1, aps, vars);
    match op {
        Op::Not => LtlBody::not(unary(rng)),
        Op::Next => LtlBody::next(unary(rng)),
        Op::Globally => LtlBody::globally(unary(rng)),
        Op::Eventually => LtlBody::eventually(unary(rng)),
        _ => {
            let left = rng.gen_range(1..size - 1);
            let a = sample_body(rng, left, aps, vars);
            let b = sample_body(rng, size - 1 - left, aps, vars);
            match op {
                Op::And => LtlBody::and(a, b),
                Op::Or => LtlBody::or(a, b),
                Op::Until => LtlBody::until(a, b),
                _ => LtlBody::release(a, b),
            }
        }
    }
}

/// Files written by [`export_inclusion_instance`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExportedInstance {
    pub files: Vec<PathBuf>,
    /// Formats that were skipped, with the reason.
    pub notices: Vec<String>,
}

/// Writes the inclusion query of a formula with a leading universal block:
/// `<prefix>_system.*` (the self-composition) and `<prefix>_property.*`, in
/// hoa-like format and, when the alphabet is small enough, BA format.
pub fn export_inclusion_instance(
    t: &TransitionSystem,
    f: &HyperFormula,
    prefix: &Path,
) -> Result<ExportedInstance, BenchError> {
    let (sc, prop) = inclusion_instance(t, f, &Budget::default())?;
    let mut out = ExportedInstance::default();
    let path = |side: &str, ext: &str| {
        let mut name = prefix.file_name().map(|s| s.to_os_string()).unwrap_or_default();
        name.push(format!("_{side}.{ext}"));
        prefix.with_file_name(name)
    };
    for (side, a) in [("system", &sc), ("property", &prop)] {
        let p = path(side, "hoa");
        std::fs::write(&p, export(a, ExportFormat::HoaLike)?)?;
        out.files.push(p);
    }
    let ba: Result<Vec<String>, AutomataError> = [&sc, &prop].iter().map(|a| export(a, ExportFormat::Ba)).collect();
    match ba {
        Ok(texts) => {
            for (side, text) in ["system", "property"].into_iter().zip(texts) {
                let p = path(side, "ba");
                std::fs::write(&p, text)?;
                out.files.push(p);
            }
        }
        Err(e @ AutomataError::AlphabetTooLarge { .. }) => out.notices.push(format!("ba skipped: {e}")),
        Err(e) => return Err(e.into()),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_density_gives_complete_digraph() {
        let (t, report) = gen_system_with_report(7, 1.0, 2, 3);
        assert_eq!(t.num_edges(), 49);
        assert_eq!(report.repair_edges, 0);
    }

    #[test]
    fn zero_density_is_repaired() {
        let t = gen_system(12, 0.0, 1, 5);
        assert!(t.reachable().iter().all(|&r| r));
        assert!((0..12).all(|s| !t.successors(s).is_empty()));
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(gen_system(30, 0.1, 3, 42), gen_system(30, 0.1, 3, 42));
        assert_eq!(
            gen_formula("aea", 9, 2, 7).unwrap(),
            gen_formula("aea", 9, 2, 7).unwrap()
        );
    }

    #[test]
    fn formula_shapes() {
        let f = gen_formula("ae", 1, 2, 0).unwrap();
        assert!(matches!(f.body(), LtlBody::Atom { .. }));
        assert_eq!(f.pattern(), "ae");
        for seed in 0..50 {
            assert_eq!(gen_formula("eae", 8, 3, seed).unwrap().body().size(), 8);
        }
        assert!(gen_formula("ax", 3, 1, 0).is_err());
    }
}
