//! The verification driver.
//!
//! Quantifiers are eliminated from the innermost outwards. The automaton
//! always describes either the remaining formula or its negation, and is
//! complemented only when the next quantifier needs the other polarity, so
//! a prefix with `k` alternations costs `k` complementations. A leading
//! universal block can instead be discharged by one inclusion query of the
//! system's self-composition in the automaton of the rest of the formula.

mod report;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automata::{
    complement_with, emptiness, exists_step_with, intersect_with, ltl_to_nba_over, member, self_composition_over,
    AutomataError, LassoWord, Nba,
};
use crate::budget::{Budget, ResourceError};
use crate::formula::{HyperFormula, LtlBody, Quantifier, TraceVar};
use crate::inclusion::{include, Engine, InclusionError, InclusionStats};
use crate::system::TransitionSystem;

pub use report::{stats_report, ReportFormat, CSV_HEADER};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strategy {
    #[default]
    Auto,
    PureAbv,
    Inclusion,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Auto => "auto",
            Strategy::PureAbv => "pure-abv",
            Strategy::Inclusion => "inclusion",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "pure-abv" => Ok(Strategy::PureAbv),
            "inclusion" => Ok(Strategy::Inclusion),
            other => Err(format!("unknown strategy `{other}` (expected auto, pure-abv or inclusion)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessRole {
    /// Traces for the leading existential block under which the rest holds.
    ExistentialWitness,
    /// Traces for the leading universal block under which the rest fails.
    UniversalCounterexample,
}

impl fmt::Display for WitnessRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessRole::ExistentialWitness => "existential witness",
            WitnessRole::UniversalCounterexample => "universal counterexample",
        })
    }
}

/// Traces for the variables of the leading quantifier block, zipped in
/// prefix order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub role: WitnessRole,
    pub vars: Vec<TraceVar>,
    pub word: LassoWord,
}

/// One intermediate automaton of the elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub step: String,
    pub arity: usize,
    pub states: usize,
    pub transitions: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub strategy: Strategy,
    /// The formula actually checked was the negation of the input.
    pub negated: bool,
    pub complements: usize,
    pub complement_times: Vec<Duration>,
    pub stages: Vec<Stage>,
    pub inclusion: Option<InclusionStats>,
    pub total: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub stats: Stats,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CheckError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error(transparent)]
    Inclusion(#[from] InclusionError),
    #[error("no witness: {0}")]
    NoWitness(String),
    #[error("witness is not a tuple of system traces")]
    InvalidWitness,
    #[error("formula does not start with a universal quantifier")]
    NotUniversal,
}

impl CheckError {
    /// Timeouts, size caps and external-tool failures, as opposed to
    /// malformed input.
    pub fn is_resource(&self) -> bool {
        match self {
            CheckError::Automata(AutomataError::Resource(_)) => true,
            CheckError::Inclusion(InclusionError::Automata(AutomataError::Resource(_))) => true,
            CheckError::Inclusion(InclusionError::External(_)) => true,
            _ => false,
        }
    }

    pub fn is_timeout(&self) -> bool {
        use crate::inclusion::ExternalToolError;
        matches!(
            self,
            CheckError::Automata(AutomataError::Resource(ResourceError::Timeout))
                | CheckError::Inclusion(InclusionError::Automata(AutomataError::Resource(ResourceError::Timeout)))
                | CheckError::Inclusion(InclusionError::External(ExternalToolError::Timeout))
        )
    }
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub strategy: Strategy,
    pub engine: Engine,
    pub budget: Budget,
    /// Also compute a witness on the pure-abv path.
    pub witness: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            strategy: Strategy::Auto,
            engine: Engine::Complement,
            budget: Budget::default(),
            witness: false,
        }
    }
}

impl CheckOptions {
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_engine(mut self, engine: Engine) -> Self {
        self.engine = engine;
        self
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_witness(mut self, witness: bool) -> Self {
        self.witness = witness;
        self
    }
}

/// Whether `auto` takes the inclusion path: some alternation exists to be
/// absorbed.
pub fn inclusion_applies(f: &HyperFormula) -> bool {
    f.alternations() > 0
}

/// Decides `t ⊨ f`.
pub fn check(t: &TransitionSystem, f: &HyperFormula, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let start = Instant::now();
    let strategy = match opts.strategy {
        Strategy::Auto if inclusion_applies(f) => Strategy::Inclusion,
        Strategy::Auto => Strategy::PureAbv,
        s => s,
    };
    let mut run = Run {
        t,
        aps: f.body().props().into_iter().collect(),
        budget: &opts.budget,
        stats: Stats {
            strategy,
            ..Stats::default()
        },
    };
    let mut verdict = match strategy {
        Strategy::Inclusion => run.inclusion(f, &opts.engine)?,
        _ => run.pure_abv(f, opts.witness)?,
    };
    verdict.stats.total = start.elapsed();
    Ok(verdict)
}

/// The two sides of the inclusion query for a formula with a leading
/// universal block of length `n`: the `n`-fold self-composition of `t` and
/// an automaton for the rest of the formula over the block's variables.
pub fn inclusion_instance(t: &TransitionSystem, f: &HyperFormula, budget: &Budget) -> Result<(Nba, Nba), CheckError> {
    let Some((Quantifier::Forall, n)) = f.leading_block() else {
        return Err(CheckError::NotUniversal);
    };
    let mut run = Run {
        t,
        aps: f.body().props().into_iter().collect(),
        budget,
        stats: Stats::default(),
    };
    let (a, _, _) = run.eliminate(f, n, None)?;
    let sc = self_composition_over(t, n, &run.aps, budget)?;
    Ok((sc, a))
}

/// The witness recorded by [`check`], validated against the system.
pub fn extract_witness<'v>(v: &'v Verdict, t: &TransitionSystem) -> Result<&'v Witness, CheckError> {
    let w = v.witness.as_ref().ok_or_else(|| {
        let shape = if v.holds {
            "the formula holds and its leading block is universal"
        } else {
            "the formula fails and its leading block is existential"
        };
        CheckError::NoWitness(shape.into())
    })?;
    if !witness_in_system(t, &w.word)? {
        return Err(CheckError::InvalidWitness);
    }
    Ok(w)
}

/// Whether every component of `w` is a trace of `t` over `w`'s APs.
pub fn witness_in_system(t: &TransitionSystem, w: &LassoWord) -> Result<bool, CheckError> {
    let sc = self_composition_over(t, w.arity(), w.aps(), &Budget::default())?;
    Ok(member(&sc, w))
}

struct Run<'a> {
    t: &'a TransitionSystem,
    aps: Vec<String>,
    budget: &'a Budget,
    stats: Stats,
}

impl Run<'_> {
    fn record(&mut self, step: String, a: &Nba, since: Instant) {
        self.stats.stages.push(Stage {
            step,
            arity: a.arity(),
            states: a.num_states(),
            transitions: a.num_transitions(),
            elapsed: since.elapsed(),
        });
    }

    fn complement(&mut self, a: &Nba) -> Result<Nba, CheckError> {
        let since = Instant::now();
        let c = complement_with(a, self.budget)?;
        self.stats.complements += 1;
        self.stats.complement_times.push(since.elapsed());
        self.record("complement".into(), &c, since);
        Ok(c)
    }

    /// Eliminates `f.prefix()[keep..]` and returns an automaton of arity
    /// `keep` together with its polarity (`true` when it describes the
    /// negation). When `capture` is set, also returns the automaton of arity
    /// `keep + capture` taken right after its polarity was fixed for the
    /// block being eliminated there.
    fn eliminate(
        &mut self,
        f: &HyperFormula,
        keep: usize,
        capture: Option<usize>,
    ) -> Result<(Nba, bool, Option<(Nba, bool)>), CheckError> {
        let prefix = f.prefix();
        let vars = f.vars();
        let mut negated = prefix.len() > keep && prefix[prefix.len() - 1].0 == Quantifier::Forall;
        let body = if negated {
            LtlBody::not(f.body().clone())
        } else {
            f.body().clone()
        };
        let since = Instant::now();
        let mut a = ltl_to_nba_over(&body, &vars, &self.aps, self.budget)?;
        self.record("body".into(), &a, since);
        let mut captured = None;
        for k in (keep..prefix.len()).rev() {
            let (q, v) = &prefix[k];
            let want = *q == Quantifier::Forall;
            if want != negated {
                a = self.complement(&a)?;
                negated = want;
            }
            if capture.map(|c| keep + c) == Some(k + 1) {
                captured = Some((a.clone(), negated));
            }
            let since = Instant::now();
            a = exists_step_with(&a, self.t, self.budget)?;
            self.record(format!("{} {v}", q.keyword()), &a, since);
        }
        Ok((a, negated, captured))
    }

    fn pure_abv(&mut self, f: &HyperFormula, want_witness: bool) -> Result<Verdict, CheckError> {
        let lead = f.leading_block();
        let capture = if want_witness { lead.map(|(_, n)| n) } else { None };
        let (a, negated, captured) = self.eliminate(f, 0, capture)?;
        let nonempty = emptiness(&a).is_some();
        let holds = nonempty != negated;
        let mut witness = None;
        if let (Some((q, n)), Some((a_n, neg_n))) = (lead, captured) {
            // positive for an existential block, negated for a universal one
            debug_assert_eq!(neg_n, q == Quantifier::Forall);
            let role = match (q, holds) {
                (Quantifier::Exists, true) => Some(WitnessRole::ExistentialWitness),
                (Quantifier::Forall, false) => Some(WitnessRole::UniversalCounterexample),
                _ => None,
            };
            if let Some(role) = role {
                let sc = self_composition_over(self.t, n, &self.aps, self.budget)?;
                let product = intersect_with(&sc, &a_n, self.budget)?;
                witness = emptiness(&product).map(|word| Witness {
                    role,
                    vars: f.vars()[..n].to_vec(),
                    word,
                });
            }
        }
        Ok(Verdict {
            holds,
            witness,
            stats: std::mem::take(&mut self.stats),
        })
    }

    fn inclusion(&mut self, f: &HyperFormula, engine: &Engine) -> Result<Verdict, CheckError> {
        let flip = matches!(f.leading_block(), Some((Quantifier::Exists, _)));
        let checked = if flip { f.negate() } else { f.clone() };
        self.stats.negated = flip;
        let n = checked.leading_block().map_or(0, |(_, n)| n);
        let (a, negated, _) = self.eliminate(&checked, n, None)?;
        debug_assert!(!negated, "the block after a universal block is existential");
        let since = Instant::now();
        let sc = self_composition_over(self.t, n, &self.aps, self.budget)?;
        self.record("self-composition".into(), &sc, since);
        let outcome = include(&sc, &a, engine, self.budget)?;
        let holds = outcome.included != flip;
        let role = if flip {
            WitnessRole::ExistentialWitness
        } else {
            WitnessRole::UniversalCounterexample
        };
        let witness = outcome.counterexample.map(|word| Witness {
            role,
            vars: f.vars()[..n].to_vec(),
            word,
        });
        self.stats.inclusion = Some(outcome.stats);
        Ok(Verdict {
            holds,
            witness,
            stats: std::mem::take(&mut self.stats),
        })
    }
}
