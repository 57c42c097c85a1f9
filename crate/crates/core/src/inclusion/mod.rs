//! Language inclusion `L(A) ⊆ L(B)` between equal-arity automata.
//!
//! Three engines: explicit complementation of `B` followed by an emptiness
//! check, an on-the-fly rank-based search with subsumption pruning, and an
//! external tool driven through BA files.

mod antichain;
mod external;

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::automata::{complement_with, emptiness, intersect_with, member, AutomataError, LassoWord, Nba};
use crate::budget::Budget;

pub use antichain::{include_antichain, include_antichain_with};
pub use external::{format_cex, include_external, include_external_with, parse_output, ExternalToolError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum InclusionError {
    #[error(transparent)]
    Automata(#[from] AutomataError),
    #[error("external tool: {0}")]
    External(#[from] ExternalToolError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Engine {
    Complement,
    Antichain,
    /// Command template with `{A}` and `{B}` placeholders.
    External(String),
}

impl Engine {
    pub fn name(&self) -> &str {
        match self {
            Engine::Complement => "complement",
            Engine::Antichain => "antichain",
            Engine::External(_) => "external",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Engine::External(cmd) => write!(f, "external:{cmd}"),
            e => f.write_str(e.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionStats {
    pub engine: String,
    pub states_explored: usize,
    pub elapsed: Duration,
    /// Time spent building the complement of `B`, when one is built.
    pub complement_time: Option<Duration>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionOutcome {
    pub included: bool,
    /// A word of `L(A) \ L(B)`; present iff not included, except that
    /// external tools may omit it.
    pub counterexample: Option<LassoWord>,
    pub stats: InclusionStats,
}

/// Dispatches to the selected engine.
pub fn include(a: &Nba, b: &Nba, engine: &Engine, budget: &Budget) -> Result<InclusionOutcome, InclusionError> {
    match engine {
        Engine::Complement => include_complement_with(a, b, budget),
        Engine::Antichain => include_antichain_with(a, b, budget),
        Engine::External(cmd) => include_external_with(a, b, cmd, budget),
    }
}

pub fn include_complement(a: &Nba, b: &Nba) -> Result<InclusionOutcome, InclusionError> {
    include_complement_with(a, b, &Budget::default())
}

/// `L(A) ⊆ L(B)` iff `A ∩ complement(B)` is empty.
pub fn include_complement_with(a: &Nba, b: &Nba, budget: &Budget) -> Result<InclusionOutcome, InclusionError> {
    if a.arity() != b.arity() {
        return Err(AutomataError::ArityMismatch(a.arity(), b.arity()).into());
    }
    let start = Instant::now();
    let cb = complement_with(b, budget)?;
    let complement_time = start.elapsed();
    let product = intersect_with(a, &cb, budget)?;
    let counterexample = emptiness(&product);
    Ok(InclusionOutcome {
        included: counterexample.is_none(),
        counterexample,
        stats: InclusionStats {
            engine: "complement".into(),
            states_explored: cb.num_states() + product.num_states(),
            elapsed: start.elapsed(),
            complement_time: Some(complement_time),
        },
    })
}

/// Whether `w` separates the languages: `w ∈ L(A)` and `w ∉ L(B)`.
pub fn is_counterexample(a: &Nba, b: &Nba, w: &LassoWord) -> bool {
    member(a, w) && !member(b, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::ltl_to_nba;
    use crate::formula::{parse_body, TraceVar};
    use crate::oracle::{eval, LassoAssignment};

    fn translate(text: &str) -> Nba {
        ltl_to_nba(&parse_body(text).unwrap(), &[TraceVar::new("p")]).unwrap()
    }

    #[test]
    fn reflexive_and_empty_left() {
        let a = translate("G F a_p");
        assert!(include_complement(&a, &a).unwrap().included);
        let e = Nba::empty(1, vec![]).unwrap();
        assert!(include_complement(&e, &a).unwrap().included);
    }

    #[test]
    fn eventually_not_included_in_globally() {
        let f = translate("F a_p");
        let g = translate("G a_p");
        for engine in [Engine::Complement, Engine::Antichain] {
            let out = include(&f, &g, &engine, &Budget::default()).unwrap();
            assert!(!out.included);
            let cx = out.counterexample.unwrap();
            assert!(is_counterexample(&f, &g, &cx));
            let asg = LassoAssignment::from_zip(&[TraceVar::new("p")], &cx);
            let body = parse_body("F a_p & !G a_p").unwrap();
            assert!(eval(&body, &asg, 0).unwrap());
        }
    }
}
