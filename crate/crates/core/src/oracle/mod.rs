//! Reference implementations for differential testing.
//!
//! [`eval`] evaluates an LTL body directly on ultimately periodic traces.
//! [`decide_naive`] decides small HyperLTL instances with explicit-alphabet
//! automata that share no code with [`crate::automata`].

mod explicit;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::automata::LassoWord;
use crate::formula::{HyperFormula, LtlBody, Quantifier, TraceVar};
use crate::system::TransitionSystem;

use explicit::ExNba;

/// Instance bounds accepted by [`decide_naive`].
pub const MAX_STATES: usize = 16;
pub const MAX_QUANTIFIERS: usize = 3;
pub const MAX_BODY_SIZE: usize = 16;
pub const MAX_ALPHABET_BITS: usize = 12;

/// Largest explicit automaton the oracle will build.
pub const MAX_ORACLE_STATES: usize = 200_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("trace variable `{0}` is not assigned")]
    Unbound(String),
    #[error("instance exceeds oracle bounds: {0}")]
    Bounds(String),
    #[error("oracle automaton exceeded {0} states")]
    TooLarge(usize),
}

/// Single-trace lasso words per trace variable, kept on a common stem and
/// loop length so that positions line up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoAssignment {
    traces: BTreeMap<TraceVar, LassoWord>,
    stem: usize,
    period: usize,
}

impl LassoAssignment {
    /// Normalizes every word to stem `max stem` and loop `lcm loop`.
    pub fn new(traces: impl IntoIterator<Item = (TraceVar, LassoWord)>) -> Self {
        let traces: Vec<(TraceVar, LassoWord)> = traces.into_iter().collect();
        let stem = traces.iter().map(|(_, w)| w.stem().len()).max().unwrap_or(0);
        let period = traces.iter().map(|(_, w)| w.cycle().len()).fold(1, lcm);
        let traces = traces
            .into_iter()
            .map(|(v, w)| {
                assert_eq!(w.arity(), 1, "assignments map variables to single traces");
                let at = |i: usize| w.letter_at(i);
                let normal = LassoWord::new(
                    1,
                    w.aps().to_vec(),
                    (0..stem).map(at).collect(),
                    (stem..stem + period).map(at).collect(),
                )
                .expect("normalized loop is nonempty");
                (v, normal)
            })
            .collect();
        LassoAssignment { traces, stem, period }
    }

    /// Splits an arity-`n` word into one trace per variable of `vars`.
    pub fn from_zip(vars: &[TraceVar], w: &LassoWord) -> Self {
        LassoAssignment::new(vars.iter().enumerate().map(|(i, v)| (v.clone(), w.component(i))))
    }

    pub fn get(&self, v: &TraceVar) -> Option<&LassoWord> {
        self.traces.get(v)
    }

    /// Number of distinct position classes.
    pub fn positions(&self) -> usize {
        self.stem + self.period
    }

    fn class(&self, i: usize) -> usize {
        if i < self.stem {
            i
        } else {
            self.stem + (i - self.stem) % self.period
        }
    }

    fn succ(&self, i: usize) -> usize {
        self.class(i + 1)
    }

    fn holds(&self, prop: &str, var: &TraceVar, i: usize) -> Result<bool, OracleError> {
        let w = self
            .traces
            .get(var)
            .ok_or_else(|| OracleError::Unbound(var.to_string()))?;
        Ok(match w.aps().iter().position(|a| a == prop) {
            Some(j) => w.letter_at(i) >> j & 1 == 1,
            None => false,
        })
    }
}

/// Truth of `body` at position `i` of the assignment.
pub fn eval(body: &LtlBody, asg: &LassoAssignment, i: usize) -> Result<bool, OracleError> {
    let values = table(body, asg)?;
    Ok(values[asg.class(i)])
}

/// Truth values of `body` at every position class.
fn table(body: &LtlBody, asg: &LassoAssignment) -> Result<Vec<bool>, OracleError> {
    let n = asg.positions();
    let pointwise = |a: Vec<bool>, b: Vec<bool>, op: fn(bool, bool) -> bool| -> Vec<bool> {
        a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
    };
    // least (init false) or greatest (init true) fixpoint of
    // v[i] = now[i] || (keep[i] && v[succ i])   resp.   now[i] && (keep[i] || v[succ i])
    let fixpoint = |least: bool, a: &[bool], b: &[bool]| -> Vec<bool> {
        let mut v = vec![!least; n];
        loop {
            let mut changed = false;
            for i in (0..n).rev() {
                let next = v[asg.succ(i)];
                let new = if least { b[i] || (a[i] && next) } else { b[i] && (a[i] || next) };
                if new != v[i] {
                    v[i] = new;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    };
    Ok(match body {
        LtlBody::Const(b) => vec![*b; n],
        LtlBody::Atom { prop, var } => (0..n).map(|i| asg.holds(prop, var, i)).collect::<Result<_, _>>()?,
        LtlBody::Not(a) => table(a, asg)?.into_iter().map(|x| !x).collect(),
        LtlBody::And(a, b) => pointwise(table(a, asg)?, table(b, asg)?, |x, y| x && y),
        LtlBody::Or(a, b) => pointwise(table(a, asg)?, table(b, asg)?, |x, y| x || y),
        LtlBody::Implies(a, b) => pointwise(table(a, asg)?, table(b, asg)?, |x, y| !x || y),
        LtlBody::Iff(a, b) => pointwise(table(a, asg)?, table(b, asg)?, |x, y| x == y),
        LtlBody::Next(a) => {
            let v = table(a, asg)?;
            (0..n).map(|i| v[asg.succ(i)]).collect()
        }
        LtlBody::Eventually(a) => fixpoint(true, &vec![true; n], &table(a, asg)?),
        LtlBody::Globally(a) => fixpoint(false, &vec![false; n], &table(a, asg)?),
        LtlBody::Until(a, b) => fixpoint(true, &table(a, asg)?, &table(b, asg)?),
        // a R b: b holds up to and including the first a
        LtlBody::Release(a, b) => fixpoint(false, &table(a, asg)?, &table(b, asg)?),
        // a W b = (a U b) | G a: greatest fixpoint of b || (a && next)
        LtlBody::WeakUntil(a, b) => {
            let (a, b) = (table(a, asg)?, table(b, asg)?);
            let mut v = vec![true; n];
            loop {
                let mut changed = false;
                for i in (0..n).rev() {
                    let new = b[i] || (a[i] && v[asg.succ(i)]);
                    if new != v[i] {
                        v[i] = new;
                        changed = true;
                    }
                }
                if !changed {
                    break v;
                }
            }
        }
    })
}

/// Decides `t ⊨ f` by explicit quantifier elimination.
pub fn decide_naive(t: &TransitionSystem, f: &HyperFormula) -> Result<bool, OracleError> {
    let props: Vec<String> = f.body().props().into_iter().collect();
    let n = f.prefix().len();
    if t.num_states() > MAX_STATES {
        return Err(OracleError::Bounds(format!("{} system states (max {MAX_STATES})", t.num_states())));
    }
    if n > MAX_QUANTIFIERS {
        return Err(OracleError::Bounds(format!("{n} quantifiers (max {MAX_QUANTIFIERS})")));
    }
    if f.body().size() > MAX_BODY_SIZE {
        return Err(OracleError::Bounds(format!(
            "body size {} (max {MAX_BODY_SIZE})",
            f.body().size()
        )));
    }
    if n * props.len() > MAX_ALPHABET_BITS {
        return Err(OracleError::Bounds(format!(
            "alphabet of 2^{} letters (max 2^{MAX_ALPHABET_BITS})",
            n * props.len()
        )));
    }
    let vars: Vec<TraceVar> = f.prefix().iter().map(|(_, v)| v.clone()).collect();
    // labels over the body's propositions, looked up by name
    let labels: Vec<usize> = (0..t.num_states())
        .map(|s| {
            let names = t.label_names(s);
            props
                .iter()
                .enumerate()
                .filter(|(_, p)| names.contains(&p.as_str()))
                .fold(0, |acc, (j, _)| acc | 1 << j)
        })
        .collect();

    // The automaton describes the innermost remaining formula, or its
    // negation when `negated` is set.
    let innermost = f.prefix().last().map(|(q, _)| *q);
    let mut negated = innermost == Some(Quantifier::Forall);
    let body = if negated {
        LtlBody::not(f.body().clone())
    } else {
        f.body().clone()
    };
    let mut a = ExNba::from_ltl(&body, &vars, &props)?;
    for (k, (q, _)) in f.prefix().iter().enumerate().rev() {
        // an existential step needs a positive automaton, a universal one
        // a negated automaton
        let want_negated = *q == Quantifier::Forall;
        if want_negated != negated {
            a = a.complement()?;
            negated = want_negated;
        }
        a = a.exists(t, &labels, props.len(), k)?;
    }
    let nonempty = a.nonempty();
    Ok(if negated { !nonempty } else { nonempty })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}
