//! Büchi automata over the product alphabet `Σⁿ` with symbolic DNF guards.
//!
//! An automaton of arity `n` over the AP list `aps` reads letters that assign
//! every pair (trace index `i < n`, AP) a truth value. Variable
//! `i * aps.len() + a` is the AP `aps[a]` on trace `i`.

pub(crate) mod complement;
mod determinize;
mod emptiness;
pub mod export;
pub(crate) mod graph;
pub mod guard;
mod lasso;
mod ltl2nba;
mod ops;

use std::collections::HashMap;

use thiserror::Error;

use crate::budget::ResourceError;

pub use complement::{complement, complement_ranked, complement_with};
pub use emptiness::{emptiness, member};
pub use export::{export, parse_ba, parse_hoa, ExportFormat};
pub use guard::{Cube, Guard, Letter, MAX_VARS};
pub use lasso::{LassoWord, WordError};
pub use ltl2nba::{ltl_to_nba, ltl_to_nba_over};
pub use ops::{
    exists_step, exists_step_with, intersect, intersect_with, self_composition, self_composition_over,
    union,
};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AutomataError {
    #[error("{vars} indexed propositions exceed the limit of {MAX_VARS}")]
    TooManyVariables { vars: usize },
    #[error(transparent)]
    Resource(#[from] ResourceError),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("trace variable `{0}` is not in the variable order")]
    UnboundVar(String),
    #[error("exists_step needs an automaton of arity at least 1")]
    ZeroArity,
    #[error("alphabet too large: {bits} propositions (explicit formats support at most {max})")]
    AlphabetTooLarge { bits: usize, max: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nba {
    arity: usize,
    aps: Vec<String>,
    initial: Vec<usize>,
    accepting: Vec<bool>,
    trans: Vec<Vec<(Guard, usize)>>,
}

impl Nba {
    /// An automaton with no states, accepting nothing.
    pub fn new(arity: usize, aps: Vec<String>) -> Result<Nba, AutomataError> {
        let vars = arity * aps.len();
        if vars > MAX_VARS {
            return Err(AutomataError::TooManyVariables { vars });
        }
        Ok(Nba {
            arity,
            aps,
            initial: Vec::new(),
            accepting: Vec::new(),
            trans: Vec::new(),
        })
    }

    /// One accepting state with a `true` self-loop.
    pub fn universal(arity: usize, aps: Vec<String>) -> Result<Nba, AutomataError> {
        let mut a = Nba::new(arity, aps)?;
        let q = a.add_state(true);
        a.add_initial(q);
        a.add_transition(q, Guard::top(), q);
        Ok(a)
    }

    pub fn empty(arity: usize, aps: Vec<String>) -> Result<Nba, AutomataError> {
        Nba::new(arity, aps)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn num_vars(&self) -> usize {
        self.arity * self.aps.len()
    }

    /// Mask of all variables of this automaton.
    pub fn var_mask(&self) -> u128 {
        mask_of(self.num_vars())
    }

    /// Mask of the variables belonging to trace index `i`.
    pub fn index_mask(&self, i: usize) -> u128 {
        mask_of(self.aps.len()) << (i * self.aps.len())
    }

    pub fn var(&self, index: usize, ap: usize) -> usize {
        index * self.aps.len() + ap
    }

    /// Variable names in bit order, `ap@index`.
    pub fn var_names(&self) -> Vec<String> {
        (0..self.arity)
            .flat_map(|i| self.aps.iter().map(move |a| format!("{a}@{i}")))
            .collect()
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn num_accepting(&self) -> usize {
        self.accepting.iter().filter(|&&b| b).count()
    }

    pub fn all_accepting(&self) -> bool {
        self.accepting.iter().all(|&b| b)
    }

    pub fn transitions(&self, q: usize) -> &[(Guard, usize)] {
        &self.trans[q]
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.accepting.push(accepting);
        self.trans.push(Vec::new());
        self.trans.len() - 1
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn add_initial(&mut self, q: usize) {
        if !self.initial.contains(&q) {
            self.initial.push(q);
        }
    }

    /// Adds `q --g--> r`, merging with an existing edge to `r`.
    pub fn add_transition(&mut self, q: usize, g: Guard, r: usize) {
        if g.is_false() {
            return;
        }
        debug_assert!(g.support() & !self.var_mask() == 0, "guard outside alphabet");
        let edges = &mut self.trans[q];
        match edges.iter_mut().find(|(_, t)| *t == r) {
            Some((old, _)) => *old = old.or(&g),
            None => edges.push((g, r)),
        }
    }

    /// Re-expresses the automaton over a superset AP list; propositions
    /// absent from `aps` must not occur in any guard.
    pub fn with_aps(&self, aps: &[String]) -> Result<Nba, AutomataError> {
        if aps == self.aps.as_slice() {
            return Ok(self.clone());
        }
        let vars = self.arity * aps.len();
        if vars > MAX_VARS {
            return Err(AutomataError::TooManyVariables { vars });
        }
        let m = self.aps.len();
        let pos: Vec<usize> = self
            .aps
            .iter()
            .map(|a| aps.iter().position(|b| b == a).expect("target AP list is a superset"))
            .collect();
        let map = |v: usize| (v / m) * aps.len() + pos[v % m];
        Ok(Nba {
            arity: self.arity,
            aps: aps.to_vec(),
            initial: self.initial.clone(),
            accepting: self.accepting.clone(),
            trans: self
                .trans
                .iter()
                .map(|edges| edges.iter().map(|(g, r)| (g.map_vars(map), *r)).collect())
                .collect(),
        })
    }

    /// Removes states that are unreachable or cannot reach an accepting
    /// cycle. The language is unchanged.
    pub fn trim(&self) -> Nba {
        let n = self.num_states();
        let succ: Vec<Vec<usize>> = self
            .trans
            .iter()
            .map(|edges| edges.iter().map(|(_, r)| *r).collect())
            .collect();
        let reach = graph::reachable(&succ, &self.initial);
        let comps = graph::sccs(&succ, &self.initial);
        let mut good = vec![false; n];
        for comp in &comps {
            let nontrivial = comp.len() > 1 || succ[comp[0]].contains(&comp[0]);
            if nontrivial && comp.iter().any(|&q| self.accepting[q]) {
                for &q in comp {
                    good[q] = true;
                }
            }
        }
        // backward closure from good SCCs, restricted to reachable states
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (q, s) in succ.iter().enumerate() {
            for &r in s {
                pred[r].push(q);
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&q| good[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &pred[q] {
                if !good[p] && reach[p] {
                    good[p] = true;
                    stack.push(p);
                }
            }
        }
        let keep: Vec<bool> = (0..n).map(|q| good[q] && reach[q]).collect();
        self.restrict(&keep)
    }

    /// Keeps only the states marked in `keep`, renumbering densely.
    fn restrict(&self, keep: &[bool]) -> Nba {
        let mut index = vec![usize::MAX; self.num_states()];
        let mut out = Nba {
            arity: self.arity,
            aps: self.aps.clone(),
            initial: Vec::new(),
            accepting: Vec::new(),
            trans: Vec::new(),
        };
        for q in 0..self.num_states() {
            if keep[q] {
                index[q] = out.add_state(self.accepting[q]);
            }
        }
        for &q in &self.initial {
            if keep[q] {
                out.add_initial(index[q]);
            }
        }
        for q in 0..self.num_states() {
            if !keep[q] {
                continue;
            }
            for (g, r) in &self.trans[q] {
                if keep[*r] {
                    out.trans[index[q]].push((g.clone(), index[*r]));
                }
            }
        }
        out
    }

    /// Quotients by the coarsest bisimulation that respects acceptance and
    /// guards. Language-preserving; used to keep intermediate results small.
    pub fn reduce(&self) -> Nba {
        let n = self.num_states();
        if n == 0 {
            return self.clone();
        }
        let mut block: Vec<usize> = self.accepting.iter().map(|&b| b as usize).collect();
        let mut count = usize::MAX;
        loop {
            let mut sigs: HashMap<(usize, Vec<(usize, Guard)>), usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in 0..n {
                let mut by_block: Vec<(usize, Guard)> = Vec::new();
                for (g, r) in &self.trans[q] {
                    let b = block[*r];
                    match by_block.iter_mut().find(|(x, _)| *x == b) {
                        Some((_, old)) => *old = old.or(g),
                        None => by_block.push((b, g.clone())),
                    }
                }
                by_block.sort();
                let key = (block[q], by_block);
                let len = sigs.len();
                next[q] = *sigs.entry(key).or_insert(len);
            }
            let new_count = sigs.len();
            block = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        let mut out = Nba {
            arity: self.arity,
            aps: self.aps.clone(),
            initial: Vec::new(),
            accepting: vec![false; count],
            trans: vec![Vec::new(); count],
        };
        let mut done = vec![false; count];
        for q in 0..n {
            let b = block[q];
            out.accepting[b] = self.accepting[q];
            if done[b] {
                continue;
            }
            done[b] = true;
            for (g, r) in &self.trans[q] {
                out.add_transition(b, g.clone(), block[*r]);
            }
        }
        for &q in &self.initial {
            out.add_initial(block[q]);
        }
        out
    }

    /// Trim followed by bisimulation reduction.
    pub fn hygiene(&self) -> Nba {
        self.trim().reduce()
    }
}

pub(crate) fn mask_of(bits: usize) -> u128 {
    if bits >= 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

/// Union of two AP lists, keeping the order of `a` and appending new names
/// from `b` in their order.
pub fn merge_aps(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = a.to_vec();
    for x in b {
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aps(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn trim_drops_useless_states() {
        let mut a = Nba::new(1, aps(&["a"])).unwrap();
        let q0 = a.add_state(false);
        let q1 = a.add_state(true);
        let dead = a.add_state(true);
        let unreachable = a.add_state(true);
        a.add_initial(q0);
        a.add_transition(q0, Guard::top(), q1);
        a.add_transition(q1, Guard::top(), q1);
        a.add_transition(q0, Guard::top(), dead);
        a.add_transition(unreachable, Guard::top(), unreachable);
        let t = a.trim();
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.num_accepting(), 1);
    }

    #[test]
    fn reduce_merges_equivalent_states() {
        let mut a = Nba::new(1, aps(&["a"])).unwrap();
        let q0 = a.add_state(true);
        let q1 = a.add_state(true);
        a.add_initial(q0);
        a.add_transition(q0, Guard::top(), q1);
        a.add_transition(q1, Guard::top(), q0);
        let r = a.reduce();
        assert_eq!(r.num_states(), 1);
        assert_eq!(r.transitions(0), &[(Guard::top(), 0)]);
    }

    #[test]
    fn with_aps_moves_variables() {
        let mut a = Nba::new(2, aps(&["b"])).unwrap();
        let q = a.add_state(true);
        a.add_initial(q);
        // b@1
        a.add_transition(q, Guard::cube(Cube { pos: 0b10, neg: 0 }), q);
        let w = a.with_aps(&aps(&["a", "b"])).unwrap();
        // b@1 is variable 1*2+1 = 3
        assert_eq!(w.transitions(0)[0].0, Guard::cube(Cube { pos: 0b1000, neg: 0 }));
    }

    #[test]
    fn too_many_variables_rejected() {
        let names: Vec<String> = (0..65).map(|i| format!("p{i}")).collect();
        assert!(matches!(
            Nba::new(2, names),
            Err(AutomataError::TooManyVariables { vars: 130 })
        ));
    }
}
