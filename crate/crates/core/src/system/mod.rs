//! Finite transition systems `T = (S, S0, κ, L)` with AP-set labels.
//!
//! States are dense indices `0..n`. Labels are bitmasks over the ordered AP
//! list, so at most 64 atomic propositions are supported.

mod format;
pub mod program;

use thiserror::Error;

pub use format::{parse_system, print_system};
pub use program::{explode_program, parse_program, BoolProgram, ProgramError};

/// Maximum number of atomic propositions a system may declare.
pub const MAX_APS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SystemError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `init:` declaration")]
    MissingInit,
    #[error("no initial state")]
    NoInitialState,
    #[error("state {0} has no successor")]
    NoSuccessor(usize),
    #[error("undeclared atomic proposition `{0}`")]
    UndeclaredAp(String),
    #[error("reference to unknown state {0}")]
    UnknownState(usize),
    #[error("atomic proposition `{0}` declared twice")]
    DuplicateAp(String),
    #[error("label of state {0} uses an AP index outside the declared list")]
    LabelOutOfRange(usize),
    #[error("too many atomic propositions ({0}, at most {MAX_APS})")]
    TooManyAps(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    aps: Vec<String>,
    initial: Vec<usize>,
    succ: Vec<Vec<usize>>,
    labels: Vec<u64>,
}

impl TransitionSystem {
    /// Builds a validated system. Successor lists are sorted and deduplicated.
    pub fn new(
        aps: Vec<String>,
        initial: Vec<usize>,
        mut succ: Vec<Vec<usize>>,
        labels: Vec<u64>,
    ) -> Result<Self, SystemError> {
        if aps.len() > MAX_APS {
            return Err(SystemError::TooManyAps(aps.len()));
        }
        for (i, a) in aps.iter().enumerate() {
            if aps[..i].contains(a) {
                return Err(SystemError::DuplicateAp(a.clone()));
            }
        }
        let n = succ.len();
        assert_eq!(labels.len(), n, "one label per state");
        if initial.is_empty() {
            return Err(SystemError::NoInitialState);
        }
        if let Some(&s) = initial.iter().find(|&&s| s >= n) {
            return Err(SystemError::UnknownState(s));
        }
        let ap_mask = if aps.len() == 64 { u64::MAX } else { (1u64 << aps.len()) - 1 };
        for (s, succs) in succ.iter_mut().enumerate() {
            if succs.is_empty() {
                return Err(SystemError::NoSuccessor(s));
            }
            if let Some(&t) = succs.iter().find(|&&t| t >= n) {
                return Err(SystemError::UnknownState(t));
            }
            succs.sort_unstable();
            succs.dedup();
            if labels[s] & !ap_mask != 0 {
                return Err(SystemError::LabelOutOfRange(s));
            }
        }
        let mut initial = initial;
        initial.sort_unstable();
        initial.dedup();
        Ok(TransitionSystem {
            aps,
            initial,
            succ,
            labels,
        })
    }

    pub fn num_states(&self) -> usize {
        self.succ.len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn successors(&self, s: usize) -> &[usize] {
        &self.succ[s]
    }

    pub fn label(&self, s: usize) -> u64 {
        self.labels[s]
    }

    pub fn ap_index(&self, name: &str) -> Option<usize> {
        self.aps.iter().position(|a| a == name)
    }

    pub fn label_names(&self, s: usize) -> Vec<&str> {
        self.aps
            .iter()
            .enumerate()
            .filter(|(i, _)| self.labels[s] >> i & 1 == 1)
            .map(|(_, a)| a.as_str())
            .collect()
    }

    /// Label of `s` re-expressed over another AP list; names unknown to the
    /// system are never present.
    pub fn project_label(&self, s: usize, projection: &[Option<usize>]) -> u64 {
        let l = self.labels[s];
        projection
            .iter()
            .enumerate()
            .filter(|(_, idx)| idx.is_some_and(|i| l >> i & 1 == 1))
            .fold(0, |acc, (j, _)| acc | 1 << j)
    }

    /// Maps each name in `aps` to its index in this system, if declared.
    pub fn projection(&self, aps: &[String]) -> Vec<Option<usize>> {
        aps.iter().map(|a| self.ap_index(a)).collect()
    }

    /// States reachable from the initial states.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<usize> = self.initial.clone();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            for &t in &self.succ[s] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_dead_ends_and_empty_init() {
        let err = TransitionSystem::new(vec![], vec![0], vec![vec![]], vec![0]);
        assert_eq!(err, Err(SystemError::NoSuccessor(0)));
        let err = TransitionSystem::new(vec![], vec![], vec![vec![0]], vec![0]);
        assert_eq!(err, Err(SystemError::NoInitialState));
        let err = TransitionSystem::new(vec!["a".into()], vec![0], vec![vec![0]], vec![2]);
        assert_eq!(err, Err(SystemError::LabelOutOfRange(0)));
    }

    #[test]
    fn projection_drops_unknown_names() {
        let t = TransitionSystem::new(
            vec!["a".into(), "b".into()],
            vec![0],
            vec![vec![0]],
            vec![0b11],
        )
        .unwrap();
        let proj = t.projection(&["b".into(), "z".into(), "a".into()]);
        assert_eq!(t.project_label(0, &proj), 0b101);
        assert_eq!(t.label_names(0), vec!["a", "b"]);
    }
}
