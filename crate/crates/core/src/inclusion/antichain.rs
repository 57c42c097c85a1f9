//! On-the-fly inclusion over `A × complement(B)` without building the
//! complement.
//!
//! Product nodes pair a state of `A` with a ranking macro-state of `B`, or
//! with a breakpoint macro-state (all ranks zero) when `B` is weak. A
//! first pass prunes every new node that is subsumed by a visited node with
//! the same `A` state, a smaller subset, pointwise larger ranks and a
//! smaller cut-point set. Lassos found by the pruned
//! pass are checked by membership before being reported. When the pruned
//! pass finds no valid lasso, an exact pass without pruning decides.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use crate::automata::complement::{initial_macros, is_weak, rank_cap, step_bounds, successors, Entry, RegionCache};
use crate::automata::graph::{bfs_path, sccs};
use crate::automata::{merge_aps, AutomataError, Cube, LassoWord, Nba};
use crate::budget::Budget;

use super::{is_counterexample, InclusionError, InclusionOutcome, InclusionStats};

type Node = (usize, Vec<Entry>);

struct Product {
    nodes: Vec<Node>,
    edges: Vec<Vec<(usize, Cube)>>,
    index: HashMap<Node, usize>,
    /// Nodes per `A` state, for subsumption lookups.
    by_state: HashMap<usize, Vec<usize>>,
}

impl Product {
    fn new() -> Self {
        Product {
            nodes: Vec::new(),
            edges: Vec::new(),
            index: HashMap::new(),
            by_state: HashMap::new(),
        }
    }

    fn insert(&mut self, node: Node) -> (usize, bool) {
        if let Some(&i) = self.index.get(&node) {
            return (i, false);
        }
        let i = self.nodes.len();
        self.by_state.entry(node.0).or_default().push(i);
        self.index.insert(node.clone(), i);
        self.nodes.push(node);
        self.edges.push(Vec::new());
        (i, true)
    }

    /// A visited node whose macro-state dominates `m`.
    fn dominator(&self, p: usize, m: &[Entry]) -> Option<usize> {
        self.by_state
            .get(&p)?
            .iter()
            .copied()
            .find(|&i| dominates(&self.nodes[i].1, m))
    }
}

/// `d` has a subset of the states of `m`, each with at least the same rank.
fn dominates(d: &[Entry], m: &[Entry]) -> bool {
    if d.len() > m.len() {
        return false;
    }
    let mut j = 0;
    for &(q, r, o) in d {
        while j < m.len() && m[j].0 < q {
            j += 1;
        }
        if j == m.len() || m[j].0 != q || m[j].1 > r || (o && !m[j].2) {
            return false;
        }
    }
    true
}

/// How macro-states of `B` are built.
#[derive(Clone, Copy)]
enum Macros {
    Breakpoint,
    Ranked(u16),
}

impl Macros {
    fn for_automaton(b: &Nba) -> Result<Macros, AutomataError> {
        Ok(if is_weak(b) { Macros::Breakpoint } else { Macros::Ranked(rank_cap(b)?) })
    }

    fn initial(self, b: &Nba) -> Vec<Vec<Entry>> {
        match self {
            Macros::Ranked(cap) => initial_macros(b, cap),
            Macros::Breakpoint => initial_macros(b, 0),
        }
    }

    fn successors(self, b: &Nba, m: &[Entry], succs: &[Vec<u32>], mut f: impl FnMut(Vec<Entry>) -> bool) {
        match self {
            Macros::Ranked(_) => successors(b, m, succs, f),
            Macros::Breakpoint => {
                let reset = m.iter().all(|e| !e.2);
                let next = step_bounds(m, succs)
                    .into_iter()
                    .map(|(q, _, from_o)| (q, 0, b.is_accepting(q as usize) && (reset || from_o)))
                    .collect();
                f(next);
            }
        }
    }
}

fn explore(a: &Nba, b: &Nba, macros: Macros, budget: &Budget, prune: bool) -> Result<Product, AutomataError> {
    let mut cache = RegionCache::new(b);
    let mut g = Product::new();
    let mut queue = VecDeque::new();
    for &p in a.initial() {
        for m in macros.initial(b) {
            let (i, fresh) = g.insert((p, m));
            if fresh {
                queue.push_back(i);
            }
        }
    }
    let roots: Vec<usize> = (0..g.nodes.len()).collect();
    debug_assert_eq!(roots.len(), queue.len());
    while let Some(i) = queue.pop_front() {
        budget.check(g.nodes.len())?;
        let (p, m) = g.nodes[i].clone();
        let subset: Vec<u32> = m.iter().map(|e| e.0).collect();
        let regions = cache.regions(&subset);
        for (guard, p2) in a.transitions(p) {
            for (region, succs) in regions.iter() {
                let label = guard.and_cube(*region);
                let Some(&cube) = label.cubes().first() else {
                    continue;
                };
                let mut targets = Vec::new();
                let mut failure = None;
                macros.successors(b, &m, succs, |m2| {
                    if targets.len() % 1024 == 1023 {
                        if let Err(e) = budget.check(g.nodes.len() + targets.len()) {
                            failure = Some(e);
                            return false;
                        }
                    }
                    targets.push(m2);
                    true
                });
                if let Some(e) = failure {
                    return Err(e.into());
                }
                for m2 in targets {
                    let j = match g.index.get(&(*p2, m2.clone())) {
                        Some(&j) => j,
                        None => match prune.then(|| g.dominator(*p2, &m2)).flatten() {
                            Some(j) => j,
                            None => {
                                let (j, _) = g.insert((*p2, m2));
                                queue.push_back(j);
                                j
                            }
                        },
                    };
                    g.edges[i].push((j, cube));
                }
            }
        }
    }
    Ok(g)
}

/// An accepting lasso of the product: some SCC must contain an accepting
/// `A` state and an empty cut-point set.
fn find_lasso(a: &Nba, g: &Product, num_roots: usize, arity: usize, aps: &[String]) -> Option<LassoWord> {
    let succ: Vec<Vec<usize>> = g.edges.iter().map(|e| e.iter().map(|(j, _)| *j).collect()).collect();
    let roots: Vec<usize> = (0..num_roots).collect();
    let acc_a = |i: usize| a.is_accepting(g.nodes[i].0);
    let acc_b = |i: usize| g.nodes[i].1.iter().all(|e| !e.2);
    for comp in sccs(&succ, &roots) {
        let nontrivial = comp.len() > 1 || succ[comp[0]].contains(&comp[0]);
        if !nontrivial {
            continue;
        }
        let (Some(&fa), Some(&fb)) = (comp.iter().find(|&&i| acc_a(i)), comp.iter().find(|&&i| acc_b(i))) else {
            continue;
        };
        let mut in_comp = vec![false; g.nodes.len()];
        for &i in &comp {
            in_comp[i] = true;
        }
        let inside = |i: usize| in_comp[i];
        let stem = bfs_path(&succ, &roots, fa, false, |_| true)?;
        let to_b = bfs_path(&succ, &[fa], fb, fa == fb, inside)?;
        let back = bfs_path(&succ, &[fb], fa, fa != fb || to_b.len() == 1, inside)?;
        let mut cycle = to_b;
        cycle.extend_from_slice(&back[1..]);
        let letters = |path: &[usize]| -> Vec<u128> {
            path.windows(2)
                .map(|w| {
                    let (_, c) = g.edges[w[0]].iter().find(|(j, _)| *j == w[1]).expect("path edge");
                    c.model()
                })
                .collect()
        };
        return LassoWord::new(arity, aps.to_vec(), letters(&stem), letters(&cycle)).ok();
    }
    None
}

pub fn include_antichain(a: &Nba, b: &Nba) -> Result<InclusionOutcome, InclusionError> {
    include_antichain_with(a, b, &Budget::default())
}

pub fn include_antichain_with(a: &Nba, b: &Nba, budget: &Budget) -> Result<InclusionOutcome, InclusionError> {
    if a.arity() != b.arity() {
        return Err(AutomataError::ArityMismatch(a.arity(), b.arity()).into());
    }
    let start = Instant::now();
    let aps = merge_aps(a.aps(), b.aps());
    let a = a.with_aps(&aps)?;
    let b = b.with_aps(&aps)?;
    let macros = Macros::for_automaton(&b)?;
    let num_roots = a.initial().len() * macros.initial(&b).len();
    let mut explored = 0;
    for prune in [true, false] {
        let g = explore(&a, &b, macros, budget, prune)?;
        explored += g.nodes.len();
        match find_lasso(&a, &g, num_roots, a.arity(), &aps) {
            Some(w) if is_counterexample(&a, &b, &w) => {
                return Ok(outcome(false, Some(w), explored, start));
            }
            Some(_) if !prune => unreachable!("exact product lassos are genuine counterexamples"),
            _ => {}
        }
        if !prune {
            break;
        }
    }
    Ok(outcome(true, None, explored, start))
}

fn outcome(included: bool, counterexample: Option<LassoWord>, explored: usize, start: Instant) -> InclusionOutcome {
    InclusionOutcome {
        included,
        counterexample,
        stats: InclusionStats {
            engine: "antichain".into(),
            states_explored: explored,
            elapsed: start.elapsed(),
            complement_time: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universal_cases() {
        let u = Nba::universal(1, vec!["a".into()]).unwrap();
        let e = Nba::empty(1, vec!["a".into()]).unwrap();
        assert!(include_antichain(&e, &u).unwrap().included);
        assert!(include_antichain(&u, &u).unwrap().included);
        let out = include_antichain(&u, &e).unwrap();
        assert!(!out.included);
        assert!(out.counterexample.is_some());
    }

    #[test]
    fn domination_order() {
        let big = vec![(0, 2, false), (1, 1, true), (3, 0, false)];
        assert!(dominates(&[(1, 3, false)], &big));
        assert!(!dominates(&[(1, 0, false)], &big));
        assert!(!dominates(&[(2, 4, false)], &big));
        assert!(dominates(&big, &big));
        assert!(dominates(&[(0, 2, false)], &big));
        assert!(!dominates(&[(0, 2, true)], &big));
    }
}
