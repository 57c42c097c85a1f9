//! Büchi complementation.
//!
//! Weak automata, where every cycle is either all accepting or all
//! rejecting, are complemented by a breakpoint construction: subsets with
//! the set of runs that still owe a visit to a rejecting state. Every other
//! automaton is determinized into a parity automaton (see `determinize`).
//! The rank-based construction below remains available and drives the
//! antichain inclusion engine.
//!
//! Macro-states are level rankings `f: S → {0..cap}` with odd ranks
//! forbidden on accepting states, plus a cut-point set `O` of even-ranked
//! states that still owe a visit to an odd rank. A macro-state accepts when
//! `O` is empty. Ranks never increase along edges.
//!
//! Successor rankings are restricted to maximal ones: each successor takes
//! the largest admissible rank of its chosen parity. Any accepting run of
//! the full construction is dominated by a run through maximal rankings with
//! the same parities, so the language is unchanged.

use std::collections::{HashMap, VecDeque};
use std::rc::Rc;

use crate::budget::{Budget, ResourceError};

use super::graph::sccs;
use super::guard::{partition, Cube, Guard};
use super::{AutomataError, Nba};

/// One entry of a macro-state: (state, rank, in cut-point set).
pub(crate) type Entry = (u32, u16, bool);

/// Region of the alphabet together with the successor list of every state
/// of a subset, in subset order.
pub(crate) type Regions = Rc<Vec<(Cube, Vec<Vec<u32>>)>>;

/// Alphabet partitions per subset, shared by all rankings of that subset.
pub(crate) struct RegionCache<'a> {
    a: &'a Nba,
    cache: HashMap<Vec<u32>, Regions>,
}

impl<'a> RegionCache<'a> {
    pub(crate) fn new(a: &'a Nba) -> Self {
        RegionCache {
            a,
            cache: HashMap::new(),
        }
    }

    pub(crate) fn regions(&mut self, subset: &[u32]) -> Regions {
        if let Some(r) = self.cache.get(subset) {
            return r.clone();
        }
        let a = self.a;
        let guards: Vec<&Guard> = subset
            .iter()
            .flat_map(|&q| a.transitions(q as usize).iter().map(|(g, _)| g))
            .collect();
        let parts = partition(&guards);
        let regions: Vec<(Cube, Vec<Vec<u32>>)> = parts
            .into_iter()
            .map(|(cube, enabled)| {
                let mut k = 0;
                let succs = subset
                    .iter()
                    .map(|&q| {
                        let mut out = Vec::new();
                        for (_, r) in a.transitions(q as usize) {
                            if enabled[k] {
                                out.push(*r as u32);
                            }
                            k += 1;
                        }
                        out
                    })
                    .collect();
                (cube, succs)
            })
            .collect();
        let r = Rc::new(regions);
        self.cache.insert(subset.to_vec(), r.clone());
        r
    }
}

/// Largest rank cap of the construction: `2 * |Q \ F|`.
pub(crate) fn rank_cap(a: &Nba) -> Result<u16, AutomataError> {
    let k = a.num_states() - a.num_accepting();
    u16::try_from(2 * k).map_err(|_| AutomataError::Resource(ResourceError::SizeCap(a.num_states())))
}

/// Admissible maximal ranks below `bound` for a state.
pub(crate) fn rank_options(bound: u16, accepting: bool) -> ([u16; 2], usize) {
    let even = bound & !1;
    if accepting || bound == 0 {
        ([even, 0], 1)
    } else {
        ([bound, bound - 1], 2)
    }
}

/// Initial macro-states: all parity choices at the cap, empty cut-point set.
pub(crate) fn initial_macros(a: &Nba, cap: u16) -> Vec<Vec<Entry>> {
    let mut init: Vec<u32> = a.initial().iter().map(|&q| q as u32).collect();
    init.sort_unstable();
    init.dedup();
    let options: Vec<([u16; 2], usize)> = init
        .iter()
        .map(|&q| rank_options(cap, a.is_accepting(q as usize)))
        .collect();
    let mut out = Vec::new();
    for_each_choice(&options, |ranks| {
        out.push(init.iter().zip(ranks).map(|(&q, &r)| (q, r, false)).collect());
        true
    });
    out
}

/// Calls `f` with every combination picking one option per position, until
/// `f` returns `false`.
pub(crate) fn for_each_choice(options: &[([u16; 2], usize)], mut f: impl FnMut(&[u16]) -> bool) {
    let mut pick = vec![0usize; options.len()];
    let mut ranks: Vec<u16> = options.iter().map(|(o, _)| o[0]).collect();
    loop {
        if !f(&ranks) {
            return;
        }
        let mut i = 0;
        loop {
            if i == options.len() {
                return;
            }
            pick[i] += 1;
            if pick[i] < options[i].1 {
                ranks[i] = options[i].0[pick[i]];
                break;
            }
            pick[i] = 0;
            ranks[i] = options[i].0[0];
            i += 1;
        }
    }
}

/// Successor data of a macro-state along one region: successor subset with
/// rank bounds and membership in the image of the cut-point set.
pub(crate) fn step_bounds(m: &[Entry], succs: &[Vec<u32>]) -> Vec<(u32, u16, bool)> {
    let mut next: Vec<(u32, u16, bool)> = Vec::new();
    for ((_, rank, in_o), targets) in m.iter().zip(succs) {
        for &r in targets {
            next.push((r, *rank, *in_o));
        }
    }
    next.sort_unstable();
    let mut merged: Vec<(u32, u16, bool)> = Vec::with_capacity(next.len());
    for (q, b, o) in next {
        match merged.last_mut() {
            Some((p, pb, po)) if *p == q => {
                *pb = (*pb).min(b);
                *po |= o;
            }
            _ => merged.push((q, b, o)),
        }
    }
    merged
}

/// All maximal successor macro-states of `m` given the per-state successor
/// lists of one region, until `f` returns `false`.
pub(crate) fn successors(a: &Nba, m: &[Entry], succs: &[Vec<u32>], mut f: impl FnMut(Vec<Entry>) -> bool) {
    let bounds = step_bounds(m, succs);
    let reset = m.iter().all(|(_, _, o)| !o);
    let options: Vec<([u16; 2], usize)> = bounds
        .iter()
        .map(|&(q, b, _)| rank_options(b, a.is_accepting(q as usize)))
        .collect();
    for_each_choice(&options, |ranks| {
        let next: Vec<Entry> = bounds
            .iter()
            .zip(ranks)
            .map(|(&(q, _, from_o), &r)| (q, r, r % 2 == 0 && (reset || from_o)))
            .collect();
        f(next)
    });
}

pub fn complement(a: &Nba) -> Result<Nba, AutomataError> {
    complement_with(a, &Budget::default())
}

/// Complement over the full alphabet `Σⁿ` of `a`.
pub fn complement_with(a: &Nba, budget: &Budget) -> Result<Nba, AutomataError> {
    let a = a.trim();
    if is_weak(&a) {
        breakpoint(&a, budget)
    } else {
        super::determinize::complement_parity(&a, budget)
    }
}

/// Every nontrivial SCC is uniformly accepting or uniformly rejecting.
pub(crate) fn is_weak(a: &Nba) -> bool {
    let succ: Vec<Vec<usize>> = (0..a.num_states())
        .map(|q| a.transitions(q).iter().map(|(_, r)| *r).collect())
        .collect();
    let all: Vec<usize> = (0..a.num_states()).collect();
    sccs(&succ, &all).iter().all(|comp| {
        let first = a.is_accepting(comp[0]);
        comp.iter().all(|&q| a.is_accepting(q) == first)
    })
}

/// Breakpoint complement of a weak automaton. A word is rejected iff every
/// run eventually stays among rejecting states, i.e. visits them infinitely
/// often; the second component holds the runs that have not visited a
/// rejecting state since the last time it was empty.
fn breakpoint(a: &Nba, budget: &Budget) -> Result<Nba, AutomataError> {
    type Macro = (Vec<u32>, Vec<u32>);
    let mut out = Nba::new(a.arity(), a.aps().to_vec())?;
    let mut index: HashMap<Macro, usize> = HashMap::new();
    let mut queue: VecDeque<Macro> = VecDeque::new();
    let mut cache = RegionCache::new(a);
    let mut init: Vec<u32> = a.initial().iter().map(|&q| q as u32).collect();
    init.sort_unstable();
    init.dedup();
    let start = (init, Vec::new());
    let q0 = out.add_state(true);
    out.add_initial(q0);
    index.insert(start.clone(), q0);
    queue.push_back(start);
    let image = |states: &mut dyn Iterator<Item = &Vec<u32>>| {
        let mut v: Vec<u32> = states.flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    while let Some((set, owing)) = queue.pop_front() {
        budget.check(out.num_states())?;
        let src = index[&(set.clone(), owing.clone())];
        let regions = cache.regions(&set);
        for (cube, succs) in regions.iter() {
            let next = image(&mut succs.iter());
            let from: Vec<u32> = if owing.is_empty() {
                next.clone()
            } else {
                image(&mut set.iter().zip(succs).filter(|(q, _)| owing.binary_search(q).is_ok()).map(|(_, s)| s))
            };
            let owing2: Vec<u32> = from.into_iter().filter(|&q| a.is_accepting(q as usize)).collect();
            let key = (next, owing2);
            let dst = match index.get(&key) {
                Some(&q) => q,
                None => {
                    let q = out.add_state(key.1.is_empty());
                    index.insert(key.clone(), q);
                    queue.push_back(key);
                    q
                }
            };
            out.add_transition(src, Guard::cube(*cube), dst);
        }
    }
    Ok(out.hygiene())
}

/// Rank-based complement of an arbitrary automaton.
/// Rank-based complement of any automaton, bypassing the weak and parity
/// paths.
pub fn complement_ranked(a: &Nba, budget: &Budget) -> Result<Nba, AutomataError> {
    ranked(&a.trim(), budget)
}

fn ranked(a: &Nba, budget: &Budget) -> Result<Nba, AutomataError> {
    let cap = rank_cap(a)?;
    let mut out = Nba::new(a.arity(), a.aps().to_vec())?;
    let mut index: HashMap<Vec<Entry>, usize> = HashMap::new();
    let mut queue: VecDeque<Vec<Entry>> = VecDeque::new();
    let mut cache = RegionCache::new(a);

    for m in initial_macros(a, cap) {
        let q = out.add_state(true);
        out.add_initial(q);
        index.insert(m.clone(), q);
        queue.push_back(m);
    }
    while let Some(m) = queue.pop_front() {
        budget.check(out.num_states())?;
        let src = index[&m];
        let subset: Vec<u32> = m.iter().map(|e| e.0).collect();
        let regions = cache.regions(&subset);
        for (cube, succs) in regions.iter() {
            let mut targets = Vec::new();
            let mut failure = None;
            successors(a, &m, succs, |next| {
                if targets.len() % 1024 == 1023 {
                    if let Err(e) = budget.check(out.num_states()) {
                        failure = Some(e);
                        return false;
                    }
                }
                let accepting = next.iter().all(|e| !e.2);
                let q = match index.get(&next) {
                    Some(&q) => q,
                    None => {
                        let q = out.add_state(accepting);
                        index.insert(next.clone(), q);
                        queue.push_back(next);
                        q
                    }
                };
                targets.push(q);
                true
            });
            if let Some(e) = failure {
                return Err(e.into());
            }
            for q in targets {
                out.add_transition(src, Guard::cube(*cube), q);
            }
        }
    }
    Ok(out.hygiene())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{emptiness, intersect, ltl_to_nba, member, LassoWord};
    use crate::formula::{parse_body, TraceVar};

    fn translate(text: &str) -> Nba {
        ltl_to_nba(&parse_body(text).unwrap(), &[TraceVar::new("p")]).unwrap()
    }

    #[test]
    fn universal_complements_to_empty() {
        let u = Nba::universal(1, vec!["a".into()]).unwrap();
        assert!(emptiness(&complement(&u).unwrap()).is_none());
    }

    #[test]
    fn empty_complements_to_universal() {
        let e = Nba::empty(1, vec!["a".into()]).unwrap();
        let c = complement(&e).unwrap();
        for (stem, cycle) in [(vec![], vec![0]), (vec![1], vec![0, 1])] {
            assert!(member(&c, &LassoWord::new(1, vec!["a".into()], stem, cycle).unwrap()));
        }
    }

    #[test]
    fn complement_of_fg_is_gf_not() {
        let a = translate("F G a_p");
        let c = complement(&a).unwrap();
        let aps = a.aps().to_vec();
        let words = [
            (vec![], vec![1]),
            (vec![0], vec![1]),
            (vec![], vec![0, 1]),
            (vec![1, 1], vec![0]),
        ];
        for (stem, cycle) in words {
            let w = LassoWord::new(1, aps.clone(), stem, cycle).unwrap();
            assert_ne!(member(&a, &w), member(&c, &w), "{w}");
        }
        assert!(emptiness(&intersect(&a, &c).unwrap()).is_none());
    }

    #[test]
    fn size_cap_is_reported() {
        let a = translate("G F a_p & F G b_p");
        let tiny = Budget::default().with_cap(1);
        assert!(matches!(
            complement_with(&a, &tiny),
            Err(AutomataError::Resource(ResourceError::SizeCap(1)))
        ));
    }

    fn random_nba(seed: u64) -> Nba {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = Nba::new(1, vec!["a".into()]).unwrap();
        let n = rng.gen_range(1..=4);
        for _ in 0..n {
            a.add_state(rng.gen_bool(0.4));
        }
        a.add_initial(0);
        let guards = [Guard::top(), Guard::cube(Cube::new(1, 0).unwrap()), Guard::cube(Cube::new(0, 1).unwrap())];
        for q in 0..n {
            for r in 0..n {
                if rng.gen_bool(0.45) {
                    a.add_transition(q, guards[rng.gen_range(0..3)].clone(), r);
                }
            }
        }
        a
    }

    fn small_lassos() -> Vec<LassoWord> {
        let words = |len: usize| -> Vec<Vec<u128>> {
            (0..1u32 << len).map(|bits| (0..len).map(|i| (bits >> i & 1) as u128).collect()).collect()
        };
        let mut out = Vec::new();
        for stem_len in 0..=2 {
            for cycle_len in 1..=3 {
                for stem in words(stem_len) {
                    for cycle in words(cycle_len) {
                        out.push(LassoWord::new(1, vec!["a".into()], stem.clone(), cycle).unwrap());
                    }
                }
            }
        }
        out
    }

    #[test]
    fn all_routes_complement_random_automata() {
        let words = small_lassos();
        let budget = Budget::default();
        for seed in 0..300 {
            let a = random_nba(seed);
            let routes = [
                ("default", complement_with(&a, &budget).unwrap()),
                ("ranked", complement_ranked(&a, &budget).unwrap()),
                ("parity", crate::automata::determinize::complement_parity(&a.trim(), &budget).unwrap()),
            ];
            for (name, c) in &routes {
                for w in &words {
                    assert_ne!(member(&a, w), member(c, w), "seed {seed}, {name} route, word {w}");
                }
            }
        }
    }
}
