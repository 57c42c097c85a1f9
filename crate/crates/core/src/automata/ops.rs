//! Product constructions: existential projection against a system,
//! intersection, union and self-composition.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use crate::budget::Budget;
use crate::system::TransitionSystem;

use super::guard::{Cube, Guard};
use super::{merge_aps, AutomataError, Nba};

/// Breadth-first product exploration with a state index.
struct Explorer<K> {
    index: HashMap<K, usize>,
    queue: VecDeque<K>,
}

impl<K: Clone + Eq + Hash> Explorer<K> {
    fn new() -> Self {
        Explorer {
            index: HashMap::new(),
            queue: VecDeque::new(),
        }
    }

    fn state(&mut self, out: &mut Nba, key: K, accepting: bool) -> usize {
        if let Some(&q) = self.index.get(&key) {
            return q;
        }
        let q = out.add_state(accepting);
        self.index.insert(key.clone(), q);
        self.queue.push_back(key);
        q
    }

    fn pop(&mut self) -> Option<(K, usize)> {
        let k = self.queue.pop_front()?;
        let q = self.index[&k];
        Some((k, q))
    }
}

/// Eliminates the last trace index by guessing a trace of `t` for it.
pub fn exists_step(a: &Nba, t: &TransitionSystem) -> Result<Nba, AutomataError> {
    exists_step_with(a, t, &Budget::default())
}

pub fn exists_step_with(a: &Nba, t: &TransitionSystem, budget: &Budget) -> Result<Nba, AutomataError> {
    let n = a.arity();
    if n == 0 {
        return Err(AutomataError::ZeroArity);
    }
    let m = a.aps().len();
    let shift = (n - 1) * m;
    let vars = a.index_mask(n - 1);
    let proj = t.projection(a.aps());
    let label: Vec<u128> = (0..t.num_states())
        .map(|s| (t.project_label(s, &proj) as u128) << shift)
        .collect();

    let mut out = Nba::new(n - 1, a.aps().to_vec())?;
    let mut ex: Explorer<(usize, usize)> = Explorer::new();
    // partial evaluations per (automaton state, label value)
    let mut cache: HashMap<(usize, u128), Vec<(Guard, usize)>> = HashMap::new();
    for &s in t.initial() {
        for &q in a.initial() {
            let p = ex.state(&mut out, (s, q), a.is_accepting(q));
            out.add_initial(p);
        }
    }
    while let Some(((s, q), p)) = ex.pop() {
        budget.check(out.num_states())?;
        let edges = cache.entry((q, label[s])).or_insert_with(|| {
            a.transitions(q)
                .iter()
                .map(|(g, r)| (g.substitute(vars, label[s]), *r))
                .filter(|(g, _)| !g.is_false())
                .collect()
        });
        let edges = edges.clone();
        for &s2 in t.successors(s) {
            for (g, r) in &edges {
                let p2 = ex.state(&mut out, (s2, *r), a.is_accepting(*r));
                out.add_transition(p, g.clone(), p2);
            }
        }
    }
    Ok(out.hygiene())
}

pub fn intersect(a: &Nba, b: &Nba) -> Result<Nba, AutomataError> {
    intersect_with(a, b, &Budget::default())
}

/// Büchi intersection. Uses the plain product when either side has only
/// accepting states, the two-copy product otherwise.
pub fn intersect_with(a: &Nba, b: &Nba, budget: &Budget) -> Result<Nba, AutomataError> {
    if a.arity() != b.arity() {
        return Err(AutomataError::ArityMismatch(a.arity(), b.arity()));
    }
    let aps = merge_aps(a.aps(), b.aps());
    let a = a.with_aps(&aps)?;
    let b = b.with_aps(&aps)?;
    let mut out = Nba::new(a.arity(), aps)?;
    let mut ex: Explorer<(usize, usize, u8)> = Explorer::new();
    let (plain_a, plain_b) = (a.all_accepting(), b.all_accepting());
    let plain = plain_a || plain_b;
    let accepting = |p: usize, q: usize, copy: u8| {
        if plain_a {
            b.is_accepting(q)
        } else if plain_b {
            a.is_accepting(p)
        } else {
            copy == 1 && b.is_accepting(q)
        }
    };
    for &p in a.initial() {
        for &q in b.initial() {
            let s = ex.state(&mut out, (p, q, 0), accepting(p, q, 0));
            out.add_initial(s);
        }
    }
    while let Some(((p, q, copy), s)) = ex.pop() {
        budget.check(out.num_states())?;
        let next_copy = if plain {
            0
        } else if copy == 0 && a.is_accepting(p) {
            1
        } else if copy == 1 && b.is_accepting(q) {
            0
        } else {
            copy
        };
        for (g1, p2) in a.transitions(p) {
            for (g2, q2) in b.transitions(q) {
                let g = g1.and(g2);
                if g.is_false() {
                    continue;
                }
                let s2 = ex.state(&mut out, (*p2, *q2, next_copy), accepting(*p2, *q2, next_copy));
                out.add_transition(s, g, s2);
            }
        }
    }
    Ok(out.trim())
}

/// Disjoint union.
pub fn union(a: &Nba, b: &Nba) -> Result<Nba, AutomataError> {
    if a.arity() != b.arity() {
        return Err(AutomataError::ArityMismatch(a.arity(), b.arity()));
    }
    let aps = merge_aps(a.aps(), b.aps());
    let a = a.with_aps(&aps)?;
    let b = b.with_aps(&aps)?;
    let mut out = Nba::new(a.arity(), aps)?;
    for src in [&a, &b] {
        let base = out.num_states();
        for q in 0..src.num_states() {
            out.add_state(src.is_accepting(q));
        }
        for q in 0..src.num_states() {
            for (g, r) in src.transitions(q) {
                out.add_transition(base + q, g.clone(), base + r);
            }
        }
        for &q in src.initial() {
            out.add_initial(base + q);
        }
    }
    Ok(out)
}

/// The `n`-fold self-composition of `t` over its own AP list.
pub fn self_composition(t: &TransitionSystem, n: usize) -> Result<Nba, AutomataError> {
    self_composition_over(t, n, t.aps(), &Budget::default())
}

/// The `n`-fold self-composition with labels projected onto `aps`: state
/// labels move onto outgoing edges as full cubes and all states accept.
pub fn self_composition_over(
    t: &TransitionSystem,
    n: usize,
    aps: &[String],
    budget: &Budget,
) -> Result<Nba, AutomataError> {
    let m = aps.len();
    let mut out = Nba::new(n, aps.to_vec())?;
    let all_vars = out.var_mask();
    let proj = t.projection(aps);
    let label: Vec<u128> = (0..t.num_states()).map(|s| t.project_label(s, &proj) as u128).collect();
    let mut ex: Explorer<Vec<usize>> = Explorer::new();
    for tuple in cartesian(&vec![t.initial().to_vec(); n]) {
        let q = ex.state(&mut out, tuple, true);
        out.add_initial(q);
    }
    while let Some((tuple, q)) = ex.pop() {
        budget.check(out.num_states())?;
        let letter = tuple
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &s)| acc | label[s] << (i * m));
        let guard = Guard::cube(Cube::full(letter, all_vars));
        let choices: Vec<Vec<usize>> = tuple.iter().map(|&s| t.successors(s).to_vec()).collect();
        for next in cartesian(&choices) {
            let r = ex.state(&mut out, next, true);
            out.add_transition(q, guard.clone(), r);
        }
    }
    Ok(out)
}

fn cartesian(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for options in choices {
        let mut next = Vec::with_capacity(out.len() * options.len());
        for prefix in &out {
            for &o in options {
                let mut v = prefix.clone();
                v.push(o);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{emptiness, ltl_to_nba, member, LassoWord};
    use crate::formula::{parse_body, TraceVar};
    use crate::system::parse_system;

    fn single(label: &str) -> TransitionSystem {
        parse_system(&format!("aps: a\ninit: 0\nstate 0 {{{label}}}\n-> 0\n")).unwrap()
    }

    fn g_a() -> Nba {
        ltl_to_nba(&parse_body("G a_p").unwrap(), &[TraceVar::new("p")]).unwrap()
    }

    #[test]
    fn exists_step_on_single_state_systems() {
        let a = g_a();
        let yes = exists_step(&a, &single("a")).unwrap();
        assert_eq!(yes.arity(), 0);
        assert!(emptiness(&yes).is_some());
        let no = exists_step(&a, &single("")).unwrap();
        assert!(emptiness(&no).is_none());
    }

    #[test]
    fn self_composition_of_two_states() {
        let t = parse_system("aps: a\ninit: 0\nstate 0 {a}\n-> 1\nstate 1 {}\n-> 0 1\n").unwrap();
        let sc = self_composition(&t, 2).unwrap();
        assert!(sc.num_states() <= 4);
        assert!(sc.all_accepting());
        let one = self_composition(&t, 1).unwrap();
        let aps = t.aps().to_vec();
        let trace = LassoWord::new(1, aps.clone(), vec![1], vec![0]).unwrap();
        assert!(member(&one, &trace));
        let bad = LassoWord::new(1, aps, vec![], vec![1]).unwrap();
        assert!(!member(&one, &bad));
    }

    #[test]
    fn intersection_with_universal_is_identity() {
        let a = g_a();
        let u = Nba::universal(1, vec![]).unwrap();
        let i = intersect(&a, &u).unwrap();
        for (stem, cycle) in [(vec![], vec![1]), (vec![1], vec![0]), (vec![0], vec![1])] {
            let w = LassoWord::new(1, a.aps().to_vec(), stem, cycle).unwrap();
            assert_eq!(member(&i, &w), member(&a, &w));
        }
        let e = Nba::empty(1, vec![]).unwrap();
        assert!(emptiness(&intersect(&e, &a).unwrap()).is_none());
    }
}
