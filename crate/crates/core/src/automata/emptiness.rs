//! Emptiness with lasso witnesses, and lasso membership.

use super::graph::{bfs_path, sccs};
use super::{LassoWord, Nba};

fn successors(a: &Nba) -> Vec<Vec<usize>> {
    (0..a.num_states())
        .map(|q| a.transitions(q).iter().map(|(_, r)| *r).collect())
        .collect()
}

/// Whether some SCC reachable from `roots` is nontrivial and contains a node
/// satisfying `accepting`; returns that SCC and one such node.
pub(crate) fn accepting_scc(
    succ: &[Vec<usize>],
    roots: &[usize],
    accepting: impl Fn(usize) -> bool,
) -> Option<(Vec<usize>, usize)> {
    for comp in sccs(succ, roots) {
        let nontrivial = comp.len() > 1 || succ[comp[0]].contains(&comp[0]);
        if !nontrivial {
            continue;
        }
        if let Some(&f) = comp.iter().find(|&&q| accepting(q)) {
            return Some((comp, f));
        }
    }
    None
}

/// `None` if the language is empty, otherwise an accepted lasso word.
///
/// Each letter instantiates the guard of the lasso edge by the minimal model
/// of its first cube.
pub fn emptiness(a: &Nba) -> Option<LassoWord> {
    let succ = successors(a);
    let (comp, f) = accepting_scc(&succ, a.initial(), |q| a.is_accepting(q))?;
    let mut in_comp = vec![false; a.num_states()];
    for &q in &comp {
        in_comp[q] = true;
    }
    let stem_path = bfs_path(&succ, a.initial(), f, false, |_| true).expect("f is reachable");
    let loop_path = bfs_path(&succ, &[f], f, true, |q| in_comp[q]).expect("f lies on a cycle");
    let letters = |path: &[usize]| {
        path.windows(2)
            .map(|w| {
                let (g, _) = a
                    .transitions(w[0])
                    .iter()
                    .find(|(_, r)| *r == w[1])
                    .expect("path follows edges");
                g.first_model().expect("edges carry satisfiable guards")
            })
            .collect::<Vec<_>>()
    };
    let word = LassoWord::new(a.arity(), a.aps().to_vec(), letters(&stem_path), letters(&loop_path))
        .expect("witness letters lie inside the alphabet");
    Some(word)
}

/// Whether `a` accepts `w`, by an accepting-cycle search on the product of
/// `a` with the positions of the lasso.
pub fn member(a: &Nba, w: &LassoWord) -> bool {
    assert_eq!(a.arity(), w.arity(), "member needs equal arity");
    let w = w.over_aps(a.aps());
    let len = w.period_end();
    let node = |q: usize, i: usize| q * len + i;
    let mut succ = vec![Vec::new(); a.num_states() * len];
    for q in 0..a.num_states() {
        for i in 0..len {
            let letter = w.letter_at(i);
            let j = w.next_pos(i);
            for (g, r) in a.transitions(q) {
                if g.eval(letter) {
                    succ[node(q, i)].push(node(*r, j));
                }
            }
        }
    }
    let roots: Vec<usize> = a.initial().iter().map(|&q| node(q, 0)).collect();
    accepting_scc(&succ, &roots, |v| a.is_accepting(v / len)).is_some()
}
