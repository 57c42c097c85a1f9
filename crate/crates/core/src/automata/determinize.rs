//! Complementation through determinization.
//!
//! Safra trees are kept with node names ordered by age: surviving nodes are
//! renamed `1..k` after every step and new nodes get the next free names. A
//! step that marks node `i` emits priority `2i`, one that removes node `i`
//! emits `2i - 1`, and the smallest such priority wins. The automaton
//! accepts iff the least priority seen infinitely often is even. The
//! complement guesses an odd priority `j` and a point after which every
//! step has priority at least `j` and `j` recurs.

use std::collections::{HashMap, VecDeque};

use crate::budget::Budget;

use super::complement::RegionCache;
use super::guard::{Cube, Guard};
use super::{AutomataError, Nba};

/// No node was marked or removed. Odd and larger than every real priority.
const QUIET: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct TreeNode {
    name: u16,
    depth: u16,
    label: Vec<u32>,
}

/// Preorder with children in age order; empty when no run survives.
type Tree = Vec<TreeNode>;

struct Work {
    name: u32,
    children: Vec<usize>,
    label: Vec<u32>,
    alive: bool,
}

fn unpack(tree: &Tree) -> Vec<Work> {
    let mut w: Vec<Work> = Vec::with_capacity(tree.len());
    let mut path: Vec<usize> = Vec::new();
    for (i, n) in tree.iter().enumerate() {
        path.truncate(n.depth as usize);
        if let Some(&p) = path.last() {
            w[p].children.push(i);
        }
        w.push(Work {
            name: n.name as u32,
            children: Vec::new(),
            label: n.label.clone(),
            alive: true,
        });
        path.push(i);
    }
    w
}

fn prune_left(w: &mut [Work], v: usize, taken: &[u32]) {
    w[v].label.retain(|q| taken.binary_search(q).is_err());
    let mut local = taken.to_vec();
    for c in w[v].children.clone() {
        prune_left(w, c, &local);
        local.extend_from_slice(&w[c].label);
        local.sort_unstable();
    }
}

fn kill(w: &mut [Work], v: usize, removed: &mut Vec<u32>) {
    for c in w[v].children.clone() {
        if w[c].alive {
            w[c].alive = false;
            removed.push(w[c].name);
        }
        kill(w, c, removed);
    }
}

fn merge_down(w: &mut [Work], v: usize, removed: &mut Vec<u32>, marked: &mut Vec<u32>) {
    let live: Vec<usize> = w[v].children.iter().copied().filter(|&c| w[c].alive).collect();
    if live.is_empty() {
        return;
    }
    let covered: usize = live.iter().map(|&c| w[c].label.len()).sum();
    if covered == w[v].label.len() {
        kill(w, v, removed);
        marked.push(w[v].name);
    } else {
        for c in live {
            merge_down(w, c, removed, marked);
        }
    }
}

fn pack(w: &[Work]) -> Tree {
    let mut names: Vec<u32> = w.iter().filter(|n| n.alive).map(|n| n.name).collect();
    names.sort_unstable();
    let mut out = Vec::with_capacity(names.len());
    let mut stack = vec![(0usize, 0u16)];
    while let Some((v, depth)) = stack.pop() {
        let rank = names.binary_search(&w[v].name).expect("live name") + 1;
        out.push(TreeNode {
            name: rank as u16,
            depth,
            label: w[v].label.clone(),
        });
        for &c in w[v].children.iter().rev() {
            if w[c].alive {
                stack.push((c, depth + 1));
            }
        }
    }
    out
}

/// One deterministic step; `image(q)` lists the successors of `q`.
fn step<'s>(a: &Nba, tree: &Tree, image: impl Fn(u32) -> &'s [u32]) -> (Tree, u32) {
    if tree.is_empty() {
        return (Vec::new(), QUIET);
    }
    let mut w = unpack(tree);
    let old = w.len();
    let mut next_name = old as u32 + 1;
    for v in 0..old {
        let f: Vec<u32> = w[v].label.iter().copied().filter(|&q| a.is_accepting(q as usize)).collect();
        if !f.is_empty() {
            let c = w.len();
            w.push(Work {
                name: next_name,
                children: Vec::new(),
                label: f,
                alive: true,
            });
            next_name += 1;
            w[v].children.push(c);
        }
    }
    for n in w.iter_mut() {
        let mut next: Vec<u32> = n.label.iter().flat_map(|&q| image(q).iter().copied()).collect();
        next.sort_unstable();
        next.dedup();
        n.label = next;
    }
    prune_left(&mut w, 0, &[]);
    let mut removed = Vec::new();
    for n in w.iter_mut() {
        if n.label.is_empty() {
            n.alive = false;
            removed.push(n.name);
        }
    }
    let mut marked = Vec::new();
    if w[0].alive {
        merge_down(&mut w, 0, &mut removed, &mut marked);
    }
    let priority = marked
        .iter()
        .map(|&i| 2 * i)
        .chain(removed.iter().map(|&i| 2 * i - 1))
        .min()
        .unwrap_or(QUIET);
    let tree = if w[0].alive { pack(&w) } else { Vec::new() };
    (tree, priority)
}

/// Complement of `a` through its deterministic parity automaton.
pub(crate) fn complement_parity(a: &Nba, budget: &Budget) -> Result<Nba, AutomataError> {
    let mut init: Vec<u32> = a.initial().iter().map(|&q| q as u32).collect();
    init.sort_unstable();
    init.dedup();
    let start: Tree = if init.is_empty() {
        Vec::new()
    } else {
        vec![TreeNode {
            name: 1,
            depth: 0,
            label: init,
        }]
    };

    let mut trees: Vec<Tree> = vec![start.clone()];
    let mut index: HashMap<Tree, usize> = HashMap::from([(start, 0)]);
    let mut edges: Vec<Vec<(Cube, usize, u32)>> = Vec::new();
    let mut cache = RegionCache::new(a);
    let mut i = 0;
    while i < trees.len() {
        budget.check(trees.len())?;
        let tree = trees[i].clone();
        let root: Vec<u32> = tree.first().map(|n| n.label.clone()).unwrap_or_default();
        let regions = cache.regions(&root);
        let mut out = Vec::with_capacity(regions.len());
        for (cube, succs) in regions.iter() {
            let image = |q: u32| succs[root.binary_search(&q).expect("labels lie below the root")].as_slice();
            let (next, priority) = step(a, &tree, image);
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    trees.push(next.clone());
                    index.insert(next, trees.len() - 1);
                    trees.len() - 1
                }
            };
            out.push((*cube, j, priority));
        }
        edges.push(out);
        i += 1;
    }

    let mut levels: Vec<u32> = edges.iter().flatten().map(|e| e.2).filter(|p| p % 2 == 1).collect();
    levels.sort_unstable();
    levels.dedup();

    // states: (tree, None) while waiting, (tree, Some((level, hit))) after the guess
    type Key = (usize, Option<(u32, bool)>);
    let mut out = Nba::new(a.arity(), a.aps().to_vec())?;
    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut queue: VecDeque<(Key, usize)> = VecDeque::new();
    let state = |ids: &mut HashMap<Key, usize>, out: &mut Nba, queue: &mut VecDeque<(Key, usize)>, key: Key| {
        *ids.entry(key).or_insert_with(|| {
            let q = out.add_state(matches!(key.1, Some((_, true))));
            queue.push_back((key, q));
            q
        })
    };
    let q0 = state(&mut ids, &mut out, &mut queue, (0, None));
    out.add_initial(q0);
    while let Some((key, src)) = queue.pop_front() {
        budget.check(out.num_states())?;
        for &(cube, t, p) in &edges[key.0] {
            let mut targets = Vec::new();
            match key.1 {
                None => {
                    targets.push((t, None));
                    for &j in levels.iter().filter(|&&j| p >= j) {
                        targets.push((t, Some((j, p == j))));
                    }
                }
                Some((j, _)) if p >= j => targets.push((t, Some((j, p == j)))),
                Some(_) => {}
            }
            for k in targets {
                let dst = state(&mut ids, &mut out, &mut queue, k);
                out.add_transition(src, Guard::cube(cube), dst);
            }
        }
    }
    Ok(out.hygiene())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(nodes: &[(u16, u16, &[u32])]) -> Tree {
        nodes
            .iter()
            .map(|&(name, depth, label)| TreeNode {
                name,
                depth,
                label: label.to_vec(),
            })
            .collect()
    }

    /// States 0, 1 with 1 accepting; `image` is the identity.
    fn two_states() -> Nba {
        let mut a = Nba::new(1, vec!["a".into()]).unwrap();
        a.add_state(false);
        a.add_state(true);
        a
    }

    const ID: [[u32; 1]; 2] = [[0], [1]];

    #[test]
    fn accepting_state_spawns_and_merges() {
        let a = two_states();
        let t = tree(&[(1, 0, &[0, 1])]);
        let (next, p) = step(&a, &t, |q| &ID[q as usize]);
        // child {1} spawned; not the whole label, so no merge
        assert_eq!(next, tree(&[(1, 0, &[0, 1]), (2, 1, &[1])]));
        assert_eq!(p, QUIET);
        let t = tree(&[(1, 0, &[1])]);
        let (next, p) = step(&a, &t, |q| &ID[q as usize]);
        assert_eq!(next, t);
        assert_eq!(p, 2);
    }

    #[test]
    fn merge_swallows_covering_children() {
        let a = two_states();
        let empty: [u32; 0] = [];
        let t = tree(&[(1, 0, &[0, 1]), (2, 1, &[0]), (3, 1, &[1])]);
        let image = |q: u32| if q == 0 { &empty[..] } else { &ID[1][..] };
        let (next, p) = step(&a, &t, image);
        assert_eq!(next, tree(&[(1, 0, &[1])]));
        assert_eq!(p, 2);
    }

    #[test]
    fn removal_renames_younger_nodes() {
        let mut a = Nba::new(1, vec!["a".into()]).unwrap();
        for _ in 0..3 {
            a.add_state(false);
        }
        let images: [&[u32]; 3] = [&[], &[1], &[2]];
        let t = tree(&[(1, 0, &[0, 1, 2]), (2, 1, &[0]), (3, 1, &[1])]);
        let (next, p) = step(&a, &t, |q| images[q as usize]);
        assert_eq!(next, tree(&[(1, 0, &[1, 2]), (2, 1, &[1])]));
        assert_eq!(p, 3);
    }
}
