//! Plain graph utilities over adjacency lists.

use std::collections::VecDeque;

pub fn reachable(succ: &[Vec<usize>], roots: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack = Vec::new();
    for &r in roots {
        if !seen[r] {
            seen[r] = true;
            stack.push(r);
        }
    }
    while let Some(q) = stack.pop() {
        for &r in &succ[q] {
            if !seen[r] {
                seen[r] = true;
                stack.push(r);
            }
        }
    }
    seen
}

/// Strongly connected components of the part reachable from `roots`
/// (iterative Tarjan). Components come out in reverse topological order.
pub fn sccs(succ: &[Vec<usize>], roots: &[usize]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0;
    // (node, next child position)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for &root in roots {
        if index[root] != UNSEEN {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < succ[v].len() {
                let w = succ[v][*pos];
                *pos += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Shortest path (as a node sequence, source first, `to` last) using only
/// nodes accepted by `allowed`. With `nonempty` the path has at least one
/// edge, so `to` may coincide with a source.
pub fn bfs_path(
    succ: &[Vec<usize>],
    from: &[usize],
    to: usize,
    nonempty: bool,
    allowed: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    if nonempty {
        let mut firsts = Vec::new();
        for &s in from {
            for &r in &succ[s] {
                if allowed(r) && !firsts.contains(&r) {
                    firsts.push(r);
                }
            }
        }
        let mut path = bfs_path(succ, &firsts, to, false, allowed)?;
        let src = *from
            .iter()
            .find(|&&s| succ[s].contains(&path[0]))
            .expect("first node has a source predecessor");
        path.insert(0, src);
        return Some(path);
    }
    const ROOT: usize = usize::MAX;
    let mut parent = vec![ROOT; succ.len()];
    let mut seen = vec![false; succ.len()];
    let mut queue = VecDeque::new();
    for &s in from {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(q) = queue.pop_front() {
        if q == to {
            let mut path = vec![q];
            let mut cur = q;
            while parent[cur] != ROOT {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &r in &succ[q] {
            if allowed(r) && !seen[r] {
                seen[r] = true;
                parent[r] = q;
                queue.push_back(r);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tarjan_finds_components() {
        let succ = vec![vec![1], vec![2], vec![0, 3], vec![3], vec![0]];
        let mut comps = sccs(&succ, &[0]);
        for c in &mut comps {
            c.sort();
        }
        assert_eq!(comps, vec![vec![3], vec![0, 1, 2]]);
    }

    #[test]
    fn cycle_path_returns_to_start() {
        let succ = vec![vec![1], vec![2], vec![0]];
        let p = bfs_path(&succ, &[0], 0, true, |_| true).unwrap();
        assert_eq!(p, vec![0, 1, 2, 0]);
        let p = bfs_path(&succ, &[0], 2, false, |_| true).unwrap();
        assert_eq!(p, vec![0, 1, 2]);
    }
}
