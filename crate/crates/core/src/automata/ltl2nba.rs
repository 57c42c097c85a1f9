//! LTL to NBA by tableau expansion.
//!
//! States are sets of obligations (interned NNF formulas that must hold from
//! the current position). Expanding a state yields covers: a cube the
//! current letter must satisfy, the obligations for the next position, and
//! the until-formulas whose fulfilment was postponed. The resulting
//! generalized acceptance (one set per until) is degeneralized with a
//! counter.

use std::collections::{HashMap, VecDeque};

use crate::budget::Budget;
use crate::formula::{to_nnf, LtlBody, TraceVar};

use super::guard::{Cube, Guard};
use super::{AutomataError, Nba};

type Id = u32;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(Id, Id),
    Or(Id, Id),
    Next(Id),
    Until(Id, Id),
    Release(Id, Id),
}

const TRUE: Id = 0;
const FALSE: Id = 1;

struct Interner {
    nodes: Vec<Node>,
    index: HashMap<Node, Id>,
}

impl Interner {
    fn new() -> Self {
        let mut i = Interner {
            nodes: Vec::new(),
            index: HashMap::new(),
        };
        i.add(Node::True);
        i.add(Node::False);
        i
    }

    fn add(&mut self, n: Node) -> Id {
        let n = match n {
            Node::And(a, b) if a == FALSE || b == FALSE => return FALSE,
            Node::And(a, b) if a == TRUE => return b,
            Node::And(a, b) if b == TRUE || a == b => return a,
            Node::Or(a, b) if a == TRUE || b == TRUE => return TRUE,
            Node::Or(a, b) if a == FALSE => return b,
            Node::Or(a, b) if b == FALSE || a == b => return a,
            Node::Next(a) if a == TRUE || a == FALSE => return a,
            Node::Until(_, b) if b == TRUE || b == FALSE => return b,
            Node::Release(_, b) if b == TRUE || b == FALSE => return b,
            // commutative operators get a canonical operand order
            Node::And(a, b) if a > b => Node::And(b, a),
            Node::Or(a, b) if a > b => Node::Or(b, a),
            n => n,
        };
        if let Some(&id) = self.index.get(&n) {
            return id;
        }
        let id = self.nodes.len() as Id;
        self.nodes.push(n);
        self.index.insert(n, id);
        id
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
struct Cover {
    cube: Cube,
    next: Vec<Id>,
    postponed: Vec<Id>,
}

impl Cover {
    fn dominates(&self, other: &Cover) -> bool {
        other.cube.implies(self.cube)
            && is_subset(&self.next, &other.next)
            && is_subset(&self.postponed, &other.postponed)
    }
}

fn is_subset(a: &[Id], b: &[Id]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn insert_sorted(v: &mut Vec<Id>, x: Id) {
    if let Err(i) = v.binary_search(&x) {
        v.insert(i, x);
    }
}

struct Tableau<'a> {
    nodes: &'a [Node],
}

impl Tableau<'_> {
    fn covers(&self, state: &[Id]) -> Vec<Cover> {
        let mut out = Vec::new();
        self.expand(state.to_vec(), Vec::new(), Cube::TRUE, Vec::new(), Vec::new(), &mut out);
        out.sort_by(|a, b| {
            (a.cube.support().count_ones(), a.next.len(), a.postponed.len())
                .cmp(&(b.cube.support().count_ones(), b.next.len(), b.postponed.len()))
        });
        let mut kept: Vec<Cover> = Vec::new();
        for c in out {
            if !kept.iter().any(|k| k.dominates(&c)) {
                kept.push(c);
            }
        }
        kept
    }

    fn expand(
        &self,
        mut todo: Vec<Id>,
        mut done: Vec<Id>,
        mut cube: Cube,
        mut next: Vec<Id>,
        mut postponed: Vec<Id>,
        out: &mut Vec<Cover>,
    ) {
        while let Some(f) = todo.pop() {
            if done.binary_search(&f).is_ok() {
                continue;
            }
            insert_sorted(&mut done, f);
            match self.nodes[f as usize] {
                Node::True => {}
                Node::False => return,
                Node::Lit(v, positive) => {
                    let lit = if positive {
                        Cube { pos: 1 << v, neg: 0 }
                    } else {
                        Cube { pos: 0, neg: 1 << v }
                    };
                    match cube.and(lit) {
                        Some(c) => cube = c,
                        None => return,
                    }
                }
                Node::And(a, b) => {
                    todo.push(a);
                    todo.push(b);
                }
                Node::Or(a, b) => {
                    let mut left = todo.clone();
                    left.push(a);
                    self.expand(left, done.clone(), cube, next.clone(), postponed.clone(), out);
                    todo.push(b);
                }
                Node::Next(a) => insert_sorted(&mut next, a),
                Node::Until(a, b) => {
                    let mut now = todo.clone();
                    now.push(b);
                    self.expand(now, done.clone(), cube, next.clone(), postponed.clone(), out);
                    todo.push(a);
                    insert_sorted(&mut next, f);
                    insert_sorted(&mut postponed, f);
                }
                Node::Release(a, b) => {
                    let mut now = todo.clone();
                    now.push(a);
                    now.push(b);
                    self.expand(now, done.clone(), cube, next.clone(), postponed.clone(), out);
                    todo.push(b);
                    insert_sorted(&mut next, f);
                }
            }
        }
        next.retain(|&x| x != TRUE);
        if next.contains(&FALSE) {
            return;
        }
        let cover = Cover {
            cube,
            next,
            postponed,
        };
        if !out.contains(&cover) {
            out.push(cover);
        }
    }
}

fn intern(
    body: &LtlBody,
    vars: &[TraceVar],
    aps: &[String],
    it: &mut Interner,
) -> Result<Id, AutomataError> {
    let rec = |b: &LtlBody, it: &mut Interner| intern(b, vars, aps, it);
    Ok(match body {
        LtlBody::Const(true) => TRUE,
        LtlBody::Const(false) => FALSE,
        LtlBody::Atom { prop, var } => {
            let i = vars
                .iter()
                .position(|v| v == var)
                .ok_or_else(|| AutomataError::UnboundVar(var.to_string()))?;
            let a = aps.iter().position(|p| p == prop).expect("AP list covers body");
            it.add(Node::Lit(i * aps.len() + a, true))
        }
        LtlBody::Not(inner) => match &**inner {
            LtlBody::Atom { .. } => {
                let id = rec(inner, it)?;
                match it.nodes[id as usize] {
                    Node::Lit(v, _) => it.add(Node::Lit(v, false)),
                    _ => unreachable!("atoms intern to literals"),
                }
            }
            _ => unreachable!("input is in negation normal form"),
        },
        LtlBody::And(a, b) => {
            let (x, y) = (rec(a, it)?, rec(b, it)?);
            it.add(Node::And(x, y))
        }
        LtlBody::Or(a, b) => {
            let (x, y) = (rec(a, it)?, rec(b, it)?);
            it.add(Node::Or(x, y))
        }
        LtlBody::Next(a) => {
            let x = rec(a, it)?;
            it.add(Node::Next(x))
        }
        LtlBody::Until(a, b) => {
            let (x, y) = (rec(a, it)?, rec(b, it)?);
            it.add(Node::Until(x, y))
        }
        LtlBody::Release(a, b) => {
            let (x, y) = (rec(a, it)?, rec(b, it)?);
            it.add(Node::Release(x, y))
        }
        _ => unreachable!("input is in negation normal form"),
    })
}

/// Translates `body` over the trace variables `var_order` (trace index `i`
/// is `var_order[i]`). The AP list is the sorted set of propositions in
/// `body`.
pub fn ltl_to_nba(body: &LtlBody, var_order: &[TraceVar]) -> Result<Nba, AutomataError> {
    let aps: Vec<String> = body.props().into_iter().collect();
    ltl_to_nba_over(body, var_order, &aps, &Budget::default())
}

/// As [`ltl_to_nba`], over an explicit AP list that must contain every
/// proposition of `body`.
pub fn ltl_to_nba_over(
    body: &LtlBody,
    var_order: &[TraceVar],
    aps: &[String],
    budget: &Budget,
) -> Result<Nba, AutomataError> {
    let nnf;
    let body = if body.is_nnf() {
        body
    } else {
        nnf = to_nnf(body);
        &nnf
    };
    let mut out = Nba::new(var_order.len(), aps.to_vec())?;
    let mut it = Interner::new();
    let root = intern(body, var_order, aps, &mut it)?;
    let untils: Vec<Id> = (0..it.nodes.len() as Id)
        .filter(|&i| matches!(it.nodes[i as usize], Node::Until(..)))
        .collect();
    let k = untils.len();
    let tableau = Tableau { nodes: &it.nodes };

    let mut index: HashMap<(Vec<Id>, usize), usize> = HashMap::new();
    let mut queue: VecDeque<(Vec<Id>, usize)> = VecDeque::new();
    let mut covers_of: HashMap<Vec<Id>, Vec<Cover>> = HashMap::new();

    let start = (if root == TRUE { vec![] } else { vec![root] }, 0);
    if root != FALSE {
        let q = out.add_state(k == 0);
        out.add_initial(q);
        index.insert(start.clone(), q);
        queue.push_back(start);
    }
    while let Some((set, count)) = queue.pop_front() {
        budget.check(out.num_states())?;
        let q = index[&(set.clone(), count)];
        let covers = covers_of
            .entry(set.clone())
            .or_insert_with(|| tableau.covers(&set))
            .clone();
        for cover in covers {
            let mut c = if count == k { 0 } else { count };
            while c < k && cover.postponed.binary_search(&untils[c]).is_err() {
                c += 1;
            }
            let key = (cover.next, c);
            let r = match index.get(&key) {
                Some(&r) => r,
                None => {
                    let r = out.add_state(c == k);
                    index.insert(key.clone(), r);
                    queue.push_back(key);
                    r
                }
            };
            out.add_transition(q, Guard::cube(cover.cube), r);
        }
    }
    Ok(out.hygiene())
}
