//! Transition guards as DNFs over indexed propositions.
//!
//! A variable is the pair (trace index, AP); variable `i * |AP| + a` is bit
//! `i * |AP| + a` of a [`Letter`]. Cubes keep their positive and negative
//! literals in two masks, so satisfiability of a cube is `pos & neg == 0`.

use std::fmt;

/// One letter of `Σⁿ`: bit `v` is set iff variable `v` holds.
pub type Letter = u128;

/// Maximum number of variables (`arity * |AP|`) an automaton may use.
pub const MAX_VARS: usize = 128;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Cube {
    pub pos: u128,
    pub neg: u128,
}

impl Cube {
    pub const TRUE: Cube = Cube { pos: 0, neg: 0 };

    pub fn new(pos: u128, neg: u128) -> Option<Cube> {
        (pos & neg == 0).then_some(Cube { pos, neg })
    }

    /// The cube fixing every variable in `vars` to its value in `letter`.
    pub fn full(letter: Letter, vars: u128) -> Cube {
        Cube {
            pos: letter & vars,
            neg: !letter & vars,
        }
    }

    pub fn support(self) -> u128 {
        self.pos | self.neg
    }

    pub fn is_true(self) -> bool {
        self.pos == 0 && self.neg == 0
    }

    pub fn and(self, other: Cube) -> Option<Cube> {
        Cube::new(self.pos | other.pos, self.neg | other.neg)
    }

    pub fn satisfied_by(self, letter: Letter) -> bool {
        self.pos & !letter == 0 && self.neg & letter == 0
    }

    /// `self ⇒ other`, i.e. every literal of `other` occurs in `self`.
    pub fn implies(self, other: Cube) -> bool {
        other.pos & !self.pos == 0 && other.neg & !self.neg == 0
    }

    /// Minimal model: positive literals present, everything else absent.
    pub fn model(self) -> Letter {
        self.pos
    }

    /// Substitutes `value` for the variables in `vars` and drops them.
    /// Returns `None` when the substitution falsifies the cube.
    pub fn substitute(self, vars: u128, value: Letter) -> Option<Cube> {
        if self.pos & vars & !value != 0 || self.neg & vars & value != 0 {
            return None;
        }
        Some(Cube {
            pos: self.pos & !vars,
            neg: self.neg & !vars,
        })
    }

    pub fn map_vars(self, map: impl Fn(usize) -> usize) -> Cube {
        let remap = |m: u128| {
            let mut out = 0u128;
            let mut m = m;
            while m != 0 {
                let v = m.trailing_zeros() as usize;
                m &= m - 1;
                out |= 1u128 << map(v);
            }
            out
        };
        Cube {
            pos: remap(self.pos),
            neg: remap(self.neg),
        }
    }
}

/// A DNF guard: disjunction of consistent cubes. Normalised so that no cube
/// implies another one, which makes `false` the empty disjunction and
/// `true` the single empty cube.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Guard {
    cubes: Vec<Cube>,
}

impl Guard {
    pub fn top() -> Guard {
        Guard {
            cubes: vec![Cube::TRUE],
        }
    }

    pub fn bottom() -> Guard {
        Guard { cubes: Vec::new() }
    }

    pub fn cube(c: Cube) -> Guard {
        Guard { cubes: vec![c] }
    }

    pub fn from_cubes(cubes: impl IntoIterator<Item = Cube>) -> Guard {
        let mut g = Guard {
            cubes: cubes.into_iter().filter(|c| c.pos & c.neg == 0).collect(),
        };
        g.normalize();
        g
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn is_false(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.cubes.iter().any(|c| c.is_true())
    }

    pub fn support(&self) -> u128 {
        self.cubes.iter().fold(0, |acc, c| acc | c.support())
    }

    pub fn eval(&self, letter: Letter) -> bool {
        self.cubes.iter().any(|c| c.satisfied_by(letter))
    }

    /// Model of the first cube with unmentioned variables absent.
    pub fn first_model(&self) -> Option<Letter> {
        self.cubes.first().map(|c| c.model())
    }

    pub fn or(&self, other: &Guard) -> Guard {
        Guard::from_cubes(self.cubes.iter().chain(&other.cubes).copied())
    }

    pub fn and(&self, other: &Guard) -> Guard {
        let mut out = Vec::with_capacity(self.cubes.len() * other.cubes.len());
        for a in &self.cubes {
            for b in &other.cubes {
                if let Some(c) = a.and(*b) {
                    out.push(c);
                }
            }
        }
        Guard::from_cubes(out)
    }

    pub fn and_cube(&self, cube: Cube) -> Guard {
        Guard::from_cubes(self.cubes.iter().filter_map(|c| c.and(cube)))
    }

    /// Partial evaluation: substitutes `value` for the variables in `vars`.
    pub fn substitute(&self, vars: u128, value: Letter) -> Guard {
        Guard::from_cubes(self.cubes.iter().filter_map(|c| c.substitute(vars, value)))
    }

    pub fn map_vars(&self, map: impl Fn(usize) -> usize) -> Guard {
        Guard::from_cubes(self.cubes.iter().map(|c| c.map_vars(&map)))
    }

    /// Three-valued evaluation under a partial assignment.
    pub fn eval_partial(&self, assigned_pos: u128, assigned_neg: u128) -> Option<bool> {
        let mut unknown = false;
        for c in &self.cubes {
            if c.pos & assigned_neg != 0 || c.neg & assigned_pos != 0 {
                continue;
            }
            if c.pos & !assigned_pos == 0 && c.neg & !assigned_neg == 0 {
                return Some(true);
            }
            unknown = true;
        }
        if unknown {
            None
        } else {
            Some(false)
        }
    }

    fn normalize(&mut self) {
        let cubes = &mut self.cubes;
        loop {
            cubes.sort_unstable_by_key(|c| (c.support().count_ones(), *c));
            cubes.dedup();
            // drop cubes implied by a weaker one
            let mut kept: Vec<Cube> = Vec::with_capacity(cubes.len());
            for &c in cubes.iter() {
                if !kept.iter().any(|k| c.implies(*k)) {
                    kept.push(c);
                }
            }
            // merge `x & A | !x & A` into `A`
            let mut merged = false;
            'outer: for i in 0..kept.len() {
                for j in i + 1..kept.len() {
                    let (a, b) = (kept[i], kept[j]);
                    if a.support() == b.support() {
                        let diff = a.pos ^ b.pos;
                        if diff.count_ones() == 1 {
                            kept[i] = Cube {
                                pos: a.pos & !diff,
                                neg: a.neg & !diff,
                            };
                            kept.swap_remove(j);
                            merged = true;
                            break 'outer;
                        }
                    }
                }
            }
            *cubes = kept;
            if !merged {
                break;
            }
        }
    }
}

/// Partitions the alphabet into regions on which each guard is constant.
///
/// Returns `(region, enabled)` pairs where `enabled[i]` says whether
/// `guards[i]` holds everywhere in `region`. Regions are disjoint and cover
/// every letter. Built as a decision tree over the variables the guards
/// mention, so regions only fix variables that matter.
pub fn partition(guards: &[&Guard]) -> Vec<(Cube, Vec<bool>)> {
    let mut out = Vec::new();
    split(guards, 0, 0, &mut out);
    out
}

fn split(guards: &[&Guard], pos: u128, neg: u128, out: &mut Vec<(Cube, Vec<bool>)>) {
    let mut enabled = Vec::with_capacity(guards.len());
    let mut pivot: Option<usize> = None;
    for g in guards {
        match g.eval_partial(pos, neg) {
            Some(b) => enabled.push(b),
            None => {
                if pivot.is_none() {
                    let cube = g
                        .cubes()
                        .iter()
                        .find(|c| c.pos & neg == 0 && c.neg & pos == 0)
                        .expect("undecided guard has a live cube");
                    let free = cube.support() & !(pos | neg);
                    pivot = Some(free.trailing_zeros() as usize);
                }
                enabled.push(false);
            }
        }
    }
    match pivot {
        None => out.push((Cube { pos, neg }, enabled)),
        Some(v) => {
            let bit = 1u128 << v;
            split(guards, pos | bit, neg, out);
            split(guards, pos, neg | bit, out);
        }
    }
}

/// Formats a guard over named variables, e.g. `a@0 & !b@1 | c@0`.
pub struct GuardDisplay<'a> {
    pub guard: &'a Guard,
    pub names: &'a [String],
}

impl fmt::Display for GuardDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.guard.is_false() {
            return f.write_str("false");
        }
        for (i, c) in self.guard.cubes().iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            if c.is_true() {
                f.write_str("true")?;
                continue;
            }
            let mut first = true;
            for v in 0..MAX_VARS {
                let bit = 1u128 << v;
                if c.support() & bit == 0 {
                    continue;
                }
                if !first {
                    f.write_str(" & ")?;
                }
                first = false;
                if c.neg & bit != 0 {
                    f.write_str("!")?;
                }
                match self.names.get(v) {
                    Some(n) => f.write_str(n)?,
                    None => write!(f, "v{v}")?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lit(v: usize, positive: bool) -> Cube {
        if positive {
            Cube { pos: 1 << v, neg: 0 }
        } else {
            Cube { pos: 0, neg: 1 << v }
        }
    }

    #[test]
    fn contradictory_cubes_are_dropped() {
        let g = Guard::cube(lit(0, true)).and(&Guard::cube(lit(0, false)));
        assert!(g.is_false());
        assert!(Cube::new(1, 1).is_none());
    }

    #[test]
    fn normalization_merges_and_subsumes() {
        let g = Guard::from_cubes([lit(0, true), lit(0, false)]);
        assert!(g.is_true());
        let a_and_b = lit(0, true).and(lit(1, true)).unwrap();
        let g = Guard::from_cubes([a_and_b, lit(0, true)]);
        assert_eq!(g.cubes(), &[lit(0, true)]);
    }

    #[test]
    fn substitution_evaluates_fixed_variables() {
        let c = lit(0, true).and(lit(2, false)).unwrap();
        let g = Guard::cube(c);
        assert_eq!(g.substitute(0b100, 0b000), Guard::cube(lit(0, true)));
        assert!(g.substitute(0b100, 0b100).is_false());
    }

    #[test]
    fn partition_covers_alphabet_disjointly() {
        let g1 = Guard::from_cubes([lit(0, true), lit(1, true)]);
        let g2 = Guard::cube(lit(1, false).and(lit(2, true)).unwrap());
        let regions = partition(&[&g1, &g2]);
        for letter in 0u128..8 {
            let hits: Vec<_> = regions.iter().filter(|(c, _)| c.satisfied_by(letter)).collect();
            assert_eq!(hits.len(), 1, "letter {letter:b}");
            let (_, enabled) = hits[0];
            assert_eq!(enabled[0], g1.eval(letter));
            assert_eq!(enabled[1], g2.eval(letter));
        }
    }
}
