//! Random automata, words and reference procedures shared by the
//! integration tests.

#![allow(dead_code)]

use hypermc::automata::{Cube, Guard, LassoWord, Nba};
use hypermc::bench::{gen_formula, gen_system};
use hypermc::formula::HyperFormula;
use hypermc::system::TransitionSystem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn aps(k: usize) -> Vec<String> {
    hypermc::bench::ap_names(k)
}

/// A cube where each variable is positive, negative or absent.
pub fn random_cube(rng: &mut ChaCha8Rng, vars: usize) -> Cube {
    let (mut pos, mut neg) = (0u128, 0u128);
    for v in 0..vars {
        match rng.gen_range(0..3) {
            0 => pos |= 1 << v,
            1 => neg |= 1 << v,
            _ => {}
        }
    }
    Cube::new(pos, neg).expect("disjoint literals")
}

/// Up to `max_states` states, one or two initial states, guards of one or
/// two cubes.
pub fn random_nba(rng: &mut ChaCha8Rng, max_states: usize, arity: usize, ap_list: &[String]) -> Nba {
    let mut a = Nba::new(arity, ap_list.to_vec()).expect("small alphabet");
    let vars = a.num_vars();
    let n = rng.gen_range(1..=max_states);
    for _ in 0..n {
        a.add_state(rng.gen_bool(0.35));
    }
    a.add_initial(0);
    if n > 1 && rng.gen_bool(0.2) {
        a.add_initial(rng.gen_range(1..n));
    }
    for q in 0..n {
        for r in 0..n {
            if rng.gen_bool(0.4) {
                let cubes: Vec<Cube> = (0..rng.gen_range(1..=2)).map(|_| random_cube(rng, vars)).collect();
                a.add_transition(q, Guard::from_cubes(cubes), r);
            }
        }
    }
    a
}

pub fn random_lasso(rng: &mut ChaCha8Rng, arity: usize, ap_list: &[String], max_stem: usize, max_loop: usize) -> LassoWord {
    let bits = arity * ap_list.len();
    let letter = |rng: &mut ChaCha8Rng| -> u128 {
        if bits == 0 {
            0
        } else {
            rng.gen_range(0..1u128 << bits)
        }
    };
    let stem: Vec<u128> = (0..rng.gen_range(0..=max_stem)).map(|_| letter(rng)).collect();
    let cycle: Vec<u128> = (0..rng.gen_range(1..=max_loop)).map(|_| letter(rng)).collect();
    LassoWord::new(arity, ap_list.to_vec(), stem, cycle).expect("letters fit")
}

/// Nonemptiness by brute force over explicit letters: some accepting state
/// is reachable from an initial state and from itself.
pub fn naive_nonempty(a: &Nba) -> bool {
    let n = a.num_states();
    let letters = 1u128 << a.num_vars();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|q| {
            let mut s: Vec<usize> = a
                .transitions(q)
                .iter()
                .filter(|(g, _)| (0..letters).any(|l| g.eval(l)))
                .map(|(_, r)| *r)
                .collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let reach = |from: &[usize]| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = from.iter().flat_map(|&q| succ[q].iter().copied()).collect();
        while let Some(q) = stack.pop() {
            if !seen[q] {
                seen[q] = true;
                stack.extend(succ[q].iter().copied());
            }
        }
        seen
    };
    let mut from_init = reach(a.initial());
    for &q in a.initial() {
        from_init[q] = true;
    }
    (0..n).any(|q| from_init[q] && a.is_accepting(q) && reach(&[q])[q])
}

/// Quantifier patterns of the differential corpus.
pub const PATTERNS: [&str; 12] = ["ae", "ea", "aea", "eae", "a", "e", "aa", "ee", "aae", "eea", "aee", "eaa"];

/// One instance of the differential corpus: system of at most five states,
/// prefix from [`PATTERNS`], body of size at most eight.
pub fn corpus_instance(i: u64) -> (TransitionSystem, HyperFormula) {
    let pattern = PATTERNS[i as usize % PATTERNS.len()];
    let n = 1 + (i as usize / PATTERNS.len()) % 5;
    let p = [0.25, 0.4, 0.6][i as usize % 3];
    let t = gen_system(n, p, 2, 1000 + i);
    let size = 1 + (i as usize * 7 / 3) % 8;
    let f = gen_formula(pattern, size, 2, 5000 + i).expect("valid pattern");
    (t, f)
}
