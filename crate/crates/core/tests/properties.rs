mod common;

use common::*;
use hypermc::automata::{
    complement, emptiness, export, intersect, ltl_to_nba, member, parse_hoa, self_composition, union, ExportFormat,
    LassoWord,
};
use hypermc::bench::{gen_formula, gen_system, gen_system_with_report};
use hypermc::checker::{check, CheckOptions, Strategy};
use hypermc::formula::{negate, parse_hyperltl, to_nnf, HyperFormula, Quantifier};
use hypermc::inclusion::{include_antichain, include_complement, is_counterexample};
use hypermc::oracle::{decide_naive, eval, LassoAssignment};
use hypermc::system::{parse_system, print_system, TransitionSystem};
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

/// Body of a random formula over one or two trace variables, with a
/// matching random lasso assignment.
fn body_and_word(seed: u64, size: usize) -> (HyperFormula, LassoWord) {
    let pattern = if seed % 2 == 0 { "a" } else { "ae" };
    let f = gen_formula(pattern, size, 2, seed).unwrap();
    let mut r = rng(seed ^ 0xabcd);
    let w = random_lasso(&mut r, f.prefix().len(), &aps(2), 3, 3);
    (f, w)
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn formulas_survive_printing(seed in any::<u64>(), size in 1usize..12, pattern in "[ae]{1,4}") {
        let f = gen_formula(&pattern, size, 3, seed).unwrap();
        prop_assert_eq!(parse_hyperltl(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn nnf_preserves_satisfaction(seed in any::<u64>(), size in 1usize..11) {
        let (f, w) = body_and_word(seed, size);
        let nnf = to_nnf(f.body());
        prop_assert!(nnf.is_nnf());
        let asg = LassoAssignment::from_zip(&f.vars(), &w);
        prop_assert_eq!(eval(f.body(), &asg, 0).unwrap(), eval(&nnf, &asg, 0).unwrap());
    }

    #[test]
    fn alternations_count_adjacent_switches(pattern in "[ae]{1,6}") {
        let f = gen_formula(&pattern, 1, 1, 0).unwrap();
        let switches = pattern.as_bytes().windows(2).filter(|w| w[0] != w[1]).count();
        prop_assert_eq!(f.alternations(), switches);
    }

    #[test]
    fn translation_matches_evaluation(seed in any::<u64>(), size in 1usize..11) {
        let (f, w) = body_and_word(seed, size);
        let a = ltl_to_nba(f.body(), &f.vars()).unwrap();
        let asg = LassoAssignment::from_zip(&f.vars(), &w);
        prop_assert_eq!(member(&a, &w), eval(f.body(), &asg, 0).unwrap(), "{} on {}", f.body(), w);
    }

    #[test]
    fn evaluation_ignores_unrolling(seed in any::<u64>(), size in 1usize..11, pos in 0usize..8) {
        let (f, w) = body_and_word(seed, size);
        let asg = LassoAssignment::from_zip(&f.vars(), &w);
        let unrolled = LassoAssignment::from_zip(&f.vars(), &w.unrolled());
        prop_assert_eq!(eval(f.body(), &asg, pos).unwrap(), eval(f.body(), &unrolled, pos).unwrap());
    }

    #[test]
    fn membership_ignores_unrolling(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_nba(&mut r, 5, 1, &aps(2));
        let w = random_lasso(&mut r, 1, &aps(2), 3, 3);
        prop_assert_eq!(member(&a, &w), member(&a, &w.unrolled()));
    }

    #[test]
    fn emptiness_matches_brute_force(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_nba(&mut r, 6, 1, &aps(2));
        let witness = emptiness(&a);
        prop_assert_eq!(witness.is_some(), naive_nonempty(&a));
        if let Some(w) = witness {
            prop_assert!(member(&a, &w), "witness {} rejected", w);
        }
    }

    #[test]
    fn double_complement_preserves_membership(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_nba(&mut r, 4, 1, &aps(1));
        let cc = complement(&complement(&a).unwrap()).unwrap();
        for _ in 0..20 {
            let w = random_lasso(&mut r, 1, &aps(1), 3, 3);
            prop_assert_eq!(member(&a, &w), member(&cc, &w));
        }
    }

    #[test]
    fn hoa_export_preserves_membership(seed in any::<u64>()) {
        let mut r = rng(seed);
        let arity = 1 + (seed % 2) as usize;
        let a = random_nba(&mut r, 5, arity, &aps(2));
        let back = parse_hoa(&export(&a, ExportFormat::HoaLike).unwrap()).unwrap();
        for _ in 0..20 {
            let w = random_lasso(&mut r, arity, &aps(2), 3, 3);
            prop_assert_eq!(member(&a, &w), member(&back, &w));
        }
    }

    #[test]
    fn self_composition_zips_traces(seed in any::<u64>()) {
        let t = gen_system(1 + (seed % 4) as usize, 0.4, 2, seed);
        let single = self_composition(&t, 1).unwrap();
        let pair = self_composition(&t, 2).unwrap();
        let mut r = rng(seed);
        // half the words come from the system itself
        let traces: Vec<LassoWord> = (0..2)
            .map(|_| match emptiness(&single) {
                Some(w) if r.gen_bool(0.5) => w,
                _ => random_lasso(&mut r, 1, t.aps(), 2, 2),
            })
            .collect();
        let zipped = LassoWord::zip(&traces, t.aps());
        prop_assert_eq!(member(&pair, &zipped), member(&single, &traces[0]) && member(&single, &traces[1]));
    }

    #[test]
    fn generated_systems_are_total_and_connected(seed in any::<u64>(), n in 1usize..40, p in 0.0f64..0.3) {
        let (t, _) = gen_system_with_report(n, p, 2, seed);
        prop_assert!(t.reachable().iter().all(|&r| r));
        prop_assert!((0..n).all(|s| !t.successors(s).is_empty()));
        prop_assert_eq!(&t, &gen_system(n, p, 2, seed));
    }

    #[test]
    fn systems_survive_printing(seed in any::<u64>(), n in 1usize..12) {
        let t = gen_system(n, 0.3, 3, seed);
        prop_assert_eq!(parse_system(&print_system(&t)).unwrap(), t);
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn engines_agree_and_counterexamples_separate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_nba(&mut r, 4, 1, &aps(2));
        let b = random_nba(&mut r, 4, 1, &aps(2));
        let by_complement = include_complement(&a, &b).unwrap();
        let by_antichain = include_antichain(&a, &b).unwrap();
        prop_assert_eq!(by_complement.included, by_antichain.included);
        for out in [&by_complement, &by_antichain] {
            prop_assert_eq!(out.counterexample.is_some(), !out.included);
            if let Some(w) = &out.counterexample {
                prop_assert!(is_counterexample(&a, &b, w));
            }
        }
    }

    #[test]
    fn union_contains_its_parts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_nba(&mut r, 3, 1, &aps(1));
        let b = random_nba(&mut r, 3, 1, &aps(1));
        let u = union(&a, &b).unwrap();
        prop_assert!(include_complement(&a, &u).unwrap().included);
        prop_assert!(include_antichain(&b, &u).unwrap().included);
    }

    #[test]
    fn complement_is_disjoint(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_nba(&mut r, 5, 1, &aps(2));
        let c = complement(&a).unwrap();
        prop_assert!(emptiness(&intersect(&a, &c).unwrap()).is_none());
    }

    #[test]
    fn negation_flips_the_verdict(i in 0u64..10_000) {
        let (t, f) = corpus_instance(i);
        let opts = CheckOptions::default();
        prop_assert_eq!(check(&t, &f, &opts).unwrap().holds, !check(&t, &negate(&f), &opts).unwrap().holds);
    }

    #[test]
    fn strategies_agree(i in 0u64..10_000) {
        let (t, f) = corpus_instance(i);
        let pure = check(&t, &f, &CheckOptions::default().with_strategy(Strategy::PureAbv)).unwrap();
        let incl = check(&t, &f, &CheckOptions::default().with_strategy(Strategy::Inclusion)).unwrap();
        prop_assert_eq!(pure.holds, incl.holds);
    }

    #[test]
    fn same_block_order_is_irrelevant(seed in any::<u64>(), size in 1usize..9) {
        let f = gen_formula("aa", size, 2, seed).unwrap();
        let t = gen_system(1 + (seed % 5) as usize, 0.4, 2, seed);
        let swapped = HyperFormula::new(
            vec![(Quantifier::Forall, f.prefix()[1].1.clone()), (Quantifier::Forall, f.prefix()[0].1.clone())],
            f.body().clone(),
        ).unwrap();
        let opts = CheckOptions::default();
        prop_assert_eq!(check(&t, &f, &opts).unwrap().holds, check(&t, &swapped, &opts).unwrap().holds);
    }

    #[test]
    fn complement_count_follows_alternations(i in 0u64..10_000) {
        let (t, f) = corpus_instance(i);
        for strategy in [Strategy::PureAbv, Strategy::Auto] {
            let v = check(&t, &f, &CheckOptions::default().with_strategy(strategy)).unwrap();
            let k = f.alternations();
            let expected = if v.stats.inclusion.is_some() { k.saturating_sub(1) } else { k };
            prop_assert_eq!(v.stats.complements, expected, "{} with {}", f, strategy);
            prop_assert_eq!(v.stats.complement_times.len(), v.stats.complements);
        }
    }

    #[test]
    fn oracle_ignores_ap_order(i in 0u64..10_000) {
        let (t, f) = corpus_instance(i);
        let mut reordered: Vec<String> = t.aps().to_vec();
        reordered.reverse();
        let labels = (0..t.num_states())
            .map(|s| {
                t.label_names(s)
                    .iter()
                    .map(|name| 1u64 << reordered.iter().position(|a| a == name).unwrap())
                    .sum()
            })
            .collect();
        let succ = (0..t.num_states()).map(|s| t.successors(s).to_vec()).collect();
        let t2 = TransitionSystem::new(reordered, t.initial().to_vec(), succ, labels).unwrap();
        prop_assert_eq!(decide_naive(&t, &f).unwrap(), decide_naive(&t2, &f).unwrap());
    }
}
