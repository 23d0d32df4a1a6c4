mod common;

use hyprover::automata::{
    complement_dsa, dsa_equiv, lasso_membership, minimize_dsa, nba_to_dpa, parse_automaton, print_automaton,
    safety_determinize, Automaton,
};
use hyprover::checker::{check_auto, oracle_check, CheckOptions, Outcome, Problem};
use hyprover::game::{brute_force_regions, verify_strategy, zielonka_solve, Player};
use hyprover::hyperltl::parse_hyperltl;
use hyprover::model::parse_ts;
use hyprover::prophecy::{build_family, relaxed_matrix_nba, Prophecy, ProphecyFamily};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dsa(e: &Prophecy) -> &hyprover::automata::Dsa {
    match e {
        Prophecy::Safety(d) => d,
        Prophecy::Parity(_) => panic!("safety family expected"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zielonka_matches_brute_force(seed in any::<u64>()) {
        let g = common::random_game(&mut rng(seed));
        let sol = zielonka_solve(&g);
        prop_assert_eq!(&sol.winner, &brute_force_regions(&g));
        for p in [Player::Verifier, Player::Refuter] {
            prop_assert!(verify_strategy(&g, &sol.strategy(p), &sol.region(p)).unwrap());
        }
    }

    #[test]
    fn game_text_round_trip(seed in any::<u64>()) {
        let g = common::random_game(&mut rng(seed));
        prop_assert_eq!(hyprover::game::ParityGame::from_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn system_and_formula_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ts = common::random_ts(&mut r, 5);
        let f = common::random_formula(&mut r);
        prop_assert_eq!(parse_ts(&ts.to_string()).unwrap(), ts);
        prop_assert_eq!(parse_hyperltl(&f.to_string()).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn safety_automata_keep_the_language(seed in any::<u64>()) {
        let nba = common::random_safety_nba(&mut rng(seed));
        let det = safety_determinize(&nba).unwrap();
        let min = minimize_dsa(&det);
        prop_assert_eq!(&minimize_dsa(&min), &min);
        prop_assert!(dsa_equiv(&det, &min).unwrap().is_none());
        let comp: Automaton = complement_dsa(&det).into();
        let dpa: Automaton = nba_to_dpa(&nba, 10_000).unwrap().into();
        let (det, min): (Automaton, Automaton) = (det.into(), min.into());
        let text = parse_automaton(&print_automaton(&min)).unwrap();
        for w in common::word_lassos(4, 2, 2) {
            let want = common::safety_accepts(&nba, &w);
            prop_assert_eq!(lasso_membership(&det, &w).unwrap(), want);
            prop_assert_eq!(lasso_membership(&min, &w).unwrap(), want);
            prop_assert_eq!(lasso_membership(&text, &w).unwrap(), want);
            prop_assert_eq!(lasso_membership(&comp, &w).unwrap(), !want);
            prop_assert_eq!(lasso_membership(&dpa, &w).unwrap(), want);
        }
    }

    #[test]
    fn prophecies_match_witness_search(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ts = common::random_ts(&mut r, 3);
        let f = common::random_formula_k(&mut r, 1);
        let p = Problem::new(&ts, &f, false).unwrap();
        let d = p.matrix_dsa.as_ref().unwrap();
        let fam = build_family(&p.ts, d, 1, false).unwrap();
        let letters = 1u64 << d.alphabet().prefix(1).width();
        let words = common::word_lassos(letters, 2, 2);
        for e in fam.entries.iter().take(4) {
            let key = e.key.as_ref().unwrap();
            let aut: Automaton = dsa(&e.automaton).clone().into();
            for w in &words {
                prop_assert_eq!(
                    lasso_membership(&aut, w).unwrap(),
                    common::prophecy_member(&p.ts, d, 1, key, w),
                    "key {:?} word {:?}", key, w
                );
            }
        }
    }

    #[test]
    fn family_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ts = common::random_ts(&mut r, 4);
        let f = common::random_formula(&mut r);
        let p = Problem::new(&ts, &f, false).unwrap();
        let d = p.matrix_dsa.as_ref().unwrap();
        let bound = d.num_states() * p.ts.num_states().pow(p.l as u32);
        for reduce in [false, true] {
            let fam = build_family(&p.ts, d, p.k, reduce).unwrap();
            prop_assert!(fam.len() <= bound);
            let vars = fam.vars();
            for (i, e) in fam.entries.iter().enumerate() {
                prop_assert!(!p.ts.aps().contains(&e.var));
                prop_assert!(!vars[..i].contains(&e.var));
                let a = dsa(&e.automaton);
                prop_assert_eq!(a.alphabet().arity(), p.k);
                prop_assert_eq!(&minimize_dsa(a), a);
                if reduce {
                    prop_assert!(!a.is_empty() && !a.is_universal());
                    for b in &fam.entries[..i] {
                        prop_assert!(dsa_equiv(dsa(&b.automaton), a).unwrap().is_some());
                    }
                }
            }
            let keys: Vec<_> = fam.entries.iter().map(|e| e.key.clone().unwrap()).collect();
            prop_assert!(keys.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn empty_family_relaxes_to_the_matrix(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ts = common::random_ts(&mut r, 3);
        let f = common::random_formula_k(&mut r, 1);
        let p = Problem::new(&ts, &f, false).unwrap();
        let relaxed: Automaton = relaxed_matrix_nba(&p.matrix_nba, &ProphecyFamily::from_entries(1, vec![])).unwrap().into();
        let matrix: Automaton = p.matrix_nba.clone().into();
        let letters = 1u64 << p.matrix_nba.alphabet().width();
        for w in common::word_lassos(letters, 1, 2) {
            prop_assert_eq!(lasso_membership(&relaxed, &w).unwrap(), lasso_membership(&matrix, &w).unwrap());
        }
    }

    #[test]
    fn recommendation_strategy_wins_on_true_instances(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ts = common::random_ts(&mut r, 4);
        let f = common::random_formula(&mut r);
        prop_assume!(oracle_check(&ts, &f).unwrap());
        let p = Problem::new(&ts, &f, false).unwrap();
        let d = p.matrix_dsa.as_ref().unwrap();
        let full = build_family(&p.ts, d, p.k, false).unwrap();
        let reduced = build_family(&p.ts, d, p.k, true).unwrap();
        for _ in 0..10 {
            let paths: Vec<_> = (0..p.k).map(|_| common::random_path(&mut r, &p.ts, 6)).collect();
            let play = common::play_strategy(&p.ts, d, &full, &paths);
            prop_assert!(play.matrix_ok && play.candidates_nonempty);
            prop_assert!(common::play_strategy(&p.ts, d, &reduced, &paths).matrix_ok);
        }
        let opts = CheckOptions { full: true, ..CheckOptions::default() };
        prop_assert_eq!(check_auto(&ts, &f, &opts).unwrap().outcome, Outcome::Verified);
    }

    #[test]
    fn bisimulation_keeps_the_verdict(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ts = common::random_ts(&mut r, 5);
        let f = common::random_formula(&mut r);
        let opts = CheckOptions { bisim: true, ..CheckOptions::default() };
        match (check_auto(&ts, &f, &CheckOptions::default()), check_auto(&ts, &f, &opts)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a.outcome, b.outcome),
            (Err(e), _) | (_, Err(e)) => prop_assert!(e.is_resource_cap(), "{}", e),
        }
    }
}
