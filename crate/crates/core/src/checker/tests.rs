use super::*;
use crate::bench::{gen_bench, BenchKind};
use crate::hyperltl::parse_hyperltl;
use crate::lasso::Lasso;
use crate::model::parse_ts;

fn running() -> (TransitionSystem, HyperLtl) {
    let b = gen_bench(BenchKind::Running).unwrap();
    (b.parse_system().unwrap(), b.parse_formula().unwrap())
}

fn tmp(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("hyprover-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn colex_order() {
    assert_eq!(colex_subsets(4, 2), vec![
        vec![0, 1],
        vec![0, 2],
        vec![1, 2],
        vec![0, 3],
        vec![1, 3],
        vec![2, 3]
    ]);
    assert_eq!(colex_subsets(3, 0), vec![Vec::<usize>::new()]);
    assert!(colex_subsets(2, 3).is_empty());
    assert_eq!(colex_subsets(5, 5).len(), 1);
}

#[test]
fn running_example_verdicts() {
    let (ts, f) = running();
    let opts = CheckOptions::default();
    assert_eq!(check_plain(&ts, &f, &opts).unwrap().outcome, Outcome::Unknown);
    let v = check_auto(&ts, &f, &opts).unwrap();
    assert_eq!(v.outcome, Outcome::Verified);
    assert_eq!(v.stats.min_p, Some(1));
    assert!(v.stats.min_p_exact);
    assert!(oracle_check(&ts, &f).unwrap());
}

#[test]
fn trivial_matrix_is_verified_without_prophecies() {
    let (ts, _) = running();
    let f = parse_hyperltl("forall p. exists q. G (a_p | !a_p)").unwrap();
    assert_eq!(check_plain(&ts, &f, &CheckOptions::default()).unwrap().outcome, Outcome::Verified);
}

#[test]
fn unsatisfiable_matrix_is_violated() {
    let (ts, _) = running();
    let f = parse_hyperltl("forall p. exists q. G (a_q & !a_q) | G (a_p & !a_p)").unwrap();
    assert!(!oracle_check(&ts, &f).unwrap());
    let v = check_auto(&ts, &f, &CheckOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::Violated);
    let p = Problem::new(&ts, &f, false).unwrap();
    assert!(replay(v.certificate.as_ref().unwrap(), &p, 1 << 20).unwrap());
}

#[test]
fn certificate_round_trip_and_tampering() {
    let (ts, f) = running();
    let v = check_auto(&ts, &f, &CheckOptions::default()).unwrap();
    let cert = v.certificate.unwrap();
    let p = Problem::new(&ts, &f, false).unwrap();
    let dir = tmp("cert");
    write_certificate(&dir, &cert, &p).unwrap();
    let back = load_certificate(&dir, &p).unwrap();
    assert_eq!(back, cert);
    assert!(replay(&back, &p, 1 << 20).unwrap());

    // a move along no edge
    let mut bad = back.clone();
    let v0 = (0..bad.strategy.choice.len()).find(|&v| bad.strategy.choice[v].is_some()).unwrap();
    bad.strategy.choice[v0] = Some(u32::MAX);
    assert!(!replay(&bad, &p, 1 << 20).unwrap());

    let other = parse_hyperltl("forall p. exists q. G (a_q <-> a_p)").unwrap();
    let q = Problem::new(&ts, &other, false).unwrap();
    assert!(matches!(replay(&cert, &q, 1 << 20), Err(Error::DigestMismatch(_))));
    assert!(matches!(load_certificate(&dir, &q), Err(Error::DigestMismatch(_))));
    let one = parse_ts("aps: a\ninit: s1\nstate s1 {a}\n  -> s1\n").unwrap();
    let r = Problem::new(&one, &f, false).unwrap();
    assert!(matches!(load_certificate(&dir, &r), Err(Error::DigestMismatch(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn certificates_are_deterministic() {
    let (ts, f) = running();
    let a = check_auto(&ts, &f, &CheckOptions::default()).unwrap().certificate.unwrap();
    let opts = CheckOptions {
        jobs: 1,
        ..CheckOptions::default()
    };
    let b = check_auto(&ts, &f, &opts).unwrap().certificate.unwrap();
    assert_eq!(a, b);
}

#[test]
fn simulated_plays_satisfy_the_matrix() {
    let (ts, f) = running();
    let v = check_auto(&ts, &f, &CheckOptions::default()).unwrap();
    let cert = v.certificate.unwrap();
    let p = Problem::new(&ts, &f, false).unwrap();
    for (stem, cycle) in [
        (vec![0], vec![1]),
        (vec![], vec![0, 1, 1]),
        (vec![1, 0, 0], vec![1]),
        (vec![], vec![0]),
    ] {
        let path = Lasso::new(stem, cycle).unwrap();
        assert!(simulate(&cert, &p, &[path], 1 << 20).unwrap());
    }
}

#[test]
fn manual_prophecies() {
    let (ts, f) = running();
    let ts2 = parse_ts(&ts.to_string()).unwrap();
    // xi = X a on the universal trace
    let al = crate::automata::Alphabet::new(vec![vec!["a".into()]]);
    let next_a = crate::automata::Dsa::new(al.clone(), 0, vec![false, false, true, false], vec![1, 1, 2, 3, 2, 2, 3, 3])
        .unwrap();
    let fam = |d: crate::prophecy::Prophecy| {
        ProphecyFamily::from_entries(
            1,
            vec![crate::prophecy::ProphecyEntry {
                var: "xi".into(),
                key: None,
                automaton: d,
            }],
        )
    };
    let good = fam(crate::prophecy::Prophecy::Parity(next_a.to_dpa()));
    assert_eq!(check_manual(&ts2, &f, &good, &CheckOptions::default()).unwrap().outcome, Outcome::Verified);
    let empty = Dpa::new(al, 0, vec![1], vec![0, 0]).unwrap();
    let useless = fam(crate::prophecy::Prophecy::Parity(empty));
    assert_eq!(check_manual(&ts2, &f, &useless, &CheckOptions::default()).unwrap().outcome, Outcome::Unknown);
}
