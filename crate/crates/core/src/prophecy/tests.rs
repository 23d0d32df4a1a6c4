use super::*;
use crate::automata::{dsa_equiv, explore, ltl_to_nba};
use crate::hyperltl::parse_hyperltl;
use crate::model::parse_ts;

const FIG_1A: &str = "aps: a\ninit: s1 s2\nstate s1 {a}\n  -> s1 s2\nstate s2 {}\n  -> s1 s2\n";

fn running() -> (TransitionSystem, Nba, Dsa) {
    let ts = parse_ts(FIG_1A).unwrap();
    let f = parse_hyperltl("forall p. exists q. G (a_q <-> X a_p)").unwrap();
    let nba = ltl_to_nba(&f.matrix, &f.vars()).unwrap();
    let dsa = matrix_dsa(&nba).unwrap();
    (ts, nba, dsa)
}

fn a_at_one() -> Dsa {
    let al = Alphabet::new(vec![vec!["a".into()]]);
    Dsa::new(al, 0, vec![false, false, true, false], vec![1, 1, 2, 3, 2, 2, 3, 3]).unwrap()
}

#[test]
fn running_example_prophecy_is_a_at_one() {
    let (ts, _, m) = running();
    let key = ProphecyKey {
        q: m.initial(),
        states: vec![0],
    };
    let d = build_prophecy(&ts, &m, 1, &key).unwrap();
    assert_eq!(dsa_equiv(&d, &a_at_one()).unwrap(), None);
    assert_eq!(d.num_states(), 4);
}

#[test]
fn bad_matrix_state_gives_empty_prophecy() {
    let (ts, _, m) = running();
    let bad = (0..m.num_states()).find(|&q| m.is_bad(q)).unwrap();
    let d = build_prophecy(&ts, &m, 1, &ProphecyKey { q: bad, states: vec![1] }).unwrap();
    assert!(d.is_empty());
}

#[test]
fn family_shapes() {
    let (ts, _, m) = running();
    let full = build_family(&ts, &m, 1, false).unwrap();
    let reduced = build_family(&ts, &m, 1, true).unwrap();
    assert!(!reduced.is_empty());
    assert!(reduced.len() <= full.len());
    assert_eq!(reduced.size_p(), 4);
    let vars = reduced.vars();
    assert!(vars.iter().all(|v| v.starts_with("xi")));
    // every key resolves, and selecting nothing turns variables off
    let none = reduced.select(&[]);
    for (key, src) in none.keys() {
        assert!(!matches!(src, BitSource::Var(_)), "{key:?}");
    }
}

#[test]
fn strategy_follows_the_set_bit() {
    let (ts, _, m) = running();
    let fam = build_family(&ts, &m, 1, true).unwrap();
    for (u, want) in [(0usize, 0usize), (1, 1)] {
        // bit for (q0, s1) set exactly when the universal trace reads a next
        let mut bits = vec![false; fam.len()];
        if want == 0 {
            if let BitSource::Var(j) = fam.source(m.initial(), &[0]) {
                bits[j] = true;
            }
        } else if let BitSource::Var(j) = fam.source(m.initial(), &[1]) {
            bits[j] = true;
        }
        let h = History {
            universal: vec![vec![u]],
            bits: vec![bits],
            existential: vec![],
        };
        let r = recommendation_strategy(&ts, &fam, &m, &h).unwrap();
        assert_eq!(r.choice, vec![want]);
        assert_eq!(r.q_hat, m.initial());
    }
}

#[test]
fn strategy_rejects_illegal_history() {
    let (ts, _, m) = running();
    let fam = build_family(&ts, &m, 1, true).unwrap();
    let h = History {
        universal: vec![vec![0], vec![5]],
        bits: vec![vec![], vec![]],
        existential: vec![vec![0]],
    };
    assert!(recommendation_strategy(&ts, &fam, &m, &h).is_err());
}

#[test]
fn lazy_relaxed_matches_explicit() {
    let (ts, nba, m) = running();
    let fam = build_family(&ts, &m, 1, true).unwrap();
    for subset in [vec![], vec![0], (0..fam.len().min(2)).collect::<Vec<_>>()] {
        let sub = fam.select(&subset);
        let mut st = RelaxedStepper::new(&m, &sub, 100_000).unwrap();
        let lazy = explore(&mut st).unwrap();
        let explicit = nba_to_dpa(&relaxed_matrix_nba(&nba, &sub).unwrap(), 100_000).unwrap();
        assert!(dpa_equiv(&lazy, &explicit).unwrap(), "subset {subset:?}");
    }
}

#[test]
fn family_dir_round_trip() {
    let (ts, _, m) = running();
    let fam = build_family(&ts, &m, 1, false).unwrap();
    let dir = std::env::temp_dir().join(format!("hyprover-fam-{}", std::process::id()));
    write_family_dir(&dir, &fam, &ts).unwrap();
    let back = read_family_dir(&dir, Some(&ts)).unwrap();
    assert_eq!(back, fam);
    let red = build_family(&ts, &m, 1, true).unwrap();
    write_family_dir(&dir, &red, &ts).unwrap();
    assert_eq!(read_family_dir(&dir, Some(&ts)).unwrap(), red);
    std::fs::remove_dir_all(&dir).unwrap();
}
