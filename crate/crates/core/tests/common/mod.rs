#![allow(dead_code)]

use hyprover::automata::{lasso_membership, Alphabet, Automaton, Dsa, Nba};
use hyprover::game::{ParityGame, Player};
use hyprover::hyperltl::{classify_safety, HyperLtl, Ltl, Quantifier, SafetyClass};
use hyprover::lasso::{zip, Lasso};
use hyprover::prophecy::{recommendation_strategy, History, Prophecy, ProphecyFamily, ProphecyKey};
use hyprover::model::{StateId, TransitionSystem};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn random_ts<R: Rng>(rng: &mut R, max_states: usize) -> TransitionSystem {
    let n = rng.gen_range(1..=max_states);
    let aps = vec!["a".to_string(), "b".to_string()];
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let labels = (0..n).map(|_| rng.gen_range(0..4u64)).collect();
    let mut init: Vec<StateId> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    if init.is_empty() {
        init.push(rng.gen_range(0..n));
    }
    let succ = (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=2.min(n));
            let mut all: Vec<StateId> = (0..n).collect();
            all.shuffle(rng);
            let mut s = all[..d].to_vec();
            s.sort_unstable();
            s
        })
        .collect();
    TransitionSystem::new(aps, names, labels, init, succ).unwrap()
}

fn random_safe<R: Rng>(rng: &mut R, vars: &[&str], depth: usize) -> Ltl {
    let lit = |rng: &mut R| {
        let ap = if rng.gen_bool(0.7) { "a" } else { "b" };
        let atom = Ltl::atom(ap, vars[rng.gen_range(0..vars.len())]);
        if rng.gen_bool(0.5) {
            Ltl::not(atom)
        } else {
            atom
        }
    };
    if depth <= 1 || rng.gen_bool(0.2) {
        return lit(rng);
    }
    let sub = |rng: &mut R| random_safe(rng, vars, depth - 1);
    match rng.gen_range(0..7) {
        0 => Ltl::and(sub(rng), sub(rng)),
        1 => Ltl::or(sub(rng), sub(rng)),
        2 => Ltl::next(sub(rng)),
        3 => Ltl::globally(sub(rng)),
        4 => Ltl::weak_until(sub(rng), sub(rng)),
        5 => Ltl::release(sub(rng), sub(rng)),
        _ => Ltl::iff(lit(rng), lit(rng)),
    }
}

/// A `∀^k ∃` formula with a syntactically safe matrix of depth at most 4
/// that mentions the existential variable.
pub fn random_formula<R: Rng>(rng: &mut R) -> HyperLtl {
    let k = rng.gen_range(1..=2);
    random_formula_k(rng, k)
}

pub fn random_formula_k<R: Rng>(rng: &mut R, k: usize) -> HyperLtl {
    let all = ["p", "q", "r"];
    let vars: Vec<&str> = if k == 1 { vec!["p", "r"] } else { all.to_vec() };
    loop {
        let m = random_safe(rng, &vars, 4);
        if classify_safety(&m) != SafetyClass::Safe || !m.atoms().iter().any(|(_, v)| v == "r") {
            continue;
        }
        let mut prefix: Vec<(Quantifier, String)> =
            vars[..k].iter().map(|v| (Quantifier::Forall, v.to_string())).collect();
        prefix.push((Quantifier::Exists, "r".into()));
        if let Ok(f) = HyperLtl::new(prefix, m) {
            return f;
        }
    }
}

/// A random lasso path from an initial state.
pub fn random_path<R: Rng>(rng: &mut R, ts: &TransitionSystem, max_len: usize) -> Lasso<StateId> {
    let len = rng.gen_range(1..=max_len);
    let mut path = vec![*ts.initial().choose(rng).unwrap()];
    while path.len() < len {
        let s = *ts.successors(*path.last().unwrap()).choose(rng).unwrap();
        path.push(s);
    }
    // close the loop at the first earlier occurrence of a successor, if any
    let last = *path.last().unwrap();
    let succ = ts.successors(last);
    if let Some(i) = (0..path.len()).find(|&i| succ.contains(&path[i])) {
        return Lasso::new(path[..i].to_vec(), path[i..].to_vec()).unwrap();
    }
    // otherwise extend until a state repeats
    loop {
        let s = *ts.successors(*path.last().unwrap()).choose(rng).unwrap();
        if let Some(i) = path.iter().position(|&x| x == s) {
            return Lasso::new(path[..i].to_vec(), path[i..].to_vec()).unwrap();
        }
        path.push(s);
    }
}

/// Letter bits of each state of `ts` in matrix slot `slot`.
pub fn slot_contrib(ts: &TransitionSystem, al: &Alphabet, slot: usize) -> Vec<u64> {
    ts.states()
        .map(|s| {
            al.slot(slot)
                .iter()
                .zip(al.slot_bits(slot))
                .filter(|(ap, _)| ts.ap_index(ap).is_some_and(|j| ts.label(s) >> j & 1 == 1))
                .fold(0, |acc, (_, &b)| acc | 1 << b)
        })
        .collect()
}

pub fn random_game<R: Rng>(rng: &mut R) -> ParityGame {
    let n = rng.gen_range(1..=8);
    let owner = (0..n)
        .map(|_| if rng.gen_bool(0.5) { Player::Verifier } else { Player::Refuter })
        .collect();
    let color = (0..n).map(|_| rng.gen_range(0..4)).collect();
    let succ = (0..n)
        .map(|_| {
            let d = rng.gen_range(1..=3);
            let mut s: Vec<u32> = (0..d).map(|_| rng.gen_range(0..n as u32)).collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    ParityGame::new(owner, color, succ).unwrap()
}

/// An all-accepting NBA with 1 to 4 states over the APs `a b`.
pub fn random_safety_nba<R: Rng>(rng: &mut R) -> Nba {
    let al = Alphabet::new(vec![vec!["a".into(), "b".into()]]);
    let n = rng.gen_range(1..=4);
    let mut nba = Nba::new(al.clone(), n);
    for q in 0..n {
        nba.set_accepting(q, true);
        for letter in al.letters() {
            for t in 0..n {
                if rng.gen_bool(0.35) {
                    nba.add_transition(q, letter, t);
                }
            }
        }
    }
    nba.add_initial(rng.gen_range(0..n));
    if rng.gen_bool(0.3) {
        nba.add_initial(rng.gen_range(0..n));
    }
    nba.finish();
    nba
}

/// All lassos over letters `0..letters` with stem at most `stem_max` and
/// nonempty loop at most `loop_max`.
pub fn word_lassos(letters: u64, stem_max: usize, loop_max: usize) -> Vec<Lasso<u64>> {
    fn words(letters: u64, len: usize) -> Vec<Vec<u64>> {
        (0..len).fold(vec![vec![]], |acc, _| {
            acc.into_iter()
                .flat_map(|w| {
                    (0..letters).map(move |x| {
                        let mut w = w.clone();
                        w.push(x);
                        w
                    })
                })
                .collect()
        })
    }
    let mut out = Vec::new();
    for s in 0..=stem_max {
        for l in 1..=loop_max {
            for stem in words(letters, s) {
                for cycle in words(letters, l) {
                    out.push(Lasso::new(stem.clone(), cycle).unwrap());
                }
            }
        }
    }
    out
}

/// Membership for an all-accepting NBA: some run exists iff the reachable
/// subset never empties, and on a lasso the subsets repeat within
/// `2^n` loop iterations.
pub fn safety_accepts(nba: &Nba, w: &Lasso<u64>) -> bool {
    let mut set: Vec<usize> = nba.initial().to_vec();
    let rounds = w.stem.len() + w.cycle.len() * ((1 << nba.num_states()) + 1);
    for i in 0..rounds {
        if set.is_empty() {
            return false;
        }
        let mut next: Vec<usize> = set.iter().flat_map(|&q| nba.post(q, *w.at(i)).collect::<Vec<_>>()).collect();
        next.sort_unstable();
        next.dedup();
        set = next;
    }
    !set.is_empty()
}

/// Brute-force `w ∈ L(key)`: some path of the existential copies from the
/// key's tuple keeps the matrix DSA, started in the key's state, out of bad
/// forever. Searched in the graph of (position, tuple, matrix state).
pub fn prophecy_member(ts: &TransitionSystem, matrix: &Dsa, k: usize, key: &ProphecyKey, w: &Lasso<u64>) -> bool {
    if matrix.is_bad(key.q) {
        return false;
    }
    let al = matrix.alphabet();
    let contrib: Vec<Vec<u64>> = (k..al.arity()).map(|c| slot_contrib(ts, al, c)).collect();
    type Node = (usize, Vec<StateId>, usize);
    let succ = |(pos, tuple, q): &Node| -> Vec<Node> {
        let letter = tuple.iter().enumerate().fold(*w.at(*pos), |acc, (c, &s)| acc | contrib[c][s]);
        let q2 = matrix.succ(*q, letter);
        if matrix.is_bad(q2) {
            return Vec::new();
        }
        let mut out: Vec<Vec<StateId>> = vec![vec![]];
        for &s in tuple {
            out = out
                .into_iter()
                .flat_map(|t| {
                    ts.successors(s).iter().map(move |&x| {
                        let mut t = t.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        out.into_iter().map(|t| (w.next_pos(*pos), t, q2)).collect()
    };
    let start: Node = (0, key.states.clone(), key.q);
    let mut nodes = vec![start.clone()];
    let mut index = std::collections::HashMap::from([(start, 0usize)]);
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let mut out = Vec::new();
        for t in succ(&nodes[i]) {
            let id = *index.entry(t.clone()).or_insert_with(|| {
                nodes.push(t);
                nodes.len() - 1
            });
            out.push(id);
        }
        edges.push(out);
        i += 1;
    }
    let mut alive = vec![true; nodes.len()];
    loop {
        let mut changed = false;
        for v in 0..nodes.len() {
            if alive[v] && !edges[v].iter().any(|&t| alive[t]) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            return alive[0];
        }
    }
}

pub struct Play {
    pub matrix_ok: bool,
    pub candidates_nonempty: bool,
}

/// Plays the recommendation strategy against the universal lasso paths
/// with truthful prophecy bits until the joint state repeats.
pub fn play_strategy(
    ts: &TransitionSystem,
    matrix: &Dsa,
    family: &ProphecyFamily,
    universal: &[Lasso<StateId>],
) -> Play {
    let zipped = zip(universal).unwrap();
    let al = matrix.alphabet();
    let contrib: Vec<Vec<u64>> = (0..al.arity()).map(|c| slot_contrib(ts, al, c)).collect();
    let k = family.k;
    let word = zipped.map(|t| t.iter().enumerate().fold(0, |acc, (c, &s)| acc | contrib[c][s]));
    let bits: Vec<Vec<bool>> = (0..zipped.len())
        .map(|i| {
            family
                .entries
                .iter()
                .map(|e| {
                    let Prophecy::Safety(d) = &e.automaton else { panic!("safety family expected") };
                    lasso_membership(&Automaton::Dsa(d.clone()), &word.suffix(i)).unwrap()
                })
                .collect()
        })
        .collect();
    let mut h = History::default();
    let mut q = matrix.initial();
    let mut seen = std::collections::HashSet::new();
    let mut play = Play {
        matrix_ok: true,
        candidates_nonempty: true,
    };
    let mut pos = 0;
    loop {
        h.universal.push(zipped.at(pos).clone());
        h.bits.push(bits[pos].clone());
        let rec = recommendation_strategy(ts, family, matrix, &h).unwrap();
        play.candidates_nonempty &= !rec.candidates.is_empty();
        let letter = rec
            .choice
            .iter()
            .enumerate()
            .fold(*word.at(pos), |acc, (c, &s)| acc | contrib[k + c][s]);
        q = matrix.succ(q, letter);
        if matrix.is_bad(q) {
            play.matrix_ok = false;
            return play;
        }
        h.existential.push(rec.choice.clone());
        pos = zipped.next_pos(pos);
        if h.existential.len() > zipped.stem.len() && !seen.insert((pos, rec.choice, q)) {
            return play;
        }
    }
}
