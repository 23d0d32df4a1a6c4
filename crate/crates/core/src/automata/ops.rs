use std::collections::{HashMap, VecDeque};

use super::{Alphabet, Automaton, Dpa, Dsa, Letter, Nba};
use crate::error::{Error, Result};
use crate::graph::{can_reach, cyclic_nodes};
use crate::lasso::Lasso;

/// Maps a letter of the product alphabet to the pair of component letters.
pub type Combiner<'a> = &'a dyn Fn(Letter) -> (Letter, Letter);

/// Removes unreachable states and states from which no accepting cycle is
/// reachable. States are renumbered in BFS order.
pub fn reachable_trim(nba: &Nba) -> Nba {
    let n = nba.num_states();
    let mut reach = vec![false; n];
    let mut order = Vec::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &q in nba.initial() {
        if !reach[q] {
            reach[q] = true;
            queue.push_back(q);
        }
    }
    while let Some(q) = queue.pop_front() {
        order.push(q);
        for &(_, t) in nba.transitions(q) {
            let t = t as usize;
            if !reach[t] {
                reach[t] = true;
                queue.push_back(t);
            }
        }
    }
    let cyc = cyclic_nodes(n, &reach, |q| nba.transitions(q).iter().map(|&(_, t)| t as usize));
    let good: Vec<bool> = (0..n).map(|q| cyc[q] && nba.is_accepting(q)).collect();
    let mut pred = vec![Vec::new(); n];
    for q in 0..n {
        for &(_, t) in nba.transitions(q) {
            pred[t as usize].push(q);
        }
    }
    let live = can_reach(n, &reach, &good, &pred);
    let mut rename = vec![usize::MAX; n];
    let kept: Vec<usize> = order.into_iter().filter(|&q| live[q]).collect();
    for (i, &q) in kept.iter().enumerate() {
        rename[q] = i;
    }
    let mut out = Nba::new(nba.alphabet().clone(), kept.len());
    for &q in nba.initial() {
        if live[q] {
            out.add_initial(rename[q]);
        }
    }
    for (i, &q) in kept.iter().enumerate() {
        out.set_accepting(i, nba.is_accepting(q));
        for &(l, t) in nba.transitions(q) {
            if live[t as usize] {
                out.add_transition(i, l, rename[t as usize]);
            }
        }
    }
    out.finish();
    out
}

fn check_letters(alphabet: &Alphabet, w: &Lasso<Letter>) -> Result<()> {
    let limit = alphabet.num_letters() as Letter;
    if w.stem.iter().chain(&w.cycle).any(|&l| l >= limit) {
        return Err(Error::Alphabet("lasso letter outside the automaton's alphabet".into()));
    }
    Ok(())
}

/// Exact membership of an ultimately periodic word.
pub fn lasso_membership(a: &Automaton, w: &Lasso<Letter>) -> Result<bool> {
    check_letters(a.alphabet(), w)?;
    Ok(match a {
        Automaton::Nba(n) => nba_accepts(n, w),
        Automaton::Dsa(d) => {
            let (prefix, recurring) = det_run(|q, l| d.succ(q, l), d.initial(), w);
            !prefix.iter().chain(&recurring).any(|&q| d.is_bad(q))
        }
        Automaton::Dpa(d) => {
            let (_, recurring) = det_run(|q, l| d.succ(q, l), d.initial(), w);
            recurring.iter().map(|&q| d.color(q)).min().unwrap() % 2 == 0
        }
    })
}

/// Runs a deterministic automaton on a lasso; returns the states visited
/// before the recurring part and the recurring states.
pub(crate) fn det_run(
    step: impl Fn(usize, Letter) -> usize,
    init: usize,
    w: &Lasso<Letter>,
) -> (Vec<usize>, Vec<usize>) {
    let mut visited = vec![init];
    let mut q = init;
    for &l in &w.stem {
        q = step(q, l);
        visited.push(q);
    }
    let mut starts: HashMap<usize, usize> = HashMap::new();
    let mut rounds: Vec<Vec<usize>> = Vec::new();
    loop {
        if let Some(&i) = starts.get(&q) {
            let recurring: Vec<usize> = rounds[i..].iter().flatten().copied().collect();
            let prefix = visited.into_iter().chain(rounds[..i].iter().flatten().copied()).collect();
            return (prefix, recurring);
        }
        starts.insert(q, rounds.len());
        let mut round = Vec::new();
        for &l in &w.cycle {
            q = step(q, l);
            round.push(q);
        }
        rounds.push(round);
    }
}

fn nba_accepts(nba: &Nba, w: &Lasso<Letter>) -> bool {
    let len = w.len();
    let n = nba.num_states() * len;
    let id = |q: usize, pos: usize| q * len + pos;
    let succ = |v: usize| {
        let (q, pos) = (v / len, v % len);
        let next = w.next_pos(pos);
        nba.post(q, *w.at(pos)).map(move |t| t * len + next).collect::<Vec<_>>()
    };
    let mut reach = vec![false; n];
    let mut stack: Vec<usize> = nba.initial().iter().map(|&q| id(q, 0)).collect();
    for &v in &stack {
        reach[v] = true;
    }
    while let Some(v) = stack.pop() {
        for t in succ(v) {
            if !reach[t] {
                reach[t] = true;
                stack.push(t);
            }
        }
    }
    let cyc = cyclic_nodes(n, &reach, succ);
    (0..n).any(|v| cyc[v] && nba.is_accepting(v / len))
}

/// Parity to Büchi: guess the least even color seen infinitely often.
pub fn dpa_to_nba(d: &Dpa) -> Nba {
    let n = d.num_states();
    let evens: Vec<u32> = d.colors().into_iter().filter(|c| c % 2 == 0).collect();
    let mut nba = Nba::new(d.alphabet().clone(), n * (1 + evens.len()));
    let copy = |i: usize, q: usize| (i + 1) * n + q;
    nba.add_initial(d.initial());
    for q in 0..n {
        for letter in d.alphabet().letters() {
            let t = d.succ(q, letter);
            nba.add_transition(q, letter, t);
            for (i, &c) in evens.iter().enumerate() {
                if d.color(t) >= c {
                    nba.add_transition(q, letter, copy(i, t));
                    if d.color(q) >= c {
                        nba.add_transition(copy(i, q), letter, copy(i, t));
                    }
                }
            }
        }
        for (i, &c) in evens.iter().enumerate() {
            nba.set_accepting(copy(i, q), d.color(q) == c);
        }
    }
    nba.finish();
    reachable_trim(&nba)
}

/// Whether some word is accepted by both parity automata.
pub fn dpa_intersection_nonempty(a: &Dpa, b: &Dpa) -> Result<bool> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::Alphabet("operands use different alphabets".into()));
    }
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states = vec![(a.initial(), b.initial())];
    ids.insert(states[0], 0);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (p, q) = states[i];
        let mut out = Vec::new();
        for l in a.alphabet().letters() {
            let s = (a.succ(p, l), b.succ(q, l));
            let j = *ids.entry(s).or_insert_with(|| {
                states.push(s);
                states.len() - 1
            });
            out.push(j);
        }
        out.sort_unstable();
        out.dedup();
        succ.push(out);
        i += 1;
    }
    let ca: Vec<u32> = states.iter().map(|&(p, _)| a.color(p)).collect();
    let cb: Vec<u32> = states.iter().map(|&(_, q)| b.color(q)).collect();
    Ok(good_cycle(&vec![true; states.len()], &succ, &ca, &cb))
}

/// Some cycle inside `alive` whose minimal colors are even in both maps.
fn good_cycle(alive: &[bool], succ: &[Vec<usize>], ca: &[u32], cb: &[u32]) -> bool {
    let n = alive.len();
    let (comp, ncomp) = crate::graph::scc(n, alive, |v| succ[v].iter().copied());
    let mut members = vec![Vec::new(); ncomp];
    for v in 0..n {
        if alive[v] {
            members[comp[v]].push(v);
        }
    }
    for m in members {
        let cyclic = m.len() > 1 || succ[m[0]].contains(&m[0]);
        if !cyclic {
            continue;
        }
        let min_a = m.iter().map(|&v| ca[v]).min().unwrap();
        let min_b = m.iter().map(|&v| cb[v]).min().unwrap();
        if min_a % 2 == 0 && min_b % 2 == 0 {
            return true;
        }
        let mut sub = vec![false; n];
        for &v in &m {
            sub[v] = if min_a % 2 == 1 { ca[v] != min_a } else { cb[v] != min_b };
        }
        if good_cycle(&sub, succ, ca, cb) {
            return true;
        }
    }
    false
}

pub fn dpa_is_empty(d: &Dpa) -> bool {
    let all = Dpa::new(d.alphabet().clone(), 0, vec![0], vec![0; d.alphabet().num_letters()])
        .expect("one-state automaton");
    !dpa_intersection_nonempty(d, &all).expect("same alphabet")
}

/// Language equivalence of parity automata.
pub fn dpa_equiv(a: &Dpa, b: &Dpa) -> Result<bool> {
    Ok(!dpa_intersection_nonempty(a, &b.complement())? && !dpa_intersection_nonempty(b, &a.complement())?)
}

/// Disjoint union.
pub fn union(ns: &[Nba]) -> Result<Nba> {
    let first = ns
        .first()
        .ok_or_else(|| Error::semantic("union of an empty list"))?;
    let mut out = Nba::new(first.alphabet().clone(), 0);
    for a in ns {
        if a.alphabet() != first.alphabet() {
            return Err(Error::Alphabet("union operands use different alphabets".into()));
        }
        let base = out.num_states();
        for q in 0..a.num_states() {
            out.add_state(a.is_accepting(q));
        }
        for &q in a.initial() {
            out.add_initial(base + q);
        }
        for q in 0..a.num_states() {
            for &(l, t) in a.transitions(q) {
                out.add_transition(base + q, l, base + t as usize);
            }
        }
    }
    out.finish();
    Ok(out)
}

/// Intersection of two Büchi automata over the same alphabet.
pub fn intersect(a: &Nba, b: &Nba) -> Result<Nba> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::Alphabet("intersection operands use different alphabets".into()));
    }
    let al = a.alphabet().clone();
    product_nba(a, b, &al, &|l| (l, l))
}

fn product_nba(a: &Nba, b: &Nba, alphabet: &Alphabet, comb: Combiner) -> Result<Nba> {
    let mut ids: HashMap<(usize, usize, u8), usize> = HashMap::new();
    let mut states: Vec<(usize, usize, u8)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut out = Nba::new(alphabet.clone(), 0);
    let mut intern = |s: (usize, usize, u8), out: &mut Nba, queue: &mut VecDeque<usize>, states: &mut Vec<_>| {
        *ids.entry(s).or_insert_with(|| {
            states.push(s);
            queue.push_back(states.len() - 1);
            out.add_state(s.2 == 1 && b.is_accepting(s.1))
        })
    };
    for &p in a.initial() {
        for &q in b.initial() {
            let i = intern((p, q, 0), &mut out, &mut queue, &mut states);
            out.add_initial(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (p, q, f) = states[i];
        let nf = match f {
            0 if a.is_accepting(p) => 1,
            1 if b.is_accepting(q) => 0,
            f => f,
        };
        for letter in alphabet.letters() {
            let (la, lb) = comb(letter);
            let pa: Vec<usize> = a.post(p, la).collect();
            if pa.is_empty() {
                continue;
            }
            let qb: Vec<usize> = b.post(q, lb).collect();
            for &p2 in &pa {
                for &q2 in &qb {
                    let j = intern((p2, q2, nf), &mut out, &mut queue, &mut states);
                    out.add_transition(i, letter, j);
                }
            }
        }
    }
    out.finish();
    Ok(reachable_trim(&out))
}

fn product_dsa(a: &Dsa, b: &Dsa, alphabet: &Alphabet, comb: Combiner) -> Result<Dsa> {
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut states = vec![(a.initial(), b.initial())];
    ids.insert(states[0], 0);
    let mut delta = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let (p, q) = states[i];
        for letter in alphabet.letters() {
            let (la, lb) = comb(letter);
            let s = (a.succ(p, la), b.succ(q, lb));
            let j = *ids.entry(s).or_insert_with(|| {
                states.push(s);
                states.len() - 1
            });
            delta.push(j as u32);
        }
        i += 1;
    }
    let bad = states.iter().map(|&(p, q)| a.is_bad(p) || b.is_bad(q)).collect();
    Dsa::new(alphabet.clone(), 0, bad, delta)
}

/// Synchronous product. `comb` maps each letter of `alphabet` to the letters
/// read by `a` and `b`. Two safety automata give a safety automaton (bad if
/// either is bad); any Büchi operand gives a Büchi automaton.
pub fn product(a: &Automaton, b: &Automaton, alphabet: &Alphabet, comb: Combiner) -> Result<Automaton> {
    let la = a.alphabet().num_letters() as Letter;
    let lb = b.alphabet().num_letters() as Letter;
    if alphabet.letters().any(|l| {
        let (x, y) = comb(l);
        x >= la || y >= lb
    }) {
        return Err(Error::Alphabet("combiner produces letters outside an operand alphabet".into()));
    }
    match (a, b) {
        (Automaton::Dsa(x), Automaton::Dsa(y)) => Ok(product_dsa(x, y, alphabet, comb)?.into()),
        (Automaton::Dpa(_), _) | (_, Automaton::Dpa(_)) => Err(Error::semantic(
            "products are defined for Büchi and safety automata",
        )),
        _ => {
            let as_nba = |x: &Automaton| match x {
                Automaton::Nba(n) => n.clone(),
                Automaton::Dsa(d) => d.to_nba(),
                Automaton::Dpa(_) => unreachable!(),
            };
            Ok(product_nba(&as_nba(a), &as_nba(b), alphabet, comb)?.into())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::ltl_to_nba;
    use crate::hyperltl::parse_ltl;

    fn al() -> Alphabet {
        Alphabet::new(vec![vec!["a".into()]])
    }

    fn w(stem: &[u64], cycle: &[u64]) -> Lasso<Letter> {
        Lasso::new(stem.to_vec(), cycle.to_vec()).unwrap()
    }

    #[test]
    fn accept_all_dsa() {
        let d: Automaton = Dsa::universal(al()).unwrap().into();
        assert!(lasso_membership(&d, &w(&[0, 1], &[1, 0])).unwrap());
        assert!(lasso_membership(&d, &w(&[], &[0])).unwrap());
    }

    #[test]
    fn globally_a() {
        let g: Automaton = ltl_to_nba(&parse_ltl("G a_p").unwrap(), &["p".into()]).unwrap().into();
        assert!(lasso_membership(&g, &w(&[], &[1])).unwrap());
        assert!(!lasso_membership(&g, &w(&[0], &[1])).unwrap());
        assert!(lasso_membership(&g, &w(&[2], &[1])).is_err());
    }

    #[test]
    fn dpa_roundtrip_simple() {
        // colors: state 0 (last read a) = 0, state 1 = 1 => infinitely many a
        let d = Dpa::new(al(), 1, vec![0, 1], vec![1, 0, 1, 0]).unwrap();
        let n: Automaton = dpa_to_nba(&d).into();
        let d: Automaton = d.into();
        for (s, c) in [(&[][..], &[1u64][..]), (&[1], &[0]), (&[0], &[0, 1]), (&[], &[0])] {
            assert_eq!(lasso_membership(&d, &w(s, c)).unwrap(), lasso_membership(&n, &w(s, c)).unwrap());
        }
        let empty = Dpa::new(al(), 0, vec![1], vec![0, 0]).unwrap();
        assert!(dpa_is_empty(&empty));
        assert_eq!(dpa_to_nba(&empty).num_states(), 0);
        let all = Dpa::new(al(), 0, vec![0], vec![0, 0]).unwrap();
        assert!(lasso_membership(&dpa_to_nba(&all).into(), &w(&[1], &[0])).unwrap());
    }

    #[test]
    fn parity_emptiness_and_equivalence() {
        let inf_a = Dpa::new(al(), 1, vec![0, 1], vec![1, 0, 1, 0]).unwrap();
        // same language with a redundant copy
        let inf_a2 = Dpa::new(al(), 2, vec![0, 1, 3], vec![1, 0, 1, 0, 1, 0]).unwrap();
        assert!(!dpa_is_empty(&inf_a));
        assert!(dpa_equiv(&inf_a, &inf_a2).unwrap());
        assert!(!dpa_equiv(&inf_a, &inf_a.complement()).unwrap());
        let fin_a = inf_a.complement();
        assert!(!dpa_intersection_nonempty(&inf_a, &fin_a).unwrap());
    }

    #[test]
    fn union_and_intersection() {
        let v = ["p".to_string()];
        let fa = ltl_to_nba(&parse_ltl("F a_p").unwrap(), &v).unwrap();
        let gna = ltl_to_nba(&parse_ltl("G !a_p").unwrap(), &v).unwrap();
        let u: Automaton = union(&[fa.clone(), gna.clone()]).unwrap().into();
        let i: Automaton = intersect(&fa, &gna).unwrap().into();
        for (s, c) in [(&[][..], &[1u64][..]), (&[1], &[0]), (&[], &[0])] {
            assert!(lasso_membership(&u, &w(s, c)).unwrap());
            assert!(!lasso_membership(&i, &w(s, c)).unwrap());
        }
    }
}
