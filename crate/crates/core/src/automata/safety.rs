use std::collections::{HashMap, VecDeque};

use super::{Dsa, Letter, Nba, DEFAULT_STATE_CAP};
use crate::error::{Error, Result};
use crate::lasso::Lasso;

/// Subset construction from several start sets at once. Returns the
/// discovered subsets (index 0 is the empty set), the dense transition table
/// and the index of each start set.
pub(crate) fn subsets(
    nba: &Nba,
    starts: &[Vec<usize>],
    cap: usize,
) -> Result<(Vec<Vec<usize>>, Vec<u32>, Vec<usize>)> {
    nba.alphabet().check_dense()?;
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut sets: Vec<Vec<usize>> = vec![Vec::new()];
    ids.insert(Vec::new(), 0);
    let mut start_ids = Vec::new();
    for s in starts {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        let id = *ids.entry(s.clone()).or_insert_with(|| {
            sets.push(s);
            sets.len() - 1
        });
        start_ids.push(id);
    }
    let mut delta = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        for letter in nba.alphabet().letters() {
            let next = nba.post_set(&sets[i], letter);
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    if sets.len() >= cap {
                        return Err(Error::cap("subset construction states", cap));
                    }
                    sets.push(next.clone());
                    ids.insert(next, sets.len() - 1);
                    sets.len() - 1
                }
            };
            delta.push(id as u32);
        }
        i += 1;
    }
    Ok((sets, delta, start_ids))
}

/// Subset construction over several start sets; the returned automaton has
/// its initial state at the first start set.
pub fn subset_automaton(nba: &Nba, starts: &[Vec<usize>]) -> Result<(Dsa, Vec<usize>)> {
    let (sets, delta, start_ids) = subsets(nba, starts, DEFAULT_STATE_CAP)?;
    let bad = sets.iter().map(Vec::is_empty).collect();
    let init = start_ids.first().copied().unwrap_or(0);
    Ok((Dsa::new(nba.alphabet().clone(), init, bad, delta)?, start_ids))
}

/// Deterministic safety automaton for the words on which `nba` has an
/// infinite run. Equals `L(nba)` whenever every state is accepting (or, in
/// general, whenever the language is safety and every infinite run accepts).
pub fn safety_determinize(nba: &Nba) -> Result<Dsa> {
    let starts = vec![nba.initial().to_vec()];
    Ok(subset_automaton(nba, &starts)?.0)
}

/// Reach-bad automaton accepting exactly the complement of `d`.
pub fn complement_dsa(d: &Dsa) -> Nba {
    let mut nba = Nba::new(d.alphabet().clone(), d.num_states());
    nba.add_initial(d.initial());
    for q in 0..d.num_states() {
        nba.set_accepting(q, d.is_bad(q));
        for letter in d.alphabet().letters() {
            nba.add_transition(q, letter, d.succ(q, letter));
        }
    }
    nba.finish();
    nba
}

/// Makes every state with empty residual language bad.
fn normalize(d: &Dsa) -> Vec<bool> {
    d.live_states().into_iter().map(|l| !l).collect()
}

/// Coarsest partition refining `{bad, live}` compatible with transitions.
fn moore_partition(d: &Dsa, bad: &[bool]) -> Vec<usize> {
    let n = d.num_states();
    let mut block: Vec<usize> = bad.iter().map(|&b| b as usize).collect();
    let mut count = 0;
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|q| {
                let sig = if bad[q] {
                    (block[q], Vec::new())
                } else {
                    (block[q], d.alphabet().letters().map(|l| block[d.succ(q, l)]).collect())
                };
                let k = ids.len();
                *ids.entry(sig).or_insert(k)
            })
            .collect();
        let c = ids.len();
        block = next;
        if c == count {
            return block;
        }
        count = c;
    }
}

/// Minimal DSA for `L(d)`: reachable part, empty-residual states merged into
/// a single bad sink, Moore refinement; states numbered in BFS order from the
/// initial state (letters ascending), so equal languages give equal automata.
pub fn minimize_dsa(d: &Dsa) -> Dsa {
    let bad = normalize(d);
    let block = moore_partition(d, &bad);
    let al = d.alphabet();
    let mut rename: HashMap<usize, usize> = HashMap::new();
    let mut reps = Vec::new();
    let mut queue = VecDeque::new();
    rename.insert(block[d.initial()], 0);
    reps.push(d.initial());
    queue.push_back(d.initial());
    let mut delta = Vec::new();
    while let Some(q) = queue.pop_front() {
        for l in al.letters() {
            let t = d.succ(q, l);
            let id = *rename.entry(block[t]).or_insert_with(|| {
                reps.push(t);
                queue.push_back(t);
                reps.len() - 1
            });
            delta.push(id as u32);
        }
    }
    let bad_out = reps.iter().map(|&q| bad[q]).collect();
    Dsa::new(al.clone(), 0, bad_out, delta).expect("minimization preserves DSA invariants")
}

/// Language equivalence of two safety automata. `None` when equivalent,
/// otherwise a lasso accepted by exactly one of them.
pub fn dsa_equiv(a: &Dsa, b: &Dsa) -> Result<Option<Lasso<Letter>>> {
    if a.alphabet() != b.alphabet() {
        return Err(Error::Alphabet("equivalence operands use different alphabets".into()));
    }
    let (ba, bb) = (normalize(a), normalize(b));
    let al = a.alphabet();
    let mut parent: HashMap<(usize, usize), Option<((usize, usize), Letter)>> = HashMap::new();
    let start = (a.initial(), b.initial());
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        if ba[p] != bb[q] {
            let mut word = Vec::new();
            let mut cur = (p, q);
            while let Some(Some((prev, l))) = parent.get(&cur) {
                word.push(*l);
                cur = *prev;
            }
            word.reverse();
            let (stem, cycle) = if ba[p] {
                live_lasso(b, &bb, q)
            } else {
                live_lasso(a, &ba, p)
            };
            word.extend(stem);
            return Ok(Some(Lasso::new(word, cycle)?));
        }
        if ba[p] {
            continue;
        }
        for l in al.letters() {
            let s = (a.succ(p, l), b.succ(q, l));
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(s) {
                e.insert(Some(((p, q), l)));
                queue.push_back(s);
            }
        }
    }
    Ok(None)
}

/// A lasso from live state `q` that stays live forever.
fn live_lasso(d: &Dsa, bad: &[bool], q: usize) -> (Vec<Letter>, Vec<Letter>) {
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut letters = Vec::new();
    let mut cur = q;
    loop {
        if let Some(&i) = seen.get(&cur) {
            let cycle = letters.split_off(i);
            return (letters, cycle);
        }
        seen.insert(cur, letters.len());
        let l = d
            .alphabet()
            .letters()
            .find(|&l| !bad[d.succ(cur, l)])
            .expect("live states have a live successor");
        letters.push(l);
        cur = d.succ(cur, l);
    }
}

/// Exact equivalence of two Büchi automata recognizing safety languages.
pub fn safety_equiv(a: &Nba, b: &Nba) -> Result<Option<Lasso<Letter>>> {
    dsa_equiv(&safety_determinize(a)?, &safety_determinize(b)?)
}

/// Partitions start sets by the language of infinite runs from them.
/// Class ids are numbered by first occurrence.
pub fn residual_classes(nba: &Nba, starts: &[Vec<usize>]) -> Vec<usize> {
    let (sets, delta, start_ids) =
        subsets(nba, starts, usize::MAX).expect("alphabet checked by caller");
    let bad = sets.iter().map(Vec::is_empty).collect();
    let d = Dsa::new(nba.alphabet().clone(), 0, bad, delta).expect("valid subset automaton");
    let bad = normalize(&d);
    let block = moore_partition(&d, &bad);
    let mut ids: HashMap<usize, usize> = HashMap::new();
    start_ids
        .iter()
        .map(|&s| {
            let k = ids.len();
            *ids.entry(block[s]).or_insert(k)
        })
        .collect()
}

/// The universal-or-empty check used when pruning prophecy families.
pub(crate) fn trivial_language(d: &Dsa) -> Option<bool> {
    if d.is_empty() {
        Some(false)
    } else if d.is_universal() {
        Some(true)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{lasso_membership, Alphabet, Automaton};

    fn al() -> Alphabet {
        Alphabet::new(vec![vec!["a".into()]])
    }

    /// "a at position 1": 0 -*-> 1 -a-> 3 (loop), 1 -!a-> 2 (bad)
    pub(crate) fn a_at_one() -> Dsa {
        Dsa::new(al(), 0, vec![false, false, true, false], vec![1, 1, 2, 3, 2, 2, 3, 3]).unwrap()
    }

    #[test]
    fn minimize_is_fixpoint_on_minimal() {
        let d = a_at_one();
        assert_eq!(minimize_dsa(&d), d);
    }

    #[test]
    fn minimize_merges_duplicates_and_dead_states() {
        // state 4 can only go bad, so it merges with the sink
        let d = Dsa::new(
            al(),
            0,
            vec![false, false, false, true, false],
            vec![1, 2, 1, 1, 1, 4, 3, 3, 3, 3],
        )
        .unwrap();
        let m = minimize_dsa(&d);
        assert_eq!(m.num_states(), 4);
        assert!(dsa_equiv(&d, &m).unwrap().is_none());
    }

    #[test]
    fn complement_partitions() {
        let d = a_at_one();
        let c: Automaton = complement_dsa(&d).into();
        let da: Automaton = d.into();
        for code in 0..16u64 {
            let letters: Vec<u64> = (0..4).map(|i| code >> i & 1).collect();
            let w = Lasso::new(letters[..2].to_vec(), letters[2..].to_vec()).unwrap();
            assert_ne!(lasso_membership(&c, &w).unwrap(), lasso_membership(&da, &w).unwrap());
        }
        let all = Dsa::universal(al()).unwrap();
        assert_eq!(crate::automata::reachable_trim(&complement_dsa(&all)).num_states(), 0);
    }

    #[test]
    fn witness_distinguishes() {
        let d = a_at_one();
        let u = Dsa::universal(al()).unwrap();
        let w = dsa_equiv(&d, &u).unwrap().unwrap();
        assert!(!lasso_membership(&d.clone().into(), &w).unwrap());
        assert!(lasso_membership(&u.into(), &w).unwrap());
        assert!(dsa_equiv(&d, &d).unwrap().is_none());
    }
}
