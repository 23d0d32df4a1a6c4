//! Büchi to parity determinization with compact Safra trees (nodes named
//! by age, renamed order-preservingly after removals).

use std::collections::HashMap;

use super::{safety_determinize, Alphabet, Dpa, Letter, Nba, ParityStepper};
use crate::error::{Error, Result};

/// Default bound on the number of states produced by determinization.
pub const DEFAULT_STATE_CAP: usize = 200_000;

type Set = Vec<u64>;

fn set_is_empty(s: &Set) -> bool {
    s.iter().all(|&w| w == 0)
}

fn set_union_into(a: &mut Set, b: &Set) {
    for (x, y) in a.iter_mut().zip(b) {
        *x |= y;
    }
}

fn set_minus(a: &mut Set, b: &Set) {
    for (x, y) in a.iter_mut().zip(b) {
        *x &= !y;
    }
}

fn set_and(a: &Set, b: &Set) -> Set {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn set_iter(s: &Set) -> impl Iterator<Item = usize> + '_ {
    s.iter().enumerate().flat_map(|(i, &w)| {
        (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| i * 64 + b)
    })
}

/// Node `i` has name `i + 1`; `parent[0]` is the root marker.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Tree {
    parent: Vec<u32>,
    label: Vec<Set>,
}

const ROOT: u32 = u32::MAX;

/// On-the-fly determinizer; states are `(tree, color of entering step)`.
pub struct SafraDeterminizer {
    nba: Nba,
    words: usize,
    accepting: Set,
    neutral: u32,
    states: Vec<(Tree, u32)>,
    ids: HashMap<(Tree, u32), usize>,
    cache: HashMap<(u32, Letter), u32>,
    cap: usize,
}

impl SafraDeterminizer {
    pub fn new(nba: &Nba, cap: usize) -> SafraDeterminizer {
        let n = nba.num_states();
        let words = n.div_ceil(64).max(1);
        let mut accepting = vec![0u64; words];
        for q in 0..n {
            if nba.is_accepting(q) {
                accepting[q / 64] |= 1 << (q % 64);
            }
        }
        SafraDeterminizer {
            nba: nba.clone(),
            words,
            accepting,
            neutral: 2 * n as u32 + 3,
            states: Vec::new(),
            ids: HashMap::new(),
            cache: HashMap::new(),
            cap,
        }
    }

    fn intern(&mut self, key: (Tree, u32)) -> Result<usize> {
        if let Some(&i) = self.ids.get(&key) {
            return Ok(i);
        }
        if self.states.len() >= self.cap {
            return Err(Error::cap("determinized automaton states", self.cap));
        }
        self.states.push(key.clone());
        self.ids.insert(key, self.states.len() - 1);
        Ok(self.states.len() - 1)
    }

    fn post(&self, s: &Set, letter: Letter) -> Set {
        let mut out = vec![0u64; self.words];
        for q in set_iter(s) {
            for t in self.nba.post(q, letter) {
                out[t / 64] |= 1 << (t % 64);
            }
        }
        out
    }

    fn step_tree(&self, tree: &Tree, letter: Letter) -> (Tree, u32) {
        let old = tree.parent.len();
        let mut parent = tree.parent.clone();
        let mut label: Vec<Set> = tree.label.iter().map(|s| self.post(s, letter)).collect();
        // spawn children for accepting states
        for v in 0..old {
            let acc = set_and(&label[v], &self.accepting);
            if !set_is_empty(&acc) {
                parent.push(v as u32);
                label.push(acc);
            }
        }
        let total = parent.len();
        let mut children = vec![Vec::new(); total];
        for v in 0..total {
            if parent[v] != ROOT {
                children[parent[v] as usize].push(v);
            }
        }
        // horizontal merge: a state stays only in the oldest branch
        fn hmerge(v: usize, forbidden: &Set, label: &mut [Set], children: &[Vec<usize>]) {
            set_minus(&mut label[v], forbidden);
            let mut seen = forbidden.clone();
            for &c in &children[v] {
                hmerge(c, &seen, label, children);
                set_union_into(&mut seen, &label[c]);
            }
        }
        if total > 0 {
            hmerge(0, &vec![0u64; self.words], &mut label, &children);
        }
        let mut removed = vec![false; total];
        let mut green = vec![false; total];
        for v in 0..total {
            if set_is_empty(&label[v]) {
                removed[v] = true;
            }
        }
        // vertical merge, top-down (parents have smaller indices)
        for v in 0..total {
            if removed[v] || children[v].iter().all(|&c| removed[c]) {
                continue;
            }
            let mut union = vec![0u64; self.words];
            for &c in &children[v] {
                if !removed[c] {
                    set_union_into(&mut union, &label[c]);
                }
            }
            if union == label[v] {
                green[v] = true;
                let mut stack = children[v].clone();
                while let Some(d) = stack.pop() {
                    removed[d] = true;
                    stack.extend(children[d].iter().copied());
                }
            }
        }
        let e = (0..old).find(|&v| removed[v]);
        let f = (0..total).find(|&v| green[v]);
        let color = match (e, f) {
            (Some(e), Some(f)) if f < e => 2 * (f as u32 + 1),
            (None, Some(f)) => 2 * (f as u32 + 1),
            (Some(e), _) => 2 * (e as u32 + 1) - 1,
            (None, None) => self.neutral,
        };
        let mut rename = vec![ROOT; total];
        let mut out = Tree {
            parent: Vec::new(),
            label: Vec::new(),
        };
        for v in 0..total {
            if removed[v] {
                continue;
            }
            rename[v] = out.parent.len() as u32;
            out.parent.push(if parent[v] == ROOT {
                ROOT
            } else {
                rename[parent[v] as usize]
            });
            out.label.push(std::mem::take(&mut label[v]));
        }
        (out, color)
    }

    pub fn built(&self) -> usize {
        self.states.len()
    }
}

impl ParityStepper for SafraDeterminizer {
    fn alphabet(&self) -> &Alphabet {
        self.nba.alphabet()
    }

    fn initial(&mut self) -> Result<usize> {
        let mut tree = Tree {
            parent: Vec::new(),
            label: Vec::new(),
        };
        if !self.nba.initial().is_empty() {
            let mut s = vec![0u64; self.words];
            for &q in self.nba.initial() {
                s[q / 64] |= 1 << (q % 64);
            }
            tree.parent.push(ROOT);
            tree.label.push(s);
        }
        let neutral = self.neutral;
        self.intern((tree, neutral))
    }

    fn step(&mut self, q: usize, letter: Letter) -> Result<usize> {
        if let Some(&t) = self.cache.get(&(q as u32, letter)) {
            return Ok(t as usize);
        }
        let (tree, color) = self.step_tree(&self.states[q].0, letter);
        let t = self.intern((tree, color))?;
        self.cache.insert((q as u32, letter), t as u32);
        Ok(t)
    }

    fn color(&self, q: usize) -> u32 {
        self.states[q].1
    }

    fn num_states(&self) -> usize {
        self.states.len()
    }
}

/// Merges adjacent colors of equal parity; preserves acceptance.
pub(crate) fn compress_colors(colors: &[u32]) -> Vec<u32> {
    let mut distinct: Vec<u32> = colors.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mut map = HashMap::new();
    let mut cur: Option<u32> = None;
    for &c in &distinct {
        let next = match cur {
            None => c % 2,
            Some(p) if p % 2 == c % 2 => p,
            Some(p) => p + 1,
        };
        map.insert(c, next);
        cur = Some(next);
    }
    colors.iter().map(|c| map[c]).collect()
}

/// Explores every letter from every state of a stepper into a dense DPA.
pub(crate) fn explore<S: ParityStepper>(s: &mut S) -> Result<Dpa> {
    let al = s.alphabet().clone();
    al.check_dense()?;
    let init = s.initial()?;
    let mut delta: Vec<u32> = Vec::new();
    let mut i = 0;
    while i < s.num_states() {
        for l in al.letters() {
            delta.push(s.step(i, l)? as u32);
        }
        i += 1;
    }
    let colors: Vec<u32> = (0..s.num_states()).map(|q| s.color(q)).collect();
    Dpa::new(al, init, compress_colors(&colors), delta)
}

/// Deterministic parity automaton for `L(nba)`, with structural fast paths
/// for deterministic and all-accepting inputs.
pub fn nba_to_dpa(nba: &Nba, cap: usize) -> Result<Dpa> {
    let al = nba.alphabet().clone();
    al.check_dense()?;
    if nba.is_deterministic() {
        // complete with a rejecting sink
        let n = nba.num_states();
        let sink = n;
        let m = al.num_letters();
        let mut delta = vec![sink as u32; (n + 1) * m];
        for q in 0..n {
            for &(l, t) in nba.transitions(q) {
                delta[q * m + l as usize] = t;
            }
        }
        let mut colors: Vec<u32> = (0..n).map(|q| !nba.is_accepting(q) as u32).collect();
        colors.push(1);
        let init = nba.initial().first().copied().unwrap_or(sink);
        return Dpa::new(al, init, colors, delta);
    }
    if nba.all_accepting() {
        return Ok(safety_determinize(nba)?.to_dpa());
    }
    let mut det = SafraDeterminizer::new(nba, cap);
    explore(&mut det)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{lasso_membership, Automaton};
    use crate::lasso::Lasso;

    #[test]
    fn eventually_a_guess_and_check() {
        let al = Alphabet::new(vec![vec!["a".into()]]);
        // 0 loops on everything, 0 -a-> 1, 1 loops on everything (accepting)
        let mut n = Nba::new(al, 2);
        n.add_initial(0);
        n.set_accepting(1, true);
        for l in 0..2 {
            n.add_transition(0, l, 0);
            n.add_transition(1, l, 1);
        }
        n.add_transition(0, 1, 1);
        n.finish();
        let mut det = SafraDeterminizer::new(&n, 100);
        let d: Automaton = explore(&mut det).unwrap().into();
        let cases = [(&[][..], &[0u64][..], false), (&[0, 0], &[1], true), (&[1], &[0], true), (&[], &[0, 1], true)];
        for (s, c, want) in cases {
            let w = Lasso::new(s.to_vec(), c.to_vec()).unwrap();
            assert_eq!(lasso_membership(&d, &w).unwrap(), want);
        }
    }

    #[test]
    fn deterministic_buchi_fast_path() {
        let al = Alphabet::new(vec![vec!["a".into()]]);
        let mut n = Nba::new(al, 2);
        n.add_initial(0);
        n.set_accepting(1, true);
        for q in 0..2 {
            n.add_transition(q, 0, 0);
            n.add_transition(q, 1, 1);
        }
        n.finish();
        let d = nba_to_dpa(&n, 10).unwrap();
        assert!(d.num_states() <= 3);
        assert!(d.colors().iter().all(|&c| c <= 1));
    }

    #[test]
    fn cap_is_reported() {
        let al = Alphabet::new(vec![vec!["a".into()]]);
        let mut n = Nba::new(al, 2);
        n.add_initial(0);
        n.set_accepting(1, true);
        for l in 0..2 {
            n.add_transition(0, l, 0);
            n.add_transition(1, l, 1);
        }
        n.add_transition(0, 1, 1);
        n.finish();
        let err = nba_to_dpa(&n, 1).unwrap_err();
        assert!(err.is_resource_cap());
    }

    #[test]
    fn color_compression() {
        assert_eq!(compress_colors(&[3, 5, 8, 9]), vec![1, 1, 2, 3]);
        assert_eq!(compress_colors(&[0, 2, 7]), vec![0, 0, 1]);
    }
}
