//! ω-automata over tuple alphabets: Büchi (NBA), deterministic safety (DSA)
//! and deterministic parity (DPA) automata with the usual constructions.

mod ltl;
mod ops;
mod safety;
mod safra;
mod text;

use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub use ltl::{ltl_to_nba, ltl_to_nba_over};
pub use ops::{
    dpa_equiv, dpa_intersection_nonempty, dpa_is_empty, dpa_to_nba, intersect, lasso_membership, product, reachable_trim, union, Combiner,
};
pub use safety::{
    complement_dsa, dsa_equiv, minimize_dsa, residual_classes, safety_determinize, safety_equiv,
    subset_automaton,
};
pub use safra::{nba_to_dpa, SafraDeterminizer, DEFAULT_STATE_CAP};
pub use text::{parse_automaton, print_automaton};
pub(crate) use safety::trivial_language;
#[cfg(test)]
pub(crate) use safra::explore;

/// A letter of a tuple alphabet, one bit per `(slot, ap)` pair.
pub type Letter = u64;

/// Largest alphabet (in bits) for which dense transition tables are built.
pub const MAX_DENSE_BITS: u32 = 20;

/// Tuple alphabet `Σ_1 × … × Σ_m` with `Σ_i = 2^{AP_i}`, packed into a
/// `u64`. Bit positions are explicit so that slots can be extended without
/// renumbering existing letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    slots: Vec<Vec<String>>,
    bits: Vec<Vec<u32>>,
}

impl Alphabet {
    /// Sequential layout: slot 0 first, in AP order.
    pub fn new(slots: Vec<Vec<String>>) -> Alphabet {
        let mut next = 0;
        let bits = slots
            .iter()
            .map(|aps| {
                aps.iter()
                    .map(|_| {
                        next += 1;
                        next - 1
                    })
                    .collect()
            })
            .collect();
        Alphabet { slots, bits }
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, i: usize) -> &[String] {
        &self.slots[i]
    }

    pub fn slots(&self) -> &[Vec<String>] {
        &self.slots
    }

    /// Total number of bits.
    pub fn width(&self) -> u32 {
        self.bits.iter().map(|b| b.len() as u32).sum()
    }

    pub fn num_letters(&self) -> usize {
        1usize << self.width()
    }

    /// Iterator over all letters.
    pub fn letters(&self) -> std::ops::Range<Letter> {
        0..self.num_letters() as Letter
    }

    pub fn bit(&self, slot: usize, ap: &str) -> Option<u32> {
        let i = self.slots.get(slot)?.iter().position(|a| a == ap)?;
        Some(self.bits[slot][i])
    }

    /// Mask of all bits of one slot.
    pub fn slot_mask(&self, slot: usize) -> Letter {
        self.bits[slot].iter().fold(0, |m, &b| m | 1 << b)
    }

    /// The first `k` slots as an alphabet with the same bit positions.
    /// Only valid when those slots occupy the lowest bits.
    pub fn prefix(&self, k: usize) -> Alphabet {
        Alphabet {
            slots: self.slots[..k].to_vec(),
            bits: self.bits[..k].to_vec(),
        }
    }

    /// Whether every bit of the first `k` slots is below every other bit.
    pub fn prefix_is_low(&self, k: usize) -> bool {
        let low = self.bits[..k].iter().flatten().copied().max();
        let high = self.bits[k..].iter().flatten().copied().min();
        match (low, high) {
            (Some(l), Some(h)) => l < h,
            _ => true,
        }
    }

    /// Adds APs to `slot` using fresh high bits; existing letters keep their meaning.
    pub fn extend_slot(&self, slot: usize, extra: &[String]) -> Result<Alphabet> {
        let mut out = self.clone();
        let mut next = self.width();
        for ap in extra {
            if out.slots[slot].contains(ap) {
                return Err(Error::Alphabet(format!("`{ap}` already in slot {slot}")));
            }
            out.slots[slot].push(ap.clone());
            out.bits[slot].push(next);
            next += 1;
        }
        if next > 63 {
            return Err(Error::cap("alphabet bits", 63));
        }
        Ok(out)
    }

    /// Packs one label per slot, each given over the slot's AP list order.
    pub fn compose(&self, parts: &[u64]) -> Letter {
        let mut letter = 0;
        for (slot, &part) in parts.iter().enumerate() {
            for (i, &b) in self.bits[slot].iter().enumerate() {
                if part >> i & 1 == 1 {
                    letter |= 1 << b;
                }
            }
        }
        letter
    }

    /// The label of one slot over that slot's AP list order.
    pub fn part(&self, letter: Letter, slot: usize) -> u64 {
        self.bits[slot]
            .iter()
            .enumerate()
            .filter(|(_, &b)| letter >> b & 1 == 1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// Bit positions of a slot, in AP order.
    pub fn slot_bits(&self, slot: usize) -> &[u32] {
        &self.bits[slot]
    }

    pub(crate) fn check_dense(&self) -> Result<()> {
        if self.width() > MAX_DENSE_BITS {
            return Err(Error::cap("alphabet bits for explicit tables", MAX_DENSE_BITS as usize));
        }
        Ok(())
    }
}

/// Nondeterministic Büchi automaton with state-based acceptance. The
/// transition relation may be incomplete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nba {
    alphabet: Alphabet,
    initial: Vec<usize>,
    accepting: Vec<bool>,
    trans: Vec<Vec<(Letter, u32)>>,
}

impl Nba {
    pub fn new(alphabet: Alphabet, n: usize) -> Nba {
        Nba {
            alphabet,
            initial: Vec::new(),
            accepting: vec![false; n],
            trans: vec![Vec::new(); n],
        }
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.accepting.push(accepting);
        self.trans.push(Vec::new());
        self.accepting.len() - 1
    }

    pub fn add_initial(&mut self, q: usize) {
        self.initial.push(q);
    }

    pub fn set_initial(&mut self, init: Vec<usize>) {
        self.initial = init;
        self.finish();
    }

    pub fn set_accepting(&mut self, q: usize, acc: bool) {
        self.accepting[q] = acc;
    }

    pub fn add_transition(&mut self, from: usize, letter: Letter, to: usize) {
        self.trans[from].push((letter, to as u32));
    }

    /// Sorts and deduplicates transitions and initial states.
    pub fn finish(&mut self) {
        self.initial.sort_unstable();
        self.initial.dedup();
        for t in &mut self.trans {
            t.sort_unstable();
            t.dedup();
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn transitions(&self, q: usize) -> &[(Letter, u32)] {
        &self.trans[q]
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    /// Successors of `q` on `letter`.
    pub fn post(&self, q: usize, letter: Letter) -> impl Iterator<Item = usize> + '_ {
        let t = &self.trans[q];
        let lo = t.partition_point(|&(l, _)| l < letter);
        t[lo..].iter().take_while(move |&&(l, _)| l == letter).map(|&(_, s)| s as usize)
    }

    /// Successor set of a sorted state set.
    pub fn post_set(&self, set: &[usize], letter: Letter) -> Vec<usize> {
        let mut out: Vec<usize> = set.iter().flat_map(|&q| self.post(q, letter)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn all_accepting(&self) -> bool {
        self.accepting.iter().all(|&a| a)
    }

    /// One initial state and at most one successor per letter.
    pub fn is_deterministic(&self) -> bool {
        self.initial.len() <= 1
            && self
                .trans
                .iter()
                .all(|t| t.windows(2).all(|w| w[0].0 != w[1].0))
    }

    /// Same automaton over an alphabet that contains this one's bits;
    /// letters differing only in the added bits are treated alike.
    pub fn lift(&self, to: &Alphabet) -> Result<Nba> {
        let map = LetterMap::new(&self.alphabet, to)?;
        to.check_dense()?;
        let mut out = Nba::new(to.clone(), self.num_states());
        out.initial = self.initial.clone();
        out.accepting = self.accepting.clone();
        for letter in to.letters() {
            let src = map.apply(letter);
            for q in 0..self.num_states() {
                for t in self.post(q, src) {
                    out.trans[q].push((letter, t as u32));
                }
            }
        }
        out.finish();
        Ok(out)
    }
}

/// Projection from a larger alphabet onto a smaller one, matched by
/// `(slot, ap)` names.
#[derive(Debug, Clone)]
pub(crate) struct LetterMap {
    pairs: Vec<(u32, u32)>,
}

impl LetterMap {
    /// Maps letters of `big` to letters of `small`. Every AP of `small` must
    /// exist in `big`.
    pub(crate) fn new(small: &Alphabet, big: &Alphabet) -> Result<LetterMap> {
        if small.arity() != big.arity() {
            return Err(Error::Alphabet(format!(
                "arity {} vs {}",
                small.arity(),
                big.arity()
            )));
        }
        let mut pairs = Vec::new();
        for slot in 0..small.arity() {
            for ap in small.slot(slot) {
                let from = big
                    .bit(slot, ap)
                    .ok_or_else(|| Error::Alphabet(format!("`{ap}` missing in slot {slot}")))?;
                pairs.push((from, small.bit(slot, ap).unwrap()));
            }
        }
        Ok(LetterMap { pairs })
    }

    pub(crate) fn apply(&self, letter: Letter) -> Letter {
        self.pairs
            .iter()
            .filter(|(from, _)| letter >> from & 1 == 1)
            .fold(0, |acc, (_, to)| acc | 1 << to)
    }
}

/// Deterministic safety automaton: total transition function, absorbing bad
/// states; a word is accepted iff the run never enters a bad state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dsa {
    alphabet: Alphabet,
    init: usize,
    bad: Vec<bool>,
    delta: Vec<u32>,
}

impl Dsa {
    /// `delta[q * |Σ| + letter]`. Validates totality and absorbing bad states.
    pub fn new(alphabet: Alphabet, init: usize, bad: Vec<bool>, delta: Vec<u32>) -> Result<Dsa> {
        alphabet.check_dense()?;
        let n = bad.len();
        let m = alphabet.num_letters();
        if n == 0 || init >= n || delta.len() != n * m {
            return Err(Error::semantic("malformed safety automaton tables"));
        }
        if delta.iter().any(|&t| t as usize >= n) {
            return Err(Error::semantic("transition target out of range"));
        }
        for q in 0..n {
            if bad[q] && delta[q * m..(q + 1) * m].iter().any(|&t| !bad[t as usize]) {
                return Err(Error::semantic("bad states of a safety automaton must be absorbing"));
            }
        }
        Ok(Dsa {
            alphabet,
            init,
            bad,
            delta,
        })
    }

    /// Single non-bad state looping on every letter.
    pub fn universal(alphabet: Alphabet) -> Result<Dsa> {
        let m = alphabet.num_letters();
        Dsa::new(alphabet, 0, vec![false], vec![0; m])
    }

    /// Single bad state.
    pub fn empty(alphabet: Alphabet) -> Result<Dsa> {
        let m = alphabet.num_letters();
        Dsa::new(alphabet, 0, vec![true], vec![0; m])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.bad.len()
    }

    pub fn initial(&self) -> usize {
        self.init
    }

    pub fn is_bad(&self, q: usize) -> bool {
        self.bad[q]
    }

    pub fn succ(&self, q: usize, letter: Letter) -> usize {
        self.delta[q * self.alphabet.num_letters() + letter as usize] as usize
    }

    pub fn with_initial(&self, q: usize) -> Dsa {
        let mut d = self.clone();
        d.init = q;
        d
    }

    /// 2-color parity view: non-bad 0, bad 1.
    pub fn to_dpa(&self) -> Dpa {
        Dpa {
            alphabet: self.alphabet.clone(),
            init: self.init,
            color: self.bad.iter().map(|&b| b as u32).collect(),
            delta: self.delta.clone(),
        }
    }

    /// All-accepting NBA over the non-bad states.
    pub fn to_nba(&self) -> Nba {
        let mut nba = Nba::new(self.alphabet.clone(), self.num_states());
        if !self.bad[self.init] {
            nba.add_initial(self.init);
        }
        for q in 0..self.num_states() {
            nba.set_accepting(q, true);
            if self.bad[q] {
                continue;
            }
            for letter in self.alphabet.letters() {
                let t = self.succ(q, letter);
                if !self.bad[t] {
                    nba.add_transition(q, letter, t);
                }
            }
        }
        nba.finish();
        nba
    }

    /// Whether some word is accepted (a non-bad cycle is reachable).
    pub fn is_empty(&self) -> bool {
        self.bad[self.init] || !self.live_states()[self.init]
    }

    /// Whether no bad state is reachable.
    pub fn is_universal(&self) -> bool {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.init];
        seen[self.init] = true;
        while let Some(q) = stack.pop() {
            if self.bad[q] {
                return false;
            }
            for l in self.alphabet.letters() {
                let t = self.succ(q, l);
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        true
    }

    /// States whose residual language is nonempty.
    pub fn live_states(&self) -> Vec<bool> {
        // greatest fixpoint: non-bad states with some live successor
        let n = self.num_states();
        let mut live: Vec<bool> = self.bad.iter().map(|&b| !b).collect();
        loop {
            let mut changed = false;
            for q in 0..n {
                if live[q] && !self.alphabet.letters().any(|l| live[self.succ(q, l)]) {
                    live[q] = false;
                    changed = true;
                }
            }
            if !changed {
                return live;
            }
        }
    }
}

/// Deterministic parity automaton, min-even acceptance on state colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpa {
    alphabet: Alphabet,
    init: usize,
    color: Vec<u32>,
    delta: Vec<u32>,
}

impl Dpa {
    pub fn new(alphabet: Alphabet, init: usize, color: Vec<u32>, delta: Vec<u32>) -> Result<Dpa> {
        alphabet.check_dense()?;
        let n = color.len();
        if n == 0 || init >= n || delta.len() != n * alphabet.num_letters() {
            return Err(Error::semantic("malformed parity automaton tables"));
        }
        if delta.iter().any(|&t| t as usize >= n) {
            return Err(Error::semantic("transition target out of range"));
        }
        Ok(Dpa {
            alphabet,
            init,
            color,
            delta,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.color.len()
    }

    pub fn initial(&self) -> usize {
        self.init
    }

    pub fn color(&self, q: usize) -> u32 {
        self.color[q]
    }

    pub fn colors(&self) -> BTreeSet<u32> {
        self.color.iter().copied().collect()
    }

    pub fn succ(&self, q: usize, letter: Letter) -> usize {
        self.delta[q * self.alphabet.num_letters() + letter as usize] as usize
    }

    pub fn with_initial(&self, q: usize) -> Dpa {
        let mut d = self.clone();
        d.init = q;
        d
    }

    /// Complement by shifting every color by one.
    pub fn complement(&self) -> Dpa {
        let mut d = self.clone();
        for c in &mut d.color {
            *c += 1;
        }
        d
    }
}

/// A deterministic parity automaton whose states may be produced on demand.
pub trait ParityStepper {
    fn alphabet(&self) -> &Alphabet;
    fn initial(&mut self) -> Result<usize>;
    fn step(&mut self, q: usize, letter: Letter) -> Result<usize>;
    fn color(&self, q: usize) -> u32;
    /// States created so far.
    fn num_states(&self) -> usize;
}

impl ParityStepper for Dpa {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn initial(&mut self) -> Result<usize> {
        Ok(self.init)
    }
    fn step(&mut self, q: usize, letter: Letter) -> Result<usize> {
        Ok(self.succ(q, letter))
    }
    fn color(&self, q: usize) -> u32 {
        self.color[q]
    }
    fn num_states(&self) -> usize {
        self.color.len()
    }
}

/// Any of the three automaton kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Automaton {
    Nba(Nba),
    Dsa(Dsa),
    Dpa(Dpa),
}

impl Automaton {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Automaton::Nba(a) => a.alphabet(),
            Automaton::Dsa(a) => a.alphabet(),
            Automaton::Dpa(a) => a.alphabet(),
        }
    }

    pub fn num_states(&self) -> usize {
        match self {
            Automaton::Nba(a) => a.num_states(),
            Automaton::Dsa(a) => a.num_states(),
            Automaton::Dpa(a) => a.num_states(),
        }
    }
}

impl From<Nba> for Automaton {
    fn from(a: Nba) -> Self {
        Automaton::Nba(a)
    }
}
impl From<Dsa> for Automaton {
    fn from(a: Dsa) -> Self {
        Automaton::Dsa(a)
    }
}
impl From<Dpa> for Automaton {
    fn from(a: Dpa) -> Self {
        Automaton::Dpa(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_layout() {
        let a = Alphabet::new(vec![vec!["a".into()], vec!["a".into(), "b".into()]]);
        assert_eq!(a.width(), 3);
        assert_eq!(a.bit(1, "b"), Some(2));
        assert_eq!(a.compose(&[1, 2]), 0b101);
        assert_eq!(a.part(0b101, 1), 2);
        let e = a.extend_slot(0, &["p".into()]).unwrap();
        assert_eq!(e.bit(0, "p"), Some(3));
        assert_eq!(e.part(0b1001, 0), 0b11);
        assert!(a.prefix_is_low(1));
        assert!(!e.prefix_is_low(1));
    }

    #[test]
    fn dsa_invariants_checked() {
        let a = Alphabet::new(vec![vec!["a".into()]]);
        assert!(Dsa::new(a.clone(), 0, vec![false, true], vec![1, 1, 0, 1]).is_err());
        let d = Dsa::new(a, 0, vec![false, true], vec![0, 1, 1, 1]).unwrap();
        assert!(!d.is_universal());
        assert!(!d.is_empty());
    }
}
