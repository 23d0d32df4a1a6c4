//! The relaxed matrix `[⋁_j F(p_j ↮ ξ_j)] ∨ φ`, as an explicit Büchi
//! automaton and as a lazily built parity automaton for safety families.

use std::collections::HashMap;

use super::{Prophecy, ProphecyFamily};
use crate::automata::{
    complement_dsa, dpa_to_nba, reachable_trim, union, Alphabet, Dsa, Letter, LetterMap, Nba, ParityStepper,
};
use crate::error::{Error, Result};

/// Matrix alphabet with the family's variables added to slot 0.
pub fn relaxed_alphabet(matrix: &Alphabet, family: &ProphecyFamily) -> Result<Alphabet> {
    if family.is_empty() {
        return Ok(matrix.clone());
    }
    if matrix.arity() == 0 {
        return Err(Error::Arity("prophecies need a universal variable".into()));
    }
    matrix.extend_slot(0, &family.vars())
}

/// `sub` started at the first position where bit `bit` equals `want`.
fn guarded(sub: &Nba, al: &Alphabet, k: usize, bit: u32, want: bool) -> Result<Nba> {
    let map = LetterMap::new(sub.alphabet(), &al.prefix(k))?;
    let n = sub.num_states();
    let mut out = Nba::new(al.clone(), n + 1);
    let wait = n;
    out.add_initial(wait);
    for q in 0..n {
        out.set_accepting(q, sub.is_accepting(q));
    }
    for letter in al.letters() {
        let x = map.apply(letter);
        out.add_transition(wait, letter, wait);
        if (letter >> bit & 1 == 1) == want {
            for &i in sub.initial() {
                for t in sub.post(i, x) {
                    out.add_transition(wait, letter, t);
                }
            }
        }
        for q in 0..n {
            for t in sub.post(q, x) {
                out.add_transition(q, letter, t);
            }
        }
    }
    out.finish();
    Ok(out)
}

/// Büchi automaton for the relaxed matrix over [`relaxed_alphabet`].
/// Safety prophecies use the reach-bad complement and the all-accepting
/// view; parity prophecies use color-shift complementation.
pub fn relaxed_matrix_nba(matrix: &Nba, family: &ProphecyFamily) -> Result<Nba> {
    let al = relaxed_alphabet(matrix.alphabet(), family)?;
    al.check_dense()?;
    let k = family.k;
    let mut parts = vec![matrix.lift(&al)?];
    for e in &family.entries {
        if e.automaton.alphabet().arity() != k {
            return Err(Error::Arity(format!("prophecy `{}` must read {k} traces", e.var)));
        }
        let bit = al.bit(0, &e.var).expect("variable added above");
        let (neg, pos) = match &e.automaton {
            Prophecy::Safety(d) => (complement_dsa(d), d.to_nba()),
            Prophecy::Parity(d) => (dpa_to_nba(&d.complement()), dpa_to_nba(d)),
        };
        parts.push(guarded(&neg, &al, k, bit, true)?);
        parts.push(guarded(&pos, &al, k, bit, false)?);
    }
    Ok(reachable_trim(&union(&parts)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum RState {
    Acc,
    Run {
        m: u32,
        /// claims "suffix in L_j" whose failure accepts
        p: Vec<(u32, u32)>,
        /// claims "suffix in L_j" whose survival accepts
        n: Vec<(u32, u32)>,
        /// breakpoint subset of `n`
        o: Vec<(u32, u32)>,
        bp: bool,
    },
}

/// Deterministic parity automaton for the relaxed matrix of a safety matrix
/// and safety prophecies, built on demand. Colors: 0 when the matrix is
/// still satisfied or a premise is already violated, 1 at breakpoints of the
/// pending "unset but true" claims, 2 otherwise.
pub struct RelaxedStepper {
    matrix: Dsa,
    props: Vec<Dsa>,
    universal: Vec<Vec<bool>>,
    /// `incl[j][a][b]`: language of state `a` of prophecy `j` is contained in that of `b`
    incl: Vec<Vec<Vec<bool>>>,
    alphabet: Alphabet,
    bits: Vec<u32>,
    matrix_mask: Letter,
    k_mask: Letter,
    states: Vec<RState>,
    ids: HashMap<RState, usize>,
    cache: HashMap<(u32, Letter), u32>,
    cap: usize,
}

impl RelaxedStepper {
    pub fn new(matrix: &Dsa, family: &ProphecyFamily, cap: usize) -> Result<RelaxedStepper> {
        let mal = matrix.alphabet();
        let alphabet = relaxed_alphabet(mal, family)?;
        let k = family.k;
        let width = mal.width();
        if (0..mal.arity()).flat_map(|s| mal.slot_bits(s).to_vec()).any(|b| b >= width) || !mal.prefix_is_low(k) {
            return Err(Error::Alphabet("matrix alphabet must use the sequential layout".into()));
        }
        let k_width: u32 = (0..k).map(|s| mal.slot(s).len() as u32).sum();
        let mut props = Vec::new();
        for e in &family.entries {
            let Prophecy::Safety(d) = &e.automaton else {
                return Err(Error::semantic("the lazy relaxed automaton needs safety prophecies"));
            };
            if d.alphabet() != &mal.prefix(k) {
                return Err(Error::Alphabet(format!("prophecy `{}` does not read the universal slots", e.var)));
            }
            props.push(d.clone());
        }
        let universal = props
            .iter()
            .map(|d| (0..d.num_states()).map(|q| d.with_initial(q).is_universal()).collect())
            .collect();
        let incl = props.iter().map(inclusion).collect();
        let bits = family.vars().iter().map(|v| alphabet.bit(0, v).unwrap()).collect();
        Ok(RelaxedStepper {
            matrix: matrix.clone(),
            props,
            universal,
            incl,
            alphabet,
            bits,
            matrix_mask: (1u64 << width) - 1,
            k_mask: (1u64 << k_width) - 1,
            states: Vec::new(),
            ids: HashMap::new(),
            cache: HashMap::new(),
            cap,
        })
    }

    fn intern(&mut self, s: RState) -> Result<usize> {
        if let Some(&i) = self.ids.get(&s) {
            return Ok(i);
        }
        if self.states.len() >= self.cap {
            return Err(Error::cap("relaxed automaton states", self.cap));
        }
        self.ids.insert(s.clone(), self.states.len());
        self.states.push(s);
        Ok(self.states.len() - 1)
    }

    fn next(&self, s: &RState, letter: Letter) -> RState {
        let RState::Run { m, p, n, o, .. } = s else {
            return RState::Acc;
        };
        let x = letter & self.k_mask;
        let m2 = self.matrix.succ(*m as usize, letter & self.matrix_mask) as u32;
        let step = |&(j, q): &(u32, u32)| (j, self.props[j as usize].succ(q as usize, x) as u32);
        let mut p2: Vec<(u32, u32)> = p.iter().map(step).collect();
        let mut n2: Vec<(u32, u32)> = n.iter().map(step).collect();
        let mut o2: Vec<(u32, u32)> = o.iter().map(step).collect();
        for (j, d) in self.props.iter().enumerate() {
            let claim = (j as u32, d.succ(d.initial(), x) as u32);
            if letter >> self.bits[j] & 1 == 1 {
                p2.push(claim);
            } else {
                n2.push(claim);
            }
        }
        let bad = |&(j, q): &(u32, u32)| self.props[j as usize].is_bad(q as usize);
        let univ = |&(j, q): &(u32, u32)| self.universal[j as usize][q as usize];
        if p2.iter().any(bad) || n2.iter().any(univ) {
            return RState::Acc;
        }
        p2.retain(|c| !univ(c));
        n2.retain(|c| !bad(c));
        o2.retain(|c| !bad(c));
        // only the smallest "in" claims of P and the largest of N and O matter
        let sub = |&(j, a): &(u32, u32), &(i, b): &(u32, u32)| j == i && self.incl[j as usize][a as usize][b as usize];
        if p2.iter().any(|c| n2.iter().any(|d| sub(c, d))) {
            return RState::Acc;
        }
        for v in [&mut p2, &mut n2, &mut o2] {
            v.sort_unstable();
            v.dedup();
        }
        antichain(&mut p2, |c, d| sub(d, c));
        antichain(&mut n2, sub);
        antichain(&mut o2, sub);
        let bp = o2.is_empty();
        if bp {
            o2 = n2.clone();
        }
        RState::Run {
            m: m2,
            p: p2,
            n: n2,
            o: o2,
            bp,
        }
    }
}

/// Drops every element `c` with `covered(c, d)` for some other kept `d`.
/// Input is sorted and deduplicated; equal languages keep the first.
fn antichain(v: &mut Vec<(u32, u32)>, covered: impl Fn(&(u32, u32), &(u32, u32)) -> bool) {
    let mut keep = vec![true; v.len()];
    for i in 0..v.len() {
        for j in 0..v.len() {
            if i != j && keep[j] && covered(&v[i], &v[j]) && !(j > i && covered(&v[j], &v[i])) {
                keep[i] = false;
                break;
            }
        }
    }
    let mut it = keep.iter();
    v.retain(|_| *it.next().unwrap());
}

/// Pairwise language inclusion between the states of a DSA.
fn inclusion(d: &Dsa) -> Vec<Vec<bool>> {
    let n = d.num_states();
    let live = d.live_states();
    let mut incl: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| !live[a] || !d.is_bad(b)).collect()).collect();
    loop {
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                if incl[a][b] && live[a] {
                    let broken = d.alphabet().letters().any(|l| {
                        let (x, y) = (d.succ(a, l), d.succ(b, l));
                        live[x] && !incl[x][y]
                    });
                    if broken {
                        incl[a][b] = false;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return incl;
        }
    }
}

impl ParityStepper for RelaxedStepper {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn initial(&mut self) -> Result<usize> {
        let m = self.matrix.initial() as u32;
        self.intern(RState::Run {
            m,
            p: Vec::new(),
            n: Vec::new(),
            o: Vec::new(),
            bp: false,
        })
    }

    fn step(&mut self, q: usize, letter: Letter) -> Result<usize> {
        if let Some(&t) = self.cache.get(&(q as u32, letter)) {
            return Ok(t as usize);
        }
        let s = self.next(&self.states[q], letter);
        let t = self.intern(s)?;
        self.cache.insert((q as u32, letter), t as u32);
        Ok(t)
    }

    fn color(&self, q: usize) -> u32 {
        match &self.states[q] {
            RState::Acc => 0,
            RState::Run { m, bp, .. } => {
                if !self.matrix.is_bad(*m as usize) {
                    0
                } else if *bp {
                    1
                } else {
                    2
                }
            }
        }
    }

    fn num_states(&self) -> usize {
        self.states.len()
    }
}
