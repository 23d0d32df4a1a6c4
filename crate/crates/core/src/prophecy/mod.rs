//! Prophecy families: automata over the universal traces whose truth bits
//! the refuter must announce, plus the relaxed matrix that binds them.

mod io;
mod relaxed;
mod strategy;

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;

use crate::automata::{
    dpa_equiv, dpa_is_empty, dpa_to_nba, minimize_dsa, nba_to_dpa, safety_determinize, subset_automaton,
    Alphabet, Dpa, Dsa, Letter, Nba,
};
use crate::error::{Error, Result};
use crate::game::{product_of, slot_letters};
use crate::model::{trace_equiv_classes, StateId, TransitionSystem};

pub use io::{read_family_dir, write_family_dir};
pub use relaxed::{relaxed_alphabet, relaxed_matrix_nba, RelaxedStepper};
pub use strategy::{recommendation_strategy, History, Recommendation};

/// Index of a prophecy: matrix automaton state and existential state tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProphecyKey {
    pub q: usize,
    pub states: Vec<StateId>,
}

/// Prophecy automaton over the universal slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prophecy {
    Safety(Dsa),
    Parity(Dpa),
}

impl Prophecy {
    pub fn alphabet(&self) -> &Alphabet {
        match self {
            Prophecy::Safety(d) => d.alphabet(),
            Prophecy::Parity(d) => d.alphabet(),
        }
    }

    pub fn num_states(&self) -> usize {
        match self {
            Prophecy::Safety(d) => d.num_states(),
            Prophecy::Parity(d) => d.num_states(),
        }
    }

    pub fn to_dpa(&self) -> Dpa {
        match self {
            Prophecy::Safety(d) => d.to_dpa(),
            Prophecy::Parity(d) => d.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProphecyEntry {
    pub var: String,
    /// The key the entry was built for (the first one, when several keys share it).
    pub key: Option<ProphecyKey>,
    pub automaton: Prophecy,
}

/// Where the bit for a key comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitSource {
    Var(usize),
    Always,
    Never,
    /// Never consulted by the recommendation strategy; reads as unset.
    Unread,
}

/// Ordered prophecies plus the key lookup used by the recommendation strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProphecyFamily {
    pub k: usize,
    pub entries: Vec<ProphecyEntry>,
    lookup: BTreeMap<ProphecyKey, BitSource>,
    rep: Vec<StateId>,
}

impl ProphecyFamily {
    /// A family without keys (user-supplied prophecies).
    pub fn from_entries(k: usize, entries: Vec<ProphecyEntry>) -> ProphecyFamily {
        let mut lookup = BTreeMap::new();
        for (j, e) in entries.iter().enumerate() {
            if let Some(key) = &e.key {
                lookup.entry(key.clone()).or_insert(BitSource::Var(j));
            }
        }
        ProphecyFamily {
            k,
            entries,
            lookup,
            rep: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vars(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.var.clone()).collect()
    }

    /// Source of the bit for `(q, states)`; unknown keys are never set.
    pub fn source(&self, q: usize, states: &[StateId]) -> BitSource {
        let states = states
            .iter()
            .map(|&s| self.rep.get(s).copied().unwrap_or(s))
            .collect();
        self.lookup
            .get(&ProphecyKey { q, states })
            .copied()
            .unwrap_or(BitSource::Never)
    }

    pub fn keys(&self) -> impl Iterator<Item = (&ProphecyKey, &BitSource)> {
        self.lookup.iter()
    }

    /// The sub-family selected by `subset` (entry indices, ascending); keys of
    /// dropped entries become unread.
    pub fn select(&self, subset: &[usize]) -> ProphecyFamily {
        let pos: HashMap<usize, usize> = subset.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let lookup = self
            .lookup
            .iter()
            .map(|(key, &src)| {
                let src = match src {
                    BitSource::Var(j) => pos.get(&j).map_or(BitSource::Unread, |&i| BitSource::Var(i)),
                    other => other,
                };
                (key.clone(), src)
            })
            .collect();
        ProphecyFamily {
            k: self.k,
            entries: subset.iter().map(|&j| self.entries[j].clone()).collect(),
            lookup,
            rep: self.rep.clone(),
        }
    }

    /// Largest prophecy automaton.
    pub fn size_p(&self) -> usize {
        self.entries.iter().map(|e| e.automaton.num_states()).max().unwrap_or(0)
    }
}

/// Prophecy variable names `xi0, xi1, …` avoiding the system's APs.
pub fn fresh_vars(ts: &TransitionSystem, n: usize) -> Vec<String> {
    let mut prefix = "xi".to_string();
    while ts.aps().iter().any(|a| a.starts_with(&prefix)) {
        prefix.push('x');
    }
    (0..n).map(|j| format!("{prefix}{j}")).collect()
}

/// Büchi automaton over the universal slots `Σ^k` for "some run of the
/// existential copies, together with the input, is accepted by `matrix`".
/// States are `(existential tuple, matrix state)`; returns the state index
/// of every start pair.
pub(crate) fn exist_product(
    ts: &TransitionSystem,
    matrix: &Nba,
    k: usize,
    starts: &[(Vec<StateId>, usize)],
) -> Result<(Nba, Vec<usize>)> {
    let al = matrix.alphabet();
    if k > al.arity() || !al.prefix_is_low(k) {
        return Err(Error::Arity("universal slots must come first".into()));
    }
    let l = al.arity() - k;
    let contrib: Vec<Vec<Letter>> = (k..k + l).map(|i| slot_letters(ts, al, i)).collect::<Result<_>>()?;
    let small = al.prefix(k);
    small.check_dense()?;
    let mut ids: HashMap<(Vec<StateId>, usize), usize> = HashMap::new();
    let mut states: Vec<(Vec<StateId>, usize)> = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: (Vec<StateId>, usize), states: &mut Vec<_>, queue: &mut VecDeque<usize>| -> usize {
        *ids.entry(s.clone()).or_insert_with(|| {
            states.push(s);
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };
    let start_ids: Vec<usize> = starts
        .iter()
        .map(|s| intern(s.clone(), &mut states, &mut queue))
        .collect();
    let mut edges: Vec<Vec<(Letter, usize)>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let (ex, n) = states[i].clone();
        let fill = (0..l).fold(0, |acc, c| acc | contrib[c][ex[c]]);
        let succ = product_of(&ex.iter().map(|&s| ts.successors(s).to_vec()).collect::<Vec<_>>());
        let mut out = Vec::new();
        for x in small.letters() {
            let targets: Vec<usize> = matrix.post(n, x | fill).collect();
            for t in targets {
                for e in &succ {
                    out.push((x, intern((e.clone(), t), &mut states, &mut queue)));
                }
            }
        }
        while edges.len() <= i {
            edges.push(Vec::new());
        }
        edges[i] = out;
    }
    let mut nba = Nba::new(small, states.len());
    for (i, (_, n)) in states.iter().enumerate() {
        nba.set_accepting(i, matrix.is_accepting(*n));
        for &(x, t) in edges.get(i).map(Vec::as_slice).unwrap_or(&[]) {
            nba.add_transition(i, x, t);
        }
    }
    if let Some(&s) = start_ids.first() {
        nba.add_initial(s);
    }
    nba.finish();
    Ok((nba, start_ids))
}

/// Minimal safety automaton for `{t | ∃ t' from key.states. t ⊗ t' ∈ L(A_q)}`.
pub fn build_prophecy(ts: &TransitionSystem, matrix: &Dsa, k: usize, key: &ProphecyKey) -> Result<Dsa> {
    check_key(ts, matrix.alphabet().arity() - k.min(matrix.alphabet().arity()), key)?;
    let (nba, starts) = exist_product(ts, &matrix.to_nba(), k, &[(key.states.clone(), key.q)])?;
    let (d, ids) = subset_automaton(&nba, &[vec![starts[0]]])?;
    Ok(minimize_dsa(&d.with_initial(ids[0])))
}

fn check_key(ts: &TransitionSystem, l: usize, key: &ProphecyKey) -> Result<()> {
    if key.states.len() != l || key.states.iter().any(|&s| s >= ts.num_states()) {
        return Err(Error::Arity(format!("prophecy key needs {l} system states")));
    }
    Ok(())
}

/// A point where the verifier picks existential states: the matrix state
/// before the position and the legal tuples, in the order the
/// recommendation strategy scans them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChoiceContext {
    pub q: usize,
    pub options: Vec<Vec<StateId>>,
}

/// Choice contexts met in the self-composition of `k + l` copies with the
/// matrix automaton. Sorted.
pub fn reachable_contexts(
    ts: &TransitionSystem,
    step: &dyn Fn(usize, Letter) -> usize,
    q0: usize,
    al: &Alphabet,
    k: usize,
) -> Result<Vec<ChoiceContext>> {
    let m = al.arity();
    let contrib: Vec<Vec<Letter>> = (0..m).map(|i| slot_letters(ts, al, i)).collect::<Result<_>>()?;
    let succ_of = |t: &[StateId]| product_of(&t.iter().map(|&x| ts.successors(x).to_vec()).collect::<Vec<_>>());
    let mut contexts = std::collections::BTreeSet::new();
    contexts.insert(ChoiceContext {
        q: q0,
        options: product_of(&vec![ts.initial().to_vec(); m - k]),
    });
    let mut seen: HashMap<(Vec<StateId>, usize), ()> = HashMap::new();
    let mut stack: Vec<(Vec<StateId>, usize)> = Vec::new();
    for s in product_of(&vec![ts.initial().to_vec(); m]) {
        if seen.insert((s.clone(), q0), ()).is_none() {
            stack.push((s, q0));
        }
    }
    while let Some((s, q)) = stack.pop() {
        let letter = (0..m).fold(0, |acc, c| acc | contrib[c][s[c]]);
        let q2 = step(q, letter);
        contexts.insert(ChoiceContext {
            q: q2,
            options: succ_of(&s[k..]),
        });
        for t in succ_of(&s) {
            if seen.insert((t.clone(), q2), ()).is_none() {
                stack.push((t, q2));
            }
        }
    }
    Ok(contexts.into_iter().collect())
}

/// Keys `(q, existential tuple)` met in the self-composition, `q` being the
/// matrix state before the tuple's position. Sorted.
pub fn reachable_keys(
    ts: &TransitionSystem,
    step: &dyn Fn(usize, Letter) -> usize,
    q0: usize,
    al: &Alphabet,
    k: usize,
) -> Result<Vec<ProphecyKey>> {
    let mut keys: Vec<ProphecyKey> = reachable_contexts(ts, step, q0, al, k)?
        .into_iter()
        .flat_map(|c| {
            let q = c.q;
            c.options.into_iter().map(move |states| ProphecyKey { q, states })
        })
        .collect();
    keys.sort();
    keys.dedup();
    Ok(keys)
}

/// Representative (smallest state) of each trace-equivalence class of the
/// system restricted to the APs read by the existential slots.
fn representatives(ts: &TransitionSystem, al: &Alphabet, k: usize) -> Result<Vec<StateId>> {
    let mut aps: Vec<String> = (k..al.arity()).flat_map(|i| al.slot(i).to_vec()).collect();
    aps.sort();
    aps.dedup();
    let projected = ts.restrict_aps(&aps)?;
    let class = trace_equiv_classes(&projected);
    let mut first: HashMap<usize, StateId> = HashMap::new();
    Ok(ts.states().map(|s| *first.entry(class[s]).or_insert(s)).collect())
}

fn rep_key(rep: &[StateId], key: &ProphecyKey) -> ProphecyKey {
    ProphecyKey {
        q: key.q,
        states: key.states.iter().map(|&s| rep[s]).collect(),
    }
}

/// The complete family for a safety matrix. Keys are the reachable
/// `(q, tuple)` pairs with `q` not bad. With `reduce`, tuples are replaced by
/// trace-equivalence representatives, empty or universal languages become
/// constant bits, equal languages share one variable, and keys the
/// recommendation strategy never consults get no variable: the last option
/// of a choice and every option after a universal one.
pub fn build_family(ts: &TransitionSystem, matrix: &Dsa, k: usize, reduce: bool) -> Result<ProphecyFamily> {
    let al = matrix.alphabet();
    let rep: Vec<StateId> = if reduce {
        representatives(ts, al, k)?
    } else {
        ts.states().collect()
    };
    let contexts = reachable_contexts(ts, &|q, x| matrix.succ(q, x), matrix.initial(), al, k)?;
    let mut keys: Vec<ProphecyKey> = contexts
        .iter()
        .filter(|c| !matrix.is_bad(c.q))
        .flat_map(|c| c.options.iter().map(|t| rep_key(&rep, &ProphecyKey { q: c.q, states: t.clone() })))
        .collect();
    keys.sort();
    keys.dedup();
    let starts: Vec<(Vec<StateId>, usize)> = keys.iter().map(|key| (key.states.clone(), key.q)).collect();
    let (nba, ids) = exist_product(ts, &matrix.to_nba(), k, &starts)?;
    let (shared, dsa_ids) = subset_automaton(&nba, &ids.iter().map(|&i| vec![i]).collect::<Vec<_>>())?;
    let dsas: Vec<Dsa> = dsa_ids
        .par_iter()
        .map(|&i| minimize_dsa(&shared.with_initial(i)))
        .collect();
    let mut lang: BTreeMap<ProphecyKey, Dsa> = keys.into_iter().zip(dsas).collect();
    let mut lookup = BTreeMap::new();
    if reduce {
        let mut constant = BTreeMap::new();
        for (key, d) in &lang {
            if let Some(t) = crate::automata::trivial_language(d) {
                constant.insert(key.clone(), if t { BitSource::Always } else { BitSource::Never });
            }
        }
        let mut read = std::collections::BTreeSet::new();
        for c in contexts.iter().filter(|c| !matrix.is_bad(c.q)) {
            let n = c.options.len();
            for t in &c.options[..n.saturating_sub(1)] {
                let key = rep_key(&rep, &ProphecyKey { q: c.q, states: t.clone() });
                match constant.get(&key) {
                    Some(BitSource::Always) => break,
                    Some(_) => {}
                    None => {
                        read.insert(key);
                    }
                }
            }
        }
        lang.retain(|key, _| {
            if let Some(&src) = constant.get(key) {
                lookup.insert(key.clone(), src);
                false
            } else if !read.contains(key) {
                lookup.insert(key.clone(), BitSource::Unread);
                false
            } else {
                true
            }
        });
    }
    let mut entries = Vec::new();
    let mut by_lang: HashMap<Dsa, usize> = HashMap::new();
    for (key, d) in lang {
        if reduce {
            // minimal automata are numbered canonically, so equal languages
            // give equal automata
            if let Some(&j) = by_lang.get(&d) {
                lookup.insert(key, BitSource::Var(j));
                continue;
            }
            by_lang.insert(d.clone(), entries.len());
        }
        lookup.insert(key.clone(), BitSource::Var(entries.len()));
        entries.push(ProphecyEntry {
            var: String::new(),
            key: Some(key),
            automaton: Prophecy::Safety(d),
        });
    }
    let vars = fresh_vars(ts, entries.len());
    for (e, v) in entries.iter_mut().zip(vars) {
        e.var = v;
    }
    let rep = if reduce { rep } else { Vec::new() };
    Ok(ProphecyFamily {
        k,
        entries,
        lookup,
        rep,
    })
}

/// Family for a general matrix given as a parity automaton:
/// `{t | ∃ t' from the tuple. t ⊗ t' ∈ L(A_q)}` determinized to parity
/// automata. Empty and universal languages become constant bits; equal
/// languages share a variable.
pub fn build_family_dpa(ts: &TransitionSystem, matrix: &Dpa, k: usize, cap: usize) -> Result<ProphecyFamily> {
    let al = matrix.alphabet();
    let rep = representatives(ts, al, k)?;
    let raw = reachable_keys(ts, &|q, x| matrix.succ(q, x), matrix.initial(), al, k)?;
    let mut keys: Vec<ProphecyKey> = raw.iter().map(|key| rep_key(&rep, key)).collect();
    keys.sort();
    keys.dedup();
    let dpas: Vec<Dpa> = keys
        .par_iter()
        .map(|key| {
            let nba = dpa_to_nba(&matrix.with_initial(key.q));
            if nba.initial().is_empty() {
                let small = al.prefix(k);
                let m = small.num_letters();
                return Dpa::new(small, 0, vec![1], vec![0; m]);
            }
            let start = nba.initial()[0];
            let (p, _) = exist_product(ts, &nba, k, &[(key.states.clone(), start)])?;
            nba_to_dpa(&p, cap)
        })
        .collect::<Result<_>>()?;
    let vars = fresh_vars(ts, keys.len());
    let mut entries: Vec<ProphecyEntry> = Vec::new();
    let mut lookup = BTreeMap::new();
    for (key, d) in keys.into_iter().zip(dpas) {
        if dpa_is_empty(&d) {
            lookup.insert(key, BitSource::Never);
            continue;
        }
        if dpa_is_empty(&d.complement()) {
            lookup.insert(key, BitSource::Always);
            continue;
        }
        let mut shared = None;
        for (j, e) in entries.iter().enumerate() {
            if dpa_equiv(&e.automaton.to_dpa(), &d)? {
                shared = Some(j);
                break;
            }
        }
        if let Some(j) = shared {
            lookup.insert(key, BitSource::Var(j));
            continue;
        }
        lookup.insert(key.clone(), BitSource::Var(entries.len()));
        entries.push(ProphecyEntry {
            var: String::new(),
            key: Some(key),
            automaton: Prophecy::Parity(d),
        });
    }
    for (e, v) in entries.iter_mut().zip(vars) {
        e.var = v;
    }
    Ok(ProphecyFamily {
        k,
        entries,
        lookup,
        rep,
    })
}

/// Matrix safety automaton: minimized determinization of the tableau.
pub fn matrix_dsa(matrix_nba: &Nba) -> Result<Dsa> {
    Ok(minimize_dsa(&safety_determinize(matrix_nba)?))
}

#[cfg(test)]
mod tests;
