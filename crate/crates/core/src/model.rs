//! Finite transition systems, their text format, prophecy augmentation,
//! bisimulation quotients and trace-equivalence classes.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use sha2::{Digest, Sha256};

use crate::automata::{self, Alphabet, Nba};
use crate::error::{Error, Result};
use crate::lasso::Lasso;

/// Index of a state in declaration order.
pub type StateId = usize;

/// A set of atomic propositions, bit `i` standing for the `i`-th declared AP.
pub type Label = u64;

/// Maximum number of atomic propositions per system or trace copy.
pub const MAX_APS: usize = 8;

/// Label trace of a lasso-shaped path.
pub type LassoTrace = Lasso<Label>;

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite Kripke structure `(S, S0, ϱ, L)` with a total transition relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    aps: Vec<String>,
    names: Vec<String>,
    initial: Vec<StateId>,
    succ: Vec<Vec<StateId>>,
    labels: Vec<Label>,
}

impl TransitionSystem {
    /// Builds and validates a system. Successor lists are sorted and deduplicated.
    pub fn new(
        aps: Vec<String>,
        names: Vec<String>,
        labels: Vec<Label>,
        initial: Vec<StateId>,
        succ: Vec<Vec<StateId>>,
    ) -> Result<Self> {
        let n = names.len();
        if labels.len() != n || succ.len() != n {
            return Err(Error::semantic("state, label and successor tables differ in size"));
        }
        if n == 0 {
            return Err(Error::semantic("system has no states"));
        }
        let mut seen = HashSet::new();
        for ap in &aps {
            if !is_identifier(ap) {
                return Err(Error::semantic(format!("invalid atomic proposition name `{ap}`")));
            }
            if !seen.insert(ap.as_str()) {
                return Err(Error::semantic(format!("duplicate atomic proposition `{ap}`")));
            }
        }
        if aps.len() > 64 {
            return Err(Error::semantic("more than 64 atomic propositions"));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::semantic(format!("duplicate state `{name}`")));
            }
        }
        let ap_mask = if aps.len() == 64 { u64::MAX } else { (1u64 << aps.len()) - 1 };
        for (s, &l) in labels.iter().enumerate() {
            if l & !ap_mask != 0 {
                return Err(Error::semantic(format!("label of `{}` uses undeclared APs", names[s])));
            }
        }
        if initial.is_empty() {
            return Err(Error::semantic("system has no initial state"));
        }
        let mut initial = initial;
        initial.sort_unstable();
        initial.dedup();
        if initial.iter().any(|&s| s >= n) {
            return Err(Error::semantic("initial state out of range"));
        }
        let mut succ = succ;
        for (s, list) in succ.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.is_empty() {
                return Err(Error::semantic(format!(
                    "state `{}` has no successors (the transition relation must be total)",
                    names[s]
                )));
            }
            if list.iter().any(|&t| t >= n) {
                return Err(Error::semantic("successor out of range"));
            }
        }
        Ok(TransitionSystem {
            aps,
            names,
            initial,
            succ,
            labels,
        })
    }

    pub fn aps(&self) -> &[String] {
        &self.aps
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.names.len()
    }

    pub fn name(&self, s: StateId) -> &str {
        &self.names[s]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn successors(&self, s: StateId) -> &[StateId] {
        &self.succ[s]
    }

    pub fn label(&self, s: StateId) -> Label {
        self.labels[s]
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn ap_index(&self, ap: &str) -> Option<usize> {
        self.aps.iter().position(|a| a == ap)
    }

    /// Renders a label as `{a b}` using the declared AP names.
    pub fn label_string(&self, label: Label) -> String {
        label_to_string(&self.aps, label)
    }

    /// Same system with initial states replaced by `{s}`.
    pub fn with_initial(&self, s: StateId) -> TransitionSystem {
        let mut t = self.clone();
        t.initial = vec![s];
        t
    }

    /// Keeps only the listed APs (in the given order), projecting labels.
    pub fn restrict_aps(&self, keep: &[String]) -> Result<TransitionSystem> {
        let idx: Vec<usize> = keep
            .iter()
            .map(|a| {
                self.ap_index(a)
                    .ok_or_else(|| Error::semantic(format!("undeclared atomic proposition `{a}`")))
            })
            .collect::<Result<_>>()?;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                idx.iter()
                    .enumerate()
                    .filter(|(_, &i)| l >> i & 1 == 1)
                    .fold(0, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        let mut t = self.clone();
        t.aps = keep.to_vec();
        t.labels = labels;
        Ok(t)
    }

    /// SHA-256 over the normalized text form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_string().as_bytes()))
    }

    /// The label trace of a lasso-shaped path; errors if the path is not
    /// valid in the system (initial state not checked).
    pub fn path_trace(&self, stem: &[StateId], cycle: &[StateId]) -> Result<LassoTrace> {
        if cycle.is_empty() {
            return Err(Error::semantic("lasso loop must be nonempty"));
        }
        let seq: Vec<StateId> = stem.iter().chain(cycle.iter()).copied().collect();
        for w in seq.windows(2) {
            if !self.succ[w[0]].contains(&w[1]) {
                return Err(Error::semantic(format!(
                    "`{}` -> `{}` is not an edge",
                    self.names[w[0]], self.names[w[1]]
                )));
            }
        }
        if !self.succ[*cycle.last().unwrap()].contains(&cycle[0]) {
            return Err(Error::semantic("lasso loop does not close"));
        }
        Lasso::new(
            stem.iter().map(|&s| self.labels[s]).collect(),
            cycle.iter().map(|&s| self.labels[s]).collect(),
        )
    }

    /// Views `T_s` as an all-accepting Büchi automaton over `2^AP` with one
    /// initial state per entry of `starts`.
    pub fn as_safety_nba(&self, starts: &[StateId]) -> Nba {
        let alphabet = Alphabet::new(vec![self.aps.clone()]);
        let mut nba = Nba::new(alphabet, self.num_states());
        for &s in starts {
            nba.add_initial(s);
        }
        for s in self.states() {
            nba.set_accepting(s, true);
            for &t in &self.succ[s] {
                nba.add_transition(s, self.labels[s], t);
            }
        }
        nba.finish();
        nba
    }
}

pub(crate) fn label_to_string(aps: &[String], label: Label) -> String {
    let props: Vec<&str> = aps
        .iter()
        .enumerate()
        .filter(|(i, _)| label >> i & 1 == 1)
        .map(|(_, a)| a.as_str())
        .collect();
    format!("{{{}}}", props.join(" "))
}

impl fmt::Display for TransitionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "aps: {}", self.aps.join(" "))?;
        let init: Vec<&str> = self.initial.iter().map(|&s| self.names[s].as_str()).collect();
        writeln!(f, "init: {}", init.join(" "))?;
        for s in self.states() {
            writeln!(f, "state {} {}", self.names[s], self.label_string(self.labels[s]))?;
            let succ: Vec<&str> = self.succ[s].iter().map(|&t| self.names[t].as_str()).collect();
            writeln!(f, "  -> {}", succ.join(" "))?;
        }
        Ok(())
    }
}

/// Parses the line-oriented system format.
///
/// ```text
/// aps: a b
/// init: s0
/// state s0 {a}
///   -> s0 s1
/// state s1 {}
///   -> s0
/// ```
pub fn parse_ts(text: &str) -> Result<TransitionSystem> {
    struct Pending {
        name: String,
        label_props: Vec<(String, usize, usize)>,
        succ: Option<Vec<(String, usize, usize)>>,
        line: usize,
    }

    let mut aps: Option<Vec<String>> = None;
    let mut init: Option<Vec<(String, usize, usize)>> = None;
    let mut states: Vec<Pending> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        let col = indent + 1;
        let words = |rest: &str, base: usize| -> Vec<(String, usize, usize)> {
            let mut out = Vec::new();
            let mut offset = 0;
            for w in rest.split_whitespace() {
                let pos = rest[offset..].find(w).unwrap() + offset;
                out.push((w.to_string(), line_no, base + pos));
                offset = pos + w.len();
            }
            out
        };
        if let Some(rest) = trimmed.strip_prefix("aps:") {
            if aps.is_some() {
                return Err(Error::syntax(line_no, col, "`aps:` declared twice"));
            }
            if !states.is_empty() || init.is_some() {
                return Err(Error::syntax(line_no, col, "`aps:` must come first"));
            }
            let list = words(rest, col + 4);
            let mut names = Vec::new();
            for (w, l, c) in list {
                if !is_identifier(&w) {
                    return Err(Error::syntax(l, c, format!("invalid AP name `{w}`")));
                }
                if names.contains(&w) {
                    return Err(Error::syntax(l, c, format!("duplicate AP `{w}`")));
                }
                names.push(w);
            }
            if names.len() > MAX_APS {
                return Err(Error::semantic(format!(
                    "system declares {} APs; at most {MAX_APS} are supported",
                    names.len()
                )));
            }
            aps = Some(names);
        } else if let Some(rest) = trimmed.strip_prefix("init:") {
            if aps.is_none() {
                return Err(Error::syntax(line_no, col, "`aps:` must come first"));
            }
            if init.is_some() {
                return Err(Error::syntax(line_no, col, "`init:` declared twice"));
            }
            init = Some(words(rest, col + 5));
        } else if let Some(rest) = trimmed.strip_prefix("state") {
            if aps.is_none() {
                return Err(Error::syntax(line_no, col, "`aps:` must come first"));
            }
            if !rest.starts_with(char::is_whitespace) {
                return Err(Error::syntax(line_no, col, "expected `state NAME {props}`"));
            }
            if let Some(prev) = states.last() {
                if prev.succ.is_none() {
                    return Err(Error::semantic(format!(
                        "state `{}` (line {}) has no successors (the transition relation must be total)",
                        prev.name, prev.line
                    )));
                }
            }
            let open = rest
                .find('{')
                .ok_or_else(|| Error::syntax(line_no, col + 5 + rest.len(), "expected `{`"))?;
            let close = rest
                .find('}')
                .ok_or_else(|| Error::syntax(line_no, col + 5 + rest.len(), "expected `}`"))?;
            if close < open || !rest[close + 1..].trim().is_empty() {
                return Err(Error::syntax(line_no, col + 5 + close, "malformed label"));
            }
            let name = rest[..open].trim();
            if !is_identifier(name) {
                return Err(Error::syntax(line_no, col + 6, format!("invalid state name `{name}`")));
            }
            if states.iter().any(|p| p.name == name) {
                return Err(Error::semantic(format!("duplicate state `{name}`")));
            }
            let props = words(&rest[open + 1..close], col + 5 + open + 1);
            states.push(Pending {
                name: name.to_string(),
                label_props: props,
                succ: None,
                line: line_no,
            });
        } else if let Some(rest) = trimmed.strip_prefix("->") {
            let current = states
                .last_mut()
                .ok_or_else(|| Error::syntax(line_no, col, "`->` outside of a state block"))?;
            if current.succ.is_some() {
                return Err(Error::syntax(line_no, col, "second `->` line for the same state"));
            }
            current.succ = Some(words(rest, col + 2));
        } else {
            return Err(Error::syntax(line_no, col, format!("unexpected `{trimmed}`")));
        }
    }

    let aps = aps.ok_or_else(|| Error::syntax(1, 1, "missing `aps:` line"))?;
    if states.is_empty() {
        return Err(Error::semantic("system has no states"));
    }
    let index: HashMap<&str, StateId> = states
        .iter()
        .enumerate()
        .map(|(i, p)| (p.name.as_str(), i))
        .collect();
    let resolve = |(w, l, c): &(String, usize, usize)| -> Result<StateId> {
        index
            .get(w.as_str())
            .copied()
            .ok_or_else(|| Error::semantic(format!("unknown state `{w}` at {l}:{c}")))
    };
    let mut labels = Vec::new();
    let mut succ = Vec::new();
    for p in &states {
        let mut label = 0u64;
        for (w, l, c) in &p.label_props {
            let i = aps
                .iter()
                .position(|a| a == w)
                .ok_or_else(|| Error::semantic(format!("undeclared AP `{w}` at {l}:{c}")))?;
            label |= 1 << i;
        }
        labels.push(label);
        let list = p.succ.as_ref().ok_or_else(|| {
            Error::semantic(format!(
                "state `{}` (line {}) has no successors (the transition relation must be total)",
                p.name, p.line
            ))
        })?;
        if list.is_empty() {
            return Err(Error::semantic(format!(
                "state `{}` (line {}) has no successors (the transition relation must be total)",
                p.name, p.line
            )));
        }
        succ.push(list.iter().map(resolve).collect::<Result<Vec<_>>>()?);
    }
    let initial = init
        .ok_or_else(|| Error::semantic("no `init:` line (system has no initial state)"))?
        .iter()
        .map(resolve)
        .collect::<Result<Vec<_>>>()?;
    TransitionSystem::new(
        aps,
        states.into_iter().map(|p| p.name).collect(),
        labels,
        initial,
        succ,
    )
}

/// The system `T^P` whose states are `S × 2^P`; prophecy variables are
/// appended to the AP list and chosen freely at every step.
///
/// State `(s, A)` has index `s · 2^|P| + A`, where bit `j` of `A` is `pvars[j]`.
pub fn augment_with_prophecies(ts: &TransitionSystem, pvars: &[String]) -> Result<TransitionSystem> {
    for (j, p) in pvars.iter().enumerate() {
        if ts.ap_index(p).is_some() || pvars[..j].contains(p) {
            return Err(Error::semantic(format!("prophecy variable `{p}` clashes with an existing AP")));
        }
    }
    let n = pvars.len();
    if ts.aps.len() + n > 64 || n > 16 {
        return Err(Error::cap("prophecy variables", 16));
    }
    if n == 0 {
        return Ok(ts.clone());
    }
    let width = 1usize << n;
    let base = ts.aps.len();
    let mut aps = ts.aps.clone();
    aps.extend(pvars.iter().cloned());
    let mut names = Vec::new();
    let mut labels = Vec::new();
    let mut succ = Vec::new();
    for s in ts.states() {
        for a in 0..width {
            names.push(format!("{}_{:0w$b}", ts.names[s], a, w = n));
            labels.push(ts.labels[s] | (a as u64) << base);
            succ.push(
                ts.succ[s]
                    .iter()
                    .flat_map(|&t| (0..width).map(move |b| t * width + b))
                    .collect(),
            );
        }
    }
    let initial = ts
        .initial
        .iter()
        .flat_map(|&s| (0..width).map(move |a| s * width + a))
        .collect();
    TransitionSystem::new(aps, names, labels, initial, succ)
}

/// Coarsest label-respecting bisimulation, by iterated signature refinement.
/// Returns the quotient and the projection `state → class`.
pub fn bisim_quotient(ts: &TransitionSystem) -> (TransitionSystem, Vec<usize>) {
    let n = ts.num_states();
    let mut block = renumber(&(0..n).map(|s| ts.labels[s]).collect::<Vec<_>>());
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|s| {
                let mut succ: Vec<usize> = ts.succ[s].iter().map(|&t| block[t]).collect();
                succ.sort_unstable();
                succ.dedup();
                (block[s], succ)
            })
            .collect();
        let next = renumber(&sigs);
        let stable = count_classes(&next) == count_classes(&block);
        block = next;
        if stable {
            break;
        }
    }
    (quotient(ts, &block), block)
}

/// Assigns class ids in order of first occurrence.
fn renumber<K: std::hash::Hash + Eq + Clone>(keys: &[K]) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.iter()
        .map(|k| {
            let next = ids.len();
            *ids.entry(k.clone()).or_insert(next)
        })
        .collect()
}

fn count_classes(block: &[usize]) -> usize {
    block.iter().copied().max().map_or(0, |m| m + 1)
}

/// Quotient of `ts` under a label-respecting partition (class ids must be
/// dense and numbered by first occurrence).
pub(crate) fn quotient(ts: &TransitionSystem, block: &[usize]) -> TransitionSystem {
    let k = count_classes(block);
    let mut rep = vec![usize::MAX; k];
    for s in ts.states() {
        if rep[block[s]] == usize::MAX {
            rep[block[s]] = s;
        }
    }
    let mut succ = vec![Vec::new(); k];
    for s in ts.states() {
        succ[block[s]].extend(ts.succ[s].iter().map(|&t| block[t]));
    }
    TransitionSystem::new(
        ts.aps.clone(),
        rep.iter().map(|&s| ts.names[s].clone()).collect(),
        rep.iter().map(|&s| ts.labels[s]).collect(),
        ts.initial.iter().map(|&s| block[s]).collect(),
        succ,
    )
    .expect("quotient of a valid system is valid")
}

/// Partition of states by trace equivalence `Traces(T_s1) = Traces(T_s2)`.
/// Returns a class id per state, ids numbered by first occurrence.
pub fn trace_equiv_classes(ts: &TransitionSystem) -> Vec<usize> {
    let nba = ts.as_safety_nba(&[]);
    let starts: Vec<Vec<usize>> = ts.states().map(|s| vec![s]).collect();
    automata::residual_classes(&nba, &starts)
}

/// All lasso paths `u · v^ω` from `from` with `|u| ≤ stem_max` and
/// `|v| ≤ loop_max`, each infinite path reported once in its shortest form
/// (no shorter stem, primitive loop). Deterministic DFS order.
pub fn enumerate_lassos(
    ts: &TransitionSystem,
    from: StateId,
    stem_max: usize,
    loop_max: usize,
) -> Vec<LassoTrace> {
    enumerate_lasso_paths(ts, from, stem_max, loop_max)
        .into_iter()
        .map(|(u, v)| ts.path_trace(&u, &v).expect("enumerated paths are valid"))
        .collect()
}

/// Like [`enumerate_lassos`] but returns the state sequences `(u, v)`.
pub fn enumerate_lasso_paths(
    ts: &TransitionSystem,
    from: StateId,
    stem_max: usize,
    loop_max: usize,
) -> Vec<(Vec<StateId>, Vec<StateId>)> {
    let mut out = Vec::new();
    if loop_max == 0 {
        return out;
    }
    let mut path = vec![from];
    extend_paths(ts, &mut path, stem_max + loop_max, &mut |p| {
        for stem_len in 0..=stem_max.min(p.len() - 1) {
            let (u, v) = p.split_at(stem_len);
            if v.len() > loop_max || !ts.succ[*v.last().unwrap()].contains(&v[0]) {
                continue;
            }
            if !u.is_empty() && u.last() == v.last() {
                continue;
            }
            if !is_primitive(v) {
                continue;
            }
            out.push((u.to_vec(), v.to_vec()));
        }
    });
    out
}

fn extend_paths(
    ts: &TransitionSystem,
    path: &mut Vec<StateId>,
    max_len: usize,
    visit: &mut dyn FnMut(&[StateId]),
) {
    visit(path);
    if path.len() == max_len {
        return;
    }
    let last = *path.last().unwrap();
    for &t in &ts.succ[last] {
        path.push(t);
        extend_paths(ts, path, max_len, visit);
        path.pop();
    }
}

fn is_primitive<T: PartialEq>(v: &[T]) -> bool {
    let n = v.len();
    (1..n).filter(|d| n.is_multiple_of(*d)).all(|d| (0..n).any(|i| v[i] != v[i % d]))
}

/// Classes of a partition as ordered member lists.
pub fn classes_of(block: &[usize]) -> Vec<Vec<StateId>> {
    let mut map: BTreeMap<usize, Vec<StateId>> = BTreeMap::new();
    for (s, &b) in block.iter().enumerate() {
        map.entry(b).or_default().push(s);
    }
    map.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const FIG_1A: &str = "\
aps: a
init: s1 s2
state s1 {a}
  -> s1 s2
state s2 {}
  -> s1 s2
";

    #[test]
    fn parses_running_example() {
        let ts = parse_ts(FIG_1A).unwrap();
        assert_eq!(ts.num_states(), 2);
        assert_eq!(ts.num_edges(), 4);
        assert_eq!(ts.initial(), &[0, 1]);
        assert_eq!(ts.label(0), 1);
        assert_eq!(ts.label(1), 0);
    }

    #[test]
    fn minimal_system() {
        let ts = parse_ts("aps:\ninit: s0\nstate s0 {}\n  -> s0\n").unwrap();
        assert_eq!(ts.num_states(), 1);
        assert_eq!(ts.num_edges(), 1);
    }

    #[test]
    fn missing_successors_is_totality_error() {
        let err = parse_ts("aps: a\ninit: s0\nstate s0 {}\n  -> s1\nstate s1 {a}\n").unwrap_err();
        assert!(err.to_string().contains("no successors"), "{err}");
        let err = parse_ts("aps: a\ninit: s0\nstate s0 {}\nstate s1 {a}\n -> s0\n").unwrap_err();
        assert!(err.to_string().contains("no successors"), "{err}");
    }

    #[test]
    fn semantic_errors() {
        let undeclared = parse_ts("aps: a\ninit: s0\nstate s0 {b}\n  -> s0\n").unwrap_err();
        assert!(undeclared.to_string().contains("undeclared AP `b`"));
        let unknown = parse_ts("aps: a\ninit: s0\nstate s0 {}\n  -> s9\n").unwrap_err();
        assert!(unknown.to_string().contains("unknown state `s9`"));
        let no_init = parse_ts("aps: a\nstate s0 {}\n  -> s0\n").unwrap_err();
        assert!(no_init.to_string().contains("no initial state"));
        let empty_init = parse_ts("aps: a\ninit:\nstate s0 {}\n  -> s0\n").unwrap_err();
        assert!(empty_init.to_string().contains("no initial state"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_ts("aps: a\ninit: s0\n  bogus line\n").unwrap_err() {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (3, 3)),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(parse_ts("init: s0\n"), Err(Error::Syntax { line: 1, .. })));
    }

    #[test]
    fn ap_budget_enforced() {
        let text = "aps: a b c d e f g h i\ninit: s\nstate s {}\n -> s\n";
        assert!(parse_ts(text).unwrap_err().to_string().contains("at most 8"));
    }

    #[test]
    fn print_parse_roundtrip() {
        let ts = parse_ts(FIG_1A).unwrap();
        assert_eq!(parse_ts(&ts.to_string()).unwrap(), ts);
    }

    #[test]
    fn augment_counts() {
        let ts = parse_ts(FIG_1A).unwrap();
        let tp = augment_with_prophecies(&ts, &["p".into()]).unwrap();
        assert_eq!(tp.num_states(), 4);
        assert_eq!(tp.num_edges(), 4 * 2 * 2);
        assert_eq!(tp.initial().len(), 4);
        assert_eq!(tp.aps(), &["a".to_string(), "p".to_string()]);
        let one = parse_ts("aps:\ninit: s0\nstate s0 {}\n  -> s0\n").unwrap();
        let tp = augment_with_prophecies(&one, &["p".into(), "q".into()]).unwrap();
        assert_eq!((tp.num_states(), tp.num_edges()), (4, 16));
        assert_eq!(augment_with_prophecies(&ts, &[]).unwrap(), ts);
        assert!(augment_with_prophecies(&ts, &["a".into()]).is_err());
        assert!(augment_with_prophecies(&ts, &["p".into(), "p".into()]).is_err());
    }

    #[test]
    fn bisim_merges_duplicates() {
        let ts = parse_ts(
            "aps: a\ninit: s0\nstate s0 {a}\n -> s1 s2\nstate s1 {}\n -> s0\nstate s2 {}\n -> s0\n",
        )
        .unwrap();
        let (q, map) = bisim_quotient(&ts);
        assert_eq!(q.num_states(), 2);
        assert_eq!(map, vec![0, 1, 1]);
        let (qq, _) = bisim_quotient(&q);
        assert_eq!(qq, q);
    }

    #[test]
    fn trace_classes_of_running_example() {
        let ts = parse_ts(FIG_1A).unwrap();
        assert_eq!(trace_equiv_classes(&ts), vec![0, 1]);
        let sym = parse_ts("aps: a\ninit: s0\nstate s0 {a}\n -> s0 s1\nstate s1 {a}\n -> s0 s1\n").unwrap();
        assert_eq!(trace_equiv_classes(&sym), vec![0, 0]);
    }

    #[test]
    fn lassos_of_running_example() {
        let ts = parse_ts(FIG_1A).unwrap();
        let l = enumerate_lassos(&ts, 0, 0, 1);
        assert_eq!(l, vec![Lasso::new(vec![], vec![1]).unwrap()]);
        let self_loop = parse_ts("aps: a\ninit: s0\nstate s0 {a}\n -> s0\n").unwrap();
        for stem in 0..4 {
            for lp in 1..4 {
                assert_eq!(enumerate_lassos(&self_loop, 0, stem, lp).len(), 1);
            }
        }
    }

    #[test]
    fn primitive_words() {
        assert!(is_primitive(&[1]));
        assert!(is_primitive(&[1, 2]));
        assert!(!is_primitive(&[1, 1]));
        assert!(!is_primitive(&[1, 2, 1, 2]));
        assert!(is_primitive(&[1, 2, 1]));
    }
}
