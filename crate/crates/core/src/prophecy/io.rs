//! Prophecy families on disk: a `manifest` plus one automaton file per entry.
//!
//! ```text
//! arity: 1
//! xi0 xi0.aut q=0 states=s1
//! key q=2 states=s2 -> never
//! rep: s1 s2
//! ```
//!
//! `key` lines list further keys (`-> var`, `-> always`, `-> never` or
//! `-> unread`);
//! `rep` maps every state to its trace-equivalence representative.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{BitSource, Prophecy, ProphecyEntry, ProphecyFamily, ProphecyKey};
use crate::automata::{parse_automaton, print_automaton, Automaton};
use crate::error::{Error, Result};
use crate::model::TransitionSystem;

pub fn write_family_dir(dir: &Path, family: &ProphecyFamily, ts: &TransitionSystem) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = format!("arity: {}\n", family.k);
    for e in &family.entries {
        let file = format!("{}.aut", e.var);
        let _ = write!(manifest, "{} {file}", e.var);
        if let Some(key) = &e.key {
            let names: Vec<&str> = key.states.iter().map(|&s| ts.name(s)).collect();
            let _ = write!(manifest, " q={} states={}", key.q, names.join(","));
        }
        manifest.push('\n');
        let a: Automaton = match &e.automaton {
            Prophecy::Safety(d) => d.clone().into(),
            Prophecy::Parity(d) => d.clone().into(),
        };
        fs::write(dir.join(&file), print_automaton(&a))?;
    }
    let names = |states: &[usize]| states.iter().map(|&s| ts.name(s)).collect::<Vec<_>>().join(",");
    for (key, src) in &family.lookup {
        let own = matches!(src, BitSource::Var(j) if family.entries[*j].key.as_ref() == Some(key));
        if own {
            continue;
        }
        let target = match src {
            BitSource::Var(j) => family.entries[*j].var.as_str(),
            BitSource::Always => "always",
            BitSource::Never => "never",
            BitSource::Unread => "unread",
        };
        let _ = writeln!(manifest, "key q={} states={} -> {target}", key.q, names(&key.states));
    }
    if !family.rep.is_empty() {
        let _ = writeln!(manifest, "rep: {}", family.rep.iter().map(|&s| ts.name(s)).collect::<Vec<_>>().join(" "));
    }
    fs::write(dir.join("manifest"), manifest)?;
    Ok(())
}

/// Reads a family. Keys are resolved against `ts` when given; NBAs are rejected.
pub fn read_family_dir(dir: &Path, ts: Option<&TransitionSystem>) -> Result<ProphecyFamily> {
    let text = fs::read_to_string(dir.join("manifest"))
        .map_err(|e| Error::Io(format!("{}: {e}", dir.join("manifest").display())))?;
    let mut k = None;
    let mut entries = Vec::new();
    let mut extra: Vec<(usize, ProphecyKey, String)> = Vec::new();
    let mut rep = Vec::new();
    let state = |n: &str| -> Result<usize> {
        let ts = ts.ok_or_else(|| Error::semantic("keyed manifests need the system"))?;
        ts.state_by_name(n)
            .ok_or_else(|| Error::semantic(format!("unknown state `{n}` in manifest")))
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(v) = line.strip_prefix("arity:") {
            k = Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::syntax(i + 1, 1, "expected `arity: N`"))?,
            );
            continue;
        }
        if let Some(v) = line.strip_prefix("rep:") {
            rep = v.split_whitespace().map(state).collect::<Result<_>>()?;
            continue;
        }
        if let Some(v) = line.strip_prefix("key ") {
            let (lhs, target) = v
                .split_once("->")
                .ok_or_else(|| Error::syntax(i + 1, 1, "expected `key q=N states=a,b -> target`"))?;
            let mut q = None;
            let mut states = Vec::new();
            for w in lhs.split_whitespace() {
                if let Some(v) = w.strip_prefix("q=") {
                    q = Some(v.parse::<usize>().map_err(|_| Error::syntax(i + 1, 1, "bad q="))?);
                } else if let Some(v) = w.strip_prefix("states=") {
                    states = v.split(',').filter(|s| !s.is_empty()).map(state).collect::<Result<_>>()?;
                } else {
                    return Err(Error::syntax(i + 1, 1, format!("unknown field `{w}`")));
                }
            }
            let q = q.ok_or_else(|| Error::syntax(i + 1, 1, "key lacks q="))?;
            extra.push((i + 1, ProphecyKey { q, states }, target.trim().to_string()));
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.len() < 2 {
            return Err(Error::syntax(i + 1, 1, "expected `var file [q=N states=a,b]`"));
        }
        let var = words[0].to_string();
        if !crate::model::is_identifier(&var) {
            return Err(Error::syntax(i + 1, 1, format!("invalid variable `{var}`")));
        }
        let path = dir.join(words[1]);
        let aut = parse_automaton(
            &fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        )?;
        let automaton = match aut {
            Automaton::Dsa(d) => Prophecy::Safety(d),
            Automaton::Dpa(d) => Prophecy::Parity(d),
            Automaton::Nba(_) => {
                return Err(Error::semantic(format!(
                    "{}: prophecies must be deterministic (dsa or dpa)",
                    path.display()
                )))
            }
        };
        let mut q = None;
        let mut states = None;
        for w in &words[2..] {
            if let Some(v) = w.strip_prefix("q=") {
                q = Some(v.parse::<usize>().map_err(|_| Error::syntax(i + 1, 1, "bad q="))?);
            } else if let Some(v) = w.strip_prefix("states=") {
                states = Some(v.split(',').filter(|s| !s.is_empty()).map(String::from).collect::<Vec<_>>());
            } else {
                return Err(Error::syntax(i + 1, 1, format!("unknown field `{w}`")));
            }
        }
        let key = match (q, states, ts) {
            (Some(q), Some(names), Some(ts)) => Some(ProphecyKey {
                q,
                states: names
                    .iter()
                    .map(|n| {
                        ts.state_by_name(n)
                            .ok_or_else(|| Error::semantic(format!("unknown state `{n}` in manifest")))
                    })
                    .collect::<Result<_>>()?,
            }),
            _ => None,
        };
        entries.push(ProphecyEntry { var, key, automaton });
    }
    let k = k.ok_or_else(|| Error::semantic("manifest lacks `arity:`"))?;
    for e in &entries {
        if e.automaton.alphabet().arity() != k {
            return Err(Error::Arity(format!("prophecy `{}` must read {k} traces", e.var)));
        }
    }
    let mut family = ProphecyFamily::from_entries(k, entries);
    for (line, key, target) in extra {
        let src = match target.as_str() {
            "always" => BitSource::Always,
            "never" => BitSource::Never,
            "unread" => BitSource::Unread,
            v => BitSource::Var(
                family
                    .entries
                    .iter()
                    .position(|e| e.var == v)
                    .ok_or_else(|| Error::syntax(line, 1, format!("unknown variable `{v}`")))?,
            ),
        };
        family.lookup.insert(key, src);
    }
    family.rep = rep;
    Ok(family)
}
