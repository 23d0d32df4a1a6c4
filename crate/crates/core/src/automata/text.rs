//! Line-based text format for automata.
//!
//! ```text
//! kind: dpa
//! arity: 1
//! aps[0]: b
//! states: 3
//! init: 0
//! colors: 1 1 0
//! 0 --({b})--> 2
//! 0 --({})--> 1
//! ```
//!
//! NBAs list `accepting:` states, DSAs list `bad:` states. Deterministic
//! kinds must give exactly one transition per state and letter.

use super::{Alphabet, Automaton, Dpa, Dsa, Letter, Nba};
use crate::error::{Error, Result};

fn letter_string(al: &Alphabet, letter: Letter) -> String {
    let parts: Vec<String> = (0..al.arity())
        .map(|slot| {
            let aps: Vec<&str> = al
                .slot(slot)
                .iter()
                .zip(al.slot_bits(slot))
                .filter(|(_, &b)| letter >> b & 1 == 1)
                .map(|(a, _)| a.as_str())
                .collect();
            format!("{{{}}}", aps.join(" "))
        })
        .collect();
    format!("({})", parts.join(";"))
}

fn header(out: &mut String, kind: &str, al: &Alphabet, n: usize) {
    out.push_str(&format!("kind: {kind}\narity: {}\n", al.arity()));
    for slot in 0..al.arity() {
        out.push_str(&format!("aps[{slot}]: {}\n", al.slot(slot).join(" ")));
    }
    out.push_str(&format!("states: {n}\n"));
}

fn join<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn print_automaton(a: &Automaton) -> String {
    let mut out = String::new();
    match a {
        Automaton::Nba(n) => {
            header(&mut out, "nba", n.alphabet(), n.num_states());
            out.push_str(&format!("init: {}\n", join(n.initial().iter())));
            out.push_str(&format!(
                "accepting: {}\n",
                join((0..n.num_states()).filter(|&q| n.is_accepting(q)))
            ));
            for q in 0..n.num_states() {
                for &(l, t) in n.transitions(q) {
                    out.push_str(&format!("{q} --{}--> {t}\n", letter_string(n.alphabet(), l)));
                }
            }
        }
        Automaton::Dsa(d) => {
            header(&mut out, "dsa", d.alphabet(), d.num_states());
            out.push_str(&format!("init: {}\n", d.initial()));
            out.push_str(&format!(
                "bad: {}\n",
                join((0..d.num_states()).filter(|&q| d.is_bad(q)))
            ));
            for q in 0..d.num_states() {
                for l in d.alphabet().letters() {
                    let t = d.succ(q, l);
                    out.push_str(&format!("{q} --{}--> {t}\n", letter_string(d.alphabet(), l)));
                }
            }
        }
        Automaton::Dpa(d) => {
            header(&mut out, "dpa", d.alphabet(), d.num_states());
            out.push_str(&format!("init: {}\n", d.initial()));
            out.push_str(&format!(
                "colors: {}\n",
                join((0..d.num_states()).map(|q| d.color(q)))
            ));
            for q in 0..d.num_states() {
                for l in d.alphabet().letters() {
                    let t = d.succ(q, l);
                    out.push_str(&format!("{q} --{}--> {t}\n", letter_string(d.alphabet(), l)));
                }
            }
        }
    }
    out
}

struct Header {
    kind: String,
    arity: usize,
    slots: Vec<Option<Vec<String>>>,
    states: Option<usize>,
    init: Vec<usize>,
    marks: Option<Vec<usize>>,
    colors: Option<Vec<u32>>,
}

fn parse_nums<T: std::str::FromStr>(s: &str, line: usize, col: usize) -> Result<Vec<T>> {
    s.split_whitespace()
        .map(|w| {
            w.parse()
                .map_err(|_| Error::syntax(line, col, format!("expected a number, found `{w}`")))
        })
        .collect()
}

fn parse_letter(al: &Alphabet, s: &str, line: usize, col: usize) -> Result<Letter> {
    let inner = s
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::syntax(line, col, "letter must look like ({..};{..})"))?;
    let parts: Vec<&str> = inner.split(';').collect();
    if parts.len() != al.arity() {
        return Err(Error::syntax(
            line,
            col,
            format!("letter has {} components, arity is {}", parts.len(), al.arity()),
        ));
    }
    let mut letter = 0;
    for (slot, p) in parts.iter().enumerate() {
        let body = p
            .trim()
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::syntax(line, col, "letter component must be {..}"))?;
        for ap in body.split_whitespace() {
            let b = al
                .bit(slot, ap)
                .ok_or_else(|| Error::syntax(line, col, format!("undeclared AP `{ap}`")))?;
            letter |= 1 << b;
        }
    }
    Ok(letter)
}

pub fn parse_automaton(text: &str) -> Result<Automaton> {
    let mut h = Header {
        kind: String::new(),
        arity: 0,
        slots: Vec::new(),
        states: None,
        init: Vec::new(),
        marks: None,
        colors: None,
    };
    let mut edges: Vec<(usize, usize, usize, String, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = content.len() - content.trim_start().len() + 1;
        if let Some(pos) = trimmed.find("--(") {
            let (from, rest) = trimmed.split_at(pos);
            let end = rest
                .find(")-->")
                .ok_or_else(|| Error::syntax(line, col + pos, "expected `)-->`"))?;
            let letter = rest[2..end + 1].to_string();
            let to = rest[end + 4..].trim();
            let f = from
                .trim()
                .parse()
                .map_err(|_| Error::syntax(line, col, "expected source state"))?;
            let t = to
                .parse()
                .map_err(|_| Error::syntax(line, col + pos + end + 4, "expected target state"))?;
            edges.push((line, col + pos + 2, f, letter, t));
            continue;
        }
        let (key, value) = trimmed
            .split_once(':')
            .ok_or_else(|| Error::syntax(line, col, "expected `key: value` or a transition"))?;
        let vcol = col + key.len() + 1;
        let key = key.trim();
        let value = value.trim();
        match key {
            "kind" => h.kind = value.to_string(),
            "arity" => {
                h.arity = value
                    .parse()
                    .map_err(|_| Error::syntax(line, vcol, "expected arity"))?;
                h.slots = vec![None; h.arity];
            }
            "states" => h.states = Some(parse_nums::<usize>(value, line, vcol)?.first().copied().unwrap_or(0)),
            "init" => h.init = parse_nums(value, line, vcol)?,
            "accepting" | "bad" => h.marks = Some(parse_nums(value, line, vcol)?),
            "colors" => h.colors = Some(parse_nums(value, line, vcol)?),
            _ => {
                let slot = key
                    .strip_prefix("aps[")
                    .and_then(|s| s.strip_suffix(']'))
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| Error::syntax(line, col, format!("unknown key `{key}`")))?;
                if slot >= h.arity {
                    return Err(Error::syntax(line, col, "slot index exceeds arity"));
                }
                h.slots[slot] = Some(value.split_whitespace().map(String::from).collect());
            }
        }
    }
    let slots: Vec<Vec<String>> = h
        .slots
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| Error::semantic(format!("missing aps[{i}]"))))
        .collect::<Result<_>>()?;
    let al = Alphabet::new(slots);
    al.check_dense()?;
    let n = h.states.ok_or_else(|| Error::semantic("missing `states:`"))?;
    let check = |q: usize, line: usize, col: usize| -> Result<usize> {
        if q >= n {
            Err(Error::syntax(line, col, format!("state {q} out of range")))
        } else {
            Ok(q)
        }
    };
    let mut parsed = Vec::new();
    for (line, col, f, l, t) in edges {
        let letter = parse_letter(&al, &l, line, col)?;
        parsed.push((check(f, line, 1)?, letter, check(t, line, col)?));
    }
    if h.init.iter().any(|&q| q >= n) {
        return Err(Error::semantic("initial state out of range"));
    }
    let marks = h.marks.unwrap_or_default();
    if marks.iter().any(|&q| q >= n) {
        return Err(Error::semantic("marked state out of range"));
    }
    match h.kind.as_str() {
        "nba" => {
            let mut nba = Nba::new(al, n);
            for &q in &h.init {
                nba.add_initial(q);
            }
            for &q in &marks {
                nba.set_accepting(q, true);
            }
            for (f, l, t) in parsed {
                nba.add_transition(f, l, t);
            }
            nba.finish();
            Ok(nba.into())
        }
        "dsa" | "dpa" => {
            let [init] = h.init[..] else {
                return Err(Error::semantic("deterministic automata need exactly one initial state"));
            };
            let m = al.num_letters();
            let mut delta = vec![u32::MAX; n * m];
            for (f, l, t) in parsed {
                let slot = &mut delta[f * m + l as usize];
                if *slot != u32::MAX && *slot != t as u32 {
                    return Err(Error::semantic(format!("state {f} has two successors on one letter")));
                }
                *slot = t as u32;
            }
            if let Some(i) = delta.iter().position(|&t| t == u32::MAX) {
                return Err(Error::semantic(format!(
                    "state {} has no successor on {}",
                    i / m,
                    letter_string(&al, (i % m) as Letter)
                )));
            }
            if h.kind == "dsa" {
                let mut bad = vec![false; n];
                for q in marks {
                    bad[q] = true;
                }
                Ok(Dsa::new(al, init, bad, delta)?.into())
            } else {
                let colors = h.colors.ok_or_else(|| Error::semantic("missing `colors:`"))?;
                if colors.len() != n {
                    return Err(Error::semantic("one color per state expected"));
                }
                Ok(Dpa::new(al, init, colors, delta)?.into())
            }
        }
        other => Err(Error::semantic(format!("unknown automaton kind `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_all_kinds() {
        let al = Alphabet::new(vec![vec!["a".into()], vec!["a".into(), "b".into()]]);
        let m = al.num_letters();
        let dsa = Dsa::new(al.clone(), 0, vec![false, true], (0..2 * m).map(|i| (i % 3 == 0 || i >= m) as u32).collect()).unwrap();
        let mut nba = Nba::new(al.clone(), 2);
        nba.add_initial(1);
        nba.set_accepting(0, true);
        nba.add_transition(1, 5, 0);
        nba.add_transition(0, 3, 0);
        nba.finish();
        let dpa = Dpa::new(al, 1, vec![2, 1], (0..2 * m).map(|i| (i % 2) as u32).collect()).unwrap();
        for a in [Automaton::from(dsa), nba.into(), dpa.into()] {
            let text = print_automaton(&a);
            assert_eq!(parse_automaton(&text).unwrap(), a, "{text}");
        }
    }

    #[test]
    fn errors_have_positions() {
        let text = "kind: nba\narity: 1\naps[0]: a\nstates: 1\ninit: 0\naccepting: 0\n0 --({c})--> 0\n";
        match parse_automaton(text) {
            Err(Error::Syntax { line: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        let text = "kind: dsa\narity: 1\naps[0]: a\nstates: 1\ninit: 0\nbad:\n0 --({a})--> 0\n";
        assert!(parse_automaton(text).is_err());
    }
}
