//! Line-oriented certificate explorer. The user plays the universal copies
//! and the prophecy bits; the certificate's strategy answers.

use std::io::{self, BufRead, Write};

use hyprover::automata::{lasso_membership, Automaton, Dsa, Letter};
use hyprover::checker::{build_game, Certificate, Problem, Route};
use hyprover::game::{slot_letters, Arena, GameNode, Player};
use hyprover::lasso::Lasso;
use hyprover::model::StateId;
use hyprover::prophecy::{recommendation_strategy, History, Prophecy};

const HELP: &str = "\
commands:
  step S..          universal move, one state per universal copy
  step              next move of the auto-bits continuation
  bits B..          prophecy bits for the next move (e.g. `bits 1 0` or `bits 10`)
  auto-bits P.. / L..
                    declare the universal continuation as a lasso; positions are
                    state tuples joined by commas, `/` starts the loop
  show              current position, histories and pending bits
  help              this text
  quit              leave";

/// A claim made by one prophecy bit: the universal suffix from `start` is
/// in the prophecy language (`set`) or not.
struct Claim {
    var: usize,
    start: usize,
    set: bool,
    q: usize,
}

pub struct Session {
    p: Problem,
    cert: Certificate,
    arena: Arena,
    nbits: usize,
    matrix: Option<Dsa>,
    contrib: Vec<Vec<Letter>>,
    prophecies: Vec<Option<Dsa>>,
    universal_from: Vec<Vec<bool>>,
    node: Option<usize>,
    universal: Vec<Vec<StateId>>,
    existential: Vec<Vec<StateId>>,
    bits: Vec<Vec<bool>>,
    pending: Vec<bool>,
    script: Option<(Lasso<Vec<StateId>>, usize)>,
    claims: Vec<Claim>,
    q_hat: Option<usize>,
}

impl Session {
    pub fn new(p: Problem, cert: Certificate, cap: usize) -> hyprover::Result<Session> {
        if cert.owner != Player::Verifier {
            return Err(hyprover::Error::Semantic(
                "explain steps through verified certificates only".into(),
            ));
        }
        let (arena, _) = build_game(&p, cert.route, &cert.family, cap)?;
        let nbits = if cert.route == Route::Plain { 0 } else { cert.family.len() };
        let matrix = p.matrix_dsa.clone();
        let al = match &matrix {
            Some(d) => d.alphabet().clone(),
            None => p.matrix_nba.alphabet().clone(),
        };
        let contrib = (0..p.k + p.l)
            .map(|c| slot_letters(&p.ts, &al, c))
            .collect::<hyprover::Result<_>>()?;
        let prophecies: Vec<Option<Dsa>> = cert
            .family
            .entries
            .iter()
            .map(|e| match &e.automaton {
                Prophecy::Safety(d) => Some(d.clone()),
                Prophecy::Parity(_) => None,
            })
            .collect();
        let universal_from = prophecies
            .iter()
            .map(|d| match d {
                Some(d) => (0..d.num_states()).map(|q| d.with_initial(q).is_universal()).collect(),
                None => Vec::new(),
            })
            .collect();
        let q_hat = matrix.as_ref().map(Dsa::initial);
        Ok(Session {
            p,
            cert,
            arena,
            nbits,
            matrix,
            contrib,
            prophecies,
            universal_from,
            node: None,
            universal: Vec::new(),
            existential: Vec::new(),
            bits: Vec::new(),
            pending: vec![false; nbits],
            script: None,
            claims: Vec::new(),
            q_hat,
        })
    }

    fn pos(&self) -> usize {
        self.universal.len()
    }

    fn k(&self) -> usize {
        self.p.k
    }

    fn tuple_name(&self, t: &[StateId]) -> String {
        t.iter().map(|&s| self.p.ts.name(s)).collect::<Vec<_>>().join(",")
    }

    fn bits_text(&self, bits: &[bool]) -> String {
        if bits.is_empty() {
            return "none".into();
        }
        self.cert
            .family
            .entries
            .iter()
            .zip(bits)
            .map(|(e, &b)| format!("{}={}", e.var, u8::from(b)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn parse_tuple(&self, word: &str) -> Result<Vec<StateId>, String> {
        let names: Vec<&str> = word.split(',').collect();
        if names.len() != self.k() {
            return Err(format!("expected {} state(s) per position, got `{word}`", self.k()));
        }
        names
            .iter()
            .map(|n| self.p.ts.state_by_name(n).ok_or_else(|| format!("unknown state `{n}`")))
            .collect()
    }

    /// Checks that `t` may follow `prev` (or start the game when `None`).
    fn legal_after(&self, prev: Option<&[StateId]>, t: &[StateId]) -> Result<(), String> {
        for (c, &s) in t.iter().enumerate() {
            let ok = match prev {
                None => self.p.ts.initial().contains(&s),
                Some(prev) => self.p.ts.successors(prev[c]).contains(&s),
            };
            if !ok {
                return Err(match prev {
                    None => format!("{} is not an initial state", self.p.ts.name(s)),
                    Some(prev) => format!("{} is not a successor of {}", self.p.ts.name(s), self.p.ts.name(prev[c])),
                });
            }
        }
        Ok(())
    }

    fn universal_letter(&self, t: &[StateId]) -> Letter {
        t.iter().enumerate().fold(0, |acc, (c, &s)| acc | self.contrib[c][s])
    }

    fn truthful_bits(&self, script: &Lasso<Vec<StateId>>, i: usize) -> Vec<bool> {
        let word = script.map(|t| self.universal_letter(t)).suffix(i);
        self.cert
            .family
            .entries
            .iter()
            .take(self.nbits)
            .map(|e| {
                let a: Automaton = match &e.automaton {
                    Prophecy::Safety(d) => d.clone().into(),
                    Prophecy::Parity(d) => d.clone().into(),
                };
                lasso_membership(&a, &word).unwrap_or(false)
            })
            .collect()
    }

    fn cmd_bits(&mut self, args: &[&str], out: &mut impl Write) -> io::Result<()> {
        if self.nbits == 0 {
            return writeln!(out, "this certificate has no prophecy variables");
        }
        let digits: String = args.concat();
        if digits.len() != self.nbits || !digits.chars().all(|c| c == '0' || c == '1') {
            return writeln!(out, "expected {} bit(s) of 0 or 1", self.nbits);
        }
        self.pending = digits.chars().map(|c| c == '1').collect();
        self.script = None;
        writeln!(out, "bits for the next move: {}", self.bits_text(&self.pending))
    }

    fn cmd_auto_bits(&mut self, args: &[&str], out: &mut impl Write) -> io::Result<()> {
        let split = args.iter().position(|&w| w == "/");
        let (stem, cycle) = match split {
            Some(i) => (&args[..i], &args[i + 1..]),
            None => (&args[..0], args),
        };
        if cycle.is_empty() {
            return writeln!(out, "the continuation needs a nonempty loop after `/`");
        }
        let parse = |ws: &[&str]| ws.iter().map(|w| self.parse_tuple(w)).collect::<Result<Vec<_>, _>>();
        let (stem, cycle) = match (parse(stem), parse(cycle)) {
            (Ok(s), Ok(c)) => (s, c),
            (Err(e), _) | (_, Err(e)) => return writeln!(out, "{e}"),
        };
        let script = Lasso::new(stem, cycle).expect("loop is nonempty");
        let mut prev = self.universal.last().cloned();
        for i in 0..script.len() {
            if let Err(e) = self.legal_after(prev.as_deref(), script.at(i)) {
                return writeln!(out, "illegal continuation at its position {i}: {e}");
            }
            prev = Some(script.at(i).clone());
        }
        let back = script.at(script.len());
        if let Err(e) = self.legal_after(prev.as_deref(), back) {
            return writeln!(out, "the loop does not close: {e}");
        }
        self.pending = self.truthful_bits(&script, 0);
        writeln!(
            out,
            "continuation set ({} positions); bits for the next move: {}",
            script.len(),
            self.bits_text(&self.pending)
        )?;
        self.script = Some((script, 0));
        Ok(())
    }

    fn cmd_step(&mut self, args: &[&str], out: &mut impl Write) -> io::Result<()> {
        let (univ, bits) = if args.is_empty() {
            let Some((script, i)) = &self.script else {
                return writeln!(out, "give the universal move, or declare one with auto-bits");
            };
            (script.at(*i).clone(), self.truthful_bits(script, *i))
        } else {
            if args.len() != self.k() {
                return writeln!(out, "expected {} state(s)", self.k());
            }
            match self.parse_tuple(&args.join(",")) {
                Ok(t) => {
                    self.script = None;
                    (t, self.pending.clone())
                }
                Err(e) => return writeln!(out, "{e}"),
            }
        };
        if let Err(e) = self.legal_after(self.universal.last().map(Vec::as_slice), &univ) {
            return writeln!(out, "illegal move: {e}");
        }
        let mut tagged = univ.clone();
        if self.nbits > 0 {
            let a = bits.iter().enumerate().fold(0usize, |acc, (j, &b)| acc | usize::from(b) << j);
            tagged[0] = tagged[0] * (1 << self.nbits) + a;
        }
        let k = self.k();
        let at = match self.node {
            None => self.arena.find(&GameNode::Init(tagged)),
            Some(v) => {
                let mut want = tagged;
                want.extend_from_slice(&self.existential.last().expect("a move was made")[..]);
                self.arena.game.successors(v).iter().map(|&w| w as usize).find(
                    |&w| matches!(&self.arena.nodes[w], GameNode::Step { states, .. } if *states == want),
                )
            }
        };
        let Some(at) = at else {
            return writeln!(out, "illegal move: not in the game");
        };
        let Some(next) = self.cert.strategy.choice[at] else {
            return writeln!(out, "the strategy has no answer here");
        };
        let next = next as usize;
        let GameNode::Step { states, .. } = &self.arena.nodes[next] else {
            return writeln!(out, "the strategy left the game");
        };
        let ex = states[k..].to_vec();

        let pos = self.pos();
        self.universal.push(univ.clone());
        self.bits.push(bits.clone());
        writeln!(
            out,
            "refuter moves to {} with bits {}",
            self.tuple_name(&univ),
            self.bits_text(&bits)
        )?;
        if let (Route::Relaxed, Some(d)) = (self.cert.route, &self.matrix) {
            let h = History {
                universal: self.universal.clone(),
                bits: self.bits.clone(),
                existential: self.existential.clone(),
            };
            if let Ok(rec) = recommendation_strategy(&self.p.ts, &self.cert.family, d, &h) {
                let cands: Vec<String> = rec.candidates.iter().map(|t| self.tuple_name(t)).collect();
                writeln!(
                    out,
                    "recommendation: {} (C = {{{}}})",
                    self.tuple_name(&rec.choice),
                    cands.join(" ")
                )?;
            }
        }
        writeln!(out, "verifier moves to {}", self.tuple_name(&ex))?;
        self.existential.push(ex.clone());
        self.node = Some(next);
        if let (Some(d), Some(q)) = (&self.matrix, self.q_hat) {
            let letter = ex.iter().enumerate().fold(self.universal_letter(&univ), |acc, (c, &s)| {
                acc | self.contrib[k + c][s]
            });
            let q2 = d.succ(q, letter);
            self.q_hat = Some(q2);
            let note = if d.is_bad(q2) { " (bad)" } else { "" };
            writeln!(out, "matrix state: {q2}{note}")?;
        }
        self.advance_claims(pos, &univ, &bits, out)?;
        if let Some((script, i)) = &mut self.script {
            *i = script.next_pos(*i);
        }
        self.pending = match &self.script {
            Some((script, i)) => self.truthful_bits(script, *i),
            None => vec![false; self.nbits],
        };
        Ok(())
    }

    fn advance_claims(&mut self, pos: usize, univ: &[StateId], bits: &[bool], out: &mut impl Write) -> io::Result<()> {
        for (j, &b) in bits.iter().enumerate() {
            if let Some(d) = &self.prophecies[j] {
                self.claims.push(Claim {
                    var: j,
                    start: pos,
                    set: b,
                    q: d.initial(),
                });
            }
        }
        let letter = self.universal_letter(univ);
        let mut kept = Vec::new();
        for mut c in std::mem::take(&mut self.claims) {
            let d = self.prophecies[c.var].as_ref().expect("claims exist for safety prophecies only");
            c.q = d.succ(c.q, letter);
            let var = &self.cert.family.entries[c.var].var;
            let (bad, univ) = (d.is_bad(c.q), self.universal_from[c.var][c.q]);
            match (c.set, bad, univ) {
                (true, true, _) => writeln!(
                    out,
                    "premise violated: {var} was set at position {} but the traces left its language",
                    c.start
                )?,
                (false, _, true) => writeln!(
                    out,
                    "premise violated: {var} was unset at position {} but every continuation is in its language",
                    c.start
                )?,
                (true, _, true) | (false, true, _) => {}
                _ => kept.push(c),
            }
        }
        self.claims = kept;
        Ok(())
    }

    fn cmd_show(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "position {}", self.pos())?;
        for i in 0..self.pos() {
            writeln!(
                out,
                "  {i}: refuter {} bits {} | verifier {}",
                self.tuple_name(&self.universal[i]),
                self.bits_text(&self.bits[i]),
                self.tuple_name(&self.existential[i])
            )?;
        }
        if let Some(v) = self.node {
            writeln!(out, "game node {v}, color {}", self.arena.game.color(v))?;
        }
        if let Some(q) = self.q_hat {
            writeln!(out, "matrix state: {q}")?;
        }
        writeln!(out, "pending bits: {}", self.bits_text(&self.pending))?;
        writeln!(out, "open claims: {}", self.claims.len())
    }

    /// Runs the REPL until `quit` or end of input.
    pub fn run(&mut self, input: impl BufRead, out: &mut impl Write) -> io::Result<()> {
        let vars: Vec<&str> = self.cert.family.entries.iter().take(self.nbits).map(|e| e.var.as_str()).collect();
        writeln!(
            out,
            "verified certificate, route {}, {} game nodes",
            self.cert.route.as_str(),
            self.arena.game.num_nodes()
        )?;
        writeln!(
            out,
            "prophecy variables: {}",
            if vars.is_empty() { "none".to_string() } else { vars.join(" ") }
        )?;
        writeln!(out, "type `help` for commands")?;
        let mut lines = input.lines();
        loop {
            write!(out, "[{}] > ", self.pos())?;
            out.flush()?;
            let Some(line) = lines.next() else {
                writeln!(out)?;
                return Ok(());
            };
            let line = line?;
            let words: Vec<&str> = line.split_whitespace().collect();
            let Some((&cmd, args)) = words.split_first() else {
                continue;
            };
            match cmd {
                "step" => self.cmd_step(args, out)?,
                "bits" => self.cmd_bits(args, out)?,
                "auto-bits" => self.cmd_auto_bits(args, out)?,
                "show" => self.cmd_show(out)?,
                "help" => writeln!(out, "{HELP}")?,
                "quit" | "exit" => return Ok(()),
                other => writeln!(out, "unknown command `{other}`; type `help`")?,
            }
        }
    }
}
