//! Benchmark generators: the example systems and the lower-bound family.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::automata::{print_automaton, Alphabet, Dpa};
use crate::error::{Error, Result};
use crate::hyperltl::{parse_hyperltl, HyperLtl};
use crate::model::{parse_ts, TransitionSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchKind {
    Running,
    Gni,
    MultiForall,
    Ltlex,
    /// Branching system with `n` branches; `n` must be a power of two, at least 2.
    LowerBound(usize),
}

impl FromStr for BenchKind {
    type Err = Error;

    /// `running`, `gni`, `multiforall`, `ltlex` or `lowerbound:N`.
    fn from_str(s: &str) -> Result<BenchKind> {
        Ok(match s {
            "running" => BenchKind::Running,
            "gni" => BenchKind::Gni,
            "multiforall" => BenchKind::MultiForall,
            "ltlex" => BenchKind::Ltlex,
            _ => match s.strip_prefix("lowerbound:").or_else(|| s.strip_prefix("lowerbound=")) {
                Some(n) => BenchKind::LowerBound(
                    n.parse()
                        .map_err(|_| Error::semantic(format!("invalid branch count `{n}`")))?,
                ),
                None => return Err(Error::semantic(format!("unknown benchmark `{s}`"))),
            },
        })
    }
}

/// Generated benchmark files as text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bench {
    pub system: String,
    pub formula: String,
    /// `(file name, content)` of a prophecy directory, including `manifest`.
    pub prophecies: Vec<(String, String)>,
}

impl Bench {
    pub fn parse_system(&self) -> Result<TransitionSystem> {
        parse_ts(&self.system)
    }

    pub fn parse_formula(&self) -> Result<HyperLtl> {
        parse_hyperltl(&self.formula)
    }

    /// Writes `system.ts`, `formula.hltl` and, if any, `prophecies/`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("system.ts"), &self.system)?;
        fs::write(dir.join("formula.hltl"), format!("{}\n", self.formula))?;
        if !self.prophecies.is_empty() {
            let p = dir.join("prophecies");
            fs::create_dir_all(&p)?;
            for (name, text) in &self.prophecies {
                fs::write(p.join(name), text)?;
            }
        }
        Ok(())
    }
}

const RUNNING: &str = "\
aps: a
init: s1 s2
state s1 {a}
  -> s1 s2
state s2 {}
  -> s1 s2
";

const GNI: &str = "\
aps: o h
init: s1
state s1 {}
  -> s2 s5
state s2 {}
  -> s3 s4
state s3 {h}
  -> s1
state s4 {o}
  -> s1
state s5 {}
  -> s6 s7
state s6 {}
  -> s1
state s7 {o h}
  -> s1
";

const LTLEX: &str = "\
aps: a b
init: n ya yb yab
state n {}
  -> n ya yb yab
state ya {a}
  -> n ya yb yab
state yb {b}
  -> n ya yb yab
state yab {a b}
  -> n ya yb yab
";

/// "b holds at some even position" on the first trace.
pub fn even_b_dpa() -> Dpa {
    let al = Alphabet::new(vec![vec!["b".into()]]);
    // 0: even position, 1: odd position, 2: seen
    Dpa::new(al, 0, vec![1, 1, 0], vec![1, 2, 0, 0, 2, 2]).expect("well-formed")
}

fn lower_bound(n: usize) -> Result<String> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::semantic(format!("branch count must be a power of two >= 2, got {n}")));
    }
    let m = n.trailing_zeros() as usize;
    let mut out = String::from("aps: a d\ninit: delay init\nstate delay {a d}\n  -> init\nstate init {a}\n  ->");
    for i in 1..=n {
        let _ = write!(out, " b{i}_1");
    }
    out.push('\n');
    for i in 1..=n {
        for j in 1..=m {
            // j-th bit (most significant first) of the (i-1)-th sequence
            let bit = (i - 1) >> (m - j) & 1 == 1;
            let next = if j == m { "end".to_string() } else { format!("b{i}_{}", j + 1) };
            let _ = writeln!(out, "state b{i}_{j} {}\n  -> {next}", if bit { "{a}" } else { "{}" });
        }
    }
    out.push_str("state end {a}\n  -> end\n");
    Ok(out)
}

pub fn gen_bench(kind: BenchKind) -> Result<Bench> {
    let (system, formula, prophecies) = match kind {
        BenchKind::Running => (RUNNING.to_string(), "forall p. exists q. G (a_q <-> X a_p)", vec![]),
        BenchKind::Gni => (
            GNI.to_string(),
            "forall p. forall q. exists r. G (o_p <-> o_r) & G (h_q <-> h_r)",
            vec![],
        ),
        BenchKind::MultiForall => (
            RUNNING.to_string(),
            "forall p. forall q. exists r. a_r <-> G (a_p <-> a_q)",
            vec![],
        ),
        BenchKind::Ltlex => (
            LTLEX.to_string(),
            "forall p. exists q. a_q & G (a_q <-> X !a_q) & (b_q <-> F (b_p & a_q))",
            vec![
                ("manifest".to_string(), "arity: 1\nxi0 xi0.aut\n".to_string()),
                ("xi0.aut".to_string(), print_automaton(&even_b_dpa().into())),
            ],
        ),
        BenchKind::LowerBound(n) => (
            lower_bound(n)?,
            "forall p. exists q. d_p -> (!d_q & X G (a_q <-> X a_p))",
            vec![],
        ),
    };
    Ok(Bench {
        system,
        formula: formula.to_string(),
        prophecies,
    })
}
