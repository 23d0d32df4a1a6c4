//! Verification drivers: the plain game, the incremental prophecy search,
//! user-supplied prophecies, and an exact complementation-based oracle.

mod cert;

use std::collections::HashSet;
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::automata::{
    ltl_to_nba, nba_to_dpa, safety_determinize, Dpa, Dsa, Letter, Nba, SafraDeterminizer,
};
use crate::error::{Error, Result};
use crate::game::{
    build_arena_with, product_of, slot_letters, wins_all_init, zielonka_solve, Arena, Player, Solution,
};
use crate::hyperltl::{classify_safety, HyperLtl, SafetyClass};
use crate::model::{augment_with_prophecies, bisim_quotient, StateId, TransitionSystem};
use crate::prophecy::{
    build_family, build_family_dpa, exist_product, matrix_dsa, relaxed_matrix_nba, ProphecyFamily,
    RelaxedStepper,
};

pub use cert::{load_certificate, replay, simulate, write_certificate, Certificate};

/// A system and formula prepared for checking. The system is restricted to
/// the formula's APs and optionally replaced by its bisimulation quotient.
#[derive(Debug, Clone)]
pub struct Problem {
    pub ts: TransitionSystem,
    pub formula: HyperLtl,
    pub k: usize,
    pub l: usize,
    pub matrix_nba: Nba,
    /// Present when the matrix is syntactically safe.
    pub matrix_dsa: Option<Dsa>,
    pub bisim: bool,
    pub system_digest: String,
    pub formula_digest: String,
}

pub fn formula_digest(f: &HyperLtl) -> String {
    hex::encode(Sha256::digest(f.to_string().as_bytes()))
}

impl Problem {
    pub fn new(ts: &TransitionSystem, formula: &HyperLtl, bisim: bool) -> Result<Problem> {
        let restricted = ts.restrict_aps(&formula.aps())?;
        let sys = if bisim { bisim_quotient(&restricted).0 } else { restricted };
        let matrix_nba = ltl_to_nba(&formula.matrix, &formula.vars())?;
        let matrix_dsa = match classify_safety(&formula.matrix) {
            SafetyClass::Safe => Some(matrix_dsa(&matrix_nba)?),
            SafetyClass::NotSyntacticallySafe => None,
        };
        Ok(Problem {
            ts: sys,
            formula: formula.clone(),
            k: formula.k(),
            l: formula.l(),
            matrix_nba,
            matrix_dsa,
            bisim,
            system_digest: ts.digest(),
            formula_digest: formula_digest(formula),
        })
    }

    pub fn is_safe(&self) -> bool {
        self.matrix_dsa.is_some()
    }
}

/// How the game's automaton is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Matrix automaton only, no prophecies.
    Plain,
    /// Safety matrix with safety prophecies, built on demand.
    Relaxed,
    /// Explicit relaxed Büchi automaton, determinized on demand.
    Explicit,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Route::Plain => "plain",
            Route::Relaxed => "relaxed",
            Route::Explicit => "explicit",
        }
    }

    pub fn parse(s: &str) -> Result<Route> {
        match s {
            "plain" => Ok(Route::Plain),
            "relaxed" => Ok(Route::Relaxed),
            "explicit" => Ok(Route::Explicit),
            _ => Err(Error::semantic(format!("unknown route `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOptions {
    /// Largest subset size enumerated before jumping to the full family.
    pub max_subset: usize,
    pub bisim: bool,
    pub reduce: bool,
    /// Limit on game nodes and on lazily built automaton states.
    pub state_cap: usize,
    /// Worker threads; 0 uses rayon's default.
    pub jobs: usize,
    /// Test only the full family.
    pub full: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_subset: 4,
            bisim: false,
            reduce: true,
            state_cap: 2_000_000,
            jobs: 0,
            full: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Verified,
    Violated,
    Unknown,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Verified => "verified",
            Outcome::Violated => "violated",
            Outcome::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stats {
    /// Number of prophecies in the family (#P).
    pub family_size: usize,
    /// Size of the winning subset (MinP).
    pub min_p: Option<usize>,
    /// False when some smaller subset sizes were skipped.
    pub min_p_exact: bool,
    /// Largest prophecy automaton in the winning subset, or in the family.
    pub size_p: usize,
    pub subsets_tried: usize,
    pub game_nodes: usize,
    pub timings: Vec<(String, f64)>,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub outcome: Outcome,
    pub certificate: Option<Certificate>,
    pub stats: Stats,
    pub diagnostics: Vec<String>,
}

/// Copy systems of the game: copy 0 carries the prophecy variables.
pub fn game_copies(p: &Problem, route: Route, family: &ProphecyFamily) -> Result<Vec<TransitionSystem>> {
    let first = match route {
        Route::Plain => p.ts.clone(),
        Route::Relaxed | Route::Explicit => augment_with_prophecies(&p.ts, &family.vars())?,
    };
    let mut copies = vec![first];
    copies.extend(std::iter::repeat_n(p.ts.clone(), p.k + p.l - 1));
    Ok(copies)
}

/// Builds the reachable arena for the given route and family.
pub fn build_game(
    p: &Problem,
    route: Route,
    family: &ProphecyFamily,
    cap: usize,
) -> Result<(Arena, Vec<TransitionSystem>)> {
    if p.k + p.l == 0 {
        return Err(Error::Arity("formula quantifies no traces".into()));
    }
    if family.k != p.k && !family.is_empty() {
        return Err(Error::Arity(format!(
            "prophecies read {} traces but the formula has {} universal variables",
            family.k, p.k
        )));
    }
    let copies = game_copies(p, route, family)?;
    let refs: Vec<&TransitionSystem> = copies.iter().collect();
    let arena = match route {
        Route::Plain => match &p.matrix_dsa {
            Some(d) => build_arena_with(&refs, p.k, &mut d.to_dpa(), cap)?,
            None => build_arena_with(&refs, p.k, &mut nba_to_dpa(&p.matrix_nba, cap)?, cap)?,
        },
        Route::Relaxed => {
            let d = p
                .matrix_dsa
                .as_ref()
                .ok_or_else(|| Error::semantic("the relaxed safety route needs a safety matrix"))?;
            build_arena_with(&refs, p.k, &mut RelaxedStepper::new(d, family, cap)?, cap)?
        }
        Route::Explicit => {
            let nba = relaxed_matrix_nba(&p.matrix_nba, family)?;
            build_arena_with(&refs, p.k, &mut SafraDeterminizer::new(&nba, cap), cap)?
        }
    };
    Ok((arena, copies))
}

struct Attempt {
    subset: Vec<usize>,
    arena: Arena,
    solution: Solution,
    won: bool,
}

fn attempt(p: &Problem, route: Route, family: &ProphecyFamily, subset: &[usize], cap: usize) -> Result<Attempt> {
    let sub = family.select(subset);
    let (arena, _) = build_game(p, route, &sub, cap)?;
    let solution = zielonka_solve(&arena.game);
    let won = wins_all_init(&solution, &arena.init);
    Ok(Attempt {
        subset: subset.to_vec(),
        arena,
        solution,
        won,
    })
}

fn certificate(p: &Problem, route: Route, family: ProphecyFamily, a: &Attempt, min_p: Option<usize>) -> Certificate {
    let owner = if a.won { Player::Verifier } else { Player::Refuter };
    Certificate {
        owner,
        route,
        bisim: p.bisim,
        system_digest: p.system_digest.clone(),
        formula_digest: p.formula_digest.clone(),
        game_digest: a.arena.game.digest(),
        min_p,
        strategy: a.solution.strategy(owner),
        invariant: a.solution.region(owner),
        game: a.arena.game.clone(),
        init: a.arena.init.clone(),
        family,
    }
}

fn elapsed(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

/// Game without prophecies; never reports a violation.
pub fn check_plain(ts: &TransitionSystem, f: &HyperLtl, opts: &CheckOptions) -> Result<Verdict> {
    let t0 = Instant::now();
    let p = Problem::new(ts, f, opts.bisim)?;
    let empty = ProphecyFamily::from_entries(p.k, Vec::new());
    let a = attempt(&p, Route::Plain, &empty, &[], opts.state_cap)?;
    let mut stats = Stats {
        game_nodes: a.arena.game.num_nodes(),
        subsets_tried: 1,
        ..Stats::default()
    };
    stats.timings.push(("solve".into(), elapsed(t0)));
    if a.won {
        stats.min_p = Some(0);
        stats.min_p_exact = true;
        let cert = certificate(&p, Route::Plain, empty, &a, Some(0));
        return Ok(Verdict {
            outcome: Outcome::Verified,
            certificate: Some(cert),
            stats,
            diagnostics: Vec::new(),
        });
    }
    Ok(Verdict {
        outcome: Outcome::Unknown,
        certificate: None,
        stats,
        diagnostics: vec!["the verifier loses the game without prophecies".into()],
    })
}

/// All `r`-element subsets of `0..n` in colexicographic order.
pub fn colex_subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    if r > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut c: Vec<usize> = (0..r).collect();
    loop {
        out.push(c.clone());
        // advance: find the lowest position that can move up without colliding
        let mut i = 0;
        while i < r && (if i + 1 < r { c[i] + 1 == c[i + 1] } else { c[i] + 1 == n }) {
            i += 1;
        }
        if i == r {
            return out;
        }
        c[i] += 1;
        for (j, x) in c.iter_mut().enumerate().take(i) {
            *x = j;
        }
    }
}

fn in_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::semantic(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Incremental prophecy search. Safety matrices use the complete family and
/// can end in a violation once the full family is lost; other matrices use
/// determinized prophecies and end in `Verified` or `Unknown`.
pub fn check_auto(ts: &TransitionSystem, f: &HyperLtl, opts: &CheckOptions) -> Result<Verdict> {
    let t0 = Instant::now();
    let p = Problem::new(ts, f, opts.bisim)?;
    let (family, route) = match (&p.matrix_dsa, p.k) {
        (_, 0) => (ProphecyFamily::from_entries(0, Vec::new()), Route::Plain),
        (Some(d), k) => (build_family(&p.ts, d, k, opts.reduce)?, Route::Relaxed),
        (None, k) => {
            let d = nba_to_dpa(&p.matrix_nba, opts.state_cap)?;
            (build_family_dpa(&p.ts, &d, k, opts.state_cap)?, Route::Explicit)
        }
    };
    let mut stats = Stats {
        family_size: family.len(),
        size_p: family.size_p(),
        ..Stats::default()
    };
    stats.timings.push(("family".into(), elapsed(t0)));
    let n = family.len();
    let sizes: Vec<usize> = if opts.full {
        vec![n]
    } else if n > opts.max_subset {
        (0..=opts.max_subset).chain([n]).collect()
    } else {
        (0..=n).collect()
    };
    let mut full_attempt = None;
    let mut tried_sizes = HashSet::new();
    for &size in &sizes {
        let t = Instant::now();
        let subsets = colex_subsets(n, size);
        stats.subsets_tried += subsets.len();
        let found = in_pool(opts.jobs, || {
            subsets.par_iter().find_map_first(|s| match attempt(&p, route, &family, s, opts.state_cap) {
                Ok(a) if a.won || size == n => Some(Ok(a)),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
        })?;
        stats.timings.push((format!("subsets of size {size}"), elapsed(t)));
        let exact = (0..size).all(|s| tried_sizes.contains(&s));
        tried_sizes.insert(size);
        let Some(a) = found.transpose()? else {
            continue;
        };
        stats.game_nodes = a.arena.game.num_nodes();
        if a.won {
            let sub = family.select(&a.subset);
            stats.min_p = Some(size);
            stats.min_p_exact = exact;
            stats.size_p = sub.size_p();
            let cert = certificate(&p, route, sub, &a, Some(size));
            return Ok(Verdict {
                outcome: Outcome::Verified,
                certificate: Some(cert),
                stats,
                diagnostics: Vec::new(),
            });
        }
        full_attempt = Some(a);
    }
    let a = full_attempt.expect("the full family is always tested");
    if route != Route::Explicit {
        let cert = certificate(&p, route, family, &a, None);
        return Ok(Verdict {
            outcome: Outcome::Violated,
            certificate: Some(cert),
            stats,
            diagnostics: vec!["the refuter wins the game with the complete family".into()],
        });
    }
    Ok(Verdict {
        outcome: Outcome::Unknown,
        certificate: None,
        stats,
        diagnostics: vec!["no subset of the determinized family wins; the matrix is not safety".into()],
    })
}

/// Game with user-supplied prophecies over the universal slots.
pub fn check_manual(
    ts: &TransitionSystem,
    f: &HyperLtl,
    family: &ProphecyFamily,
    opts: &CheckOptions,
) -> Result<Verdict> {
    let t0 = Instant::now();
    let p = Problem::new(ts, f, opts.bisim)?;
    if family.k != p.k {
        return Err(Error::Arity(format!(
            "prophecies read {} traces but the formula has {} universal variables",
            family.k, p.k
        )));
    }
    let all: Vec<usize> = (0..family.len()).collect();
    let a = attempt(&p, Route::Explicit, family, &all, opts.state_cap)?;
    let mut stats = Stats {
        family_size: family.len(),
        size_p: family.size_p(),
        subsets_tried: 1,
        game_nodes: a.arena.game.num_nodes(),
        ..Stats::default()
    };
    stats.timings.push(("solve".into(), elapsed(t0)));
    if a.won {
        stats.min_p = Some(family.len());
        let cert = certificate(&p, Route::Explicit, family.clone(), &a, Some(family.len()));
        return Ok(Verdict {
            outcome: Outcome::Verified,
            certificate: Some(cert),
            stats,
            diagnostics: Vec::new(),
        });
    }
    Ok(Verdict {
        outcome: Outcome::Unknown,
        certificate: None,
        stats,
        diagnostics: vec!["the verifier loses with the given prophecies".into()],
    })
}

/// Exact check for safety matrices: the universal tuples with a witness
/// form a safety language; the system satisfies the formula iff no tuple of
/// its traces leaves it.
pub fn oracle_check(ts: &TransitionSystem, f: &HyperLtl) -> Result<bool> {
    let p = Problem::new(ts, f, false)?;
    let d = p
        .matrix_dsa
        .as_ref()
        .ok_or_else(|| Error::semantic("the oracle needs a syntactically safe matrix"))?;
    let starts: Vec<(Vec<StateId>, usize)> = product_of(&vec![p.ts.initial().to_vec(); p.l])
        .into_iter()
        .map(|s| (s, d.initial()))
        .collect();
    let (mut nba, ids) = exist_product(&p.ts, &d.to_nba(), p.k, &starts)?;
    let mut init = ids;
    init.sort_unstable();
    init.dedup();
    nba.set_initial(init);
    let w = safety_determinize(&nba)?;
    let contrib: Vec<Vec<Letter>> = (0..p.k)
        .map(|i| slot_letters(&p.ts, w.alphabet(), i))
        .collect::<Result<_>>()?;
    let mut seen = HashSet::new();
    let mut stack: Vec<(Vec<StateId>, usize)> = product_of(&vec![p.ts.initial().to_vec(); p.k])
        .into_iter()
        .map(|s| (s, w.initial()))
        .collect();
    if w.is_bad(w.initial()) {
        return Ok(false);
    }
    while let Some((s, q)) = stack.pop() {
        if !seen.insert((s.clone(), q)) {
            continue;
        }
        let letter = s.iter().enumerate().fold(0, |acc, (c, &x)| acc | contrib[c][x]);
        let q2 = w.succ(q, letter);
        if w.is_bad(q2) {
            return Ok(false);
        }
        for t in product_of(&s.iter().map(|&x| p.ts.successors(x).to_vec()).collect::<Vec<_>>()) {
            if !seen.contains(&(t.clone(), q2)) {
                stack.push((t, q2));
            }
        }
    }
    Ok(true)
}

/// Matrix letter of a full state tuple of the original copies.
pub(crate) fn matrix_letter(contrib: &[Vec<Letter>], tuple: &[StateId]) -> Letter {
    tuple.iter().enumerate().fold(0, |acc, (c, &s)| acc | contrib[c][s])
}

/// Matrix parity automaton, for callers that need a deterministic view.
pub fn matrix_dpa(p: &Problem, cap: usize) -> Result<Dpa> {
    match &p.matrix_dsa {
        Some(d) => Ok(d.to_dpa()),
        None => nba_to_dpa(&p.matrix_nba, cap),
    }
}

#[cfg(test)]
mod tests;
