//! Certificates on disk, independent replay, and scripted plays.
//!
//! A certificate directory holds `meta`, `strategy`, `invariant`, `game`
//! and `prophecies/`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{build_game, matrix_letter, Problem, Route};
use crate::automata::{lasso_membership, Automaton, Letter};
use crate::error::{Error, Result};
use crate::game::{extract_witness, slot_letters, verify_strategy, ParityGame, Player, PositionalStrategy};
use crate::lasso::{zip, Lasso};
use crate::model::StateId;
use crate::prophecy::{read_family_dir, write_family_dir, Prophecy, ProphecyFamily};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// Verifier for `Verified`, refuter for `Violated`.
    pub owner: Player,
    pub route: Route,
    pub bisim: bool,
    pub system_digest: String,
    pub formula_digest: String,
    pub game_digest: String,
    pub min_p: Option<usize>,
    pub strategy: PositionalStrategy,
    /// Winning region of `owner`.
    pub invariant: Vec<bool>,
    pub game: ParityGame,
    pub init: Vec<usize>,
    pub family: ProphecyFamily,
}

fn owner_str(p: Player) -> &'static str {
    match p {
        Player::Verifier => "verifier",
        Player::Refuter => "refuter",
    }
}

pub fn write_certificate(dir: &Path, cert: &Certificate, p: &Problem) -> Result<()> {
    fs::create_dir_all(dir)?;
    let verdict = match cert.owner {
        Player::Verifier => "verified",
        Player::Refuter => "violated",
    };
    let mut meta = String::new();
    let _ = writeln!(meta, "verdict: {verdict}");
    let _ = writeln!(meta, "owner: {}", owner_str(cert.owner));
    let _ = writeln!(meta, "route: {}", cert.route.as_str());
    let _ = writeln!(meta, "bisim: {}", cert.bisim);
    let _ = writeln!(meta, "system: {}", cert.system_digest);
    let _ = writeln!(meta, "formula: {}", cert.formula_digest);
    let _ = writeln!(meta, "game: {}", cert.game_digest);
    let _ = writeln!(
        meta,
        "min-p: {}",
        cert.min_p.map_or("none".to_string(), |m| m.to_string())
    );
    let init: Vec<String> = cert.init.iter().map(usize::to_string).collect();
    let _ = writeln!(meta, "init: {}", init.join(" "));
    fs::write(dir.join("meta"), meta)?;
    fs::write(dir.join("strategy"), cert.strategy.to_text())?;
    let region: Vec<String> = (0..cert.invariant.len())
        .filter(|&v| cert.invariant[v])
        .map(|v| v.to_string())
        .collect();
    fs::write(
        dir.join("invariant"),
        format!("nodes: {}\n{}\n", cert.invariant.len(), region.join("\n")),
    )?;
    fs::write(dir.join("game"), cert.game.to_text())?;
    let pdir = dir.join("prophecies");
    if pdir.exists() {
        fs::remove_dir_all(&pdir)?;
    }
    write_family_dir(&pdir, &cert.family, &p.ts)
}

fn read(dir: &Path, name: &str) -> Result<String> {
    let path = dir.join(name);
    fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn check_inputs(system: &str, formula: &str, bisim: bool, p: &Problem) -> Result<()> {
    if system != p.system_digest {
        return Err(Error::DigestMismatch("certificate was issued for another system".into()));
    }
    if formula != p.formula_digest {
        return Err(Error::DigestMismatch("certificate was issued for another formula".into()));
    }
    if bisim != p.bisim {
        return Err(Error::DigestMismatch("bisimulation setting differs".into()));
    }
    Ok(())
}

/// Loads a certificate issued for `p`'s inputs; other inputs give a
/// digest mismatch.
pub fn load_certificate(dir: &Path, p: &Problem) -> Result<Certificate> {
    let meta = read(dir, "meta")?;
    let field = |key: &str| -> Result<String> {
        meta.lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(':')))
            .map(|v| v.trim().to_string())
            .ok_or_else(|| Error::semantic(format!("certificate meta lacks `{key}`")))
    };
    let bisim = match field("bisim")?.as_str() {
        "true" => true,
        "false" => false,
        b => return Err(Error::semantic(format!("bad bisim flag `{b}`"))),
    };
    check_inputs(&field("system")?, &field("formula")?, bisim, p)?;
    let owner = match field("owner")?.as_str() {
        "verifier" => Player::Verifier,
        "refuter" => Player::Refuter,
        o => return Err(Error::semantic(format!("unknown owner `{o}`"))),
    };
    let game = ParityGame::from_text(&read(dir, "game")?)?;
    let n = game.num_nodes();
    let strategy = PositionalStrategy::from_text(owner, n, &read(dir, "strategy")?)?;
    let inv_text = read(dir, "invariant")?;
    let mut lines = inv_text.lines();
    let header = lines.next().and_then(|l| l.strip_prefix("nodes:")).map(str::trim);
    if header.and_then(|h| h.parse::<usize>().ok()) != Some(n) {
        return Err(Error::semantic("invariant header does not match the game"));
    }
    let mut invariant = vec![false; n];
    for (i, l) in lines.enumerate() {
        let l = l.trim();
        if l.is_empty() {
            continue;
        }
        let v: usize = l
            .parse()
            .ok()
            .filter(|&v| v < n)
            .ok_or_else(|| Error::syntax(i + 2, 1, "expected a node index"))?;
        invariant[v] = true;
    }
    let init = field("init")?
        .split_whitespace()
        .map(|w| w.parse::<usize>().map_err(|_| Error::semantic("bad init list")))
        .collect::<Result<_>>()?;
    let min_p = match field("min-p")?.as_str() {
        "none" => None,
        m => Some(m.parse().map_err(|_| Error::semantic("bad min-p"))?),
    };
    let pdir = dir.join("prophecies");
    let family = read_family_dir(&pdir, Some(&p.ts))?;
    Ok(Certificate {
        owner,
        route: Route::parse(&field("route")?)?,
        bisim,
        system_digest: field("system")?,
        formula_digest: field("formula")?,
        game_digest: field("game")?,
        min_p,
        strategy,
        invariant,
        game,
        init,
        family,
    })
}

/// Rebuilds the game from `p` and the certificate's prophecies and checks
/// the strategy on it. Input mismatches are errors; a wrong strategy or
/// region gives `Ok(false)`.
pub fn replay(cert: &Certificate, p: &Problem, cap: usize) -> Result<bool> {
    check_inputs(&cert.system_digest, &cert.formula_digest, cert.bisim, p)?;
    let (arena, _) = build_game(p, cert.route, &cert.family, cap)?;
    if arena.game.digest() != cert.game_digest || arena.game != cert.game || arena.init != cert.init {
        return Ok(false);
    }
    if cert.strategy.owner != cert.owner || cert.invariant.len() != arena.game.num_nodes() {
        return Ok(false);
    }
    let covers = match cert.owner {
        Player::Verifier => arena.init.iter().all(|&v| cert.invariant[v]),
        Player::Refuter => arena.init.iter().any(|&v| cert.invariant[v]),
    };
    if !covers {
        return Ok(false);
    }
    Ok(verify_strategy(&arena.game, &cert.strategy, &cert.invariant).unwrap_or(false))
}

/// Plays a verifier certificate against the universal lasso paths
/// `universal` (one per universal copy, in `p`'s system) with truthful
/// prophecy bits, and checks the matrix on the resulting tuple of traces.
pub fn simulate(cert: &Certificate, p: &Problem, universal: &[Lasso<StateId>], cap: usize) -> Result<bool> {
    if cert.owner != Player::Verifier {
        return Err(Error::semantic("only verifier certificates can be simulated"));
    }
    if universal.len() != p.k {
        return Err(Error::Arity(format!("expected {} universal paths", p.k)));
    }
    let (arena, copies) = build_game(p, cert.route, &cert.family, cap)?;
    let zipped = zip(universal)?;
    let nbits = if cert.route == Route::Plain { 0 } else { cert.family.len() };
    let mut bits = vec![0usize; zipped.len()];
    for (j, e) in cert.family.entries.iter().enumerate().take(nbits) {
        let al = e.automaton.alphabet();
        let contrib: Vec<Vec<Letter>> = (0..p.k).map(|c| slot_letters(&p.ts, al, c)).collect::<Result<_>>()?;
        let word = zipped.map(|t| matrix_letter(&contrib, t));
        let aut: Automaton = match &e.automaton {
            Prophecy::Safety(d) => d.clone().into(),
            Prophecy::Parity(d) => d.clone().into(),
        };
        for (i, b) in bits.iter_mut().enumerate() {
            if lasso_membership(&aut, &word.suffix(i))? {
                *b |= 1 << j;
            }
        }
    }
    let tagged: Vec<Vec<StateId>> = (0..zipped.len())
        .map(|i| {
            let mut t = zipped.at(i).clone();
            if let Some(first) = t.first_mut() {
                *first = *first * (1usize << nbits) + bits[i];
            }
            t
        })
        .collect();
    let script = Lasso::new(tagged[..zipped.stem.len()].to_vec(), tagged[zipped.stem.len()..].to_vec())?;
    let refs: Vec<_> = copies.iter().collect();
    let witness = extract_witness(&arena, &refs, &cert.strategy, &script)?;
    let plain = witness.states.map(|t| {
        let mut t = t.clone();
        t[0] >>= nbits;
        t
    });
    match &p.matrix_dsa {
        Some(d) => {
            let contrib: Vec<Vec<Letter>> = (0..p.k + p.l)
                .map(|c| slot_letters(&p.ts, d.alphabet(), c))
                .collect::<Result<_>>()?;
            let word = plain.map(|t| matrix_letter(&contrib, t));
            lasso_membership(&Automaton::Dsa(d.clone()), &word)
        }
        None => {
            let al = p.matrix_nba.alphabet();
            let contrib: Vec<Vec<Letter>> =
                (0..p.k + p.l).map(|c| slot_letters(&p.ts, al, c)).collect::<Result<_>>()?;
            let word = plain.map(|t| matrix_letter(&contrib, t));
            lasso_membership(&Automaton::Nba(p.matrix_nba.clone()), &word)
        }
    }
}
