mod explain;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyprover::bench::{gen_bench, BenchKind};
use hyprover::checker::{
    check_auto, check_manual, check_plain, load_certificate, oracle_check, replay, write_certificate, CheckOptions,
    Outcome, Problem, Verdict,
};
use hyprover::hyperltl::{parse_hyperltl, HyperLtl};
use hyprover::model::{parse_ts, TransitionSystem};
use hyprover::prophecy::read_family_dir;
use hyprover::Error;

const EXIT_VERIFIED: u8 = 0;
const EXIT_VIOLATED: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(name = "hyprover", version, about = "Prophecy-based model checking for forall*exists* HyperLTL")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a system against a formula.
    Check {
        system: PathBuf,
        formula: PathBuf,
        /// `none`, `auto` or `file:DIR`
        #[arg(long, default_value = "auto")]
        prophecies: String,
        /// Check the bisimulation quotient instead of the system.
        #[arg(long)]
        bisim: bool,
        /// Keep the unreduced prophecy family.
        #[arg(long)]
        no_reduce: bool,
        /// Largest prophecy subset size tried before the full family.
        #[arg(long, default_value_t = 4)]
        max_subset: usize,
        /// Limit on game nodes and automaton states.
        #[arg(long, default_value_t = 2_000_000)]
        state_cap: usize,
        /// Write the certificate to this directory.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Worker threads for subset enumeration; 0 picks a default.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Only try the full prophecy family.
        #[arg(long)]
        full: bool,
    },
    /// Step through a verified certificate interactively.
    Explain {
        cert: PathBuf,
        system: PathBuf,
        formula: PathBuf,
        #[arg(long, default_value_t = 2_000_000)]
        state_cap: usize,
    },
    /// Write a benchmark: running, gni, multiforall, ltlex or lowerbound:N.
    GenBench { kind: String, outdir: PathBuf },
    /// Decide the formula by explicit product search (small inputs only).
    Oracle { system: PathBuf, formula: PathBuf },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load(system: &Path, formula: &Path) -> Result<(TransitionSystem, HyperLtl), Error> {
    let ts = parse_ts(&read(system)?).map_err(|e| in_file(system, e))?;
    let f = parse_hyperltl(&read(formula)?).map_err(|e| in_file(formula, e))?;
    Ok((ts, f))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Syntax { line, column, message } => Error::Syntax {
            line,
            column,
            message: format!("{message} (in {})", path.display()),
        },
        e => e,
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_resource_cap() { EXIT_CAP } else { EXIT_INPUT })
}

fn report(v: &Verdict, out: &mut impl Write) -> io::Result<()> {
    let s = &v.stats;
    writeln!(out, "verdict: {}", v.outcome.as_str())?;
    if let Some(c) = &v.certificate {
        writeln!(out, "route: {}", c.route.as_str())?;
    }
    writeln!(out, "#P: {}", s.family_size)?;
    match s.min_p {
        Some(m) => writeln!(out, "MinP: {m}{}", if s.min_p_exact { "" } else { " (upper bound)" })?,
        None => writeln!(out, "MinP: -")?,
    }
    writeln!(out, "SizeP: {}", s.size_p)?;
    writeln!(out, "subsets tried: {}", s.subsets_tried)?;
    writeln!(out, "game nodes: {}", s.game_nodes)?;
    for d in &v.diagnostics {
        writeln!(out, "note: {d}")?;
    }
    for (phase, secs) in &s.timings {
        writeln!(out, "time {phase}: {secs:.3}s")?;
    }
    Ok(())
}

fn check(
    system: &Path,
    formula: &Path,
    prophecies: &str,
    opts: &CheckOptions,
    cert: Option<&Path>,
) -> Result<Verdict, Error> {
    let (ts, f) = load(system, formula)?;
    let v = match prophecies {
        "none" => check_plain(&ts, &f, opts)?,
        "auto" => check_auto(&ts, &f, opts)?,
        other => match other.strip_prefix("file:") {
            Some(dir) => {
                let family = read_family_dir(Path::new(dir), Some(&ts))?;
                check_manual(&ts, &f, &family, opts)?
            }
            None => {
                return Err(Error::Semantic(format!(
                    "unknown prophecy mode `{other}` (use none, auto or file:DIR)"
                )))
            }
        },
    };
    if let Some(dir) = cert {
        match &v.certificate {
            Some(c) => write_certificate(dir, c, &Problem::new(&ts, &f, opts.bisim)?)?,
            None => eprintln!("note: no certificate for an unknown verdict"),
        }
    }
    Ok(v)
}

fn explain(cert: &Path, system: &Path, formula: &Path, cap: usize) -> Result<(), Error> {
    let (ts, f) = load(system, formula)?;
    let meta = read(&cert.join("meta"))?;
    let bisim = meta.lines().any(|l| l.replace(' ', "") == "bisim:true");
    let p = Problem::new(&ts, &f, bisim)?;
    let c = load_certificate(cert, &p)?;
    if !replay(&c, &p, cap)? {
        return Err(Error::Semantic("the certificate does not replay on these inputs".into()));
    }
    let mut session = explain::Session::new(p, c, cap)?;
    let stdin = io::stdin();
    session.run(stdin.lock(), &mut io::stdout().lock())?;
    Ok(())
}

fn gen(kind: &str, outdir: &Path) -> Result<(), Error> {
    let kind: BenchKind = kind.parse()?;
    let b = gen_bench(kind)?;
    b.write(outdir)?;
    println!("wrote {}", outdir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Check {
            system,
            formula,
            prophecies,
            bisim,
            no_reduce,
            max_subset,
            state_cap,
            cert,
            jobs,
            full,
        } => {
            if state_cap == 0 {
                return fail(&Error::Semantic("--state-cap must be positive".into()));
            }
            let opts = CheckOptions {
                max_subset,
                bisim,
                reduce: !no_reduce,
                state_cap,
                jobs,
                full,
            };
            match check(&system, &formula, &prophecies, &opts, cert.as_deref()) {
                Ok(v) => {
                    let _ = report(&v, &mut io::stdout().lock());
                    ExitCode::from(match v.outcome {
                        Outcome::Verified => EXIT_VERIFIED,
                        Outcome::Violated => EXIT_VIOLATED,
                        Outcome::Unknown => EXIT_UNKNOWN,
                    })
                }
                Err(e) => fail(&e),
            }
        }
        Command::Explain {
            cert,
            system,
            formula,
            state_cap,
        } => match explain(&cert, &system, &formula, state_cap) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Command::GenBench { kind, outdir } => match gen(&kind, &outdir) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(&e),
        },
        Command::Oracle { system, formula } => match load(&system, &formula).and_then(|(ts, f)| oracle_check(&ts, &f)) {
            Ok(holds) => {
                println!("{}", if holds { "holds" } else { "violated" });
                ExitCode::from(if holds { EXIT_VERIFIED } else { EXIT_VIOLATED })
            }
            Err(e) => fail(&e),
        },
    }
}
