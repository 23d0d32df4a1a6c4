//! HyperLTL syntax: formulas, parsing, negation normal form, syntactic
//! safety and the relaxed-matrix descriptor used with prophecies.

mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub use eval::eval;
pub use parse::{parse_hyperltl, parse_ltl};

/// LTL over indexed atoms `a_π`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ltl {
    True,
    False,
    Atom { ap: String, var: String },
    Not(Box<Ltl>),
    And(Box<Ltl>, Box<Ltl>),
    Or(Box<Ltl>, Box<Ltl>),
    Implies(Box<Ltl>, Box<Ltl>),
    Iff(Box<Ltl>, Box<Ltl>),
    Next(Box<Ltl>),
    Finally(Box<Ltl>),
    Globally(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
    WeakUntil(Box<Ltl>, Box<Ltl>),
    Release(Box<Ltl>, Box<Ltl>),
}

#[allow(clippy::should_implement_trait)]
impl Ltl {
    pub fn atom(ap: &str, var: &str) -> Ltl {
        Ltl::Atom {
            ap: ap.to_string(),
            var: var.to_string(),
        }
    }
    pub fn not(f: Ltl) -> Ltl {
        Ltl::Not(Box::new(f))
    }
    pub fn and(a: Ltl, b: Ltl) -> Ltl {
        Ltl::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Iff(Box::new(a), Box::new(b))
    }
    pub fn next(f: Ltl) -> Ltl {
        Ltl::Next(Box::new(f))
    }
    pub fn finally(f: Ltl) -> Ltl {
        Ltl::Finally(Box::new(f))
    }
    pub fn globally(f: Ltl) -> Ltl {
        Ltl::Globally(Box::new(f))
    }
    pub fn until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Until(Box::new(a), Box::new(b))
    }
    pub fn weak_until(a: Ltl, b: Ltl) -> Ltl {
        Ltl::WeakUntil(Box::new(a), Box::new(b))
    }
    pub fn release(a: Ltl, b: Ltl) -> Ltl {
        Ltl::Release(Box::new(a), Box::new(b))
    }

    /// Conjunction of a list (`true` when empty).
    pub fn conj(fs: impl IntoIterator<Item = Ltl>) -> Ltl {
        fs.into_iter()
            .reduce(Ltl::and)
            .unwrap_or(Ltl::True)
    }

    /// Disjunction of a list (`false` when empty).
    pub fn disj(fs: impl IntoIterator<Item = Ltl>) -> Ltl {
        fs.into_iter().reduce(Ltl::or).unwrap_or(Ltl::False)
    }

    /// Immediate subformulas.
    pub fn children(&self) -> Vec<&Ltl> {
        match self {
            Ltl::True | Ltl::False | Ltl::Atom { .. } => vec![],
            Ltl::Not(a) | Ltl::Next(a) | Ltl::Finally(a) | Ltl::Globally(a) => vec![a],
            Ltl::And(a, b)
            | Ltl::Or(a, b)
            | Ltl::Implies(a, b)
            | Ltl::Iff(a, b)
            | Ltl::Until(a, b)
            | Ltl::WeakUntil(a, b)
            | Ltl::Release(a, b) => vec![a, b],
        }
    }

    /// All `(ap, var)` pairs occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<(String, String)>) {
        if let Ltl::Atom { ap, var } = self {
            out.insert((ap.clone(), var.clone()));
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Ltl::True | Ltl::False | Ltl::Atom { .. })
    }
}

fn fmt_operand(f: &Ltl, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if f.is_atomic() || matches!(f, Ltl::Not(_) | Ltl::Next(_) | Ltl::Finally(_) | Ltl::Globally(_)) {
        write!(out, "{f}")
    } else {
        write!(out, "({f})")
    }
}

impl fmt::Display for Ltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Ltl, op: &str, b: &Ltl| {
            fmt_operand(a, f)?;
            write!(f, " {op} ")?;
            fmt_operand(b, f)
        };
        let unary = |f: &mut fmt::Formatter<'_>, op: &str, a: &Ltl| {
            write!(f, "{op}")?;
            fmt_operand(a, f)
        };
        match self {
            Ltl::True => write!(f, "true"),
            Ltl::False => write!(f, "false"),
            Ltl::Atom { ap, var } => write!(f, "{ap}_{var}"),
            Ltl::Not(a) => unary(f, "!", a),
            Ltl::Next(a) => unary(f, "X ", a),
            Ltl::Finally(a) => unary(f, "F ", a),
            Ltl::Globally(a) => unary(f, "G ", a),
            Ltl::And(a, b) => binary(f, a, "&", b),
            Ltl::Or(a, b) => binary(f, a, "|", b),
            Ltl::Implies(a, b) => binary(f, a, "->", b),
            Ltl::Iff(a, b) => binary(f, a, "<->", b),
            Ltl::Until(a, b) => binary(f, a, "U", b),
            Ltl::WeakUntil(a, b) => binary(f, a, "W", b),
            Ltl::Release(a, b) => binary(f, a, "R", b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// `∀π1…πk. ∃πk+1…πk+l. φ`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperLtl {
    pub prefix: Vec<(Quantifier, String)>,
    pub matrix: Ltl,
}

impl HyperLtl {
    /// Validates closedness, distinct variables and the `∀*∃*` shape.
    pub fn new(prefix: Vec<(Quantifier, String)>, matrix: Ltl) -> Result<HyperLtl> {
        let mut seen_exists = false;
        for (i, (q, v)) in prefix.iter().enumerate() {
            if prefix[..i].iter().any(|(_, w)| w == v) {
                return Err(Error::semantic(format!("trace variable `{v}` quantified twice")));
            }
            match q {
                Quantifier::Exists => seen_exists = true,
                Quantifier::Forall if seen_exists => {
                    return Err(Error::semantic(
                        "quantifier prefix must have the shape forall* exists*",
                    ))
                }
                Quantifier::Forall => {}
            }
        }
        for (_, var) in matrix.atoms() {
            if !prefix.iter().any(|(_, v)| *v == var) {
                return Err(Error::semantic(format!("unbound trace variable `{var}`")));
            }
        }
        Ok(HyperLtl { prefix, matrix })
    }

    /// Number of universally quantified variables.
    pub fn k(&self) -> usize {
        self.prefix.iter().filter(|(q, _)| *q == Quantifier::Forall).count()
    }

    /// Number of existentially quantified variables.
    pub fn l(&self) -> usize {
        self.prefix.len() - self.k()
    }

    /// Trace variables in quantification order.
    pub fn vars(&self) -> Vec<String> {
        self.prefix.iter().map(|(_, v)| v.clone()).collect()
    }

    /// APs used on each variable, sorted, in quantification order.
    pub fn aps_per_var(&self) -> Vec<Vec<String>> {
        let atoms = self.matrix.atoms();
        self.prefix
            .iter()
            .map(|(_, v)| {
                atoms
                    .iter()
                    .filter(|(_, w)| w == v)
                    .map(|(a, _)| a.clone())
                    .collect()
            })
            .collect()
    }

    /// All APs used anywhere in the matrix, sorted.
    pub fn aps(&self) -> Vec<String> {
        let set: BTreeSet<String> = self.matrix.atoms().into_iter().map(|(a, _)| a).collect();
        set.into_iter().collect()
    }

    pub fn with_matrix(&self, matrix: Ltl) -> HyperLtl {
        HyperLtl {
            prefix: self.prefix.clone(),
            matrix,
        }
    }
}

impl fmt::Display for HyperLtl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, v) in &self.prefix {
            match q {
                Quantifier::Forall => write!(f, "forall {v}. ")?,
                Quantifier::Exists => write!(f, "exists {v}. ")?,
            }
        }
        write!(f, "{}", self.matrix)
    }
}

/// Negation normal form: negation only on atoms, `->`/`<->` expanded,
/// `X U R F G W` kept.
pub fn nnf(f: &Ltl) -> Ltl {
    to_nnf(f, false)
}

fn to_nnf(f: &Ltl, neg: bool) -> Ltl {
    use Ltl::*;
    let p = |g: &Ltl| to_nnf(g, neg);
    match (f, neg) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Atom { .. }, false) => f.clone(),
        (Atom { .. }, true) => Ltl::not(f.clone()),
        (Not(a), _) => to_nnf(a, !neg),
        (And(a, b), false) | (Or(a, b), true) => Ltl::and(p(a), p(b)),
        (Or(a, b), false) | (And(a, b), true) => Ltl::or(p(a), p(b)),
        (Implies(a, b), false) => Ltl::or(to_nnf(a, true), to_nnf(b, false)),
        (Implies(a, b), true) => Ltl::and(to_nnf(a, false), to_nnf(b, true)),
        (Iff(a, b), false) => Ltl::or(
            Ltl::and(to_nnf(a, false), to_nnf(b, false)),
            Ltl::and(to_nnf(a, true), to_nnf(b, true)),
        ),
        (Iff(a, b), true) => Ltl::or(
            Ltl::and(to_nnf(a, false), to_nnf(b, true)),
            Ltl::and(to_nnf(a, true), to_nnf(b, false)),
        ),
        (Next(a), _) => Ltl::next(p(a)),
        (Finally(a), false) | (Globally(a), true) => Ltl::finally(p(a)),
        (Globally(a), false) | (Finally(a), true) => Ltl::globally(p(a)),
        (Until(a, b), false) => Ltl::until(p(a), p(b)),
        (Until(a, b), true) => Ltl::release(p(a), p(b)),
        (Release(a, b), false) => Ltl::release(p(a), p(b)),
        (Release(a, b), true) => Ltl::until(p(a), p(b)),
        (WeakUntil(a, b), false) => Ltl::weak_until(p(a), p(b)),
        // !(a W b) = !b U (!a & !b)
        (WeakUntil(a, b), true) => Ltl::until(p(b), Ltl::and(p(a), p(b))),
    }
}

/// Result of the syntactic safety test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SafetyClass {
    Safe,
    NotSyntacticallySafe,
}

/// `Safe` iff the NNF uses no `U` and no `F`.
pub fn classify_safety(f: &Ltl) -> SafetyClass {
    fn has_liveness(f: &Ltl) -> bool {
        matches!(f, Ltl::Until(..) | Ltl::Finally(_)) || f.children().into_iter().any(has_liveness)
    }
    if has_liveness(&nnf(f)) {
        SafetyClass::NotSyntacticallySafe
    } else {
        SafetyClass::Safe
    }
}

/// One prophecy variable bound to an automaton over the `k` universal slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub pvar: String,
    pub arity: usize,
}

/// Descriptor of `[G ⋀_j (p_j on π1 ↔ ξ_j)] → φ`. The automata `ξ_j` live
/// with the caller; `bindings[j]` names the bit that reads them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedMatrixSpec {
    pub matrix: Ltl,
    pub bindings: Vec<Binding>,
    pub carrier: String,
}

/// Builds the relaxed formula descriptor. Prophecy bits are carried on the
/// first universal variable.
pub fn relax(f: &HyperLtl, bindings: &[Binding]) -> Result<(HyperLtl, RelaxedMatrixSpec)> {
    let k = f.k();
    let used = f.aps();
    for (j, b) in bindings.iter().enumerate() {
        if !crate::model::is_identifier(&b.pvar) {
            return Err(Error::semantic(format!("invalid prophecy variable `{}`", b.pvar)));
        }
        if used.contains(&b.pvar) || bindings[..j].iter().any(|c| c.pvar == b.pvar) {
            return Err(Error::semantic(format!("prophecy variable `{}` clashes", b.pvar)));
        }
        if b.arity != k {
            return Err(Error::Arity(format!(
                "prophecy `{}` reads {} traces but the formula has {k} universal variables",
                b.pvar, b.arity
            )));
        }
    }
    if k == 0 && !bindings.is_empty() {
        return Err(Error::Arity("prophecies need a universal variable".into()));
    }
    let carrier = f.prefix.first().map(|(_, v)| v.clone()).unwrap_or_default();
    let spec = RelaxedMatrixSpec {
        matrix: f.matrix.clone(),
        bindings: bindings.to_vec(),
        carrier,
    };
    Ok((f.clone(), spec))
}
