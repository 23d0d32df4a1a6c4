//! The recommendation strategy: move to the first successor whose prophecy
//! bit is set, or to the last successor when none is.

use super::{BitSource, ProphecyFamily};
use crate::automata::{Dsa, Letter};
use crate::error::{Error, Result};
use crate::game::{product_of, slot_letters};
use crate::model::{StateId, TransitionSystem};

/// A game prefix ending before the verifier's move at position `i`:
/// universal tuples and bit vectors for positions `0..=i`, existential
/// tuples for positions `0..i`. Bits are indexed by family entry.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct History {
    pub universal: Vec<Vec<StateId>>,
    pub bits: Vec<Vec<bool>>,
    pub existential: Vec<Vec<StateId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recommendation {
    pub choice: Vec<StateId>,
    /// Matrix state reached on the zipped prefix.
    pub q_hat: usize,
    /// Legal moves, in order.
    pub options: Vec<Vec<StateId>>,
    /// Legal moves whose prophecy bit is set.
    pub candidates: Vec<Vec<StateId>>,
}

/// Matrix state after reading the first `existential.len()` positions.
pub fn prefix_state(ts: &TransitionSystem, matrix: &Dsa, h: &History) -> Result<usize> {
    let al = matrix.alphabet();
    let contrib: Vec<Vec<Letter>> = (0..al.arity()).map(|i| slot_letters(ts, al, i)).collect::<Result<_>>()?;
    let mut q = matrix.initial();
    for (u, e) in h.universal.iter().zip(&h.existential) {
        let letter = u.iter().chain(e).enumerate().fold(0, |acc, (c, &s)| acc | contrib[c][s]);
        q = matrix.succ(q, letter);
    }
    Ok(q)
}

pub fn recommendation_strategy(
    ts: &TransitionSystem,
    family: &ProphecyFamily,
    matrix: &Dsa,
    h: &History,
) -> Result<Recommendation> {
    let k = family.k;
    let m = matrix.alphabet().arity();
    let i = h.existential.len();
    if h.universal.len() != i + 1 || h.bits.len() != i + 1 {
        return Err(Error::semantic("history must end with a universal move"));
    }
    let n = ts.num_states();
    let legal = |t: &[StateId], len: usize| t.len() == len && t.iter().all(|&s| s < n);
    if !h.universal.iter().all(|u| legal(u, k)) || !h.existential.iter().all(|e| legal(e, m - k)) {
        return Err(Error::semantic("history tuples do not match the formula"));
    }
    for (j, u) in h.universal.iter().enumerate() {
        let ok = if j == 0 {
            u.iter().all(|s| ts.initial().contains(s))
        } else {
            u.iter().zip(&h.universal[j - 1]).all(|(&s, &p)| ts.successors(p).contains(&s))
        };
        if !ok {
            return Err(Error::semantic(format!("universal move at position {j} is not a transition")));
        }
    }
    for (j, e) in h.existential.iter().enumerate() {
        let ok = if j == 0 {
            e.iter().all(|s| ts.initial().contains(s))
        } else {
            e.iter().zip(&h.existential[j - 1]).all(|(&s, &p)| ts.successors(p).contains(&s))
        };
        if !ok {
            return Err(Error::semantic(format!("existential move at position {j} is not a transition")));
        }
    }
    let options = if i == 0 {
        product_of(&vec![ts.initial().to_vec(); m - k])
    } else {
        product_of(&h.existential[i - 1].iter().map(|&s| ts.successors(s).to_vec()).collect::<Vec<_>>())
    };
    let q_hat = prefix_state(ts, matrix, h)?;
    let bits = &h.bits[i];
    let candidates: Vec<Vec<StateId>> = options
        .iter()
        .filter(|t| match family.source(q_hat, t) {
            BitSource::Var(j) => bits.get(j).copied().unwrap_or(false),
            BitSource::Always => true,
            BitSource::Never | BitSource::Unread => false,
        })
        .cloned()
        .collect();
    // with no set bit the last option is taken; its bit is never needed
    let choice = candidates.first().unwrap_or(&options[options.len() - 1]).clone();
    Ok(Recommendation {
        choice,
        q_hat,
        options,
        candidates,
    })
}
