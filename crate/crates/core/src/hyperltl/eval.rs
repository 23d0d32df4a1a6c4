use super::Ltl;
use crate::automata::Alphabet;
use crate::error::{Error, Result};
use crate::lasso::Lasso;

/// Truth of `f` at position 0 of the zipped lasso `word`, whose letters are
/// encoded over `alphabet` with one slot per entry of `vars`.
///
/// Works directly on the folded positions `0..stem+loop`: `U` is a least
/// and `R`/`W` a greatest fixpoint of the usual one-step unfolding.
pub fn eval(f: &Ltl, word: &Lasso<u64>, alphabet: &Alphabet, vars: &[String]) -> Result<bool> {
    if vars.len() != alphabet.arity() {
        return Err(Error::Arity(format!(
            "{} variables for an alphabet of arity {}",
            vars.len(),
            alphabet.arity()
        )));
    }
    let ctx = Ctx { word, alphabet, vars };
    Ok(ctx.vals(f)?[0])
}

struct Ctx<'a> {
    word: &'a Lasso<u64>,
    alphabet: &'a Alphabet,
    vars: &'a [String],
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.word.len()
    }

    fn fix(&self, a: &[bool], b: &[bool], least: bool) -> Vec<bool> {
        let n = self.n();
        let mut v = vec![!least; n];
        loop {
            let mut changed = false;
            for i in (0..n).rev() {
                let x = b[i] || (a[i] && v[self.word.next_pos(i)]);
                if x != v[i] {
                    v[i] = x;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }

    fn release(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let n = self.n();
        let mut v = vec![true; n];
        loop {
            let mut changed = false;
            for i in (0..n).rev() {
                let x = b[i] && (a[i] || v[self.word.next_pos(i)]);
                if x != v[i] {
                    v[i] = x;
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }

    fn vals(&self, f: &Ltl) -> Result<Vec<bool>> {
        let n = self.n();
        let map2 = |a: &Ltl, b: &Ltl, op: fn(bool, bool) -> bool| -> Result<Vec<bool>> {
            let (x, y) = (self.vals(a)?, self.vals(b)?);
            Ok(x.iter().zip(&y).map(|(&p, &q)| op(p, q)).collect())
        };
        Ok(match f {
            Ltl::True => vec![true; n],
            Ltl::False => vec![false; n],
            Ltl::Atom { ap, var } => {
                let slot = self
                    .vars
                    .iter()
                    .position(|v| v == var)
                    .ok_or_else(|| Error::semantic(format!("unbound trace variable `{var}`")))?;
                let bit = self.alphabet.bit(slot, ap).ok_or_else(|| {
                    Error::Alphabet(format!("`{ap}` is not in the alphabet of `{var}`"))
                })?;
                (0..n).map(|i| self.word.at(i) >> bit & 1 == 1).collect()
            }
            Ltl::Not(a) => self.vals(a)?.into_iter().map(|x| !x).collect(),
            Ltl::And(a, b) => map2(a, b, |p, q| p && q)?,
            Ltl::Or(a, b) => map2(a, b, |p, q| p || q)?,
            Ltl::Implies(a, b) => map2(a, b, |p, q| !p || q)?,
            Ltl::Iff(a, b) => map2(a, b, |p, q| p == q)?,
            Ltl::Next(a) => {
                let x = self.vals(a)?;
                (0..n).map(|i| x[self.word.next_pos(i)]).collect()
            }
            Ltl::Finally(a) => self.fix(&vec![true; n], &self.vals(a)?, true),
            Ltl::Globally(a) => self.release(&vec![false; n], &self.vals(a)?),
            Ltl::Until(a, b) => self.fix(&self.vals(a)?, &self.vals(b)?, true),
            Ltl::WeakUntil(a, b) => self.fix(&self.vals(a)?, &self.vals(b)?, false),
            Ltl::Release(a, b) => self.release(&self.vals(a)?, &self.vals(b)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperltl::parse_ltl;

    fn run(f: &str, stem: &[u64], cycle: &[u64]) -> bool {
        let alphabet = Alphabet::new(vec![vec!["a".into(), "b".into()]]);
        let word = Lasso::new(stem.to_vec(), cycle.to_vec()).unwrap();
        eval(&parse_ltl(f).unwrap(), &word, &alphabet, &["p".into()]).unwrap()
    }

    #[test]
    fn basic_operators() {
        assert!(run("G a_p", &[], &[1]));
        assert!(!run("G a_p", &[0], &[1]));
        assert!(run("F a_p", &[0, 0], &[0, 1]));
        assert!(!run("F b_p", &[1], &[1]));
        assert!(run("GF a_p".replace("GF", "G F").as_str(), &[0], &[0, 1]));
        assert!(!run("F G a_p", &[], &[0, 1]));
        assert!(run("a_p U b_p", &[1, 1], &[2]));
        assert!(!run("a_p U b_p", &[], &[1]));
        assert!(run("a_p W b_p", &[], &[1]));
        assert!(run("b_p R a_p", &[], &[1]));
        assert!(!run("b_p R a_p", &[1], &[0]));
        assert!(run("X a_p", &[0], &[1]));
        assert!(run("X X a_p", &[0], &[0, 1]));
    }
}
