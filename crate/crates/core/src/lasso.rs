//! Ultimately periodic words `stem · cycle^ω`.

use crate::error::{Error, Result};

/// A finite representation of the infinite word `stem · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lasso<L> {
    pub stem: Vec<L>,
    pub cycle: Vec<L>,
}

impl<L: Clone> Lasso<L> {
    pub fn new(stem: Vec<L>, cycle: Vec<L>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::semantic("lasso loop must be nonempty"));
        }
        Ok(Lasso { stem, cycle })
    }

    /// The letter at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> &L {
        if i < self.stem.len() {
            &self.stem[i]
        } else {
            &self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Successor position in the folded index space `0..stem+cycle`.
    pub fn next_pos(&self, i: usize) -> usize {
        if i + 1 < self.stem.len() + self.cycle.len() {
            i + 1
        } else {
            self.stem.len()
        }
    }

    pub fn len(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Re-expresses the same word with the given stem length and a period
    /// that must be a multiple of the current loop length.
    pub fn unfold(&self, stem_len: usize, period: usize) -> Lasso<L> {
        assert!(stem_len >= self.stem.len());
        assert!(period.is_multiple_of(self.cycle.len()));
        let stem = (0..stem_len).map(|i| self.at(i).clone()).collect();
        let cycle = (stem_len..stem_len + period)
            .map(|i| self.at(i).clone())
            .collect();
        Lasso { stem, cycle }
    }

    /// The suffix starting at position `i`.
    pub fn suffix(&self, i: usize) -> Lasso<L> {
        if i <= self.stem.len() {
            Lasso {
                stem: self.stem[i..].to_vec(),
                cycle: self.cycle.clone(),
            }
        } else {
            let off = (i - self.stem.len()) % self.cycle.len();
            let mut cycle = self.cycle[off..].to_vec();
            cycle.extend_from_slice(&self.cycle[..off]);
            Lasso {
                stem: Vec::new(),
                cycle,
            }
        }
    }

    pub fn map<M>(&self, f: impl Fn(&L) -> M) -> Lasso<M> {
        Lasso {
            stem: self.stem.iter().map(&f).collect(),
            cycle: self.cycle.iter().map(&f).collect(),
        }
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Pointwise product of lassos, normalized to the longest stem and the lcm
/// of the loop lengths.
pub fn zip<L: Clone>(traces: &[Lasso<L>]) -> Result<Lasso<Vec<L>>> {
    if traces.is_empty() {
        return Err(Error::Arity("cannot zip an empty list of traces".into()));
    }
    let stem_len = traces.iter().map(|t| t.stem.len()).max().unwrap_or(0);
    let period = traces.iter().fold(1, |acc, t| lcm(acc, t.cycle.len()));
    let unfolded: Vec<_> = traces.iter().map(|t| t.unfold(stem_len, period)).collect();
    let column = |i: usize, part: fn(&Lasso<L>) -> &Vec<L>| -> Vec<L> {
        unfolded.iter().map(|t| part(t)[i].clone()).collect()
    };
    let stem = (0..stem_len).map(|i| column(i, |t| &t.stem)).collect();
    let cycle = (0..period).map(|i| column(i, |t| &t.cycle)).collect();
    Ok(Lasso { stem, cycle })
}

/// Projection of a zipped lasso onto component `i` (0-based).
pub fn project<L: Clone>(t: &Lasso<Vec<L>>, i: usize) -> Result<Lasso<L>> {
    let arity = t.cycle[0].len();
    if i >= arity {
        return Err(Error::Arity(format!(
            "component {i} out of range for arity {arity}"
        )));
    }
    Ok(t.map(|letter| letter[i].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_wraps_into_loop() {
        let t = Lasso::new(vec![1, 2], vec![3, 4, 5]).unwrap();
        let seen: Vec<_> = (0..9).map(|i| *t.at(i)).collect();
        assert_eq!(seen, vec![1, 2, 3, 4, 5, 3, 4, 5, 3]);
    }

    #[test]
    fn zip_single_is_lift() {
        let t = Lasso::new(vec![1], vec![2]).unwrap();
        let z = zip(std::slice::from_ref(&t)).unwrap();
        assert_eq!(z.stem, vec![vec![1]]);
        assert_eq!(project(&z, 0).unwrap(), t);
    }

    #[test]
    fn project_out_of_range() {
        let a = Lasso::new(vec![], vec![0]).unwrap();
        let z = zip(&[a.clone(), a]).unwrap();
        assert!(project(&z, 2).is_err());
        assert!(project(&z, 1).is_ok());
    }

    #[test]
    fn zip_empty_errors() {
        assert!(zip::<u8>(&[]).is_err());
    }

    #[test]
    fn suffix_matches_indexing() {
        let t = Lasso::new(vec![9, 8], vec![1, 2, 3]).unwrap();
        for i in 0..7 {
            let s = t.suffix(i);
            for j in 0..10 {
                assert_eq!(s.at(j), t.at(i + j));
            }
        }
    }

    #[test]
    fn empty_loop_rejected() {
        assert!(Lasso::<u8>::new(vec![1], vec![]).is_err());
    }
}
