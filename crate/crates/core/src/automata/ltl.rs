//! Tableau translation from LTL to Büchi automata.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{ops::reachable_trim, Alphabet, Letter, Nba};
use crate::error::{Error, Result};
use crate::hyperltl::{nnf, Ltl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(u32, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

#[derive(Default)]
struct Table {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
}

impl Table {
    fn intern(&mut self, n: Node) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        self.nodes.push(n);
        self.index.insert(n, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    fn build(&mut self, f: &Ltl, alphabet: &Alphabet, vars: &[String]) -> Result<usize> {
        let node = match f {
            Ltl::True => Node::True,
            Ltl::False => Node::False,
            Ltl::Atom { .. } => Node::Lit(lit_bit(f, alphabet, vars)?, true),
            Ltl::Not(a) => match a.as_ref() {
                Ltl::Atom { .. } => Node::Lit(lit_bit(a, alphabet, vars)?, false),
                _ => return Err(Error::semantic("formula is not in negation normal form")),
            },
            Ltl::And(a, b) => Node::And(self.build(a, alphabet, vars)?, self.build(b, alphabet, vars)?),
            Ltl::Or(a, b) => Node::Or(self.build(a, alphabet, vars)?, self.build(b, alphabet, vars)?),
            Ltl::Next(a) => Node::Next(self.build(a, alphabet, vars)?),
            Ltl::Finally(a) => {
                let t = self.intern(Node::True);
                Node::Until(t, self.build(a, alphabet, vars)?)
            }
            Ltl::Globally(a) => {
                let ff = self.intern(Node::False);
                Node::Release(ff, self.build(a, alphabet, vars)?)
            }
            Ltl::Until(a, b) => Node::Until(self.build(a, alphabet, vars)?, self.build(b, alphabet, vars)?),
            Ltl::Release(a, b) => {
                Node::Release(self.build(a, alphabet, vars)?, self.build(b, alphabet, vars)?)
            }
            // a W b = b R (a | b)
            Ltl::WeakUntil(a, b) => {
                let x = self.build(a, alphabet, vars)?;
                let y = self.build(b, alphabet, vars)?;
                let either = self.intern(Node::Or(x, y));
                Node::Release(y, either)
            }
            Ltl::Implies(..) | Ltl::Iff(..) => {
                return Err(Error::semantic("formula is not in negation normal form"))
            }
        };
        Ok(self.intern(node))
    }
}

fn lit_bit(f: &Ltl, alphabet: &Alphabet, vars: &[String]) -> Result<u32> {
    let Ltl::Atom { ap, var } = f else { unreachable!() };
    let slot = vars
        .iter()
        .position(|v| v == var)
        .ok_or_else(|| Error::semantic(format!("unbound trace variable `{var}`")))?;
    alphabet
        .bit(slot, ap)
        .ok_or_else(|| Error::Alphabet(format!("`{ap}` is not in the alphabet of `{var}`")))
}

/// One way of satisfying an obligation set in the current step.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Cover {
    pos: Letter,
    neg: Letter,
    next: BTreeSet<usize>,
    postponed: BTreeSet<usize>,
}

fn expand(
    table: &Table,
    mut todo: Vec<usize>,
    mut done: BTreeSet<usize>,
    mut cur: Cover,
    out: &mut Vec<Cover>,
) {
    while let Some(id) = todo.pop() {
        if !done.insert(id) {
            continue;
        }
        match table.nodes[id] {
            Node::True => {}
            Node::False => return,
            Node::Lit(bit, positive) => {
                if positive {
                    cur.pos |= 1 << bit;
                } else {
                    cur.neg |= 1 << bit;
                }
                if cur.pos & cur.neg != 0 {
                    return;
                }
            }
            Node::And(a, b) => {
                todo.push(a);
                todo.push(b);
            }
            Node::Or(a, b) => {
                let mut t = todo.clone();
                t.push(a);
                expand(table, t, done.clone(), cur.clone(), out);
                todo.push(b);
            }
            Node::Next(a) => {
                cur.next.insert(a);
            }
            Node::Until(a, b) => {
                let mut t = todo.clone();
                t.push(b);
                expand(table, t, done.clone(), cur.clone(), out);
                todo.push(a);
                cur.next.insert(id);
                cur.postponed.insert(id);
            }
            Node::Release(a, b) => {
                let mut t = todo.clone();
                t.push(a);
                t.push(b);
                expand(table, t, done.clone(), cur.clone(), out);
                todo.push(b);
                cur.next.insert(id);
            }
        }
    }
    out.push(cur);
}

/// Büchi automaton for an LTL matrix over the default alphabet: one slot per
/// variable of `vars`, carrying the APs the formula uses on that variable.
pub fn ltl_to_nba(f: &Ltl, vars: &[String]) -> Result<Nba> {
    let atoms = f.atoms();
    for (_, v) in &atoms {
        if !vars.contains(v) {
            return Err(Error::semantic(format!("unbound trace variable `{v}`")));
        }
    }
    let slots = vars
        .iter()
        .map(|v| atoms.iter().filter(|(_, w)| w == v).map(|(a, _)| a.clone()).collect())
        .collect();
    ltl_to_nba_over(f, vars, &Alphabet::new(slots))
}

/// Büchi automaton for `f` over a given alphabet (slot `i` reads `vars[i]`).
pub fn ltl_to_nba_over(f: &Ltl, vars: &[String], alphabet: &Alphabet) -> Result<Nba> {
    if vars.len() != alphabet.arity() {
        return Err(Error::Arity(format!(
            "{} variables for an alphabet of arity {}",
            vars.len(),
            alphabet.arity()
        )));
    }
    alphabet.check_dense()?;
    let mut table = Table::default();
    let root = table.build(&nnf(f), alphabet, vars)?;
    let untils: Vec<usize> = (0..table.nodes.len())
        .filter(|&i| matches!(table.nodes[i], Node::Until(..)))
        .collect();
    let m = untils.len();

    let mut sets: Vec<BTreeSet<usize>> = Vec::new();
    let mut set_ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut covers: Vec<Option<Vec<Cover>>> = Vec::new();
    let mut intern_set = |s: BTreeSet<usize>, sets: &mut Vec<BTreeSet<usize>>| -> usize {
        if let Some(&i) = set_ids.get(&s) {
            return i;
        }
        sets.push(s.clone());
        set_ids.insert(s, sets.len() - 1);
        sets.len() - 1
    };

    let mut states: Vec<(usize, usize)> = Vec::new();
    let mut state_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<Vec<(Letter, usize)>> = Vec::new();
    let start = intern_set(BTreeSet::from([root]), &mut sets);
    states.push((start, 0));
    state_ids.insert((start, 0), 0);
    edges.push(Vec::new());
    let mut queue = VecDeque::from([0usize]);
    while let Some(sid) = queue.pop_front() {
        let (set, counter) = states[sid];
        while covers.len() <= set {
            covers.push(None);
        }
        if covers[set].is_none() {
            let mut out = Vec::new();
            let todo: Vec<usize> = sets[set].iter().rev().copied().collect();
            let empty = Cover {
                pos: 0,
                neg: 0,
                next: BTreeSet::new(),
                postponed: BTreeSet::new(),
            };
            expand(&table, todo, BTreeSet::new(), empty, &mut out);
            out.sort();
            out.dedup();
            covers[set] = Some(out);
        }
        let set_covers = covers[set].clone().unwrap_or_default();
        for c in &set_covers {
            let mut ctr = if counter == m { 0 } else { counter };
            while ctr < m && !c.postponed.contains(&untils[ctr]) {
                ctr += 1;
            }
            let next_set = intern_set(c.next.clone(), &mut sets);
            let key = (next_set, ctr);
            let target = match state_ids.get(&key) {
                Some(&t) => t,
                None => {
                    states.push(key);
                    edges.push(Vec::new());
                    state_ids.insert(key, states.len() - 1);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                }
            };
            for letter in alphabet.letters() {
                if letter & c.pos == c.pos && letter & c.neg == 0 {
                    edges[sid].push((letter, target));
                }
            }
        }
    }

    let mut nba = Nba::new(alphabet.clone(), states.len());
    nba.add_initial(0);
    for (sid, &(_, counter)) in states.iter().enumerate() {
        nba.set_accepting(sid, counter == m);
        for &(l, t) in &edges[sid] {
            nba.add_transition(sid, l, t);
        }
    }
    nba.finish();
    Ok(reachable_trim(&nba))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::lasso_membership;
    use crate::hyperltl::{eval, parse_ltl};
    use crate::lasso::Lasso;

    fn vars(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn globally_atom_is_one_state() {
        let nba = ltl_to_nba(&parse_ltl("G a_p").unwrap(), &vars(&["p"])).unwrap();
        assert_eq!(nba.num_states(), 1);
        assert_eq!(nba.transitions(0), &[(1, 0)]);
        assert!(nba.is_accepting(0));
    }

    #[test]
    fn running_example_matrix() {
        let f = parse_ltl("G (a_q <-> X a_p)").unwrap();
        let v = vars(&["p", "q"]);
        let nba = ltl_to_nba(&f, &v).unwrap();
        let al = nba.alphabet().clone();
        // t = {a}^ω, t' = ∅^ω violates
        let bad = Lasso::new(vec![], vec![al.compose(&[1, 0])]).unwrap();
        assert!(!lasso_membership(&nba.clone().into(), &bad).unwrap());
        // t' shifted copy of t
        let good = Lasso::new(vec![al.compose(&[0, 1])], vec![al.compose(&[1, 1])]).unwrap();
        assert!(lasso_membership(&nba.into(), &good).unwrap());
    }

    #[test]
    fn agrees_with_evaluator_on_fixed_formulas() {
        let v = vars(&["p"]);
        for s in ["a_p U b_p", "G F a_p", "F G !b_p", "a_p W b_p", "b_p R a_p", "X (a_p U (b_p & X a_p))", "F a_p & F b_p & G (a_p -> X !a_p)"] {
            let f = parse_ltl(s).unwrap();
            let al = Alphabet::new(vec![vec!["a".into(), "b".into()]]);
            let nba = ltl_to_nba_over(&f, &v, &al).unwrap().into();
            for stem_len in 0..3 {
                for loop_len in 1..3 {
                    let total = stem_len + loop_len;
                    for code in 0..(1u64 << (2 * total)) {
                        let letters: Vec<u64> = (0..total).map(|i| code >> (2 * i) & 3).collect();
                        let w = Lasso::new(letters[..stem_len].to_vec(), letters[stem_len..].to_vec()).unwrap();
                        assert_eq!(
                            lasso_membership(&nba, &w).unwrap(),
                            eval(&f, &w, &al, &v).unwrap(),
                            "{s} on {w:?}"
                        );
                    }
                }
            }
        }
    }
}
