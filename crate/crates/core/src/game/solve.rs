//! Zielonka's recursive algorithm (min-parity) and a brute-force oracle.

use std::collections::VecDeque;

use super::{ParityGame, Player, PositionalStrategy};

/// Winning regions and a positional choice for every node owned by its winner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub winner: Vec<Player>,
    pub choice: Vec<Option<u32>>,
}

impl Solution {
    pub fn region(&self, p: Player) -> Vec<bool> {
        self.winner.iter().map(|&w| w == p).collect()
    }

    /// The winning strategy of `p`, defined on `p`'s nodes inside its region.
    pub fn strategy(&self, p: Player) -> PositionalStrategy {
        PositionalStrategy {
            owner: p,
            choice: self
                .winner
                .iter()
                .zip(&self.choice)
                .map(|(&w, &c)| if w == p { c } else { None })
                .collect(),
        }
    }
}

struct Solver<'a> {
    g: &'a ParityGame,
    pred: Vec<Vec<usize>>,
    winner: Vec<Player>,
    choice: Vec<Option<u32>>,
}

impl Solver<'_> {
    /// Attractor of `target` for `p` within `alive`; records `p`'s choices
    /// for attracted nodes. Returns the members in discovery order.
    fn attract(&mut self, p: Player, target: &[usize], alive: &[bool], record: bool) -> Vec<bool> {
        let n = self.g.num_nodes();
        let mut inside = vec![false; n];
        let mut count: Vec<usize> = vec![usize::MAX; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &v in target {
            inside[v] = true;
            queue.push_back(v);
        }
        while let Some(w) = queue.pop_front() {
            for i in 0..self.pred[w].len() {
                let v = self.pred[w][i];
                if !alive[v] || inside[v] {
                    continue;
                }
                if self.g.owner(v) == p {
                    inside[v] = true;
                    if record {
                        self.choice[v] = Some(w as u32);
                    }
                    queue.push_back(v);
                } else {
                    if count[v] == usize::MAX {
                        count[v] = self.g.successors(v).iter().filter(|&&x| alive[x as usize]).count();
                    }
                    count[v] -= 1;
                    if count[v] == 0 {
                        inside[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        inside
    }

    fn solve(&mut self, mut alive: Vec<bool>) {
        let n = self.g.num_nodes();
        loop {
            let members: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
            let Some(d) = members.iter().map(|&v| self.g.color(v)).min() else {
                return;
            };
            let p = Player::of_color(d);
            let o = p.opponent();
            let top: Vec<usize> = members.iter().copied().filter(|&v| self.g.color(v) == d).collect();
            let a = self.attract(p, &top, &alive, false);
            let rest: Vec<bool> = (0..n).map(|v| alive[v] && !a[v]).collect();
            self.solve(rest.clone());
            let opp: Vec<usize> = (0..n).filter(|&v| rest[v] && self.winner[v] == o).collect();
            if opp.is_empty() {
                // p wins everything: attractor moves on A, any stay-inside move on top
                self.attract(p, &top, &alive, true);
                for &v in &top {
                    if self.g.owner(v) == p {
                        let w = self.g.successors(v).iter().copied().find(|&w| alive[w as usize]);
                        self.choice[v] = w;
                    }
                }
                for &v in &members {
                    self.winner[v] = p;
                }
                return;
            }
            let b = self.attract(o, &opp, &alive, true);
            for v in 0..n {
                if b[v] {
                    self.winner[v] = o;
                    alive[v] = false;
                }
            }
        }
    }
}

/// Solves a parity game where the verifier wins plays whose minimal
/// infinitely recurring color is even.
pub fn zielonka_solve(g: &ParityGame) -> Solution {
    let n = g.num_nodes();
    let mut s = Solver {
        g,
        pred: g.predecessors(),
        winner: vec![Player::Verifier; n],
        choice: vec![None; n],
    };
    s.solve(vec![true; n]);
    let choice = (0..n)
        .map(|v| if g.owner(v) == s.winner[v] { s.choice[v] } else { None })
        .collect();
    Solution {
        winner: s.winner,
        choice,
    }
}

/// Winning regions by enumerating every pair of positional strategies.
/// Exponential; meant for games with a handful of nodes.
pub fn brute_force_regions(g: &ParityGame) -> Vec<Player> {
    let n = g.num_nodes();
    let degrees: Vec<usize> = (0..n).map(|v| g.successors(v).len()).collect();
    let owned = |p: Player| -> Vec<usize> { (0..n).filter(|&v| g.owner(v) == p).collect() };
    let (vs, rs) = (owned(Player::Verifier), owned(Player::Refuter));
    let enumerate = |nodes: &[usize]| -> Vec<Vec<usize>> {
        let mut all = vec![vec![0usize; n]];
        for &v in nodes {
            all = all
                .into_iter()
                .flat_map(|c| {
                    (0..degrees[v]).map(move |i| {
                        let mut c = c.clone();
                        c[v] = i;
                        c
                    })
                })
                .collect();
        }
        all
    };
    let sv = enumerate(&vs);
    let sr = enumerate(&rs);
    let mut wins = vec![false; n];
    for a in &sv {
        let mut ok = vec![true; n];
        for b in &sr {
            let next = |v: usize| -> usize {
                let i = if g.owner(v) == Player::Verifier { a[v] } else { b[v] };
                g.successors(v)[i] as usize
            };
            for start in 0..n {
                if !ok[start] {
                    continue;
                }
                // follow the unique play until a node repeats
                let mut pos = vec![usize::MAX; n];
                let mut path = Vec::new();
                let mut v = start;
                while pos[v] == usize::MAX {
                    pos[v] = path.len();
                    path.push(v);
                    v = next(v);
                }
                let m = path[pos[v]..].iter().map(|&u| g.color(u)).min().unwrap();
                if m % 2 == 1 {
                    ok[start] = false;
                }
            }
        }
        for v in 0..n {
            wins[v] |= ok[v];
        }
    }
    wins.into_iter()
        .map(|w| if w { Player::Verifier } else { Player::Refuter })
        .collect()
}
