//! The verification parity game between a refuter (universal copies) and a
//! verifier (existential copies), tracked by a deterministic matrix automaton.

mod solve;

use std::collections::HashMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::automata::{Alphabet, Dpa, Letter, ParityStepper};
use crate::error::{Error, Result};
use crate::graph;
use crate::lasso::Lasso;
use crate::model::{LassoTrace, StateId, TransitionSystem};

pub use solve::{brute_force_regions, zielonka_solve, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Verifier,
    Refuter,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Verifier => Player::Refuter,
            Player::Refuter => Player::Verifier,
        }
    }

    /// The player who wins when this color is the minimal one seen infinitely often.
    pub fn of_color(c: u32) -> Player {
        if c.is_multiple_of(2) {
            Player::Verifier
        } else {
            Player::Refuter
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Turn {
    Forall,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GameNode {
    Init(Vec<StateId>),
    Step {
        states: Vec<StateId>,
        q: usize,
        turn: Turn,
    },
}

/// A finite parity game with min-even winning condition for the verifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityGame {
    owner: Vec<Player>,
    color: Vec<u32>,
    succ: Vec<Vec<u32>>,
}

impl ParityGame {
    /// Checks totality and edge targets.
    pub fn new(owner: Vec<Player>, color: Vec<u32>, succ: Vec<Vec<u32>>) -> Result<ParityGame> {
        let n = owner.len();
        if color.len() != n || succ.len() != n {
            return Err(Error::semantic("game tables have different lengths"));
        }
        for (v, s) in succ.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::semantic(format!("game node {v} has no successor")));
            }
            if s.iter().any(|&w| w as usize >= n) {
                return Err(Error::semantic(format!("game node {v} has an edge out of range")));
            }
        }
        Ok(ParityGame { owner, color, succ })
    }

    pub fn num_nodes(&self) -> usize {
        self.owner.len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn owner(&self, v: usize) -> Player {
        self.owner[v]
    }

    pub fn color(&self, v: usize) -> u32 {
        self.color[v]
    }

    pub fn successors(&self, v: usize) -> &[u32] {
        &self.succ[v]
    }

    pub fn max_color(&self) -> u32 {
        self.color.iter().copied().max().unwrap_or(0)
    }

    fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut pred = vec![Vec::new(); self.num_nodes()];
        for v in 0..self.num_nodes() {
            for &w in &self.succ[v] {
                pred[w as usize].push(v);
            }
        }
        pred
    }

    /// Text form: one `v owner color : succ…` line per node.
    pub fn to_text(&self) -> String {
        let mut out = format!("nodes: {}\n", self.num_nodes());
        for v in 0..self.num_nodes() {
            let o = match self.owner[v] {
                Player::Verifier => 'V',
                Player::Refuter => 'R',
            };
            let succ: Vec<String> = self.succ[v].iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{v} {o} {} : {}", self.color[v], succ.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<ParityGame> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| Error::syntax(1, 1, "empty game"))?;
        let n: usize = first
            .strip_prefix("nodes:")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::syntax(1, 1, "expected `nodes: N`"))?;
        let mut owner = Vec::with_capacity(n);
        let mut color = Vec::with_capacity(n);
        let mut succ = Vec::with_capacity(n);
        for (i, line) in lines {
            let bad = || Error::syntax(i + 1, 1, "expected `v owner color : succ...`");
            let (head, tail) = line.split_once(':').ok_or_else(bad)?;
            let h: Vec<&str> = head.split_whitespace().collect();
            if h.len() != 3 || h[0].parse::<usize>().ok() != Some(owner.len()) {
                return Err(bad());
            }
            owner.push(match h[1] {
                "V" => Player::Verifier,
                "R" => Player::Refuter,
                _ => return Err(bad()),
            });
            color.push(h[2].parse().map_err(|_| bad())?);
            succ.push(
                tail.split_whitespace()
                    .map(|w| w.parse().map_err(|_| bad()))
                    .collect::<Result<Vec<u32>>>()?,
            );
        }
        if owner.len() != n {
            return Err(Error::semantic("node count does not match the header"));
        }
        ParityGame::new(owner, color, succ)
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }
}

/// Positional strategy of one player: `choice[v]` for owned nodes of its domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositionalStrategy {
    pub owner: Player,
    pub choice: Vec<Option<u32>>,
}

impl PositionalStrategy {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, c) in self.choice.iter().enumerate() {
            if let Some(w) = c {
                let _ = writeln!(out, "{v} -> {w}");
            }
        }
        out
    }

    pub fn from_text(owner: Player, n: usize, text: &str) -> Result<PositionalStrategy> {
        let mut choice = vec![None; n];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::syntax(i + 1, 1, "expected `v -> w`");
            let (a, b) = line.split_once("->").ok_or_else(bad)?;
            let v: usize = a.trim().parse().map_err(|_| bad())?;
            let w: u32 = b.trim().parse().map_err(|_| bad())?;
            if v >= n {
                return Err(Error::syntax(i + 1, 1, "node out of range"));
            }
            choice[v] = Some(w);
        }
        Ok(PositionalStrategy { owner, choice })
    }
}

/// The game built from a system self-composition and a matrix automaton.
#[derive(Debug, Clone)]
pub struct Arena {
    pub game: ParityGame,
    pub nodes: Vec<GameNode>,
    pub init: Vec<usize>,
    pub k: usize,
    pub l: usize,
    ids: HashMap<GameNode, usize>,
}

impl Arena {
    pub fn find(&self, node: &GameNode) -> Option<usize> {
        self.ids.get(node).copied()
    }
}

/// Letter bits contributed by each state of `ts` when it fills `slot`,
/// matched by AP name.
pub fn slot_letters(ts: &TransitionSystem, al: &Alphabet, slot: usize) -> Result<Vec<Letter>> {
    let map: Vec<(usize, u32)> = al
        .slot(slot)
        .iter()
        .zip(al.slot_bits(slot))
        .map(|(ap, &b)| {
            ts.ap_index(ap)
                .map(|j| (j, b))
                .ok_or_else(|| Error::Alphabet(format!("the system has no AP `{ap}` (slot {slot})")))
        })
        .collect::<Result<_>>()?;
    Ok(ts
        .states()
        .map(|s| {
            let lab = ts.label(s);
            map.iter()
                .filter(|(j, _)| lab >> j & 1 == 1)
                .fold(0, |acc, &(_, b)| acc | 1 << b)
        })
        .collect())
}

/// Builds the reachable arena for `ts` used by all `k + l` copies.
pub fn build_arena(ts: &TransitionSystem, k: usize, l: usize, dpa: &Dpa) -> Result<Arena> {
    let copies = vec![ts; k + l];
    let mut d = dpa.clone();
    build_arena_with(&copies, k, &mut d, usize::MAX)
}

/// Builds the reachable arena where copy `i` moves in `copies[i]`; the first
/// `k` copies are universal. The matrix automaton may be built lazily.
pub fn build_arena_with<S: ParityStepper>(
    copies: &[&TransitionSystem],
    k: usize,
    dpa: &mut S,
    cap: usize,
) -> Result<Arena> {
    let m = copies.len();
    if dpa.alphabet().arity() != m || k > m {
        return Err(Error::Arity(format!(
            "matrix automaton reads {} traces, game has {m} copies ({k} universal)",
            dpa.alphabet().arity()
        )));
    }
    let l = m - k;
    let contrib = (0..m)
        .map(|i| slot_letters(copies[i], dpa.alphabet(), i))
        .collect::<Result<Vec<_>>>()?;
    let q0 = dpa.initial()?;
    let mut nodes: Vec<GameNode> = Vec::new();
    let mut ids: HashMap<GameNode, usize> = HashMap::new();
    let mut succ: Vec<Vec<u32>> = Vec::new();
    let mut intern = |node: GameNode, nodes: &mut Vec<GameNode>, succ: &mut Vec<Vec<u32>>| -> Result<usize> {
        if let Some(&i) = ids.get(&node) {
            return Ok(i);
        }
        if nodes.len() >= cap {
            return Err(Error::cap("game nodes", cap));
        }
        ids.insert(node.clone(), nodes.len());
        nodes.push(node);
        succ.push(Vec::new());
        Ok(nodes.len() - 1)
    };
    let mut init = Vec::new();
    for tuple in product_of(&(0..k).map(|i| copies[i].initial().to_vec()).collect::<Vec<_>>()) {
        init.push(intern(GameNode::Init(tuple), &mut nodes, &mut succ)?);
    }
    let mut i = 0;
    while i < nodes.len() {
        let targets: Vec<GameNode> = match &nodes[i] {
            GameNode::Init(univ) => {
                let choices: Vec<Vec<StateId>> = (k..m).map(|c| copies[c].initial().to_vec()).collect();
                product_of(&choices)
                    .into_iter()
                    .map(|ex| {
                        let mut states = univ.clone();
                        states.extend(ex);
                        GameNode::Step {
                            states,
                            q: q0,
                            turn: Turn::Forall,
                        }
                    })
                    .collect()
            }
            GameNode::Step {
                states,
                q,
                turn: Turn::Forall,
            } => {
                let letter = (0..m).fold(0, |acc, c| acc | contrib[c][states[c]]);
                let q2 = dpa.step(*q, letter)?;
                let choices: Vec<Vec<StateId>> =
                    (0..k).map(|c| copies[c].successors(states[c]).to_vec()).collect();
                product_of(&choices)
                    .into_iter()
                    .map(|mut u| {
                        u.extend_from_slice(&states[k..]);
                        GameNode::Step {
                            states: u,
                            q: q2,
                            turn: Turn::Exists,
                        }
                    })
                    .collect()
            }
            GameNode::Step {
                states,
                q,
                turn: Turn::Exists,
            } => {
                let choices: Vec<Vec<StateId>> =
                    (k..m).map(|c| copies[c].successors(states[c]).to_vec()).collect();
                product_of(&choices)
                    .into_iter()
                    .map(|ex| {
                        let mut s = states[..k].to_vec();
                        s.extend(ex);
                        GameNode::Step {
                            states: s,
                            q: *q,
                            turn: Turn::Forall,
                        }
                    })
                    .collect()
            }
        };
        let mut out = Vec::with_capacity(targets.len());
        for t in targets {
            out.push(intern(t, &mut nodes, &mut succ)? as u32);
        }
        out.sort_unstable();
        out.dedup();
        succ[i] = out;
        i += 1;
    }
    let step_colors: Vec<u32> = nodes
        .iter()
        .filter_map(|n| match n {
            GameNode::Step { q, .. } => Some(dpa.color(*q)),
            GameNode::Init(_) => None,
        })
        .collect();
    let max = step_colors.iter().copied().max().unwrap_or(0);
    let owner = nodes
        .iter()
        .map(|n| match n {
            GameNode::Step {
                turn: Turn::Forall, ..
            } => Player::Refuter,
            _ => Player::Verifier,
        })
        .collect();
    let color = nodes
        .iter()
        .map(|n| match n {
            GameNode::Step { q, .. } => dpa.color(*q),
            GameNode::Init(_) => max,
        })
        .collect();
    let game = ParityGame::new(owner, color, succ)?;
    Ok(Arena {
        game,
        nodes,
        init,
        k,
        l,
        ids,
    })
}

/// Cartesian product in lexicographic order; one empty tuple for no factors.
pub(crate) fn product_of(choices: &[Vec<StateId>]) -> Vec<Vec<StateId>> {
    let mut out = vec![Vec::new()];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|p| {
                c.iter().map(move |&x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

/// Exact check that `sigma` wins for its owner from every node of `region`:
/// the region is closed under the opponent's moves and `sigma`, and no cycle
/// inside it has a minimal color of the opponent's parity.
pub fn verify_strategy(g: &ParityGame, sigma: &PositionalStrategy, region: &[bool]) -> Result<bool> {
    let n = g.num_nodes();
    if region.len() != n || sigma.choice.len() != n {
        return Err(Error::semantic("strategy or region does not match the game"));
    }
    let me = sigma.owner;
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| region[v]) {
        if g.owner(v) == me {
            let w = sigma.choice[v]
                .ok_or_else(|| Error::semantic(format!("strategy undefined at node {v}")))?;
            if !g.successors(v).contains(&w) {
                return Err(Error::semantic(format!("strategy moves {v} -> {w} along no edge")));
            }
            edges[v].push(w as usize);
        } else {
            edges[v].extend(g.successors(v).iter().map(|&w| w as usize));
        }
        if edges[v].iter().any(|&w| !region[w]) {
            return Ok(false);
        }
    }
    let mut colors: Vec<u32> = (0..n).filter(|&v| region[v]).map(|v| g.color(v)).collect();
    colors.sort_unstable();
    colors.dedup();
    for &c in colors.iter().filter(|&&c| Player::of_color(c) != me) {
        let alive: Vec<bool> = (0..n).map(|v| region[v] && g.color(v) >= c).collect();
        let cyc = graph::cyclic_nodes(n, &alive, |v| edges[v].iter().copied());
        if (0..n).any(|v| cyc[v] && g.color(v) == c) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether the verifier wins from every initial node.
pub fn wins_all_init(sol: &Solution, init: &[usize]) -> bool {
    init.iter().all(|&v| sol.winner[v] == Player::Verifier)
}

/// Existential traces produced by a verifier strategy against a scripted refuter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Full `k + l` state tuple per position.
    pub states: Lasso<Vec<StateId>>,
    /// Label traces of the existential copies.
    pub traces: Vec<LassoTrace>,
}

/// Plays `sigma` against a refuter that follows the universal state tuples
/// of `script` (position 0 holds the initial tuple).
pub fn extract_witness(
    arena: &Arena,
    copies: &[&TransitionSystem],
    sigma: &PositionalStrategy,
    script: &Lasso<Vec<StateId>>,
) -> Result<Witness> {
    let k = arena.k;
    let bad_script = |i: usize| Error::semantic(format!("refuter script leaves the arena at position {i}"));
    let first = script.at(0).clone();
    if first.len() != k {
        return Err(Error::Arity(format!("script tuples have {} entries, expected {k}", first.len())));
    }
    let start = arena.find(&GameNode::Init(first)).ok_or_else(|| bad_script(0))?;
    let pick = |v: usize| -> Result<usize> {
        sigma.choice[v]
            .map(|w| w as usize)
            .ok_or_else(|| Error::semantic(format!("strategy undefined at node {v}")))
    };
    // positions are ∀-turn nodes; the run is determined by (script position, node)
    let mut v = pick(start)?;
    let mut pos = 0usize;
    let mut seen: HashMap<(usize, usize), usize> = HashMap::new();
    let mut tuples: Vec<Vec<StateId>> = Vec::new();
    loop {
        if let Some(&i) = seen.get(&(pos, v)) {
            let cycle = tuples.split_off(i);
            let states = Lasso::new(tuples, cycle)?;
            let traces = (k..k + arena.l)
                .map(|c| states.map(|t| copies[c].label(t[c])))
                .collect();
            return Ok(Witness { states, traces });
        }
        seen.insert((pos, v), tuples.len());
        let GameNode::Step { states, .. } = &arena.nodes[v] else {
            return Err(Error::semantic("strategy left the step nodes"));
        };
        tuples.push(states.clone());
        let npos = script.next_pos(pos);
        let mut want = script.at(npos).clone();
        want.extend_from_slice(&states[k..]);
        let after = arena
            .game
            .successors(v)
            .iter()
            .map(|&w| w as usize)
            .find(|&w| matches!(&arena.nodes[w], GameNode::Step { states, .. } if *states == want))
            .ok_or_else(|| bad_script(npos))?;
        v = pick(after)?;
        pos = npos;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Alphabet, Dsa};
    use crate::model::parse_ts;

    fn one_state() -> TransitionSystem {
        parse_ts("aps: a\ninit: s\nstate s {a}\n  -> s\n").unwrap()
    }

    #[test]
    fn single_state_lasso() {
        let ts = one_state();
        let al = Alphabet::new(vec![vec!["a".into()], vec!["a".into()]]);
        for (c, want) in [(0, Player::Verifier), (1, Player::Refuter)] {
            let d = Dpa::new(al.clone(), 0, vec![c], vec![0; 4]).unwrap();
            let arena = build_arena(&ts, 1, 1, &d).unwrap();
            assert_eq!(arena.game.num_nodes(), 3);
            let sol = zielonka_solve(&arena.game);
            assert_eq!(sol.winner[arena.init[0]], want);
        }
    }

    #[test]
    fn alternation_and_q_updates() {
        let ts = parse_ts("aps: a\ninit: s t\nstate s {a}\n  -> s t\nstate t {}\n  -> s t\n").unwrap();
        // q tracks the label of copy 0 at the previous position
        let al = Alphabet::new(vec![vec!["a".into()], vec!["a".into()]]);
        let d = Dsa::new(al, 0, vec![false, false], vec![0, 1, 0, 1, 0, 1, 0, 1]).unwrap().to_dpa();
        let arena = build_arena(&ts, 1, 1, &d).unwrap();
        for (v, node) in arena.nodes.iter().enumerate() {
            for &w in arena.game.successors(v) {
                let next = &arena.nodes[w as usize];
                match (node, next) {
                    (GameNode::Init(_), GameNode::Step { q, turn: Turn::Forall, .. }) => assert_eq!(*q, 0),
                    (
                        GameNode::Step { states, turn: Turn::Forall, .. },
                        GameNode::Step { states: s2, q, turn: Turn::Exists },
                    ) => {
                        assert_eq!(*q, ts.label(states[0]) as usize);
                        assert_eq!(states[1], s2[1]);
                    }
                    (
                        GameNode::Step { states, q, turn: Turn::Exists },
                        GameNode::Step { states: s2, q: q2, turn: Turn::Forall },
                    ) => {
                        assert_eq!(q, q2);
                        assert_eq!(states[0], s2[0]);
                    }
                    other => panic!("illegal edge {other:?}"),
                }
            }
        }
    }

    #[test]
    fn game_text_round_trip() {
        let g = ParityGame::new(
            vec![Player::Verifier, Player::Refuter],
            vec![0, 3],
            vec![vec![1], vec![0, 1]],
        )
        .unwrap();
        assert_eq!(ParityGame::from_text(&g.to_text()).unwrap(), g);
        let s = PositionalStrategy {
            owner: Player::Verifier,
            choice: vec![Some(1), None],
        };
        assert_eq!(PositionalStrategy::from_text(Player::Verifier, 2, &s.to_text()).unwrap(), s);
    }

    #[test]
    fn corrupted_strategy_fails() {
        // v0 (V, color 1) can go to v1 (color 0, self-loop) or loop on itself
        let g = ParityGame::new(
            vec![Player::Verifier, Player::Verifier],
            vec![1, 0],
            vec![vec![0, 1], vec![1]],
        )
        .unwrap();
        let sol = zielonka_solve(&g);
        let region: Vec<bool> = sol.winner.iter().map(|&p| p == Player::Verifier).collect();
        assert!(verify_strategy(&g, &sol.strategy(Player::Verifier), &region).unwrap());
        let bad = PositionalStrategy {
            owner: Player::Verifier,
            choice: vec![Some(0), Some(1)],
        };
        assert!(!verify_strategy(&g, &bad, &region).unwrap());
        assert!(verify_strategy(&g, &bad, &[false, false]).unwrap());
    }
}
