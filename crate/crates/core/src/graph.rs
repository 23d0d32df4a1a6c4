//! Small graph helpers shared by automata and games.

/// Strongly connected components of the graph restricted to `alive`
/// nodes (iterative Tarjan). Returns a component id per node
/// (`usize::MAX` for dead nodes) and the number of components.
pub(crate) fn scc<F, I>(n: usize, alive: &[bool], succ: F) -> (Vec<usize>, usize)
where
    F: Fn(usize) -> I,
    I: IntoIterator<Item = usize>,
{
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![NONE; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if !alive[root] || index[root] != NONE {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = Vec::new();
        let succs = |v: usize| -> Vec<usize> { succ(v).into_iter().filter(|&w| alive[w]).collect() };
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, succs(root), 0));
        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            if frame.2 < frame.1.len() {
                let w = frame.1[frame.2];
                frame.2 += 1;
                if index[w] == NONE {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    let sw = succs(w);
                    call.push((w, sw, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    (comp, ncomp)
}

/// Nodes of `alive` lying on a cycle inside `alive` (members of nontrivial
/// SCCs or with a self-loop).
pub(crate) fn cyclic_nodes<F, I>(n: usize, alive: &[bool], succ: F) -> Vec<bool>
where
    F: Fn(usize) -> I + Copy,
    I: IntoIterator<Item = usize>,
{
    let (comp, ncomp) = scc(n, alive, succ);
    let mut size = vec![0usize; ncomp];
    for v in 0..n {
        if comp[v] != usize::MAX {
            size[comp[v]] += 1;
        }
    }
    (0..n)
        .map(|v| {
            alive[v]
                && (size[comp[v]] > 1 || succ(v).into_iter().any(|w| w == v))
        })
        .collect()
}

/// Backward closure: nodes that can reach a node of `target` (within `alive`).
pub(crate) fn can_reach(n: usize, alive: &[bool], target: &[bool], pred: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| alive[v] && target[v]).collect();
    for &v in &stack {
        seen[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &pred[v] {
            if alive[u] && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_of_small_graph() {
        let adj = [vec![1], vec![2], vec![0, 3], vec![3], vec![]];
        let (comp, n) = scc(5, &[true; 5], |v| adj[v].clone());
        assert_eq!(n, 3);
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[2], comp[3]);
        let cyc = cyclic_nodes(5, &[true; 5], |v| adj[v].clone());
        assert_eq!(cyc, vec![true, true, true, true, false]);
    }
}
