//! Small dense-graph utilities: bit matrices, strongly connected components
//! and reflexive-transitive closure.

use std::collections::VecDeque;

#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            data: vec![0; n * words],
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.data[i * self.words + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words..(i + 1) * self.words]
    }

    /// Columns set in row `i`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    /// True iff row `sup` has every bit of row `sub`.
    pub fn row_contains(&self, sup: usize, sub: usize) -> bool {
        self.row(sup)
            .iter()
            .zip(self.row(sub))
            .all(|(a, b)| b & !a == 0)
    }

    /// First column set in `sub` but not in `sup`.
    pub fn row_difference(&self, sub: usize, sup: usize) -> Option<usize> {
        for (w, (a, b)) in self.row(sup).iter().zip(self.row(sub)).enumerate() {
            let d = b & !a;
            if d != 0 {
                return Some(w * 64 + d.trailing_zeros() as usize);
            }
        }
        None
    }

    /// Reflexive-transitive closure (Warshall over bit rows).
    pub fn reflexive_transitive_closure(&self) -> BitMatrix {
        let mut m = self.clone();
        for i in 0..m.n {
            m.set(i, i, true);
        }
        for k in 0..m.n {
            let krow: Vec<u64> = m.row(k).to_vec();
            for i in 0..m.n {
                if m.get(i, k) {
                    let start = i * m.words;
                    for (w, kw) in krow.iter().enumerate() {
                        m.data[start + w] |= kw;
                    }
                }
            }
        }
        m
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            let row: String = (0..self.n)
                .map(|j| if self.get(i, j) { '1' } else { '.' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Strongly connected components (Tarjan, iterative). Returns the component
/// id of every node; ids are in reverse topological order of the condensation.
pub fn strongly_connected_components(g: &BitMatrix) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = g.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let succ: Vec<Vec<usize>> = (0..n).map(|i| g.successors(i).collect()).collect();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, edge)) = call.last() {
            if let Some(&w) = succ[v].get(edge) {
                if let Some(top) = call.last_mut() {
                    top.1 += 1;
                }
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// Shortest path from `from` to `to` using only nodes accepted by `allow`.
pub fn shortest_path(
    g: &BitMatrix,
    from: usize,
    to: usize,
    allow: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let mut prev = vec![usize::MAX; g.len()];
    let mut seen = vec![false; g.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for w in g.successors(v) {
            if !seen[w] && allow(w) {
                seen[w] = true;
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// A closed walk `u → … → v → … → u` through two nodes of one component,
/// returned without the repeated start node.
pub fn cycle_through(g: &BitMatrix, comp: &[usize], u: usize, v: usize) -> Option<Vec<usize>> {
    let c = comp[u];
    let there = shortest_path(g, u, v, |w| comp[w] == c)?;
    let back = shortest_path(g, v, u, |w| comp[w] == c)?;
    let mut cycle = there;
    cycle.extend_from_slice(&back[1..back.len() - 1]);
    Some(cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_edges(n: usize, edges: &[(usize, usize)]) -> BitMatrix {
        let mut m = BitMatrix::new(n);
        for &(a, b) in edges {
            m.set(a, b, true);
        }
        m
    }

    #[test]
    fn scc_small() {
        let g = from_edges(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]);
        let c = strongly_connected_components(&g);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
        assert_ne!(c[3], c[4]);
        let cyc = cycle_through(&g, &c, 0, 2).unwrap();
        assert_eq!(cyc, vec![0, 1, 2]);
    }

    #[test]
    fn row_ops() {
        let g = from_edges(70, &[(0, 1), (0, 65), (1, 65)]);
        assert!(g.row_contains(0, 1));
        assert!(!g.row_contains(1, 0));
        assert_eq!(g.row_difference(0, 1), Some(1));
        assert_eq!(g.successors(0).collect::<Vec<_>>(), vec![1, 65]);
    }

    proptest! {
        #[test]
        fn scc_matches_closure(edges in prop::collection::vec((0usize..12, 0usize..12), 0..40)) {
            let g = from_edges(12, &edges);
            let comp = strongly_connected_components(&g);
            let reach = g.reflexive_transitive_closure();
            for i in 0..12 {
                for j in 0..12 {
                    prop_assert_eq!(comp[i] == comp[j], reach.get(i, j) && reach.get(j, i));
                }
            }
        }

        #[test]
        fn closure_is_transitive(edges in prop::collection::vec((0usize..10, 0usize..10), 0..30)) {
            let r = from_edges(10, &edges).reflexive_transitive_closure();
            for i in 0..10 {
                prop_assert!(r.get(i, i));
                for j in 0..10 {
                    for k in 0..10 {
                        if r.get(i, j) && r.get(j, k) {
                            prop_assert!(r.get(i, k));
                        }
                    }
                }
            }
        }
    }
}
