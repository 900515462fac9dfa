//! Orbit capacity of vertex sets in subshifts of finite type.
//!
//! For a clopen set given by vertices of the presenting graph, the largest
//! asymptotic visit frequency along orbits is the maximum cycle mean of the
//! vertex indicator.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Presenting graph of an SFT with a marked vertex set `E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftGraph {
    adjacency: Vec<Vec<bool>>,
    marked: Vec<bool>,
}

impl SftGraph {
    /// Validates squareness and that some cycle exists.
    pub fn new(adjacency: Vec<Vec<bool>>, marked: Vec<bool>) -> Result<Self> {
        let v = adjacency.len();
        if v == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        if adjacency.iter().any(|row| row.len() != v) {
            return Err(Error::InvalidGraph("adjacency matrix is not square".into()));
        }
        if marked.len() != v {
            return Err(Error::InvalidGraph(format!("{} marks for {v} vertices", marked.len())));
        }
        let graph = SftGraph { adjacency, marked };
        if graph.cyclic_components().is_empty() {
            return Err(Error::InvalidGraph("graph has no cycle".into()));
        }
        Ok(graph)
    }

    /// From successor lists and the list of marked vertices.
    pub fn from_lists(successors: &[Vec<usize>], marked: &[usize]) -> Result<Self> {
        let v = successors.len();
        let mut adjacency = vec![vec![false; v]; v];
        for (a, succ) in successors.iter().enumerate() {
            for &b in succ {
                if b >= v {
                    return Err(Error::InvalidGraph(format!("edge {a}→{b} leaves the graph")));
                }
                adjacency[a][b] = true;
            }
        }
        let mut marks = vec![false; v];
        for &e in marked {
            if e >= v {
                return Err(Error::InvalidGraph(format!("marked vertex {e} out of range")));
            }
            marks[e] = true;
        }
        SftGraph::new(adjacency, marks)
    }

    /// Higher-block presentation: vertices are the admissible words of
    /// length `r` over `adjacency`, and a vertex is marked when its word is
    /// one of `words`. Returns the graph and its vertex words.
    pub fn higher_block(
        adjacency: &[Vec<bool>],
        r: usize,
        words: &[Vec<usize>],
    ) -> Result<(Self, Vec<Vec<usize>>)> {
        if r == 0 {
            return Err(Error::InvalidGraph("block length must be positive".into()));
        }
        if words.iter().any(|w| w.len() != r) {
            return Err(Error::InvalidGraph(format!("marked words must have length {r}")));
        }
        let v = adjacency.len();
        let mut blocks: Vec<Vec<usize>> = (0..v).map(|a| vec![a]).collect();
        for _ in 1..r {
            blocks = blocks
                .iter()
                .flat_map(|w| {
                    let last = *w.last().unwrap_or(&0);
                    (0..v).filter(move |&b| adjacency[last][b]).map(move |b| {
                        let mut next = w.clone();
                        next.push(b);
                        next
                    })
                })
                .collect();
        }
        let size = blocks.len();
        let mut adj = vec![vec![false; size]; size];
        for (x, u) in blocks.iter().enumerate() {
            for (y, w) in blocks.iter().enumerate() {
                adj[x][y] = u[1..] == w[..r - 1] && adjacency[u[r - 1]][w[r - 1]];
            }
        }
        let marked = blocks.iter().map(|b| words.contains(b)).collect();
        Ok((SftGraph::new(adj, marked)?, blocks))
    }

    /// Number of vertices.
    pub fn vertices(&self) -> usize {
        self.adjacency.len()
    }

    /// Whether `a → b` is an edge.
    pub fn edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }

    /// Whether `a` is in `E`.
    pub fn is_marked(&self, a: usize) -> bool {
        self.marked[a]
    }

    /// Same graph, different `E`.
    pub fn with_marked(&self, marked: Vec<bool>) -> Result<Self> {
        SftGraph::new(self.adjacency.clone(), marked)
    }

    fn reachability(&self) -> Vec<Vec<bool>> {
        let v = self.vertices();
        (0..v)
            .map(|s| {
                let mut seen = vec![false; v];
                let mut stack = vec![s];
                while let Some(a) = stack.pop() {
                    for b in 0..v {
                        if self.adjacency[a][b] && !seen[b] {
                            seen[b] = true;
                            stack.push(b);
                        }
                    }
                }
                seen
            })
            .collect()
    }

    /// Strongly connected components that carry a cycle, each sorted.
    pub fn cyclic_components(&self) -> Vec<Vec<usize>> {
        let reach = self.reachability();
        let v = self.vertices();
        let mut assigned = vec![false; v];
        let mut out = Vec::new();
        for s in 0..v {
            if assigned[s] || !reach[s][s] {
                continue;
            }
            let comp: Vec<usize> = (0..v).filter(|&t| reach[s][t] && reach[t][s]).collect();
            for &t in &comp {
                assigned[t] = true;
            }
            out.push(comp);
        }
        out
    }
}

/// Maximum mean weight of a cycle inside one strongly connected component
/// (Karp's recursion on walks of exact length from a fixed source).
fn karp_max_mean(graph: &SftGraph, comp: &[usize]) -> Ratio<i64> {
    let size = comp.len();
    let weight = |a: usize| i64::from(graph.marked[comp[a]]);
    // best[k][v]: heaviest walk of k edges from comp[0] to comp[v]; edge
    // weight is the mark of its tail.
    let mut best: Vec<Vec<Option<i64>>> = vec![vec![None; size]; size + 1];
    best[0][0] = Some(0);
    for k in 1..=size {
        for b in 0..size {
            best[k][b] = (0..size)
                .filter(|&a| graph.adjacency[comp[a]][comp[b]])
                .filter_map(|a| best[k - 1][a].map(|w| w + weight(a)))
                .max();
        }
    }
    let mut answer: Option<Ratio<i64>> = None;
    for b in 0..size {
        let Some(top) = best[size][b] else { continue };
        let worst = (0..size)
            .filter_map(|k| best[k][b].map(|w| Ratio::new(top - w, (size - k) as i64)))
            .min();
        if let Some(m) = worst {
            answer = Some(answer.map_or(m, |a: Ratio<i64>| a.max(m)));
        }
    }
    answer.unwrap_or_else(Ratio::zero)
}

/// `ocap(E)`: the maximum over cycles of the fraction of marked vertices.
/// The denominator never exceeds the number of vertices.
pub fn orbit_capacity(graph: &SftGraph) -> Ratio<i64> {
    graph
        .cyclic_components()
        .iter()
        .map(|comp| karp_max_mean(graph, comp))
        .max()
        .unwrap_or_else(Ratio::zero)
}

/// Same value by enumerating every simple cycle of length at most
/// `max_len`; refused when `max_len` is below the vertex count.
pub fn orbit_capacity_bruteforce(graph: &SftGraph, max_len: usize) -> Result<Ratio<i64>> {
    let v = graph.vertices();
    if max_len < v {
        return Err(Error::OutOfRange(format!(
            "max_len {max_len} is below the vertex count {v}"
        )));
    }
    fn extend(
        graph: &SftGraph,
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        marks: i64,
        max_len: usize,
        best: &mut Ratio<i64>,
    ) {
        let last = *path.last().unwrap_or(&start);
        if graph.adjacency[last][start] {
            let mean = Ratio::new(marks, path.len() as i64);
            if mean > *best {
                *best = mean;
            }
        }
        if path.len() == max_len {
            return;
        }
        for next in start + 1..graph.vertices() {
            if graph.adjacency[last][next] && !on_path[next] {
                on_path[next] = true;
                path.push(next);
                extend(graph, start, path, on_path, marks + i64::from(graph.marked[next]), max_len, best);
                path.pop();
                on_path[next] = false;
            }
        }
    }
    let mut best = Ratio::zero();
    for start in 0..v {
        let mut on_path = vec![false; v];
        on_path[start] = true;
        let mut path = vec![start];
        extend(graph, start, &mut path, &mut on_path, i64::from(graph.marked[start]), max_len, &mut best);
    }
    Ok(best)
}

/// Whether `E` is small (`ocap(E) = 0`), i.e. no cycle meets `E`.
pub fn is_small(graph: &SftGraph) -> bool {
    orbit_capacity(graph).is_zero()
}

/// Lower bound on `ocap(E)` from random walks: every closed loop a walk
/// traces is a periodic orbit, whose visit frequency is attained.
pub fn orbit_sampling_lower_bound(graph: &SftGraph, walks: usize, steps: usize, seed: u64) -> Ratio<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = graph.vertices();
    let mut best = Ratio::zero();
    for _ in 0..walks {
        let mut current = rng.gen_range(0..v);
        let mut path = vec![current];
        let mut last_seen = vec![None; v];
        last_seen[current] = Some(0usize);
        for _ in 0..steps {
            let succ: Vec<usize> = (0..v).filter(|&b| graph.adjacency[current][b]).collect();
            if succ.is_empty() {
                break;
            }
            current = succ[rng.gen_range(0..succ.len())];
            if let Some(at) = last_seen[current] {
                let cycle = &path[at..];
                let marks = cycle.iter().filter(|&&a| graph.marked[a]).count() as i64;
                let mean = Ratio::new(marks, cycle.len() as i64);
                if mean > best {
                    best = mean;
                }
            }
            last_seen[current] = Some(path.len());
            path.push(current);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn golden(marked: &[usize]) -> SftGraph {
        SftGraph::from_lists(&[vec![0, 1], vec![0]], marked).unwrap()
    }

    #[test]
    fn capacity_examples() {
        let full = SftGraph::from_lists(&[vec![0, 1], vec![0, 1]], &[1]).unwrap();
        assert_eq!(orbit_capacity(&full), Ratio::from_integer(1));
        assert_eq!(orbit_capacity(&golden(&[1])), Ratio::new(1, 2));
        assert_eq!(orbit_capacity(&golden(&[])), Ratio::zero());
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(orbit_capacity_bruteforce(&golden(&[1]), 2).unwrap(), Ratio::new(1, 2));
        let complete = SftGraph::new(vec![vec![true; 3]; 3], vec![true, false, false]).unwrap();
        assert_eq!(orbit_capacity_bruteforce(&complete, 3).unwrap(), Ratio::from_integer(1));
        let ring = SftGraph::from_lists(&[vec![1], vec![2], vec![0]], &[0]).unwrap();
        assert_eq!(orbit_capacity_bruteforce(&ring, 3).unwrap(), Ratio::new(1, 3));
        assert_eq!(orbit_capacity(&ring), Ratio::new(1, 3));
        assert!(orbit_capacity_bruteforce(&ring, 2).is_err());
    }

    #[test]
    fn smallness() {
        assert!(is_small(&golden(&[])));
        let ring = SftGraph::from_lists(&[vec![1], vec![2], vec![0]], &[2]).unwrap();
        assert!(!is_small(&ring));
        // Vertex 2 feeds the cycle but lies on none.
        let tail = SftGraph::from_lists(&[vec![1], vec![0], vec![0]], &[2]).unwrap();
        assert!(is_small(&tail));
        assert!(SftGraph::from_lists(&[vec![1], vec![]], &[]).is_err());
    }

    #[test]
    fn word_sets_via_higher_blocks() {
        // Golden mean, E = cylinder [01]: the cycle 0→1→0 visits it half the time.
        let base = vec![vec![true, true], vec![true, false]];
        let (graph, blocks) = SftGraph::higher_block(&base, 2, &[vec![0, 1]]).unwrap();
        assert_eq!(blocks.len(), 3);
        assert_eq!(orbit_capacity(&graph), Ratio::new(1, 2));
        assert_eq!(orbit_sampling_lower_bound(&graph, 20, 50, 3), Ratio::new(1, 2));
    }

    fn random_graph() -> impl Strategy<Value = SftGraph> {
        (1usize..=6).prop_flat_map(|v| {
            (prop::collection::vec(prop::bool::weighted(0.4), v * v), prop::collection::vec(any::<bool>(), v))
                .prop_filter_map("acyclic", move |(edges, marked)| {
                    let adj = (0..v).map(|a| edges[a * v..(a + 1) * v].to_vec()).collect();
                    SftGraph::new(adj, marked).ok()
                })
        })
    }

    proptest! {
        #[test]
        fn karp_matches_enumeration(g in random_graph()) {
            prop_assert_eq!(orbit_capacity(&g), orbit_capacity_bruteforce(&g, g.vertices()).unwrap());
            prop_assert!(orbit_sampling_lower_bound(&g, 4, 20, 1) <= orbit_capacity(&g));
            prop_assert!(*orbit_capacity(&g).denom() <= g.vertices() as i64);
        }

        #[test]
        fn monotone_and_subadditive(g in random_graph(), extra in prop::collection::vec(any::<bool>(), 6)) {
            let other: Vec<bool> = (0..g.vertices()).map(|a| extra[a]).collect();
            let union: Vec<bool> = (0..g.vertices()).map(|a| g.is_marked(a) || other[a]).collect();
            let e = orbit_capacity(&g);
            let f = orbit_capacity(&g.with_marked(other).unwrap());
            let u = orbit_capacity(&g.with_marked(union).unwrap());
            prop_assert!(e <= u && f <= u);
            prop_assert!(u <= e + f);
        }
    }
}
