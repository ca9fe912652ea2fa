use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AdjacencyOracle;

/// A materialized graph with bitset rows.
#[derive(Clone, Debug)]
pub struct BitGraph {
    rows: Vec<FixedBitSet>,
}

impl BitGraph {
    pub fn from_oracle<G: AdjacencyOracle + ?Sized>(g: &G) -> BitGraph {
        let n = g.len();
        let mut rows = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if g.adjacent(i, j) {
                    rows[i].insert(j);
                    rows[j].insert(i);
                }
            }
        }
        BitGraph { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count_ones(..)
    }

    pub fn ecount(&self) -> u64 {
        self.rows.iter().map(|r| r.count_ones(..) as u64).sum::<u64>() / 2
    }

    pub fn row(&self, i: usize) -> &FixedBitSet {
        &self.rows[i]
    }

    fn permuted(&self, order: &[usize]) -> BitGraph {
        let n = self.len();
        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let mut rows = vec![FixedBitSet::with_capacity(n); n];
        for (p, &v) in order.iter().enumerate() {
            for u in self.rows[v].ones() {
                rows[p].insert(pos[u]);
            }
        }
        BitGraph { rows }
    }
}

impl AdjacencyOracle for BitGraph {
    fn len(&self) -> usize {
        self.rows.len()
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueMode {
    Exact,
    Greedy,
}

#[derive(Clone, Debug)]
pub struct CliqueOptions {
    /// Branch-and-bound node limit; the deterministic budget.
    pub node_limit: u64,
    /// Optional wall-clock cap. Results stop being reproducible when it fires.
    pub time_cap: Option<Duration>,
    pub seed: u64,
    /// Randomized restarts in greedy mode and in the fallback.
    pub restarts: usize,
}

impl Default for CliqueOptions {
    fn default() -> Self {
        CliqueOptions {
            node_limit: 50_000_000,
            time_cap: None,
            seed: 0,
            restarts: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueStatus {
    /// Proven maximum.
    Exact,
    /// Maximal clique from greedy mode.
    Greedy,
    /// Exact search ran out of budget; best clique seen, not proven maximum.
    FallbackGreedy,
}

#[derive(Clone, Debug, Serialize)]
pub struct CliqueResult {
    /// Sorted vertex indices.
    pub vertices: Vec<usize>,
    pub status: CliqueStatus,
    pub nodes: u64,
}

impl CliqueResult {
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_exact(&self) -> bool {
        self.status == CliqueStatus::Exact
    }
}

/// Maximum (exact) or maximal (greedy) clique. The returned set is checked
/// pairwise against `g` itself.
pub fn clique_search<G: AdjacencyOracle + ?Sized>(
    g: &G,
    mode: CliqueMode,
    opts: &CliqueOptions,
) -> CliqueResult {
    let bits = BitGraph::from_oracle(g);
    let mut result = match mode {
        CliqueMode::Greedy => CliqueResult {
            vertices: greedy(&bits, opts.seed, opts.restarts),
            status: CliqueStatus::Greedy,
            nodes: 0,
        },
        CliqueMode::Exact => exact(&bits, opts),
    };
    result.vertices.sort_unstable();
    for (a, &i) in result.vertices.iter().enumerate() {
        for &j in &result.vertices[a + 1..] {
            assert!(g.adjacent(i, j), "clique search returned non-adjacent pair ({i}, {j})");
        }
    }
    result
}

fn degree_order(g: &BitGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

fn maximal_from(g: &BitGraph, order: &[usize]) -> Vec<usize> {
    let mut cand = FixedBitSet::with_capacity(g.len());
    cand.insert_range(..);
    let mut clique = Vec::new();
    for &v in order {
        if cand.contains(v) {
            clique.push(v);
            cand.intersect_with(g.row(v));
        }
    }
    clique
}

fn greedy(g: &BitGraph, seed: u64, restarts: usize) -> Vec<usize> {
    if g.is_empty() {
        return Vec::new();
    }
    let mut order = degree_order(g);
    let mut best = maximal_from(g, &order);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..restarts {
        order.shuffle(&mut rng);
        let c = maximal_from(g, &order);
        if c.len() > best.len() {
            best = c;
        }
    }
    best
}

struct Search<'a> {
    g: &'a BitGraph,
    best: Vec<usize>,
    nodes: u64,
    limit: u64,
    deadline: Option<Instant>,
    aborted: bool,
}

impl Search<'_> {
    // greedy colouring of `p` in index order; colours are non-decreasing
    fn colour(&self, p: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.count_ones(..));
        let mut colours = Vec::with_capacity(order.capacity());
        let mut uncoloured = p.clone();
        let mut k = 0;
        while !uncoloured.is_clear() {
            k += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.minimum() {
                uncoloured.remove(v);
                q.remove(v);
                q.difference_with(self.g.row(v));
                order.push(v);
                colours.push(k);
            }
        }
        (order, colours)
    }

    fn expand(&mut self, clique: &mut Vec<usize>, mut p: FixedBitSet) {
        self.nodes += 1;
        if self.nodes > self.limit
            || (self.nodes % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d))
        {
            self.aborted = true;
        }
        if self.aborted {
            return;
        }
        let (order, colours) = self.colour(&p);
        for i in (0..order.len()).rev() {
            if clique.len() + colours[i] <= self.best.len() {
                return;
            }
            let v = order[i];
            let mut next = p.clone();
            next.intersect_with(self.g.row(v));
            clique.push(v);
            if next.is_clear() {
                if clique.len() > self.best.len() {
                    self.best = clique.clone();
                }
            } else {
                self.expand(clique, next);
            }
            clique.pop();
            p.remove(v);
            if self.aborted {
                return;
            }
        }
    }
}

fn exact(g: &BitGraph, opts: &CliqueOptions) -> CliqueResult {
    if g.is_empty() {
        return CliqueResult {
            vertices: Vec::new(),
            status: CliqueStatus::Exact,
            nodes: 0,
        };
    }
    let order = degree_order(g);
    let pg = g.permuted(&order);
    let seed_clique: Vec<usize> = maximal_from(&pg, &(0..pg.len()).collect::<Vec<_>>());
    let mut search = Search {
        g: &pg,
        best: seed_clique,
        nodes: 0,
        limit: opts.node_limit,
        deadline: opts.time_cap.map(|c| Instant::now() + c),
        aborted: false,
    };
    let mut all = FixedBitSet::with_capacity(pg.len());
    all.insert_range(..);
    search.expand(&mut Vec::new(), all);
    let mut vertices: Vec<usize> = search.best.iter().map(|&p| order[p]).collect();
    let status = if search.aborted {
        let fallback = greedy(g, opts.seed, opts.restarts);
        if fallback.len() > vertices.len() {
            vertices = fallback;
        }
        CliqueStatus::FallbackGreedy
    } else {
        CliqueStatus::Exact
    };
    CliqueResult {
        vertices,
        status,
        nodes: search.nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    struct Edges(usize, Vec<(usize, usize)>);

    impl AdjacencyOracle for Edges {
        fn len(&self) -> usize {
            self.0
        }
        fn adjacent(&self, i: usize, j: usize) -> bool {
            self.1.contains(&(i.min(j), i.max(j)))
        }
    }

    fn brute_force_omega(g: &Edges) -> usize {
        let n = g.0;
        (0u32..1 << n)
            .filter(|mask| {
                (0..n).all(|i| {
                    (i + 1..n).all(|j| mask & (1 << i) == 0 || mask & (1 << j) == 0 || g.adjacent(i, j))
                })
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn trivial_graphs() {
        let k5 = Edges(5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect());
        let r = clique_search(&k5, CliqueMode::Exact, &CliqueOptions::default());
        assert_eq!((r.size(), r.status), (5, CliqueStatus::Exact));
        let empty = Edges(4, vec![]);
        let r = clique_search(&empty, CliqueMode::Exact, &CliqueOptions::default());
        assert_eq!(r.size(), 1);
        let r = clique_search(&empty, CliqueMode::Greedy, &CliqueOptions::default());
        assert_eq!(r.size(), 1);
        let none = Edges(0, vec![]);
        assert_eq!(clique_search(&none, CliqueMode::Exact, &CliqueOptions::default()).size(), 0);
    }

    #[test]
    fn node_limit_falls_back() {
        let g = Edges(6, vec![(0, 1), (1, 2), (0, 2), (3, 4)]);
        let opts = CliqueOptions {
            node_limit: 0,
            ..CliqueOptions::default()
        };
        let r = clique_search(&g, CliqueMode::Exact, &opts);
        assert_eq!(r.status, CliqueStatus::FallbackGreedy);
        assert!(r.size() >= 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn exact_matches_brute_force(n in 1usize..11, bits in proptest::collection::vec(any::<bool>(), 55), seed in any::<u64>()) {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            let g = Edges(n, edges);
            let opts = CliqueOptions { seed, ..CliqueOptions::default() };
            let r = clique_search(&g, CliqueMode::Exact, &opts);
            prop_assert_eq!(r.size(), brute_force_omega(&g));
            let greedy = clique_search(&g, CliqueMode::Greedy, &opts);
            prop_assert!(greedy.size() <= r.size());
            // maximality
            for v in 0..n {
                if !greedy.vertices.contains(&v) {
                    prop_assert!(greedy.vertices.iter().any(|&u| !g.adjacent(u, v)));
                }
            }
        }
    }
}
