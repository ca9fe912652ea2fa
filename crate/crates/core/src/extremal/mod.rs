//! Graph powers and complements, clique search, separated sets and the edge
//! count bounds for power graphs.

mod bound;
mod clique;
mod separation;
mod split;

pub use bound::{
    bound_certificate, estimate_split, parameter_check, CountBook, EdgeBoundCertificate, KRow,
    LevelCounts, ParameterReport, RatioRow, SplitEstimate, SplitRecord, ALPHA,
};
pub use clique::{clique_search, BitGraph, CliqueMode, CliqueOptions, CliqueResult, CliqueStatus};
pub use separation::{separated_set, SeparationCertificate};
pub use split::{random_shortest_path, split_between, split_path, witness_chain, SplitPaths};

use std::collections::VecDeque;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::GraphLevel;
use crate::metric::DistanceTable;

/// Symmetric irreflexive adjacency over `0..len()`.
pub trait AdjacencyOracle {
    fn len(&self) -> usize;
    fn adjacent(&self, i: usize, j: usize) -> bool;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl AdjacencyOracle for GraphLevel {
    fn len(&self) -> usize {
        self.vcount()
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        self.is_adjacent(i, j)
    }
}

/// `G_n^m`, answered from a complete distance table: `1 <= d_n <= m`.
#[derive(Clone, Copy)]
pub struct PowerGraph<'a> {
    table: &'a DistanceTable,
    m: u32,
}

impl<'a> PowerGraph<'a> {
    pub fn new(table: &'a DistanceTable, m: u32) -> Result<PowerGraph<'a>> {
        if !table.is_complete() {
            return Err(Error::InvalidArgument(
                "power graph needs a complete distance table".into(),
            ));
        }
        Ok(PowerGraph { table, m })
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }

    pub fn level(&self) -> u32 {
        self.table.level()
    }
}

impl AdjacencyOracle for PowerGraph<'_> {
    fn len(&self) -> usize {
        self.table.sources().len()
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && self.table.d(i, j) <= self.m
    }
}

/// Complement of another graph on the same vertex set.
#[derive(Clone, Copy)]
pub struct Complement<G>(pub G);

impl<G: AdjacencyOracle> AdjacencyOracle for Complement<G> {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && !self.0.adjacent(i, j)
    }
}

/// Default cap on `|V| * (|V| + 2|E|)` for BFS-based power counts.
pub const DEFAULT_MAX_BFS_WORK: u64 = 100_000_000_000;

fn check_work(level: &GraphLevel, max_work: u64) -> Result<()> {
    let v = level.vcount() as u128;
    let work = v * (v + 2 * level.ecount() as u128);
    if work > max_work as u128 {
        return Err(Error::BudgetExceeded {
            level: level.n(),
            what: "power-count BFS work",
            requested: work,
            cap: max_work as u128,
        });
    }
    Ok(())
}

/// `|E(G_n^m)|` by BFS truncated at depth `m` from every vertex. `G^0` is
/// edgeless here.
pub fn power_edge_count(level: &GraphLevel, m: u32, max_work: u64) -> Result<u64> {
    check_work(level, max_work)?;
    if m == 0 {
        return Ok(0);
    }
    let sources: Vec<usize> = (0..level.vcount()).collect();
    let reached = crate::par_map(&sources, |&s| {
        let mut dist = vec![u32::MAX; level.vcount()];
        let mut queue = VecDeque::from([s]);
        dist[s] = 0;
        let mut count = 0u64;
        while let Some(x) = queue.pop_front() {
            if dist[x] == m {
                continue;
            }
            for &y in level.neighbors(x) {
                let y = y as usize;
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count
    });
    Ok(reached.iter().sum::<u64>() / 2)
}

/// `h[d]` = number of unordered pairs at distance `d`, for `d` up to the
/// diameter. `h[0]` is always zero.
pub fn distance_histogram(level: &GraphLevel, max_work: u64) -> Result<Vec<u64>> {
    check_work(level, max_work)?;
    let sources: Vec<usize> = (0..level.vcount()).collect();
    let rows = crate::par_map(&sources, |&s| {
        let row = crate::metric::bfs_row(level, s);
        let mut h = Vec::new();
        for &d in &row[s + 1..] {
            let d = d as usize;
            if d == u16::MAX as usize {
                continue;
            }
            if h.len() <= d {
                h.resize(d + 1, 0u64);
            }
            h[d] += 1;
        }
        h
    });
    let mut out = vec![0u64];
    for h in rows {
        if out.len() < h.len() {
            out.resize(h.len(), 0);
        }
        for (d, c) in h.into_iter().enumerate() {
            out[d] += c;
        }
    }
    Ok(out)
}

/// `|E| <= (1 - 1/r) |V|^2 / 2`, exactly. Panics for `r = 0`.
pub fn turan_check(vcount: u64, ecount: u64, r: u64) -> bool {
    assert!(r >= 1, "turan_check needs r >= 1");
    2 * r as u128 * ecount as u128 <= (r as u128 - 1) * (vcount as u128).pow(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct NoncompactnessRatio {
    pub n: u32,
    pub k: u32,
    pub m: u64,
    pub ecount: u64,
    pub vcount: u64,
    /// `|E(G_n^m)| / |V_n|^2`, reduced.
    pub ratio: String,
    #[serde(skip)]
    pub exact: Ratio<u128>,
}

/// `|E(G_n^m)| / |V_n|^2` for `m = 2^(n-k)`.
pub fn noncompactness_ratio(level: &GraphLevel, k: u32, max_work: u64) -> Result<NoncompactnessRatio> {
    let n = level.n();
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let m = 1u64 << (n - k);
    let ecount = power_edge_count(level, m.min(u32::MAX as u64) as u32, max_work)?;
    let vcount = level.vcount() as u64;
    let exact = if vcount == 0 {
        Ratio::from_integer(0)
    } else {
        Ratio::new(ecount as u128, (vcount as u128).pow(2))
    };
    Ok(NoncompactnessRatio {
        n,
        k,
        m,
        ecount,
        vcount,
        ratio: exact.to_string(),
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Budget, Hierarchy};
    use crate::metric::Metrics;

    #[test]
    fn power_counts_match_brute_force() {
        let h = Hierarchy::build(2, 6, &Budget::default()).unwrap();
        // independent enumeration over all pairs
        let expect5 = [184u64, 606, 1100, 1472, 1714, 1890, 2022, 2118, 2182];
        for (i, &e) in expect5.iter().enumerate() {
            assert_eq!(power_edge_count(h.level(5), i as u32 + 1, u64::MAX).unwrap(), e);
        }
        assert_eq!(power_edge_count(h.level(6), 4, u64::MAX).unwrap(), 638210);
        assert_eq!(power_edge_count(h.level(5), 0, u64::MAX).unwrap(), 0);
        assert_eq!(power_edge_count(h.level(5), 16, u64::MAX).unwrap(), 68 * 67 / 2);
        let hist = distance_histogram(h.level(4), u64::MAX).unwrap();
        assert_eq!(hist.len(), 9);
        let mut acc = 0;
        for (m, want) in [16u64, 33, 45, 54, 60, 63, 65, 66].into_iter().enumerate() {
            acc += hist[m + 1];
            assert_eq!(acc, want);
        }
        assert!(matches!(
            power_edge_count(h.level(6), 2, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn power_graph_squaring() {
        let h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let g = h.level(5);
        let p2 = PowerGraph::new(m.table(5).unwrap(), 2).unwrap();
        let mut count = 0;
        for i in 0..g.vcount() {
            for j in i + 1..g.vcount() {
                let two_step = (0..g.vcount()).any(|k| g.is_adjacent(i, k) && g.is_adjacent(k, j));
                assert_eq!(p2.adjacent(i, j), g.is_adjacent(i, j) || two_step);
                count += p2.adjacent(i, j) as u64;
                assert_eq!(Complement(p2).adjacent(i, j), !p2.adjacent(i, j));
            }
        }
        assert_eq!(count, 606);
        assert!(!Complement(p2).adjacent(3, 3));
    }

    #[test]
    fn turan() {
        assert!(!turan_check(4, 6, 3));
        assert!(turan_check(4, 6, 4));
        assert!(turan_check(10, 0, 1));
        assert!(!turan_check(10, 1, 1));
    }

    #[test]
    fn ratios() {
        let h = Hierarchy::build(2, 6, &Budget::default()).unwrap();
        let r5 = noncompactness_ratio(h.level(5), 3, u64::MAX).unwrap();
        assert_eq!((r5.m, r5.ecount), (4, 1472));
        assert_eq!(r5.ratio, "92/289");
        let r6 = noncompactness_ratio(h.level(6), 3, u64::MAX).unwrap();
        assert_eq!(r6.m, 8);
        assert_eq!(r6.ecount, 2050427);
        // still increasing at these sizes
        assert!(r6.exact > r5.exact);
        let full = noncompactness_ratio(h.level(4), 1, u64::MAX).unwrap();
        assert_eq!(full.exact, Ratio::new(11, 24));
    }
}
