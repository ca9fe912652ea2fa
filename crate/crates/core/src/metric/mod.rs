//! Shortest-path metrics `d_n`, scaled metrics `rho_n` and intervals for
//! their limit.

mod delta;
mod push;
mod rho;

pub use delta::{delta_coordinates, SimplexPoint};
pub use push::{push_forward, Euclidean, MidpointSpace, PushForward, SupNorm};
pub use rho::{additive_error_check, diameter_check, AdditiveErrorReport, DiameterReport, RhoInterval};

use std::collections::VecDeque;
use std::sync::OnceLock;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::graph::{GraphLevel, Hierarchy};
use crate::vertex::{VertexId, VertexStore};

const UNREACHED: u16 = u16::MAX;
const NO_ROW: u32 = u32::MAX;

/// Hop distances from a set of sources to every vertex of one level.
#[derive(Clone, Debug)]
pub struct DistanceTable {
    n: u32,
    vcount: usize,
    sources: Vec<u32>,
    row_of: Vec<u32>,
    dist: Vec<u16>,
}

impl DistanceTable {
    pub fn level(&self) -> u32 {
        self.n
    }

    /// Level indices of the sources, in table row order.
    pub fn sources(&self) -> &[u32] {
        &self.sources
    }

    /// True when every vertex is a source.
    pub fn is_complete(&self) -> bool {
        self.sources.len() == self.vcount
    }

    /// Distances from source `i` (a level index), if it is a source.
    pub fn row(&self, i: usize) -> Option<&[u16]> {
        match self.row_of[i] {
            NO_ROW => None,
            r => {
                let r = r as usize;
                Some(&self.dist[r * self.vcount..(r + 1) * self.vcount])
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<u32> {
        match (self.row(i), self.row(j)) {
            (Some(row), _) => Some(row[j] as u32),
            (None, Some(row)) => Some(row[i] as u32),
            _ => None,
        }
    }

    /// Distance between level indices; one of them must be a source.
    pub fn d(&self, i: usize, j: usize) -> u32 {
        self.get(i, j).expect("neither vertex is a BFS source")
    }
}

/// Single-source BFS; `UNREACHED` marks unreachable vertices.
pub(crate) fn bfs_row(level: &GraphLevel, source: usize) -> Vec<u16> {
    let mut dist = vec![UNREACHED; level.vcount()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(x) = queue.pop_front() {
        let next = dist[x] + 1;
        for &y in level.neighbors(x) {
            let y = y as usize;
            if dist[y] == UNREACHED {
                dist[y] = next;
                queue.push_back(y);
            }
        }
    }
    dist
}

/// Exact hop distances from each source to all vertices of `level`.
pub fn bfs_distance(
    level: &GraphLevel,
    store: &VertexStore,
    sources: &[VertexId],
) -> Result<DistanceTable> {
    if level.n() >= 17 {
        return Err(Error::InvalidArgument(format!(
            "distances of G_{} do not fit 16-bit storage",
            level.n()
        )));
    }
    let idx = sources
        .iter()
        .map(|&v| {
            level.index_of(v).map(|i| i as u32).ok_or(Error::NotInLevel {
                vertex: v,
                level: level.n(),
            })
        })
        .collect::<Result<Vec<u32>>>()?;
    let rows = crate::par_map(&idx, |&s| bfs_row(level, s as usize));
    let mut row_of = vec![NO_ROW; level.vcount()];
    let mut dist = Vec::with_capacity(idx.len() * level.vcount());
    let mut kept = Vec::with_capacity(idx.len());
    for (s, row) in idx.iter().zip(rows) {
        if row_of[*s as usize] != NO_ROW {
            continue;
        }
        if let Some(miss) = row.iter().position(|&d| d == UNREACHED) {
            return Err(Error::Disconnected {
                level: level.n(),
                source_label: store.encode(level.vertex(*s as usize)),
                reached: row.iter().filter(|&&d| d != UNREACHED).count(),
                total: level.vcount(),
                unreached_label: store.encode(level.vertex(miss)),
            });
        }
        row_of[*s as usize] = kept.len() as u32;
        kept.push(*s);
        dist.extend_from_slice(&row);
    }
    Ok(DistanceTable {
        n: level.n(),
        vcount: level.vcount(),
        sources: kept,
        row_of,
        dist,
    })
}

pub fn all_pairs(level: &GraphLevel, store: &VertexStore) -> Result<DistanceTable> {
    bfs_distance(level, store, level.vertices())
}

/// Lazily computed all-pairs tables over a hierarchy.
pub struct Metrics<'a> {
    hier: &'a Hierarchy,
    tables: Vec<OnceLock<DistanceTable>>,
    max_entries: u64,
}

/// Default cap on all-pairs table entries (`|V_n|^2`).
pub const DEFAULT_MAX_TABLE_ENTRIES: u64 = 50_000_000;

impl<'a> Metrics<'a> {
    pub fn new(hier: &'a Hierarchy) -> Metrics<'a> {
        Self::with_cap(hier, DEFAULT_MAX_TABLE_ENTRIES)
    }

    pub fn with_cap(hier: &'a Hierarchy, max_entries: u64) -> Metrics<'a> {
        Metrics {
            hier,
            tables: (0..=hier.top()).map(|_| OnceLock::new()).collect(),
            max_entries,
        }
    }

    pub fn hierarchy(&self) -> &'a Hierarchy {
        self.hier
    }

    pub fn store(&self) -> &'a VertexStore {
        self.hier.store()
    }

    pub fn level(&self, n: u32) -> Result<&'a GraphLevel> {
        self.hier.get_level(n)
    }

    /// Whether the all-pairs table of `G_n` fits the entry cap.
    pub fn affordable(&self, n: u32) -> bool {
        self.hier
            .get_level(n)
            .map(|g| (g.vcount() as u64).pow(2) <= self.max_entries)
            .unwrap_or(false)
    }

    pub fn table(&self, n: u32) -> Result<&DistanceTable> {
        let level = self.hier.get_level(n)?;
        let cell = &self.tables[n as usize];
        if let Some(t) = cell.get() {
            return Ok(t);
        }
        let entries = (level.vcount() as u64).pow(2);
        if entries > self.max_entries {
            return Err(Error::BudgetExceeded {
                level: n,
                what: "all-pairs table entries",
                requested: entries as u128,
                cap: self.max_entries as u128,
            });
        }
        let t = all_pairs(level, self.hier.store())?;
        let _ = cell.set(t);
        Ok(cell.get().unwrap())
    }

    /// `d_n(x, y)` by level index.
    pub fn d_idx(&self, n: u32, i: usize, j: usize) -> Result<u32> {
        Ok(self.table(n)?.d(i, j))
    }

    /// `d_n(x, y)`.
    pub fn d(&self, n: u32, x: VertexId, y: VertexId) -> Result<u32> {
        let i = self.hier.index_in(n, x)?;
        let j = self.hier.index_in(n, y)?;
        self.d_idx(n, i, j)
    }

    /// `rho_n(x, y) = d_n(x, y) / 2^(n-1)`, exactly.
    pub fn rho_n(&self, n: u32, x: VertexId, y: VertexId) -> Result<Dyadic> {
        Ok(scaled(self.d(n, x, y)?, n))
    }

    /// Rigorous bounds `[max(0, rho_N - 8/2^N), rho_N]` on the limit `rho`.
    pub fn rho_interval(&self, x: VertexId, y: VertexId, big_n: u32) -> Result<RhoInterval> {
        let upper = self.rho_n(big_n, x, y)?;
        Ok(RhoInterval::from_upper(upper, big_n))
    }
}

/// `d / 2^(n-1)` as an exact dyadic rational.
pub fn scaled(d: u32, n: u32) -> Dyadic {
    Dyadic::new(d as i64, n.saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Budget;

    #[test]
    fn disconnected_graphs_are_reported() {
        // three isolated vertices: the edge list is empty
        let mut h = Hierarchy::new(3);
        let store = h.store().clone();
        let level = GraphLevel::from_parts(&store, 1, 0, store.leaves().collect(), vec![(0, 1)]).unwrap();
        h.push_level(level).unwrap();
        let err = bfs_distance(h.level(1), h.store(), &[store.leaf(0).unwrap()]).unwrap_err();
        match err {
            Error::Disconnected { reached, total, unreached_label, .. } => {
                assert_eq!((reached, total), (2, 3));
                assert_eq!(unreached_label, "2");
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn distances_on_small_levels() {
        let h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let s = h.store();
        let (a, b) = (s.leaf(0).unwrap(), s.leaf(1).unwrap());
        assert_eq!(m.d(2, a, b).unwrap(), 2);
        assert_eq!(m.d(5, a, b).unwrap(), 16);
        assert_eq!(m.rho_n(5, a, b).unwrap(), Dyadic::ONE);
        assert_eq!(m.d(3, a, a).unwrap(), 0);
        let t = bfs_distance(h.level(4), s, &[b]).unwrap();
        assert!(!t.is_complete());
        assert_eq!(t.get(0, 1), Some(8));
        assert_eq!(t.get(0, 2), None);
        let mid = s.lookup("{0,{0,1}}").unwrap().unwrap();
        assert!(matches!(m.d(2, mid, a), Err(Error::NotInLevel { .. })));
    }
}
