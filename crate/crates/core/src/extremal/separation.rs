use serde::Serialize;

use super::clique::{clique_search, CliqueMode, CliqueOptions, CliqueStatus};
use super::{Complement, PowerGraph};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::metric::{bfs_row, Metrics};
use crate::vertex::VertexId;

/// Vertices of `G_n` pairwise at distance at least `m + 1`.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationCertificate {
    pub n: u32,
    pub m: u32,
    /// Canonical encodings, in canonical order.
    pub vertices: Vec<String>,
    #[serde(skip)]
    pub ids: Vec<VertexId>,
    /// Smallest pairwise `d_n`, recomputed by BFS; absent for a single vertex.
    pub min_distance: Option<u32>,
    /// `(2m - 6) / 2^n`, a lower bound for the limit distance of every pair.
    pub rho_lower: Dyadic,
    /// `m / 2^n`, which `rho_lower` dominates.
    pub stated_bound: Dyadic,
    pub search: CliqueStatus,
    pub nodes: u64,
}

impl SeparationCertificate {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// A clique of the complement of `G_n^m`, re-verified by fresh BFS runs that
/// do not go through the distance table used in the search.
pub fn separated_set(
    metrics: &Metrics<'_>,
    n: u32,
    m: u32,
    mode: CliqueMode,
    opts: &CliqueOptions,
) -> Result<SeparationCertificate> {
    if m < 6 {
        return Err(Error::InvalidArgument(format!(
            "separated sets need m >= 6, got {m}"
        )));
    }
    let level = metrics.level(n)?;
    let table = metrics.table(n)?;
    let comp = Complement(PowerGraph::new(table, m)?);
    let found = clique_search(&comp, mode, opts);

    let mut min_distance: Option<u32> = None;
    for (a, &i) in found.vertices.iter().enumerate() {
        let row = bfs_row(level, i);
        for &j in &found.vertices[a + 1..] {
            let d = row[j] as u32;
            if d <= m {
                return Err(Error::CertificateRejected(format!(
                    "vertices {i} and {j} of G_{n} are at distance {d} <= {m}"
                )));
            }
            min_distance = Some(min_distance.map_or(d, |x| x.min(d)));
        }
    }
    let store = metrics.store();
    let ids: Vec<VertexId> = found.vertices.iter().map(|&i| level.vertex(i)).collect();
    Ok(SeparationCertificate {
        n,
        m,
        vertices: ids.iter().map(|&v| store.encode(v)).collect(),
        ids,
        min_distance,
        rho_lower: Dyadic::new(2 * m as i64 - 6, n),
        stated_bound: Dyadic::new(m as i64, n),
        search: found.status,
        nodes: found.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Budget, Hierarchy};

    #[test]
    fn level_five() {
        let h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let c = separated_set(&m, 5, 6, CliqueMode::Exact, &CliqueOptions::default()).unwrap();
        // exhaustive search over 68 vertices gives 3
        assert_eq!(c.len(), 3);
        assert_eq!(c.search, CliqueStatus::Exact);
        assert!(c.min_distance.unwrap() >= 7);
        assert_eq!(c.stated_bound, Dyadic::new(6, 5));
        assert_eq!(c.rho_lower, Dyadic::new(6, 5));
        let far = separated_set(&m, 5, 16, CliqueMode::Exact, &CliqueOptions::default()).unwrap();
        assert_eq!((far.len(), far.min_distance), (1, None));
        assert!(separated_set(&m, 5, 5, CliqueMode::Exact, &CliqueOptions::default()).is_err());
    }
}
