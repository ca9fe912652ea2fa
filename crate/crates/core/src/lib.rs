//! A computational laboratory for the midpoint-graph hierarchy `G_0, G_1, ...`.
//!
//! Starting from `n0` leaves, each level appends the formal midpoints `{a, b}`
//! of all pairs of earlier vertices and connects two midpoints whenever they
//! sit parallel to the base of a cone over an edge of the previous level.
//! The crate computes exact shortest-path metrics on these graphs, the scaled
//! metrics `rho_n = d_n / 2^(n-1)` together with rigorous intervals for their
//! limit, the geodesics induced by the midpoint map, and certificates for the
//! separated sets and edge-count bounds that drive the non-compactness
//! argument.
//!
//! ```
//! use midgraph::{Budget, Hierarchy};
//!
//! let hier = Hierarchy::build(2, 5, &Budget::default()).unwrap();
//! assert_eq!(hier.level(5).vcount(), 68);
//! assert_eq!(hier.level(5).ecount(), 184);
//! ```

pub mod bicombing;
pub mod dyadic;
mod error;
pub mod export;
pub mod extremal;
pub mod graph;
pub mod metric;
pub mod report;
pub mod verify;
pub mod vertex;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use graph::{predict_vcount, Budget, GraphLevel, Hierarchy};
pub use metric::{DistanceTable, Metrics, RhoInterval};
pub use vertex::{Term, VertexId, VertexStore};

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}
