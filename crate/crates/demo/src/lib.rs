//! Browser front end for `midgraph`: builds a hierarchy once and answers
//! queries about one of its levels as JSON strings.
//!
//! The exported methods are plain Rust as well, so the native test suite
//! drives them directly.

use std::f64::consts::PI;

use midgraph::bicombing::find_geodesic_grid;
use midgraph::extremal::{separated_set, CliqueMode, CliqueOptions, CliqueStatus};
use midgraph::metric::{bfs_distance, delta_coordinates};
use midgraph::{Budget, Dyadic, Hierarchy, Metrics};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest level the page may ask for; `G_6` has 2280 vertices.
pub const MAX_LEVEL: u32 = 6;

#[derive(Serialize)]
struct Node {
    label: String,
    level: u32,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct Layout {
    n0: u32,
    n: u32,
    nodes: Vec<Node>,
    edges: Vec<(u32, u32)>,
}

#[derive(Serialize)]
struct Distances {
    from: String,
    d: Vec<u32>,
    max: u32,
    rho: Vec<String>,
}

#[derive(Serialize)]
struct Geodesic {
    from: String,
    to: String,
    depth: u32,
    /// Level indices of `sigma(k / 2^depth)`, `k = 0..=2^depth`.
    points: Vec<usize>,
    labels: Vec<String>,
}

#[derive(Serialize)]
struct Separated {
    m: u32,
    vertices: Vec<usize>,
    labels: Vec<String>,
    min_distance: Option<u32>,
    rho_lower: String,
    status: CliqueStatus,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

#[wasm_bindgen]
pub struct Lab {
    hier: Hierarchy,
    n: u32,
}

#[wasm_bindgen]
impl Lab {
    /// Builds `G_0..G_n` on `n0` leaves.
    #[wasm_bindgen(constructor)]
    pub fn new(n0: u32, n: u32) -> Result<Lab, String> {
        if !(2..=4).contains(&n0) {
            return Err(format!("n0 must be 2, 3 or 4, got {n0}"));
        }
        if n == 0 || n > MAX_LEVEL {
            return Err(format!("level must be in 1..={MAX_LEVEL}, got {n}"));
        }
        let hier = Hierarchy::build(n0, n, &Budget::default()).map_err(|e| e.to_string())?;
        Ok(Lab { hier, n })
    }

    pub fn vcount(&self) -> usize {
        self.hier.level(self.n).vcount()
    }

    pub fn ecount(&self) -> usize {
        self.hier.level(self.n).ecount()
    }

    /// Vertices placed by their simplex coordinates: for two leaves the
    /// segment is spread vertically by level, otherwise the simplex is
    /// projected onto a regular polygon. Coordinates lie in `[0, 1]`.
    pub fn layout(&self) -> Result<String, String> {
        let n0 = self.hier.n0();
        let level = self.hier.level(self.n);
        let store = self.hier.store();
        let delta = delta_coordinates(&self.hier, self.n).map_err(|e| e.to_string())?;
        let corners: Vec<(f64, f64)> = (0..n0)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / n0 as f64 - PI / 2.0;
                (0.5 + 0.5 * a.cos(), 0.5 + 0.5 * a.sin())
            })
            .collect();
        let nodes = level
            .vertices()
            .iter()
            .zip(&delta)
            .map(|(&v, p)| {
                let c = p.to_f64();
                let lv = store.level(v);
                let (x, y) = if n0 == 2 {
                    (c[1], (lv - 1) as f64 / (self.n.max(2) - 1) as f64)
                } else {
                    corners
                        .iter()
                        .zip(&c)
                        .fold((0.0, 0.0), |(x, y), ((cx, cy), w)| (x + w * cx, y + w * cy))
                };
                Node {
                    label: store.encode(v),
                    level: lv,
                    x,
                    y,
                }
            })
            .collect();
        Ok(json(&Layout {
            n0,
            n: self.n,
            nodes,
            edges: level.edges().collect(),
        }))
    }

    /// `d_n` and `rho_n` from one vertex to every vertex of the level.
    pub fn distances(&self, from: usize) -> Result<String, String> {
        let level = self.hier.level(self.n);
        if from >= level.vcount() {
            return Err(format!("no vertex {from} in G_{}", self.n));
        }
        let v = level.vertex(from);
        let table = bfs_distance(level, self.hier.store(), &[v]).map_err(|e| e.to_string())?;
        let d: Vec<u32> = (0..level.vcount()).map(|j| table.d(from, j)).collect();
        let rho = d
            .iter()
            .map(|&k| Dyadic::new(k as i64, self.n - 1).to_string())
            .collect();
        Ok(json(&Distances {
            from: self.hier.store().encode(v),
            max: d.iter().copied().max().unwrap_or(0),
            d,
            rho,
        }))
    }

    /// The dyadic geodesic between two vertices on the grid of mesh
    /// `2^-depth`, as far as its points exist in the built level.
    pub fn geodesic(&self, from: usize, to: usize, depth: u32) -> Result<String, String> {
        let level = self.hier.level(self.n);
        let store = self.hier.store();
        if from >= level.vcount() || to >= level.vcount() {
            return Err(format!("vertex index out of range for G_{}", self.n));
        }
        let (x, y) = (level.vertex(from), level.vertex(to));
        let row = find_geodesic_grid(store, x, y, depth)
            .filter(|row| row.iter().all(|&p| level.contains(p)))
            .ok_or_else(|| format!("depth {depth} leaves G_{}; pick shallower points or a smaller depth", self.n))?;
        Ok(json(&Geodesic {
            from: store.encode(x),
            to: store.encode(y),
            depth,
            points: row.iter().map(|&p| level.index_of(p).unwrap()).collect(),
            labels: row.iter().map(|&p| store.encode(p)).collect(),
        }))
    }

    /// A largest set of vertices pairwise at distance greater than `m`.
    pub fn separated(&self, m: u32) -> Result<String, String> {
        let metrics = Metrics::new(&self.hier);
        let c = separated_set(&metrics, self.n, m, CliqueMode::Exact, &CliqueOptions::default())
            .map_err(|e| e.to_string())?;
        let level = self.hier.level(self.n);
        Ok(json(&Separated {
            m,
            vertices: c.ids.iter().map(|&v| level.index_of(v).unwrap()).collect(),
            labels: c.vertices.clone(),
            min_distance: c.min_distance,
            rho_lower: c.rho_lower.to_string(),
            status: c.search,
        }))
    }
}
