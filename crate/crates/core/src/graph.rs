//! Construction of the level graphs `G_n = (V_n, E_n)`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vertex::{Term, VertexId, VertexStore};

const NO_SLOT: u32 = u32::MAX;

/// Resource caps checked before a level is constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Refuse levels whose predicted `|V_n|` exceeds this.
    pub max_vertices: u64,
    /// Refuse levels whose edge upper bound `|V_{n-1}| * |E_{n-1}|` exceeds this.
    pub max_edge_bound: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_vertices: 10_000_000,
            max_edge_bound: 1_000_000_000,
        }
    }
}

/// One sealed level `G_n`. Vertex indices follow the canonical vertex order,
/// so indices `0..|V_{n-1}|` are exactly `V_{n-1}`.
#[derive(Clone, Debug)]
pub struct GraphLevel {
    n: u32,
    n0: u32,
    prev_vcount: usize,
    vertices: Vec<VertexId>,
    slot: Vec<u32>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl GraphLevel {
    fn from_sorted_edges(
        n: u32,
        n0: u32,
        prev_vcount: usize,
        vertices: Vec<VertexId>,
        store_len: usize,
        edges: &[(u32, u32)],
    ) -> GraphLevel {
        let mut slot = vec![NO_SLOT; store_len];
        for (i, v) in vertices.iter().enumerate() {
            slot[v.index()] = i as u32;
        }
        let mut degree = vec![0usize; vertices.len()];
        for &(a, b) in edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..vertices.len()].to_vec();
        let mut neighbors = vec![0u32; *offsets.last().unwrap()];
        for &(a, b) in edges {
            neighbors[fill[a as usize]] = b;
            fill[a as usize] += 1;
            neighbors[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for i in 0..vertices.len() {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        GraphLevel {
            n,
            n0,
            prev_vcount,
            vertices,
            slot,
            offsets,
            neighbors,
        }
    }

    /// Reassembles a level from stored parts (e.g. a disk cache), validating
    /// vertex order, nesting and the edge list.
    pub fn from_parts(
        store: &VertexStore,
        n: u32,
        prev_vcount: usize,
        vertices: Vec<VertexId>,
        mut edges: Vec<(u32, u32)>,
    ) -> Result<GraphLevel> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        for w in vertices.windows(2) {
            if store.cmp(w[0], w[1]) != std::cmp::Ordering::Less {
                return bad("vertex list is not in canonical order".into());
            }
        }
        if let Some(v) = vertices.iter().find(|v| store.level(**v) > n) {
            return bad(format!("{} is not in V_{n}", store.encode(*v)));
        }
        if vertices.iter().take(prev_vcount).any(|v| store.level(*v) >= n)
            || vertices.iter().skip(prev_vcount).any(|v| store.level(*v) != n)
        {
            return bad("vertex list does not start with V_{n-1}".into());
        }
        for e in edges.iter_mut() {
            if e.0 == e.1 || e.0 as usize >= vertices.len() || e.1 as usize >= vertices.len() {
                return bad(format!("invalid edge {e:?}"));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(GraphLevel::from_sorted_edges(
            n,
            store.n0(),
            prev_vcount,
            vertices,
            store.len(),
            &edges,
        ))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n0(&self) -> u32 {
        self.n0
    }

    pub fn vcount(&self) -> usize {
        self.vertices.len()
    }

    pub fn ecount(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// `|V_{n-1}|`; the first this many indices are the previous level.
    pub fn prev_vcount(&self) -> usize {
        self.prev_vcount
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> VertexId {
        self.vertices[i]
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        match self.slot.get(v.index()) {
            Some(&s) if s != NO_SLOT => Some(s as usize),
            _ => None,
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index_of(v).is_some()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// Edges as index pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.vcount()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| (j as usize) > i)
                .map(move |&j| (i as u32, j))
        })
    }
}

/// The hierarchy `G_0, ..., G_n` over one shared vertex store.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    store: VertexStore,
    levels: Vec<GraphLevel>,
}

impl Hierarchy {
    /// Just `G_0`, the null graph.
    pub fn new(n0: u32) -> Hierarchy {
        let store = VertexStore::new(n0);
        let g0 = GraphLevel::from_sorted_edges(0, n0, 0, Vec::new(), store.len(), &[]);
        Hierarchy {
            store,
            levels: vec![g0],
        }
    }

    /// Builds `G_0..=G_{n_max}`. Vertex caps are checked for every level
    /// before anything is constructed.
    pub fn build(n0: u32, n_max: u32, budget: &Budget) -> Result<Hierarchy> {
        if n0 > 0 {
            let counts = predict_vcounts(n0, n_max);
            for (n, c) in counts.iter().enumerate() {
                check_cap(n as u32, "predicted vertex count", c, budget.max_vertices)?;
            }
        }
        let mut hier = Hierarchy::new(n0);
        hier.extend_to(n_max, budget)?;
        Ok(hier)
    }

    /// Builds further levels up to `n_max`. On a budget error the levels
    /// already built stay valid.
    pub fn extend_to(&mut self, n_max: u32, budget: &Budget) -> Result<()> {
        if self.store.n0() == 0 {
            return Ok(());
        }
        while self.top() < n_max {
            let n = self.top() + 1;
            let predicted = predict_vcount(self.store.n0(), n);
            check_cap(n, "predicted vertex count", &predicted, budget.max_vertices)?;
            if n >= 2 {
                let prev = self.level(n - 1);
                let bound = BigUint::from(prev.vcount()) * BigUint::from(prev.ecount());
                check_cap(n, "edge upper bound", &bound, budget.max_edge_bound)?;
            }
            let level = if n == 1 {
                self.build_first()
            } else {
                self.build_next()
            };
            debug_assert_eq!(BigUint::from(level.vcount()), predicted);
            self.levels.push(level);
        }
        Ok(())
    }

    fn build_first(&self) -> GraphLevel {
        let n0 = self.store.n0();
        let vertices: Vec<VertexId> = self.store.leaves().collect();
        let edges: Vec<(u32, u32)> = (0..n0)
            .flat_map(|i| (i + 1..n0).map(move |j| (i, j)))
            .collect();
        GraphLevel::from_sorted_edges(1, n0, 0, vertices, self.store.len(), &edges)
    }

    fn build_next(&mut self) -> GraphLevel {
        let n = self.top() + 1;
        let prev = &self.levels[n as usize - 1];
        let p = prev.vcount();
        let old = prev.prev_vcount();
        let mut vertices = prev.vertices().to_vec();
        let prev_vertices = prev.vertices().to_vec();
        // new vertices {P[i], P[j]} with P[j] of level n-1, in (i, j) order,
        // which is the canonical order because P itself is sorted
        for i in 0..p {
            for j in (i + 1).max(old)..p {
                vertices.push(self.store.midpoint(prev_vertices[i], prev_vertices[j]));
            }
        }
        let store_len = self.store.len();
        let mut slot = vec![NO_SLOT; store_len];
        for (i, v) in vertices.iter().enumerate() {
            slot[v.index()] = i as u32;
        }
        let prev = &self.levels[n as usize - 1];
        let prev_edges: Vec<(u32, u32)> = prev.edges().collect();
        let store = &self.store;
        let cones: Vec<usize> = (0..p).collect();
        let per_cone = crate::par_map(&cones, |&v| {
            let apex = prev_vertices[v];
            let row: Vec<u32> = prev_vertices
                .iter()
                .map(|&u| {
                    let m = store.find_midpoint(apex, u).expect("midpoint of V_{n-1} interned");
                    slot[m.index()]
                })
                .collect();
            prev_edges
                .iter()
                .map(|&(u, w)| {
                    let (x, y) = (row[u as usize], row[w as usize]);
                    debug_assert_ne!(x, y);
                    if x < y {
                        (x, y)
                    } else {
                        (y, x)
                    }
                })
                .collect::<Vec<_>>()
        });
        let mut edges: Vec<(u32, u32)> = per_cone.into_iter().flatten().collect();
        sort_dedup(&mut edges);
        GraphLevel::from_sorted_edges(n, self.store.n0(), p, vertices, store_len, &edges)
    }

    pub fn n0(&self) -> u32 {
        self.store.n0()
    }

    /// Highest built level.
    pub fn top(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn store(&self) -> &VertexStore {
        &self.store
    }

    /// Mutable access for operations that intern vertices beyond the built
    /// levels (hull iteration, geodesics). Built levels are unaffected.
    pub fn store_mut(&mut self) -> &mut VertexStore {
        &mut self.store
    }

    pub fn level(&self, n: u32) -> &GraphLevel {
        &self.levels[n as usize]
    }

    pub fn get_level(&self, n: u32) -> Result<&GraphLevel> {
        self.levels.get(n as usize).ok_or(Error::LevelNotBuilt(n))
    }

    pub fn levels(&self) -> &[GraphLevel] {
        &self.levels
    }

    /// Index of `v` in `G_n`, or an error if `v` is not in `V_n`.
    pub fn index_in(&self, n: u32, v: VertexId) -> Result<usize> {
        self.get_level(n)?
            .index_of(v)
            .ok_or(Error::NotInLevel { vertex: v, level: n })
    }

    /// Appends a level restored from elsewhere; it must be the next level.
    pub fn push_level(&mut self, level: GraphLevel) -> Result<()> {
        if level.n() != self.top() + 1 || level.prev_vcount() != self.level(self.top()).vcount() {
            return Err(Error::InvalidArgument(format!(
                "level {} does not extend G_{}",
                level.n(),
                self.top()
            )));
        }
        self.levels.push(level);
        Ok(())
    }

    /// All ways of writing `x = m(v, u)` with `v, u` in `V_{n-1}`.
    pub fn decompositions(&self, n: u32, x: VertexId) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(3);
        if n >= 2 && self.store.level(x) < n {
            out.push((x, x));
        }
        if let Term::Pair(lo, hi) = self.store.term(x) {
            if self.store.level(x) <= n {
                out.push((lo, hi));
                out.push((hi, lo));
            }
        }
        out
    }

    /// Cone witnesses `(v, u, w)` for the pair `{x, y}` in `G_n`: `v` in
    /// `V_{n-1}`, `u ~ w` in `G_{n-1}`, `x = m(v, u)` and `y = m(v, w)`.
    pub fn cone_witnesses(&self, n: u32, x: VertexId, y: VertexId) -> Vec<ConeWitness> {
        if n < 2 {
            return Vec::new();
        }
        let prev = self.level(n - 1);
        let mut out = Vec::new();
        for (v, u) in self.decompositions(n, x) {
            for (v2, w) in self.decompositions(n, y) {
                if v != v2 || u == w {
                    continue;
                }
                if let (Some(iu), Some(iw)) = (prev.index_of(u), prev.index_of(w)) {
                    if prev.is_adjacent(iu, iw) {
                        out.push(ConeWitness { apex: v, u, w });
                    }
                }
            }
        }
        out
    }
}

/// `x = m(apex, u)`, `y = m(apex, w)` with `u ~ w` one level down.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConeWitness {
    pub apex: VertexId,
    pub u: VertexId,
    pub w: VertexId,
}

fn sort_dedup(edges: &mut Vec<(u32, u32)>) {
    #[cfg(feature = "parallel")]
    {
        use rayon::slice::ParallelSliceMut;
        edges.par_sort_unstable();
    }
    #[cfg(not(feature = "parallel"))]
    edges.sort_unstable();
    edges.dedup();
}

fn check_cap(level: u32, what: &'static str, requested: &BigUint, cap: u64) -> Result<()> {
    if *requested > BigUint::from(cap) {
        return Err(Error::BudgetExceeded {
            level,
            what,
            requested: requested.to_u128().unwrap_or(u128::MAX),
            cap: cap as u128,
        });
    }
    Ok(())
}

/// Exact `|V_n|` from `|V_0| = 0`, `|V_1| = n0` and
/// `|V_n| = (|V_{n-1}| + |V_{n-2}|) (|V_{n-1}| - |V_{n-2}| + 1) / 2`.
pub fn predict_vcount(n0: u32, n: u32) -> BigUint {
    predict_vcounts(n0, n).pop().unwrap()
}

/// `|V_0|, ..., |V_n|`.
pub fn predict_vcounts(n0: u32, n: u32) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero()];
    if n >= 1 {
        out.push(BigUint::from(n0));
    }
    for k in 2..=n as usize {
        let (a, b) = (&out[k - 1], &out[k - 2]);
        let v = ((a + b) * (a - b + 1u32)) >> 1;
        out.push(v);
    }
    out
}

/// One row of [`check_growth`]; `None` marks an inequality that does not
/// apply at this level.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: u32,
    pub vcount: String,
    pub ecount: Option<String>,
    /// `|V_{n-1}|^2 <= 3 |V_n|`
    pub square_ratio_le_3: Option<bool>,
    pub square_ratio: Option<f64>,
    /// `|V_n| >= |V_{n-2}|^2` (claimed for `n >= 6`)
    pub squares_two_back: Option<bool>,
    /// `|E_n| <= |V_{n-1}| |E_{n-1}|`
    pub edge_recursion: Option<bool>,
    /// `|E_n| / |V_n|^(1 + eps)`
    pub edge_vertex_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub n0: u32,
    pub epsilon: f64,
    pub rows: Vec<GrowthRow>,
}

impl GrowthReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| {
            r.square_ratio_le_3 != Some(false)
                && r.squares_two_back != Some(false)
                && r.edge_recursion != Some(false)
        })
    }
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Tabulates the growth inequalities used for the vertex and edge counts.
/// `vcounts[n]` is `|V_n|`, `ecounts[n]` is `|E_n|` where known.
pub fn check_growth(
    n0: u32,
    vcounts: &[BigUint],
    ecounts: &[Option<BigUint>],
    epsilon: f64,
) -> GrowthReport {
    let rows = (0..vcounts.len())
        .map(|n| {
            let v = &vcounts[n];
            let e = ecounts.get(n).cloned().flatten();
            let mut row = GrowthRow {
                n: n as u32,
                vcount: v.to_string(),
                ecount: e.as_ref().map(|e| e.to_string()),
                square_ratio_le_3: None,
                square_ratio: None,
                squares_two_back: None,
                edge_recursion: None,
                edge_vertex_ratio: None,
            };
            if n >= 1 && n0 >= 2 {
                let sq = &vcounts[n - 1] * &vcounts[n - 1];
                row.square_ratio_le_3 = Some(sq <= v * 3u32);
                row.square_ratio = Some((ln_big(&sq) - ln_big(v)).exp());
                if vcounts[n - 1].is_zero() {
                    row.square_ratio = Some(0.0);
                }
            }
            if n >= 6 {
                row.squares_two_back = Some(*v >= &vcounts[n - 2] * &vcounts[n - 2]);
            }
            if n >= 2 {
                if let (Some(e), Some(Some(pe))) = (&e, ecounts.get(n - 1)) {
                    row.edge_recursion = Some(*e <= &vcounts[n - 1] * pe);
                }
            }
            if let Some(e) = &e {
                if !v.is_zero() {
                    row.edge_vertex_ratio = Some(if e.is_zero() {
                        0.0
                    } else {
                        (ln_big(e) - (1.0 + epsilon) * ln_big(v)).exp()
                    });
                }
            }
            row
        })
        .collect();
    GrowthReport {
        n0,
        epsilon,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(n0: u32, n: u32) -> Vec<u64> {
        predict_vcounts(n0, n)
            .iter()
            .map(|c| c.to_u64().unwrap())
            .collect()
    }

    #[test]
    fn predicted_counts() {
        assert_eq!(counts(2, 7), vec![0, 2, 3, 5, 12, 68, 2280, 2_598_062]);
        assert_eq!(counts(1, 6), vec![0, 1, 1, 1, 1, 1, 1]);
        assert_eq!(counts(3, 4), vec![0, 3, 6, 18, 156]);
        let v8 = predict_vcount(2, 8).to_f64().unwrap();
        assert!((v8 / 3.4e12 - 1.0).abs() < 0.01, "{v8}");
    }

    #[test]
    fn second_level_matches_the_worked_example() {
        let h = Hierarchy::build(2, 2, &Budget::default()).unwrap();
        let g = h.level(2);
        let s = h.store();
        let names: Vec<String> = g.vertices().iter().map(|v| s.encode(*v)).collect();
        assert_eq!(names, ["0", "1", "{0,1}"]);
        let edges: Vec<(String, String)> = g
            .edges()
            .map(|(a, b)| (names[a as usize].clone(), names[b as usize].clone()))
            .collect();
        assert_eq!(
            edges,
            [("0".into(), "{0,1}".into()), ("1".into(), "{0,1}".into())]
        );
    }

    #[test]
    fn small_counts_and_nesting() {
        let h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let got: Vec<(usize, usize)> = h.levels().iter().map(|g| (g.vcount(), g.ecount())).collect();
        assert_eq!(got, [(0, 0), (2, 1), (3, 2), (5, 4), (12, 16), (68, 184)]);
        for n in 2..=5 {
            let (g, p) = (h.level(n), h.level(n - 1));
            assert_eq!(&g.vertices()[..p.vcount()], p.vertices());
        }
    }

    #[test]
    fn zero_and_one_leaf() {
        let h = Hierarchy::build(0, 4, &Budget::default()).unwrap();
        assert_eq!(h.top(), 0);
        let h = Hierarchy::build(1, 5, &Budget::default()).unwrap();
        assert!(h.levels()[1..].iter().all(|g| g.vcount() == 1 && g.ecount() == 0));
    }

    #[test]
    fn budget_fails_fast() {
        let err = Hierarchy::build(2, 8, &Budget::default()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { level: 8, .. }), "{err}");
        let tight = Budget {
            max_vertices: 100,
            max_edge_bound: 1_000,
        };
        let mut h = Hierarchy::build(2, 4, &tight).unwrap();
        // |V_4| * |E_4| = 192 is fine but |V_5| = 68 <= 100 ...
        assert!(h.extend_to(5, &tight).is_ok());
        // ... while |V_6| = 2280 is not
        assert!(matches!(
            h.extend_to(6, &tight),
            Err(Error::BudgetExceeded { level: 6, .. })
        ));
        assert_eq!(h.top(), 5);
    }

    #[test]
    fn growth_table() {
        let v = predict_vcounts(2, 7);
        let e: Vec<Option<BigUint>> = [0u32, 1, 2, 4, 16, 184, 12480]
            .iter()
            .map(|&x| Some(BigUint::from(x)))
            .collect();
        let r = check_growth(2, &v, &e, 0.5);
        assert!(r.all_pass());
        assert!((r.rows[5].square_ratio.unwrap() - 144.0 / 68.0).abs() < 1e-12);
        assert_eq!(r.rows[6].squares_two_back, Some(true));
        assert_eq!(r.rows[2].edge_recursion, Some(true));
        assert_eq!(r.rows[7].edge_recursion, None);
    }

    #[test]
    fn decompositions_and_witnesses() {
        let h = Hierarchy::build(2, 3, &Budget::default()).unwrap();
        let s = h.store();
        let zero = s.leaf(0).unwrap();
        let mid = s.lookup("{0,1}").unwrap().unwrap();
        let x = s.lookup("{0,{0,1}}").unwrap().unwrap();
        assert_eq!(h.decompositions(3, mid).len(), 3);
        assert_eq!(h.decompositions(3, x).len(), 2);
        assert_eq!(h.decompositions(3, zero), vec![(zero, zero)]);
        // 0 ~ {0,{0,1}} in G_3 via apex 0 over the edge 0 ~ {0,1}
        let w = h.cone_witnesses(3, zero, x);
        assert!(w.contains(&ConeWitness { apex: zero, u: zero, w: mid }));
    }
}
