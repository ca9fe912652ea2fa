use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{ConeWitness, GraphLevel, Hierarchy};
use crate::metric::DistanceTable;
use crate::vertex::VertexId;

/// The two paths of `G_{n-1}` underlying a path of `G_n`, with consecutive
/// repeats removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPaths {
    pub gamma: Vec<VertexId>,
    pub eta: Vec<VertexId>,
}

impl SplitPaths {
    pub fn lengths(&self) -> (usize, usize) {
        (self.gamma.len() - 1, self.eta.len() - 1)
    }
}

fn inconsistent<T>(step: usize, reason: String) -> Result<T> {
    Err(Error::InconsistentWitness { step, reason })
}

fn check_witness(hier: &Hierarchy, n: u32, step: usize, x: VertexId, y: VertexId, c: &ConeWitness) -> Result<()> {
    let store = hier.store();
    if store.find_midpoint(c.apex, c.u) != Some(x) || store.find_midpoint(c.apex, c.w) != Some(y) {
        return inconsistent(step, "witness midpoints do not match the path".into());
    }
    let prev = hier.get_level(n - 1)?;
    match (prev.index_of(c.apex), prev.index_of(c.u), prev.index_of(c.w)) {
        (Some(_), Some(iu), Some(iw)) if prev.is_adjacent(iu, iw) => Ok(()),
        _ => inconsistent(step, format!("witness is not a cone over an edge of G_{}", n - 1)),
    }
}

/// Splits `x_0..x_l` into `gamma = (a_0..a_{l-1})` and `eta = (b_0..b_l)` with
/// `x_0 = m(a_0, b_0)` and `x_i = m(a_{i-1}, b_i)`, following the witnesses.
/// At each step the witness must enter through `a_{i-1}` (then `a` moves) or
/// through `b_i` (then `b` moves). Only `a_0..a_{l-1}` and `b_0..b_l` exist;
/// no further entries are produced.
pub fn split_path(
    hier: &Hierarchy,
    n: u32,
    path: &[VertexId],
    witnesses: &[ConeWitness],
) -> Result<SplitPaths> {
    if n < 2 {
        return Err(Error::InvalidArgument("split_path needs n >= 2".into()));
    }
    let Some(&x0) = path.first() else {
        return Err(Error::InvalidArgument("empty path".into()));
    };
    let l = path.len() - 1;
    if witnesses.len() != l {
        return Err(Error::InvalidArgument(format!(
            "{} witnesses for a path of length {l}",
            witnesses.len()
        )));
    }
    if l == 0 {
        let (a, b) = hier
            .decompositions(n, x0)
            .into_iter()
            .next()
            .ok_or(Error::NotInLevel { vertex: x0, level: n })?;
        return Ok(SplitPaths {
            gamma: vec![a],
            eta: vec![b],
        });
    }
    check_witness(hier, n, 1, path[0], path[1], &witnesses[0])?;
    let mut a = vec![witnesses[0].apex];
    let mut b = vec![witnesses[0].u, witnesses[0].w];
    for i in 1..l {
        let c = &witnesses[i];
        check_witness(hier, n, i + 1, path[i], path[i + 1], c)?;
        let (a_prev, b_cur) = (a[i - 1], b[i]);
        if c.u == a_prev && c.apex == b_cur {
            a.push(c.w);
            b.push(b_cur);
        } else if c.u == b_cur && c.apex == a_prev {
            a.push(a_prev);
            b.push(c.w);
        } else {
            return inconsistent(i + 1, "witness enters through neither a_{i-1} nor b_i".into());
        }
    }
    let dedup = |mut v: Vec<VertexId>| {
        v.dedup();
        v
    };
    let out = SplitPaths {
        gamma: dedup(a),
        eta: dedup(b),
    };
    let (lg, le) = out.lengths();
    if lg + le != l {
        return inconsistent(l, format!("split lengths {lg} + {le} differ from {l}"));
    }
    Ok(out)
}

/// Searches the cone witnesses of each step for a chain accepted by
/// [`split_path`].
pub fn witness_chain(hier: &Hierarchy, n: u32, path: &[VertexId]) -> Result<Vec<ConeWitness>> {
    if n < 2 {
        return Err(Error::InvalidArgument("witness chains need n >= 2".into()));
    }
    let level = hier.get_level(n)?;
    for (i, w) in path.windows(2).enumerate() {
        let (x, y) = (hier.index_in(n, w[0])?, hier.index_in(n, w[1])?);
        if !level.is_adjacent(x, y) {
            return Err(Error::InvalidArgument(format!("path step {} is not an edge of G_{n}", i + 1)));
        }
    }
    if path.len() < 2 {
        return Ok(Vec::new());
    }
    let mut dead = HashSet::new();
    let mut chain = Vec::with_capacity(path.len() - 1);
    for first in hier.cone_witnesses(n, path[0], path[1]) {
        chain.push(first);
        if extend(hier, n, path, 1, first.apex, first.w, &mut chain, &mut dead) {
            return Ok(chain);
        }
        chain.pop();
    }
    inconsistent(1, "no consistent witness chain".into())
}

// state before step i + 1: x_i = m(a, b) with a = a_{i-1}, b = b_i
#[allow(clippy::too_many_arguments)]
fn extend(
    hier: &Hierarchy,
    n: u32,
    path: &[VertexId],
    i: usize,
    a: VertexId,
    b: VertexId,
    chain: &mut Vec<ConeWitness>,
    dead: &mut HashSet<(usize, VertexId, VertexId)>,
) -> bool {
    if i + 1 == path.len() {
        return true;
    }
    if dead.contains(&(i, a, b)) {
        return false;
    }
    for c in hier.cone_witnesses(n, path[i], path[i + 1]) {
        let next = if c.u == a && c.apex == b {
            (c.w, b)
        } else if c.u == b && c.apex == a {
            (a, c.w)
        } else {
            continue;
        };
        chain.push(c);
        if extend(hier, n, path, i + 1, next.0, next.1, chain, dead) {
            return true;
        }
        chain.pop();
    }
    dead.insert((i, a, b));
    false
}

/// A shortest path from `src` to `dst` (level indices of `G_n`) that admits a
/// witness chain, found by depth-first search over shortest-path steps and
/// witness states. `None` when no shortest path splits.
pub fn split_between(
    hier: &Hierarchy,
    table: &DistanceTable,
    n: u32,
    src: usize,
    dst: usize,
) -> Result<Option<(Vec<VertexId>, Vec<ConeWitness>, SplitPaths)>> {
    if n < 2 {
        return Err(Error::InvalidArgument("split_between needs n >= 2".into()));
    }
    let level = hier.get_level(n)?;
    let x0 = level.vertex(src);
    if src == dst {
        return Ok(Some((vec![x0], Vec::new(), split_path(hier, n, &[x0], &[])?)));
    }
    let mut path = vec![src];
    let mut chain = Vec::new();
    let mut dead = HashSet::new();
    let steps = |cur: usize| -> Vec<usize> {
        let d = table.d(cur, dst);
        level
            .neighbors(cur)
            .iter()
            .map(|&y| y as usize)
            .filter(|&y| table.d(y, dst) + 1 == d)
            .collect()
    };
    for y in steps(src) {
        for c in hier.cone_witnesses(n, x0, level.vertex(y)) {
            path.push(y);
            chain.push(c);
            if search(hier, level, n, &steps, dst, &mut path, &mut chain, c.apex, c.w, &mut dead) {
                let verts: Vec<VertexId> = path.iter().map(|&i| level.vertex(i)).collect();
                let split = split_path(hier, n, &verts, &chain)?;
                return Ok(Some((verts, chain, split)));
            }
            path.pop();
            chain.pop();
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn search(
    hier: &Hierarchy,
    level: &GraphLevel,
    n: u32,
    steps: &dyn Fn(usize) -> Vec<usize>,
    dst: usize,
    path: &mut Vec<usize>,
    chain: &mut Vec<ConeWitness>,
    a: VertexId,
    b: VertexId,
    dead: &mut HashSet<(usize, VertexId, VertexId)>,
) -> bool {
    let cur = *path.last().unwrap();
    if cur == dst {
        return true;
    }
    if dead.contains(&(cur, a, b)) {
        return false;
    }
    for y in steps(cur) {
        for c in hier.cone_witnesses(n, level.vertex(cur), level.vertex(y)) {
            let next = if c.u == a && c.apex == b {
                (c.w, b)
            } else if c.u == b && c.apex == a {
                (a, c.w)
            } else {
                continue;
            };
            path.push(y);
            chain.push(c);
            if search(hier, level, n, steps, dst, path, chain, next.0, next.1, dead) {
                return true;
            }
            path.pop();
            chain.pop();
        }
    }
    dead.insert((cur, a, b));
    false
}

/// A uniformly stepped shortest path from `src` to `dst` (level indices).
pub fn random_shortest_path<R: Rng>(
    level: &GraphLevel,
    table: &DistanceTable,
    src: usize,
    dst: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut path = vec![src];
    let mut cur = src;
    while cur != dst {
        let d = table.d(cur, dst);
        let steps: Vec<usize> = level
            .neighbors(cur)
            .iter()
            .map(|&y| y as usize)
            .filter(|&y| table.d(y, dst) + 1 == d)
            .collect();
        cur = *steps.choose(rng).expect("shortest path continues");
        path.push(cur);
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Budget;
    use crate::metric::Metrics;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degenerate_path() {
        let h = Hierarchy::build(2, 3, &Budget::default()).unwrap();
        let x = h.level(3).vertex(4);
        let s = split_path(&h, 3, &[x], &[]).unwrap();
        assert_eq!((s.gamma.len(), s.eta.len()), (1, 1));
        assert_eq!(h.store().find_midpoint(s.gamma[0], s.eta[0]), Some(x));
    }

    #[test]
    fn cone_path_splits_back() {
        let mut h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let prev = h.level(4).clone();
        let t4 = m.table(4).unwrap();
        // p-path and q-path in G_4
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_shortest_path(&prev, t4, 0, 11, &mut rng);
        let q = random_shortest_path(&prev, t4, 1, 7, &mut rng);
        drop(m);
        let store = h.store_mut();
        let (pv, qv): (Vec<_>, Vec<_>) = (
            p.iter().map(|&i| prev.vertex(i)).collect(),
            q.iter().map(|&i| prev.vertex(i)).collect(),
        );
        // r_i = m(p_0, q_i), then m(p_j, q_last)
        let mut path = Vec::new();
        let mut wit = Vec::new();
        for i in 0..qv.len() {
            path.push(store.midpoint(pv[0], qv[i]));
            if i > 0 {
                wit.push(ConeWitness { apex: pv[0], u: qv[i - 1], w: qv[i] });
            }
        }
        let last = *qv.last().unwrap();
        for j in 1..pv.len() {
            path.push(store.midpoint(pv[j], last));
            wit.push(ConeWitness { apex: last, u: pv[j - 1], w: pv[j] });
        }
        // the first step enters with apex p_0 and moves b along q
        let s = split_path(&h, 5, &path, &wit).unwrap();
        assert_eq!(s.gamma, pv);
        assert_eq!(s.eta, qv);
    }

    #[test]
    fn every_pair_splits_up_to_level_four() {
        let h = Hierarchy::build(2, 4, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let (t4, t3) = (m.table(4).unwrap(), m.table(3).unwrap());
        for x in 0..12 {
            for y in 0..12 {
                let (path, _, s) = split_between(&h, t4, 4, x, y).unwrap().unwrap();
                let (lg, le) = s.lengths();
                assert_eq!(lg + le, t4.d(x, y) as usize);
                assert_eq!(path.len() - 1, t4.d(x, y) as usize);
                let ends = |v: &[VertexId]| (h.index_in(3, v[0]).unwrap(), h.index_in(3, *v.last().unwrap()).unwrap());
                let (g0, g1) = ends(&s.gamma);
                let (e0, e1) = ends(&s.eta);
                assert_eq!(t3.d(g0, g1) as usize, lg);
                assert_eq!(t3.d(e0, e1) as usize, le);
            }
        }
    }

    #[test]
    fn random_paths_split_or_report() {
        let h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let (g5, t5, t4) = (h.level(5), m.table(5).unwrap(), m.table(4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut failed = 0;
        for _ in 0..1000 {
            let (x, y) = (rng.gen_range(0..68), rng.gen_range(0..68));
            let path: Vec<VertexId> = random_shortest_path(g5, t5, x, y, &mut rng)
                .into_iter()
                .map(|i| g5.vertex(i))
                .collect();
            let chain = match witness_chain(&h, 5, &path) {
                Ok(c) => c,
                Err(Error::InconsistentWitness { .. }) => {
                    failed += 1;
                    continue;
                }
                Err(e) => panic!("{e}"),
            };
            let s = split_path(&h, 5, &path, &chain).unwrap();
            let (lg, le) = s.lengths();
            assert_eq!(lg + le, path.len() - 1);
            let ends = |v: &[VertexId]| (h.index_in(4, v[0]).unwrap(), h.index_in(4, *v.last().unwrap()).unwrap());
            let (g0, g1) = ends(&s.gamma);
            let (e0, e1) = ends(&s.eta);
            assert_eq!(t4.d(g0, g1) as usize, lg);
            assert_eq!(t4.d(e0, e1) as usize, le);
        }
        // paths through an old vertex entered and left by different
        // decompositions have no chain
        assert!(failed > 0 && failed < 1000);
    }

    #[test]
    fn decomposition_switch_has_no_chain() {
        let mut h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let path: Vec<VertexId> = [
            "{{0,{0,1}},{0,{0,{0,1}}}}",
            "{0,{0,1}}",
            "{0,{{0,1},{1,{0,1}}}}",
            "{0,{1,{0,1}}}",
            "{0,{1,{1,{0,1}}}}",
        ]
        .iter()
        .map(|s| h.store_mut().decode(s).unwrap())
        .collect();
        // step 1 enters {0,{0,1}} as m(c, c); step 2 leaves it as m(0, {0,1})
        assert!(matches!(
            witness_chain(&h, 5, &path),
            Err(Error::InconsistentWitness { step: 1, .. })
        ));
        let m = Metrics::new(&h);
        let t5 = m.table(5).unwrap();
        let (x, y) = (h.index_in(5, path[0]).unwrap(), h.index_in(5, path[4]).unwrap());
        assert_eq!(t5.d(x, y), 4);
        assert!(split_between(&h, t5, 5, x, y).unwrap().is_none());
    }

    #[test]
    fn rejects_bad_witness() {
        let h = Hierarchy::build(2, 4, &Budget::default()).unwrap();
        let g = h.level(4);
        let (x, y) = g.edges().next().unwrap();
        let (x, y) = (g.vertex(x as usize), g.vertex(y as usize));
        let mut c = h.cone_witnesses(4, x, y)[0];
        std::mem::swap(&mut c.u, &mut c.w);
        assert!(matches!(
            split_path(&h, 4, &[x, y], &[c]),
            Err(Error::InconsistentWitness { step: 1, .. })
        ));
    }
}
