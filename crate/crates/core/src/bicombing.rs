//! Dyadic geodesics induced by the midpoint map, conical checks and hull
//! iteration.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::metric::{scaled, Metrics, RhoInterval};
use crate::report::{CheckMode, CheckReport};
use crate::vertex::{VertexId, VertexStore};

/// A point `p / 2^q` of the unit interval, in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DyadicTime(Dyadic);

/// Deepest supported grid.
pub const MAX_DEPTH: u32 = 40;

impl DyadicTime {
    pub const ZERO: DyadicTime = DyadicTime(Dyadic::ZERO);
    pub const ONE: DyadicTime = DyadicTime(Dyadic::ONE);

    pub fn new(p: u64, q: u32) -> Result<DyadicTime> {
        if q > MAX_DEPTH {
            return Err(Error::InvalidArgument(format!("time exponent {q} above {MAX_DEPTH}")));
        }
        if p > 1u64 << q {
            return Err(Error::InvalidArgument(format!("time {p}/2^{q} is above 1")));
        }
        Ok(DyadicTime(Dyadic::new(p as i64, q)))
    }

    pub fn from_dyadic(t: Dyadic) -> Result<DyadicTime> {
        if t < Dyadic::ZERO || t > Dyadic::ONE || t.exponent() > MAX_DEPTH {
            return Err(Error::InvalidArgument(format!("time {t} outside the dyadic unit grid")));
        }
        Ok(DyadicTime(t))
    }

    pub fn numerator(self) -> u64 {
        self.0.numerator() as u64
    }

    /// Smallest `q` with `t` on the `2^-q` grid.
    pub fn exponent(self) -> u32 {
        self.0.exponent()
    }

    pub fn value(self) -> Dyadic {
        self.0
    }

    pub fn in_grid(self, q: u32) -> bool {
        self.exponent() <= q
    }

    /// `1 - t`.
    pub fn complement(self) -> DyadicTime {
        DyadicTime(Dyadic::ONE - self.0)
    }

    /// `s * t`.
    pub fn mul(self, other: DyadicTime) -> DyadicTime {
        DyadicTime(self.0 * other.0)
    }

    /// The two points `r < s` of the next coarser grid with `t = (r + s) / 2`,
    /// or `None` for `t` in `{0, 1}`.
    pub fn grid_neighbors(self) -> Option<(DyadicTime, DyadicTime)> {
        let q = self.exponent();
        if q == 0 {
            return None;
        }
        let p = self.numerator();
        Some((
            DyadicTime(Dyadic::new(p as i64 - 1, q)),
            DyadicTime(Dyadic::new(p as i64 + 1, q)),
        ))
    }

    /// `0, 1/2^q, ..., 1`.
    pub fn grid(q: u32) -> impl Iterator<Item = DyadicTime> {
        (0..=(1u64 << q)).map(move |p| DyadicTime(Dyadic::new(p as i64, q)))
    }
}

impl fmt::Display for DyadicTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for DyadicTime {
    type Err = Error;

    fn from_str(s: &str) -> Result<DyadicTime> {
        DyadicTime::from_dyadic(s.parse::<Dyadic>().map_err(Error::InvalidArgument)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeodesicSample {
    pub x: VertexId,
    pub y: VertexId,
    pub t: DyadicTime,
    pub point: VertexId,
    /// Recursion depth, the exponent of `t`.
    pub depth: u32,
}

fn eval<F>(x: VertexId, y: VertexId, t: DyadicTime, mid: &mut F) -> Option<VertexId>
where
    F: FnMut(VertexId, VertexId) -> Option<VertexId>,
{
    fn go<F>(
        x: VertexId,
        y: VertexId,
        t: DyadicTime,
        mid: &mut F,
        memo: &mut HashMap<DyadicTime, VertexId>,
    ) -> Option<VertexId>
    where
        F: FnMut(VertexId, VertexId) -> Option<VertexId>,
    {
        if t == DyadicTime::ZERO {
            return Some(x);
        }
        if t == DyadicTime::ONE {
            return Some(y);
        }
        if let Some(&v) = memo.get(&t) {
            return Some(v);
        }
        let (r, s) = t.grid_neighbors().expect("interior time");
        let a = go(x, y, r, mid, memo)?;
        let b = go(x, y, s, mid, memo)?;
        let v = mid(a, b)?;
        memo.insert(t, v);
        Some(v)
    }
    go(x, y, t, mid, &mut HashMap::new())
}

/// `sigma_xy(t)`, interning any midpoints not yet in the store.
pub fn geodesic_point(store: &mut VertexStore, x: VertexId, y: VertexId, t: DyadicTime) -> GeodesicSample {
    let point = eval(x, y, t, &mut |a, b| Some(store.midpoint(a, b))).expect("interning never fails");
    GeodesicSample {
        x,
        y,
        t,
        point,
        depth: t.exponent(),
    }
}

/// Read-only `sigma_xy(t)`; `None` if some intermediate midpoint was never
/// interned.
pub fn find_geodesic_point(
    store: &VertexStore,
    x: VertexId,
    y: VertexId,
    t: DyadicTime,
) -> Option<GeodesicSample> {
    let point = eval(x, y, t, &mut |a, b| store.find_midpoint(a, b))?;
    Some(GeodesicSample {
        x,
        y,
        t,
        point,
        depth: t.exponent(),
    })
}

/// `sigma_xy` on the whole grid `G_q`, interning as needed.
pub fn geodesic_grid(store: &mut VertexStore, x: VertexId, y: VertexId, q: u32) -> Vec<VertexId> {
    grid_with(x, y, q, &mut |a, b| Some(store.midpoint(a, b))).expect("interning never fails")
}

/// Read-only `sigma_xy` on `G_q`.
pub fn find_geodesic_grid(store: &VertexStore, x: VertexId, y: VertexId, q: u32) -> Option<Vec<VertexId>> {
    grid_with(x, y, q, &mut |a, b| store.find_midpoint(a, b))
}

fn grid_with<F>(x: VertexId, y: VertexId, q: u32, mid: &mut F) -> Option<Vec<VertexId>>
where
    F: FnMut(VertexId, VertexId) -> Option<VertexId>,
{
    let mut row = vec![x, y];
    for _ in 0..q {
        let mut next = Vec::with_capacity(2 * row.len() - 1);
        for w in row.windows(2) {
            next.push(w[0]);
            next.push(mid(w[0], w[1])?);
        }
        next.push(*row.last().unwrap());
        row = next;
    }
    Some(row)
}

/// Level bound `max(level x, level y) + q` for points of `sigma_xy` on `G_q`.
pub fn sample_level(store: &VertexStore, x: VertexId, y: VertexId, q: u32) -> u32 {
    store.level(x).max(store.level(y)) + q
}

fn require_level(store: &VertexStore, x: VertexId, y: VertexId, q: u32, big_n: u32) -> Result<()> {
    let needed = sample_level(store, x, y, q);
    if needed > big_n {
        return Err(Error::SampleLevelExceeded {
            needed,
            available: big_n,
        });
    }
    Ok(())
}

fn grid_in_level(metrics: &Metrics<'_>, x: VertexId, y: VertexId, q: u32, big_n: u32) -> Result<Vec<VertexId>> {
    let store = metrics.store();
    require_level(store, x, y, q, big_n)?;
    metrics.level(big_n)?;
    Ok(find_geodesic_grid(store, x, y, q).expect("samples lie in a built level"))
}

/// Interval consistency of `rho(sigma(s), sigma(t)) = |s - t| rho(x, y)` for
/// all `s < t` in `G_q`, with intervals taken at level `big_n`.
pub fn verify_geodesic(
    metrics: &Metrics<'_>,
    x: VertexId,
    y: VertexId,
    q: u32,
    big_n: u32,
) -> Result<CheckReport> {
    let pts = grid_in_level(metrics, x, y, q, big_n)?;
    let ends = metrics.rho_interval(x, y, big_n)?;
    let mut acc = SlackAcc::default();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let gap = Dyadic::new((j - i) as i64, q);
            let iv = metrics.rho_interval(pts[i], pts[j], big_n)?;
            acc.push(interval_slack(iv, ends, gap));
        }
    }
    Ok(acc.report("geodesic_interval", big_n, CheckMode::Exhaustive))
}

// min of `gap*ends.upper - iv.lower` and `iv.upper - gap*ends.lower`
fn interval_slack(iv: RhoInterval, ends: RhoInterval, gap: Dyadic) -> Dyadic {
    (gap * ends.upper - iv.lower).min(iv.upper - gap * ends.lower)
}

/// Interval form of the conical inequality for the limit bicombing:
/// `lower rho(sigma_xy(t), sigma_x'y'(t)) <= (1-t) upper rho(x,x') + t upper rho(y,y')`
/// over `t` in `G_q`.
pub fn verify_limit_conical(
    metrics: &Metrics<'_>,
    (x, y): (VertexId, VertexId),
    (x2, y2): (VertexId, VertexId),
    q: u32,
    big_n: u32,
) -> Result<CheckReport> {
    let a = grid_in_level(metrics, x, y, q, big_n)?;
    let b = grid_in_level(metrics, x2, y2, q, big_n)?;
    let dx = metrics.rho_interval(x, x2, big_n)?;
    let dy = metrics.rho_interval(y, y2, big_n)?;
    let mut acc = SlackAcc::default();
    for (k, t) in DyadicTime::grid(q).enumerate() {
        let t = t.value();
        let iv = metrics.rho_interval(a[k], b[k], big_n)?;
        acc.push((Dyadic::ONE - t) * dx.upper + t * dy.upper - iv.lower);
    }
    Ok(acc.report("limit_conical_interval", big_n, CheckMode::Exhaustive))
}

#[derive(Default)]
struct SlackAcc {
    instances: u64,
    violations: u64,
    max_slack: Option<Dyadic>,
}

impl SlackAcc {
    fn push(&mut self, slack: Dyadic) {
        self.instances += 1;
        if slack < Dyadic::ZERO {
            self.violations += 1;
        }
        self.max_slack = Some(self.max_slack.map_or(slack, |m| m.max(slack)));
    }

    fn merge(&mut self, other: SlackAcc) {
        self.instances += other.instances;
        self.violations += other.violations;
        if let Some(s) = other.max_slack {
            self.max_slack = Some(self.max_slack.map_or(s, |m| m.max(s)));
        }
    }

    fn report(self, check: &str, level: u32, mode: CheckMode) -> CheckReport {
        CheckReport {
            check: check.into(),
            level,
            mode: mode.label().into(),
            instances: self.instances,
            violations: self.violations,
            max_slack: self.max_slack.unwrap_or(Dyadic::ZERO).to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConicalReport {
    /// `d_n(m(x1,x2), m(y1,y2)) <= d_{n-1}(x1,y1) + d_{n-1}(x2,y2)`.
    pub four_point: CheckReport,
    /// `rho_n(m(x,y), m(x,z)) <= rho_{n-1}(y,z) / 2`, exact dyadics.
    pub three_point: CheckReport,
}

impl ConicalReport {
    pub fn passed(&self) -> bool {
        self.four_point.passed() && self.three_point.passed()
    }
}

/// Cap on exhaustive quadruples.
pub const MAX_EXHAUSTIVE: u64 = 2_000_000_000;

/// Discrete conical inequality over quadruples of `V_{n-1}` and the scaled
/// three-point form, exhaustive or sampled.
pub fn verify_conical(metrics: &Metrics<'_>, n: u32, mode: CheckMode) -> Result<ConicalReport> {
    if n < 1 {
        return Err(Error::InvalidArgument("conical check needs n >= 1".into()));
    }
    let prev = metrics.level(n - 1)?;
    let level = metrics.level(n)?;
    let tp = metrics.table(n - 1)?;
    let tn = metrics.table(n)?;
    let store = metrics.store();
    let p = prev.vcount();
    if let CheckMode::Exhaustive = mode {
        let quads = (p as u64).pow(4);
        if quads > MAX_EXHAUSTIVE {
            return Err(Error::BudgetExceeded {
                level: n,
                what: "exhaustive conical quadruples",
                requested: quads as u128,
                cap: MAX_EXHAUSTIVE as u128,
            });
        }
    }
    let mut mid = vec![0u32; p * p];
    for i in 0..p {
        for j in 0..p {
            let m = store
                .find_midpoint(prev.vertex(i), prev.vertex(j))
                .expect("midpoints of V_{n-1} are interned");
            mid[i * p + j] = level.index_of(m).expect("midpoint in V_n") as u32;
        }
    }
    let m = |i: usize, j: usize| mid[i * p + j] as usize;
    let four = |x1: usize, x2: usize, y1: usize, y2: usize, acc: &mut SlackAcc| {
        let lhs = tn.d(m(x1, x2), m(y1, y2)) as i64;
        let rhs = (tp.d(x1, y1) + tp.d(x2, y2)) as i64;
        acc.push(Dyadic::from_int(rhs - lhs));
    };
    let three = |x: usize, y: usize, z: usize, acc: &mut SlackAcc| {
        let lhs = scaled(tn.d(m(x, y), m(x, z)), n);
        let rhs = scaled(tp.d(y, z), n - 1).half();
        acc.push(rhs - lhs);
    };

    let (four_acc, three_acc) = match mode {
        CheckMode::Exhaustive => {
            let rows: Vec<usize> = (0..p).collect();
            let parts = crate::par_map(&rows, |&x1| {
                let mut a = SlackAcc::default();
                for x2 in 0..p {
                    for y1 in 0..p {
                        for y2 in 0..p {
                            four(x1, x2, y1, y2, &mut a);
                        }
                    }
                }
                let mut b = SlackAcc::default();
                for y in 0..p {
                    for z in 0..p {
                        three(x1, y, z, &mut b);
                    }
                }
                (a, b)
            });
            fold(parts)
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let picks: Vec<[usize; 4]> = (0..samples)
                .map(|_| std::array::from_fn(|_| rng.gen_range(0..p)))
                .collect();
            let chunks: Vec<&[[usize; 4]]> = picks.chunks(4096).collect();
            let parts = crate::par_map(&chunks, |chunk| {
                let (mut a, mut b) = (SlackAcc::default(), SlackAcc::default());
                for &[x1, x2, y1, y2] in chunk.iter() {
                    four(x1, x2, y1, y2, &mut a);
                    three(x1, x2, y1, &mut b);
                }
                (a, b)
            });
            fold(parts)
        }
    };
    Ok(ConicalReport {
        four_point: four_acc.report("conical_four_point", n, mode),
        three_point: three_acc.report("conical_three_point_scaled", n, mode),
    })
}

fn fold(parts: Vec<(SlackAcc, SlackAcc)>) -> (SlackAcc, SlackAcc) {
    let mut a = SlackAcc::default();
    let mut b = SlackAcc::default();
    for (x, y) in parts {
        a.merge(x);
        b.merge(y);
    }
    (a, b)
}

/// `M_1(A), ..., M_k(A)` with `M_{i}(A) = m(M_{i-1}(A) x M_{i-1}(A))`, each
/// sorted in canonical order. Fails before a step whose candidate count
/// `s(s+1)/2` would exceed `max_vertices`.
pub fn hull_iterate(
    store: &mut VertexStore,
    a: &[VertexId],
    k: u32,
    max_vertices: u64,
) -> Result<Vec<Vec<VertexId>>> {
    if a.is_empty() {
        return Err(Error::InvalidArgument("hull of an empty set".into()));
    }
    let mut cur: Vec<VertexId> = a.to_vec();
    sort_dedup(store, &mut cur);
    let mut out = Vec::with_capacity(k as usize);
    for step in 1..=k {
        let s = cur.len() as u64;
        let candidates = s * (s + 1) / 2;
        if candidates > max_vertices {
            return Err(Error::BudgetExceeded {
                level: step,
                what: "hull candidates",
                requested: candidates as u128,
                cap: max_vertices as u128,
            });
        }
        let mut next = Vec::with_capacity(candidates as usize);
        for i in 0..cur.len() {
            for j in i..cur.len() {
                next.push(store.midpoint(cur[i], cur[j]));
            }
        }
        sort_dedup(store, &mut next);
        out.push(next.clone());
        cur = next;
    }
    Ok(out)
}

fn sort_dedup(store: &VertexStore, v: &mut Vec<VertexId>) {
    v.sort_by(|&a, &b| store.cmp(a, b));
    v.dedup();
}

/// `sigma_xy(t) == sigma_yx(1 - t)` on all of `G_q`, as representatives.
pub fn check_reversibility(store: &mut VertexStore, x: VertexId, y: VertexId, q: u32) -> bool {
    let fwd = geodesic_grid(store, x, y, q);
    let mut back = geodesic_grid(store, y, x, q);
    back.reverse();
    fwd == back
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyProbe {
    pub level: u32,
    pub depth: u32,
    /// `(s, t)` pairs whose points fit in the level.
    pub tested: u64,
    pub skipped: u64,
    /// Pairs where the two representatives differ.
    pub representative_mismatches: u64,
    /// Pairs where the limit distance is certified positive.
    pub certified: Vec<ConsistencyWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyWitness {
    pub s: DyadicTime,
    pub t: DyadicTime,
    pub lhs: String,
    pub rhs: String,
    pub interval: RhoInterval,
}

/// Searches `G_q x G_q` for `sigma_xy(s t) != sigma_{x, sigma_xy(t)}(s)`.
/// Only a distance bounded away from zero at level `big_n` counts as a
/// counterexample; this is evidence gathering, not a verified property.
pub fn consistency_probe(
    metrics: &Metrics<'_>,
    x: VertexId,
    y: VertexId,
    q: u32,
    big_n: u32,
) -> Result<ConsistencyProbe> {
    let store = metrics.store();
    metrics.level(big_n)?;
    let mut probe = ConsistencyProbe {
        level: big_n,
        depth: q,
        tested: 0,
        skipped: 0,
        representative_mismatches: 0,
        certified: Vec::new(),
    };
    let in_level = |v: VertexId| store.level(v) <= big_n;
    for t in DyadicTime::grid(q) {
        let Some(mid) = find_geodesic_point(store, x, y, t).filter(|g| in_level(g.point)) else {
            probe.skipped += (1u64 << q) + 1;
            continue;
        };
        for s in DyadicTime::grid(q) {
            let st = s.mul(t);
            let lhs = find_geodesic_point(store, x, y, st).filter(|g| in_level(g.point));
            let rhs = find_geodesic_point(store, x, mid.point, s).filter(|g| in_level(g.point));
            let (Some(lhs), Some(rhs)) = (lhs, rhs) else {
                probe.skipped += 1;
                continue;
            };
            probe.tested += 1;
            if lhs.point != rhs.point {
                probe.representative_mismatches += 1;
                let iv = metrics.rho_interval(lhs.point, rhs.point, big_n)?;
                if iv.certifies_positive() {
                    probe.certified.push(ConsistencyWitness {
                        s,
                        t,
                        lhs: store.encode(lhs.point),
                        rhs: store.encode(rhs.point),
                        interval: iv,
                    });
                }
            }
        }
    }
    Ok(probe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Budget, Hierarchy};

    fn t(p: u64, q: u32) -> DyadicTime {
        DyadicTime::new(p, q).unwrap()
    }

    #[test]
    fn times() {
        assert_eq!(t(2, 2), t(1, 1));
        assert_eq!(t(4, 2), DyadicTime::ONE);
        assert!(DyadicTime::new(5, 2).is_err());
        assert_eq!(t(3, 3).grid_neighbors(), Some((t(1, 2), t(1, 1))));
        assert_eq!(DyadicTime::ONE.grid_neighbors(), None);
        assert!(t(3, 3).in_grid(3) && !t(3, 3).in_grid(2));
        assert_eq!(t(1, 2).complement(), t(3, 2));
        assert_eq!("3/8".parse::<DyadicTime>().unwrap(), t(3, 3));
        assert!("3/2".parse::<DyadicTime>().is_err());
        assert_eq!(DyadicTime::grid(2).count(), 5);
    }

    #[test]
    fn recursion_examples() {
        let mut s = VertexStore::new(2);
        let (a, b) = (s.leaf(0).unwrap(), s.leaf(1).unwrap());
        let half = geodesic_point(&mut s, a, b, t(1, 1)).point;
        assert_eq!(half, s.find_midpoint(a, b).unwrap());
        let quarter = geodesic_point(&mut s, a, b, t(1, 2));
        assert_eq!(s.encode(quarter.point), "{0,{0,1}}");
        assert_eq!(quarter.depth, 2);
        for p in 0..=8 {
            assert_eq!(geodesic_point(&mut s, a, a, t(p, 3)).point, a);
        }
        let grid = geodesic_grid(&mut s, a, b, 3);
        for (k, v) in grid.iter().enumerate() {
            assert_eq!(*v, geodesic_point(&mut s, a, b, t(k as u64, 3)).point);
            assert!(s.level(*v) <= sample_level(&s, a, b, 3));
        }
        assert!(check_reversibility(&mut s, a, half, 4));
    }

    #[test]
    fn geodesic_intervals() {
        let h = Hierarchy::build(2, 6, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let s = h.store();
        let (a, b) = (s.leaf(0).unwrap(), s.leaf(1).unwrap());
        let r = verify_geodesic(&m, a, b, 2, 6).unwrap();
        assert_eq!((r.instances, r.violations), (10, 0));
        let q = find_geodesic_grid(s, a, b, 2).unwrap();
        assert!(m.rho_interval(q[1], q[3], 6).unwrap().contains(Dyadic::new(1, 1)));
        let r = verify_geodesic(&m, a, a, 3, 6).unwrap();
        assert_eq!((r.violations, r.max_slack.as_str()), (0, "0"));
        assert!(matches!(
            verify_geodesic(&m, a, b, 6, 6),
            Err(Error::SampleLevelExceeded { needed: 7, available: 6 })
        ));
        let r = verify_limit_conical(&m, (a, b), (b, a), 3, 6).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn conical_small_levels() {
        let h = Hierarchy::build(2, 4, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let r = verify_conical(&m, 4, CheckMode::Exhaustive).unwrap();
        assert_eq!(r.four_point.instances, 5u64.pow(4));
        assert_eq!(r.three_point.instances, 5u64.pow(3));
        assert!(r.passed());
        let r = verify_conical(&m, 3, CheckMode::Sampled { samples: 500, seed: 9 }).unwrap();
        assert_eq!(r.four_point.instances, 500);
        assert!(r.passed());
    }

    #[test]
    fn hulls() {
        let h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let mut s = h.store().clone();
        let v1: Vec<_> = h.level(1).vertices().to_vec();
        let hull = hull_iterate(&mut s, &v1, 4, 1_000_000).unwrap();
        for (i, m) in hull.iter().enumerate() {
            assert_eq!(m.as_slice(), h.level(i as u32 + 2).vertices());
        }
        assert_eq!(hull[3].len(), 68);
        let leaf = s.leaf(0).unwrap();
        let single = hull_iterate(&mut s, &[leaf], 3, 10).unwrap();
        assert!(single.iter().all(|m| m == &[leaf]));
        assert!(matches!(
            hull_iterate(&mut s, &v1, 5, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn probe_runs() {
        let h = Hierarchy::build(2, 6, &Budget::default()).unwrap();
        let m = Metrics::new(&h);
        let s = h.store();
        let p = consistency_probe(&m, s.leaf(0).unwrap(), s.leaf(1).unwrap(), 2, 6).unwrap();
        assert_eq!(p.tested + p.skipped, 25);
        assert!(p.tested > 0);
    }
}
