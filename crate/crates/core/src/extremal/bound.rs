use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{distance_histogram, DEFAULT_MAX_BFS_WORK};
use crate::error::{Error, Result};
use crate::graph::{predict_vcount, Hierarchy};

/// `alpha = 32 * 9`.
pub const ALPHA: u64 = 288;

/// Counts known for one level.
#[derive(Clone, Debug, Serialize)]
pub struct LevelCounts {
    pub level: u32,
    pub vcount: u64,
    pub ecount: u64,
    /// Unordered pairs per distance, when affordable.
    pub histogram: Option<Vec<u64>>,
}

impl LevelCounts {
    /// `|E(G^m)|` with `G^0` edgeless.
    pub fn power_ecount(&self, m: u32) -> Option<u64> {
        let h = self.histogram.as_ref()?;
        let top = (m as usize).min(h.len().saturating_sub(1));
        Some(h[..=top].iter().sum())
    }
}

/// Vertex, edge and power-edge counts across levels. Missing vertex counts
/// come from the closed recursion.
#[derive(Clone, Debug, Serialize)]
pub struct CountBook {
    pub n0: u32,
    pub levels: BTreeMap<u32, LevelCounts>,
}

impl CountBook {
    pub fn new(n0: u32) -> CountBook {
        CountBook {
            n0,
            levels: BTreeMap::new(),
        }
    }

    /// Counts for every built level; histograms where the BFS work fits.
    pub fn from_hierarchy(hier: &Hierarchy, max_work: u64) -> CountBook {
        let mut book = CountBook::new(hier.n0());
        for g in hier.levels() {
            book.insert(LevelCounts {
                level: g.n(),
                vcount: g.vcount() as u64,
                ecount: g.ecount() as u64,
                histogram: distance_histogram(g, max_work).ok(),
            });
        }
        book
    }

    pub fn with_default_work(hier: &Hierarchy) -> CountBook {
        Self::from_hierarchy(hier, DEFAULT_MAX_BFS_WORK)
    }

    pub fn insert(&mut self, counts: LevelCounts) {
        self.levels.insert(counts.level, counts);
    }

    pub fn vcount(&self, j: u32) -> BigUint {
        match self.levels.get(&j) {
            Some(c) => BigUint::from(c.vcount),
            None => predict_vcount(self.n0, j),
        }
    }

    /// `|E(G_j^m)|` with the bound convention `|E(G^0)| = |V|`.
    pub fn bound_count(&self, j: u32, m: u32) -> Option<BigUint> {
        if m == 0 {
            return Some(self.vcount(j));
        }
        self.graph_count(j, m).map(BigUint::from)
    }

    /// `|E(G_j^m)|` with `G^0` edgeless.
    pub fn graph_count(&self, j: u32, m: u32) -> Option<u64> {
        match (m, self.levels.get(&j)) {
            (0, _) => Some(0),
            (1, Some(c)) => Some(c.ecount),
            (_, Some(c)) => c.power_ecount(m),
            (_, None) => None,
        }
    }

    /// `|E_j|` exactly when known, else the bound `|V_{j-1}| |E_{j-1}|`.
    pub fn edge_count_or_bound(&self, j: u32) -> (BigUint, bool) {
        if let Some(c) = self.levels.get(&j) {
            return (BigUint::from(c.ecount), true);
        }
        if j <= 1 {
            let v = u64::from(self.n0);
            return (BigUint::from(v * v.saturating_sub(1) / 2), true);
        }
        let (prev, _) = self.edge_count_or_bound(j - 1);
        (self.vcount(j - 1) * prev, false)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitEstimate {
    pub n: u32,
    pub m: u32,
    pub a: u32,
    pub b: u32,
    /// `max_i |E(G_{n-1}^i)| |E(G_{n-1}^{m-i})|` with `|E(G^0)| = |V|`.
    #[serde(serialize_with = "crate::report::big_decimal")]
    pub max_product: BigUint,
    /// `2 m max_product`.
    #[serde(serialize_with = "crate::report::big_decimal")]
    pub bound: BigUint,
    /// `2 m |E(G_{n-1}^{m/2})|^2` for even `m`; not a proven bound.
    #[serde(serialize_with = "crate::report::big_decimal_opt")]
    pub half_split_value: Option<BigUint>,
    /// `|E(G_n^m)|` with `G^0` edgeless, when known.
    pub exact: Option<u64>,
    pub holds: Option<bool>,
}

/// The maximizing split `a + b = m` (smallest `a` on ties) and the bound
/// `2 m M` on `|E(G_n^m)|`.
pub fn estimate_split(book: &CountBook, n: u32, m: u32) -> Result<SplitEstimate> {
    if n < 2 || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "split estimate needs n >= 2 and m >= 1, got n = {n}, m = {m}"
        )));
    }
    let missing = |i: u32| Error::MissingCount(format!("|E(G_{}^{i})|", n - 1));
    let mut best: Option<(u32, BigUint)> = None;
    for i in 0..=m {
        let p = book.bound_count(n - 1, i).ok_or_else(|| missing(i))?
            * book.bound_count(n - 1, m - i).ok_or_else(|| missing(m - i))?;
        if best.as_ref().is_none_or(|(_, q)| p > *q) {
            best = Some((i, p));
        }
    }
    let (a, max_product) = best.expect("m >= 1");
    let two_m = BigUint::from(2 * m as u64);
    let bound = &two_m * &max_product;
    let half_split_value = (m % 2 == 0)
        .then(|| book.bound_count(n - 1, m / 2))
        .flatten()
        .map(|e| &two_m * &e * &e);
    let exact = book.graph_count(n, m);
    Ok(SplitEstimate {
        n,
        m,
        a,
        b: m - a,
        holds: exact.map(|e| BigUint::from(e) <= bound),
        max_product,
        bound,
        half_split_value,
        exact,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitRecord {
    pub level: u32,
    pub m: u32,
    pub a: u32,
    pub b: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeBoundCertificate {
    pub n: u32,
    pub k: u32,
    pub n_bar: u32,
    /// `m(n) = 2^(n-k)`.
    pub m_n: u32,
    #[serde(rename = "K")]
    pub big_k: u32,
    /// Exponents of the surviving `G_k` factors, summing to `m(n)`.
    pub parts: Vec<u32>,
    /// `k_i` for `i = 1..=n_bar`: `|V_{n-i}|` factors introduced at step `i`.
    pub exponents: Vec<u32>,
    pub splits: Vec<SplitRecord>,
    /// Product of the `2m` factors.
    #[serde(serialize_with = "crate::report::big_decimal")]
    pub split_factor: BigUint,
    #[serde(serialize_with = "crate::report::big_decimal")]
    pub value: BigUint,
    /// `32^m(n) prod |E(G_k^{m_i})| prod |V_{n-i}|^{k_i}`.
    #[serde(serialize_with = "crate::report::big_decimal")]
    pub closed_form: BigUint,
    pub sum_identity: bool,
    pub ranges_ok: bool,
    pub within_closed_form: bool,
    pub exact: Option<u64>,
    pub dominates: Option<bool>,
}

impl EdgeBoundCertificate {
    pub fn passed(&self) -> bool {
        self.sum_identity && self.ranges_ok && self.within_closed_form && self.dominates != Some(false)
    }
}

/// Largest `n - k` accepted.
pub const MAX_BOUND_DEPTH: u32 = 20;

/// Applies the replacement rule from `|E(G_n^m(n))|` down to level `k`.
pub fn bound_certificate(book: &CountBook, n: u32, k: u32) -> Result<EdgeBoundCertificate> {
    if k < 1 || n < k {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let n_bar = n - k;
    if n_bar > MAX_BOUND_DEPTH {
        return Err(Error::InvalidArgument(format!(
            "n - k = {n_bar} above {MAX_BOUND_DEPTH}"
        )));
    }
    let m_n = 1u32 << n_bar;
    let mut live = vec![m_n];
    let mut exponents = Vec::with_capacity(n_bar as usize);
    let mut splits = Vec::new();
    let mut split_factor = BigUint::one();
    let mut chosen: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    for i in 1..=n_bar {
        let j = n - i + 1;
        let mut next = Vec::with_capacity(2 * live.len());
        let mut zeros = 0u32;
        for &mu in &live {
            let (a, b) = match chosen.get(&(j, mu)) {
                Some(&ab) => ab,
                None => {
                    let est = estimate_split(book, j, mu)?;
                    chosen.insert((j, mu), (est.a, est.b));
                    splits.push(SplitRecord {
                        level: j,
                        m: mu,
                        a: est.a,
                        b: est.b,
                    });
                    (est.a, est.b)
                }
            };
            split_factor *= BigUint::from(2 * mu as u64);
            for part in [a, b] {
                if part == 0 {
                    zeros += 1;
                } else {
                    next.push(part);
                }
            }
        }
        exponents.push(zeros);
        live = next;
    }

    let mut base = BigUint::one();
    for &p in &live {
        base *= book
            .bound_count(k, p)
            .ok_or_else(|| Error::MissingCount(format!("|E(G_{k}^{p})|")))?;
    }
    let mut vertex_factor = BigUint::one();
    for (idx, &ki) in exponents.iter().enumerate() {
        vertex_factor *= book.vcount(n - (idx as u32 + 1)).pow(ki);
    }
    let value = &split_factor * &base * &vertex_factor;
    let closed_form = BigUint::from(32u32).pow(m_n) * &base * &vertex_factor;

    let big_k = live.len() as u32;
    let lhs: u64 = exponents
        .iter()
        .enumerate()
        .map(|(idx, &ki)| ki as u64 * (1u64 << (n_bar - idx as u32 - 1)))
        .sum();
    let sum_identity = lhs == (m_n - big_k) as u64;
    let ranges_ok = (1..=m_n).contains(&big_k)
        && live.iter().all(|&p| p > 0)
        && live.iter().map(|&p| p as u64).sum::<u64>() == m_n as u64
        && exponents
            .iter()
            .enumerate()
            .all(|(idx, &ki)| (ki as u64) < (1u64 << (idx + 1)));
    let exact = book.graph_count(n, m_n);
    Ok(EdgeBoundCertificate {
        n,
        k,
        n_bar,
        m_n,
        big_k,
        parts: live,
        exponents,
        splits,
        within_closed_form: value <= closed_form,
        dominates: exact.map(|e| BigUint::from(e) <= value),
        split_factor,
        value,
        closed_form,
        sum_identity,
        ranges_ok,
        exact,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KRow {
    pub k: u32,
    /// `|V_k|^p >= (2 alpha)^q`.
    pub vertices_large: bool,
    /// `|E_k|^(pq) (2 alpha)^(q^2) <= |V_k|^(pq + p^2)`.
    pub edges_sparse: bool,
    /// Whether `|E_k|` is exact or the bound `|V_{k-1}| |E_{k-1}|`.
    pub edge_count_exact: bool,
    pub vcount_bits: u64,
}

impl KRow {
    pub fn passed(&self) -> bool {
        self.vertices_large && self.edges_sparse
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub n: u32,
    pub m: u64,
    pub ecount: u64,
    pub vcount: u64,
    /// `|E(G_n^m)| 2^m <= |V_n|^2`.
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParameterReport {
    pub n0: u32,
    pub alpha: u64,
    pub epsilon: String,
    pub rows: Vec<KRow>,
    pub smallest_k: Option<u32>,
    /// `|E(G_n^m(n))| / |V_n|^2 <= 2^-m(n)` on levels with power counts, for
    /// the requested `k`.
    pub ratio_k: Option<u32>,
    pub ratios: Vec<RatioRow>,
}

/// Scans `k = 1..=k_max` for
/// `max(1/|V_k|, |E_k| / |V_k|^(1+eps)) <= (2 alpha)^(-1/eps)`, exactly.
pub fn parameter_check(
    book: &CountBook,
    epsilon: Ratio<u64>,
    alpha: u64,
    k_max: u32,
    ratio_k: Option<u32>,
) -> Result<ParameterReport> {
    if epsilon <= Ratio::from_integer(0) || epsilon >= Ratio::new(1, 16) {
        return Err(Error::InvalidArgument(format!(
            "epsilon {epsilon} outside (0, 1/16)"
        )));
    }
    let (p, q) = (*epsilon.numer(), *epsilon.denom());
    let (p32, q32) = (
        u32::try_from(p).map_err(|_| Error::InvalidArgument("epsilon numerator too large".into()))?,
        u32::try_from(q).map_err(|_| Error::InvalidArgument("epsilon denominator too large".into()))?,
    );
    let two_alpha = BigUint::from(2 * alpha);
    let a_rhs = two_alpha.pow(q32);
    let b_factor = two_alpha.pow(q32.checked_mul(q32).ok_or_else(|| {
        Error::InvalidArgument("epsilon denominator too large".into())
    })?);
    let mut rows = Vec::new();
    let mut smallest_k = None;
    for k in 1..=k_max {
        let v = book.vcount(k);
        let (e, exact) = book.edge_count_or_bound(k);
        let vertices_large = v.pow(p32) >= a_rhs;
        let edges_sparse = !v.is_zero() && e.pow(p32 * q32) * &b_factor <= v.pow(p32 * q32 + p32 * p32);
        let row = KRow {
            k,
            vertices_large,
            edges_sparse,
            edge_count_exact: exact,
            vcount_bits: v.bits(),
        };
        let pass = row.passed();
        rows.push(row);
        if pass {
            smallest_k = Some(k);
            break;
        }
    }
    let mut ratios = Vec::new();
    if let Some(k) = ratio_k {
        for (&n, c) in book.levels.range(k.max(1)..) {
            let m = 1u64 << (n - k).min(63);
            let Some(e) = c.power_ecount(m.min(u32::MAX as u64) as u32) else {
                continue;
            };
            let lhs = BigUint::from(e) << (m.min(1 << 20) as usize);
            ratios.push(RatioRow {
                n,
                m,
                ecount: e,
                vcount: c.vcount,
                holds: lhs <= BigUint::from(c.vcount).pow(2),
            });
        }
    }
    Ok(ParameterReport {
        n0: book.n0,
        alpha,
        epsilon: epsilon.to_string(),
        rows,
        smallest_k,
        ratio_k,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Budget;

    fn book(n: u32) -> CountBook {
        CountBook::with_default_work(&Hierarchy::build(2, n, &Budget::default()).unwrap())
    }

    #[test]
    fn counts_and_conventions() {
        let b = book(5);
        assert_eq!(b.graph_count(5, 0), Some(0));
        assert_eq!(b.bound_count(5, 0), Some(BigUint::from(68u32)));
        assert_eq!(b.graph_count(5, 4), Some(1472));
        assert_eq!(b.graph_count(5, 100), Some(68 * 67 / 2));
        assert_eq!(b.vcount(6), BigUint::from(2280u32));
        assert_eq!(b.graph_count(6, 1), None);
        let (e6, exact) = b.edge_count_or_bound(6);
        assert!(!exact);
        assert_eq!(e6, BigUint::from(68u32 * 184));
    }

    #[test]
    fn split_estimates() {
        let b = book(5);
        let one = estimate_split(&b, 5, 1).unwrap();
        // a = 0 term: |V_4| |E_4|
        assert_eq!((one.a, one.b), (0, 1));
        assert_eq!(one.bound, BigUint::from(2u32 * 12 * 16));
        let e = estimate_split(&b, 4, 2).unwrap();
        assert_eq!(e.exact, Some(33));
        assert_eq!(e.holds, Some(true));
        let e = estimate_split(&b, 5, 4).unwrap();
        assert_eq!(e.bound, BigUint::from(8712u32));
        assert_eq!(e.holds, Some(true));
        assert!(estimate_split(&b, 5, 0).is_err());
        assert!(matches!(estimate_split(&book(3), 5, 2), Err(Error::MissingCount(_))));
    }

    #[test]
    fn trivial_certificate() {
        let b = book(5);
        let c = bound_certificate(&b, 4, 4).unwrap();
        assert_eq!((c.big_k, c.parts.clone(), c.m_n), (1, vec![1], 1));
        assert!(c.exponents.is_empty());
        assert_eq!(c.value, BigUint::from(16u32));
        assert_eq!(c.dominates, Some(true));
        assert!(c.passed());
    }

    #[test]
    fn parameter_scan() {
        let b = book(5);
        let r = parameter_check(&b, Ratio::new(1, 32), ALPHA, 2, Some(3)).unwrap();
        assert!(!r.rows[1].passed());
        assert_eq!(r.smallest_k, None);
        assert!(parameter_check(&b, Ratio::new(1, 16), ALPHA, 2, None).is_err());
        assert!(parameter_check(&b, Ratio::new(0, 1), ALPHA, 2, None).is_err());
        // k = 3: m(5) = 4, 1472 * 16 > 68^2
        assert!(!r.ratios.iter().find(|row| row.n == 5).unwrap().holds);
    }
}
