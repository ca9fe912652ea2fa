use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{bfs_distance, Metrics};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::report::{CheckMode, CheckReport};

/// Bounds on the limit semi-metric `rho(x, y)` obtained at level `level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoInterval {
    pub lower: Dyadic,
    pub upper: Dyadic,
    pub level: u32,
}

impl RhoInterval {
    /// `[max(0, upper - 8/2^N), upper]`.
    pub fn from_upper(upper: Dyadic, level: u32) -> RhoInterval {
        let lower = (upper - Dyadic::new(8, level)).max(Dyadic::ZERO);
        RhoInterval {
            lower,
            upper,
            level,
        }
    }

    pub fn width(&self) -> Dyadic {
        self.upper - self.lower
    }

    pub fn contains(&self, v: Dyadic) -> bool {
        self.lower <= v && v <= self.upper
    }

    /// True when the limit distance is certainly positive.
    pub fn certifies_positive(&self) -> bool {
        self.lower > Dyadic::ZERO
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DiameterReport {
    pub level: u32,
    pub expected: u32,
    /// Every pair of distinct leaves is at distance `2^(n-1)`.
    pub leaf_pairs_realize: bool,
    /// Largest eccentricity seen from a leaf; a lower bound for the diameter.
    pub leaf_eccentricity: u32,
    /// Full diameter, when the all-pairs table was affordable.
    pub diameter: Option<u32>,
    pub partial: bool,
    pub passed: bool,
}

/// Checks `diam(G_n) = 2^(n-1)` and that distinct leaves realize it. Falls
/// back to leaf-only BFS (flagged `partial`) when all-pairs is over budget.
pub fn diameter_check(metrics: &Metrics<'_>, n: u32) -> Result<DiameterReport> {
    let store = metrics.store();
    if store.n0() < 2 || n == 0 {
        return Err(Error::InvalidArgument(
            "diameter check needs n0 >= 2 and n >= 1".into(),
        ));
    }
    let level = metrics.level(n)?;
    let expected = 1u32 << (n - 1);
    let leaves: Vec<_> = store.leaves().collect();
    let from_leaves = bfs_distance(level, store, &leaves)?;
    let mut leaf_pairs_realize = true;
    let mut leaf_eccentricity = 0;
    for i in 0..leaves.len() {
        let row = from_leaves.row(i).unwrap();
        leaf_eccentricity = leaf_eccentricity.max(*row.iter().max().unwrap() as u32);
        for (j, &d) in row.iter().enumerate().take(leaves.len()) {
            if j != i && d as u32 != expected {
                leaf_pairs_realize = false;
            }
        }
    }
    let diameter = if metrics.affordable(n) {
        let table = metrics.table(n)?;
        Some(
            (0..level.vcount())
                .map(|i| *table.row(i).unwrap().iter().max().unwrap() as u32)
                .max()
                .unwrap_or(0),
        )
    } else {
        None
    };
    let passed = leaf_pairs_realize
        && leaf_eccentricity == expected
        && diameter.is_none_or(|d| d == expected);
    Ok(DiameterReport {
        level: n,
        expected,
        leaf_pairs_realize,
        leaf_eccentricity,
        diameter,
        partial: diameter.is_none(),
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditiveErrorReport {
    pub level: u32,
    /// Unordered pairs of `V_{n-1}` checked.
    pub pairs: u64,
    /// Pairs with `d_n > 2 d_{n-1}`.
    pub doubling_violations: u64,
    /// Pairs with `2 d_{n-1} > d_n + 4`.
    pub additive_violations: u64,
    /// Largest observed `2 d_{n-1} - d_n`.
    pub max_additive_error: i64,
    /// `d_n(m(x,x'), m(y,y')) = min(d(x,y) + d(x',y'), d(x,y') + d(x',y))`
    /// over edges `x ~ x'`, `y ~ y'` of `G_{n-1}`.
    pub cone_distance: CheckReport,
    /// Cone midpoints that unexpectedly already lie in `V_{n-1}`.
    pub cone_midpoints_not_new: u64,
}

impl AdditiveErrorReport {
    pub fn passed(&self) -> bool {
        self.doubling_violations == 0
            && self.additive_violations == 0
            && self.cone_distance.passed()
            && self.cone_midpoints_not_new == 0
    }
}

/// Compares `d_{n-1}` and `d_n` on all pairs of `V_{n-1}` and checks the
/// exact distance formula between cone midpoints.
pub fn additive_error_check(
    metrics: &Metrics<'_>,
    n: u32,
    cone_mode: CheckMode,
) -> Result<AdditiveErrorReport> {
    if n < 2 {
        return Err(Error::InvalidArgument("additive error check needs n >= 2".into()));
    }
    let prev = metrics.level(n - 1)?;
    let tp = metrics.table(n - 1)?;
    let tn = metrics.table(n)?;
    let p = prev.vcount();
    let (mut pairs, mut doubling, mut additive, mut max_err) = (0u64, 0u64, 0u64, i64::MIN);
    for i in 0..p {
        for j in i..p {
            let (a, b) = (tp.d(i, j) as i64, tn.d(i, j) as i64);
            pairs += 1;
            if b > 2 * a {
                doubling += 1;
            }
            if 2 * a > b + 4 {
                additive += 1;
            }
            max_err = max_err.max(2 * a - b);
        }
    }

    let store = metrics.store();
    let level = metrics.level(n)?;
    let edges: Vec<(u32, u32)> = prev.edges().collect();
    let mids: Vec<usize> = edges
        .iter()
        .map(|&(a, b)| {
            let m = store
                .find_midpoint(prev.vertex(a as usize), prev.vertex(b as usize))
                .expect("midpoint interned");
            level.index_of(m).expect("midpoint in V_n")
        })
        .collect();
    let not_new = mids.iter().filter(|&&m| m < p).count() as u64;

    let check = |e: usize, f: usize, out: &mut (u64, u64, i64)| {
        let (x, x2) = (edges[e].0 as usize, edges[e].1 as usize);
        let (y, y2) = (edges[f].0 as usize, edges[f].1 as usize);
        let straight = tp.d(x, y) + tp.d(x2, y2);
        let crossed = tp.d(x, y2) + tp.d(x2, y);
        let actual = tn.d(mids[e], mids[f]);
        out.0 += 1;
        if actual != straight.min(crossed) {
            out.1 += 1;
        }
        out.2 = out.2.max(straight.min(crossed) as i64 - actual as i64);
    };
    let mut acc = (0u64, 0u64, i64::MIN);
    match cone_mode {
        CheckMode::Exhaustive => {
            for e in 0..edges.len() {
                for f in 0..edges.len() {
                    check(e, f, &mut acc);
                }
            }
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let e = rng.gen_range(0..edges.len());
                let f = rng.gen_range(0..edges.len());
                check(e, f, &mut acc);
            }
        }
    }
    Ok(AdditiveErrorReport {
        level: n,
        pairs,
        doubling_violations: doubling,
        additive_violations: additive,
        max_additive_error: max_err,
        cone_distance: CheckReport {
            check: "cone_midpoint_distance".into(),
            level: n,
            mode: cone_mode.label().into(),
            instances: acc.0,
            violations: acc.1,
            max_slack: acc.2.max(0).to_string(),
        },
        cone_midpoints_not_new: not_new,
    })
}
