//! The acceptance criteria for `midgraph`, each a check with a time limit.
//! `tests/acceptance.rs` runs them and prints one line per criterion.

use std::time::{Duration, Instant};

use midgraph::bicombing::{hull_iterate, verify_conical, verify_geodesic, verify_limit_conical};
use midgraph::extremal::{
    bound_certificate, clique_search, estimate_split, separated_set, turan_check, BitGraph, CliqueMode,
    CliqueOptions, Complement, CountBook, PowerGraph,
};
use midgraph::metric::{additive_error_check, bfs_distance, delta_coordinates, diameter_check};
use midgraph::report::CheckMode;
use midgraph::verify::{run_verify, VerifyConfig};
use midgraph::{predict_vcount, Budget, Dyadic, Hierarchy, Metrics, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

pub struct Criterion {
    pub name: &'static str,
    pub limit: Duration,
    pub check: fn() -> Result<Outcome>,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

/// Runs the check; an error or an overrun of the time limit is a failure.
pub fn evaluate(c: &Criterion) -> Outcome {
    let (limit, f) = (c.limit, c.check);
    let start = Instant::now();
    let mut o = f().unwrap_or_else(|e| Outcome {
        pass: false,
        detail: format!("error: {e}"),
    });
    let took = start.elapsed();
    if took > limit {
        o.pass = false;
        o.detail += &format!("; took {took:.1?}, limit {limit:?}");
    }
    o
}

fn counts() -> Result<Outcome> {
    let h = Hierarchy::build(2, 6, &Budget::default())?;
    let v: Vec<usize> = (0..=5).map(|n| h.level(n).vcount()).collect();
    let e5 = h.level(5).ecount();
    let v6 = h.level(6).vcount();
    let pass = v == [0, 2, 3, 5, 12, 68] && e5 == 184 && predict_vcount(2, 6) == v6.into() && v6 == 2280;
    outcome(pass, format!("|V_0..5| = {v:?}, |E_5| = {e5}, |V_6| = {v6}"))
}

fn diameters() -> Result<Outcome> {
    let mut pass = true;
    let mut seen = Vec::new();
    for (n0, top) in [(2, 6), (3, 4)] {
        let h = Hierarchy::build(n0, top, &Budget::default())?;
        let m = Metrics::new(&h);
        for n in 1..=top {
            let r = diameter_check(&m, n)?;
            pass &= r.passed && !r.partial && r.leaf_pairs_realize;
            seen.push(format!("{}", r.diameter.unwrap_or(0)));
        }
    }
    outcome(pass, format!("diam = {} (n0=2 | n0=3)", seen.join(",")))
}

fn conical() -> Result<Outcome> {
    let h = Hierarchy::build(2, 6, &Budget::default())?;
    let m = Metrics::new(&h);
    let a = verify_conical(&m, 5, CheckMode::Exhaustive)?;
    let b = verify_conical(
        &m,
        6,
        CheckMode::Sampled {
            samples: 100_000,
            seed: 0,
        },
    )?;
    let pass = a.four_point.instances == 20_736 && a.passed() && b.four_point.instances == 100_000 && b.passed();
    outcome(
        pass,
        format!(
            "G_5 exhaustive {} quadruples, {} violations; G_6 sampled {}, {} violations",
            a.four_point.instances, a.four_point.violations, b.four_point.instances, b.four_point.violations
        ),
    )
}

fn distance_collapse() -> Result<Outcome> {
    let h = Hierarchy::build(2, 6, &Budget::default())?;
    let m = Metrics::new(&h);
    let mut pass = true;
    let mut worst = Vec::new();
    for n in 2..=6 {
        let r = additive_error_check(&m, n, CheckMode::Sampled { samples: 1, seed: 0 })?;
        pass &= r.additive_violations == 0 && r.doubling_violations == 0;
        worst.push(r.max_additive_error.to_string());
    }
    let s = h.store();
    let (l0, l1) = (s.leaf(0).unwrap(), s.leaf(1).unwrap());
    let mid = |a, b| s.find_midpoint(a, b).expect("interned");
    let v = mid(l0, l1);
    let (a, b) = (mid(l0, v), mid(v, l1));
    let (x, x2) = (mid(a, l1), mid(v, b));
    let (d4, d5) = (m.d(4, x, x2)?, m.d(5, x, x2)?);
    let delta = delta_coordinates(&h, 5)?;
    let (i, j) = (h.index_in(5, x)?, h.index_in(5, x2)?);
    let same = delta[i] == delta[j];
    pass &= d4 == 2 && d5 == 2 && same;
    outcome(
        pass,
        format!(
            "max 2d_(n-1) - d_n for n = 2..6: {}; example {} vs {}: d_4 = {d4}, d_5 = {d5}, delta_5 equal: {same}",
            worst.join(","),
            s.encode(x),
            s.encode(x2)
        ),
    )
}

fn delta_edges() -> Result<Outcome> {
    let h = Hierarchy::build(2, 6, &Budget::default())?;
    let (mut edges, mut bad) = (0u64, 0u64);
    for n in 1..=6 {
        let d = delta_coordinates(&h, n)?;
        let want = Dyadic::new(1, n - 1);
        for (a, b) in h.level(n).edges() {
            edges += 1;
            bad += (d[a as usize].linf_distance(&d[b as usize]) != want) as u64;
        }
    }
    outcome(bad == 0, format!("{edges} edges over n = 1..6, {bad} off by the sup norm"))
}

fn edge_bounds() -> Result<Outcome> {
    let h = Hierarchy::build(2, 6, &Budget::default())?;
    let book = CountBook::with_default_work(&h);
    let (mut pairs, mut bad) = (0u32, 0u32);
    for n in 2..=5 {
        for m in 1..=8 {
            let e = estimate_split(&book, n, m)?;
            pairs += 1;
            bad += (e.holds != Some(true)) as u32;
        }
    }
    let c = bound_certificate(&book, 6, 4)?;
    let pass = bad == 0 && c.sum_identity && c.ranges_ok && c.exact == Some(638_210) && c.dominates == Some(true);
    outcome(
        pass,
        format!(
            "{pairs} (n, m) pairs, {bad} unsound; certificate (6, 4): K = {}, parts {:?}, exponents {:?}, value {} >= {}",
            c.big_k,
            c.parts,
            c.exponents,
            c.value,
            c.exact.unwrap_or(0)
        ),
    )
}

fn separation() -> Result<Outcome> {
    let h = Hierarchy::build(2, 6, &Budget::default())?;
    let metrics = Metrics::new(&h);
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, m, stated) in [(5, 6, Dyadic::new(6, 5)), (6, 8, Dyadic::new(1, 3))] {
        let c = separated_set(&metrics, n, m, CliqueMode::Exact, &CliqueOptions::default())?;
        let rows = bfs_distance(h.level(n), h.store(), &c.ids)?;
        let mut min = u32::MAX;
        for &x in &c.ids {
            for &y in &c.ids {
                if x != y {
                    min = min.min(rows.d(h.index_in(n, x)?, h.index_in(n, y)?));
                }
            }
        }
        pass &= c.len() >= 2 && min > m && c.stated_bound == stated && c.rho_lower >= c.stated_bound;
        parts.push(format!(
            "(n={n}, m={m}): {} vertices ({:?}), min d = {min}, bound {} (certified {})",
            c.len(),
            c.search,
            c.stated_bound,
            c.rho_lower
        ));
    }
    outcome(pass, parts.join("; "))
}

fn turan() -> Result<Outcome> {
    let h = Hierarchy::build(2, 6, &Budget::default())?;
    let metrics = Metrics::new(&h);
    let (mut instances, mut violated_below, mut holds_at) = (0, 0, 0);
    let mut counter = None;
    for n in 2..=6 {
        let ms: Vec<u32> = if n <= 5 { (1..=8).collect() } else { vec![8] };
        for m in ms {
            let g = BitGraph::from_oracle(&Complement(PowerGraph::new(metrics.table(n)?, m)?));
            let found = clique_search(&g, CliqueMode::Exact, &CliqueOptions::default());
            let w = found.size() as u64;
            if !found.is_exact() || w < 2 {
                continue;
            }
            instances += 1;
            let (v, e) = (g.len() as u64, g.ecount());
            if !turan_check(v, e, w - 1) {
                violated_below += 1;
            } else if counter.is_none() {
                counter = Some(format!("n={n}, m={m}: |E| = {e}, w = {w}, bound at r = {} not exceeded", w - 1));
            }
            holds_at += turan_check(v, e, w) as u32;
        }
    }
    outcome(
        violated_below == instances,
        format!(
            "bound violated at r = w-1 on {violated_below}/{instances} exact instances{}; bound holds at r = w on {holds_at}/{instances}",
            counter.map(|c| format!(" (first counterexample {c})")).unwrap_or_default()
        ),
    )
}

fn hulls() -> Result<Outcome> {
    let h = Hierarchy::build(2, 5, &Budget::default())?;
    let mut store = h.store().clone();
    let v1 = h.level(1).vertices().to_vec();
    let m = hull_iterate(&mut store, &v1, 4, 1_000_000)?;
    let sizes: Vec<usize> = m.iter().map(|s| s.len()).collect();
    let pass = (1..=4).all(|k| m[k - 1] == h.level(k as u32 + 1).vertices());
    outcome(pass, format!("|M_k(V_1)| = {sizes:?}"))
}

fn geodesics() -> Result<Outcome> {
    let h = Hierarchy::build(2, 6, &Budget::default())?;
    let m = Metrics::new(&h);
    let (mut checks, mut bad) = (0u64, 0u64);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for q in 1..=3 {
        let base = h.level(6 - q);
        let v = base.vcount();
        for i in 0..v {
            for j in 0..v {
                let r = verify_geodesic(&m, base.vertex(i), base.vertex(j), q, 6)?;
                checks += r.instances;
                bad += r.violations;
            }
        }
        for _ in 0..2000 {
            let mut pick = || base.vertex(rng.gen_range(0..v));
            let (x, y, x2, y2) = (pick(), pick(), pick(), pick());
            let r = verify_limit_conical(&m, (x, y), (x2, y2), q, 6)?;
            checks += r.instances;
            bad += r.violations;
        }
    }
    let c = verify_conical(
        &m,
        6,
        CheckMode::Sampled {
            samples: 100_000,
            seed: 1,
        },
    )?;
    checks += c.three_point.instances;
    bad += c.three_point.violations;
    outcome(bad == 0, format!("{checks} interval and scaled checks at N = 6, q <= 3, {bad} violations"))
}

fn determinism() -> Result<Outcome> {
    let h = Hierarchy::build(2, 6, &Budget::default())?;
    let cfg = VerifyConfig::default();
    let a = run_verify(&h, &cfg).to_json();
    let h2 = Hierarchy::build(2, 6, &Budget::default())?;
    let b = run_verify(&h2, &cfg).to_json();
    outcome(a == b, format!("verify summaries of {} bytes identical: {}", a.len(), a == b))
}

pub fn criteria() -> Vec<Criterion> {
    let mins = |m: u64| Duration::from_secs(60 * m);
    let c = |name, limit, check| Criterion { name, limit, check };
    vec![
        c("counts", Duration::from_secs(10), counts),
        c("diameter", mins(2), diameters),
        c("discrete conical inequality", mins(5), conical),
        c("distance collapse", mins(10), distance_collapse),
        c("delta edge property", mins(10), delta_edges),
        c("edge-bound soundness", mins(10), edge_bounds),
        c("separation certificates", mins(10), separation),
        c("turan consistency (bound violated at r = clique size - 1)", mins(10), turan),
        c("hull iteration", mins(10), hulls),
        c("geodesic and bicombing interval suite", mins(10), geodesics),
        c("determinism", mins(10), determinism),
    ]
}
