use std::sync::OnceLock;

use midgraph::bicombing::{verify_geodesic, verify_limit_conical};
use midgraph::extremal::CountBook;
use midgraph::metric::delta_coordinates;
use midgraph::{Budget, Dyadic, Hierarchy, Metrics};
use proptest::prelude::*;

fn g5() -> &'static Hierarchy {
    static H: OnceLock<Hierarchy> = OnceLock::new();
    H.get_or_init(|| Hierarchy::build(2, 5, &Budget::default()).unwrap())
}

// Frozen from an independent brute-force construction.
#[test]
fn frozen_counts() {
    let h = Hierarchy::build(2, 6, &Budget::default()).unwrap();
    let v: Vec<usize> = h.levels().iter().map(|g| g.vcount()).collect();
    let e: Vec<usize> = h.levels().iter().map(|g| g.ecount()).collect();
    assert_eq!(v, [0, 2, 3, 5, 12, 68, 2280]);
    assert_eq!(e, [0, 1, 2, 4, 16, 184, 12480]);
    let h3 = Hierarchy::build(3, 4, &Budget::default()).unwrap();
    let v3: Vec<usize> = h3.levels()[1..].iter().map(|g| g.vcount()).collect();
    let e3: Vec<usize> = h3.levels()[1..].iter().map(|g| g.ecount()).collect();
    assert_eq!((v3, e3), (vec![3, 6, 18, 156], vec![3, 9, 48, 846]));
}

#[test]
fn frozen_power_counts() {
    let book = CountBook::with_default_work(g5());
    let g4: Vec<u64> = (1..=8).map(|m| book.graph_count(4, m).unwrap()).collect();
    let g5: Vec<u64> = (1..=9).map(|m| book.graph_count(5, m).unwrap()).collect();
    assert_eq!(g4, [16, 33, 45, 54, 60, 63, 65, 66]);
    assert_eq!(g5, [184, 606, 1100, 1472, 1714, 1890, 2022, 2118, 2182]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn metric_laws(i in 0usize..68, j in 0usize..68, k in 0usize..68) {
        let h = g5();
        let m = Metrics::new(h);
        let (x, y, z) = (h.level(5).vertex(i), h.level(5).vertex(j), h.level(5).vertex(k));
        let d = |a, b| m.d(5, a, b).unwrap();
        prop_assert_eq!(d(x, y), d(y, x));
        prop_assert_eq!(d(x, y) == 0, i == j);
        prop_assert!(d(x, z) <= d(x, y) + d(y, z));
        prop_assert!(d(x, y) <= 16);
    }

    #[test]
    fn rho_shrinks_and_intervals_nest(i in 0usize..12, j in 0usize..12) {
        let h = g5();
        let m = Metrics::new(h);
        let (x, y) = (h.level(4).vertex(i), h.level(4).vertex(j));
        let (r4, r5) = (m.rho_n(4, x, y).unwrap(), m.rho_n(5, x, y).unwrap());
        prop_assert!(r5 <= r4);
        let (a, b) = (m.rho_interval(x, y, 4).unwrap(), m.rho_interval(x, y, 5).unwrap());
        prop_assert!(a.lower <= b.lower && b.upper <= a.upper);
        let d4 = m.d(4, x, y).unwrap();
        prop_assert!(2 * d4 <= m.d(5, x, y).unwrap() + 4);
    }

    #[test]
    fn delta_is_short_on_edges(e in 0usize..184) {
        let h = g5();
        let delta = delta_coordinates(h, 5).unwrap();
        let (a, b) = h.level(5).edges().nth(e).unwrap();
        prop_assert_eq!(delta[a as usize].linf_distance(&delta[b as usize]), Dyadic::new(1, 4));
        prop_assert_eq!(delta[a as usize].sum(), Dyadic::ONE);
    }

    #[test]
    fn geodesics_scale_distances(i in 0usize..5, j in 0usize..5, i2 in 0usize..5, j2 in 0usize..5, q in 1u32..3) {
        let h = g5();
        let m = Metrics::new(h);
        let v = |k| h.level(3).vertex(k);
        prop_assert_eq!(verify_geodesic(&m, v(i), v(j), q, 5).unwrap().violations, 0);
        let lc = verify_limit_conical(&m, (v(i), v(j)), (v(i2), v(j2)), q, 5).unwrap();
        prop_assert_eq!(lc.violations, 0);
    }
}
