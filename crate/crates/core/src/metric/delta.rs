use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::Result;
use crate::graph::Hierarchy;
use crate::vertex::Term;

/// A point of the standard simplex with coordinates `coords[i] / 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SimplexPoint {
    pub exp: u32,
    pub coords: Vec<u64>,
}

impl SimplexPoint {
    pub fn coord(&self, i: usize) -> Dyadic {
        Dyadic::new(self.coords[i] as i64, self.exp)
    }

    pub fn sum(&self) -> Dyadic {
        (0..self.coords.len()).fold(Dyadic::ZERO, |acc, i| acc + self.coord(i))
    }

    pub fn linf_distance(&self, other: &SimplexPoint) -> Dyadic {
        (0..self.coords.len())
            .map(|i| (self.coord(i) - other.coord(i)).abs())
            .max()
            .unwrap_or(Dyadic::ZERO)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        (0..self.coords.len()).map(|i| self.coord(i).to_f64()).collect()
    }
}

/// `delta_n` on `V_n`, indexed like the level: `delta_1(i) = e_i` and a new
/// pair `{a, b}` gets the average of its children's coordinates. All points
/// share the denominator `2^(n-1)`.
pub fn delta_coordinates(hier: &Hierarchy, n: u32) -> Result<Vec<SimplexPoint>> {
    let level = hier.get_level(n)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let n0 = hier.n0() as usize;
    let store = hier.store();
    // flat numerators at the current level, denominator 2^(j-1)
    let mut flat = vec![0u64; n0 * n0];
    for i in 0..n0 {
        flat[i * n0 + i] = 1;
    }
    for j in 2..=n {
        let g = hier.level(j);
        let prev = hier.level(j - 1);
        let mut next = Vec::with_capacity(g.vcount() * n0);
        next.extend(flat.iter().map(|c| c * 2));
        for &v in &g.vertices()[prev.vcount()..] {
            let Term::Pair(a, b) = store.term(v) else {
                unreachable!("new vertices are pairs")
            };
            let (ia, ib) = (prev.index_of(a).unwrap(), prev.index_of(b).unwrap());
            for c in 0..n0 {
                next.push(flat[ia * n0 + c] + flat[ib * n0 + c]);
            }
        }
        flat = next;
    }
    Ok(flat
        .chunks(n0)
        .take(level.vcount())
        .map(|c| SimplexPoint {
            exp: n - 1,
            coords: c.to_vec(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Budget;

    #[test]
    fn leaves_and_first_midpoint() {
        let h = Hierarchy::build(2, 4, &Budget::default()).unwrap();
        let d = delta_coordinates(&h, 4).unwrap();
        assert_eq!(d[0].coord(0), Dyadic::ONE);
        assert_eq!(d[1].coord(1), Dyadic::ONE);
        let mid = h.level(4).index_of(h.store().lookup("{0,1}").unwrap().unwrap()).unwrap();
        assert_eq!(d[mid].coord(0), Dyadic::new(1, 1));
        assert!(d.iter().all(|p| p.sum() == Dyadic::ONE));
        for (a, b) in h.level(4).edges() {
            assert_eq!(d[a as usize].linf_distance(&d[b as usize]), Dyadic::new(1, 3));
        }
    }
}
