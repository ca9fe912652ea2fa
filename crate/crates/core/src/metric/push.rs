use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Hierarchy;
use crate::vertex::Term;

/// A metric space with a midpoint map, the target of the push-forward.
pub trait MidpointSpace {
    type Point: Clone;

    fn midpoint(&self, a: &Self::Point, b: &Self::Point) -> Self::Point;
    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;
}

/// `R^d` with the Euclidean norm and the affine midpoint.
#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean;

/// `R^d` with the sup norm and the affine midpoint.
#[derive(Clone, Copy, Debug, Default)]
pub struct SupNorm;

fn affine_mid(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

impl MidpointSpace for Euclidean {
    type Point = Vec<f64>;

    fn midpoint(&self, a: &Vec<f64>, b: &Vec<f64>) -> Vec<f64> {
        affine_mid(a, b)
    }

    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }
}

impl MidpointSpace for SupNorm {
    type Point = Vec<f64>;

    fn midpoint(&self, a: &Vec<f64>, b: &Vec<f64>) -> Vec<f64> {
        affine_mid(a, b)
    }

    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct PushForward<P> {
    pub level: u32,
    /// Images indexed like `G_n`.
    pub images: Vec<P>,
    /// `max` over edges of target distance divided by the `rho_n` edge length.
    pub lipschitz: f64,
    /// Largest pairwise distance between leaf images.
    pub bound: f64,
    pub within_bound: bool,
}

const TOL: f64 = 1e-9;

/// Extends `leaf_images` to `V_n` through `phi({a, b}) = m(phi(a), phi(b))`
/// and measures the Lipschitz constant against `rho_n`. The target midpoint
/// map is first probed on `samples` random triples of images.
pub fn push_forward<S: MidpointSpace>(
    hier: &Hierarchy,
    n: u32,
    space: &S,
    leaf_images: &[S::Point],
    samples: usize,
    seed: u64,
) -> Result<PushForward<S::Point>> {
    let level = hier.get_level(n)?;
    if leaf_images.len() != hier.n0() as usize {
        return Err(Error::InvalidArgument(format!(
            "expected {} leaf images, got {}",
            hier.n0(),
            leaf_images.len()
        )));
    }
    let store = hier.store();
    let mut images: Vec<S::Point> = Vec::with_capacity(level.vcount());
    for &v in level.vertices() {
        let img = match store.term(v) {
            Term::Leaf(label) => leaf_images[label as usize].clone(),
            Term::Pair(a, b) => {
                // children precede their pair in the canonical order
                let (ia, ib) = (level.index_of(a).unwrap(), level.index_of(b).unwrap());
                space.midpoint(&images[ia], &images[ib])
            }
        };
        images.push(img);
    }

    let scale = leaf_images
        .iter()
        .flat_map(|a| leaf_images.iter().map(move |b| (a, b)))
        .map(|(a, b)| space.distance(a, b))
        .fold(0.0, f64::max);
    let tol = TOL * (1.0 + scale);
    if !images.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let x = &images[rng.gen_range(0..images.len())];
            let y = &images[rng.gen_range(0..images.len())];
            let z = &images[rng.gen_range(0..images.len())];
            let xx = space.midpoint(x, x);
            if space.distance(&xx, x) > tol {
                return Err(Error::NotConical(format!(
                    "m(x, x) != x at distance {}",
                    space.distance(&xx, x)
                )));
            }
            let (xy, yx) = (space.midpoint(x, y), space.midpoint(y, x));
            if space.distance(&xy, &yx) > tol {
                return Err(Error::NotConical(format!(
                    "m(x, y) != m(y, x) at distance {}",
                    space.distance(&xy, &yx)
                )));
            }
            let xz = space.midpoint(x, z);
            let (lhs, rhs) = (space.distance(&xy, &xz), 0.5 * space.distance(y, z));
            if lhs > rhs + tol {
                return Err(Error::NotConical(format!(
                    "d(m(x,y), m(x,z)) = {lhs} > d(y,z)/2 = {rhs}"
                )));
            }
        }
    }

    let edge_len = 0.5f64.powi(n.saturating_sub(1) as i32);
    let lipschitz = level
        .edges()
        .map(|(a, b)| space.distance(&images[a as usize], &images[b as usize]) / edge_len)
        .fold(0.0, f64::max);
    Ok(PushForward {
        level: n,
        images,
        lipschitz,
        bound: scale,
        within_bound: lipschitz <= scale + tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Budget;
    use crate::metric::delta_coordinates;

    #[test]
    fn standard_basis_reproduces_delta() {
        let h = Hierarchy::build(3, 4, &Budget::default()).unwrap();
        let basis = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let pf = push_forward(&h, 4, &SupNorm, &basis, 200, 1).unwrap();
        let delta = delta_coordinates(&h, 4).unwrap();
        for (img, d) in pf.images.iter().zip(&delta) {
            assert_eq!(img, &d.to_f64());
        }
        assert!(pf.within_bound);
        assert_eq!(pf.lipschitz, 1.0);
    }

    #[test]
    fn constant_images_have_zero_constant() {
        let h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let same = vec![vec![3.0, -1.0], vec![3.0, -1.0]];
        let pf = push_forward(&h, 5, &Euclidean, &same, 50, 0).unwrap();
        assert_eq!(pf.lipschitz, 0.0);
        assert_eq!(pf.bound, 0.0);
        assert!(pf.within_bound);
    }

    #[test]
    fn line_images_follow_second_delta_coordinate() {
        let h = Hierarchy::build(2, 5, &Budget::default()).unwrap();
        let pf = push_forward(&h, 5, &Euclidean, &[vec![0.0], vec![1.0]], 100, 3).unwrap();
        let delta = delta_coordinates(&h, 5).unwrap();
        for (img, d) in pf.images.iter().zip(&delta) {
            assert_eq!(img[0], d.coord(1).to_f64());
        }
        for (a, b) in h.level(5).edges() {
            let len = (pf.images[a as usize][0] - pf.images[b as usize][0]).abs();
            assert_eq!(len, 1.0 / 16.0);
        }
    }

    struct Skewed;
    impl MidpointSpace for Skewed {
        type Point = Vec<f64>;
        fn midpoint(&self, a: &Vec<f64>, b: &Vec<f64>) -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| 0.25 * x + 0.75 * y).collect()
        }
        fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
            Euclidean.distance(a, b)
        }
    }

    #[test]
    fn rejects_non_conical_targets() {
        let h = Hierarchy::build(2, 4, &Budget::default()).unwrap();
        let err = push_forward(&h, 4, &Skewed, &[vec![0.0], vec![1.0]], 100, 0).unwrap_err();
        assert!(matches!(err, Error::NotConical(_)));
    }
}
