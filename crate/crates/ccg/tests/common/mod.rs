#![allow(dead_code)]

use ccg::core::{convex_hull_pair, ConvexSetCCG, DMatrix, DVector, NormOrder};
use ccg::solve::{random_unit, SetSolver};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

pub fn randn<R: Rng>(rng: &mut R, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
}

pub fn rand_vec<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-scale..scale))
}

pub fn random_order<R: Rng>(rng: &mut R) -> NormOrder {
    [NormOrder::One, NormOrder::Two, NormOrder::Inf][rng.random_range(0..3)]
}

/// Nonempty bounded set of one of the basic classes.
pub fn random_basic<R: Rng>(rng: &mut R, n: usize) -> ConvexSetCCG {
    let c = rand_vec(rng, n, 2.0);
    match rng.random_range(0..4) {
        0 => ConvexSetCCG::ball(c, rng.random_range(0.2..1.5), random_order(rng)),
        1 => {
            let g = randn(rng, n, n) + DMatrix::identity(n, n) * 0.5;
            ConvexSetCCG::from_ellipsoid(g, c).unwrap()
        }
        2 => {
            let m = n + rng.random_range(0..3);
            ConvexSetCCG::from_zonotope(randn(rng, n, m), c).unwrap()
        }
        _ => random_cz(rng, n),
    }
}

/// Constrained zonotope with a feasible interior point.
pub fn random_cz<R: Rng>(rng: &mut R, n: usize) -> ConvexSetCCG {
    let m = n + 2;
    let g = randn(rng, n, m);
    let a = randn(rng, 1, m);
    let xi0 = rand_vec(rng, m, 0.5);
    let b = &a * &xi0;
    ConvexSetCCG::from_constrained_zonotope(g, rand_vec(rng, n, 2.0), a, b).unwrap()
}

/// Basic set or a hull of hulls down to `depth` levels.
pub fn random_set<R: Rng>(rng: &mut R, n: usize, depth: usize) -> ConvexSetCCG {
    if depth == 0 {
        return random_basic(rng, n);
    }
    let a = random_set(rng, n, depth - 1);
    let other = rng.random_range(0..depth);
    let b = random_set(rng, n, other);
    convex_hull_pair(&a, &b).unwrap()
}

pub fn directions<R: Rng>(rng: &mut R, n: usize, count: usize) -> Vec<DVector<f64>> {
    (0..count).map(|_| random_unit(n, rng)).collect()
}

pub fn supports(solver: &SetSolver, z: &ConvexSetCCG, dirs: &[DVector<f64>]) -> Vec<f64> {
    solver.supports(z, dirs).unwrap().into_iter().map(|s| s.value).collect()
}

/// Points of `z`: support points and random convex combinations of them.
pub fn member_points<R: Rng>(solver: &SetSolver, z: &ConvexSetCCG, rng: &mut R, count: usize) -> Vec<DVector<f64>> {
    let dirs = directions(rng, z.dim(), 8);
    let pts: Vec<DVector<f64>> = solver.supports(z, &dirs).unwrap().into_iter().map(|s| s.point).collect();
    (0..count)
        .map(|_| {
            let w: Vec<f64> = (0..pts.len()).map(|_| rng.random::<f64>()).collect();
            let total: f64 = w.iter().sum();
            pts.iter().zip(&w).fold(DVector::zeros(z.dim()), |acc, (p, wi)| acc + p * (wi / total))
        })
        .collect()
}

pub fn unit_disk() -> ConvexSetCCG {
    ConvexSetCCG::ball(DVector::zeros(2), 1.0, NormOrder::Two)
}
