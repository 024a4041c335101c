//! Ray-shooting order reduction to a polytope with `γ` constraints and
//! `n + γ` generators.

use ccg_core::slab::slab_polytope;
use ccg_core::ConvexSetCCG;
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::solve::{random_unit, QueryError, SetSolver};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionMode {
    /// Slabs from exact support values in `±vᵢ` and an outer axis box, so the
    /// input is always contained in the output.
    #[default]
    Guaranteed,
    /// Box of the sampled surface points with `σᵢ = minⱼ vᵢᵀpⱼ` and
    /// `bᵢ = vᵢᵀpᵢ`. Not an outer approximation in general.
    PaperFaithful,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionSpec {
    pub gamma: usize,
    pub mode: ReductionMode,
    pub seed: u64,
}

impl ReductionSpec {
    pub fn new(gamma: usize, mode: ReductionMode, seed: u64) -> Self {
        ReductionSpec { gamma, mode, seed }
    }

    /// Direction generator for reduction number `step`. Each step has its own
    /// stream so runs that differ only in filter settings see the same
    /// directions at the same step.
    pub fn rng(&self, step: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(step);
        rng
    }
}

/// `n×γ` unit directions: `e₁, −e₁, e₂, −e₂, …` first (at most `2n`), then
/// normalized Gaussian draws.
pub fn reduction_directions(n: usize, gamma: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut dirs = DMatrix::zeros(n, gamma);
    for j in 0..gamma {
        if j < 2 * n {
            dirs[(j / 2, j)] = if j % 2 == 0 { 1.0 } else { -1.0 };
        } else {
            dirs.set_column(j, &random_unit(n, rng));
        }
    }
    dirs
}

/// Reduces `z` with the directions of step `step` of `spec`.
pub fn reduce_to_order(
    solver: &SetSolver,
    z: &ConvexSetCCG,
    spec: &ReductionSpec,
    step: u64,
) -> Result<ConvexSetCCG, QueryError> {
    if spec.gamma == 0 {
        return Err(QueryError::TooFewDirections { min: 1, got: 0 });
    }
    let dirs = reduction_directions(z.dim(), spec.gamma, &mut spec.rng(step));
    reduce_with_directions(solver, z, &dirs, spec.mode)
}

/// Outward margin for a solver-computed support value.
fn pad(solver: &SetSolver, h: f64) -> f64 {
    let tol = solver.tolerances();
    tol.feasibility.max(tol.gap) * (1.0 + h.abs())
}

pub fn reduce_with_directions(
    solver: &SetSolver,
    z: &ConvexSetCCG,
    dirs: &DMatrix<f64>,
    mode: ReductionMode,
) -> Result<ConvexSetCCG, QueryError> {
    let n = z.dim();
    if dirs.nrows() != n {
        return Err(QueryError::Dimension {
            expected: n,
            found: dirs.nrows(),
        });
    }
    let gamma = dirs.ncols();
    match mode {
        ReductionMode::Guaranteed => {
            // queries: +v_i, -v_i, +e_j, -e_j
            let mut queries = Vec::with_capacity(2 * gamma + 2 * n);
            for col in dirs.column_iter() {
                queries.push(col.clone_owned());
                queries.push(-col.clone_owned());
            }
            for j in 0..n {
                let mut e = DVector::zeros(n);
                e[j] = 1.0;
                queries.push(e.clone());
                queries.push(-e);
            }
            let h: Vec<f64> = solver.supports(z, &queries)?.into_iter().map(|s| s.value).collect();
            let upper = DVector::from_fn(gamma, |i, _| h[2 * i] + pad(solver, h[2 * i]));
            let lower = DVector::from_fn(gamma, |i, _| {
                let s = -h[2 * i + 1];
                s - pad(solver, s)
            });
            let axis = &h[2 * gamma..];
            let hi = DVector::from_fn(n, |j, _| axis[2 * j] + pad(solver, axis[2 * j]));
            let lo = DVector::from_fn(n, |j, _| {
                let s = -axis[2 * j + 1];
                s - pad(solver, s)
            });
            Ok(slab_polytope(&((&hi + &lo) * 0.5), &((&hi - &lo) * 0.5), dirs, &lower, &upper)?)
        }
        ReductionMode::PaperFaithful => {
            let pts = solver.surface_points(z, dirs)?;
            let lo = DVector::from_fn(n, |j, _| pts.row(j).min());
            let hi = DVector::from_fn(n, |j, _| pts.row(j).max());
            let m = dirs.transpose() * &pts;
            let upper = m.diagonal();
            let lower = DVector::from_fn(gamma, |i, _| m.row(i).min());
            Ok(slab_polytope(&((&hi + &lo) * 0.5), &((&hi - &lo) * 0.5), dirs, &lower, &upper)?)
        }
    }
}
