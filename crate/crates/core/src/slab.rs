//! Polytope assembly used by ray-shooting order reduction.

use alloc::vec;

use nalgebra::{DMatrix, DVector};

use crate::block::{ConstraintBlock, NormOrder};
use crate::error::{CcgError, Result};
use crate::ops::hcat;
use crate::set::ConvexSetCCG;

/// The polytope `{x ∈ box : lower_i ≤ v_iᵀ x ≤ upper_i}` as a CCG with
/// `n + γ` generators, `γ` equality constraints and a single ℓ∞ block.
///
/// `box_center`/`box_half` describe the bounding box, `directions` is `n×γ`
/// with one slab normal per column.
pub fn slab_polytope(
    box_center: &DVector<f64>,
    box_half: &DVector<f64>,
    directions: &DMatrix<f64>,
    lower: &DVector<f64>,
    upper: &DVector<f64>,
) -> Result<ConvexSetCCG> {
    let n = box_center.len();
    let gamma = directions.ncols();
    for (expected, found) in [
        (n, box_half.len()),
        (n, directions.nrows()),
        (gamma, lower.len()),
        (gamma, upper.len()),
    ] {
        if expected != found {
            return Err(CcgError::DimensionMismatch {
                op: "slab_polytope",
                expected,
                found,
            });
        }
    }
    let box_g = DMatrix::from_diagonal(box_half);
    let g = hcat(&box_g, &DMatrix::zeros(n, gamma));
    let vt = directions.transpose();
    let half_gap = DMatrix::from_diagonal(&((lower - upper) * 0.5));
    let a = hcat(&(&vt * &box_g), &half_gap);
    let b = (upper + lower) * 0.5 - &vt * box_center;
    ConvexSetCCG::new(
        g,
        box_center.clone(),
        a,
        b,
        vec![ConstraintBlock::ball_range(NormOrder::Inf, 0, n + gamma)],
    )
}
