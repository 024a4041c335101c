//! Exact convex hull of two CCGs.
//!
//! `conv(X ∪ Y)` is written with an interpolation coordinate
//! `ξ_λ = λ - 0.5 ∈ [-0.5, 0.5]`: the generators of `X` describe a point of
//! `λ X` and those of `Y` a point of `(1 - λ) Y`. Every constraint of `X` is
//! rewritten for the scaled domain (`lift_block`), equalities pick up a `∓b`
//! column in the new coordinate, and the centers are folded into
//! `(c_x + c_y)/2 + (c_x - c_y) ξ_λ`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::block::ConstraintBlock;
use crate::error::{CcgError, Result};
use crate::set::ConvexSetCCG;

/// Which operand of the hull a block belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftSide {
    /// Scaled by `λ = 0.5 + ξ_λ`.
    First,
    /// Scaled by `1 - λ = 0.5 - ξ_λ`.
    Second,
}

impl LiftSide {
    /// Sign of `ξ_λ` in the scale factor `0.5 ± ξ_λ`.
    fn scale_sign(self) -> f64 {
        match self {
            LiftSide::First => 1.0,
            LiftSide::Second => -1.0,
        }
    }
}

/// Rewrites `blk` so that it describes the domain scaled by `0.5 ± ξ_new`.
///
/// The left-hand side of a norm constraint is positively homogeneous in the
/// scaled generators, so only the bound changes: `v` becomes
/// `v (0.5 ± ξ_new)`, i.e. the coefficient `∓v` is appended for `ξ_new`
/// and `v` is halved. Free and nonnegative blocks are scale invariant.
pub fn lift_block(blk: &ConstraintBlock, new_lambda: usize, side: LiftSide) -> ConstraintBlock {
    debug_assert!(!blk.xi().contains(&new_lambda) && !blk.lambda().contains(&new_lambda));
    let s = side.scale_sign();
    match blk {
        ConstraintBlock::NormBall { p, xi } => ConstraintBlock::NormCone {
            p: *p,
            xi: xi.clone(),
            lambda: vec![new_lambda],
            w: vec![-s],
            v: 0.5,
        },
        ConstraintBlock::NormCone {
            p,
            xi,
            lambda,
            w,
            v,
        } => {
            let mut lambda = lambda.clone();
            let mut w = w.clone();
            lambda.push(new_lambda);
            w.push(-s * v);
            ConstraintBlock::NormCone {
                p: *p,
                xi: xi.clone(),
                lambda,
                w,
                v: 0.5 * v,
            }
        }
        ConstraintBlock::Free { .. } | ConstraintBlock::Nonneg { .. } => blk.clone(),
    }
}

fn lifted_blocks(set: &ConvexSetCCG, offset: usize, new_lambda: usize, side: LiftSide) -> Vec<ConstraintBlock> {
    let mut out: Vec<ConstraintBlock> = set
        .blocks()
        .iter()
        .map(|b| lift_block(&b.shifted(offset), new_lambda, side))
        .collect();
    if !set.blocks().iter().any(ConstraintBlock::is_norm) {
        out.push(lift_block(&ConstraintBlock::scale_guard(), new_lambda, side));
    }
    out
}

/// `conv(X ∪ Y)` with `n_g^x + n_g^y + 1` generators and `n_c^x + n_c^y`
/// equality constraints.
pub fn convex_hull_pair(x: &ConvexSetCCG, y: &ConvexSetCCG) -> Result<ConvexSetCCG> {
    if x.dim() != y.dim() {
        return Err(CcgError::DimensionMismatch {
            op: "convex_hull_pair",
            expected: x.dim(),
            found: y.dim(),
        });
    }
    x.check()?;
    y.check()?;

    let n = x.dim();
    let (ngx, ngy) = (x.num_generators(), y.num_generators());
    let (ncx, ncy) = (x.num_constraints(), y.num_constraints());
    let lam = ngx + ngy;

    let mut g = DMatrix::zeros(n, lam + 1);
    g.view_mut((0, 0), (n, ngx)).copy_from(x.g());
    g.view_mut((0, ngx), (n, ngy)).copy_from(y.g());
    g.set_column(lam, &(x.c() - y.c()));
    let c = (x.c() + y.c()) * 0.5;

    let mut a = DMatrix::zeros(ncx + ncy, lam + 1);
    a.view_mut((0, 0), (ncx, ngx)).copy_from(x.a());
    a.view_mut((ncx, ngx), (ncy, ngy)).copy_from(y.a());
    a.view_mut((0, lam), (ncx, 1)).copy_from(&(-x.b()));
    a.view_mut((ncx, lam), (ncy, 1)).copy_from(y.b());
    let b = DVector::from_iterator(ncx + ncy, x.b().iter().chain(y.b().iter()).map(|v| 0.5 * v));

    let mut blocks = lifted_blocks(x, 0, lam, LiftSide::First);
    blocks.extend(lifted_blocks(y, ngx, lam, LiftSide::Second));
    blocks.push(ConstraintBlock::free([lam]));

    Ok(ConvexSetCCG::from_parts_unchecked(g, c, a, b, blocks))
}

/// Left fold of [`convex_hull_pair`]; a single set is returned unchanged.
pub fn convex_hull_many(sets: &[ConvexSetCCG]) -> Result<ConvexSetCCG> {
    let (first, rest) = sets.split_first().ok_or(CcgError::EmptyHullList)?;
    rest.iter().try_fold(first.clone(), |acc, s| convex_hull_pair(&acc, s))
}
