//! Factors of the generator domain.
//!
//! Blocks name the generator coordinates they constrain by index instead of
//! by position in a Cartesian product. A lifted norm cone produced by the
//! convex hull references the hull's interpolation coordinate, which is shared
//! between the cones of both operands, so a purely positional product cannot
//! describe hull outputs.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormOrder {
    One,
    Two,
    Inf,
}

impl NormOrder {
    pub fn norm<I: IntoIterator<Item = f64>>(self, xs: I) -> f64 {
        let xs = xs.into_iter();
        match self {
            NormOrder::One => xs.map(f64::abs).sum(),
            NormOrder::Two => libm::sqrt(xs.map(|x| x * x).sum()),
            NormOrder::Inf => xs.map(f64::abs).fold(0.0, f64::max),
        }
    }

    /// Numeric order as written in files: 1, 2, or infinity.
    pub fn as_f64(self) -> f64 {
        match self {
            NormOrder::One => 1.0,
            NormOrder::Two => 2.0,
            NormOrder::Inf => f64::INFINITY,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    NormBall,
    NormCone,
    Free,
    Nonneg,
}

/// One factor of the generator domain.
///
/// * `NormBall`: `‖ξ_xi‖_p ≤ 1`
/// * `NormCone`: `‖ξ_xi‖_p + Σ_j w_j ξ_{lambda_j} ≤ v`, with `v ≥ 0`
/// * `Free`: `ξ_xi` unconstrained
/// * `Nonneg`: `ξ_xi ≥ 0`
///
/// `lambda` is ordered oldest lift first.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintBlock {
    NormBall {
        p: NormOrder,
        xi: Vec<usize>,
    },
    NormCone {
        p: NormOrder,
        xi: Vec<usize>,
        lambda: Vec<usize>,
        w: Vec<f64>,
        v: f64,
    },
    Free {
        xi: Vec<usize>,
    },
    Nonneg {
        xi: Vec<usize>,
    },
}

impl ConstraintBlock {
    pub fn ball(p: NormOrder, xi: impl Into<Vec<usize>>) -> Self {
        ConstraintBlock::NormBall { p, xi: xi.into() }
    }

    /// Unit ball over the contiguous coordinates `start..start + len`.
    pub fn ball_range(p: NormOrder, start: usize, len: usize) -> Self {
        ConstraintBlock::NormBall {
            p,
            xi: (start..start + len).collect(),
        }
    }

    pub fn free(xi: impl Into<Vec<usize>>) -> Self {
        ConstraintBlock::Free { xi: xi.into() }
    }

    pub fn kind(&self) -> BlockKind {
        match self {
            ConstraintBlock::NormBall { .. } => BlockKind::NormBall,
            ConstraintBlock::NormCone { .. } => BlockKind::NormCone,
            ConstraintBlock::Free { .. } => BlockKind::Free,
            ConstraintBlock::Nonneg { .. } => BlockKind::Nonneg,
        }
    }

    pub fn norm_order(&self) -> Option<NormOrder> {
        match self {
            ConstraintBlock::NormBall { p, .. } | ConstraintBlock::NormCone { p, .. } => Some(*p),
            _ => None,
        }
    }

    pub fn xi(&self) -> &[usize] {
        match self {
            ConstraintBlock::NormBall { xi, .. }
            | ConstraintBlock::NormCone { xi, .. }
            | ConstraintBlock::Free { xi }
            | ConstraintBlock::Nonneg { xi } => xi,
        }
    }

    pub fn lambda(&self) -> &[usize] {
        match self {
            ConstraintBlock::NormCone { lambda, .. } => lambda,
            _ => &[],
        }
    }

    pub fn weights(&self) -> &[f64] {
        match self {
            ConstraintBlock::NormCone { w, .. } => w,
            _ => &[],
        }
    }

    /// Right-hand side `v` of a norm constraint (1 for a unit ball).
    pub fn bound(&self) -> Option<f64> {
        match self {
            ConstraintBlock::NormBall { .. } => Some(1.0),
            ConstraintBlock::NormCone { v, .. } => Some(*v),
            _ => None,
        }
    }

    pub fn is_norm(&self) -> bool {
        matches!(
            self,
            ConstraintBlock::NormBall { .. } | ConstraintBlock::NormCone { .. }
        )
    }

    /// Same block with every index moved by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let shift = |ix: &[usize]| ix.iter().map(|i| i + offset).collect::<Vec<_>>();
        match self {
            ConstraintBlock::NormBall { p, xi } => ConstraintBlock::NormBall {
                p: *p,
                xi: shift(xi),
            },
            ConstraintBlock::NormCone {
                p,
                xi,
                lambda,
                w,
                v,
            } => ConstraintBlock::NormCone {
                p: *p,
                xi: shift(xi),
                lambda: shift(lambda),
                w: w.clone(),
                v: *v,
            },
            ConstraintBlock::Free { xi } => ConstraintBlock::Free { xi: shift(xi) },
            ConstraintBlock::Nonneg { xi } => ConstraintBlock::Nonneg { xi: shift(xi) },
        }
    }

    /// Amount by which the full generator vector `xi` violates this block
    /// (zero when satisfied).
    pub fn violation(&self, point: &[f64]) -> f64 {
        let pick = |ix: &[usize]| ix.iter().map(|&i| point[i]).collect::<Vec<_>>();
        match self {
            ConstraintBlock::NormBall { p, xi } => (p.norm(pick(xi)) - 1.0).max(0.0),
            ConstraintBlock::NormCone {
                p,
                xi,
                lambda,
                w,
                v,
            } => {
                let lin: f64 = lambda.iter().zip(w).map(|(&i, wi)| wi * point[i]).sum();
                (p.norm(pick(xi)) + lin - v).max(0.0)
            }
            ConstraintBlock::Free { .. } => 0.0,
            ConstraintBlock::Nonneg { xi } => xi.iter().map(|&i| (-point[i]).max(0.0)).fold(0.0, f64::max),
        }
    }

    /// Norm ball with no coordinates. Satisfied trivially, but once lifted it
    /// becomes `0 ∓ ξ_λ ≤ 0.5` and keeps the interpolation weight in `[0, 1]`
    /// for operands whose domain has no norm constraint (e.g. singletons).
    pub(crate) fn scale_guard() -> Self {
        ConstraintBlock::NormBall {
            p: NormOrder::Inf,
            xi: vec![],
        }
    }
}
