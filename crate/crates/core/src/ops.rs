//! Affine map, Minkowski sum and generalized intersection.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::block::{ConstraintBlock, NormOrder};
use crate::error::{CcgError, Result};
use crate::set::ConvexSetCCG;

fn expect_dim(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(CcgError::DimensionMismatch { op, expected, found })
    }
}

/// Block-diagonal stacking `[[a1, 0], [0, a2]]`.
pub(crate) fn block_diag(a1: &DMatrix<f64>, a2: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a1.nrows() + a2.nrows(), a1.ncols() + a2.ncols());
    out.view_mut((0, 0), a1.shape()).copy_from(a1);
    out.view_mut((a1.nrows(), a1.ncols()), a2.shape()).copy_from(a2);
    out
}

pub(crate) fn stack(v1: &DVector<f64>, v2: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(v1.len() + v2.len(), v1.iter().chain(v2.iter()).copied())
}

pub(crate) fn hcat(m1: &DMatrix<f64>, m2: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(m1.nrows(), m2.nrows());
    let mut out = DMatrix::zeros(m1.nrows(), m1.ncols() + m2.ncols());
    out.view_mut((0, 0), m1.shape()).copy_from(m1);
    out.view_mut((0, m1.ncols()), m2.shape()).copy_from(m2);
    out
}

fn concat_blocks(first: &[ConstraintBlock], second: &[ConstraintBlock], offset: usize) -> Vec<ConstraintBlock> {
    first
        .iter()
        .cloned()
        .chain(second.iter().map(|b| b.shifted(offset)))
        .collect()
}

/// `R Z + t`.
pub fn linear_map(r: &DMatrix<f64>, t: &DVector<f64>, z: &ConvexSetCCG) -> Result<ConvexSetCCG> {
    expect_dim("linear_map", z.dim(), r.ncols())?;
    expect_dim("linear_map", r.nrows(), t.len())?;
    Ok(ConvexSetCCG::from_parts_unchecked(
        r * z.g(),
        r * z.c() + t,
        z.a().clone(),
        z.b().clone(),
        z.blocks().to_vec(),
    ))
}

/// `Z + t`.
pub fn translate(z: &ConvexSetCCG, t: &DVector<f64>) -> Result<ConvexSetCCG> {
    expect_dim("translate", z.dim(), t.len())?;
    let (g, c, a, b, blocks) = z.clone().into_parts();
    Ok(ConvexSetCCG::from_parts_unchecked(g, c + t, a, b, blocks))
}

/// `Z ⊕ W`; the generators of `W` follow those of `Z`.
pub fn minkowski_sum(z: &ConvexSetCCG, w: &ConvexSetCCG) -> Result<ConvexSetCCG> {
    expect_dim("minkowski_sum", z.dim(), w.dim())?;
    Ok(ConvexSetCCG::from_parts_unchecked(
        hcat(z.g(), w.g()),
        z.c() + w.c(),
        block_diag(z.a(), w.a()),
        stack(z.b(), w.b()),
        concat_blocks(z.blocks(), w.blocks(), z.num_generators()),
    ))
}

/// `Z ∩_R Y = {x ∈ Z : R x ∈ Y}`. The result may be empty.
pub fn intersection_under_map(
    z: &ConvexSetCCG,
    r: &DMatrix<f64>,
    y: &ConvexSetCCG,
) -> Result<ConvexSetCCG> {
    expect_dim("intersection_under_map", z.dim(), r.ncols())?;
    expect_dim("intersection_under_map", y.dim(), r.nrows())?;
    let (ngz, ngy) = (z.num_generators(), y.num_generators());
    let (ncz, ncy) = (z.num_constraints(), y.num_constraints());
    let m = y.dim();

    let mut g = DMatrix::zeros(z.dim(), ngz + ngy);
    g.view_mut((0, 0), z.g().shape()).copy_from(z.g());

    let mut a = DMatrix::zeros(ncz + ncy + m, ngz + ngy);
    a.view_mut((0, 0), z.a().shape()).copy_from(z.a());
    a.view_mut((ncz, ngz), y.a().shape()).copy_from(y.a());
    a.view_mut((ncz + ncy, 0), (m, ngz)).copy_from(&(r * z.g()));
    a.view_mut((ncz + ncy, ngz), (m, ngy)).copy_from(&(-y.g()));

    let coupling = y.c() - r * z.c();
    let b = stack(&stack(z.b(), y.b()), &coupling);

    Ok(ConvexSetCCG::from_parts_unchecked(
        g,
        z.c().clone(),
        a,
        b,
        concat_blocks(z.blocks(), y.blocks(), ngz),
    ))
}

/// Replaces every ℓ1/ℓ2 unit ball by the ℓ∞ unit ball over the same
/// coordinates, giving a superset with constrained-zonotope structure.
pub fn relax_to_box_blocks(z: &ConvexSetCCG) -> Result<ConvexSetCCG> {
    let blocks = z
        .blocks()
        .iter()
        .enumerate()
        .map(|(i, blk)| match blk {
            ConstraintBlock::NormBall { xi, .. } => Ok(ConstraintBlock::NormBall {
                p: NormOrder::Inf,
                xi: xi.clone(),
            }),
            ConstraintBlock::NormCone { .. } => Err(CcgError::ConeRelaxation(i)),
            other => Ok(other.clone()),
        })
        .collect::<Result<Vec<_>>>()?;
    let (g, c, a, b, _) = z.clone().into_parts();
    Ok(ConvexSetCCG::from_parts_unchecked(g, c, a, b, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::BlockKind;

    fn disk(cx: f64, cy: f64, r: f64) -> ConvexSetCCG {
        ConvexSetCCG::ball(DVector::from_vec(vec![cx, cy]), r, NormOrder::Two)
    }

    fn box2(lo: f64, hi: f64) -> ConvexSetCCG {
        ConvexSetCCG::from_interval(&DVector::from_element(2, lo), &DVector::from_element(2, hi)).unwrap()
    }

    #[test]
    fn linear_map_scales_and_translates() {
        let r = DMatrix::identity(2, 2) * 2.0;
        let t = DVector::from_vec(vec![1.0, 0.0]);
        let out = linear_map(&r, &t, &disk(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(out.c(), &t);
        assert_eq!(out.g(), &(DMatrix::identity(2, 2) * 2.0));
        assert!(out.validate().is_empty());
    }

    #[test]
    fn zero_map_gives_zero_generators() {
        let r = DMatrix::zeros(3, 2);
        let t = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let out = linear_map(&r, &t, &box2(-1.0, 1.0)).unwrap();
        assert!(out.g().iter().all(|&x| x == 0.0));
        assert_eq!(out.c(), &t);
    }

    #[test]
    fn linear_map_rejects_bad_shape() {
        let err = linear_map(&DMatrix::identity(2, 3), &DVector::zeros(2), &disk(0.0, 0.0, 1.0)).unwrap_err();
        assert!(matches!(err, CcgError::DimensionMismatch { .. }));
    }

    #[test]
    fn minkowski_counts_and_offsets() {
        let cz = ConvexSetCCG::from_constrained_zonotope(
            DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0]),
            DVector::zeros(2),
            DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]),
            DVector::from_element(1, 0.5),
        )
        .unwrap();
        let sum = minkowski_sum(&cz, &disk(1.0, 1.0, 0.5)).unwrap();
        assert_eq!(sum.num_generators(), 5);
        assert_eq!(sum.num_constraints(), 1);
        assert_eq!(sum.blocks()[1].xi(), &[3, 4]);
        assert_eq!(sum.c(), &DVector::from_vec(vec![1.0, 1.0]));
        assert!(sum.validate().is_empty());
    }

    #[test]
    fn minkowski_with_singleton_keeps_generators() {
        let z = box2(-1.0, 1.0);
        let s = ConvexSetCCG::singleton(DVector::zeros(2));
        let sum = minkowski_sum(&z, &s).unwrap();
        assert_eq!(sum.g(), z.g());
        assert_eq!(sum.blocks(), z.blocks());
    }

    #[test]
    fn intersection_layout_matches_definition() {
        let z = box2(0.0, 2.0);
        let y = disk(2.0, 1.0, 1.0);
        let out = intersection_under_map(&z, &DMatrix::identity(2, 2), &y).unwrap();
        assert_eq!(out.num_generators(), 4);
        assert_eq!(out.num_constraints(), 2);
        assert_eq!(out.c(), z.c());
        // coupling rows: [G_z, -G_y] ξ = c_y - c_z
        assert_eq!(out.a().view((0, 0), (2, 2)), z.g().view((0, 0), (2, 2)));
        assert_eq!(out.a().view((0, 2), (2, 2)).clone_owned(), -y.g());
        assert_eq!(out.b(), &(y.c() - z.c()));
        assert!(out.validate().is_empty());

        // (1.2, 1) is in both sets: ξ_z = (0.2, 0), ξ_y = (-0.8, 0).
        let xi = DVector::from_vec(vec![0.2, 0.0, -0.8, 0.0]);
        assert!(out.generator_residual(&xi) < 1e-12);
        assert!((out.point(&xi) - DVector::from_vec(vec![1.2, 1.0])).amax() < 1e-12);
    }

    #[test]
    fn relax_turns_balls_into_boxes() {
        let relaxed = relax_to_box_blocks(&disk(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(relaxed.blocks()[0].norm_order(), Some(NormOrder::Inf));
        let zono = box2(-1.0, 1.0);
        assert_eq!(relax_to_box_blocks(&zono).unwrap(), zono);
    }

    #[test]
    fn relax_rejects_cones() {
        let z = ConvexSetCCG::new(
            DMatrix::identity(2, 3),
            DVector::zeros(2),
            DMatrix::zeros(0, 3),
            DVector::zeros(0),
            alloc::vec![
                ConstraintBlock::NormCone {
                    p: NormOrder::Two,
                    xi: alloc::vec![0, 1],
                    lambda: alloc::vec![2],
                    w: alloc::vec![-1.0],
                    v: 0.5
                },
                ConstraintBlock::free([2]),
            ],
        )
        .unwrap();
        assert_eq!(z.blocks()[0].kind(), BlockKind::NormCone);
        assert_eq!(relax_to_box_blocks(&z).unwrap_err(), CcgError::ConeRelaxation(0));
    }
}
