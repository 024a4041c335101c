mod common;

use ccg::core::{
    intersection_under_map, linear_map, minkowski_sum, relax_to_box_blocks, ConstraintBlock, ConvexSetCCG, DMatrix,
    DVector, NormOrder, SetClassTag,
};
use ccg::SetSolver;
use common::*;
use proptest::prelude::*;

#[test]
fn scaled_shifted_disk_support() {
    let s = SetSolver::default();
    let z = linear_map(&(DMatrix::identity(2, 2) * 2.0), &v(&[1.0, 0.0]), &unit_disk()).unwrap();
    assert!((s.support(&z, &v(&[1.0, 0.0])).unwrap().value - 3.0).abs() < 1e-7);
}

#[test]
fn zero_map_collapses_to_translation() {
    let s = SetSolver::default();
    let mut r = rng(1);
    let z = random_cz(&mut r, 3);
    let t = v(&[1.0, -2.0]);
    let img = linear_map(&DMatrix::zeros(2, 3), &t, &z).unwrap();
    assert!(img.g().iter().all(|&x| x == 0.0));
    for u in directions(&mut r, 2, 10) {
        assert!((s.support(&img, &u).unwrap().value - u.dot(&t)).abs() < 1e-7);
    }
}

#[test]
fn linear_map_support_identity() {
    let s = SetSolver::default();
    let mut r = rng(2);
    let z = random_set(&mut r, 3, 1);
    let rm = randn(&mut r, 2, 3);
    let t = rand_vec(&mut r, 2, 1.0);
    let img = linear_map(&rm, &t, &z).unwrap();
    assert_eq!(img.num_generators(), z.num_generators());
    for u in directions(&mut r, 2, 50) {
        let lhs = s.support(&img, &u).unwrap().value;
        let rhs = s.support(&z, &(rm.transpose() * &u)).unwrap().value + u.dot(&t);
        assert!((lhs - rhs).abs() < 1e-6 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }
}

#[test]
fn box_plus_disk_support() {
    let s = SetSolver::default();
    let bx = ConvexSetCCG::from_interval(&v(&[-1.0, -1.0]), &v(&[1.0, 1.0])).unwrap();
    let sum = minkowski_sum(&bx, &unit_disk()).unwrap();
    assert!((s.support(&sum, &v(&[1.0, 0.0])).unwrap().value - 2.0).abs() < 1e-7);
    let diag = v(&[1.0, 1.0]) / 2f64.sqrt();
    assert!((s.support(&sum, &diag).unwrap().value - (2f64.sqrt() + 1.0)).abs() < 1e-7);
}

#[test]
fn singleton_is_identity_of_sum() {
    let s = SetSolver::default();
    let mut r = rng(3);
    let z = random_set(&mut r, 2, 1);
    let sum = minkowski_sum(&z, &ConvexSetCCG::singleton(DVector::zeros(2))).unwrap();
    let dirs = directions(&mut r, 2, 50);
    for (a, b) in supports(&s, &z, &dirs).iter().zip(supports(&s, &sum, &dirs)) {
        assert!((a - b).abs() < 1e-7 * (1.0 + a.abs()));
    }
}

#[test]
fn minkowski_support_identity_and_counts() {
    let s = SetSolver::default();
    let mut r = rng(4);
    let z = random_set(&mut r, 2, 1);
    let w = random_cz(&mut r, 2);
    let sum = minkowski_sum(&z, &w).unwrap();
    assert_eq!(sum.num_generators(), z.num_generators() + w.num_generators());
    assert_eq!(sum.num_constraints(), z.num_constraints() + w.num_constraints());
    let dirs = directions(&mut r, 2, 50);
    let (hz, hw, hs) = (supports(&s, &z, &dirs), supports(&s, &w, &dirs), supports(&s, &sum, &dirs));
    for i in 0..dirs.len() {
        assert!((hs[i] - hz[i] - hw[i]).abs() < 1e-6 * (1.0 + hs[i].abs()));
    }
}

#[test]
fn box_cut_by_disk_membership() {
    let s = SetSolver::default();
    let bx = ConvexSetCCG::from_interval(&v(&[0.0, 0.0]), &v(&[2.0, 2.0])).unwrap();
    let disk = ConvexSetCCG::ball(v(&[2.0, 1.0]), 1.0, NormOrder::Two);
    let i = intersection_under_map(&bx, &DMatrix::identity(2, 2), &disk).unwrap();
    assert!(s.contains(&i, &v(&[1.2, 1.0])).unwrap().contained);
    assert!(!s.contains(&i, &v(&[0.5, 0.5])).unwrap().contained);
}

#[test]
fn self_intersection_keeps_support() {
    let s = SetSolver::default();
    let mut r = rng(5);
    let z = random_set(&mut r, 2, 1);
    let i = intersection_under_map(&z, &DMatrix::identity(2, 2), &z).unwrap();
    let dirs = directions(&mut r, 2, 50);
    for (a, b) in supports(&s, &z, &dirs).iter().zip(supports(&s, &i, &dirs)) {
        assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{a} vs {b}");
    }
}

#[test]
fn disjoint_boxes_are_empty() {
    let s = SetSolver::default();
    let a = ConvexSetCCG::from_interval(&v(&[-1.0, -1.0]), &v(&[1.0, 1.0])).unwrap();
    let b = ConvexSetCCG::from_interval(&v(&[2.0, 2.0]), &v(&[3.0, 3.0])).unwrap();
    assert!(s.is_empty(&intersection_under_map(&a, &DMatrix::identity(2, 2), &b).unwrap()).unwrap());
}

#[test]
fn intersection_never_exceeds_first_operand() {
    let s = SetSolver::default();
    let mut r = rng(6);
    let z = random_basic(&mut r, 2);
    let y = ConvexSetCCG::ball(z.c().clone(), 0.3, NormOrder::Two);
    let i = intersection_under_map(&z, &DMatrix::identity(2, 2), &y).unwrap();
    let dirs = directions(&mut r, 2, 30);
    for ((hi, hz), hy) in supports(&s, &i, &dirs).iter().zip(supports(&s, &z, &dirs)).zip(supports(&s, &y, &dirs)) {
        assert!(*hi <= hz.min(hy) + 1e-6);
    }
}

#[test]
fn interval_conversion() {
    let z = ConvexSetCCG::from_interval(&v(&[-1.0, -2.0]), &v(&[3.0, 4.0])).unwrap();
    assert_eq!(z.g(), &DMatrix::from_diagonal(&v(&[2.0, 3.0])));
    assert_eq!(z.c(), &v(&[1.0, 1.0]));
    assert_eq!(z.class_tag(), SetClassTag::Interval);
    assert!(ConvexSetCCG::from_interval(&v(&[1.0]), &v(&[0.0])).is_err());
}

#[test]
fn ellipsoid_support_is_one_everywhere() {
    let s = SetSolver::default();
    let e = ConvexSetCCG::from_ellipsoid(DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
    for u in directions(&mut rng(7), 2, 10) {
        assert!((s.support(&e, &u).unwrap().value - 1.0).abs() < 1e-7);
    }
    assert!(ConvexSetCCG::from_ellipsoid(DMatrix::identity(2, 3), DVector::zeros(2)).is_err());
}

#[test]
fn constrained_zonotope_matches_direct_polytope_check() {
    // {x ∈ [-1,1]³ : x₁ + x₂ + x₃ = 1}
    let s = SetSolver::default();
    let cz = ConvexSetCCG::from_constrained_zonotope(
        DMatrix::identity(3, 3),
        DVector::zeros(3),
        DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]),
        DVector::from_element(1, 1.0),
    )
    .unwrap();
    let direct = |x: &DVector<f64>| x.amax() <= 1.0 + 1e-9 && (x.sum() - 1.0).abs() <= 1e-9;
    for p in [
        v(&[1.0, 1.0, -1.0]),
        v(&[1.0, -1.0, 1.0]),
        v(&[1.0, 1.0, 1.0]),
        v(&[0.5, 0.5, 0.0]),
        v(&[1.5, -0.5, 0.0]),
    ] {
        assert_eq!(s.contains(&cz, &p).unwrap().contained, direct(&p), "{p:?}");
    }
}

#[test]
fn relaxing_disk_gives_square() {
    let s = SetSolver::default();
    let sq = relax_to_box_blocks(&unit_disk()).unwrap();
    let diag = v(&[1.0, 1.0]) / 2f64.sqrt();
    assert!((s.support(&unit_disk(), &diag).unwrap().value - 1.0).abs() < 1e-7);
    assert!((s.support(&sq, &diag).unwrap().value - 2f64.sqrt()).abs() < 1e-7);
    let zono = ConvexSetCCG::from_zonotope(randn(&mut rng(8), 2, 3), DVector::zeros(2)).unwrap();
    assert_eq!(relax_to_box_blocks(&zono).unwrap(), zono);
}

#[test]
fn relaxed_ellipsoid_keeps_its_points() {
    let s = SetSolver::default();
    let mut r = rng(9);
    let e = ConvexSetCCG::from_ellipsoid(randn(&mut r, 2, 2) + DMatrix::identity(2, 2), v(&[1.0, 1.0])).unwrap();
    let relaxed = relax_to_box_blocks(&e).unwrap();
    for p in member_points(&s, &e, &mut r, 100) {
        assert!(s.contains(&relaxed, &p).unwrap().contained);
    }
}

#[test]
fn validation_reports_problems() {
    assert!(unit_disk().validate().is_empty());
    let bad_a = ConvexSetCCG::from_parts_unchecked(
        DMatrix::identity(2, 2),
        DVector::zeros(2),
        DMatrix::zeros(1, 3),
        DVector::zeros(1),
        vec![ConstraintBlock::ball_range(NormOrder::Two, 0, 2)],
    );
    assert_eq!(bad_a.validate().len(), 1);
    let negative_v = ConvexSetCCG::from_parts_unchecked(
        DMatrix::identity(1, 1),
        DVector::zeros(1),
        DMatrix::zeros(0, 1),
        DVector::zeros(0),
        vec![ConstraintBlock::NormCone {
            p: NormOrder::Two,
            xi: vec![0],
            lambda: vec![],
            w: vec![],
            v: -0.1,
        }],
    );
    assert_eq!(negative_v.validate().len(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn operations_preserve_inclusion(seed in 0u64..1000) {
        // X ⊆ X' built by adding a ball; every operation keeps the dominance.
        let s = SetSolver::default();
        let mut r = rng(seed);
        let x = random_basic(&mut r, 2);
        let bigger = minkowski_sum(&x, &ConvexSetCCG::ball(DVector::zeros(2), 0.2, NormOrder::Two)).unwrap();
        let y = random_basic(&mut r, 2);
        let rm = randn(&mut r, 2, 2);
        let dirs = directions(&mut r, 2, 8);
        let pairs = [
            (linear_map(&rm, &DVector::zeros(2), &x).unwrap(), linear_map(&rm, &DVector::zeros(2), &bigger).unwrap()),
            (minkowski_sum(&x, &y).unwrap(), minkowski_sum(&bigger, &y).unwrap()),
        ];
        for (small, big) in &pairs {
            prop_assert!(small.validate().is_empty() && big.validate().is_empty());
            for (a, b) in supports(&s, small, &dirs).iter().zip(supports(&s, big, &dirs)) {
                prop_assert!(*a <= b + 1e-6);
            }
        }
        let wide = ConvexSetCCG::ball(x.c().clone(), 100.0, NormOrder::Inf);
        let small = intersection_under_map(&x, &DMatrix::identity(2, 2), &wide).unwrap();
        let big = intersection_under_map(&bigger, &DMatrix::identity(2, 2), &wide).unwrap();
        for (a, b) in supports(&s, &small, &dirs).iter().zip(supports(&s, &big, &dirs)) {
            prop_assert!(*a <= b + 1e-6);
        }
    }
}
