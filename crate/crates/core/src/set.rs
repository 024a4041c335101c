use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};

use crate::block::{BlockKind, ConstraintBlock, NormOrder};
use crate::error::{CcgError, Result};

/// A constrained convex generator set `{G ξ + c : A ξ = b, ξ ∈ blocks}`.
///
/// Values are immutable once built; every operation returns a new set.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexSetCCG {
    g: DMatrix<f64>,
    c: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    blocks: Vec<ConstraintBlock>,
}

/// Reporting label for the special set classes a CCG can encode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetClassTag {
    Interval,
    Zonotope,
    Ellipsoid,
    ConstrainedZonotope,
    Cone,
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    CenterLength { rows_g: usize, len_c: usize },
    ConstraintColumns { cols_a: usize, n_g: usize },
    ConstraintRows { rows_a: usize, len_b: usize },
    NonFinite { field: &'static str },
    IndexOutOfRange { block: usize, index: usize, n_g: usize },
    DuplicateIndex { block: usize, index: usize },
    XiLambdaOverlap { block: usize, index: usize },
    SharedXi { index: usize, first: usize, second: usize },
    Unconstrained { index: usize },
    LambdaNotFree { block: usize, index: usize },
    WeightLength { block: usize, lambda: usize, w: usize },
    NegativeBound { block: usize, v: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CenterLength { rows_g, len_c } => {
                write!(f, "G has {rows_g} rows but c has length {len_c}")
            }
            Violation::ConstraintColumns { cols_a, n_g } => {
                write!(f, "A has {cols_a} columns but G has {n_g}")
            }
            Violation::ConstraintRows { rows_a, len_b } => {
                write!(f, "A has {rows_a} rows but b has length {len_b}")
            }
            Violation::NonFinite { field } => write!(f, "{field} has a non-finite entry"),
            Violation::IndexOutOfRange { block, index, n_g } => {
                write!(f, "block {block}: index {index} out of range for {n_g} generators")
            }
            Violation::DuplicateIndex { block, index } => {
                write!(f, "block {block}: index {index} listed twice")
            }
            Violation::XiLambdaOverlap { block, index } => {
                write!(f, "block {block}: index {index} is both a norm and a lambda coordinate")
            }
            Violation::SharedXi { index, first, second } => {
                write!(f, "generator {index} constrained by blocks {first} and {second}")
            }
            Violation::Unconstrained { index } => {
                write!(f, "generator {index} belongs to no block")
            }
            Violation::LambdaNotFree { block, index } => {
                write!(f, "block {block}: lambda index {index} is not a free coordinate")
            }
            Violation::WeightLength { block, lambda, w } => {
                write!(f, "block {block}: {lambda} lambda indices but {w} weights")
            }
            Violation::NegativeBound { block, v } => {
                write!(f, "block {block}: cone bound v = {v} is negative")
            }
        }
    }
}

impl ConvexSetCCG {
    /// Builds a set and checks every structural invariant.
    pub fn new(
        g: DMatrix<f64>,
        c: DVector<f64>,
        a: DMatrix<f64>,
        b: DVector<f64>,
        blocks: Vec<ConstraintBlock>,
    ) -> Result<Self> {
        let set = Self::from_parts_unchecked(g, c, a, b, blocks);
        set.check()?;
        Ok(set)
    }

    /// Builds a set without validation; `validate` reports what is wrong.
    pub fn from_parts_unchecked(
        g: DMatrix<f64>,
        c: DVector<f64>,
        a: DMatrix<f64>,
        b: DVector<f64>,
        blocks: Vec<ConstraintBlock>,
    ) -> Self {
        // An empty constraint system may be given as 0×0; store it as 0×n_g.
        let a = if a.nrows() == 0 { DMatrix::zeros(0, g.ncols()) } else { a };
        ConvexSetCCG { g, c, a, b, blocks }
    }

    pub(crate) fn check(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = violations.iter().map(|v| format!("{v}")).collect();
            Err(CcgError::InvalidSet(msg.join("; ")))
        }
    }

    /// The single point `{c}` (no generators).
    pub fn singleton(c: DVector<f64>) -> Self {
        let n = c.len();
        ConvexSetCCG {
            g: DMatrix::zeros(n, 0),
            c,
            a: DMatrix::zeros(0, 0),
            b: DVector::zeros(0),
            blocks: vec![],
        }
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn from_interval(lo: &DVector<f64>, hi: &DVector<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(CcgError::DimensionMismatch {
                op: "from_interval",
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if let Some(i) = (0..lo.len()).find(|&i| !(lo[i] <= hi[i])) {
            return Err(CcgError::InvertedInterval(i));
        }
        let half = (hi - lo) / 2.0;
        let center = (hi + lo) / 2.0;
        Self::with_unit_ball(DMatrix::from_diagonal(&half), center, NormOrder::Inf)
    }

    pub fn from_zonotope(g: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        Self::with_unit_ball(g, c, NormOrder::Inf)
    }

    pub fn from_ellipsoid(g: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        if g.nrows() != g.ncols() {
            return Err(CcgError::NonSquareEllipsoid {
                rows: g.nrows(),
                cols: g.ncols(),
            });
        }
        Self::with_unit_ball(g, c, NormOrder::Two)
    }

    pub fn from_constrained_zonotope(
        g: DMatrix<f64>,
        c: DVector<f64>,
        a: DMatrix<f64>,
        b: DVector<f64>,
    ) -> Result<Self> {
        let n_g = g.ncols();
        Self::new(g, c, a, b, vec![ConstraintBlock::ball_range(NormOrder::Inf, 0, n_g)])
    }

    /// Convex cone `{G ξ + c : ξ ≥ 0}`.
    pub fn from_cone(g: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        let n_g = g.ncols();
        let a = DMatrix::zeros(0, n_g);
        Self::new(
            g,
            c,
            a,
            DVector::zeros(0),
            vec![ConstraintBlock::Nonneg {
                xi: (0..n_g).collect(),
            }],
        )
    }

    /// `radius`-scaled unit `p`-ball around `center`.
    pub fn ball(center: DVector<f64>, radius: f64, p: NormOrder) -> Self {
        let n = center.len();
        let g = DMatrix::from_diagonal_element(n, n, radius);
        ConvexSetCCG {
            g,
            c: center,
            a: DMatrix::zeros(0, n),
            b: DVector::zeros(0),
            blocks: vec![ConstraintBlock::ball_range(p, 0, n)],
        }
    }

    fn with_unit_ball(g: DMatrix<f64>, c: DVector<f64>, p: NormOrder) -> Result<Self> {
        let n_g = g.ncols();
        let a = DMatrix::zeros(0, n_g);
        Self::new(
            g,
            c,
            a,
            DVector::zeros(0),
            vec![ConstraintBlock::ball_range(p, 0, n_g)],
        )
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn num_generators(&self) -> usize {
        self.g.ncols()
    }

    pub fn num_constraints(&self) -> usize {
        self.a.nrows()
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn blocks(&self) -> &[ConstraintBlock] {
        &self.blocks
    }

    pub fn into_parts(
        self,
    ) -> (
        DMatrix<f64>,
        DVector<f64>,
        DMatrix<f64>,
        DVector<f64>,
        Vec<ConstraintBlock>,
    ) {
        (self.g, self.c, self.a, self.b, self.blocks)
    }

    /// Point `G ξ + c` for a generator vector.
    pub fn point(&self, xi: &DVector<f64>) -> DVector<f64> {
        &self.g * xi + &self.c
    }

    /// Largest violation of `A ξ = b` and of the blocks by an explicit
    /// generator vector.
    pub fn generator_residual(&self, xi: &DVector<f64>) -> f64 {
        let eq = if self.a.nrows() == 0 {
            0.0
        } else {
            (&self.a * xi - &self.b).amax()
        };
        let cones = self
            .blocks
            .iter()
            .map(|blk| blk.violation(xi.as_slice()))
            .fold(0.0, f64::max);
        eq.max(cones)
    }

    /// Every invariant violation; empty for a well-formed set.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n_g = self.g.ncols();
        if self.g.nrows() != self.c.len() {
            out.push(Violation::CenterLength {
                rows_g: self.g.nrows(),
                len_c: self.c.len(),
            });
        }
        if self.a.ncols() != n_g {
            out.push(Violation::ConstraintColumns {
                cols_a: self.a.ncols(),
                n_g,
            });
        }
        if self.a.nrows() != self.b.len() {
            out.push(Violation::ConstraintRows {
                rows_a: self.a.nrows(),
                len_b: self.b.len(),
            });
        }
        for (field, finite) in [
            ("G", self.g.iter().all(|x| x.is_finite())),
            ("c", self.c.iter().all(|x| x.is_finite())),
            ("A", self.a.iter().all(|x| x.is_finite())),
            ("b", self.b.iter().all(|x| x.is_finite())),
        ] {
            if !finite {
                out.push(Violation::NonFinite { field });
            }
        }

        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        let mut free = vec![false; n_g];
        for (bi, blk) in self.blocks.iter().enumerate() {
            let mut seen = BTreeMap::new();
            for &ix in blk.xi().iter().chain(blk.lambda()) {
                if ix >= n_g {
                    out.push(Violation::IndexOutOfRange {
                        block: bi,
                        index: ix,
                        n_g,
                    });
                }
                if seen.insert(ix, ()).is_some() {
                    if blk.xi().contains(&ix) && blk.lambda().contains(&ix) {
                        out.push(Violation::XiLambdaOverlap { block: bi, index: ix });
                    } else {
                        out.push(Violation::DuplicateIndex { block: bi, index: ix });
                    }
                }
            }
            for &ix in blk.xi() {
                match owner.get(&ix) {
                    Some(&first) if first != bi => out.push(Violation::SharedXi {
                        index: ix,
                        first,
                        second: bi,
                    }),
                    _ => {
                        owner.insert(ix, bi);
                    }
                }
                if blk.kind() == BlockKind::Free && ix < n_g {
                    free[ix] = true;
                }
            }
            if let ConstraintBlock::NormCone { lambda, w, v, .. } = blk {
                if lambda.len() != w.len() {
                    out.push(Violation::WeightLength {
                        block: bi,
                        lambda: lambda.len(),
                        w: w.len(),
                    });
                }
                if !(*v >= 0.0) || !v.is_finite() {
                    out.push(Violation::NegativeBound { block: bi, v: *v });
                }
                if w.iter().any(|x| !x.is_finite()) {
                    out.push(Violation::NonFinite { field: "w" });
                }
            }
        }
        for (bi, blk) in self.blocks.iter().enumerate() {
            for &ix in blk.lambda() {
                if ix < n_g && !free[ix] {
                    out.push(Violation::LambdaNotFree { block: bi, index: ix });
                }
            }
        }
        for ix in 0..n_g {
            if !owner.contains_key(&ix) {
                out.push(Violation::Unconstrained { index: ix });
            }
        }
        out
    }

    /// Advisory classification; never affects semantics.
    pub fn class_tag(&self) -> SetClassTag {
        let unconstrained = self.a.nrows() == 0;
        let all_balls = |p: NormOrder| {
            !self.blocks.is_empty()
                && self
                    .blocks
                    .iter()
                    .all(|b| matches!(b, ConstraintBlock::NormBall { p: q, .. } if *q == p))
        };
        if self.blocks.len() == 1 && unconstrained {
            match &self.blocks[0] {
                ConstraintBlock::NormBall { p: NormOrder::Inf, .. } => {
                    let diagonal = self.g.nrows() == self.g.ncols()
                        && (0..self.g.nrows())
                            .all(|i| (0..self.g.ncols()).all(|j| i == j || self.g[(i, j)] == 0.0));
                    return if diagonal {
                        SetClassTag::Interval
                    } else {
                        SetClassTag::Zonotope
                    };
                }
                ConstraintBlock::NormBall { p: NormOrder::Two, .. } if self.g.is_square() => {
                    return SetClassTag::Ellipsoid;
                }
                ConstraintBlock::Nonneg { .. } => return SetClassTag::Cone,
                _ => {}
            }
        }
        if all_balls(NormOrder::Inf) {
            return if unconstrained {
                SetClassTag::Zonotope
            } else {
                SetClassTag::ConstrainedZonotope
            };
        }
        SetClassTag::General
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_disk() -> ConvexSetCCG {
        ConvexSetCCG::ball(DVector::zeros(2), 1.0, NormOrder::Two)
    }

    #[test]
    fn unit_disk_is_valid() {
        assert!(unit_disk().validate().is_empty());
        assert_eq!(unit_disk().class_tag(), SetClassTag::Ellipsoid);
    }

    #[test]
    fn constraint_column_mismatch_is_one_violation() {
        let set = ConvexSetCCG::from_parts_unchecked(
            DMatrix::identity(2, 2),
            DVector::zeros(2),
            DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]),
            DVector::from_element(1, 0.0),
            vec![ConstraintBlock::ball_range(NormOrder::Inf, 0, 2)],
        );
        let v = set.validate();
        assert_eq!(v, vec![Violation::ConstraintColumns { cols_a: 3, n_g: 2 }]);
    }

    #[test]
    fn negative_cone_bound_is_one_violation() {
        let set = ConvexSetCCG::from_parts_unchecked(
            DMatrix::identity(2, 3),
            DVector::zeros(2),
            DMatrix::zeros(0, 3),
            DVector::zeros(0),
            vec![
                ConstraintBlock::NormCone {
                    p: NormOrder::Two,
                    xi: vec![0, 1],
                    lambda: vec![2],
                    w: vec![-1.0],
                    v: -0.1,
                },
                ConstraintBlock::free([2]),
            ],
        );
        assert_eq!(set.validate(), vec![Violation::NegativeBound { block: 0, v: -0.1 }]);
    }

    #[test]
    fn index_bookkeeping_violations() {
        let set = ConvexSetCCG::from_parts_unchecked(
            DMatrix::identity(2, 4),
            DVector::zeros(2),
            DMatrix::zeros(0, 4),
            DVector::zeros(0),
            vec![
                ConstraintBlock::NormCone {
                    p: NormOrder::Two,
                    xi: vec![0, 0],
                    lambda: vec![1],
                    w: vec![1.0],
                    v: 1.0,
                },
                ConstraintBlock::ball(NormOrder::Inf, [1, 5]),
            ],
        );
        let v = set.validate();
        assert!(v.contains(&Violation::DuplicateIndex { block: 0, index: 0 }));
        assert!(v.contains(&Violation::IndexOutOfRange { block: 1, index: 5, n_g: 4 }));
        assert!(v.contains(&Violation::LambdaNotFree { block: 0, index: 1 }));
        assert!(v.contains(&Violation::Unconstrained { index: 2 }));
        assert!(v.contains(&Violation::Unconstrained { index: 3 }));
    }

    #[test]
    fn shared_xi_is_reported() {
        let set = ConvexSetCCG::from_parts_unchecked(
            DMatrix::identity(2, 2),
            DVector::zeros(2),
            DMatrix::zeros(0, 2),
            DVector::zeros(0),
            vec![
                ConstraintBlock::ball(NormOrder::Inf, [0, 1]),
                ConstraintBlock::free([1]),
            ],
        );
        assert_eq!(
            set.validate(),
            vec![Violation::SharedXi { index: 1, first: 0, second: 1 }]
        );
    }

    #[test]
    fn interval_midpoint_and_half_width() {
        let z = ConvexSetCCG::from_interval(
            &DVector::from_vec(vec![-1.0, -2.0]),
            &DVector::from_vec(vec![3.0, 4.0]),
        )
        .unwrap();
        assert_eq!(z.g(), &DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0])));
        assert_eq!(z.c(), &DVector::from_vec(vec![1.0, 1.0]));
        assert_eq!(z.class_tag(), SetClassTag::Interval);
    }

    #[test]
    fn inverted_interval_is_rejected() {
        let err = ConvexSetCCG::from_interval(
            &DVector::from_vec(vec![0.0, 2.0]),
            &DVector::from_vec(vec![1.0, 1.0]),
        )
        .unwrap_err();
        assert_eq!(err, CcgError::InvertedInterval(1));
    }

    #[test]
    fn ellipsoid_requires_square_shape() {
        let err = ConvexSetCCG::from_ellipsoid(DMatrix::identity(2, 3), DVector::zeros(2)).unwrap_err();
        assert_eq!(err, CcgError::NonSquareEllipsoid { rows: 2, cols: 3 });
    }

    #[test]
    fn singleton_is_valid() {
        let s = ConvexSetCCG::singleton(DVector::from_vec(vec![1.0, 2.0]));
        assert!(s.validate().is_empty());
        assert_eq!(s.num_generators(), 0);
    }

    #[test]
    fn class_tags() {
        let cz = ConvexSetCCG::from_constrained_zonotope(
            DMatrix::identity(3, 3),
            DVector::zeros(3),
            DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]),
            DVector::from_element(1, 1.0),
        )
        .unwrap();
        assert_eq!(cz.class_tag(), SetClassTag::ConstrainedZonotope);
        let zono = ConvexSetCCG::from_zonotope(
            DMatrix::from_row_slice(2, 3, &[1.0, 0.5, 0.0, 0.0, 1.0, 1.0]),
            DVector::zeros(2),
        )
        .unwrap();
        assert_eq!(zono.class_tag(), SetClassTag::Zonotope);
        let cone = ConvexSetCCG::from_cone(DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
        assert_eq!(cone.class_tag(), SetClassTag::Cone);
    }

    #[test]
    fn generator_residual_measures_violation() {
        let disk = unit_disk();
        assert_eq!(disk.generator_residual(&DVector::from_vec(vec![0.6, 0.8])), 0.0);
        let r = disk.generator_residual(&DVector::from_vec(vec![0.0, 1.5]));
        assert!((r - 0.5).abs() < 1e-15);
    }
}
