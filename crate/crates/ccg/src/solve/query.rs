//! Conic programs compiled from CCG membership conditions.

use ccg_core::{ConstraintBlock, ConvexSetCCG, NormOrder};
use nalgebra::{DMatrix, DVector};

use super::QueryError;

/// `‖x_xi‖_p + Σ_j w_j x_{lambda_j} ≤ v`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormConeConstraint {
    pub p: NormOrder,
    pub xi: Vec<usize>,
    pub lambda: Vec<usize>,
    pub w: Vec<f64>,
    pub v: f64,
}

/// `Σ coeff·x ≤ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearInequality {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Minimize `objectiveᵀ x` subject to `eq_matrix x = eq_rhs`, the norm cones
/// and the linear inequalities.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicQuery {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub eq_matrix: DMatrix<f64>,
    pub eq_rhs: DVector<f64>,
    pub cones: Vec<NormConeConstraint>,
    pub inequalities: Vec<LinearInequality>,
}

/// How the backend expresses the query: second-order cones stay native,
/// ℓ1/ℓ∞ cones become linear inequalities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Lowering {
    pub second_order_cones: usize,
    pub linear_cones: usize,
    /// Auxiliary variables (one per coordinate of an ℓ1 cone).
    pub aux_vars: usize,
    /// Constraints `|x_i| ≤ bound`, each lowered to two inequality rows.
    pub box_constraints: usize,
    pub inequality_rows: usize,
}

impl ConicQuery {
    pub fn lowering(&self) -> Lowering {
        let mut out = Lowering {
            inequality_rows: self.inequalities.len(),
            ..Lowering::default()
        };
        for cone in &self.cones {
            let k = cone.xi.len();
            match cone.p {
                NormOrder::Two if k > 0 => out.second_order_cones += 1,
                NormOrder::Two => {
                    out.linear_cones += 1;
                    out.inequality_rows += 1;
                }
                NormOrder::Inf => {
                    out.linear_cones += 1;
                    out.box_constraints += k;
                    out.inequality_rows += (2 * k).max(1);
                }
                NormOrder::One => {
                    out.linear_cones += 1;
                    out.aux_vars += k;
                    out.box_constraints += k;
                    out.inequality_rows += 2 * k + 1;
                }
            }
        }
        out
    }

    /// Phase-one relaxation: appends a slack `s` that loosens every cone and
    /// inequality by `s`, bounds `s ≥ -1`, and minimizes `s`. The original
    /// system is feasible iff the optimum is `≤ 0`. Returns the slack index.
    pub fn with_uniform_slack(mut self) -> (Self, usize) {
        let s = self.num_vars;
        self.num_vars += 1;
        self.objective = vec![0.0; self.num_vars];
        self.objective[s] = 1.0;
        self.eq_matrix = self.eq_matrix.clone().insert_column(s, 0.0);
        for cone in &mut self.cones {
            cone.lambda.push(s);
            cone.w.push(-1.0);
        }
        for ineq in &mut self.inequalities {
            ineq.coeffs.push((s, -1.0));
        }
        self.inequalities.push(LinearInequality {
            coeffs: vec![(s, -1.0)],
            rhs: 1.0,
        });
        (self, s)
    }
}

/// Membership system of `z` over `ξ ∈ ℝ^{n_g}`: `A ξ = b`, optional extra
/// equalities, one cone per norm block and sign rows per nonnegative block.
pub fn compile(
    z: &ConvexSetCCG,
    extra_eq: Option<(&DMatrix<f64>, &DVector<f64>)>,
    objective: &DVector<f64>,
) -> Result<ConicQuery, QueryError> {
    let n_g = z.num_generators();
    if objective.len() != n_g {
        return Err(QueryError::Dimension {
            expected: n_g,
            found: objective.len(),
        });
    }
    let (eq_matrix, eq_rhs) = match extra_eq {
        None => (z.a().clone(), z.b().clone()),
        Some((m, r)) => {
            if m.ncols() != n_g || m.nrows() != r.len() {
                return Err(QueryError::Dimension {
                    expected: n_g,
                    found: m.ncols(),
                });
            }
            let rows = z.num_constraints() + m.nrows();
            let mut a = DMatrix::zeros(rows, n_g);
            a.view_mut((0, 0), z.a().shape()).copy_from(z.a());
            a.view_mut((z.num_constraints(), 0), m.shape()).copy_from(m);
            let b = DVector::from_iterator(rows, z.b().iter().chain(r.iter()).copied());
            (a, b)
        }
    };

    let mut cones = Vec::new();
    let mut inequalities = Vec::new();
    for blk in z.blocks() {
        match blk {
            ConstraintBlock::NormBall { p, xi } => cones.push(NormConeConstraint {
                p: *p,
                xi: xi.clone(),
                lambda: vec![],
                w: vec![],
                v: 1.0,
            }),
            ConstraintBlock::NormCone { p, xi, lambda, w, v } => cones.push(NormConeConstraint {
                p: *p,
                xi: xi.clone(),
                lambda: lambda.clone(),
                w: w.clone(),
                v: *v,
            }),
            ConstraintBlock::Free { .. } => {}
            ConstraintBlock::Nonneg { xi } => inequalities.extend(xi.iter().map(|&i| LinearInequality {
                coeffs: vec![(i, -1.0)],
                rhs: 0.0,
            })),
        }
    }
    Ok(ConicQuery {
        num_vars: n_g,
        objective: objective.iter().copied().collect(),
        eq_matrix,
        eq_rhs,
        cones,
        inequalities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccg_core::convex_hull_pair;

    #[test]
    fn disk_compiles_to_one_second_order_cone() {
        let disk = ConvexSetCCG::ball(DVector::zeros(2), 1.0, NormOrder::Two);
        let q = compile(&disk, None, &DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_eq!(q.cones.len(), 1);
        assert_eq!(q.eq_matrix.nrows(), 0);
        assert_eq!(q.lowering().second_order_cones, 1);
    }

    #[test]
    fn hull_of_disks_shares_interpolation_variable() {
        let d1 = ConvexSetCCG::ball(DVector::from_vec(vec![-2.0, 0.0]), 1.0, NormOrder::Two);
        let d2 = ConvexSetCCG::ball(DVector::from_vec(vec![2.0, 0.0]), 1.0, NormOrder::Two);
        let h = convex_hull_pair(&d1, &d2).unwrap();
        let q = compile(&h, None, &DVector::zeros(5)).unwrap();
        assert_eq!(q.lowering().second_order_cones, 2);
        assert_eq!(q.cones[0].lambda, vec![4]);
        assert_eq!(q.cones[1].lambda, vec![4]);
        assert_eq!(q.cones[0].w, vec![-1.0]);
        assert_eq!(q.cones[1].w, vec![1.0]);
    }

    #[test]
    fn constrained_zonotope_lowers_to_box_rows() {
        let cz = ConvexSetCCG::from_constrained_zonotope(
            DMatrix::identity(3, 3),
            DVector::zeros(3),
            DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]),
            DVector::from_element(1, 1.0),
        )
        .unwrap();
        let q = compile(&cz, None, &DVector::zeros(3)).unwrap();
        assert_eq!(q.cones.len(), 1);
        assert_eq!(q.eq_matrix.nrows(), 1);
        let low = q.lowering();
        assert_eq!(low.box_constraints, 3);
        assert_eq!(low.second_order_cones, 0);
        assert_eq!(low.inequality_rows, 6);
    }

    #[test]
    fn free_blocks_compile_to_nothing_and_nonneg_to_sign_rows() {
        let cone = ConvexSetCCG::from_cone(DMatrix::identity(2, 2), DVector::zeros(2)).unwrap();
        let q = compile(&cone, None, &DVector::zeros(2)).unwrap();
        assert!(q.cones.is_empty());
        assert_eq!(q.inequalities.len(), 2);
        let free = ConvexSetCCG::new(
            DMatrix::identity(1, 1),
            DVector::zeros(1),
            DMatrix::zeros(0, 1),
            DVector::zeros(0),
            vec![ConstraintBlock::free([0])],
        )
        .unwrap();
        let q = compile(&free, None, &DVector::zeros(1)).unwrap();
        assert!(q.cones.is_empty() && q.inequalities.is_empty());
    }

    #[test]
    fn extra_equalities_are_stacked() {
        let disk = ConvexSetCCG::ball(DVector::zeros(2), 1.0, NormOrder::Two);
        let m = DMatrix::identity(2, 2);
        let r = DVector::from_vec(vec![0.1, 0.2]);
        let q = compile(&disk, Some((&m, &r)), &DVector::zeros(2)).unwrap();
        assert_eq!(q.eq_matrix.nrows(), 2);
        assert_eq!(q.eq_rhs, r);
    }
}
