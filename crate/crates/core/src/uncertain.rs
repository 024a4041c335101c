//! Set-valued propagation and measurement update for uncertain LPV models
//!
//! ```text
//! x(k+1) = (F + Σ_ℓ Δ_ℓ U_ℓ) x(k) + B u(k) + L d(k),   |Δ_ℓ| ≤ 1
//! y(k)   = C x(k) + N w(k)
//! ```
//!
//! Propagation takes the exact convex hull of the state set mapped through
//! every vertex of the uncertainty box.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{CcgError, Result};
use crate::hull::convex_hull_many;
use crate::ops::{intersection_under_map, linear_map, minkowski_sum, translate};
use crate::set::ConvexSetCCG;

/// Default cap on the number of uncertainties (2^8 = 256 vertex maps).
pub const DEFAULT_VERTEX_CAP: usize = 8;

/// Model data for one time step.
#[derive(Clone, Debug, PartialEq)]
pub struct UncertainStepModel {
    /// Nominal dynamics at the measured parameter.
    pub f: DMatrix<f64>,
    /// Uncertainty directions, one per normalized `Δ_ℓ ∈ [-1, 1]`.
    pub u: Vec<DMatrix<f64>>,
    pub b: DMatrix<f64>,
    pub l: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub n: DMatrix<f64>,
}

impl UncertainStepModel {
    pub fn state_dim(&self) -> usize {
        self.f.nrows()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.f.nrows();
        let dims = [
            (n, self.f.ncols()),
            (n, self.b.nrows()),
            (n, self.l.nrows()),
            (n, self.c.ncols()),
            (self.c.nrows(), self.n.nrows()),
        ];
        let extra = self.u.iter().flat_map(|m| [(n, m.nrows()), (n, m.ncols())]);
        for (expected, found) in dims.into_iter().chain(extra) {
            if expected != found {
                return Err(CcgError::DimensionMismatch {
                    op: "uncertain_step_model",
                    expected,
                    found,
                });
            }
        }
        Ok(())
    }
}

/// `x ↦ F_v x + t_v` for one vertex of the uncertainty box.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexAffineMap {
    pub f: DMatrix<f64>,
    pub t: DVector<f64>,
}

impl VertexAffineMap {
    pub fn linear(f: DMatrix<f64>) -> Self {
        let n = f.nrows();
        VertexAffineMap {
            f,
            t: DVector::zeros(n),
        }
    }

    pub fn translation(t: DVector<f64>) -> Self {
        let n = t.len();
        VertexAffineMap {
            f: DMatrix::identity(n, n),
            t,
        }
    }
}

/// All `2^{n_Δ}` maps `F + Σ_ℓ s_ℓ U_ℓ`, `s ∈ {-1, +1}^{n_Δ}`. Bit `ℓ` of the
/// vertex index selects the sign of `U_ℓ` (0 ↦ -1).
pub fn enumerate_vertices(model: &UncertainStepModel, cap: usize) -> Result<Vec<VertexAffineMap>> {
    model.check()?;
    let count = model.u.len();
    if count > cap {
        return Err(CcgError::VertexCapExceeded { count, cap });
    }
    Ok((0..1usize << count)
        .map(|vertex| {
            let f = model.u.iter().enumerate().fold(model.f.clone(), |acc, (l, ul)| {
                if vertex >> l & 1 == 1 {
                    acc + ul
                } else {
                    acc - ul
                }
            });
            VertexAffineMap::linear(f)
        })
        .collect())
}

/// `cvxHull(∪_v (F_v X + t_v)) + B u ⊕ L D`.
pub fn propagate(
    x: &ConvexSetCCG,
    vertices: &[VertexAffineMap],
    bu: &DVector<f64>,
    l: &DMatrix<f64>,
    d: &ConvexSetCCG,
) -> Result<ConvexSetCCG> {
    if vertices.is_empty() {
        return Err(CcgError::NoVertices);
    }
    let images = vertices
        .iter()
        .map(|v| linear_map(&v.f, &v.t, x))
        .collect::<Result<Vec<_>>>()?;
    let hull = convex_hull_many(&images)?;
    let shifted = translate(&hull, bu)?;
    let disturbance = linear_map(l, &DVector::zeros(l.nrows()), d)?;
    minkowski_sum(&shifted, &disturbance)
}

/// Output-space set `{y} ⊕ (-N) W` consistent with the measurement.
pub fn build_output_set(y: &DVector<f64>, n: &DMatrix<f64>, w: &ConvexSetCCG) -> Result<ConvexSetCCG> {
    linear_map(&(-n), y, w)
}

/// `X_prop ∩_C Y`.
pub fn update(x_prop: &ConvexSetCCG, c: &DMatrix<f64>, y_set: &ConvexSetCCG) -> Result<ConvexSetCCG> {
    intersection_under_map(x_prop, c, y_set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::NormOrder;

    fn model(n_delta: usize, eps: f64) -> UncertainStepModel {
        let f = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        let u = (0..n_delta)
            .map(|l| {
                let mut m = DMatrix::zeros(2, 2);
                m[(l % 2, (l + 1) % 2)] = eps;
                m
            })
            .collect();
        UncertainStepModel {
            f,
            u,
            b: DMatrix::identity(2, 1),
            l: DMatrix::identity(2, 2),
            c: DMatrix::identity(1, 2),
            n: DMatrix::identity(1, 1),
        }
    }

    #[test]
    fn no_uncertainty_gives_nominal_map() {
        let m = model(0, 0.0);
        let v = enumerate_vertices(&m, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(v, vec![VertexAffineMap::linear(m.f.clone())]);
    }

    #[test]
    fn two_uncertainties_give_four_sign_patterns() {
        let m = model(2, 0.2);
        let v = enumerate_vertices(&m, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(v.len(), 4);
        let expected = [
            &m.f - &m.u[0] - &m.u[1],
            &m.f + &m.u[0] - &m.u[1],
            &m.f - &m.u[0] + &m.u[1],
            &m.f + &m.u[0] + &m.u[1],
        ];
        for (got, want) in v.iter().zip(expected.iter()) {
            assert_eq!(&got.f, want);
            assert!(got.t.iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn scaled_identity_uncertainty() {
        let eps = 0.05;
        let m = UncertainStepModel {
            u: vec![DMatrix::identity(2, 2) * eps],
            ..model(0, 0.0)
        };
        let v = enumerate_vertices(&m, DEFAULT_VERTEX_CAP).unwrap();
        for (vm, s) in v.iter().zip([-1.0, 1.0]) {
            for i in 0..2 {
                for j in 0..2 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert_eq!(vm.f[(i, j)], m.f[(i, j)] + s * eps * id);
                }
            }
        }
    }

    #[test]
    fn vertex_cap_is_enforced() {
        let m = model(3, 0.1);
        assert_eq!(
            enumerate_vertices(&m, 2).unwrap_err(),
            CcgError::VertexCapExceeded { count: 3, cap: 2 }
        );
    }

    #[test]
    fn singleton_propagates_to_singleton() {
        let x0 = DVector::from_vec(vec![1.0, -1.0]);
        let x = ConvexSetCCG::singleton(x0.clone());
        let bu = DVector::from_vec(vec![0.5, 0.25]);
        let d = ConvexSetCCG::singleton(DVector::zeros(2));
        let out = propagate(&x, &[VertexAffineMap::linear(DMatrix::identity(2, 2))], &bu, &DMatrix::identity(2, 2), &d)
            .unwrap();
        assert_eq!(out.num_generators(), 0);
        assert_eq!(out.c(), &(x0 + bu));
    }

    #[test]
    fn generator_count_recurrence() {
        let m = model(2, 0.1);
        let vertices = enumerate_vertices(&m, DEFAULT_VERTEX_CAP).unwrap();
        let d = ConvexSetCCG::ball(DVector::zeros(2), 0.1, NormOrder::Two);
        let mut x = ConvexSetCCG::from_interval(&DVector::from_element(2, -1.0), &DVector::from_element(2, 1.0)).unwrap();
        for _ in 0..3 {
            let before = x.num_generators();
            x = propagate(&x, &vertices, &DVector::zeros(2), &m.l, &d).unwrap();
            let nv = vertices.len();
            assert_eq!(x.num_generators(), nv * before + (nv - 1) + d.num_generators());
            assert!(x.validate().is_empty());
        }
    }

    #[test]
    fn output_set_of_interval_noise() {
        let w = ConvexSetCCG::from_interval(&DVector::from_element(1, -0.5), &DVector::from_element(1, 0.5)).unwrap();
        let y = build_output_set(&DVector::from_element(1, 3.0), &DMatrix::identity(1, 1), &w).unwrap();
        assert_eq!(y.c()[0], 3.0);
        assert_eq!(y.g()[(0, 0)], -0.5);
    }
}
