//! Solver-backed queries on CCG sets: support function, membership,
//! emptiness, surface sampling and planar outer polygons.
//!
//! These queries are also the oracle every other module is tested against.

mod backend;
mod geometry;
mod query;

use std::sync::Arc;

use ccg_core::{CcgError, ConvexSetCCG};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub use backend::{ClarabelBackend, ConicBackend, SolveOutcome, SolveStatus, SolverTolerances};
pub use geometry::{polygon_area, Polygon};
pub use query::{compile, ConicQuery, LinearInequality, Lowering, NormConeConstraint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QueryError {
    #[error("the set is empty")]
    Empty,
    #[error("the set is unbounded in the queried direction")]
    Unbounded,
    #[error("solver could not decide the query ({0})")]
    Indeterminate(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("planar query on a set of dimension {0}")]
    NotPlanar(usize),
    #[error("need at least {min} directions, got {got}")]
    TooFewDirections { min: usize, got: usize },
    #[error(transparent)]
    Set(#[from] CcgError),
}

/// `max uᵀx` over the set and a maximizer.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub value: f64,
    pub point: DVector<f64>,
    pub iterations: u32,
}

/// Membership verdict with the phase-one slack that decided it (negative
/// inside, positive outside, `+∞` when the affine constraints alone fail).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Containment {
    pub contained: bool,
    pub slack: f64,
    pub residual: f64,
}

const SURFACE_RETRIES: usize = 3;

/// Query front end over a conic backend.
#[derive(Clone)]
pub struct SetSolver {
    backend: Arc<dyn ConicBackend>,
    tol: SolverTolerances,
}

impl Default for SetSolver {
    fn default() -> Self {
        SetSolver::new(Arc::new(ClarabelBackend), SolverTolerances::default())
    }
}

impl std::fmt::Debug for SetSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SetSolver").field("tol", &self.tol).finish_non_exhaustive()
    }
}

impl SetSolver {
    pub fn new(backend: Arc<dyn ConicBackend>, tol: SolverTolerances) -> Self {
        SetSolver { backend, tol }
    }

    pub fn with_tolerances(&self, tol: SolverTolerances) -> Self {
        SetSolver {
            backend: Arc::clone(&self.backend),
            tol,
        }
    }

    pub fn tolerances(&self) -> &SolverTolerances {
        &self.tol
    }

    pub fn solve(&self, query: &ConicQuery) -> SolveOutcome {
        self.backend.solve(query, &self.tol)
    }

    /// Support value `h_Z(u)` and the maximizer `G ξ* + c`.
    pub fn support(&self, z: &ConvexSetCCG, u: &DVector<f64>) -> Result<Support, QueryError> {
        if u.len() != z.dim() {
            return Err(QueryError::Dimension {
                expected: z.dim(),
                found: u.len(),
            });
        }
        let objective = -(z.g().transpose() * u);
        let query = compile(z, None, &objective)?;
        let out = self.solve(&query);
        match out.status {
            SolveStatus::Optimal => {
                let xi = DVector::from_column_slice(out.primal().expect("optimal outcome has a point"));
                let point = z.point(&xi);
                Ok(Support {
                    value: u.dot(&point),
                    point,
                    iterations: out.iterations,
                })
            }
            SolveStatus::Infeasible => Err(QueryError::Empty),
            SolveStatus::Unbounded => Err(QueryError::Unbounded),
            SolveStatus::NumericalTrouble => Err(QueryError::Indeterminate("support")),
        }
    }

    /// Support values in many directions, solved in parallel.
    pub fn supports(&self, z: &ConvexSetCCG, dirs: &[DVector<f64>]) -> Result<Vec<Support>, QueryError> {
        dirs.par_iter().map(|u| self.support(z, u)).collect()
    }

    /// Phase-one slack of the membership system, optionally pinned to a point.
    fn phase_one(&self, z: &ConvexSetCCG, pin: Option<&DVector<f64>>) -> Result<Containment, QueryError> {
        let n_g = z.num_generators();
        let rhs;
        let extra = match pin {
            Some(x) => {
                if x.len() != z.dim() {
                    return Err(QueryError::Dimension {
                        expected: z.dim(),
                        found: x.len(),
                    });
                }
                rhs = x - z.c();
                Some((z.g(), &rhs))
            }
            None => None,
        };
        let (query, s) = compile(z, extra, &DVector::zeros(n_g))?.with_uniform_slack();
        let out = self.solve(&query);
        match out.status {
            SolveStatus::Optimal => {
                let x = out.primal().expect("optimal outcome has a point");
                let slack = x[s];
                let xv = DVector::from_column_slice(x);
                let residual = if query.eq_matrix.nrows() == 0 {
                    0.0
                } else {
                    (&query.eq_matrix * &xv - &query.eq_rhs).amax()
                };
                let scale = 1.0 + query.eq_rhs.amax();
                let tol = self.tol.feasibility;
                Ok(Containment {
                    contained: slack <= tol && residual <= tol * scale,
                    slack,
                    residual,
                })
            }
            SolveStatus::Infeasible => Ok(Containment {
                contained: false,
                slack: f64::INFINITY,
                residual: f64::INFINITY,
            }),
            SolveStatus::Unbounded | SolveStatus::NumericalTrouble => {
                Err(QueryError::Indeterminate("membership"))
            }
        }
    }

    /// Whether `x ∈ Z`, decided at the feasibility tolerance.
    pub fn contains(&self, z: &ConvexSetCCG, x: &DVector<f64>) -> Result<Containment, QueryError> {
        self.phase_one(z, Some(x))
    }

    pub fn is_empty(&self, z: &ConvexSetCCG) -> Result<bool, QueryError> {
        Ok(!self.phase_one(z, None)?.contained)
    }

    /// Support points for the given unit directions (columns of `dirs`).
    pub fn surface_points(&self, z: &ConvexSetCCG, dirs: &DMatrix<f64>) -> Result<DMatrix<f64>, QueryError> {
        let cols: Vec<DVector<f64>> = dirs.column_iter().map(|c| c.clone_owned()).collect();
        let sup = self.supports(z, &cols)?;
        let mut pts = DMatrix::zeros(z.dim(), cols.len());
        for (j, s) in sup.iter().enumerate() {
            pts.set_column(j, &s.point);
        }
        Ok(pts)
    }

    /// `count` directions uniform on the sphere and the support point of
    /// each. A direction the solver cannot handle is redrawn (3 retries).
    pub fn sample_surface<R: Rng + ?Sized>(
        &self,
        z: &ConvexSetCCG,
        count: usize,
        rng: &mut R,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>), QueryError> {
        let n = z.dim();
        let mut dirs = DMatrix::zeros(n, count);
        let mut pts = DMatrix::zeros(n, count);
        for j in 0..count {
            let mut attempt = 0;
            loop {
                let u = random_unit(n, rng);
                match self.support(z, &u) {
                    Ok(s) => {
                        dirs.set_column(j, &u);
                        pts.set_column(j, &s.point);
                        break;
                    }
                    Err(QueryError::Indeterminate(_)) if attempt < SURFACE_RETRIES => attempt += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        Ok((dirs, pts))
    }

    /// Intersection of the supporting half-planes at `k` equally spaced
    /// angles (starting at angle 0), counter-clockwise. Contains `Z`.
    pub fn outer_polygon(&self, z: &ConvexSetCCG, k: usize) -> Result<Polygon, QueryError> {
        if z.dim() != 2 {
            return Err(QueryError::NotPlanar(z.dim()));
        }
        if k < 3 {
            return Err(QueryError::TooFewDirections { min: 3, got: k });
        }
        let dirs = geometry::polygon_directions(k);
        let values: Vec<f64> = self.supports(z, &dirs)?.into_iter().map(|s| s.value).collect();
        Ok(geometry::clip_halfplanes(&dirs, &values))
    }

    /// Area of [`outer_polygon`](Self::outer_polygon): an outer estimate of
    /// the set's area. An empty set has area 0.
    pub fn volume_2d(&self, z: &ConvexSetCCG, k: usize) -> Result<f64, QueryError> {
        match self.outer_polygon(z, k) {
            Ok(poly) => Ok(polygon_area(&poly)),
            Err(QueryError::Empty) => Ok(0.0),
            Err(e) => Err(e),
        }
    }
}

/// Normalized Gaussian draw.
pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}
