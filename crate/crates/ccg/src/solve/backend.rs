use std::time::{Duration, Instant};

use ccg_core::NormOrder;
use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
    SupportedConeT::{NonnegativeConeT, SecondOrderConeT, ZeroConeT},
};

use super::query::ConicQuery;

/// Solver accuracy targets. Decisions (membership, emptiness) compare
/// against `feasibility`; `gap` bounds the optimality gap of support values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverTolerances {
    pub feasibility: f64,
    pub gap: f64,
    pub max_iter: u32,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        SolverTolerances {
            feasibility: 1e-7,
            gap: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalTrouble,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Objective at the primal point; NaN unless optimal.
    pub value: f64,
    primal: Option<Vec<f64>>,
    pub iterations: u32,
    pub wall_time: Duration,
}

impl SolveOutcome {
    pub fn optimal(value: f64, primal: Vec<f64>, iterations: u32, wall_time: Duration) -> Self {
        SolveOutcome {
            status: SolveStatus::Optimal,
            value,
            primal: Some(primal),
            iterations,
            wall_time,
        }
    }

    pub fn failed(status: SolveStatus, iterations: u32, wall_time: Duration) -> Self {
        debug_assert_ne!(status, SolveStatus::Optimal);
        SolveOutcome {
            status,
            value: f64::NAN,
            primal: None,
            iterations,
            wall_time,
        }
    }

    /// Present iff the status is `Optimal`.
    pub fn primal(&self) -> Option<&[f64]> {
        self.primal.as_deref()
    }
}

/// Anything that can solve a [`ConicQuery`]. Implementations hold no mutable
/// state across calls, so one backend may serve parallel queries.
pub trait ConicBackend: Send + Sync {
    fn solve(&self, query: &ConicQuery, tol: &SolverTolerances) -> SolveOutcome;
}

/// Interior-point backend built on Clarabel.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClarabelBackend;

/// Rows `b - A x ∈ K` in Clarabel's standard form.
#[derive(Default)]
struct Rows {
    rows: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    rhs: Vec<f64>,
}

impl Rows {
    /// Appends the row `constant + Σ coef·x` (which the cone then constrains).
    fn push(&mut self, terms: impl IntoIterator<Item = (usize, f64)>, constant: f64) {
        let r = self.rhs.len();
        for (col, coef) in terms {
            if coef != 0.0 {
                self.rows.push(r);
                self.cols.push(col);
                self.vals.push(-coef);
            }
        }
        self.rhs.push(constant);
    }

    fn len(&self) -> usize {
        self.rhs.len()
    }

    fn append(&mut self, other: Rows) {
        let off = self.len();
        self.rows.extend(other.rows.into_iter().map(|r| r + off));
        self.cols.extend(other.cols);
        self.vals.extend(other.vals);
        self.rhs.extend(other.rhs);
    }
}

struct Lowered {
    num_vars: usize,
    rows: Rows,
    cones: Vec<SupportedConeT<f64>>,
}

/// Rows whose coefficients are all zero cannot be handed to the solver;
/// they are checked here. `Err` means the system is trivially infeasible.
fn lower(query: &ConicQuery, tol: f64) -> Result<Lowered, ()> {
    let n = query.num_vars;
    let mut next_aux = n;

    let mut eq = Rows::default();
    for i in 0..query.eq_matrix.nrows() {
        let row = query.eq_matrix.row(i);
        let rhs = query.eq_rhs[i];
        if row.iter().all(|&x| x == 0.0) {
            if rhs.abs() > tol {
                return Err(());
            }
            continue;
        }
        // b - A x = 0  with  A = row
        eq.push(row.iter().enumerate().map(|(j, &v)| (j, -v)), rhs);
    }

    let mut lin = Rows::default();
    let mut soc: Vec<(Rows, usize)> = Vec::new();
    for ineq in &query.inequalities {
        // rhs - aᵀx ≥ 0
        lin.push(ineq.coeffs.iter().map(|&(j, v)| (j, -v)), ineq.rhs);
    }
    for cone in &query.cones {
        // bound(x) = v - wᵀ x_λ
        let bound = || cone.lambda.iter().zip(&cone.w).map(|(&j, &w)| (j, -w));
        match cone.p {
            NormOrder::Two if !cone.xi.is_empty() => {
                let mut rows = Rows::default();
                rows.push(bound(), cone.v);
                for &i in &cone.xi {
                    rows.push([(i, 1.0)], 0.0);
                }
                soc.push((rows, cone.xi.len() + 1));
            }
            NormOrder::Inf if !cone.xi.is_empty() => {
                for &i in &cone.xi {
                    lin.push(bound().chain([(i, -1.0)]), cone.v);
                    lin.push(bound().chain([(i, 1.0)]), cone.v);
                }
            }
            NormOrder::One if !cone.xi.is_empty() => {
                let aux: Vec<usize> = (next_aux..next_aux + cone.xi.len()).collect();
                next_aux += cone.xi.len();
                for (&i, &t) in cone.xi.iter().zip(&aux) {
                    lin.push([(t, 1.0), (i, -1.0)], 0.0);
                    lin.push([(t, 1.0), (i, 1.0)], 0.0);
                }
                lin.push(bound().chain(aux.iter().map(|&t| (t, -1.0))), cone.v);
            }
            _ => {
                // empty norm argument: 0 ≤ v - wᵀλ
                if cone.lambda.is_empty() {
                    if cone.v < -tol {
                        return Err(());
                    }
                } else {
                    lin.push(bound(), cone.v);
                }
            }
        }
    }

    let mut cones = Vec::new();
    let mut rows = Rows::default();
    if eq.len() > 0 {
        cones.push(ZeroConeT(eq.len()));
        rows.append(eq);
    }
    if lin.len() > 0 {
        cones.push(NonnegativeConeT(lin.len()));
        rows.append(lin);
    }
    for (r, dim) in soc {
        cones.push(SecondOrderConeT(dim));
        rows.append(r);
    }
    Ok(Lowered {
        num_vars: next_aux,
        rows,
        cones,
    })
}

impl ConicBackend for ClarabelBackend {
    fn solve(&self, query: &ConicQuery, tol: &SolverTolerances) -> SolveOutcome {
        let start = Instant::now();
        let lowered = match lower(query, tol.feasibility) {
            Ok(l) => l,
            Err(()) => return SolveOutcome::failed(SolveStatus::Infeasible, 0, start.elapsed()),
        };
        let n = lowered.num_vars;
        let mut q = query.objective.clone();
        q.resize(n, 0.0);

        if lowered.rows.len() == 0 {
            // Nothing constrains x: bounded only for a zero objective.
            return if q.iter().all(|&v| v == 0.0) {
                SolveOutcome::optimal(0.0, vec![0.0; query.num_vars], 0, start.elapsed())
            } else {
                SolveOutcome::failed(SolveStatus::Unbounded, 0, start.elapsed())
            };
        }

        let m = lowered.rows.len();
        let a = CscMatrix::new_from_triplets(m, n, lowered.rows.rows, lowered.rows.cols, lowered.rows.vals);
        let p = CscMatrix::<f64>::zeros((n, n));
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(tol.max_iter)
            .tol_feas(tol.feasibility.min(1e-8))
            .tol_gap_abs(tol.gap)
            .tol_gap_rel(tol.gap)
            .build()
            .expect("static solver settings are valid");
        let mut solver = match DefaultSolver::new(&p, &q, &a, &lowered.rows.rhs, &lowered.cones, settings) {
            Ok(s) => s,
            Err(_) => return SolveOutcome::failed(SolveStatus::NumericalTrouble, 0, start.elapsed()),
        };
        solver.solve();
        let sol = &solver.solution;
        let iterations = sol.iterations;
        let elapsed = start.elapsed();
        match sol.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => {
                let x: Vec<f64> = sol.x[..query.num_vars].to_vec();
                let value = query.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                SolveOutcome::optimal(value, x, iterations, elapsed)
            }
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => {
                SolveOutcome::failed(SolveStatus::Infeasible, iterations, elapsed)
            }
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => {
                SolveOutcome::failed(SolveStatus::Unbounded, iterations, elapsed)
            }
            _ => SolveOutcome::failed(SolveStatus::NumericalTrouble, iterations, elapsed),
        }
    }
}
