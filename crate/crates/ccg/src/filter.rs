//! One step of the set-valued filter: propagate through the vertex maps,
//! intersect with every measurement set, reduce.

use std::time::Instant;

use ccg_core::uncertain::{propagate, update, VertexAffineMap};
use ccg_core::{relax_to_box_blocks, CcgError, ConvexSetCCG};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::reduce::{reduce_to_order, ReductionSpec};
use crate::solve::{QueryError, SetSolver};

/// `Ccg` keeps every block as given. `CzRelaxed` replaces the ℓ1/ℓ2 balls of
/// disturbance and measurement sets by ℓ∞ balls before use, which is the
/// constrained-zonotope baseline.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterMode {
    #[default]
    Ccg,
    CzRelaxed,
}

#[derive(Clone, Debug)]
pub struct FilterState {
    pub x: ConvexSetCCG,
    pub k: usize,
    pub reduction: ReductionSpec,
    pub mode: FilterMode,
    /// Directions for the logged outer area; `None` skips the area.
    pub volume_directions: Option<usize>,
}

impl FilterState {
    /// Initial state; in `CzRelaxed` mode `x0` is relaxed as well.
    pub fn new(
        x0: ConvexSetCCG,
        reduction: ReductionSpec,
        mode: FilterMode,
        volume_directions: Option<usize>,
    ) -> Result<Self, CcgError> {
        let x = match mode {
            FilterMode::Ccg => x0,
            FilterMode::CzRelaxed => relax_to_box_blocks(&x0)?,
        };
        Ok(FilterState {
            x,
            k: 0,
            reduction,
            mode,
            volume_directions,
        })
    }

    fn adapt(&self, z: &ConvexSetCCG) -> Result<ConvexSetCCG, CcgError> {
        match self.mode {
            FilterMode::Ccg => Ok(z.clone()),
            FilterMode::CzRelaxed => relax_to_box_blocks(z),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementSource {
    Beacon(usize),
    Telemetry,
}

/// `C x ∈ y_set`.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub c: DMatrix<f64>,
    pub y_set: ConvexSetCCG,
    pub source: MeasurementSource,
}

/// Everything the filter needs to advance from `k` to `k + 1`.
#[derive(Clone, Debug)]
pub struct StepInput {
    pub vertices: Vec<VertexAffineMap>,
    pub bu: DVector<f64>,
    pub l: DMatrix<f64>,
    pub d: ConvexSetCCG,
    pub measurements: Vec<Measurement>,
}

/// One row of the step table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub k: usize,
    /// Outer area of `X(k)`; NaN when not computed.
    pub volume: f64,
    pub step_ms: f64,
    pub n_g_pre: usize,
    pub n_g_post: usize,
    pub n_c_post: usize,
    pub contained: Option<bool>,
    pub beacon_active: bool,
}

impl StepLog {
    pub const CSV_HEADER: &'static str = "k,volume,step_ms,n_g_pre,n_g_post,n_c_post,contained,beacon_active";

    pub fn csv_row(&self) -> String {
        let contained = match self.contained {
            Some(b) => b.to_string(),
            None => String::new(),
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            self.k, self.volume, self.step_ms, self.n_g_pre, self.n_g_post, self.n_c_post, contained, self.beacon_active
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FilterError {
    #[error("estimate became empty at step {k}: measurements are inconsistent with the model bounds")]
    Empty { k: usize },
    #[error("step {k}: {source}")]
    Query { k: usize, source: QueryError },
}

impl FilterError {
    fn at(k: usize) -> impl Fn(QueryError) -> FilterError {
        move |source| match source {
            QueryError::Empty => FilterError::Empty { k },
            source => FilterError::Query { k, source },
        }
    }
}

/// Propagate, fold the measurement updates in order, check emptiness when
/// something was intersected, reduce. `truth` (the true state at `k + 1`)
/// only feeds the containment column.
pub fn filter_step(
    solver: &SetSolver,
    fs: &FilterState,
    input: &StepInput,
    truth: Option<&DVector<f64>>,
) -> Result<(FilterState, StepLog), FilterError> {
    let k_next = fs.k + 1;
    let err = FilterError::at(k_next);
    let start = Instant::now();

    let d = fs.adapt(&input.d).map_err(|e| err(e.into()))?;
    let mut x = propagate(&fs.x, &input.vertices, &input.bu, &input.l, &d).map_err(|e| err(e.into()))?;
    for m in &input.measurements {
        let y = fs.adapt(&m.y_set).map_err(|e| err(e.into()))?;
        x = update(&x, &m.c, &y).map_err(|e| err(e.into()))?;
    }
    if !input.measurements.is_empty() && solver.is_empty(&x).map_err(&err)? {
        return Err(FilterError::Empty { k: k_next });
    }
    let n_g_pre = x.num_generators();
    let reduced = reduce_to_order(solver, &x, &fs.reduction, fs.k as u64).map_err(&err)?;
    let step_ms = start.elapsed().as_secs_f64() * 1e3;

    let volume = match fs.volume_directions {
        Some(k) if reduced.dim() == 2 => solver.volume_2d(&reduced, k).map_err(&err)?,
        _ => f64::NAN,
    };
    let contained = match truth {
        Some(t) => Some(solver.contains(&reduced, t).map_err(&err)?.contained),
        None => None,
    };
    let log = StepLog {
        k: k_next,
        volume,
        step_ms,
        n_g_pre,
        n_g_post: reduced.num_generators(),
        n_c_post: reduced.num_constraints(),
        contained,
        beacon_active: input
            .measurements
            .iter()
            .any(|m| matches!(m.source, MeasurementSource::Beacon(_))),
    };
    let next = FilterState {
        x: reduced,
        k: k_next,
        ..fs.clone()
    };
    Ok((next, log))
}
