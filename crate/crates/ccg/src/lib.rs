//! Set-valued estimation with convex conic generator sets: solver queries,
//! order reduction, the set-membership filter and the unicycle scenario.

pub mod cli;
pub mod filter;
pub mod io;
pub mod reduce;
pub mod scenario;
pub mod solve;
pub mod svg;

pub use ccg_core as core;
pub use filter::{filter_step, FilterError, FilterMode, FilterState, Measurement, StepInput, StepLog};
pub use reduce::{reduce_to_order, reduce_with_directions, ReductionMode, ReductionSpec};
pub use scenario::{run_scenario, ScenarioConfig, ScenarioRun};
pub use solve::{Containment, QueryError, SetSolver, Support};
