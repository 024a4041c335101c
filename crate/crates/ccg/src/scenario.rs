//! Unicycle localization scenario: ground truth, sensors and the filter loop.

use std::f64::consts::PI;

use ccg_core::unicycle::{
    build_vertex_maps, controller, dynamics_step, reference, wrap_angle, TrajectorySpec, UnicycleState,
};
use ccg_core::{minkowski_sum, ConvexSetCCG, NormOrder};
use nalgebra::{DMatrix, DVector, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::filter::{filter_step, FilterError, FilterMode, FilterState, Measurement, MeasurementSource, StepInput, StepLog};
use crate::reduce::{ReductionMode, ReductionSpec};
use crate::solve::{Polygon, SetSolver, SolverTolerances};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectoryConfig {
    Figure8 {
        center: [f64; 2],
        amplitudes: [f64; 2],
        omega: f64,
    },
    Spiral {
        center: [f64; 2],
        r0: f64,
        growth: f64,
        omega: f64,
    },
}

impl From<&TrajectoryConfig> for TrajectorySpec {
    fn from(t: &TrajectoryConfig) -> Self {
        match *t {
            TrajectoryConfig::Figure8 {
                center,
                amplitudes,
                omega,
            } => TrajectorySpec::Figure8 {
                center,
                amplitudes,
                omega,
            },
            TrajectoryConfig::Spiral {
                center,
                r0,
                growth,
                omega,
            } => TrajectorySpec::Spiral {
                center,
                r0,
                growth,
                omega,
            },
        }
    }
}

impl From<TrajectorySpec> for TrajectoryConfig {
    fn from(t: TrajectorySpec) -> Self {
        match t {
            TrajectorySpec::Figure8 {
                center,
                amplitudes,
                omega,
            } => TrajectoryConfig::Figure8 {
                center,
                amplitudes,
                omega,
            },
            TrajectorySpec::Spiral {
                center,
                r0,
                growth,
                omega,
            } => TrajectoryConfig::Spiral {
                center,
                r0,
                growth,
                omega,
            },
        }
    }
}

/// Range beacon: detects within `radius`, reading error at most `noise`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Beacon {
    pub pos: [f64; 2],
    pub radius: f64,
    pub noise: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(rename = "Ts")]
    pub ts: f64,
    pub steps: usize,
    pub l: f64,
    pub trajectory: TrajectoryConfig,
    pub beacons: Vec<Beacon>,
    pub compass_deg: f64,
    /// Per-axis bound of the position telemetry error.
    pub telemetry_bound: f64,
    pub init_halfwidth: f64,
    /// Initial heading of the vehicle.
    pub theta0: f64,
    pub gamma: usize,
    pub reduction_mode: ReductionMode,
    #[serde(rename = "directions_K")]
    pub directions_k: usize,
    pub seed: u64,
    pub filter_mode: FilterMode,
    pub snapshot_every: usize,
    /// Also intersect with the telemetry box every step.
    pub telemetry_updates: bool,
    /// Per-axis bound of additive actuation noise on the true position,
    /// included in the estimator's disturbance set.
    pub actuation_bound: f64,
    pub feasibility_tol: f64,
    pub gap_tol: f64,
    /// Compute the outer area every step (snapshots are unaffected).
    pub log_volume: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig::figure8()
    }
}

impl ScenarioConfig {
    pub fn figure8() -> Self {
        let tol = SolverTolerances::default();
        ScenarioConfig {
            ts: 0.1,
            steps: 150,
            l: 0.1,
            trajectory: TrajectorySpec::default_figure8().into(),
            beacons: vec![
                Beacon {
                    pos: [5.0, 25.0],
                    radius: 5.0,
                    noise: 0.1,
                },
                Beacon {
                    pos: [23.0, 10.0],
                    radius: 2.0,
                    noise: 0.1,
                },
            ],
            compass_deg: 5.0,
            telemetry_bound: 0.05,
            init_halfwidth: 0.5,
            theta0: 0.0,
            gamma: 10,
            reduction_mode: ReductionMode::Guaranteed,
            directions_k: 64,
            seed: 0,
            filter_mode: FilterMode::Ccg,
            snapshot_every: 40,
            telemetry_updates: false,
            actuation_bound: 0.0,
            feasibility_tol: tol.feasibility,
            gap_tol: tol.gap,
            log_volume: true,
        }
    }

    /// Spiral path with the beacon ranges widened by 5 each.
    pub fn spiral() -> Self {
        let mut c = ScenarioConfig::figure8();
        c.trajectory = TrajectorySpec::default_spiral().into();
        c.beacons[0].radius = 10.0;
        c.beacons[1].radius = 7.0;
        c
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "figure8" => Some(Self::figure8()),
            "spiral" => Some(Self::spiral()),
            _ => None,
        }
    }

    pub fn compass_bound(&self) -> f64 {
        self.compass_deg * PI / 180.0
    }

    pub fn tolerances(&self) -> SolverTolerances {
        SolverTolerances {
            feasibility: self.feasibility_tol,
            gap: self.gap_tol,
            ..SolverTolerances::default()
        }
    }

    pub fn reduction(&self) -> ReductionSpec {
        ReductionSpec::new(self.gamma, self.reduction_mode, self.seed)
    }

    /// Violated constraints, one message per field.
    pub fn check(&self) -> Result<(), String> {
        let mut bad = Vec::new();
        let mut need = |ok: bool, msg: &str| {
            if !ok {
                bad.push(msg.to_string());
            }
        };
        need(self.ts > 0.0, "Ts must be positive");
        need(self.l > 0.0, "l must be positive");
        need(self.gamma >= 1, "gamma must be at least 1");
        need(self.directions_k >= 3, "directions_K must be at least 3");
        need(
            (0.0..90.0).contains(&self.compass_deg),
            "compass_deg must be in [0, 90)",
        );
        need(self.telemetry_bound >= 0.0, "telemetry_bound must be nonnegative");
        need(self.init_halfwidth >= 0.0, "init_halfwidth must be nonnegative");
        need(self.actuation_bound >= 0.0, "actuation_bound must be nonnegative");
        need(self.feasibility_tol > 0.0 && self.gap_tol > 0.0, "solver tolerances must be positive");
        for (i, b) in self.beacons.iter().enumerate() {
            need(
                b.noise >= 0.0 && b.radius > b.noise,
                &format!("beacons[{i}]: need radius > noise >= 0"),
            );
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(bad.join("; "))
        }
    }
}

/// `θ + e`, `e ~ U(−δ, δ)`, wrapped.
pub fn compass_measure<R: Rng + ?Sized>(theta: f64, rng: &mut R, delta: f64) -> f64 {
    let e = if delta > 0.0 { rng.random_range(-delta..=delta) } else { 0.0 };
    wrap_angle(theta + e)
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, bound: f64) -> f64 {
    if bound > 0.0 {
        rng.random_range(-bound..=bound)
    } else {
        0.0
    }
}

/// Range reading and the disk `‖x − beacon‖ ≤ r̂ + ε` when the vehicle is in
/// range. The noise draw happens either way.
pub fn beacon_measure<R: Rng + ?Sized>(
    position: &Vector2<f64>,
    beacon: &Beacon,
    rng: &mut R,
) -> Option<(f64, ConvexSetCCG)> {
    let e = uniform(rng, beacon.noise);
    let center = Vector2::new(beacon.pos[0], beacon.pos[1]);
    let rho = (position - center).norm();
    if rho > beacon.radius {
        return None;
    }
    let r_hat = (rho + e).max(0.0);
    let disk = ConvexSetCCG::ball(
        DVector::from_column_slice(&beacon.pos),
        r_hat + beacon.noise,
        NormOrder::Two,
    );
    Some((r_hat, disk))
}

/// Position reading with per-axis error in `[−bound, bound]`.
pub fn telemetry<R: Rng + ?Sized>(position: &Vector2<f64>, rng: &mut R, bound: f64) -> Vector2<f64> {
    let ex = uniform(rng, bound);
    let ey = uniform(rng, bound);
    position + Vector2::new(ex, ey)
}

fn square(center: &Vector2<f64>, half: f64) -> ConvexSetCCG {
    let c = DVector::from_column_slice(center.as_slice());
    let h = DVector::from_element(2, half);
    ConvexSetCCG::from_interval(&(&c - &h), &(&c + &h)).expect("half-width is nonnegative")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub k: usize,
    pub polygon: Polygon,
    pub truth: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct ScenarioRun {
    pub logs: Vec<StepLog>,
    pub snapshots: Vec<Snapshot>,
    /// `steps + 1` states, starting at `k = 0`.
    pub truth: Vec<UnicycleState>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("snapshot at step {k}: {source}")]
    Snapshot { k: usize, source: crate::solve::QueryError },
}

/// Truth draws come from their own stream, in a fixed order per step
/// (actuation noise, beacon noise per beacon, compass, telemetry), so filter settings
/// never change the simulated trajectory.
pub fn truth_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    rng
}

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun, ScenarioError> {
    run_scenario_with(&SetSolver::default().with_tolerances(cfg.tolerances()), cfg)
}

pub fn run_scenario_with(solver: &SetSolver, cfg: &ScenarioConfig) -> Result<ScenarioRun, ScenarioError> {
    cfg.check().map_err(ScenarioError::Config)?;
    let spec: TrajectorySpec = (&cfg.trajectory).into();
    let delta = cfg.compass_bound();
    let mut rng = truth_rng(cfg.seed);

    let start = reference(&spec, 0, cfg.ts);
    let mut x = UnicycleState::new(start.x, start.y, cfg.theta0);
    let mut theta_hat = compass_measure(x.theta, &mut rng, delta);
    let mut p_hat = telemetry(&x.position(), &mut rng, cfg.telemetry_bound);

    let volume_k = cfg.log_volume.then_some(cfg.directions_k);
    let mut fs = FilterState::new(
        square(&x.position(), cfg.init_halfwidth),
        cfg.reduction(),
        cfg.filter_mode,
        volume_k,
    )
    .map_err(|e| ScenarioError::Config(e.to_string()))?;

    let mut truth = vec![x];
    let mut logs = Vec::with_capacity(cfg.steps);
    let mut snapshots = Vec::new();
    let snap = |fs: &FilterState, x: &UnicycleState, snapshots: &mut Vec<Snapshot>| {
        if cfg.snapshot_every > 0 && fs.k.is_multiple_of(cfg.snapshot_every) {
            let polygon = solver
                .outer_polygon(&fs.x, cfg.directions_k)
                .map_err(|source| ScenarioError::Snapshot { k: fs.k, source })?;
            snapshots.push(Snapshot {
                k: fs.k,
                polygon,
                truth: [x.p, x.q],
            });
        }
        Ok::<_, ScenarioError>(())
    };
    snap(&fs, &x, &mut snapshots)?;

    let ident = DMatrix::<f64>::identity(2, 2);
    for k in 0..cfg.steps {
        let tau_k = reference(&spec, k, cfg.ts);
        let tau_next = reference(&spec, k + 1, cfg.ts);
        let u = controller(p_hat, theta_hat, tau_k, tau_next, Vector2::zeros(), cfg.ts, cfg.l);

        let mut next = dynamics_step(&x, u, cfg.ts, cfg.l);
        if cfg.actuation_bound > 0.0 {
            next.p += uniform(&mut rng, cfg.actuation_bound);
            next.q += uniform(&mut rng, cfg.actuation_bound);
        }

        let pos = next.position();
        let mut measurements = Vec::new();
        for (i, b) in cfg.beacons.iter().enumerate() {
            if let Some((_, disk)) = beacon_measure(&pos, b, &mut rng) {
                measurements.push(Measurement {
                    c: ident.clone(),
                    y_set: disk,
                    source: MeasurementSource::Beacon(i),
                });
            }
        }
        let theta_hat_next = compass_measure(next.theta, &mut rng, delta);
        let p_hat_next = telemetry(&pos, &mut rng, cfg.telemetry_bound);
        if cfg.telemetry_updates {
            measurements.push(Measurement {
                c: ident.clone(),
                y_set: square(&p_hat_next, cfg.telemetry_bound),
                source: MeasurementSource::Telemetry,
            });
        }

        let (vertices, remainder) = build_vertex_maps(theta_hat, delta, u, cfg.ts, cfg.l);
        let d = if cfg.actuation_bound > 0.0 {
            minkowski_sum(&remainder, &square(&Vector2::zeros(), cfg.actuation_bound))
                .expect("both sets are planar")
        } else {
            remainder
        };
        let input = StepInput {
            vertices,
            bu: DVector::zeros(2),
            l: ident.clone(),
            d,
            measurements,
        };
        let truth_vec = DVector::from_column_slice(pos.as_slice());
        let (fs_next, log) = filter_step(solver, &fs, &input, Some(&truth_vec))?;
        fs = fs_next;
        x = next;
        theta_hat = theta_hat_next;
        p_hat = p_hat_next;
        truth.push(x);
        logs.push(log);
        snap(&fs, &x, &mut snapshots)?;
    }
    Ok(ScenarioRun {
        logs,
        snapshots,
        truth,
    })
}
