//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use ccg_core::{convex_hull_pair, relax_to_box_blocks, CcgError, ConvexSetCCG, NormOrder};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::filter::{FilterError, FilterMode};
use crate::io::{self, IoError, RunReport, RunSummary};
use crate::reduce::{reduce_to_order, ReductionMode, ReductionSpec};
use crate::scenario::{run_scenario_with, ScenarioConfig, ScenarioError, ScenarioRun};
use crate::solve::{random_unit, Polygon, QueryError, SetSolver};
use crate::svg::{self, Scene, Series, PALETTE};

/// Overrides the feasibility tolerance of every solver query.
pub const FEAS_TOL_ENV: &str = "CCG_FEAS_TOL";

#[derive(Parser, Debug)]
#[command(name = "ccg", version, about = "Set-valued estimation with constrained convex generators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate a scenario and write steps.csv, snapshots.json and report.json.
    Run(ScenarioArgs),
    /// Run the scenario in exact and box-relaxed mode with the same seed.
    Compare(ScenarioArgs),
    /// Convex hull of two sets from JSON files, checked against their supports.
    HullDemo(HullArgs),
    /// Order reduction of a set from a JSON file (unit disk by default).
    ReduceDemo(ReduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Figure8,
    Spiral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ccg,
    Cz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReductionArg {
    Guaranteed,
    PaperFaithful,
}

impl From<ReductionArg> for ReductionMode {
    fn from(r: ReductionArg) -> Self {
        match r {
            ReductionArg::Guaranteed => ReductionMode::Guaranteed,
            ReductionArg::PaperFaithful => ReductionMode::PaperFaithful,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ScenarioArgs {
    /// Scenario JSON; missing fields take the preset's values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "figure8")]
    pub preset: Preset,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub gamma: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Filter mode (ignored by compare).
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub reduction: Option<ReductionArg>,
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args, Debug, Clone)]
pub struct HullArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 360)]
    pub directions: usize,
    #[arg(long = "polygon-k", default_value_t = 64)]
    pub polygon_k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ReduceArgs {
    #[arg(long)]
    pub set: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub gamma: usize,
    #[arg(long, value_enum, default_value = "guaranteed")]
    pub mode: ReductionArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 360)]
    pub directions: usize,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Set(#[from] CcgError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 when the estimate became empty, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Scenario(ScenarioError::Filter(FilterError::Empty { .. })) => 2,
            _ => 1,
        }
    }
}

fn solver_for(cfg: &ScenarioConfig) -> SetSolver {
    SetSolver::default().with_tolerances(cfg.tolerances())
}

fn env_feasibility() -> Result<Option<f64>, CliError> {
    match std::env::var(FEAS_TOL_ENV) {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| *v > 0.0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("{FEAS_TOL_ENV} must be a positive number, got {s:?}"))),
        Err(_) => Ok(None),
    }
}

/// Preset, then config file, then flags, then the environment.
pub fn resolve_config(args: &ScenarioArgs) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = io::read_text(path)?;
            let mut base = serde_json::to_value(preset_config(args.preset)).expect("configs serialize");
            let user: serde_json::Value = serde_json::from_str(&text).map_err(|source| IoError::Json {
                path: path.display().to_string(),
                source,
            })?;
            merge(&mut base, user);
            serde_json::from_value(base).map_err(|source| IoError::Json {
                path: path.display().to_string(),
                source,
            })?
        }
        None => preset_config(args.preset),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(g) = args.gamma {
        cfg.gamma = g;
    }
    if let Some(n) = args.steps {
        cfg.steps = n;
    }
    if let Some(m) = args.mode {
        cfg.filter_mode = match m {
            ModeArg::Ccg => FilterMode::Ccg,
            ModeArg::Cz => FilterMode::CzRelaxed,
        };
    }
    if let Some(r) = args.reduction {
        cfg.reduction_mode = r.into();
    }
    if let Some(e) = args.snapshot_every {
        cfg.snapshot_every = e;
    }
    if let Some(tol) = env_feasibility()? {
        cfg.feasibility_tol = tol;
    }
    cfg.check().map_err(CliError::Usage)?;
    Ok(cfg)
}

fn preset_config(p: Preset) -> ScenarioConfig {
    match p {
        Preset::Figure8 => ScenarioConfig::figure8(),
        Preset::Spiral => ScenarioConfig::spiral(),
    }
}

/// Top-level keys of `user` replace those of `base`; a `trajectory` object
/// of a different kind replaces the whole trajectory.
fn merge(base: &mut serde_json::Value, user: serde_json::Value) {
    match (base, user) {
        (serde_json::Value::Object(b), serde_json::Value::Object(u)) => {
            for (k, v) in u {
                b.insert(k, v);
            }
        }
        (b, u) => *b = u,
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| {
        CliError::Io(IoError::File {
            path: dir.display().to_string(),
            source,
        })
    })
}

fn write_run(dir: &Path, cfg: &ScenarioConfig, run: &ScenarioRun, svg_plots: bool) -> Result<RunReport, CliError> {
    ensure_dir(dir)?;
    let report = RunReport::new(cfg, run);
    io::write_text(&dir.join("steps.csv"), &io::steps_csv(run))?;
    io::write_text(&dir.join("snapshots.json"), &io::to_json(&run.snapshots))?;
    io::write_text(&dir.join("report.json"), &io::to_json(&report))?;
    if svg_plots {
        let volume = Series {
            label: "outer area",
            points: run.logs.iter().map(|l| (l.k as f64, l.volume)).collect(),
            color: PALETTE[0],
        };
        io::write_text(
            &dir.join("volume.svg"),
            &svg::line_chart("Estimate area", "k", "area", &[volume]),
        )?;
        io::write_text(&dir.join("trajectory.svg"), &trajectory_svg(cfg, run))?;
    }
    Ok(report)
}

fn trajectory_svg(cfg: &ScenarioConfig, run: &ScenarioRun) -> String {
    svg::scene(&Scene {
        title: "Trajectory and set estimates",
        polygons: run.snapshots.iter().map(|s| (s.polygon.clone(), PALETTE[0])).collect(),
        paths: vec![Series {
            label: "true position",
            points: run.truth.iter().map(|x| (x.p, x.q)).collect(),
            color: PALETTE[1],
        }],
        circles: cfg.beacons.iter().map(|b| (b.pos, b.radius, PALETTE[2])).collect(),
        markers: cfg.beacons.iter().map(|b| (b.pos, PALETTE[2])).collect(),
    })
}

pub fn cmd_run(args: &ScenarioArgs) -> Result<RunReport, CliError> {
    let cfg = resolve_config(args)?;
    let run = run_scenario_with(&solver_for(&cfg), &cfg)?;
    write_run(&args.out, &cfg, &run, args.svg)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareReport {
    pub ccg: RunSummary,
    pub cz: RunSummary,
    /// Steps where the exact estimate's area exceeds the relaxed one's.
    pub violations: Vec<usize>,
    pub truth_identical: bool,
}

pub const COMPARE_CSV_HEADER: &str = "k,volume_ccg,volume_cz,time_ccg,time_cz,contained_ccg,contained_cz,beacon_active,truth_p,truth_q";

pub fn cmd_compare(args: &ScenarioArgs) -> Result<CompareReport, CliError> {
    let base = resolve_config(args)?;
    let ccg_cfg = ScenarioConfig {
        filter_mode: FilterMode::Ccg,
        ..base.clone()
    };
    let cz_cfg = ScenarioConfig {
        filter_mode: FilterMode::CzRelaxed,
        ..base
    };
    let (a, b) = rayon::join(
        || run_scenario_with(&solver_for(&ccg_cfg), &ccg_cfg),
        || run_scenario_with(&solver_for(&cz_cfg), &cz_cfg),
    );
    let (a, b) = (a?, b?);
    let ra = write_run(&args.out.join("ccg"), &ccg_cfg, &a, args.svg)?;
    let rb = write_run(&args.out.join("cz"), &cz_cfg, &b, args.svg)?;

    let mut csv = String::from(COMPARE_CSV_HEADER);
    csv.push('\n');
    let mut violations = Vec::new();
    let opt = |c: Option<bool>| c.map_or(String::new(), |b| b.to_string());
    for (la, lb) in a.logs.iter().zip(&b.logs) {
        if la.volume > lb.volume + 1e-6 {
            violations.push(la.k);
        }
        let x = a.truth[la.k];
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            la.k,
            la.volume,
            lb.volume,
            la.step_ms,
            lb.step_ms,
            opt(la.contained),
            opt(lb.contained),
            la.beacon_active,
            x.p,
            x.q
        ));
    }
    io::write_text(&args.out.join("compare.csv"), &csv)?;
    let report = CompareReport {
        ccg: ra.summary,
        cz: rb.summary,
        violations,
        truth_identical: a.truth == b.truth,
    };
    io::write_text(&args.out.join("compare.json"), &io::to_json(&report))?;
    if args.svg {
        let series = |run: &ScenarioRun, label, color| Series {
            label,
            points: run.logs.iter().map(|l| (l.k as f64, l.volume)).collect(),
            color,
        };
        io::write_text(
            &args.out.join("compare.svg"),
            &svg::line_chart(
                "Outer area: exact vs box-relaxed",
                "k",
                "area",
                &[series(&a, "CCG", PALETTE[0]), series(&b, "CZ", PALETTE[1])],
            ),
        )?;
    }
    Ok(report)
}

fn probe_directions(n: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    if n == 2 {
        (0..count)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
                DVector::from_vec(vec![a.cos(), a.sin()])
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| random_unit(n, &mut rng)).collect()
    }
}

fn support_values(solver: &SetSolver, z: &ConvexSetCCG, dirs: &[DVector<f64>]) -> Result<Vec<f64>, QueryError> {
    Ok(solver.supports(z, dirs)?.into_iter().map(|s| s.value).collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SetCounts {
    pub n_g: usize,
    pub n_c: usize,
}

impl From<&ConvexSetCCG> for SetCounts {
    fn from(z: &ConvexSetCCG) -> Self {
        SetCounts {
            n_g: z.num_generators(),
            n_c: z.num_constraints(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HullReport {
    pub directions: usize,
    pub a: SetCounts,
    pub b: SetCounts,
    pub hull: SetCounts,
    pub expected: SetCounts,
    /// `max_u |h_hull(u) − max(h_a(u), h_b(u))|`.
    pub max_residual: f64,
    /// Same, divided by `1 + |max(h_a, h_b)|`.
    pub max_relative_residual: f64,
    /// `max_u h_relaxed(u) − max(h_a(u), h_b(u))`; absent when an input
    /// holds cones and cannot be relaxed.
    pub relaxed_max_slack: Option<f64>,
    pub polygons: Option<Vec<(String, Polygon)>>,
}

pub fn cmd_hull_demo(args: &HullArgs) -> Result<HullReport, CliError> {
    let a = io::read_set(&args.a)?;
    let b = io::read_set(&args.b)?;
    let hull = convex_hull_pair(&a, &b)?;
    let relaxed = match (relax_to_box_blocks(&a), relax_to_box_blocks(&b)) {
        (Ok(ra), Ok(rb)) => Some(convex_hull_pair(&ra, &rb)?),
        _ => None,
    };
    let solver = SetSolver::default().with_tolerances(tolerances_from_env()?);
    let dirs = probe_directions(a.dim(), args.directions, args.seed);
    let ha = support_values(&solver, &a, &dirs)?;
    let hb = support_values(&solver, &b, &dirs)?;
    let hh = support_values(&solver, &hull, &dirs)?;
    let target: Vec<f64> = ha.iter().zip(&hb).map(|(x, y)| x.max(*y)).collect();
    let res: Vec<f64> = hh.iter().zip(&target).map(|(h, t)| (h - t).abs()).collect();
    let max_residual = res.iter().copied().fold(0.0, f64::max);
    let max_relative_residual = res.iter().zip(&target).map(|(r, t)| r / (1.0 + t.abs())).fold(0.0, f64::max);
    let relaxed_max_slack = match &relaxed {
        Some(r) => Some(
            support_values(&solver, r, &dirs)?
                .iter()
                .zip(&target)
                .map(|(h, t)| h - t)
                .fold(f64::NEG_INFINITY, f64::max),
        ),
        None => None,
    };

    let polygons = if a.dim() == 2 {
        let mut polys = vec![
            ("a".to_string(), solver.outer_polygon(&a, args.polygon_k)?),
            ("b".to_string(), solver.outer_polygon(&b, args.polygon_k)?),
            ("hull".to_string(), solver.outer_polygon(&hull, args.polygon_k)?),
        ];
        if let Some(r) = &relaxed {
            polys.push(("relaxed_hull".to_string(), solver.outer_polygon(r, args.polygon_k)?));
        }
        Some(polys)
    } else {
        None
    };

    let report = HullReport {
        directions: dirs.len(),
        a: (&a).into(),
        b: (&b).into(),
        hull: (&hull).into(),
        expected: SetCounts {
            n_g: a.num_generators() + b.num_generators() + 1,
            n_c: a.num_constraints() + b.num_constraints(),
        },
        max_residual,
        max_relative_residual,
        relaxed_max_slack,
        polygons,
    };
    ensure_dir(&args.out)?;
    io::write_text(&args.out.join("hull.json"), &io::set_to_json(&hull))?;
    io::write_text(&args.out.join("hull_report.json"), &io::to_json(&report))?;
    if args.svg {
        if let Some(polys) = &report.polygons {
            let svg = svg::scene(&Scene {
                title: "Exact hull and box-relaxed hull",
                polygons: polys
                    .iter()
                    .zip([PALETTE[0], PALETTE[2], PALETTE[1], PALETTE[3]])
                    .map(|((_, p), c)| (p.clone(), c))
                    .collect(),
                paths: vec![],
                circles: vec![],
                markers: vec![],
            });
            io::write_text(&args.out.join("hull.svg"), &svg)?;
        }
    }
    Ok(report)
}

fn tolerances_from_env() -> Result<crate::solve::SolverTolerances, CliError> {
    let mut tol = crate::solve::SolverTolerances::default();
    if let Some(f) = env_feasibility()? {
        tol.feasibility = f;
    }
    Ok(tol)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReduceReport {
    pub input: SetCounts,
    pub output: SetCounts,
    pub gamma: usize,
    pub mode: ReductionMode,
    /// `min_u h_out(u) − h_in(u)` over the probe directions.
    pub min_support_slack: f64,
    pub area_in: Option<f64>,
    pub area_out: Option<f64>,
}

pub fn cmd_reduce_demo(args: &ReduceArgs) -> Result<ReduceReport, CliError> {
    let z = match &args.set {
        Some(p) => io::read_set(p)?,
        None => ConvexSetCCG::ball(DVector::zeros(2), 1.0, NormOrder::Two),
    };
    let solver = SetSolver::default().with_tolerances(tolerances_from_env()?);
    let spec = ReductionSpec::new(args.gamma, args.mode.into(), args.seed);
    let r = reduce_to_order(&solver, &z, &spec, 0)?;
    let dirs = probe_directions(z.dim(), args.directions, args.seed.wrapping_add(1));
    let hi = support_values(&solver, &z, &dirs)?;
    let ho = support_values(&solver, &r, &dirs)?;
    let min_support_slack = ho.iter().zip(&hi).map(|(o, i)| o - i).fold(f64::INFINITY, f64::min);
    let planar = z.dim() == 2;
    let report = ReduceReport {
        input: (&z).into(),
        output: (&r).into(),
        gamma: args.gamma,
        mode: spec.mode,
        min_support_slack,
        area_in: if planar { Some(solver.volume_2d(&z, 64)?) } else { None },
        area_out: if planar { Some(solver.volume_2d(&r, 64)?) } else { None },
    };
    ensure_dir(&args.out)?;
    io::write_text(&args.out.join("reduced.json"), &io::set_to_json(&r))?;
    io::write_text(&args.out.join("reduce_report.json"), &io::to_json(&report))?;
    if args.svg && planar {
        let svg = svg::scene(&Scene {
            title: "Order reduction",
            polygons: vec![
                (solver.outer_polygon(&r, 64)?, PALETTE[1]),
                (solver.outer_polygon(&z, 64)?, PALETTE[0]),
            ],
            paths: vec![],
            circles: vec![],
            markers: vec![],
        });
        io::write_text(&args.out.join("reduce.svg"), &svg)?;
    }
    Ok(report)
}

/// Runs a parsed command and returns the line printed on success.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Run(a) => {
            let r = cmd_run(a)?;
            Ok(format!(
                "{} steps, contained throughout: {}, final area {:.4}, mean step {:.1} ms -> {}",
                r.summary.steps,
                r.summary.contained_all,
                r.summary.final_volume,
                r.summary.mean_step_ms,
                a.out.display()
            ))
        }
        Command::Compare(a) => {
            let r = cmd_compare(a)?;
            Ok(format!(
                "area integral ccg {:.4} / cz {:.4}, steps with ccg > cz: {}, contained: {} / {} -> {}",
                r.ccg.volume_integral,
                r.cz.volume_integral,
                r.violations.len(),
                r.ccg.contained_all,
                r.cz.contained_all,
                a.out.display()
            ))
        }
        Command::HullDemo(a) => {
            let r = cmd_hull_demo(a)?;
            Ok(format!(
                "hull n_g={} n_c={} (expected {} / {}), max support residual {:.3e}",
                r.hull.n_g, r.hull.n_c, r.expected.n_g, r.expected.n_c, r.max_residual
            ))
        }
        Command::ReduceDemo(a) => {
            let r = cmd_reduce_demo(a)?;
            Ok(format!(
                "reduced to n_g={} n_c={}, min support slack {:.3e}",
                r.output.n_g, r.output.n_c, r.min_support_slack
            ))
        }
    }
}
