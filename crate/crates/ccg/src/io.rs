//! File formats: set JSON, step CSV and the run report.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ccg_core::{ConstraintBlock, ConvexSetCCG, NormOrder};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::filter::StepLog;
use crate::scenario::{ScenarioConfig, ScenarioRun, Snapshot};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("malformed set: {0}")]
    Set(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum POrder {
    Finite(u8),
    Named(InfTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum InfTag {
    #[serde(rename = "inf")]
    Inf,
}

impl From<NormOrder> for POrder {
    fn from(p: NormOrder) -> Self {
        match p {
            NormOrder::One => POrder::Finite(1),
            NormOrder::Two => POrder::Finite(2),
            NormOrder::Inf => POrder::Named(InfTag::Inf),
        }
    }
}

impl TryFrom<POrder> for NormOrder {
    type Error = IoError;
    fn try_from(p: POrder) -> Result<Self, IoError> {
        match p {
            POrder::Finite(1) => Ok(NormOrder::One),
            POrder::Finite(2) => Ok(NormOrder::Two),
            POrder::Named(InfTag::Inf) => Ok(NormOrder::Inf),
            POrder::Finite(other) => Err(IoError::Set(format!("unsupported norm order {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum KindTag {
    NormBall,
    NormCone,
    Free,
    Nonneg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockJson {
    kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<POrder>,
    xi: Vec<usize>,
    #[serde(default)]
    lambda: Vec<usize>,
    #[serde(default)]
    w: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetJson {
    #[serde(rename = "G")]
    g: Vec<Vec<f64>>,
    c: Vec<f64>,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    blocks: Vec<BlockJson>,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(name: &str, rows: &[Vec<f64>], ncols: usize) -> Result<DMatrix<f64>, IoError> {
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(IoError::Set(format!("{name} row {bad} has {} entries, expected {ncols}", rows[bad].len())));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn block_to_json(blk: &ConstraintBlock) -> BlockJson {
    match blk {
        ConstraintBlock::NormBall { p, xi } => BlockJson {
            kind: KindTag::NormBall,
            p: Some((*p).into()),
            xi: xi.clone(),
            lambda: vec![],
            w: vec![],
            v: None,
        },
        ConstraintBlock::NormCone { p, xi, lambda, w, v } => BlockJson {
            kind: KindTag::NormCone,
            p: Some((*p).into()),
            xi: xi.clone(),
            lambda: lambda.clone(),
            w: w.clone(),
            v: Some(*v),
        },
        ConstraintBlock::Free { xi } => BlockJson {
            kind: KindTag::Free,
            p: None,
            xi: xi.clone(),
            lambda: vec![],
            w: vec![],
            v: None,
        },
        ConstraintBlock::Nonneg { xi } => BlockJson {
            kind: KindTag::Nonneg,
            p: None,
            xi: xi.clone(),
            lambda: vec![],
            w: vec![],
            v: None,
        },
    }
}

fn block_from_json(b: BlockJson) -> Result<ConstraintBlock, IoError> {
    let p = || -> Result<NormOrder, IoError> {
        b.p.ok_or_else(|| IoError::Set(format!("{:?} block needs \"p\"", b.kind)))?
            .try_into()
    };
    Ok(match b.kind {
        KindTag::NormBall => ConstraintBlock::NormBall { p: p()?, xi: b.xi },
        KindTag::NormCone => ConstraintBlock::NormCone {
            p: p()?,
            xi: b.xi,
            lambda: b.lambda,
            w: b.w,
            v: b.v.ok_or_else(|| IoError::Set("NormCone block needs \"v\"".into()))?,
        },
        KindTag::Free => ConstraintBlock::Free { xi: b.xi },
        KindTag::Nonneg => ConstraintBlock::Nonneg { xi: b.xi },
    })
}

/// JSON text of a set; `G` and `A` are row-major nested arrays.
pub fn set_to_json(z: &ConvexSetCCG) -> String {
    let doc = SetJson {
        g: rows(z.g()),
        c: z.c().iter().copied().collect(),
        a: rows(z.a()),
        b: z.b().iter().copied().collect(),
        blocks: z.blocks().iter().map(block_to_json).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("sets serialize")
}

pub fn set_from_json(text: &str) -> Result<ConvexSetCCG, IoError> {
    let doc: SetJson = serde_json::from_str(text).map_err(|source| IoError::Json {
        path: "<set>".into(),
        source,
    })?;
    let n_g = doc.g.first().map_or(0, Vec::len);
    let g = matrix("G", &doc.g, n_g)?;
    if g.nrows() != doc.c.len() {
        return Err(IoError::Set(format!("G has {} rows but c has {} entries", g.nrows(), doc.c.len())));
    }
    let a = matrix("A", &doc.a, n_g)?;
    let blocks = doc.blocks.into_iter().map(block_from_json).collect::<Result<Vec<_>, _>>()?;
    ConvexSetCCG::new(g, DVector::from_vec(doc.c), a, DVector::from_vec(doc.b), blocks)
        .map_err(|e| IoError::Set(e.to_string()))
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_set(path: &Path) -> Result<ConvexSetCCG, IoError> {
    set_from_json(&read_text(path)?).map_err(|e| match e {
        IoError::Json { source, .. } => IoError::Json {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn read_config(path: &Path) -> Result<ScenarioConfig, IoError> {
    serde_json::from_str(&read_text(path)?).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub const STEPS_CSV_HEADER: &str =
    "k,volume,step_ms,n_g_pre,n_g_post,n_c_post,contained,beacon_active,truth_p,truth_q,truth_theta";

/// Step table with the true state appended to every row.
pub fn steps_csv(run: &ScenarioRun) -> String {
    let mut out = String::from(STEPS_CSV_HEADER);
    out.push('\n');
    for log in &run.logs {
        let x = run.truth[log.k];
        let _ = writeln!(out, "{},{},{},{}", log.csv_row(), x.p, x.q, x.theta);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub steps: usize,
    /// `Σ volume(k) · Ts` over the logged steps.
    pub volume_integral: f64,
    pub final_volume: f64,
    pub mean_step_ms: f64,
    pub max_step_ms: f64,
    pub contained_all: bool,
    pub beacon_steps: usize,
}

impl RunSummary {
    pub fn from_logs(logs: &[StepLog], ts: f64) -> Self {
        let n = logs.len();
        let ms: Vec<f64> = logs.iter().map(|l| l.step_ms).collect();
        RunSummary {
            steps: n,
            volume_integral: logs.iter().map(|l| l.volume).sum::<f64>() * ts,
            final_volume: logs.last().map_or(f64::NAN, |l| l.volume),
            mean_step_ms: if n == 0 { 0.0 } else { ms.iter().sum::<f64>() / n as f64 },
            max_step_ms: ms.iter().copied().fold(0.0, f64::max),
            contained_all: logs.iter().all(|l| l.contained != Some(false)),
            beacon_steps: logs.iter().filter(|l| l.beacon_active).count(),
        }
    }
}

/// Contents of `report.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ScenarioConfig,
    pub summary: RunSummary,
    pub snapshots: Vec<Snapshot>,
}

impl RunReport {
    pub fn new(config: &ScenarioConfig, run: &ScenarioRun) -> Self {
        RunReport {
            config: config.clone(),
            summary: RunSummary::from_logs(&run.logs, config.ts),
            snapshots: run.snapshots.clone(),
        }
    }
}

/// JSON with non-finite numbers written as `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialize")
}
