use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CcgError {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid set: {0}")]
    InvalidSet(String),
    #[error("interval lower bound exceeds upper bound at coordinate {0}")]
    InvertedInterval(usize),
    #[error("ellipsoid shape matrix must be square, got {rows}x{cols}")]
    NonSquareEllipsoid { rows: usize, cols: usize },
    #[error("block {0} is a lifted norm cone and cannot be relaxed to a box")]
    ConeRelaxation(usize),
    #[error("convex hull of an empty list of sets")]
    EmptyHullList,
    #[error("{count} uncertainties exceed the vertex enumeration cap of {cap}")]
    VertexCapExceeded { count: usize, cap: usize },
    #[error("propagation needs at least one vertex map")]
    NoVertices,
}

pub type Result<T> = core::result::Result<T, CcgError>;
