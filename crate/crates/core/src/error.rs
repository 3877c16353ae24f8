use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("unsupported Bessel order 2nu = {two_nu} (supported: 0..=5)")]
    UnsupportedOrder { two_nu: u32 },

    #[error("unsupported spherical Bessel degree {ell} (supported: 0..={max})")]
    UnsupportedDegree { ell: usize, max: usize },

    #[error("no sign change of J_{nu} found in [{lo}, {hi}]")]
    BracketScan { nu: f64, lo: f64, hi: f64 },

    #[error("argument out of range: {0}")]
    Domain(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("degenerate chart node at ({p}, {q}): |s_p x s_q| = {norm:e}")]
    DegenerateChart { p: f64, q: f64, norm: f64 },

    #[error("growth guard exceeded: |lambda| k extent = {value:.3} > {limit}")]
    GrowthGuard { value: f64, limit: f64 },

    #[error("contour point ({x}, {y}) lies outside the sampled grid")]
    Coverage { x: f64, y: f64 },

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
