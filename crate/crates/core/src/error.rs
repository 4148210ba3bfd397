use thiserror::Error;

use crate::numfmt::fmt_sig;

/// Errors raised by the numerical core.
///
/// Validation variants carry the measured residual so callers can report
/// which invariant failed and by how much.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DimensionMismatch expected={expected} found={found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("NotSquare rows={rows} cols={cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("NonFinite entry at index {index}")]
    NonFinite { index: usize },

    #[error("DimensionTooLarge dim={dim} cap={cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("NotHermitian residual={}", fmt_sig(*.residual))]
    NotHermitian { residual: f64 },

    #[error("TraceNotOne residual={}", fmt_sig(*.residual))]
    TraceNotOne { residual: f64 },

    #[error("NotPositive min_eigenvalue={}", fmt_sig(*.min_eigenvalue))]
    NotPositive { min_eigenvalue: f64 },

    #[error("NotNormalized residual={}", fmt_sig(*.residual))]
    NotNormalized { residual: f64 },

    #[error("EigenNoConvergence sweeps={sweeps} off_diagonal={}", fmt_sig(*.off_diagonal))]
    EigenNoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("NotPowerOfTwo dims=({dim_a},{dim_b})")]
    NotPowerOfTwo { dim_a: usize, dim_b: usize },

    #[error("WrongDimensions: {what} requires dims ({need_a},{need_b}), got ({dim_a},{dim_b})")]
    WrongDimensions {
        what: &'static str,
        need_a: usize,
        need_b: usize,
        dim_a: usize,
        dim_b: usize,
    },

    #[error("Domain: {0}")]
    Domain(String),

    #[error("ComponentCostUnknown: no entanglement-cost rule applies to component {index}")]
    ComponentCostUnknown { index: usize },

    #[error("NotCertifiedOrthogonal: decomposition has no pairwise-orthogonal local supports")]
    NotCertifiedOrthogonal,

    #[error("BoundChainViolated: {bound} exceeds {limit} by {}", fmt_sig(*.excess))]
    BoundChainViolated {
        bound: &'static str,
        limit: &'static str,
        excess: f64,
    },

    #[error("NotApplicable: {0}")]
    NotApplicable(String),

    #[error("OrderingViolation: E_c={} exceeds E_r={}", fmt_sig(*.e_c), fmt_sig(*.e_r))]
    OrderingViolation { e_c: f64, e_r: f64 },

    #[error("InsufficientPoints: need at least {need}, got {got}")]
    InsufficientPoints { need: usize, got: usize },

    #[error("MixedCurveKinds: formation and extraction points cannot share a curve")]
    MixedCurveKinds,

    #[error("OutOfRange: q={} outside [{}, {}]", fmt_sig(*.q), fmt_sig(*.lo), fmt_sig(*.hi))]
    OutOfRange { q: f64, lo: f64, hi: f64 },

    #[error("DegenerateCurve: envelope is a single point")]
    DegenerateCurve,

    #[error("VertexNeedsSide: q={} is an envelope vertex; pick the left or right segment", fmt_sig(*.q))]
    VertexNeedsSide { q: f64 },

    #[error("DegenerateFamily: p={} is an endpoint of the family; use the degenerate-point rules", fmt_sig(*.p))]
    DegenerateFamily { p: f64 },
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::EigenNoConvergence { .. } | Error::BoundChainViolated { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
