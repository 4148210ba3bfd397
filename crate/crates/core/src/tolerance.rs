//! Numerical tolerances shared by every module.

/// One record holding every threshold the crate compares against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise `|M - M†|` accepted as Hermitian.
    pub hermiticity: f64,
    /// Max `|tr M - 1|` for a density operator.
    pub trace: f64,
    /// Smallest eigenvalue accepted as positive semidefinite (a negative number).
    pub positivity_floor: f64,
    /// Max `|M v - λ v|` per eigenpair.
    pub eigen_residual: f64,
    /// Max `| ‖ψ‖² - 1 |` for a pure state.
    pub pure_norm: f64,
    /// Max deviation from 1 of a probability vector sum, and the clip floor
    /// for slightly negative entries.
    pub probability: f64,
    /// Eigenvalues below this count as exactly zero inside entropies.
    pub zero_eigenvalue: f64,
    /// Eigenvalues above this span the support of an operator.
    pub support: f64,
    /// Max Frobenius norm of a product of two support projectors that still
    /// counts as orthogonal.
    pub overlap: f64,
    /// Threshold on the second Schmidt coefficient for a product vector.
    pub schmidt: f64,
    /// Purity `tr ρ²` above `1 - purity` classifies a state as pure.
    pub purity: f64,
    /// Partial-transpose eigenvalues below `-npt` mark an NPT state.
    pub npt: f64,
    /// Slack allowed when comparing points against a hull or bound.
    pub hull_slack: f64,
    /// Distance within which a query point sits on an envelope vertex.
    pub vertex: f64,
    /// Jacobi convergence: off-diagonal Frobenius mass below this (relative to
    /// `max(1, ‖M‖_F)`).
    pub jacobi_off_diagonal: f64,
    /// Jacobi sweep cap.
    pub jacobi_max_sweeps: usize,
    /// Largest total dimension accepted for a bipartite operator.
    pub max_dim: usize,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermiticity: 1e-10,
        trace: 1e-10,
        positivity_floor: -1e-9,
        eigen_residual: 1e-9,
        pure_norm: 1e-10,
        probability: 1e-9,
        zero_eigenvalue: 1e-12,
        support: 1e-10,
        overlap: 1e-9,
        schmidt: 1e-9,
        purity: 1e-9,
        npt: 1e-9,
        hull_slack: 1e-9,
        vertex: 1e-9,
        jacobi_off_diagonal: 1e-13,
        jacobi_max_sweeps: 100,
        max_dim: 64,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
