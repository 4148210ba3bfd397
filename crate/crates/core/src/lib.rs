//! Information-space diagrams for bipartite quantum states.
//!
//! The crate computes how much information (pure qubits) and how much quantum
//! communication are needed to form a shared state, or can be drawn from it,
//! and assembles the resulting protocol points into piecewise-linear curves.
//!
//! - [`matrix`]: dense complex matrices, density operators, partial trace and
//!   transpose, and a Jacobi eigensolver.
//! - [`measures`]: entropies, information content, concurrence and
//!   entanglement of formation.
//! - [`ensembles`]: decompositions, local-orthogonality certification and the
//!   decomposition-based bounds on `E_r` and `Δ_f`.
//! - [`curves`]: protocol points, lower envelopes, susceptibility and the
//!   family phase scan.
//! - [`families`]: state generators (Bell mixture, pure Schmidt states,
//!   classically correlated states) and coarse classification.
//! - [`cli`]: the command-line front-end and its file formats.

#![forbid(unsafe_code)]

pub mod cli;
pub mod curves;
pub mod ensembles;
mod error;
pub mod families;
pub mod io;
pub mod matrix;
pub mod measures;
pub mod numfmt;
pub mod render;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
