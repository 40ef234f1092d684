//! Error type shared across the toolkit.

use thiserror::Error;

/// Errors surfaced by sampling, reconstruction, geodesic, and embedding routines.
#[derive(Debug, Error)]
pub enum GeodesyError {
    /// Caller-supplied data or parameters are unusable (wrong dimension, NaN, empty, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A neighborhood graph split into several components; sizes of the largest are listed.
    #[error("graph is disconnected ({count} components; sizes {sizes:?})")]
    Disconnected { count: usize, sizes: Vec<usize> },

    /// No path exists between the requested pair.
    #[error("no path from vertex {from} to vertex {to}")]
    NoPath { from: usize, to: usize },

    /// Surface reconstruction could not produce a usable complex.
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),

    /// A mesh operation requires a manifold mesh and the input is not one.
    #[error("non-manifold mesh: {0}")]
    NonManifold(String),

    /// Iteration hit its cap before the tolerance; the best value found is carried along.
    #[error("{context}: no convergence after {iterations} iterations (best value {best})")]
    Convergence {
        context: String,
        iterations: usize,
        best: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl GeodesyError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        GeodesyError::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, GeodesyError>;
