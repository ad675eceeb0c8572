//! Library for exact bivariate map-enumeration recurrences (unicellular
//! maps, triangulations), their closed-form bivariate asymptotics in every
//! genus regime, and desk-scale verification of those asymptotics via a
//! random-walk guess-and-check framework plus a saddle-point cross-check.
//!
//! Modules:
//! - [`exact`]: arbitrary-precision tables and exact oracles,
//! - [`gamma`]: real/complex gamma machinery,
//! - [`parametric`]: the closed-form parametric functions (θ, λ, f, J, …),
//! - [`omega`]: regime-tagged log Ω(n, g) evaluators and Q = E/Ω,
//! - [`walk`]: recurrence-as-random-walk condition checks and Monte Carlo,
//! - [`fit`]: empirical ray fits and functional-equation residuals,
//! - [`saddle`]: Cauchy-contour coefficient extraction and the mid regime,
//! - [`tri`]: conjectured triangulation asymptotics against exact data.

pub mod exact;
pub mod fit;
pub mod gamma;
pub mod omega;
pub mod parametric;
pub mod saddle;
pub mod tri;
pub mod walk;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-exact division in {kind} recurrence at (n, g) = ({n}, {g})")]
    NonExactDivision {
        kind: &'static str,
        n: i64,
        g: i64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("root finder failed: {0}")]
    RootFind(String),
    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
