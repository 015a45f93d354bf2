//! Iterated subdivisions of simplicial complexes and the spectra of their
//! top-dimensional Laplacians.
//!
//! The crate builds complexes from facet lists, subdivides them (cone,
//! barycentric, edgewise), computes boundary operators and Laplacians,
//! models iterated cone subdivisions of a simplex by Schreier graphs of a
//! self-similar group, and evaluates the predicted limiting spectral
//! distributions.

pub mod complex;
pub mod decimation;
pub mod error;
pub mod fractal;
pub mod iso;
pub mod schreier;
pub mod spectral;
pub mod subdivide;

pub use complex::{Complex, Face, SignedGraph};
pub use error::{Error, Result};
pub use spectral::StepFunction;
pub use subdivide::{Kind, SubdivisionResult};

/// Environment variable overriding the default matrix order budget.
pub const BUDGET_ENV: &str = "SIMSPEC_MAX_ORDER";

/// Largest matrix order handed to the dense eigensolver by default.
pub const DEFAULT_MAX_ORDER: usize = 5000;

/// Matrix order budget, honouring [`BUDGET_ENV`].
pub fn max_order() -> usize {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
}

pub(crate) fn check_budget(order: usize) -> Result<()> {
    let limit = max_order();
    if order > limit {
        return Err(Error::Budget { order, limit });
    }
    Ok(())
}
