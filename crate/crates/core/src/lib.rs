//! Numerical laboratory for marginally outer trapped surfaces.
//!
//! The crate discretizes spacelike 2-surfaces inside analytic initial data
//! sets `(M, g, k)`, evaluates their extrinsic geometry and null expansions,
//! assembles the (generally non-self-adjoint) stability operators with
//! closed or Robin boundary conditions, computes principal eigenvalues, and
//! evaluates both sides of a collection of geometric inequalities.
//!
//! Modules:
//! - [`geometry`]: structured grids on sphere/disk parameter domains and
//!   metric-aware differential operators.
//! - [`data`]: the analytic catalog of initial data sets and the constraint
//!   quantities `mu`, `J`.
//! - [`surface`]: embedded surfaces, their fundamental forms, null
//!   expansions, Hawking energy and a finite-difference check of the
//!   first-variation formulas.
//! - [`spectra`]: operator assembly and eigensolvers.
//! - [`audit`]: inequality checkers producing [`audit::AuditReport`]s.
//! - [`cli`]: command implementations behind the `motslab` binary.

pub mod audit;
pub mod cli;
pub mod data;
pub mod error;
pub mod geometry;
pub mod spectra;
pub mod surface;

pub use error::{Error, Result};
