//! Stability operators and their spectra.

pub mod eigen;
pub mod operator;
pub mod verdict;

pub use eigen::{
    mean_zero_spectrum, morse_index, morse_index_with, principal_eigenvalue, principal_eigenvalue_with, symmetric_spectrum,
    EigenOptions, EigenResult,
};
pub use operator::{
    assemble, assemble_coefficients, BoundaryCondition, Coefficients, OperatorKind, OperatorMatrix, OperatorSpec,
    QSource, RobinData,
};
pub use verdict::{stability_verdict, StabilityVerdict, VerdictOptions};
