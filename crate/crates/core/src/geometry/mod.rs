//! Structured grids on sphere and disk domains with metric-aware
//! differential operators, quadrature, curvature and intrinsic distances.

pub mod diff;
pub mod distance;
pub mod fields;
pub mod grid;
pub mod ops;
pub mod stiffness;

pub use distance::{ball_areas, distances_to_boundary, intrinsic_diameter, DistanceGraph};
pub use fields::{CovectorField, Metric2Field, ScalarField, SymTensor2Field};
pub use grid::{Grid2, Topology};
pub use ops::{
    boundary_geodesic_curvature, divergence, gauss_bonnet_total, gauss_curvature, gradient,
    integrate, integrate_boundary, laplace_beltrami,
};
pub use stiffness::{stiffness_edges, Edge};
