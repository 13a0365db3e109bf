//! Embedded surfaces: fundamental forms, null expansions, Hawking energy
//! and a finite-difference check of the first-variation formulas.

pub mod chart;
pub mod geometry;
pub mod hawking;
pub mod spacetime;
pub mod variation;

pub use chart::{parse_surface, Jet, Representation, Support, SurfaceChart};
pub use geometry::{compute_geometry, BoundaryGeometry, SurfaceGeometry};
pub use hawking::hawking_energy;
pub use variation::{variation_oracle, QbarVariant, VariationComparison, VariationDirection, VariationRecord};
