use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::surface::geometry::SurfaceGeometry;

/// `E_H = √(|Σ|/16π) (1 + (1/16π) ∫ θ₊θ₋ dμ)`.
pub fn hawking_energy(geom: &SurfaceGeometry) -> Result<f64> {
    if geom.topology() != Topology::Sphere {
        return Err(Error::UnsupportedTopology("Hawking energy needs a closed sphere".into()));
    }
    let tt: Vec<f64> = geom.theta_plus.iter().zip(geom.theta_minus.iter()).map(|(a, b)| a * b).collect();
    let area = geom.area();
    Ok((area / (16.0 * PI)).sqrt() * (1.0 + geom.integrate(&tt) / (16.0 * PI)))
}
