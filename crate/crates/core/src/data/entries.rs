use std::collections::BTreeMap;

use super::tensor::{DDMat3, DMat3, Mat3, Vec3, IDENTITY3, ZERO3};
use super::{InitialData, LambdaVacuumExtension, SpacetimeExtension, TimeSlicing, VacuumExtension};
use crate::error::{Error, Result};

fn norm(x: &Vec3) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn positive_mass(m: f64) -> Result<f64> {
    if m > 0.0 && m.is_finite() {
        Ok(m)
    } else {
        Err(Error::InvalidParameter(format!("mass must be positive, got {m}")))
    }
}

/// Euclidean space with `k = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MinkowskiFlat;

impl InitialData for MinkowskiFlat {
    fn name(&self) -> &str {
        "minkowski_flat"
    }
    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::new()
    }
    fn in_domain(&self, _x: &Vec3) -> bool {
        true
    }
    fn g(&self, _x: &Vec3) -> Mat3 {
        IDENTITY3
    }
    fn dg(&self, _x: &Vec3) -> DMat3 {
        [ZERO3; 3]
    }
    fn ddg(&self, _x: &Vec3) -> DDMat3 {
        [[ZERO3; 3]; 3]
    }
    fn k(&self, _x: &Vec3) -> Mat3 {
        ZERO3
    }
    fn dk(&self, _x: &Vec3) -> DMat3 {
        [ZERO3; 3]
    }
    fn extension(&self) -> Option<&dyn SpacetimeExtension> {
        Some(&VacuumExtension)
    }
    fn slicing(&self) -> Option<&dyn TimeSlicing> {
        Some(self)
    }
}

impl TimeSlicing for MinkowskiFlat {
    fn g_at(&self, _t: f64, _x: &Vec3) -> Mat3 {
        IDENTITY3
    }
    fn dg_at(&self, _t: f64, _x: &Vec3) -> DMat3 {
        [ZERO3; 3]
    }
    fn k_at(&self, _t: f64, _x: &Vec3) -> Mat3 {
        ZERO3
    }
}

/// Time-symmetric Schwarzschild slice in isotropic coordinates,
/// `g = ψ⁴ δ` with `ψ = 1 + m/(2r)`.
#[derive(Debug, Clone, Copy)]
pub struct SchwarzschildIsotropic {
    m: f64,
}

impl SchwarzschildIsotropic {
    pub fn new(m: f64) -> Result<Self> {
        Ok(Self { m: positive_mass(m)? })
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn psi(&self, r: f64) -> f64 {
        1.0 + self.m / (2.0 * r)
    }

    /// Isotropic radius of the horizon.
    pub fn horizon_radius(&self) -> f64 {
        0.5 * self.m
    }

    // ψ, ∂_l ψ, ∂_k ∂_l ψ
    fn psi_jet(&self, x: &Vec3) -> (f64, Vec3, Mat3) {
        let r = norm(x);
        let (r3, r5) = (r.powi(3), r.powi(5));
        let d = [0, 1, 2].map(|l| -self.m * x[l] / (2.0 * r3));
        let mut dd = ZERO3;
        for k in 0..3 {
            for l in 0..3 {
                dd[k][l] = -0.5 * self.m * (delta(k, l) / r3 - 3.0 * x[k] * x[l] / r5);
            }
        }
        (self.psi(r), d, dd)
    }
}

impl InitialData for SchwarzschildIsotropic {
    fn name(&self) -> &str {
        "schwarzschild_isotropic"
    }
    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("m".to_string(), self.m)])
    }
    fn excision_radius(&self) -> f64 {
        0.25 * self.m
    }
    fn in_domain(&self, x: &Vec3) -> bool {
        norm(x) > self.excision_radius()
    }
    fn g(&self, x: &Vec3) -> Mat3 {
        let p = self.psi(norm(x)).powi(4);
        super::tensor::scale(&IDENTITY3, p)
    }
    fn dg(&self, x: &Vec3) -> DMat3 {
        let (p, d, _) = self.psi_jet(x);
        let c = 4.0 * p.powi(3);
        [0, 1, 2].map(|l| super::tensor::scale(&IDENTITY3, c * d[l]))
    }
    fn ddg(&self, x: &Vec3) -> DDMat3 {
        let (p, d, dd) = self.psi_jet(x);
        let mut out = [[ZERO3; 3]; 3];
        for k in 0..3 {
            for l in 0..3 {
                let c = 12.0 * p * p * d[k] * d[l] + 4.0 * p.powi(3) * dd[k][l];
                out[k][l] = super::tensor::scale(&IDENTITY3, c);
            }
        }
        out
    }
    fn k(&self, _x: &Vec3) -> Mat3 {
        ZERO3
    }
    fn dk(&self, _x: &Vec3) -> DMat3 {
        [ZERO3; 3]
    }
    fn extension(&self) -> Option<&dyn SpacetimeExtension> {
        Some(&VacuumExtension)
    }
}

/// Flat space with `k = g`: the umbilic slice of constant mean curvature
/// 3 through the de Sitter spacetime with `Λ = 3`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HyperboloidalFlat;

fn identity_at(_x: &Vec3) -> Mat3 {
    IDENTITY3
}

const DE_SITTER: LambdaVacuumExtension = LambdaVacuumExtension { lambda: 3.0, g: identity_at };

impl InitialData for HyperboloidalFlat {
    fn name(&self) -> &str {
        "hyperboloidal_flat"
    }
    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::new()
    }
    fn in_domain(&self, _x: &Vec3) -> bool {
        true
    }
    fn g(&self, _x: &Vec3) -> Mat3 {
        IDENTITY3
    }
    fn dg(&self, _x: &Vec3) -> DMat3 {
        [ZERO3; 3]
    }
    fn ddg(&self, _x: &Vec3) -> DDMat3 {
        [[ZERO3; 3]; 3]
    }
    fn k(&self, _x: &Vec3) -> Mat3 {
        IDENTITY3
    }
    fn dk(&self, _x: &Vec3) -> DMat3 {
        [ZERO3; 3]
    }
    fn extension(&self) -> Option<&dyn SpacetimeExtension> {
        Some(&DE_SITTER)
    }
    fn slicing(&self) -> Option<&dyn TimeSlicing> {
        Some(self)
    }
}

impl TimeSlicing for HyperboloidalFlat {
    fn g_at(&self, t: f64, _x: &Vec3) -> Mat3 {
        super::tensor::scale(&IDENTITY3, (2.0 * t).exp())
    }
    fn dg_at(&self, _t: f64, _x: &Vec3) -> DMat3 {
        [ZERO3; 3]
    }
    fn k_at(&self, t: f64, _x: &Vec3) -> Mat3 {
        super::tensor::scale(&IDENTITY3, (2.0 * t).exp())
    }
}

/// Painlevé–Gullstrand slice of Schwarzschild: flat metric with
/// `k_ij = −√(2m/r³)(δ_ij − 3/2 n_i n_j)`. With this sign the sphere
/// `r = 2m` has vanishing outward future null expansion.
#[derive(Debug, Clone, Copy)]
pub struct SchwarzschildPG {
    m: f64,
}

impl SchwarzschildPG {
    pub fn new(m: f64) -> Result<Self> {
        Ok(Self { m: positive_mass(m)? })
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn horizon_radius(&self) -> f64 {
        2.0 * self.m
    }

    fn amplitude(&self, r: f64) -> f64 {
        (2.0 * self.m / r.powi(3)).sqrt()
    }
}

impl InitialData for SchwarzschildPG {
    fn name(&self) -> &str {
        "schwarzschild_pg"
    }
    fn params(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("m".to_string(), self.m)])
    }
    fn excision_radius(&self) -> f64 {
        0.25 * self.m
    }
    fn in_domain(&self, x: &Vec3) -> bool {
        norm(x) > self.excision_radius()
    }
    fn g(&self, _x: &Vec3) -> Mat3 {
        IDENTITY3
    }
    fn dg(&self, _x: &Vec3) -> DMat3 {
        [ZERO3; 3]
    }
    fn ddg(&self, _x: &Vec3) -> DDMat3 {
        [[ZERO3; 3]; 3]
    }
    fn k(&self, x: &Vec3) -> Mat3 {
        let r = norm(x);
        let a = self.amplitude(r);
        let mut k = ZERO3;
        for i in 0..3 {
            for j in 0..3 {
                k[i][j] = -a * (delta(i, j) - 1.5 * x[i] * x[j] / (r * r));
            }
        }
        k
    }
    fn dk(&self, x: &Vec3) -> DMat3 {
        let r = norm(x);
        let r2 = r * r;
        let a = self.amplitude(r);
        let mut out = [ZERO3; 3];
        for l in 0..3 {
            let da = -1.5 * a * x[l] / r2;
            for i in 0..3 {
                for j in 0..3 {
                    let nn = x[i] * x[j] / r2;
                    let dnn = (delta(i, l) * x[j] + x[i] * delta(j, l)) / r2
                        - 2.0 * x[i] * x[j] * x[l] / (r2 * r2);
                    out[l][i][j] = -da * (delta(i, j) - 1.5 * nn) + 1.5 * a * dnn;
                }
            }
        }
        out
    }
    fn extension(&self) -> Option<&dyn SpacetimeExtension> {
        Some(&VacuumExtension)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_metric_value() {
        let s = SchwarzschildIsotropic::new(1.0).unwrap();
        let g = s.g(&[0.5, 0.0, 0.0]);
        assert!((g[0][0] - 16.0).abs() < 1e-12 && g[0][1] == 0.0);
    }

    #[test]
    fn excision() {
        let s = SchwarzschildPG::new(2.0).unwrap();
        assert!(s.check_domain(&[0.4, 0.0, 0.0]).is_err());
        assert!(s.check_domain(&[0.6, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn rejects_bad_mass() {
        assert!(SchwarzschildIsotropic::new(0.0).is_err());
        assert!(SchwarzschildPG::new(f64::NAN).is_err());
    }
}
