//! Analytic initial data sets `(M, g, k)` and their constraint quantities.

pub mod constraints;
pub mod entries;
pub mod tensor;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use tensor::{DDMat3, DMat3, Mat3, Vec3};

pub use constraints::{dec_margin, energy_momentum, sample_points, EnergyMomentum};
pub use entries::{HyperboloidalFlat, MinkowskiFlat, SchwarzschildIsotropic, SchwarzschildPG};

/// An initial data set given by closed-form fields on a single 3-chart.
///
/// Evaluators assume `x` lies in the domain; callers that cannot guarantee
/// this go through [`InitialData::check_domain`].
pub trait InitialData: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &str;
    fn params(&self) -> BTreeMap<String, f64>;
    fn in_domain(&self, x: &Vec3) -> bool;
    fn g(&self, x: &Vec3) -> Mat3;
    fn dg(&self, x: &Vec3) -> DMat3;
    fn ddg(&self, x: &Vec3) -> DDMat3;
    fn k(&self, x: &Vec3) -> Mat3;
    fn dk(&self, x: &Vec3) -> DMat3;

    /// Closed-form Einstein tensor of an ambient spacetime, if known.
    fn extension(&self) -> Option<&dyn SpacetimeExtension> {
        None
    }

    /// Geodesic time slicing `-dt² + g(t)` through this slice, if known.
    fn slicing(&self) -> Option<&dyn TimeSlicing> {
        None
    }

    /// Radius (about the origin) below which the chart is excised.
    fn excision_radius(&self) -> f64 {
        0.0
    }

    fn check_domain(&self, x: &Vec3) -> Result<()> {
        if self.in_domain(x) && x.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { data: self.name().to_string(), point: *x })
        }
    }

    /// Canonical specification string, e.g. `schwarzschild-iso:m=1`.
    fn spec(&self) -> String {
        let p = self.params();
        if p.is_empty() {
            self.name().to_string()
        } else {
            let args: Vec<String> = p.iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("{}:{}", self.name(), args.join(","))
        }
    }
}

/// A spacetime vector split as `a = a_τ τ + a_s` with `τ` the future unit
/// normal of the slice and `a_s` tangent to it (coordinate components).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVector {
    pub tau: f64,
    pub space: Vec3,
}

impl FourVector {
    pub fn new(tau: f64, space: Vec3) -> Self {
        Self { tau, space }
    }

    /// `l± = τ ± n` for a unit spatial vector `n`.
    pub fn null_pair(n: Vec3) -> (Self, Self) {
        (Self::new(1.0, n), Self::new(1.0, n.map(|c| -c)))
    }
}

/// Einstein tensor components in the slice-adapted basis `(τ, ∂_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EinsteinComponents {
    pub tt: f64,
    pub ti: Vec3,
    pub ij: Mat3,
}

impl EinsteinComponents {
    pub fn zero() -> Self {
        Self { tt: 0.0, ti: [0.0; 3], ij: tensor::ZERO3 }
    }

    pub fn contract(&self, a: &FourVector, b: &FourVector) -> f64 {
        let mut s = self.tt * a.tau * b.tau;
        for i in 0..3 {
            s += self.ti[i] * (a.tau * b.space[i] + b.tau * a.space[i]);
        }
        s + tensor::bilinear(&self.ij, &a.space, &b.space)
    }
}

pub trait SpacetimeExtension: Send + Sync {
    fn einstein(&self, x: &Vec3) -> EinsteinComponents;

    fn einstein_contraction(&self, x: &Vec3, a: &FourVector, b: &FourVector) -> f64 {
        self.einstein(x).contract(a, b)
    }
}

/// Vacuum spacetimes: every contraction vanishes.
#[derive(Debug, Clone, Copy, Default)]
pub struct VacuumExtension;

impl SpacetimeExtension for VacuumExtension {
    fn einstein(&self, _x: &Vec3) -> EinsteinComponents {
        EinsteinComponents::zero()
    }
}

/// Cosmological-constant spacetime `G = −Λ h`.
#[derive(Debug, Clone, Copy)]
pub struct LambdaVacuumExtension {
    pub lambda: f64,
    pub g: fn(&Vec3) -> Mat3,
}

impl SpacetimeExtension for LambdaVacuumExtension {
    fn einstein(&self, x: &Vec3) -> EinsteinComponents {
        EinsteinComponents {
            tt: self.lambda,
            ti: [0.0; 3],
            ij: tensor::scale(&(self.g)(x), -self.lambda),
        }
    }
}

/// A family of slices of `-dt² + g(t)` with unit lapse and zero shift, so
/// that the second fundamental form is `k(t) = ½ ∂_t g(t)`.
pub trait TimeSlicing: Send + Sync {
    fn g_at(&self, t: f64, x: &Vec3) -> Mat3;
    fn dg_at(&self, t: f64, x: &Vec3) -> DMat3;
    fn k_at(&self, t: f64, x: &Vec3) -> Mat3;
}

pub type DataRef = Arc<dyn InitialData>;

/// Names accepted by [`parse_data`].
pub const CATALOG_NAMES: [&str; 4] =
    ["minkowski_flat", "schwarzschild_isotropic", "hyperboloidal_flat", "schwarzschild_pg"];

/// The catalog with default parameters (`m = 1`).
pub fn catalog() -> Vec<DataRef> {
    vec![
        Arc::new(MinkowskiFlat),
        Arc::new(SchwarzschildIsotropic::new(1.0).expect("positive mass")),
        Arc::new(HyperboloidalFlat),
        Arc::new(SchwarzschildPG::new(1.0).expect("positive mass")),
    ]
}

/// Parse `name[:key=value,...]`. Hyphens and underscores are
/// interchangeable and `schwarzschild-iso` / `schwarzschild-pg` /
/// `minkowski` / `hyperboloidal` are accepted as short names.
pub fn parse_data(spec: &str) -> Result<DataRef> {
    let (name, args) = match spec.split_once(':') {
        Some((n, a)) => (n.trim(), a.trim()),
        None => (spec.trim(), ""),
    };
    let params = parse_params(args)?;
    let key = name.to_ascii_lowercase().replace('-', "_");
    let mass = |params: &BTreeMap<String, f64>| params.get("m").copied().unwrap_or(1.0);
    let check_keys = |allowed: &[&str]| -> Result<()> {
        match params.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidParameter(format!("`{k}` is not a parameter of `{name}`"))),
            None => Ok(()),
        }
    };
    match key.as_str() {
        "minkowski" | "minkowski_flat" => {
            check_keys(&[])?;
            Ok(Arc::new(MinkowskiFlat))
        }
        "hyperboloidal" | "hyperboloidal_flat" => {
            check_keys(&[])?;
            Ok(Arc::new(HyperboloidalFlat))
        }
        "schwarzschild_iso" | "schwarzschild_isotropic" => {
            check_keys(&["m"])?;
            Ok(Arc::new(SchwarzschildIsotropic::new(mass(&params))?))
        }
        "schwarzschild_pg" => {
            check_keys(&["m"])?;
            Ok(Arc::new(SchwarzschildPG::new(mass(&params))?))
        }
        _ => Err(Error::UnknownData(spec.to_string())),
    }
}

/// Parse `a=1.0,b=2` into a map.
pub fn parse_params(args: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got `{item}`")))?;
        let val: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{}` is not a number", v.trim())))?;
        out.insert(k.trim().to_string(), val);
    }
    Ok(out)
}
