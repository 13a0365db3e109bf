use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use crate::data::parse_params;
use crate::data::tensor::{Mat3, Vec3, ZERO3};
use crate::error::{Error, Result};
use crate::geometry::diff::{d_u, d_uu, d_uv, d_v, d_vv, Parity};
use crate::geometry::grid::{Grid2, Topology};

/// Tolerance for boundary nodes lying on the support.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Position and first/second parameter derivatives of the embedding at a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub x: Vec3,
    pub fu: Vec3,
    pub fv: Vec3,
    pub fuu: Vec3,
    pub fuv: Vec3,
    pub fvv: Vec3,
}

/// Boundary hypersurface `∂M = {s = 0}` of the ambient region `M = {s ≤ 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// `s = −z`: the half-space above the plane `z = 0`.
    PlaneZ0,
    /// `s = √(x² + y²) − R`: the solid cylinder about the z-axis.
    Cylinder { radius: f64 },
    /// `s = |x| − R`: the ball about the origin.
    Ball { radius: f64 },
}

impl Support {
    pub fn label(&self) -> String {
        match self {
            Support::PlaneZ0 => "plane-z0".into(),
            Support::Cylinder { radius } => format!("cylinder:r={radius}"),
            Support::Ball { radius } => format!("ball:r={radius}"),
        }
    }

    pub fn level(&self, x: &Vec3) -> f64 {
        match *self {
            Support::PlaneZ0 => -x[2],
            Support::Cylinder { radius } => x[0].hypot(x[1]) - radius,
            Support::Ball { radius } => (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() - radius,
        }
    }

    /// Coordinate gradient `∂_i s`.
    pub fn gradient(&self, x: &Vec3) -> Vec3 {
        match *self {
            Support::PlaneZ0 => [0.0, 0.0, -1.0],
            Support::Cylinder { .. } => {
                let r = x[0].hypot(x[1]);
                [x[0] / r, x[1] / r, 0.0]
            }
            Support::Ball { .. } => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                x.map(|c| c / r)
            }
        }
    }

    /// Coordinate Hessian `∂_i ∂_j s`.
    pub fn hessian(&self, x: &Vec3) -> Mat3 {
        match *self {
            Support::PlaneZ0 => ZERO3,
            Support::Cylinder { .. } => {
                let r = x[0].hypot(x[1]);
                let n = [x[0] / r, x[1] / r];
                let mut h = ZERO3;
                for i in 0..2 {
                    for j in 0..2 {
                        let d = if i == j { 1.0 } else { 0.0 };
                        h[i][j] = (d - n[i] * n[j]) / r;
                    }
                }
                h
            }
            Support::Ball { .. } => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let mut h = ZERO3;
                for i in 0..3 {
                    for j in 0..3 {
                        let d = if i == j { 1.0 } else { 0.0 };
                        h[i][j] = (d - x[i] * x[j] / (r * r)) / r;
                    }
                }
                h
            }
        }
    }

    pub fn parse(s: &str, default_radius: f64) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let params = parse_params(args)?;
        let r = params.get("r").copied().unwrap_or(default_radius);
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("support radius must be positive, got {r}")));
        }
        match name.trim() {
            "plane-z0" | "plane" => Ok(Support::PlaneZ0),
            "cylinder" => Ok(Support::Cylinder { radius: r }),
            "ball" => Ok(Support::Ball { radius: r }),
            other => Err(Error::Parse(format!("unknown support `{other}`"))),
        }
    }
}

/// How the embedding is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// `F = c + ρ(u,v) ω(u,v)` with `ω` the unit sphere parametrization.
    /// Derivatives of `ω` are exact; only `ρ` is differenced.
    RadialGraph { center: Vec3, rho: Vec<f64> },
    /// Flat disk of the given radius in the plane `z = center.z`, normal `+e_z`.
    FlatDisk { center: Vec3, radius: f64 },
    /// Spherical cap `{|x − c| = R, polar angle ≤ α}` with outward normal.
    SphericalCap { center: Vec3, radius: f64, opening: f64 },
}

/// A parametrized surface on a structured grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceChart {
    grid: Grid2,
    repr: Representation,
    support: Option<Support>,
    label: String,
}

fn omega(u: f64, v: f64) -> [Vec3; 6] {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    [
        [su * cv, su * sv, cu],
        [cu * cv, cu * sv, -su],
        [-su * sv, su * cv, 0.0],
        [-su * cv, -su * sv, -cu],
        [-cu * sv, cu * cv, 0.0],
        [-su * cv, -su * sv, 0.0],
    ]
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn lin(terms: &[(f64, Vec3)]) -> Vec3 {
    let mut out = [0.0; 3];
    for (c, v) in terms {
        for i in 0..3 {
            out[i] += c * v[i];
        }
    }
    out
}

impl SurfaceChart {
    pub fn radial_graph(grid: Grid2, center: Vec3, rho: Vec<f64>) -> Result<Self> {
        if grid.topology() != Topology::Sphere {
            return Err(Error::UnsupportedTopology("radial graphs need a sphere grid".into()));
        }
        crate::geometry::fields::check_len(grid.len(), rho.len())?;
        if let Some(node) = rho.iter().position(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::ImmersionFailure { node });
        }
        Ok(Self {
            grid,
            repr: Representation::RadialGraph { center, rho },
            support: None,
            label: "graph".into(),
        })
    }

    pub fn sphere(grid: Grid2, center: Vec3, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!("sphere radius must be positive, got {r}")));
        }
        let n = grid.len();
        let mut s = Self::radial_graph(grid, center, vec![r; n])?;
        s.label = format!("sphere:r={r}");
        Ok(s)
    }

    /// Ellipsoid `x²/a² + y²/b² + z²/c² = 1` about `center`, as a radial graph.
    pub fn ellipsoid(grid: Grid2, center: Vec3, a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) {
            return Err(Error::InvalidParameter("ellipsoid semi-axes must be positive".into()));
        }
        let rho = grid
            .coordinates()
            .iter()
            .map(|&(u, v)| {
                let (su, cu) = u.sin_cos();
                let (sv, cv) = v.sin_cos();
                1.0 / ((su * cv / a).powi(2) + (su * sv / b).powi(2) + (cu / c).powi(2)).sqrt()
            })
            .collect();
        let mut s = Self::radial_graph(grid, center, rho)?;
        s.label = format!("ellipsoid:a={a},b={b},c={c}");
        Ok(s)
    }

    pub fn flat_disk(grid: Grid2, radius: f64, support: Support) -> Result<Self> {
        if grid.topology() != Topology::Disk {
            return Err(Error::UnsupportedTopology("flat disk needs a disk grid".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!("disk radius must be positive, got {radius}")));
        }
        if support == Support::PlaneZ0 {
            // the disk would lie inside its own support
            return Err(Error::ContactAngle(0.0));
        }
        let s = Self {
            grid,
            repr: Representation::FlatDisk { center: [0.0; 3], radius },
            support: Some(support),
            label: format!("disk:r={radius},support={}", support.label()),
        };
        s.check_support()?;
        Ok(s)
    }

    /// Spherical cap of radius `radius` and polar opening `opening` whose
    /// boundary circle lies on the plane `z = 0`.
    pub fn cap(grid: Grid2, radius: f64, opening: f64) -> Result<Self> {
        if grid.topology() != Topology::Disk {
            return Err(Error::UnsupportedTopology("cap needs a disk grid".into()));
        }
        if !(radius > 0.0 && opening > 0.0 && opening < PI) {
            return Err(Error::InvalidParameter("cap needs r > 0 and 0 < angle < pi".into()));
        }
        let center = [0.0, 0.0, -radius * opening.cos()];
        let s = Self {
            grid,
            repr: Representation::SphericalCap { center, radius, opening },
            support: Some(Support::PlaneZ0),
            label: format!("cap:r={radius},angle={opening}"),
        };
        s.check_support()?;
        Ok(s)
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }
    pub fn representation(&self) -> &Representation {
        &self.repr
    }
    pub fn support(&self) -> Option<&Support> {
        self.support.as_ref()
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn topology(&self) -> Topology {
        self.grid.topology()
    }

    pub fn center(&self) -> Vec3 {
        match &self.repr {
            Representation::RadialGraph { center, .. }
            | Representation::FlatDisk { center, .. }
            | Representation::SphericalCap { center, .. } => *center,
        }
    }

    pub fn rho(&self) -> Option<&[f64]> {
        match &self.repr {
            Representation::RadialGraph { rho, .. } => Some(rho),
            _ => None,
        }
    }

    /// Radial graph with `ρ` replaced.
    pub fn with_rho(&self, rho: Vec<f64>) -> Result<Self> {
        let mut s = Self::radial_graph(self.grid.clone(), self.center(), rho)?;
        s.label = format!("{}+perturbed", self.label);
        Ok(s)
    }

    /// Embedding jets at all nodes.
    pub fn jets(&self) -> Vec<Jet> {
        let g = &self.grid;
        match &self.repr {
            Representation::RadialGraph { center, rho } => {
                let ru = d_u(g, rho, Parity::Even);
                let rv = d_v(g, rho);
                let ruu = d_uu(g, rho, Parity::Even);
                let ruv = d_uv(g, rho, Parity::Even);
                let rvv = d_vv(g, rho);
                (0..g.len())
                    .map(|k| {
                        let (u, v) = g.coords(k);
                        let [w, wu, wv, wuu, wuv, wvv] = omega(u, v);
                        let r = rho[k];
                        Jet {
                            x: add(*center, lin(&[(r, w)])),
                            fu: lin(&[(ru[k], w), (r, wu)]),
                            fv: lin(&[(rv[k], w), (r, wv)]),
                            fuu: lin(&[(ruu[k], w), (2.0 * ru[k], wu), (r, wuu)]),
                            fuv: lin(&[(ruv[k], w), (ru[k], wv), (rv[k], wu), (r, wuv)]),
                            fvv: lin(&[(rvv[k], w), (2.0 * rv[k], wv), (r, wvv)]),
                        }
                    })
                    .collect()
            }
            Representation::FlatDisk { center, radius } => (0..g.len())
                .map(|k| {
                    let (u, v) = g.coords(k);
                    let (sv, cv) = v.sin_cos();
                    let r = *radius;
                    Jet {
                        x: add(*center, [r * u * cv, r * u * sv, 0.0]),
                        fu: [r * cv, r * sv, 0.0],
                        fv: [-r * u * sv, r * u * cv, 0.0],
                        fuu: [0.0; 3],
                        fuv: [-r * sv, r * cv, 0.0],
                        fvv: [-r * u * cv, -r * u * sv, 0.0],
                    }
                })
                .collect(),
            Representation::SphericalCap { center, radius, opening } => (0..g.len())
                .map(|k| {
                    let (u, v) = g.coords(k);
                    let a = *opening;
                    let [w, wu, wv, wuu, wuv, wvv] = omega(u * a, v);
                    let r = *radius;
                    Jet {
                        x: add(*center, lin(&[(r, w)])),
                        fu: lin(&[(r * a, wu)]),
                        fv: lin(&[(r, wv)]),
                        fuu: lin(&[(r * a * a, wuu)]),
                        fuv: lin(&[(r * a, wuv)]),
                        fvv: lin(&[(r, wvv)]),
                    }
                })
                .collect(),
        }
    }

    fn check_support(&self) -> Result<()> {
        let Some(support) = self.support else { return Ok(()) };
        let jets = self.jets();
        for &node in self.grid.boundary_index() {
            let residual = support.level(&jets[node].x).abs();
            if residual > SUPPORT_TOL {
                return Err(Error::BoundaryOffSupport { node, residual });
            }
        }
        Ok(())
    }
}

/// Parse a surface specification:
///
/// - `sphere:r=2[,cx=..,cy=..,cz=..]`
/// - `ellipsoid:a=1,b=1,c=1.5`
/// - `graph:file=rho.csv` (one positive radius per node, grid order)
/// - `disk:r=1[,support=cylinder|ball]`
/// - `cap:r=1[,angle=1.5707963267948966]`
///
/// The grid topology is chosen by the surface kind; `n_u`, `n_v` are the
/// requested resolution.
pub fn parse_surface(spec: &str, n_u: usize, n_v: usize) -> Result<SurfaceChart> {
    let (kind, args) = spec.split_once(':').unwrap_or((spec, ""));
    let mut support_str = None;
    let mut file = None;
    let mut numeric = Vec::new();
    for item in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('=') {
            Some(("support", v)) => support_str = Some(v.trim().to_string()),
            Some(("file", v)) => file = Some(v.trim().to_string()),
            _ => numeric.push(item),
        }
    }
    let params = parse_params(&numeric.join(","))?;
    let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
    let center = [get("cx", 0.0), get("cy", 0.0), get("cz", 0.0)];
    match kind.trim() {
        "sphere" => SurfaceChart::sphere(Grid2::sphere(n_u, n_v)?, center, get("r", 1.0)),
        "ellipsoid" => SurfaceChart::ellipsoid(
            Grid2::sphere(n_u, n_v)?,
            center,
            get("a", 1.0),
            get("b", 1.0),
            get("c", 1.0),
        ),
        "graph" => {
            let path = file.ok_or_else(|| Error::Parse("graph surface needs file=<path>".into()))?;
            let grid = Grid2::sphere(n_u, n_v)?;
            let rho = read_rho(Path::new(&path))?;
            let mut s = SurfaceChart::radial_graph(grid, center, rho)?;
            s.label = format!("graph:file={path}");
            Ok(s)
        }
        "disk" => {
            let r = get("r", 1.0);
            let support = Support::parse(support_str.as_deref().unwrap_or("cylinder"), r)?;
            SurfaceChart::flat_disk(Grid2::disk(n_u, n_v)?, r, support)
        }
        "cap" => {
            if let Some(s) = support_str.as_deref() {
                if Support::parse(s, 1.0)? != Support::PlaneZ0 {
                    return Err(Error::Parse("cap surfaces rest on plane-z0".into()));
                }
            }
            SurfaceChart::cap(Grid2::disk(n_u, n_v)?, get("r", 1.0), get("angle", FRAC_PI_2))
        }
        other => Err(Error::Parse(format!("unknown surface kind `{other}`"))),
    }
}

fn read_rho(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad radius `{s}` in {}", path.display()))))
        .collect()
}
