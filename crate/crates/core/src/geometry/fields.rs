use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};
use crate::geometry::grid::{fejer_weights, Grid2, Topology};

/// Per-node scalar values in grid order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarField(pub Vec<f64>);

/// Per-node covariant components `[w_u, w_v]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CovectorField(pub Vec<[f64; 2]>);

/// Per-node symmetric tensor components `[T_uu, T_uv, T_vv]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymTensor2Field(pub Vec<[f64; 3]>);

macro_rules! field_impl {
    ($t:ty, $elem:ty) => {
        impl Deref for $t {
            type Target = Vec<$elem>;
            fn deref(&self) -> &Self::Target {
                &self.0
            }
        }
        impl DerefMut for $t {
            fn deref_mut(&mut self) -> &mut Self::Target {
                &mut self.0
            }
        }
        impl From<Vec<$elem>> for $t {
            fn from(v: Vec<$elem>) -> Self {
                Self(v)
            }
        }
    };
}

field_impl!(ScalarField, f64);
field_impl!(CovectorField, [f64; 2]);
field_impl!(SymTensor2Field, [f64; 3]);

impl ScalarField {
    pub fn from_fn(grid: &Grid2, f: impl Fn(f64, f64) -> f64) -> Self {
        Self((0..grid.len()).map(|k| {
            let (u, v) = grid.coords(k);
            f(u, v)
        }).collect())
    }

    pub fn constant(grid: &Grid2, c: f64) -> Self {
        Self(vec![c; grid.len()])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::FieldLength { expected, found });
    }
    Ok(())
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|x| !x.is_finite()) {
        Some(node) => Err(Error::NonFinite { node }),
        None => Ok(()),
    }
}

/// Induced metric on a grid together with the derived quantities every
/// operator needs.
#[derive(Debug, Clone)]
pub struct Metric2Field {
    grid: Grid2,
    g: Vec<[f64; 3]>,
    inv: Vec<[f64; 3]>,
    sqrt_det: Vec<f64>,
    dmu: Vec<f64>,
}

impl Metric2Field {
    /// Components `[E, F, G] = [g_uu, g_uv, g_vv]` per node.
    pub fn new(grid: Grid2, g: Vec<[f64; 3]>) -> Result<Self> {
        check_len(grid.len(), g.len())?;
        let mut inv = Vec::with_capacity(g.len());
        let mut sqrt_det = Vec::with_capacity(g.len());
        for (node, &[e, f, gg]) in g.iter().enumerate() {
            if !(e.is_finite() && f.is_finite() && gg.is_finite()) {
                return Err(Error::NonFinite { node });
            }
            let det = e * gg - f * f;
            if !(det > 0.0 && e > 0.0) {
                return Err(Error::DegenerateMetric { node, det });
            }
            inv.push([gg / det, -f / det, e / det]);
            sqrt_det.push(det.sqrt());
        }
        let dmu = area_elements(&grid, &sqrt_det);
        Ok(Self { grid, g, inv, sqrt_det, dmu })
    }

    pub fn from_fn(grid: Grid2, f: impl Fn(f64, f64) -> [f64; 3]) -> Result<Self> {
        let g = (0..grid.len()).map(|k| {
            let (u, v) = grid.coords(k);
            f(u, v)
        }).collect();
        Self::new(grid, g)
    }

    /// Round sphere of radius `r` in polar coordinates.
    pub fn round_sphere(grid: Grid2, r: f64) -> Result<Self> {
        Self::from_fn(grid, |u, _| [r * r, 0.0, r * r * u.sin().powi(2)])
    }

    /// Flat disk of radius `r` in polar coordinates.
    pub fn flat_disk(grid: Grid2, r: f64) -> Result<Self> {
        Self::from_fn(grid, |u, _| [r * r, 0.0, r * r * u * u])
    }

    pub fn grid(&self) -> &Grid2 {
        &self.grid
    }
    pub fn len(&self) -> usize {
        self.g.len()
    }
    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }
    pub fn components(&self) -> &[[f64; 3]] {
        &self.g
    }
    pub fn inverse(&self) -> &[[f64; 3]] {
        &self.inv
    }
    pub fn sqrt_det(&self) -> &[f64] {
        &self.sqrt_det
    }
    /// Quadrature weights `dμ` per node.
    pub fn area_elements(&self) -> &[f64] {
        &self.dmu
    }

    pub fn area(&self) -> f64 {
        self.dmu.iter().sum()
    }

    /// Arc-length weights `√g_vv Δv` on the boundary ring.
    pub fn boundary_lengths(&self) -> Vec<f64> {
        let hv = self.grid.h_v();
        self.grid.boundary_index().iter().map(|&k| self.g[k][2].sqrt() * hv).collect()
    }

    /// `|w|²` for a covariant field.
    pub fn norm_sq(&self, node: usize, w: [f64; 2]) -> f64 {
        let [a, b, c] = self.inv[node];
        a * w[0] * w[0] + 2.0 * b * w[0] * w[1] + c * w[1] * w[1]
    }

    /// `⟨w, z⟩` for covariant fields.
    pub fn inner(&self, node: usize, w: [f64; 2], z: [f64; 2]) -> f64 {
        let [a, b, c] = self.inv[node];
        a * w[0] * z[0] + b * (w[0] * z[1] + w[1] * z[0]) + c * w[1] * z[1]
    }

    /// Raise the index of a covector.
    pub fn raise(&self, node: usize, w: [f64; 2]) -> [f64; 2] {
        let [a, b, c] = self.inv[node];
        [a * w[0] + b * w[1], b * w[0] + c * w[1]]
    }

    /// `g^{ac} g^{bd} S_ab T_cd`.
    pub fn tensor_inner(&self, node: usize, s: [f64; 3], t: [f64; 3]) -> f64 {
        let [a, b, c] = self.inv[node];
        let si = [[s[0], s[1]], [s[1], s[2]]];
        let ti = [[t[0], t[1]], [t[1], t[2]]];
        let gi = [[a, b], [b, c]];
        let mut acc = 0.0;
        for p in 0..2 {
            for q in 0..2 {
                for r in 0..2 {
                    for w in 0..2 {
                        acc += gi[p][r] * gi[q][w] * si[p][q] * ti[r][w];
                    }
                }
            }
        }
        acc
    }

    /// `g^{ab} T_ab`.
    pub fn trace(&self, node: usize, t: [f64; 3]) -> f64 {
        let [a, b, c] = self.inv[node];
        a * t[0] + 2.0 * b * t[1] + c * t[2]
    }
}

fn area_elements(grid: &Grid2, sqrt_det: &[f64]) -> Vec<f64> {
    let (nu, nv, hv) = (grid.n_u(), grid.n_v(), grid.h_v());
    let u = grid.u_values();
    let ring: Vec<f64> = match grid.topology() {
        // sqrt_det / sin(u) is smooth and even across both poles
        Topology::Sphere => fejer_weights(nu)
            .iter()
            .zip(u)
            .map(|(w, u)| w / u.sin())
            .collect(),
        // sqrt_det / u is smooth at the center: weight by the exact annulus ∫u du
        Topology::Disk => (0..nu)
            .map(|i| {
                let a = i as f64 * grid.h_u();
                let b = a + grid.ring_width(i);
                0.5 * (b * b - a * a) / u[i]
            })
            .collect(),
    };
    (0..nu * nv).map(|k| sqrt_det[k] * ring[k / nv] * hv).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_area_is_spectral() {
        let m = Metric2Field::round_sphere(Grid2::sphere(16, 32).unwrap(), 2.0).unwrap();
        assert!((m.area() - 16.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn disk_area() {
        let g = Grid2::disk(64, 128).unwrap();
        let m = Metric2Field::flat_disk(g, 1.0).unwrap();
        assert!((m.area() - PI).abs() < 1e-12);
    }

    #[test]
    fn degenerate_metric_names_node() {
        let g = Grid2::sphere(8, 16).unwrap();
        let err = Metric2Field::from_fn(g, |u, _| [1.0, 0.0, if u > 2.9 { -1.0 } else { 1.0 }])
            .unwrap_err();
        assert!(matches!(err, Error::DegenerateMetric { node: 112, .. }));
    }
}
