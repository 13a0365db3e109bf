use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Topology of the parameter domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    /// `u ∈ (0, π)` polar angle, `v` periodic.
    Sphere,
    /// `u ∈ (0, 1]` radius, `v` periodic. The ring `u = 1` is the boundary.
    Disk,
}

impl Topology {
    pub fn euler_characteristic(self) -> i32 {
        match self {
            Topology::Sphere => 2,
            Topology::Disk => 1,
        }
    }
}

/// Cell-centered structured polar grid.
///
/// Node `(i, j)` has id `i * n_v + j`, with `u_i` the ring coordinate and
/// `v_j = 2πj / n_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    topology: Topology,
    n_u: usize,
    n_v: usize,
    h_u: f64,
    h_v: f64,
    u: Vec<f64>,
    v: Vec<f64>,
    boundary: Vec<usize>,
}

impl Grid2 {
    pub const MIN_NU: usize = 8;
    pub const MIN_NV: usize = 16;

    pub fn new(topology: Topology, n_u: usize, n_v: usize) -> Result<Self> {
        if n_u < Self::MIN_NU || n_v < Self::MIN_NV {
            return Err(Error::InvalidGrid(format!(
                "need n_u >= {} and n_v >= {}, got {n_u}x{n_v}",
                Self::MIN_NU,
                Self::MIN_NV
            )));
        }
        if n_v % 2 != 0 {
            // the pole closure pairs column j with j + n_v/2
            return Err(Error::InvalidGrid(format!("n_v must be even, got {n_v}")));
        }
        let h_u = match topology {
            Topology::Sphere => PI / n_u as f64,
            Topology::Disk => 1.0 / (n_u as f64 - 0.5),
        };
        let h_v = 2.0 * PI / n_v as f64;
        let u = (0..n_u).map(|i| (i as f64 + 0.5) * h_u).collect::<Vec<_>>();
        let v = (0..n_v).map(|j| j as f64 * h_v).collect();
        let boundary = match topology {
            Topology::Sphere => Vec::new(),
            Topology::Disk => (0..n_v).map(|j| (n_u - 1) * n_v + j).collect(),
        };
        let mut grid = Grid2 { topology, n_u, n_v, h_u, h_v, u, v, boundary };
        if topology == Topology::Disk {
            // pin the outer ring to exactly 1
            grid.u[n_u - 1] = 1.0;
        }
        Ok(grid)
    }

    pub fn sphere(n_u: usize, n_v: usize) -> Result<Self> {
        Self::new(Topology::Sphere, n_u, n_v)
    }

    pub fn disk(n_u: usize, n_v: usize) -> Result<Self> {
        Self::new(Topology::Disk, n_u, n_v)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }
    pub fn n_u(&self) -> usize {
        self.n_u
    }
    pub fn n_v(&self) -> usize {
        self.n_v
    }
    pub fn h_u(&self) -> f64 {
        self.h_u
    }
    pub fn h_v(&self) -> f64 {
        self.h_v
    }
    pub fn len(&self) -> usize {
        self.n_u * self.n_v
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn u_values(&self) -> &[f64] {
        &self.u
    }
    pub fn v_values(&self) -> &[f64] {
        &self.v
    }

    #[inline]
    pub fn id(&self, i: usize, j: usize) -> usize {
        i * self.n_v + j
    }

    #[inline]
    pub fn ij(&self, id: usize) -> (usize, usize) {
        (id / self.n_v, id % self.n_v)
    }

    #[inline]
    pub fn wrap_v(&self, j: isize) -> usize {
        j.rem_euclid(self.n_v as isize) as usize
    }

    /// Column on the opposite side of the pole.
    #[inline]
    pub fn antipodal_column(&self, j: usize) -> usize {
        (j + self.n_v / 2) % self.n_v
    }

    pub fn coords(&self, id: usize) -> (f64, f64) {
        let (i, j) = self.ij(id);
        (self.u[i], self.v[j])
    }

    pub fn coordinates(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|k| self.coords(k)).collect()
    }

    pub fn boundary_index(&self) -> &[usize] {
        &self.boundary
    }

    pub fn has_boundary(&self) -> bool {
        self.topology == Topology::Disk
    }

    /// Extent in `u` of the control cell around ring `i`.
    pub fn ring_width(&self, i: usize) -> f64 {
        if self.topology == Topology::Disk && i + 1 == self.n_u {
            0.5 * self.h_u
        } else {
            self.h_u
        }
    }

    /// Same topology at `factor` times the resolution in both directions.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Self::new(self.topology, self.n_u * factor, self.n_v * factor)
    }
}

/// Fejér type-1 weights for `∫_0^π f(u) sin u du` at the cell-centered nodes.
pub fn fejer_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..n)
        .map(|i| {
            let theta = (i as f64 + 0.5) * PI / nf;
            let mut s = 0.0;
            for k in 1..=n / 2 {
                let kf = k as f64;
                s += (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
            2.0 / nf * (1.0 - 2.0 * s)
        })
        .collect()
}
