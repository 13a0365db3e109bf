//! Second-order finite differences on [`Grid2`] node arrays.
//!
//! Across a pole (or the disk center) node `(-1, j)` is the reflection of
//! `(0, j + n_v/2)`; components that change sign under `u -> -u` are marked
//! [`Parity::Odd`]. On the disk boundary ring one-sided stencils are used.

use crate::geometry::grid::{Grid2, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

#[inline]
fn below(grid: &Grid2, f: &[f64], i: usize, j: usize, s: f64) -> f64 {
    if i == 0 {
        s * f[grid.id(0, grid.antipodal_column(j))]
    } else {
        f[grid.id(i - 1, j)]
    }
}

#[inline]
fn above(grid: &Grid2, f: &[f64], i: usize, j: usize, s: f64) -> f64 {
    if i + 1 == grid.n_u() {
        s * f[grid.id(i, grid.antipodal_column(j))]
    } else {
        f[grid.id(i + 1, j)]
    }
}

#[inline]
fn one_sided_edge(grid: &Grid2, i: usize) -> bool {
    grid.topology() == Topology::Disk && i + 1 == grid.n_u()
}

/// `∂_u f`.
pub fn d_u(grid: &Grid2, f: &[f64], parity: Parity) -> Vec<f64> {
    let (nu, nv, h) = (grid.n_u(), grid.n_v(), grid.h_u());
    let s = parity.sign();
    let mut out = vec![0.0; nu * nv];
    for i in 0..nu {
        for j in 0..nv {
            let k = grid.id(i, j);
            out[k] = if one_sided_edge(grid, i) {
                (3.0 * f[k] - 4.0 * f[grid.id(i - 1, j)] + f[grid.id(i - 2, j)]) / (2.0 * h)
            } else {
                (above(grid, f, i, j, s) - below(grid, f, i, j, s)) / (2.0 * h)
            };
        }
    }
    out
}

/// `∂_uu f`.
pub fn d_uu(grid: &Grid2, f: &[f64], parity: Parity) -> Vec<f64> {
    let (nu, nv, h) = (grid.n_u(), grid.n_v(), grid.h_u());
    let s = parity.sign();
    let mut out = vec![0.0; nu * nv];
    for i in 0..nu {
        for j in 0..nv {
            let k = grid.id(i, j);
            out[k] = if one_sided_edge(grid, i) {
                (2.0 * f[k] - 5.0 * f[grid.id(i - 1, j)] + 4.0 * f[grid.id(i - 2, j)]
                    - f[grid.id(i - 3, j)])
                    / (h * h)
            } else {
                (above(grid, f, i, j, s) - 2.0 * f[k] + below(grid, f, i, j, s)) / (h * h)
            };
        }
    }
    out
}

/// `∂_v f` (periodic).
pub fn d_v(grid: &Grid2, f: &[f64]) -> Vec<f64> {
    let (nu, nv, h) = (grid.n_u(), grid.n_v(), grid.h_v());
    let mut out = vec![0.0; nu * nv];
    for i in 0..nu {
        for j in 0..nv {
            let jp = grid.id(i, (j + 1) % nv);
            let jm = grid.id(i, (j + nv - 1) % nv);
            out[grid.id(i, j)] = (f[jp] - f[jm]) / (2.0 * h);
        }
    }
    out
}

/// `∂_vv f` (periodic).
pub fn d_vv(grid: &Grid2, f: &[f64]) -> Vec<f64> {
    let (nu, nv, h) = (grid.n_u(), grid.n_v(), grid.h_v());
    let mut out = vec![0.0; nu * nv];
    for i in 0..nu {
        for j in 0..nv {
            let k = grid.id(i, j);
            let jp = grid.id(i, (j + 1) % nv);
            let jm = grid.id(i, (j + nv - 1) % nv);
            out[k] = (f[jp] - 2.0 * f[k] + f[jm]) / (h * h);
        }
    }
    out
}

/// `∂_u ∂_v f`.
pub fn d_uv(grid: &Grid2, f: &[f64], parity: Parity) -> Vec<f64> {
    d_v(grid, &d_u(grid, f, parity))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn sphere_derivatives_converge_second_order() {
        let mut errs = vec![];
        for n in [16usize, 32, 64] {
            let g = Grid2::sphere(n, 2 * n).unwrap();
            let f: Vec<f64> = g.coordinates().iter().map(|&(u, v)| u.sin() * v.cos()).collect();
            let exact: Vec<f64> = g.coordinates().iter().map(|&(u, v)| u.cos() * v.cos()).collect();
            // x = sin u cos v is a smooth scalar on the sphere
            errs.push(max_err(&d_u(&g, &f, Parity::Even), &exact));
        }
        for w in errs.windows(2) {
            let r = w[0] / w[1];
            assert!((3.6..4.4).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn disk_boundary_one_sided_exact_for_quadratics() {
        let g = Grid2::disk(8, 16).unwrap();
        let f: Vec<f64> = g.coordinates().iter().map(|&(u, _)| u * u).collect();
        let du = d_u(&g, &f, Parity::Even);
        let duu = d_uu(&g, &f, Parity::Even);
        for &k in g.boundary_index() {
            assert!((du[k] - 2.0).abs() < 1e-12);
            assert!((duu[k] - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn periodic_v() {
        let g = Grid2::sphere(8, 64).unwrap();
        let f: Vec<f64> = g.coordinates().iter().map(|&(_, v)| v.sin()).collect();
        let dv = d_v(&g, &f);
        let e: Vec<f64> = g.coordinates().iter().map(|&(_, v)| v.cos()).collect();
        assert!(max_err(&dv, &e) < 2e-3);
    }
}
