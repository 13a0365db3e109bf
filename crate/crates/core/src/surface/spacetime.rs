//! Mean curvature vector of a spacelike 2-surface in `−dt² + g(t)`.

use crate::data::tensor::{self, Vec3};
use crate::data::TimeSlicing;
use crate::error::{Error, Result};
use crate::geometry::diff::{d_u, d_uu, d_uv, d_v, d_vv, Parity};
use crate::geometry::Grid2;
use crate::surface::chart::Jet;

/// `|𝐇|²` at every node of the surface `(t(u,v), x(u,v))`, where the
/// spatial jets are given and the time function is differenced on the grid.
pub fn mean_curvature_norm_sq(
    slicing: &dyn TimeSlicing,
    grid: &Grid2,
    time: &[f64],
    jets: &[Jet],
) -> Result<Vec<f64>> {
    let tu = d_u(grid, time, Parity::Even);
    let tv = d_v(grid, time);
    let tuu = d_uu(grid, time, Parity::Even);
    let tuv = d_uv(grid, time, Parity::Even);
    let tvv = d_vv(grid, time);
    let mut out = Vec::with_capacity(jets.len());
    for (node, j) in jets.iter().enumerate() {
        let t = time[node];
        let g = slicing.g_at(t, &j.x);
        let ginv = tensor::inverse(&g).ok_or(Error::DegenerateMetric { node, det: tensor::det(&g) })?;
        let gam = tensor::christoffel(&ginv, &slicing.dg_at(t, &j.x));
        let k = slicing.k_at(t, &j.x);
        let mixed = {
            let mut m = [[0.0; 3]; 3];
            for i in 0..3 {
                for l in 0..3 {
                    m[i][l] = (0..3).map(|p| ginv[i][p] * k[p][l]).sum();
                }
            }
            m
        };
        let e = [(tu[node], j.fu), (tv[node], j.fv)];
        let h4 = |a: &(f64, Vec3), b: &(f64, Vec3)| -a.0 * b.0 + tensor::bilinear(&g, &a.1, &b.1);
        let gam2 = [[h4(&e[0], &e[0]), h4(&e[0], &e[1])], [h4(&e[1], &e[0]), h4(&e[1], &e[1])]];
        let det = gam2[0][0] * gam2[1][1] - gam2[0][1] * gam2[1][0];
        if !(det > 0.0) {
            return Err(Error::ImmersionFailure { node });
        }
        let gi = [[gam2[1][1] / det, -gam2[0][1] / det], [-gam2[1][0] / det, gam2[0][0] / det]];
        let second = [[(tuu[node], j.fuu), (tuv[node], j.fuv)], [(tuv[node], j.fuv), (tvv[node], j.fvv)]];
        let mut v = (0.0, [0.0; 3]);
        for a in 0..2 {
            for b in 0..2 {
                let (ta, xa) = e[a];
                let (tb, xb) = e[b];
                let (tab, xab) = second[a][b];
                let v0 = tab + tensor::bilinear(&k, &xa, &xb);
                let mut vs = xab;
                for i in 0..3 {
                    for p in 0..3 {
                        vs[i] += mixed[i][p] * (ta * xb[p] + tb * xa[p]);
                        for l in 0..3 {
                            vs[i] += gam[i][p][l] * xa[p] * xb[l];
                        }
                    }
                }
                v.0 += gi[a][b] * v0;
                for i in 0..3 {
                    v.1[i] += gi[a][b] * vs[i];
                }
            }
        }
        let proj = [h4(&v, &e[0]), h4(&v, &e[1])];
        let mut tang = 0.0;
        for c in 0..2 {
            for d in 0..2 {
                tang += gi[c][d] * proj[c] * proj[d];
            }
        }
        out.push(h4(&v, &v) - tang);
    }
    Ok(out)
}
