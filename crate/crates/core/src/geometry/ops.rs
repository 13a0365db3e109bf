use crate::error::{Error, Result};
use crate::geometry::diff::{d_u, d_uu, d_uv, d_v, d_vv, Parity};
use crate::geometry::fields::{check_finite, check_len, CovectorField, Metric2Field, ScalarField};
use crate::geometry::grid::Topology;

/// Covariant gradient `[∂_u f, ∂_v f]`.
pub fn gradient(metric: &Metric2Field, f: &[f64]) -> Result<CovectorField> {
    check_len(metric.len(), f.len())?;
    check_finite(f)?;
    let grid = metric.grid();
    let fu = d_u(grid, f, Parity::Even);
    let fv = d_v(grid, f);
    Ok(CovectorField(fu.into_iter().zip(fv).map(|(a, b)| [a, b]).collect()))
}

/// `(1/√g) ∂_i(√g g^{ij} w_j)` for a covariant field `w`.
pub fn divergence(metric: &Metric2Field, w: &CovectorField) -> Result<ScalarField> {
    check_len(metric.len(), w.len())?;
    let grid = metric.grid();
    let sq = metric.sqrt_det();
    let mut flux_u = Vec::with_capacity(w.len());
    let mut flux_v = Vec::with_capacity(w.len());
    for (k, wk) in w.iter().enumerate() {
        if !(wk[0].is_finite() && wk[1].is_finite()) {
            return Err(Error::NonFinite { node: k });
        }
        let up = metric.raise(k, *wk);
        flux_u.push(sq[k] * up[0]);
        flux_v.push(sq[k] * up[1]);
    }
    let a = d_u(grid, &flux_u, Parity::Even);
    let b = d_v(grid, &flux_v);
    Ok(ScalarField((0..w.len()).map(|k| (a[k] + b[k]) / sq[k]).collect()))
}

/// Laplace–Beltrami operator `g^{ab}∂_a∂_b f + (1/√g)∂_a(√g g^{ab}) ∂_b f`.
///
/// Pure second derivatives use compact three-point stencils; first and
/// mixed derivatives are central. The result agrees with
/// `divergence(gradient(f))` up to `O(h²)`.
pub fn laplace_beltrami(metric: &Metric2Field, f: &[f64]) -> Result<ScalarField> {
    check_len(metric.len(), f.len())?;
    check_finite(f)?;
    let grid = metric.grid();
    let n = metric.len();
    let fu = d_u(grid, f, Parity::Even);
    let fv = d_v(grid, f);
    let fuu = d_uu(grid, f, Parity::Even);
    let fuv = d_uv(grid, f, Parity::Even);
    let fvv = d_vv(grid, f);
    let (cu, cv) = contracted_christoffel(metric);
    let inv = metric.inverse();
    Ok(ScalarField(
        (0..n)
            .map(|k| {
                let [a, b, c] = inv[k];
                a * fuu[k] + 2.0 * b * fuv[k] + c * fvv[k] + cu[k] * fu[k] + cv[k] * fv[k]
            })
            .collect(),
    ))
}

/// `(1/√g) ∂_a(√g g^{ab})` for `b = u, v`.
fn contracted_christoffel(metric: &Metric2Field) -> (Vec<f64>, Vec<f64>) {
    let grid = metric.grid();
    let sq = metric.sqrt_det();
    let inv = metric.inverse();
    let n = metric.len();
    let auu: Vec<f64> = (0..n).map(|k| sq[k] * inv[k][0]).collect();
    let auv: Vec<f64> = (0..n).map(|k| sq[k] * inv[k][1]).collect();
    let avv: Vec<f64> = (0..n).map(|k| sq[k] * inv[k][2]).collect();
    // √g g^{uu} and √g g^{vv} are odd, √g g^{uv} is even
    let auu_u = d_u(grid, &auu, Parity::Odd);
    let auv_u = d_u(grid, &auv, Parity::Even);
    let auv_v = d_v(grid, &auv);
    let avv_v = d_v(grid, &avv);
    (
        (0..n).map(|k| (auu_u[k] + auv_v[k]) / sq[k]).collect(),
        (0..n).map(|k| (auv_u[k] + avv_v[k]) / sq[k]).collect(),
    )
}

/// `∫ f dμ`.
pub fn integrate(metric: &Metric2Field, f: &[f64]) -> Result<f64> {
    check_len(metric.len(), f.len())?;
    check_finite(f)?;
    Ok(f.iter().zip(metric.area_elements()).map(|(a, b)| a * b).sum())
}

/// `∮ f ds` over the boundary ring, `f` given per boundary node.
pub fn integrate_boundary(metric: &Metric2Field, f: &[f64]) -> Result<f64> {
    if !metric.grid().has_boundary() {
        return Err(Error::NoBoundary);
    }
    check_len(metric.grid().boundary_index().len(), f.len())?;
    check_finite(f)?;
    Ok(f.iter().zip(metric.boundary_lengths()).map(|(a, b)| a * b).sum())
}

/// Gauss curvature from the metric components alone.
///
/// Uses `K = (1/√g)[∂_v Y − ∂_u Z]` with `Z = (E G_u − F E_v)/(2E√g)` and
/// `Y = (2E F_u − E E_v − F E_u)/(2E√g)`, which stays regular at the poles.
/// `Z` lives on u-half-points so that `∂_u Z` is a compact difference; its
/// value on a pole is extrapolated from the three nearest half-point rings.
pub fn gauss_curvature(metric: &Metric2Field) -> ScalarField {
    let grid = metric.grid();
    let (nu, nv, h) = (grid.n_u(), grid.n_v(), grid.h_u());
    let n = metric.len();
    let comp = metric.components();
    let e: Vec<f64> = comp.iter().map(|c| c[0]).collect();
    let f: Vec<f64> = comp.iter().map(|c| c[1]).collect();
    let g: Vec<f64> = comp.iter().map(|c| c[2]).collect();
    let e_u = d_u(grid, &e, Parity::Even);
    let e_v = d_v(grid, &e);
    let f_u = d_u(grid, &f, Parity::Odd);
    let sq = metric.sqrt_det();

    // zh[i][j] sits at u = (i + 1) h, between rings i and i + 1
    let zh: Vec<Vec<f64>> = (0..nu - 1)
        .map(|i| {
            (0..nv)
                .map(|j| {
                    let (a, b) = (grid.id(i, j), grid.id(i + 1, j));
                    let em = 0.5 * (e[a] + e[b]);
                    let fm = 0.5 * (f[a] + f[b]);
                    let sm = 0.5 * (sq[a] + sq[b]);
                    let evm = 0.5 * (e_v[a] + e_v[b]);
                    let gu = (g[b] - g[a]) / h;
                    (em * gu - fm * evm) / (2.0 * em * sm)
                })
                .collect()
        })
        .collect();
    // even extrapolation in u from the rings at h, 2h, 3h off the pole;
    // averaging antipodal columns removes the odd part
    let pole = |r: [&[f64]; 3], j: usize| {
        let jp = grid.antipodal_column(j);
        0.5 * (1.5 * (r[0][j] + r[0][jp]) - 0.6 * (r[1][j] + r[1][jp]) + 0.1 * (r[2][j] + r[2][jp]))
    };
    let mut z_u = vec![0.0; n];
    for i in 0..nu {
        for j in 0..nv {
            let lower = if i == 0 { pole([&zh[0], &zh[1], &zh[2]], j) } else { zh[i - 1][j] };
            z_u[grid.id(i, j)] = if i + 1 < nu {
                (zh[i][j] - lower) / h
            } else if grid.topology() == Topology::Disk {
                (2.0 * zh[i - 1][j] - 3.0 * zh[i - 2][j] + zh[i - 3][j]) / h
            } else {
                (pole([&zh[nu - 2], &zh[nu - 3], &zh[nu - 4]], j) - lower) / h
            };
        }
    }

    let y: Vec<f64> = (0..n)
        .map(|k| (2.0 * e[k] * f_u[k] - e[k] * e_v[k] - f[k] * e_u[k]) / (2.0 * e[k] * sq[k]))
        .collect();
    let y_v = d_v(grid, &y);
    ScalarField((0..n).map(|k| (y_v[k] - z_u[k]) / sq[k]).collect())
}

/// Geodesic curvature of the boundary circle inside the surface, one value
/// per boundary node. Positive for a convex boundary such as the flat disk.
pub fn boundary_geodesic_curvature(metric: &Metric2Field) -> Result<Vec<f64>> {
    let grid = metric.grid();
    if grid.topology() != Topology::Disk {
        return Err(Error::NoBoundary);
    }
    // divergence of the unit field ν = ∇u / |∇u|, evaluated on u = 1
    let n = metric.len();
    let sq = metric.sqrt_det();
    let inv = metric.inverse();
    let mut flux_u = vec![0.0; n];
    let mut flux_v = vec![0.0; n];
    for k in 0..n {
        let s = inv[k][0].sqrt();
        flux_u[k] = sq[k] * s;
        flux_v[k] = sq[k] * inv[k][1] / s;
    }
    let a = d_u(grid, &flux_u, Parity::Even);
    let b = d_v(grid, &flux_v);
    Ok(grid.boundary_index().iter().map(|&k| (a[k] + b[k]) / sq[k]).collect())
}

/// `∫K dμ + ∮κ ds`.
pub fn gauss_bonnet_total(metric: &Metric2Field) -> Result<f64> {
    let k = gauss_curvature(metric);
    let mut total = integrate(metric, &k)?;
    if metric.grid().has_boundary() {
        let kappa = boundary_geodesic_curvature(metric)?;
        total += integrate_boundary(metric, &kappa)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::grid::Grid2;
    use std::f64::consts::PI;

    fn max_err(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn lb_of_l1_harmonic() {
        let mut errs = vec![];
        for n in [16, 32, 64] {
            let m = Metric2Field::round_sphere(Grid2::sphere(n, 2 * n).unwrap(), 1.0).unwrap();
            let f = ScalarField::from_fn(m.grid(), |u, _| u.cos());
            let lf = laplace_beltrami(&m, &f).unwrap();
            let exact: Vec<f64> = f.iter().map(|x| -2.0 * x).collect();
            errs.push(max_err(&lf, &exact));
        }
        assert!(errs[2] < 1e-2);
        for w in errs.windows(2) {
            let r = w[0] / w[1];
            assert!((3.6..4.4).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn lb_of_constant_vanishes() {
        let m = Metric2Field::from_fn(Grid2::sphere(16, 32).unwrap(), |u, v| {
            let s = u.sin();
            [1.0 + 0.2 * s * s * v.cos(), 0.1 * s * s * u.cos(), s * s * (1.0 + 0.3 * u.cos().powi(2))]
        })
        .unwrap();
        let lf = laplace_beltrami(&m, &vec![3.5; m.len()]).unwrap();
        assert!(lf.max_abs() < 1e-13);
    }

    #[test]
    fn flat_disk_curvatures() {
        let m = Metric2Field::flat_disk(Grid2::disk(32, 64).unwrap(), 1.0).unwrap();
        assert!(gauss_curvature(&m).max_abs() < 1e-8);
        let kappa = boundary_geodesic_curvature(&m).unwrap();
        assert!(kappa.iter().all(|k| (k - 1.0).abs() < 1e-10));
        assert!((gauss_bonnet_total(&m).unwrap() - 2.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn sphere_curvature() {
        let m = Metric2Field::round_sphere(Grid2::sphere(64, 128).unwrap(), 2.0).unwrap();
        let k = gauss_curvature(&m);
        assert!(k.iter().all(|x| (x - 0.25).abs() < 1e-3));
        assert!(matches!(boundary_geodesic_curvature(&m), Err(Error::NoBoundary)));
    }

    #[test]
    fn divergence_of_gradient_is_consistent() {
        let mut diffs = vec![];
        for n in [16, 32, 64] {
            let m = Metric2Field::round_sphere(Grid2::sphere(n, 2 * n).unwrap(), 1.0).unwrap();
            let f = ScalarField::from_fn(m.grid(), |u, _| u.cos() + u.cos().powi(2));
            let dg = divergence(&m, &gradient(&m, &f).unwrap()).unwrap();
            diffs.push(max_err(&dg, &laplace_beltrami(&m, &f).unwrap()));
        }
        for w in diffs.windows(2) {
            let r = w[0] / w[1];
            assert!((3.6..4.4).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn integrate_nan_rejected() {
        let m = Metric2Field::round_sphere(Grid2::sphere(8, 16).unwrap(), 1.0).unwrap();
        let mut f = vec![1.0; m.len()];
        f[5] = f64::NAN;
        assert!(matches!(integrate(&m, &f), Err(Error::NonFinite { node: 5 })));
    }
}
