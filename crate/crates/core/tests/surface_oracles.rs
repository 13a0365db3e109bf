//! Closed-form oracles for the surface and initial-data layers.

use std::f64::consts::PI;

use motslab::data::{energy_momentum, sample_points, HyperboloidalFlat, InitialData, SchwarzschildIsotropic, SchwarzschildPG};
use motslab::geometry::Grid2;
use motslab::surface::{compute_geometry, hawking_energy, SurfaceChart, SurfaceGeometry};

fn sphere(data: &dyn InitialData, r: f64, n: usize) -> SurfaceGeometry {
    let s = SurfaceChart::sphere(Grid2::sphere(n, 2 * n).unwrap(), [0.0; 3], r).unwrap();
    compute_geometry(&s, data).unwrap()
}

/// Mean curvature of the coordinate sphere `|x| = r` in `ψ⁴δ`, `ψ = 1 + m/2r`:
/// `H = ψ⁻²(2/r + 4ψ'/ψ) = (2/ψ²r)(1 − m/(rψ))`.
fn iso_mean_curvature(m: f64, r: f64) -> f64 {
    let psi = 1.0 + m / (2.0 * r);
    2.0 / (psi * psi * r) * (1.0 - m / (r * psi))
}

/// With `k = 0`, `θ₊θ₋ = −H²` and `|Σ| = 4πψ⁴r²`, so `E_H = (ψ²r/2)(1 − (1 − m/rψ)²)`.
fn iso_hawking_energy(m: f64, r: f64) -> f64 {
    let psi = 1.0 + m / (2.0 * r);
    0.5 * psi * psi * r * (1.0 - (1.0 - m / (r * psi)).powi(2))
}

#[test]
fn isotropic_mean_curvature_matches_closed_form() {
    for m in [0.5, 1.0, 2.0] {
        let data = SchwarzschildIsotropic::new(m).unwrap();
        for r in [0.3 * m, 0.5 * m, 0.8 * m, 2.0 * m, 10.0 * m] {
            let g = sphere(&data, r, 12);
            let want = iso_mean_curvature(m, r);
            for k in 0..g.len() {
                assert!((g.h[k] - want).abs() < 1e-10 * (1.0 + want.abs()), "m={m} r={r}: {} vs {want}", g.h[k]);
                assert!(g.p[k].abs() < 1e-14);
            }
        }
        // the root of H(r) is the horizon
        assert!(iso_mean_curvature(m, 0.5 * m).abs() < 1e-15);
        assert!(sphere(&data, 0.5 * m, 12).max_abs_theta_plus() < 1e-6);
    }
}

#[test]
fn isotropic_hawking_energy_matches_closed_form() {
    let m = 1.0;
    let data = SchwarzschildIsotropic::new(m).unwrap();
    for r in [0.5, 1.0, 3.0, 50.0] {
        let e = hawking_energy(&sphere(&data, r, 16)).unwrap();
        let want = iso_hawking_energy(m, r);
        assert!((e - want).abs() < 1e-9 * want, "r={r}: {e} vs {want}");
    }
    let far = hawking_energy(&sphere(&data, 50.0, 16)).unwrap();
    assert!((far - m).abs() < 0.02 * m);
    let horizon = sphere(&data, 0.5, 16);
    assert!((horizon.area() - 16.0 * PI).abs() < 1e-9);
}

#[test]
fn hyperboloidal_sphere_expansions() {
    for r in [0.5, 1.0, 3.0] {
        let g = sphere(&HyperboloidalFlat, r, 10);
        for k in 0..g.len() {
            assert!((g.p[k] - 2.0).abs() < 1e-12);
            assert!((g.theta_plus[k] - (2.0 / r + 2.0)).abs() < 1e-12);
            assert!((g.theta_minus[k] - (2.0 - 2.0 / r)).abs() < 1e-12);
        }
    }
}

/// Flat Laplacian by a 7-point stencil.
fn fd_laplacian(f: &dyn Fn(&[f64; 3]) -> f64, x: &[f64; 3], h: f64) -> f64 {
    let mut s = -6.0 * f(x);
    for i in 0..3 {
        for sign in [1.0, -1.0] {
            let mut y = *x;
            y[i] += sign * h;
            s += f(&y);
        }
    }
    s / (h * h)
}

#[test]
fn isotropic_scalar_curvature_vanishes_by_finite_differences() {
    // for g = ψ⁴δ, R = −8ψ⁻⁵Δψ and k = 0, so 2μ = R
    let data = SchwarzschildIsotropic::new(1.0).unwrap();
    let psi = |x: &[f64; 3]| data.g(x)[0][0].powf(0.25);
    for x in sample_points(&data, 40, 3) {
        let r_fd = -8.0 * psi(&x).powi(-5) * fd_laplacian(&psi, &x, 1e-3);
        let em = energy_momentum(&data, &x).unwrap();
        assert!(r_fd.abs() < 1e-5, "R = {r_fd} at {x:?}");
        assert!((em.mu - 0.5 * r_fd).abs() < 1e-5);
    }
}

#[test]
fn painleve_gullstrand_momentum_constraint_by_hand() {
    // flat slice: 2μ = (tr k)² − |k|², J_i = ∂_j k_ij − ∂_i tr k
    let data = SchwarzschildPG::new(1.0).unwrap();
    let h = 1e-4;
    for x in sample_points(&data, 40, 5) {
        let k = data.k(&x);
        let tr = k[0][0] + k[1][1] + k[2][2];
        let norm: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| k[i][j] * k[i][j]).sum();
        assert!((tr * tr - norm).abs() < 1e-10 * (1.0 + tr * tr), "mu at {x:?}");
        let kd = |i: usize, a: usize, b: usize| {
            let (mut p, mut m) = (x, x);
            p[i] += h;
            m[i] -= h;
            (data.k(&p)[a][b] - data.k(&m)[a][b]) / (2.0 * h)
        };
        for i in 0..3 {
            let div: f64 = (0..3).map(|j| kd(j, i, j)).sum();
            let dtr: f64 = (0..3).map(|j| kd(i, j, j)).sum();
            assert!((div - dtr).abs() < 1e-6, "J_{i} = {} at {x:?}", div - dtr);
        }
        assert_eq!(data.g(&x), [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }
}

/// Gauss curvature of `(x/a)² + (y/b)² + (z/c)² = 1` at a point on it.
fn ellipsoid_k(a: f64, b: f64, c: f64, x: &[f64; 3]) -> f64 {
    let s = x[0] * x[0] / a.powi(4) + x[1] * x[1] / b.powi(4) + x[2] * x[2] / c.powi(4);
    1.0 / (a * a * b * b * c * c * s * s)
}

#[test]
fn spheroid_gauss_curvature_converges() {
    let (a, b, c) = (1.0, 1.0, 1.5);
    let err = |n: usize| {
        let s = SurfaceChart::ellipsoid(Grid2::sphere(n, 2 * n).unwrap(), [0.0; 3], a, b, c).unwrap();
        let g = compute_geometry(&s, &motslab::data::MinkowskiFlat).unwrap();
        (0..g.len()).map(|k| (g.gauss[k] - ellipsoid_k(a, b, c, &g.position[k])).abs()).fold(0.0, f64::max)
    };
    // peak curvature c²/a⁴ = 2.25 at the poles
    let (e1, e2) = (err(32), err(64));
    assert!(e2 < 0.02 * 2.25, "{e2}");
    assert!(e1 / e2 > 3.5, "{e1} -> {e2}");
}

#[test]
fn cap_area_and_boundary_length() {
    for (r, opening) in [(1.0, PI / 2.0), (2.0, 1.0)] {
        let s = SurfaceChart::cap(Grid2::disk(48, 96).unwrap(), r, opening).unwrap();
        let g = compute_geometry(&s, &motslab::data::MinkowskiFlat).unwrap();
        let area = 2.0 * PI * r * r * (1.0 - opening.cos());
        let length = 2.0 * PI * r * opening.sin();
        assert!((g.area() - area).abs() < 1e-3 * area, "{} vs {area}", g.area());
        let b = g.boundary.as_ref().unwrap();
        assert!((b.length() - length).abs() < 1e-9 * length);
        // a hemisphere meets its plane orthogonally
        if opening == PI / 2.0 {
            assert!(b.is_free_boundary());
        }
    }
}
