use faer::Mat;

use motslab::data::{MinkowskiFlat, SchwarzschildIsotropic, SchwarzschildPG};
use motslab::geometry::{divergence, CovectorField, Grid2, Metric2Field, ScalarField};
use motslab::spectra::{
    assemble, assemble_coefficients, principal_eigenvalue, stability_verdict, BoundaryCondition, Coefficients,
    OperatorKind, OperatorMatrix, OperatorSpec, QSource, VerdictOptions,
};
use motslab::surface::{compute_geometry, Support, SurfaceChart};

/// Smallest real part among the eigenvalues of the dense matrix of `op`.
fn dense_lowest_real(op: &OperatorMatrix) -> f64 {
    let n = op.dim();
    let mut a = Mat::<f64>::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = op.apply(&e);
        for i in 0..n {
            a[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    a.eigenvalues().unwrap().iter().map(|z| z.re).fold(f64::INFINITY, f64::min)
}

#[test]
fn principal_eigenvalue_matches_dense_spectrum() {
    let pg = SchwarzschildPG::new(1.0).unwrap();
    let s = SurfaceChart::sphere(Grid2::sphere(10, 20).unwrap(), [0.4, 0.0, 0.0], 2.5).unwrap();
    let g = compute_geometry(&s, &pg).unwrap();
    let op = assemble(&g, &pg, &OperatorSpec::new(OperatorKind::MotsL, BoundaryCondition::Closed)).unwrap();
    assert!(!op.symmetric);
    let res = principal_eigenvalue(&op).unwrap();
    assert!((res.lambda1 - dense_lowest_real(&op)).abs() < 1e-8);
    assert!(res.positive);

    let grid = Grid2::disk(10, 20).unwrap();
    let metric = Metric2Field::flat_disk(grid.clone(), 1.0).unwrap();
    let mut c = Coefficients::schrodinger(&metric, ScalarField::from_fn(&grid, |u, v| u * v.cos()).0);
    c.drift = CovectorField(grid.coordinates().iter().map(|&(u, v)| [0.2 * v.sin(), 0.3 * u * u]).collect());
    let robin = c.robin.as_mut().unwrap();
    robin.q = robin.q.iter().enumerate().map(|(i, _)| -0.5 - 0.1 * (i as f64).sin().abs()).collect();
    let op = assemble_coefficients("manufactured", &c).unwrap();
    let res = principal_eigenvalue(&op).unwrap();
    assert!((res.lambda1 - dense_lowest_real(&op)).abs() < 1e-8);
    assert!((res.lambda1 - res.adjoint_lambda1).abs() < 1e-8);
}

#[test]
fn gradient_drift_is_similar_to_symmetric_operator() {
    // L = e^h (−Δ + Q) e^{−h} when W = ∇h
    let grid = Grid2::sphere(24, 48).unwrap();
    let metric = Metric2Field::round_sphere(grid.clone(), 1.5).unwrap();
    let coords = grid.coordinates();
    let q: Vec<f64> = coords.iter().map(|&(u, v)| 0.3 * u.cos() - 0.2 * (u.sin() * v.cos())).collect();
    // h = 0.4 cos u + 0.1 sin u cos v
    let w = CovectorField(
        coords.iter().map(|&(u, v)| [-0.4 * u.sin() + 0.1 * u.cos() * v.cos(), -0.1 * u.sin() * v.sin()]).collect(),
    );
    let div = divergence(&metric, &w).unwrap();
    let zeroth: Vec<f64> = (0..grid.len()).map(|k| q[k] + div[k] - metric.norm_sq(k, w[k])).collect();
    let mut cl = Coefficients::schrodinger(&metric, zeroth);
    cl.drift = w;
    let l = principal_eigenvalue(&assemble_coefficients("L", &cl).unwrap()).unwrap();
    let s = principal_eigenvalue(&assemble_coefficients("Ls", &Coefficients::schrodinger(&metric, q)).unwrap()).unwrap();
    assert!((l.lambda1 - s.lambda1).abs() < 1e-6, "{} vs {}", l.lambda1, s.lambda1);
}

#[test]
fn symmetrized_robin_coefficient_subtracts_w_nu() {
    // inject W = ∇(c u²) on a flat free-boundary disk; then L and Ls are similar
    let c = 0.35;
    let s = SurfaceChart::flat_disk(Grid2::disk(20, 40).unwrap(), 1.0, Support::Cylinder { radius: 1.0 }).unwrap();
    let mut g = compute_geometry(&s, &MinkowskiFlat).unwrap();
    let grid = g.metric.grid().clone();
    g.w = CovectorField(grid.coordinates().iter().map(|&(u, _)| [2.0 * c * u, 0.0]).collect());
    g.div_w = divergence(&g.metric, &g.w).unwrap();
    let b = g.boundary.as_mut().unwrap();
    b.w_nu = vec![2.0 * c; b.nodes.len()];
    let bc = BoundaryCondition::Robin(QSource::FreeBoundary);
    let l = principal_eigenvalue(&assemble(&g, &MinkowskiFlat, &OperatorSpec::new(OperatorKind::MotsL, bc)).unwrap()).unwrap();
    let ls = principal_eigenvalue(&assemble(&g, &MinkowskiFlat, &OperatorSpec::new(OperatorKind::MotsLs, bc)).unwrap()).unwrap();
    assert!((l.lambda1 - ls.lambda1).abs() < 1e-8, "{} vs {}", l.lambda1, ls.lambda1);
    // with ∂νψ − (0 − 2c)ψ = 0 the symmetric problem is strictly positive
    assert!(ls.lambda1 > 0.1);

    let mut cs = Coefficients::schrodinger(&g.metric, vec![0.0; grid.len()]);
    let robin = cs.robin.as_mut().unwrap();
    robin.q = vec![-2.0 * c; robin.nodes.len()];
    let direct = principal_eigenvalue(&assemble_coefficients("direct", &cs).unwrap()).unwrap();
    assert!((direct.lambda1 - ls.lambda1).abs() < 1e-10);
}

#[test]
fn horizon_symmetrized_operator_is_shifted_laplacian() {
    for m in [1.0, 2.0] {
        let data = SchwarzschildIsotropic::new(m).unwrap();
        let s = SurfaceChart::sphere(Grid2::sphere(32, 64).unwrap(), [0.0; 3], m / 2.0).unwrap();
        let g = compute_geometry(&s, &data).unwrap();
        let op = assemble(&g, &data, &OperatorSpec::new(OperatorKind::MotsLs, BoundaryCondition::Closed)).unwrap();
        let k = 1.0 / (4.0 * m * m);
        let dev = op.node_c.iter().map(|c| (c - k).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-3 * k, "m={m}: {dev}");
        let res = principal_eigenvalue(&op).unwrap();
        assert!((res.lambda1 - k).abs() < 0.01 * k);
        let f = &res.eigenfunction;
        assert!(f.max() - f.min() < 1e-6);
    }
}

#[test]
fn horizon_is_stable_with_equal_eigenvalues() {
    let data = SchwarzschildIsotropic::new(1.0).unwrap();
    let s = SurfaceChart::sphere(Grid2::sphere(24, 48).unwrap(), [0.0; 3], 0.5).unwrap();
    let g = compute_geometry(&s, &data).unwrap();
    let v = stability_verdict(&g, &data, BoundaryCondition::Closed, &VerdictOptions::default()).unwrap();
    assert!(v.stable);
    assert!(v.comparison_ok && v.comparison_applies);
    assert!((v.lambda1_l - v.lambda1_ls).abs() < 1e-10);

    let flat = compute_geometry(&SurfaceChart::sphere(Grid2::sphere(16, 32).unwrap(), [0.0; 3], 1.0).unwrap(), &MinkowskiFlat).unwrap();
    assert!(stability_verdict(&flat, &MinkowskiFlat, BoundaryCondition::Closed, &VerdictOptions::default()).is_err());
}
