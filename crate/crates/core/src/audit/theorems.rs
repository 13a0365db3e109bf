//! Inequality checkers. Each evaluates both sides of one statement on a
//! discretized surface and records the hypotheses it could screen.

use std::f64::consts::PI;

use crate::audit::report::{AuditReport, InequalityCheck, Relation, Tolerance};
use crate::data::tensor::{self, Vec3};
use crate::data::{energy_momentum, sample_points, FourVector, InitialData, SpacetimeExtension};
use crate::error::{Error, Result};
use crate::geometry::ops::gradient;
use crate::geometry::{distances_to_boundary, intrinsic_diameter, DistanceGraph, ScalarField, Topology};
use crate::spectra::{
    assemble, assemble_coefficients, mean_zero_spectrum, principal_eigenvalue, BoundaryCondition, Coefficients,
    EigenResult, OperatorKind, OperatorMatrix, OperatorSpec, QSource,
};
use crate::surface::{hawking_energy, Support, SurfaceGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditOptions {
    pub tolerance: Tolerance,
    /// Largest `|θ₊|` accepted as a MOTS.
    pub theta_tol: f64,
    /// A spectrum counts as nonnegative when `λ1 ≥ −spectral_tol·max(1, max|c|)`.
    pub spectral_tol: f64,
    /// Pointwise slack for sign conditions (`H > |P|`, `Π(N,N) ≤ 0`, ...).
    pub pointwise_tol: f64,
    /// Number of random ambient samples for infima over `M`.
    pub samples: usize,
    pub seed: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions {
            tolerance: Tolerance::default(),
            theta_tol: 1e-6,
            spectral_tol: 5e-3,
            pointwise_tol: 1e-10,
            samples: 200,
            seed: 0,
        }
    }
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::INFINITY, f64::min)
}

fn spectral_floor(op: &OperatorMatrix, opts: &AuditOptions) -> f64 {
    let scale = op.node_c.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    -opts.spectral_tol * scale
}

/// Flags `sphere_topology` / `disk_topology`; false marks the report not applicable.
fn topology_flag(r: &mut AuditReport, geom: &SurfaceGeometry, want: Topology) -> bool {
    let ok = geom.topology() == want;
    let name = match want {
        Topology::Sphere => "sphere_topology",
        Topology::Disk => "disk_topology",
    };
    r.flag(name, ok, geom.topology().euler_characteristic() as f64);
    if !ok {
        r.mark_not_applicable(format!("statement is for {want:?} topology"));
    }
    ok
}

/// `mots` and `stable` flags; returns the principal eigenpair of `L` when
/// the surface is a MOTS.
fn stable_mots_flags(
    r: &mut AuditReport,
    geom: &SurfaceGeometry,
    data: &dyn InitialData,
    bc: BoundaryCondition,
    opts: &AuditOptions,
) -> Result<Option<EigenResult>> {
    let theta = geom.max_abs_theta_plus();
    let mots = theta < opts.theta_tol;
    r.flag("mots", mots, theta);
    if !mots {
        r.flag("stable", false, f64::NAN);
        return Ok(None);
    }
    let op = assemble(geom, data, &OperatorSpec::new(OperatorKind::MotsL, bc))?;
    let eig = principal_eigenvalue(&op)?;
    r.flag("stable", eig.lambda1 >= spectral_floor(&op, opts), eig.lambda1);
    Ok(Some(eig))
}

fn free_boundary_flag(r: &mut AuditReport, geom: &SurfaceGeometry) -> bool {
    let Some(b) = geom.boundary.as_ref() else {
        r.flag("free_boundary", false, f64::NAN);
        r.mark_not_applicable("surface has no boundary");
        return false;
    };
    let ok = b.is_free_boundary();
    r.flag("free_boundary", ok, b.max_free_boundary_deviation());
    if !ok {
        r.mark_not_applicable("contact angle differs from pi/2; the statement is for free boundary surfaces");
    }
    ok
}

fn pi_nn_flag(r: &mut AuditReport, geom: &SurfaceGeometry, opts: &AuditOptions) {
    let b = geom.boundary.as_ref().expect("disk geometry has boundary data");
    let m = max_of(b.pi_nn.iter().copied());
    r.flag("pi_nn_nonpositive", m <= opts.pointwise_tol, m);
}

/// `H − |P|` at every node.
fn spacelike_excess(geom: &SurfaceGeometry) -> Vec<f64> {
    geom.h.iter().zip(geom.p.iter()).map(|(h, p)| h - p.abs()).collect()
}

/// Volume preserving H-stability: the quadratic form of the operator is
/// nonnegative on mean-zero functions, up to the spectral tolerance.
/// Surfaces with `θ₊ = θ₋ = 0` have `δ|𝐇|² ≡ 0` and pass trivially.
fn h_stability_flag(
    r: &mut AuditReport,
    geom: &SurfaceGeometry,
    data: &dyn InitialData,
    kind: OperatorKind,
    opts: &AuditOptions,
) {
    let name = "h_stable_volume_preserving";
    if geom.theta_plus.max_abs().max(geom.theta_minus.max_abs()) <= opts.theta_tol {
        r.flag(name, true, 0.0);
        r.note(format!("{kind}: both expansions vanish, first variation of |H|^2 is identically zero"));
        return;
    }
    let spec = OperatorSpec::new(kind, BoundaryCondition::default_for(geom.topology()));
    let res = assemble(geom, data, &spec).and_then(|op| {
        let sym = op.symmetric_part();
        let floor = spectral_floor(&sym, opts);
        mean_zero_spectrum(&sym, 1).map(|v| (v[0], floor))
    });
    match res {
        Ok((v, floor)) => {
            r.flag(name, v >= floor, v);
            r.note(format!("{kind} quadratic form on mean-zero functions: lowest value {v:.6e} (floor {floor:.3e})"));
        }
        Err(e) => {
            r.flag(name, false, f64::NAN);
            r.note(format!("{kind} stability not evaluated: {e}"));
        }
    }
}

fn tensor_sup(geom: &SurfaceGeometry, t: &crate::geometry::SymTensor2Field) -> f64 {
    max_of(geom.tensor_norm(t))
}

fn w_sup(geom: &SurfaceGeometry) -> f64 {
    max_of(geom.w_norm_sq().into_iter().map(|x| x.max(0.0).sqrt()))
}

fn null_pair(geom: &SurfaceGeometry, k: usize) -> (FourVector, FourVector) {
    FourVector::null_pair(geom.normal[k])
}

/// `1 + (1/24π)∫θ₊θ₋ ≥ (1/12π)∫(μ + J(N) − θ₊k(N,N) − 2(θ₊/H)∇_N P)`.
pub fn audit_cy_estimate(geom: &SurfaceGeometry, data: &dyn InitialData, opts: &AuditOptions) -> Result<AuditReport> {
    let mut r = AuditReport::new("cy-estimate");
    if !topology_flag(&mut r, geom, Topology::Sphere) {
        return Ok(r.finish());
    }
    let excess = spacelike_excess(geom);
    let spacelike = geom
        .h
        .iter()
        .zip(&excess)
        .all(|(h, e)| *e > opts.pointwise_tol * h.abs().max(1.0));
    r.flag("spacelike_mean_curvature", spacelike, min_of(excess.iter().copied()));

    let tt: Vec<f64> = geom.theta_plus.iter().zip(geom.theta_minus.iter()).map(|(a, b)| a * b).collect();
    let lhs = 1.0 + geom.integrate(&tt) / (24.0 * PI);
    let h_scale = geom.h.max_abs().max(geom.p.max_abs()).max(1.0);
    if let Some(k) = geom.h.iter().position(|h| h.abs() <= opts.pointwise_tol * h_scale) {
        r.mark_not_applicable(format!("mean curvature vanishes at node {k}, so theta+/H is undefined"));
        return Ok(r.finish());
    }
    let integrand: Vec<f64> = (0..geom.len())
        .map(|k| {
            let tp = geom.theta_plus[k];
            geom.mu[k] + geom.j_n[k] - tp * geom.k_nn[k] - 2.0 * tp / geom.h[k] * geom.nabla_n_p[k]
        })
        .collect();
    let rhs = geom.integrate(&integrand) / (12.0 * PI);
    r.check(InequalityCheck::new("cy", lhs, rhs, Relation::Ge, &opts.tolerance));

    let sum: Vec<[f64; 3]> = (0..geom.len()).map(|k| [0, 1, 2].map(|c| geom.k_sigma[k][c] + geom.a[k][c])).collect();
    r.diagnostic("k_sigma_plus_a", tensor_sup(geom, &crate::geometry::SymTensor2Field(sum)));
    r.diagnostic("w", w_sup(geom));
    if geom.theta_plus.iter().zip(geom.h.iter()).any(|(t, h)| t / h < 0.0) {
        r.note(format!("theta+/H < 0 somewhere; reversed orientation margin {:.6e}", rhs - lhs));
    }
    h_stability_flag(&mut r, geom, data, OperatorKind::HStabNormal, opts);
    Ok(r.finish())
}

/// Unit spatial directions sampled for the null energy condition.
fn null_directions(geom: &SurfaceGeometry, data: &dyn InitialData, k: usize) -> Vec<Vec3> {
    let g = data.g(&geom.position[k]);
    let unit = |v: Vec3| {
        let n = tensor::bilinear(&g, &v, &v).sqrt();
        v.map(|c| c / n)
    };
    let n = geom.normal[k];
    let t1 = unit(geom.tangents[k][0]);
    let ev = geom.tangents[k][1];
    let d = tensor::bilinear(&g, &ev, &t1);
    let t2 = unit([0, 1, 2].map(|i| ev[i] - d * t1[i]));
    let mut dirs = vec![];
    for s in [1.0, -1.0] {
        dirs.push(n.map(|c| s * c));
        dirs.push(t1.map(|c| s * c));
        dirs.push(t2.map(|c| s * c));
        dirs.push(unit([0, 1, 2].map(|i| n[i] + s * t1[i])));
        dirs.push(unit([0, 1, 2].map(|i| n[i] + s * t2[i])));
    }
    dirs
}

/// `E_H ≥ (√|Σ|/48π^{3/2}) ∫G(l₊,l₋)`.
pub fn audit_hawking_bound(geom: &SurfaceGeometry, data: &dyn InitialData, opts: &AuditOptions) -> Result<AuditReport> {
    let mut r = AuditReport::new("hawking-bound");
    if !topology_flag(&mut r, geom, Topology::Sphere) {
        return Ok(r.finish());
    }
    let Some(ext) = data.extension() else {
        r.flag("spacetime_extension", false, 0.0);
        r.mark_not_applicable(format!("`{}` has no spacetime extension", data.name()));
        return Ok(r.finish());
    };
    r.flag("spacetime_extension", true, 1.0);

    let mut nec = f64::INFINITY;
    let mut g_scale = 1.0f64;
    let mut g_pm = Vec::with_capacity(geom.len());
    let mut g_mm = Vec::with_capacity(geom.len());
    for k in 0..geom.len() {
        let x = &geom.position[k];
        let e = ext.einstein(x);
        for d in null_directions(geom, data, k) {
            let v = FourVector::new(1.0, d);
            let c = e.contract(&v, &v);
            nec = nec.min(c);
            g_scale = g_scale.max(c.abs());
        }
        let (lp, lm) = null_pair(geom, k);
        g_pm.push(ext.einstein_contraction(x, &lp, &lm));
        g_mm.push(ext.einstein_contraction(x, &lm, &lm));
    }
    r.flag("null_energy_condition", nec >= -opts.pointwise_tol * g_scale, nec);
    // closure of the spacelike condition, so that degenerate (θ₊ = θ₋ = 0) surfaces pass
    let tt = max_of(geom.theta_plus.iter().zip(geom.theta_minus.iter()).map(|(a, b)| a * b));
    let tt_scale = geom.theta_plus.max_abs().max(geom.theta_minus.max_abs()).max(1.0);
    r.flag("mean_curvature_not_timelike", tt <= opts.pointwise_tol * tt_scale * tt_scale, tt);

    let lhs = hawking_energy(geom)?;
    let rhs = geom.area().sqrt() / (48.0 * PI.powf(1.5)) * geom.integrate(&g_pm);
    r.check(InequalityCheck::new("hawking", lhs, rhs, Relation::Ge, &opts.tolerance));
    r.diagnostic("chi_minus_hat", tensor_sup(geom, &geom.chi_minus_hat));
    r.diagnostic("w", w_sup(geom));
    r.diagnostic("g_minus_minus", max_of(g_mm.iter().map(|x| x.abs())));
    h_stability_flag(&mut r, geom, data, OperatorKind::HStabMinusLminus, opts);
    // the rearrangement leading to the stated constant drops the factor 1/2 on G(l+, l-)
    r.note(format!("with (1/2)∫G(l+,l-) in place of ∫G(l+,l-) the margin is {:.6e}", lhs - 0.5 * rhs));
    Ok(r.finish())
}

/// `∫(μ + J(N)) ≤ 2π` on a stable MOTS with `μ − |J| > 0`.
pub fn audit_cohn_vossen(
    geom: &SurfaceGeometry,
    data: &dyn InitialData,
    truncation_note: Option<&str>,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    let mut r = AuditReport::new("cohn-vossen");
    let bc = match geom.topology() {
        Topology::Sphere => BoundaryCondition::Closed,
        Topology::Disk => BoundaryCondition::Robin(QSource::Symmetrized),
    };
    stable_mots_flags(&mut r, geom, data, bc, opts)?;
    let dec = min_of(geom.mu.iter().zip(geom.j_norm.iter()).map(|(m, j)| m - j));
    r.flag("dec_strict", dec > opts.pointwise_tol, dec);
    let f: Vec<f64> = geom.mu.iter().zip(geom.j_n.iter()).map(|(m, j)| m + j).collect();
    r.check(InequalityCheck::new("cohn_vossen", geom.integrate(&f), 2.0 * PI, Relation::Le, &opts.tolerance));
    r.note(truncation_note.unwrap_or(
        "the grid is a compact truncation of a possibly non-compact surface; the integral is indicative only",
    ));
    Ok(r.finish())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthParams {
    pub a: f64,
    pub c: f64,
    /// Potential `q ≥ 0` of the area-growth bound; zero when absent.
    pub q: Option<Vec<f64>>,
    /// Ball center; defaults to the node farthest from the boundary (node 0 on a sphere).
    pub center: Option<usize>,
    /// Outer radius `R`; defaults to `0.99·dist(x₀, ∂Σ)`, or half the diameter on a sphere.
    pub radius: Option<f64>,
    /// `R′/R`.
    pub ratio: f64,
}

impl GrowthParams {
    pub fn new(a: f64, c: f64) -> Self {
        GrowthParams { a, c, q: None, center: None, radius: None, ratio: 0.5 }
    }
}

fn schrodinger_lambda1(geom: &SurfaceGeometry, zeroth: Vec<f64>, opts: &AuditOptions) -> Result<(f64, f64)> {
    let op = assemble_coefficients("schrodinger", &Coefficients::schrodinger(&geom.metric, zeroth))?;
    let eig = principal_eigenvalue(&op)?;
    Ok((eig.lambda1, spectral_floor(&op, opts)))
}

/// Distance bound `dist(p, ∂Σ) ≤ π√((1 + 1/(4a−1))a/c)` and the area growth
/// bound for metric balls.
pub fn audit_growth_bounds(geom: &SurfaceGeometry, params: &GrowthParams, opts: &AuditOptions) -> Result<AuditReport> {
    let GrowthParams { a, c, ratio, .. } = *params;
    if !(a > 0.25) {
        return Err(Error::InvalidParameter(format!("growth bounds need a > 1/4, got {a}")));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("growth bounds need c > 0, got {c}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidParameter(format!("R'/R must lie in (0, 1), got {ratio}")));
    }
    let n = geom.len();
    let q = params.q.clone().unwrap_or_else(|| vec![0.0; n]);
    if q.len() != n {
        return Err(Error::FieldLength { expected: n, found: q.len() });
    }
    let mut r = AuditReport::new("growth-bounds");
    let (l1, floor) = schrodinger_lambda1(geom, geom.gauss.iter().map(|k| a * k - c).collect(), opts)?;
    r.flag("nonnegative_ak_minus_c", l1 >= floor, l1);
    let (l2, floor) = schrodinger_lambda1(geom, geom.gauss.iter().zip(&q).map(|(k, q)| a * k - q).collect(), opts)?;
    r.flag("nonnegative_ak_minus_q", l2 >= floor, l2);
    let qmin = min_of(q.iter().copied());
    r.flag("q_nonnegative", qmin >= 0.0, qmin);

    let closed = geom.topology() == Topology::Sphere;
    let to_boundary = distances_to_boundary(&geom.metric);
    let (dist, dist_name) = if closed {
        (intrinsic_diameter(&geom.metric), "diameter")
    } else {
        (max_of(to_boundary.iter().copied()), "max distance to boundary")
    };
    let bound = PI * ((1.0 + 1.0 / (4.0 * a - 1.0)) * a / c).sqrt();
    r.check(InequalityCheck::new("distance", dist, bound, Relation::Le, &opts.tolerance));
    r.note(format!("distance side is the {dist_name} from graph distances"));

    let center = match params.center {
        Some(k) if k < n => k,
        Some(k) => return Err(Error::InvalidParameter(format!("center node {k} out of range"))),
        None if closed => 0,
        None => (0..n).fold(0, |best, k| if to_boundary[k] > to_boundary[best] { k } else { best }),
    };
    let d_center = DistanceGraph::new(&geom.metric).distances_from(center);
    let radius = match params.radius {
        Some(rr) => rr,
        None if closed => 0.5 * dist,
        None => 0.99 * to_boundary[center],
    };
    if !(radius > 0.0 && radius < to_boundary[center]) {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} must lie in (0, dist(x0, boundary) = {})",
            to_boundary[center]
        )));
    }
    let inner = ratio * radius;
    let dmu = geom.area_elements();
    let (ball, q_ball) = (0..n)
        .filter(|&k| d_center[k] <= inner)
        .fold((0.0, 0.0), |(b, qb), k| (b + dmu[k], qb + q[k] * dmu[k]));
    let lhs = 8.0 * a * a / (4.0 * a - 1.0) * ball / (radius * radius) + (1.0 - ratio).powi(2) * q_ball;
    let rhs = 2.0 * PI * a * (1.0 - ratio).powf(2.0 / (1.0 - 4.0 * a));
    r.check(InequalityCheck::new("area_growth", lhs, rhs, Relation::Le, &opts.tolerance));
    r.note(format!("ball center node {center}, R = {radius:.6e}, R' = {inner:.6e}"));
    Ok(r.finish())
}

/// `𝒢 = −¾θ₊θ₋ + ½G(l₊,l₋) − (θ₊/2θ₋)G(l₋,l₋)`.
pub fn compute_g_quantity(geom: &SurfaceGeometry, data: &dyn InitialData) -> Result<ScalarField> {
    let ext = data.extension().ok_or_else(|| Error::MissingExtension(data.name().to_string()))?;
    g_quantity_with(geom, ext)
}

/// Below this `|θ₋|` counts as vanishing.
pub const THETA_MINUS_FLOOR: f64 = 1e-10;

fn g_quantity_with(geom: &SurfaceGeometry, ext: &dyn SpacetimeExtension) -> Result<ScalarField> {
    let mut out = Vec::with_capacity(geom.len());
    for k in 0..geom.len() {
        let (tp, tm) = (geom.theta_plus[k], geom.theta_minus[k]);
        if !(tm.abs() > THETA_MINUS_FLOOR) {
            return Err(Error::VanishingThetaMinus { node: k });
        }
        let x = &geom.position[k];
        let (lp, lm) = null_pair(geom, k);
        let g_pm = ext.einstein_contraction(x, &lp, &lm);
        let g_mm = ext.einstein_contraction(x, &lm, &lm);
        out.push(-0.75 * tp * tm + 0.5 * g_pm - tp / (2.0 * tm) * g_mm);
    }
    Ok(ScalarField(out))
}

/// Case (1) of the quadratic-growth statement: with `𝒢 ≥ c > 0` and the
/// operator `−Δ + K + (θ₊/2θ₋)|χ̂₋|² − 𝒢` nonnegative, distances are at most
/// `2π/√(3c)`.
pub fn audit_g_quantity(geom: &SurfaceGeometry, data: &dyn InitialData, opts: &AuditOptions) -> Result<AuditReport> {
    let g = compute_g_quantity(geom, data)?;
    let mut r = AuditReport::new("g-quantity");
    let chi = geom.tensor_norm(&geom.chi_minus_hat);
    let zeroth: Vec<f64> = (0..geom.len())
        .map(|k| geom.gauss[k] + geom.theta_plus[k] / (2.0 * geom.theta_minus[k]) * chi[k] * chi[k] - g[k])
        .collect();
    let (l1, floor) = schrodinger_lambda1(geom, zeroth, opts)?;
    r.flag("tl_nonnegative", l1 >= floor, l1);
    let tt = max_of(geom.theta_plus.iter().zip(geom.theta_minus.iter()).map(|(a, b)| a * b));
    r.flag("spacelike_mean_curvature", tt < 0.0, tt);

    let c = g.min();
    r.diagnostic("min_g", c);
    let (dist, what) = match geom.topology() {
        Topology::Sphere => (intrinsic_diameter(&geom.metric), "diameter"),
        Topology::Disk => (max_of(distances_to_boundary(&geom.metric)), "max distance to boundary"),
    };
    if c > 0.0 {
        let bound = 2.0 * PI / (3.0 * c).sqrt();
        r.check(InequalityCheck::new("distance", dist, bound, Relation::Le, &opts.tolerance));
        r.note(format!("distance side is the {what}"));
        if l1 >= floor {
            r.note("case (1) hypotheses certified: the statement concludes the surface is a sphere or projective plane");
        }
    } else {
        r.mark_not_applicable(format!("min G = {c:.6e} is not positive; the distance bound of case (1) is undefined"));
        if c >= -opts.pointwise_tol && l1 >= floor {
            r.note("case (2) hypotheses certified: the statement concludes at most quadratic growth of the universal cover");
        }
    }
    Ok(r.finish())
}

fn gauss_bonnet_note(r: &mut AuditReport, geom: &SurfaceGeometry) {
    let chi = geom.topology().euler_characteristic() as f64;
    let kappa = geom.boundary.as_ref().map_or(0.0, |b| b.kappa.iter().zip(&b.ds).map(|(k, s)| k * s).sum());
    let total = geom.integrate(&geom.gauss) + kappa;
    r.note(format!("Gauss-Bonnet total {:.10e} against 2*pi*chi = {:.10e}", total, 2.0 * PI * chi));
}

/// `I(Σ) = |Σ| inf(μ + J(N)) + |∂Σ| inf(H_∂M − ⟨W,ν⟩) ≤ 2πχ(Σ)` with the
/// equality-case residuals.
pub fn audit_i_sigma(geom: &SurfaceGeometry, data: &dyn InitialData, opts: &AuditOptions) -> Result<AuditReport> {
    let mut r = AuditReport::new("area-boundary");
    if !topology_flag(&mut r, geom, Topology::Disk) || !free_boundary_flag(&mut r, geom) {
        return Ok(r.finish());
    }
    let b = geom.boundary.as_ref().expect("disk geometry has boundary data");
    let eig = stable_mots_flags(&mut r, geom, data, BoundaryCondition::Robin(QSource::FreeBoundary), opts)?;
    pi_nn_flag(&mut r, geom, opts);

    let inf_bulk = min_of(geom.mu.iter().zip(geom.j_n.iter()).map(|(m, j)| m + j));
    let bnd: Vec<f64> = b.mean_curvature_support.iter().zip(&b.w_nu).map(|(h, w)| h - w).collect();
    let inf_bnd = min_of(bnd.iter().copied());
    let i_sigma = geom.area() * inf_bulk + b.length() * inf_bnd;
    let chi = geom.topology().euler_characteristic() as f64;
    r.check(InequalityCheck::new("i_sigma", i_sigma, 2.0 * PI * chi, Relation::Le, &opts.tolerance));
    gauss_bonnet_note(&mut r, geom);

    r.diagnostic("chi_plus", tensor_sup(geom, &geom.chi_plus));
    r.diagnostic("q", geom.q.max_abs());
    if let Some(e) = &eig {
        let log_phi: Vec<f64> = e.eigenfunction.iter().map(|p| p.ln()).collect();
        let grad = gradient(&geom.metric, &log_phi)?;
        let d = max_of((0..geom.len()).map(|k| {
            let diff = [geom.w[k][0] - grad[k][0], geom.w[k][1] - grad[k][1]];
            geom.metric.norm_sq(k, diff).max(0.0).sqrt()
        }));
        r.diagnostic("w_minus_grad_log_phi", d);
        let ls = assemble(geom, data, &OperatorSpec::new(OperatorKind::MotsLs, BoundaryCondition::Robin(QSource::FreeBoundary)))?;
        let ls1 = principal_eigenvalue(&ls)?.lambda1;
        r.diagnostic("lambda1_sum", ls1.abs() + e.lambda1.abs());
    }
    r.diagnostic("q_minus_w_nu", max_of(b.pi_nn.iter().zip(&b.w_nu).map(|(q, w)| (q - w).abs())));
    r.diagnostic("mu_plus_jn_constancy", max_of(geom.mu.iter().zip(geom.j_n.iter()).map(|(m, j)| m + j - inf_bulk)));
    r.diagnostic("kappa_constancy", max_of(b.kappa.iter().map(|k| (k - inf_bnd).abs())));
    Ok(r.finish())
}

/// Ambient infima entering the diameter estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientInfima {
    /// `inf_M (μ − |J|)`
    pub dec: f64,
    /// `inf_∂M (H_∂M − ⟨W,ν⟩)`
    pub boundary: f64,
    /// Description of the sample set the infima were taken over.
    pub sample_set: String,
}

impl AmbientInfima {
    /// Minima over `samples` random points plus the surface nodes, and over
    /// the boundary nodes of the surface.
    pub fn sampled(geom: &SurfaceGeometry, data: &dyn InitialData, samples: usize, seed: u64) -> Result<Self> {
        let mut dec = min_of(geom.mu.iter().zip(geom.j_norm.iter()).map(|(m, j)| m - j));
        for x in sample_points(data, samples, seed) {
            let em = energy_momentum(data, &x)?;
            dec = dec.min(em.mu - em.j_norm);
        }
        let b = geom.boundary.as_ref().ok_or(Error::NoBoundary)?;
        let boundary = min_of(b.mean_curvature_support.iter().zip(&b.w_nu).map(|(h, w)| h - w));
        Ok(AmbientInfima {
            dec,
            boundary,
            sample_set: format!(
                "{} random points (seed {}) and {} surface nodes; boundary term over {} boundary nodes",
                samples,
                seed,
                geom.len(),
                b.nodes.len()
            ),
        })
    }
}

/// Intrinsic diameter estimate for stable free boundary MOTS and the
/// accompanying area/length inequality.
pub fn audit_diameter(
    geom: &SurfaceGeometry,
    data: &dyn InitialData,
    infima: Option<AmbientInfima>,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    let mut r = AuditReport::new("diameter");
    if !topology_flag(&mut r, geom, Topology::Disk) || !free_boundary_flag(&mut r, geom) {
        return Ok(r.finish());
    }
    stable_mots_flags(&mut r, geom, data, BoundaryCondition::Robin(QSource::FreeBoundary), opts)?;
    pi_nn_flag(&mut r, geom, opts);
    let inf = match infima {
        Some(i) => i,
        None => AmbientInfima::sampled(geom, data, opts.samples, opts.seed)?,
    };
    let tol = opts.pointwise_tol;
    let case_i = inf.dec > tol && inf.boundary >= -tol;
    let case_ii = inf.dec >= -tol && inf.boundary > tol;
    r.flag("dec_nonnegative", inf.dec >= -tol, inf.dec);
    r.flag("case_i_or_ii", case_i || case_ii, inf.boundary);
    r.note(format!("ambient infima over {}", inf.sample_set));
    if !(inf.dec > 0.0) && !(inf.boundary > 0.0) {
        r.mark_not_applicable("both infima are nonpositive, so the bound is infinite");
        return Ok(r.finish());
    }
    let b1 = if inf.dec > 0.0 { 2.0 * PI / (3.0 * inf.dec).sqrt() } else { f64::INFINITY };
    let b2 = if inf.boundary > 0.0 { (PI + 8.0 / 3.0) / inf.boundary } else { f64::INFINITY };
    let diam = intrinsic_diameter(&geom.metric);
    r.check(InequalityCheck::new("diameter", diam, b1.min(b2), Relation::Le, &opts.tolerance));
    let b = geom.boundary.as_ref().expect("disk geometry has boundary data");
    let combo = inf.dec * geom.area() + inf.boundary * b.length();
    let chi = geom.topology().euler_characteristic() as f64;
    r.check(InequalityCheck::new("area_length", combo, 2.0 * PI * chi, Relation::Le, &opts.tolerance));
    r.check(InequalityCheck::new("area_length_positive", 0.0, combo, Relation::Lt, &opts.tolerance));
    Ok(r.finish())
}

/// Quantity minimized by [`collar_infimum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollarField {
    /// `μ − |J|` on the collar around the surface.
    DecMargin,
    /// `H_∂M − ⟨W,ν⟩` on the collar around the boundary curve.
    BoundaryMeanCurvMinusW,
}

impl CollarField {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dec" | "dec-margin" => Ok(CollarField::DecMargin),
            "boundary" | "boundary-mean-curvature" => Ok(CollarField::BoundaryMeanCurvMinusW),
            other => Err(Error::Parse(format!("unknown collar field `{other}`"))),
        }
    }
}

/// Mean curvature of the level set of `support` through `x`.
fn support_mean_curvature(support: &Support, data: &dyn InitialData, x: &Vec3) -> Result<f64> {
    data.check_domain(x)?;
    let g = data.g(x);
    let ginv = tensor::inverse(&g).ok_or(Error::DegenerateMetric { node: 0, det: tensor::det(&g) })?;
    let gam = tensor::christoffel(&ginv, &data.dg(x));
    let ds = support.gradient(x);
    let up = tensor::mat_vec(&ginv, &ds);
    let norm = tensor::bilinear(&g, &up, &up).sqrt();
    let nbar = up.map(|c| c / norm);
    let hess = support.hessian(x);
    let mut pi = [[0.0; 3]; 3];
    for p in 0..3 {
        for q in 0..3 {
            let mut c = hess[p][q];
            for m in 0..3 {
                c -= gam[m][p][q] * ds[m];
            }
            pi[p][q] = c / norm;
        }
    }
    Ok(tensor::trace(&ginv, &pi) - tensor::bilinear(&pi, &nbar, &nbar))
}

/// Minimum of `field` over `{F + sN : |s| ≤ ζ}` sampled at `steps` values of
/// `s` (straight coordinate lines along the normal).
pub fn collar_infimum(
    data: &dyn InitialData,
    geom: &SurfaceGeometry,
    zeta: f64,
    field: CollarField,
    steps: usize,
) -> Result<f64> {
    if !(zeta > 0.0) || !zeta.is_finite() {
        return Err(Error::InvalidParameter(format!("collar width must be positive, got {zeta}")));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter("collar needs at least two s-steps".into()));
    }
    let offsets: Vec<f64> = (0..steps).map(|i| -zeta + 2.0 * zeta * i as f64 / (steps - 1) as f64).collect();
    let shifted = |k: usize, s: f64| -> Vec3 { [0, 1, 2].map(|i| geom.position[k][i] + s * geom.normal[k][i]) };
    let mut best = f64::INFINITY;
    match field {
        CollarField::DecMargin => {
            for k in 0..geom.len() {
                for &s in &offsets {
                    let em = energy_momentum(data, &shifted(k, s))?;
                    best = best.min(em.mu - em.j_norm);
                }
            }
        }
        CollarField::BoundaryMeanCurvMinusW => {
            let b = geom.boundary.as_ref().ok_or(Error::NoBoundary)?;
            for (i, &k) in b.nodes.iter().enumerate() {
                for &s in &offsets {
                    let h = support_mean_curvature(&b.support, data, &shifted(k, s))?;
                    best = best.min(h - b.w_nu[i]);
                }
            }
        }
    }
    Ok(best)
}

/// Screens the collar hypotheses `I_ζ(Σ) = 2πχ(Σ)` and `max Π(N,N) = 0`.
pub fn audit_collar(
    geom: &SurfaceGeometry,
    data: &dyn InitialData,
    zeta: f64,
    steps: usize,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    let mut r = AuditReport::new("collar");
    if !topology_flag(&mut r, geom, Topology::Disk) || !free_boundary_flag(&mut r, geom) {
        return Ok(r.finish());
    }
    let b = geom.boundary.as_ref().expect("disk geometry has boundary data");
    let dec = collar_infimum(data, geom, zeta, CollarField::DecMargin, steps)?;
    let bnd = collar_infimum(data, geom, zeta, CollarField::BoundaryMeanCurvMinusW, steps)?;
    r.flag("dec_positive", dec > opts.pointwise_tol, dec);
    let pmax = max_of(b.pi_nn.iter().copied());
    r.flag("max_pi_nn_zero", pmax.abs() <= opts.pointwise_tol, pmax);
    let chi = geom.topology().euler_characteristic() as f64;
    let i_zeta = geom.area() * dec + b.length() * bnd;
    r.check(InequalityCheck::new("i_zeta", i_zeta, 2.0 * PI * chi, Relation::Le, &opts.tolerance));
    let gap = 2.0 * PI * chi - i_zeta;
    r.diagnostic("i_zeta_gap", gap.abs());
    r.note(format!(
        "collar of width {zeta} sampled at {steps} normal offsets; I_zeta = 2*pi*chi is {} (gap {gap:.3e})",
        if gap.abs() <= opts.tolerance.rel * 2.0 * PI * chi.abs() + opts.tolerance.abs {
            "consistent with the samples"
        } else {
            "not consistent with the samples"
        }
    ));
    Ok(r.finish())
}

/// Boundary-component and area consequences of index one.
pub fn audit_index_bounds(
    genus: u32,
    boundary_components: u32,
    index: u32,
    c: Option<f64>,
    area: Option<f64>,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    if boundary_components < 1 {
        return Err(Error::InvalidParameter("at least one boundary component is required".into()));
    }
    let mut r = AuditReport::new("index");
    r.flag("index_one", index == 1, index as f64);
    let l = boundary_components as f64;
    let threshold = if genus % 2 == 0 { 10.0 } else { 14.0 };
    r.check(InequalityCheck::new("boundary_components", l, threshold, Relation::Lt, &opts.tolerance));
    match (c, area) {
        (Some(c), Some(area)) => {
            r.flag("dec_margin_positive", c > 0.0, c);
            let sign = if genus % 2 == 0 { 1.0 } else { -1.0 };
            let bound = 2.0 * PI * (7.0 - sign - l) / c;
            r.check(InequalityCheck::new("area", area, bound, Relation::Le, &opts.tolerance));
        }
        (None, None) => {}
        _ => return Err(Error::InvalidParameter("the area bound needs both c and area".into())),
    }
    Ok(r.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::report::Verdict;
    use crate::data::{HyperboloidalFlat, MinkowskiFlat, SchwarzschildIsotropic};
    use crate::geometry::Grid2;
    use crate::surface::{compute_geometry, SurfaceChart};

    fn sphere(data: &dyn InitialData, r: f64, n: usize) -> SurfaceGeometry {
        let s = SurfaceChart::sphere(Grid2::sphere(n, 2 * n).unwrap(), [0.0; 3], r).unwrap();
        compute_geometry(&s, data).unwrap()
    }

    #[test]
    fn cy_flat_sphere() {
        for r in [0.5, 2.0] {
            let rep = audit_cy_estimate(&sphere(&MinkowskiFlat, r, 24), &MinkowskiFlat, &AuditOptions::default()).unwrap();
            assert!((rep.lhs() - 1.0 / 3.0).abs() < 1e-12);
            assert!(rep.rhs().abs() < 1e-12);
            assert_eq!(rep.verdict, Verdict::Holds);
        }
    }

    #[test]
    fn cy_horizon_not_applicable() {
        let data = SchwarzschildIsotropic::new(1.0).unwrap();
        let rep = audit_cy_estimate(&sphere(&data, 0.5, 16), &data, &AuditOptions::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn index_examples() {
        let o = AuditOptions::default();
        assert_eq!(audit_index_bounds(0, 1, 1, None, None, &o).unwrap().verdict, Verdict::Holds);
        assert_eq!(audit_index_bounds(0, 10, 1, None, None, &o).unwrap().verdict, Verdict::Violated);
        let rep = audit_index_bounds(1, 3, 1, Some(0.5), Some(10.0), &o).unwrap();
        assert!((rep.checks[1].rhs - 20.0 * PI).abs() < 1e-12);
        assert_eq!(rep.verdict, Verdict::Holds);
        assert!(audit_index_bounds(0, 0, 1, None, None, &o).is_err());
    }

    #[test]
    fn g_quantity_flat_and_hyperboloidal() {
        let g = compute_g_quantity(&sphere(&MinkowskiFlat, 2.0, 12), &MinkowskiFlat).unwrap();
        assert!(g.iter().all(|x| (x - 0.75).abs() < 1e-12));
        // H = 1, P = 2: θ₊ = 3, θ₋ = 1, G(l₊,l₋) = 2Λ = 6
        let g = compute_g_quantity(&sphere(&HyperboloidalFlat, 2.0, 12), &HyperboloidalFlat).unwrap();
        assert!(g.iter().all(|x| (x - 0.75).abs() < 1e-10), "{}", g[0]);
    }

    #[test]
    fn collar_dec() {
        let geom = sphere(&HyperboloidalFlat, 1.0, 8);
        let v = collar_infimum(&HyperboloidalFlat, &geom, 0.1, CollarField::DecMargin, 3).unwrap();
        assert!((v - 3.0).abs() < 1e-8);
        let data = SchwarzschildIsotropic::new(1.0).unwrap();
        let geom = sphere(&data, 0.5, 8);
        // the unit normal has coordinate length 1/4 here, so this reaches r = 0.125
        assert!(collar_infimum(&data, &geom, 1.5, CollarField::DecMargin, 3).is_err());
    }
}
