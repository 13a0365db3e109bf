use crate::data::tensor::{self, Mat3, Vec3};
use crate::data::{energy_momentum, InitialData};
use crate::error::{Error, Result};
use crate::geometry::ops::{boundary_geodesic_curvature, divergence, gauss_curvature};
use crate::geometry::{CovectorField, Metric2Field, ScalarField, SymTensor2Field, Topology};
use crate::surface::chart::{Jet, Support, SurfaceChart};

/// Boundary quantities of a disk-type surface, one entry per boundary node.
#[derive(Debug, Clone)]
pub struct BoundaryGeometry {
    pub support: Support,
    pub nodes: Vec<usize>,
    /// Outward conormal `ν` of `∂Σ` in `Σ` (ambient coordinates).
    pub nu: Vec<Vec3>,
    /// Outward unit normal `N̄` of `∂M`.
    pub support_normal: Vec<Vec3>,
    /// `ν̄ = cos γ ν − sin γ N`, the normal of `∂Σ` inside `∂M`.
    pub nu_bar: Vec<Vec3>,
    /// Contact angle from `cos γ = ⟨N̄, N⟩`.
    pub gamma: Vec<f64>,
    pub a_nu_nu: Vec<f64>,
    pub pi_nn: Vec<f64>,
    pub pi_nubar_nubar: Vec<f64>,
    pub mean_curvature_support: Vec<f64>,
    pub w_nu: Vec<f64>,
    /// Geodesic curvature of `∂Σ` in `Σ`.
    pub kappa: Vec<f64>,
    /// Arc-length weights.
    pub ds: Vec<f64>,
}

impl BoundaryGeometry {
    pub fn length(&self) -> f64 {
        self.ds.iter().sum()
    }

    pub fn max_free_boundary_deviation(&self) -> f64 {
        self.gamma.iter().fold(0.0, |m, g| m.max((g - std::f64::consts::FRAC_PI_2).abs()))
    }

    /// `γ` within `1e-6` of `π/2` at every node.
    pub fn is_free_boundary(&self) -> bool {
        self.max_free_boundary_deviation() < 1e-6
    }

    /// Robin coefficient for the capillary condition at a prescribed angle.
    pub fn capillary_q(&self, gamma: f64) -> Vec<f64> {
        let (s, c) = gamma.sin_cos();
        (0..self.nodes.len())
            .map(|b| -c / s * self.a_nu_nu[b] + self.pi_nubar_nubar[b] / s)
            .collect()
    }

    /// Free-boundary Robin coefficient `q = Π(N, N)`.
    pub fn free_q(&self) -> Vec<f64> {
        self.pi_nn.clone()
    }
}

/// Extrinsic and intrinsic geometry of a surface in an initial data set.
#[derive(Debug, Clone)]
pub struct SurfaceGeometry {
    pub label: String,
    pub data_label: String,
    pub metric: Metric2Field,
    pub position: Vec<Vec3>,
    pub tangents: Vec<[Vec3; 2]>,
    /// Unit normal `N` (contravariant, ambient coordinates).
    pub normal: Vec<Vec3>,
    pub a: SymTensor2Field,
    pub h: ScalarField,
    pub k_sigma: SymTensor2Field,
    pub p: ScalarField,
    pub w: CovectorField,
    pub div_w: ScalarField,
    pub chi_plus: SymTensor2Field,
    pub chi_minus: SymTensor2Field,
    pub chi_minus_hat: SymTensor2Field,
    pub theta_plus: ScalarField,
    pub theta_minus: ScalarField,
    pub gauss: ScalarField,
    pub mu: ScalarField,
    pub j_n: ScalarField,
    pub j_norm: ScalarField,
    pub q: ScalarField,
    /// `tr_g k`.
    pub tr_k: ScalarField,
    /// `k(N, N)`.
    pub k_nn: ScalarField,
    /// `|k|²_g`.
    pub k_norm_sq: ScalarField,
    /// Ambient scalar curvature.
    pub r_m: ScalarField,
    /// Ambient `Ric(N, N)`.
    pub ric_nn: ScalarField,
    /// `∇_N P = tr_Σ(∇_N k)`.
    pub nabla_n_p: ScalarField,
    pub boundary: Option<BoundaryGeometry>,
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Per-node ambient evaluation.
struct Ambient {
    g: Mat3,
    ginv: Mat3,
    gamma: tensor::Christoffel,
    k: Mat3,
    dk: tensor::DMat3,
    ricci: Mat3,
}

fn ambient(data: &dyn InitialData, x: &Vec3, node: usize) -> Result<Ambient> {
    data.check_domain(x)?;
    let g = data.g(x);
    let ginv = tensor::inverse(&g).ok_or(Error::DegenerateMetric { node, det: tensor::det(&g) })?;
    let dg = data.dg(x);
    let ddg = data.ddg(x);
    Ok(Ambient {
        gamma: tensor::christoffel(&ginv, &dg),
        ricci: tensor::ricci(&ginv, &dg, &ddg),
        g,
        ginv,
        k: data.k(x),
        dk: data.dk(x),
    })
}

/// Covariant second derivative `∂_a∂_b F + Γ(∂_a F, ∂_b F)`.
fn covariant_hessian(gam: &tensor::Christoffel, d2: &Vec3, a: &Vec3, b: &Vec3) -> Vec3 {
    let mut out = *d2;
    for (j, o) in out.iter_mut().enumerate() {
        for k in 0..3 {
            for l in 0..3 {
                *o += gam[j][k][l] * a[k] * b[l];
            }
        }
    }
    out
}

/// Unit normal from the tangent frame, oriented by `e_u × e_v`.
pub(crate) fn unit_normal(g: &Mat3, ginv: &Mat3, eu: &Vec3, ev: &Vec3) -> Option<Vec3> {
    let n_cov = cross(eu, ev);
    let up = tensor::mat_vec(ginv, &n_cov);
    let norm2 = tensor::bilinear(g, &up, &up);
    if !(norm2 > 0.0) || !norm2.is_finite() {
        return None;
    }
    let s = norm2.sqrt();
    Some(up.map(|c| c / s))
}

/// Populate every [`SurfaceGeometry`] field for `surface` in `data`.
pub fn compute_geometry(surface: &SurfaceChart, data: &dyn InitialData) -> Result<SurfaceGeometry> {
    let grid = surface.grid().clone();
    let jets = surface.jets();
    compute_from_jets(surface, &jets, data, grid)
}

fn compute_from_jets(
    surface: &SurfaceChart,
    jets: &[Jet],
    data: &dyn InitialData,
    grid: crate::geometry::Grid2,
) -> Result<SurfaceGeometry> {
    let n = grid.len();
    let mut amb = Vec::with_capacity(n);
    for (node, j) in jets.iter().enumerate() {
        amb.push(ambient(data, &j.x, node)?);
    }
    let mut g_sigma = Vec::with_capacity(n);
    let mut normal = Vec::with_capacity(n);
    for (node, (j, am)) in jets.iter().zip(&amb).enumerate() {
        let m = [
            tensor::bilinear(&am.g, &j.fu, &j.fu),
            tensor::bilinear(&am.g, &j.fu, &j.fv),
            tensor::bilinear(&am.g, &j.fv, &j.fv),
        ];
        if !(m[0] > 0.0 && m[0] * m[2] - m[1] * m[1] > 0.0) {
            return Err(Error::ImmersionFailure { node });
        }
        g_sigma.push(m);
        normal.push(unit_normal(&am.g, &am.ginv, &j.fu, &j.fv).ok_or(Error::ImmersionFailure { node })?);
    }
    let metric = Metric2Field::new(grid.clone(), g_sigma)?;

    let mut a = Vec::with_capacity(n);
    let mut k_sigma = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut tr_k = Vec::with_capacity(n);
    let mut k_nn = Vec::with_capacity(n);
    let mut k_norm_sq = Vec::with_capacity(n);
    let mut r_m = Vec::with_capacity(n);
    let mut ric_nn = Vec::with_capacity(n);
    let mut nabla_n_p = Vec::with_capacity(n);
    let mut mu = Vec::with_capacity(n);
    let mut j_n = Vec::with_capacity(n);
    let mut j_norm = Vec::with_capacity(n);
    for k in 0..n {
        let (j, am, nn) = (&jets[k], &amb[k], &normal[k]);
        let nlow = tensor::mat_vec(&am.g, nn);
        let second = |d2: &Vec3, x: &Vec3, y: &Vec3| {
            let c = covariant_hessian(&am.gamma, d2, x, y);
            -(nlow[0] * c[0] + nlow[1] * c[1] + nlow[2] * c[2])
        };
        a.push([second(&j.fuu, &j.fu, &j.fu), second(&j.fuv, &j.fu, &j.fv), second(&j.fvv, &j.fv, &j.fv)]);
        k_sigma.push([
            tensor::bilinear(&am.k, &j.fu, &j.fu),
            tensor::bilinear(&am.k, &j.fu, &j.fv),
            tensor::bilinear(&am.k, &j.fv, &j.fv),
        ]);
        w.push([tensor::bilinear(&am.k, &j.fu, nn), tensor::bilinear(&am.k, &j.fv, nn)]);
        tr_k.push(tensor::trace(&am.ginv, &am.k));
        k_nn.push(tensor::bilinear(&am.k, nn, nn));
        k_norm_sq.push(tensor::contract2(&am.ginv, &am.k, &am.k));
        r_m.push(tensor::trace(&am.ginv, &am.ricci));
        ric_nn.push(tensor::bilinear(&am.ricci, nn, nn));
        // (∇_N k)_ij traced over the surface
        let mut nk = [[0.0; 3]; 3];
        for (p, row) in nk.iter_mut().enumerate() {
            for (q, val) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for l in 0..3 {
                    let mut c = am.dk[l][p][q];
                    for m in 0..3 {
                        c -= am.gamma[m][l][p] * am.k[m][q] + am.gamma[m][l][q] * am.k[p][m];
                    }
                    s += nn[l] * c;
                }
                *val = s;
            }
        }
        nabla_n_p.push(tensor::trace(&am.ginv, &nk) - tensor::bilinear(&nk, nn, nn));
        let em = energy_momentum(data, &j.x)?;
        mu.push(em.mu);
        j_n.push(em.j[0] * nn[0] + em.j[1] * nn[1] + em.j[2] * nn[2]);
        j_norm.push(em.j_norm);
    }

    let h: Vec<f64> = (0..n).map(|k| metric.trace(k, a[k])).collect();
    let p: Vec<f64> = (0..n).map(|k| metric.trace(k, k_sigma[k])).collect();
    let chi_plus: Vec<[f64; 3]> = (0..n).map(|k| [0, 1, 2].map(|c| k_sigma[k][c] + a[k][c])).collect();
    let chi_minus: Vec<[f64; 3]> = (0..n).map(|k| [0, 1, 2].map(|c| k_sigma[k][c] - a[k][c])).collect();
    let comps = metric.components();
    let chi_minus_hat: Vec<[f64; 3]> = (0..n)
        .map(|k| {
            let t = 0.5 * metric.trace(k, chi_minus[k]);
            [0, 1, 2].map(|c| chi_minus[k][c] - t * comps[k][c])
        })
        .collect();
    let theta_plus: Vec<f64> = (0..n).map(|k| h[k] + p[k]).collect();
    let theta_minus: Vec<f64> = (0..n).map(|k| -h[k] + p[k]).collect();
    let gauss = gauss_curvature(&metric);
    let q: Vec<f64> = (0..n)
        .map(|k| gauss[k] - mu[k] - j_n[k] - 0.5 * metric.tensor_inner(k, chi_plus[k], chi_plus[k]))
        .collect();
    let w = CovectorField(w);
    let div_w = divergence(&metric, &w)?;

    let boundary = match surface.topology() {
        Topology::Sphere => None,
        Topology::Disk => {
            let support = *surface.support().ok_or(Error::NoBoundary)?;
            Some(boundary_geometry(support, jets, &amb, &normal, &metric, &a, &w)?)
        }
    };

    Ok(SurfaceGeometry {
        label: surface.label().to_string(),
        data_label: data.spec(),
        position: jets.iter().map(|j| j.x).collect(),
        tangents: jets.iter().map(|j| [j.fu, j.fv]).collect(),
        normal,
        a: SymTensor2Field(a),
        h: ScalarField(h),
        k_sigma: SymTensor2Field(k_sigma),
        p: ScalarField(p),
        w,
        div_w,
        chi_plus: SymTensor2Field(chi_plus),
        chi_minus: SymTensor2Field(chi_minus),
        chi_minus_hat: SymTensor2Field(chi_minus_hat),
        theta_plus: ScalarField(theta_plus),
        theta_minus: ScalarField(theta_minus),
        gauss,
        mu: ScalarField(mu),
        j_n: ScalarField(j_n),
        j_norm: ScalarField(j_norm),
        q: ScalarField(q),
        tr_k: ScalarField(tr_k),
        k_nn: ScalarField(k_nn),
        k_norm_sq: ScalarField(k_norm_sq),
        r_m: ScalarField(r_m),
        ric_nn: ScalarField(ric_nn),
        nabla_n_p: ScalarField(nabla_n_p),
        boundary,
        metric,
    })
}

fn boundary_geometry(
    support: Support,
    jets: &[Jet],
    amb: &[Ambient],
    normal: &[Vec3],
    metric: &Metric2Field,
    a: &[[f64; 3]],
    w: &CovectorField,
) -> Result<BoundaryGeometry> {
    let grid = metric.grid();
    let nodes = grid.boundary_index().to_vec();
    let kappa = boundary_geodesic_curvature(metric)?;
    let ds = metric.boundary_lengths();
    let inv = metric.inverse();
    let mut out = BoundaryGeometry {
        support,
        nodes: nodes.clone(),
        nu: vec![],
        support_normal: vec![],
        nu_bar: vec![],
        gamma: vec![],
        a_nu_nu: vec![],
        pi_nn: vec![],
        pi_nubar_nubar: vec![],
        mean_curvature_support: vec![],
        w_nu: vec![],
        kappa,
        ds,
    };
    for &k in &nodes {
        let (j, am, nn) = (&jets[k], &amb[k], &normal[k]);
        let res = support.level(&j.x).abs();
        if res > crate::surface::chart::SUPPORT_TOL {
            return Err(Error::BoundaryOffSupport { node: k, residual: res });
        }
        // surface conormal ν^a = g^{au}/√g^{uu}
        let s = inv[k][0].sqrt();
        let nu_s = [inv[k][0] / s, inv[k][1] / s];
        let nu: Vec3 = [0, 1, 2].map(|i| nu_s[0] * j.fu[i] + nu_s[1] * j.fv[i]);
        // support normal and second fundamental form w.r.t. g
        let ds_cov = support.gradient(&j.x);
        let ds_up = tensor::mat_vec(&am.ginv, &ds_cov);
        let norm = tensor::bilinear(&am.g, &ds_up, &ds_up).sqrt();
        let nbar = ds_up.map(|c| c / norm);
        let hess = support.hessian(&j.x);
        let mut pi = [[0.0; 3]; 3];
        for p in 0..3 {
            for q in 0..3 {
                let mut c = hess[p][q];
                for m in 0..3 {
                    c -= am.gamma[m][p][q] * ds_cov[m];
                }
                pi[p][q] = c / norm;
            }
        }
        let cos_g = tensor::bilinear(&am.g, &nbar, nn).clamp(-1.0, 1.0);
        let gamma = cos_g.acos();
        let sin_g = gamma.sin();
        let nu_bar: Vec3 = [0, 1, 2].map(|i| cos_g * nu[i] - sin_g * nn[i]);
        let h_dm = tensor::trace(&am.ginv, &pi) - tensor::bilinear(&pi, &nbar, &nbar);
        let a_nn = a[k][0] * nu_s[0] * nu_s[0] + 2.0 * a[k][1] * nu_s[0] * nu_s[1] + a[k][2] * nu_s[1] * nu_s[1];
        out.nu.push(nu);
        out.support_normal.push(nbar);
        out.nu_bar.push(nu_bar);
        out.gamma.push(gamma);
        out.a_nu_nu.push(a_nn);
        out.pi_nn.push(tensor::bilinear(&pi, nn, nn));
        out.pi_nubar_nubar.push(tensor::bilinear(&pi, &nu_bar, &nu_bar));
        out.mean_curvature_support.push(h_dm);
        out.w_nu.push(w[k][0] * nu_s[0] + w[k][1] * nu_s[1]);
    }
    Ok(out)
}

impl SurfaceGeometry {
    pub fn len(&self) -> usize {
        self.metric.len()
    }
    pub fn is_empty(&self) -> bool {
        self.metric.is_empty()
    }
    pub fn topology(&self) -> Topology {
        self.metric.grid().topology()
    }
    pub fn area(&self) -> f64 {
        self.metric.area()
    }
    pub fn area_elements(&self) -> &[f64] {
        self.metric.area_elements()
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(self.metric.area_elements()).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs_theta_plus(&self) -> f64 {
        self.theta_plus.max_abs()
    }

    pub fn w_norm_sq(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.metric.norm_sq(k, self.w[k])).collect()
    }

    /// `|T|²_Σ` for a symmetric surface tensor field.
    pub fn tensor_norm(&self, t: &SymTensor2Field) -> Vec<f64> {
        (0..self.len()).map(|k| self.metric.tensor_inner(k, t[k], t[k]).max(0.0).sqrt()).collect()
    }

    /// `|A|²`.
    pub fn a_norm_sq(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.metric.tensor_inner(k, self.a[k], self.a[k])).collect()
    }

    /// `⟨A, k_Σ⟩`.
    pub fn a_dot_k(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.metric.tensor_inner(k, self.a[k], self.k_sigma[k])).collect()
    }

    /// `Ric(N,N) + |A|² + ½(R_Σ − R_M − |A|² − H²)`, which vanishes by the
    /// Gauss equation up to discretization error.
    pub fn gauss_equation_residual(&self) -> Vec<f64> {
        let a2 = self.a_norm_sq();
        (0..self.len())
            .map(|k| {
                0.5 * (2.0 * self.gauss[k] - self.r_m[k] - a2[k] - self.h[k] * self.h[k])
                    + self.ric_nn[k]
                    + a2[k]
            })
            .collect()
    }

    /// Same surface with the opposite unit normal.
    pub fn flipped(&self) -> SurfaceGeometry {
        let neg3 = |t: &SymTensor2Field| SymTensor2Field(t.iter().map(|c| c.map(|x| -x)).collect());
        let mut g = self.clone();
        g.normal = self.normal.iter().map(|n| n.map(|c| -c)).collect();
        g.a = neg3(&self.a);
        g.h = ScalarField(self.h.iter().map(|x| -x).collect());
        g.w = CovectorField(self.w.iter().map(|c| c.map(|x| -x)).collect());
        g.div_w = ScalarField(self.div_w.iter().map(|x| -x).collect());
        g.chi_plus = self.chi_minus.clone();
        g.chi_minus = self.chi_plus.clone();
        let n = self.len();
        let comps = self.metric.components();
        g.chi_minus_hat = SymTensor2Field(
            (0..n)
                .map(|k| {
                    let t = 0.5 * self.metric.trace(k, g.chi_minus[k]);
                    [0, 1, 2].map(|c| g.chi_minus[k][c] - t * comps[k][c])
                })
                .collect(),
        );
        g.theta_plus = ScalarField(self.theta_minus.iter().map(|x| -x).collect());
        g.theta_minus = ScalarField(self.theta_plus.iter().map(|x| -x).collect());
        g.j_n = ScalarField(self.j_n.iter().map(|x| -x).collect());
        g.nabla_n_p = ScalarField(self.nabla_n_p.iter().map(|x| -x).collect());
        if let Some(b) = g.boundary.as_mut() {
            for i in 0..b.nodes.len() {
                b.w_nu[i] = -b.w_nu[i];
                b.a_nu_nu[i] = -b.a_nu_nu[i];
                b.gamma[i] = std::f64::consts::PI - b.gamma[i];
                let nn = g.normal[b.nodes[i]];
                let (s, c) = b.gamma[i].sin_cos();
                b.nu_bar[i] = [0, 1, 2].map(|j| c * b.nu[i][j] - s * nn[j]);
            }
        }
        g.q = ScalarField(
            (0..n)
                .map(|k| {
                    self.gauss[k] - self.mu[k] - g.j_n[k]
                        - 0.5 * self.metric.tensor_inner(k, g.chi_plus[k], g.chi_plus[k])
                })
                .collect(),
        );
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{HyperboloidalFlat, MinkowskiFlat, SchwarzschildIsotropic};
    use crate::geometry::Grid2;

    #[test]
    fn flat_sphere() {
        let s = SurfaceChart::sphere(Grid2::sphere(16, 32).unwrap(), [0.0; 3], 2.0).unwrap();
        let g = compute_geometry(&s, &MinkowskiFlat).unwrap();
        for k in 0..g.len() {
            assert!((g.h[k] - 1.0).abs() < 1e-12);
            assert!(g.p[k].abs() < 1e-15);
            assert!((g.theta_minus[k] + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn horizon_is_minimal() {
        let d = SchwarzschildIsotropic::new(1.0).unwrap();
        let s = SurfaceChart::sphere(Grid2::sphere(16, 32).unwrap(), [0.0; 3], 0.5).unwrap();
        let g = compute_geometry(&s, &d).unwrap();
        assert!(g.max_abs_theta_plus() < 1e-12);
    }

    #[test]
    fn hyperboloidal_sphere() {
        let s = SurfaceChart::sphere(Grid2::sphere(16, 32).unwrap(), [0.0; 3], 1.0).unwrap();
        let g = compute_geometry(&s, &HyperboloidalFlat).unwrap();
        for k in 0..g.len() {
            assert!((g.p[k] - 2.0).abs() < 1e-12);
            assert!((g.theta_plus[k] - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_boundary_data() {
        let s = SurfaceChart::flat_disk(Grid2::disk(16, 32).unwrap(), 1.0, Support::Ball { radius: 1.0 }).unwrap();
        let g = compute_geometry(&s, &MinkowskiFlat).unwrap();
        let b = g.boundary.as_ref().unwrap();
        assert!(b.is_free_boundary());
        for i in 0..b.nodes.len() {
            assert!((b.pi_nn[i] - 1.0).abs() < 1e-12);
            assert!((b.mean_curvature_support[i] - 2.0).abs() < 1e-12);
        }
        assert!((b.length() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}
